"""Descriptor matching: kNN with k=2 and the ratio test"""
from .matcher import (
    DEFAULT_RATIO,
    KnnCandidate,
    MatchPair,
    distance,
    distance_matrix,
    knn2_match,
    match_descriptors,
    matches_to_csv,
    ratio_filter,
    read_matches_csv,
    write_matches_csv,
)

__all__ = [
    "DEFAULT_RATIO",
    "KnnCandidate",
    "MatchPair",
    "distance",
    "distance_matrix",
    "knn2_match",
    "match_descriptors",
    "matches_to_csv",
    "ratio_filter",
    "read_matches_csv",
    "write_matches_csv",
]
