"""Exhaustive two-nearest-neighbour matching and the ratio filter"""
import csv
import hashlib
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
from scipy.spatial.distance import cdist

from descriptors.types import BinaryDescriptor, Descriptor, DescriptorSet
from errors import (
    IncompatibleDescriptorError,
    InsufficientTrainSetError,
    InvalidInputError,
    InvalidParameterError,
)

logger = logging.getLogger(__name__)

DEFAULT_RATIO = 0.75
MATCH_COLUMNS = ["query_index", "train_index", "distance"]
# distance-matrix cells computed per chunk
CHUNK_CELLS = 1 << 20

POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)

DescriptorInput = Union[DescriptorSet, Sequence[Descriptor]]


@dataclass(frozen=True)
class KnnCandidate:
    query_index: int
    best_index: int
    best_distance: float
    second_index: int
    second_distance: float


@dataclass(frozen=True)
class MatchPair:
    query_index: int
    train_index: int
    distance: float


def _as_set(descriptors: DescriptorInput, kind: str = None) -> DescriptorSet:
    if isinstance(descriptors, DescriptorSet):
        return descriptors
    return DescriptorSet.from_descriptors(list(descriptors), kind)


def _check_compatible(a: DescriptorSet, b: DescriptorSet) -> None:
    if a.kind != b.kind or a.dim != b.dim:
        raise IncompatibleDescriptorError(f"cannot compare {a.kind}/{a.dim} with {b.kind}/{b.dim}")


def distance_matrix(queries: DescriptorSet, train: DescriptorSet) -> np.ndarray:
    """L2 for float kinds, Hamming count for binary kinds, as float64."""
    _check_compatible(queries, train)
    if queries.binary:
        xor = queries.data[:, None, :] ^ train.data[None, :, :]
        return POPCOUNT[xor].sum(axis=2).astype(np.float64)
    return cdist(queries.data.astype(np.float64), train.data.astype(np.float64), metric="euclidean")


def distance(a: Descriptor, b: Descriptor) -> float:
    if a.kind != b.kind or a.dim != b.dim:
        raise IncompatibleDescriptorError(f"cannot compare {a.kind}/{a.dim} with {b.kind}/{b.dim}")
    if isinstance(a, BinaryDescriptor):
        return float(np.count_nonzero(a.bits != b.bits))
    return float(cdist(a.values[None, :], b.values[None, :], metric="euclidean")[0, 0])


def content_hashes(dset: DescriptorSet) -> np.ndarray:
    """64-bit digest per row; breaks distance ties independently of row order."""
    return np.array(
        [int.from_bytes(hashlib.blake2b(row.tobytes(), digest_size=8).digest(), "little") for row in dset.data],
        dtype=np.uint64,
    )


def _two_nearest(d: np.ndarray, hashes: np.ndarray, offset: int) -> List[KnnCandidate]:
    out = []
    for r, row in enumerate(d):
        threshold = np.partition(row, 1)[1]
        cand = np.flatnonzero(row <= threshold)
        order = cand[np.lexsort((cand, hashes[cand], row[cand]))]
        best, second = int(order[0]), int(order[1])
        out.append(KnnCandidate(offset + r, best, float(row[best]), second, float(row[second])))
    return out


def knn2_match(queries: DescriptorInput, train: DescriptorInput, workers: int = 1) -> List[KnnCandidate]:
    """Two nearest train descriptors per query, in query order.

    Ties are broken by descriptor content hash, then by train index.
    """
    train = _as_set(train)
    queries = _as_set(queries, train.kind)
    _check_compatible(queries, train)
    if len(train) < 2:
        raise InsufficientTrainSetError(f"kNN with k=2 needs at least 2 train descriptors, got {len(train)}")
    if len(queries) == 0:
        return []

    hashes = content_hashes(train)
    rows = max(1, CHUNK_CELLS // (len(train) * (train.data.shape[1])))
    starts = list(range(0, len(queries), rows))

    def run(start: int) -> List[KnnCandidate]:
        chunk = DescriptorSet(queries.kind, queries.data[start:start + rows])
        return _two_nearest(distance_matrix(chunk, train), hashes, start)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return [c for part in parts for c in part]


def ratio_filter(candidates: Sequence[KnnCandidate], ratio: float = DEFAULT_RATIO) -> List[MatchPair]:
    """Keep a candidate iff best < ratio * second (strict)."""
    if not 0.0 < ratio < 1.0:
        raise InvalidParameterError(f"ratio must lie in (0, 1), got {ratio}")
    return [
        MatchPair(c.query_index, c.best_index, c.best_distance)
        for c in candidates
        if c.best_distance < ratio * c.second_distance
    ]


def match_descriptors(
    queries: DescriptorInput, train: DescriptorInput, ratio: float = DEFAULT_RATIO, workers: int = 1
) -> List[MatchPair]:
    """knn2 + ratio filter; fewer than two train descriptors yields no matches."""
    train = _as_set(train)
    queries = _as_set(queries, train.kind)
    _check_compatible(queries, train)
    if len(train) < 2:
        logger.debug("Fewer than two train descriptors, no matches")
        return []
    pairs = ratio_filter(knn2_match(queries, train, workers), ratio)
    logger.debug(f"{len(pairs)} of {len(queries)} {queries.kind} queries survive the ratio test")
    return pairs


def matches_to_csv(pairs: Sequence[MatchPair]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MATCH_COLUMNS)
    for p in pairs:
        writer.writerow([p.query_index, p.train_index, f"{p.distance:.6g}"])
    return buf.getvalue()


def write_matches_csv(pairs: Sequence[MatchPair], path: Union[str, Path]) -> None:
    Path(path).write_text(matches_to_csv(pairs), encoding="utf-8")


def read_matches_csv(path: Union[str, Path]) -> List[MatchPair]:
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != MATCH_COLUMNS:
        raise InvalidInputError(f"{path}: expected header {','.join(MATCH_COLUMNS)}, got {reader.fieldnames}")
    try:
        return [MatchPair(int(r["query_index"]), int(r["train_index"]), float(r["distance"])) for r in reader]
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"{path}: {e}")
