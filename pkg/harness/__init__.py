"""Benchmark harness: condition generators, ALOI ingestion, the grid runner and reports"""
from .conditions import (
    ALOI_FAMILIES,
    FAMILIES,
    SYNTHETIC_FAMILIES,
    ConditionSpec,
    downscale,
    generate_exposure_series,
    generate_rotation_series,
    generate_scale_series,
    generate_series,
    generate_viewpoint_series,
    rescale_homography,
    viewpoint_homography,
)
from .synthetic import synthetic_subjects, textured_image
from .aloi import AloiEntry, AloiPair, load_aloi_subset, read_manifest
from .benchmark import BenchmarkRecord, BenchmarkReport, CellFailure, ensure_success, run_benchmark
from .report import RESULT_COLUMNS, results_csv, write_report

__all__ = [
    "ALOI_FAMILIES",
    "FAMILIES",
    "SYNTHETIC_FAMILIES",
    "ConditionSpec",
    "downscale",
    "generate_exposure_series",
    "generate_rotation_series",
    "generate_scale_series",
    "generate_series",
    "generate_viewpoint_series",
    "rescale_homography",
    "viewpoint_homography",
    "synthetic_subjects",
    "textured_image",
    "AloiEntry",
    "AloiPair",
    "load_aloi_subset",
    "read_manifest",
    "BenchmarkRecord",
    "BenchmarkReport",
    "CellFailure",
    "ensure_success",
    "run_benchmark",
    "RESULT_COLUMNS",
    "results_csv",
    "write_report",
]
