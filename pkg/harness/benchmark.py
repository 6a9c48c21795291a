"""Detector x descriptor x condition x resolution benchmark grid"""
from __future__ import annotations

import logging
import threading
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

from descriptors.extractors import Extraction, ImageStructures, describe_keypoints
from detectors import DETECTORS
from detectors.keypoint import Keypoint
from detectors.params import DetectorParams
from errors import BenchmarkFailedError, FeatBenchError
from evaluation.repeatability import RepeatabilityRecord, find_correspondences_with_counts, score_matches
from harness.aloi import load_aloi_subset
from harness.conditions import (
    SYNTHETIC_FAMILIES,
    ConditionSpec,
    Parameter,
    downscale,
    generate_series,
    rescale_homography,
)
from harness.synthetic import synthetic_subjects
from imaging.image import GrayImage
from imaging.io import load_image
from matching.matcher import match_descriptors

if TYPE_CHECKING:
    from config.benchmark_config import BenchmarkConfig

logger = logging.getLogger(__name__)

CellKey = Tuple[str, Parameter, str, str, float]


@dataclass(frozen=True)
class Trial:
    """A reference/test pair under one condition for one subject."""

    subject: str
    condition: ConditionSpec
    reference_key: str
    reference: GrayImage
    test: GrayImage


@dataclass
class FeatureBundle:
    keypoints: List[Keypoint] = field(default_factory=list)
    extractions: Dict[str, Extraction] = field(default_factory=dict)
    errors: Dict[str, str] = field(default_factory=dict)
    detect_error: Optional[str] = None
    detect_ms: float = 0.0
    describe_ms: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class BenchmarkRecord:
    family: str
    parameter: Parameter
    resolution: float
    record: RepeatabilityRecord
    runtime_ms: float
    subject: Optional[str] = None
    # pooled repeatability denominator, kept for aggregation
    denominator: Optional[int] = None

    def cell_key(self) -> CellKey:
        return (self.family, self.parameter, self.record.detector_tag, self.record.descriptor_tag, self.resolution)

    def sort_key(self) -> Tuple:
        param = (1, 0.0, self.parameter) if isinstance(self.parameter, str) else (0, float(self.parameter), "")
        return (self.family, *param, self.record.detector_tag, self.record.descriptor_tag, self.resolution,
                self.subject or "")


@dataclass(frozen=True)
class CellFailure:
    family: str
    parameter: Parameter
    detector: str
    descriptor: str
    resolution: float
    reason: str


@dataclass
class BenchmarkReport:
    records: List[BenchmarkRecord]
    subject_records: List[BenchmarkRecord]
    failures: List[CellFailure]
    config_digest: str
    wall_time_s: float
    timings_in_csv: bool = False

    @property
    def total_cells(self) -> int:
        return len(self.records) + len(self.failures)

    @property
    def failed_fraction(self) -> float:
        return len(self.failures) / self.total_cells if self.total_cells else 0.0


def _subject_images(cfg: BenchmarkConfig) -> List[Tuple[str, GrayImage]]:
    subjects = []
    seen = set()
    for path in cfg.images:
        name = path.stem
        while name in seen:
            name = f"{name}_"
        seen.add(name)
        subjects.append((name, load_image(path)))
    for i, img in enumerate(synthetic_subjects(cfg.synthetic_subjects, cfg.seed)):
        subjects.append((f"synthetic{i:02d}", img))
    return subjects


def build_trials(cfg: BenchmarkConfig) -> List[Trial]:
    trials = []
    synthetic = [f for f in cfg.families if f in SYNTHETIC_FAMILIES]
    if synthetic:
        for name, img in _subject_images(cfg):
            for family in synthetic:
                for spec, test in generate_series(img, family, cfg.grid_for(family)):
                    trials.append(Trial(name, spec, name, img, test))

    cache: Dict[str, GrayImage] = {}
    for family in cfg.families:
        if family in SYNTHETIC_FAMILIES:
            continue
        for pair in load_aloi_subset(cfg.aloi_root, family, cfg.aloi_objects, cfg.aloi_manifest):
            key = str(pair.reference.path)
            if key not in cache:
                cache[key] = load_image(pair.reference.path)
            spec = ConditionSpec(family, pair.parameter, pair.ground_truth)
            trials.append(Trial(pair.reference.object_id, spec, key, cache[key], load_image(pair.test.path)))
    logger.info(f"Built {len(trials)} trials over families {list(cfg.families)}")
    return trials


def compute_features(
    img: GrayImage,
    detector: str,
    descriptors: List[str],
    params: DetectorParams,
    structures: Optional[ImageStructures] = None,
) -> FeatureBundle:
    """Detect once, then describe with every requested descriptor; errors are recorded, not raised."""
    bundle = FeatureBundle()
    start = time.perf_counter()
    try:
        bundle.keypoints = DETECTORS[detector](img, params)
    except FeatBenchError as e:
        bundle.detect_error = f"{detector} detection failed: {e}"
        return bundle
    finally:
        bundle.detect_ms = (time.perf_counter() - start) * 1000.0
    structures = structures if structures is not None else ImageStructures(img)
    for kind in descriptors:
        start = time.perf_counter()
        try:
            bundle.extractions[kind] = describe_keypoints(img, bundle.keypoints, kind, structures)
        except FeatBenchError as e:
            bundle.errors[kind] = f"{kind} description failed: {e}"
        bundle.describe_ms[kind] = (time.perf_counter() - start) * 1000.0
    return bundle


def compute_all_features(img: GrayImage, cfg: BenchmarkConfig) -> Dict[str, FeatureBundle]:
    """Every configured detector on one image, sharing its pyramid, integral image and sampler."""
    structures = ImageStructures(img)
    descriptors = list(cfg.descriptors)
    return {
        detector: compute_features(img, detector, descriptors, cfg.detector_params, structures)
        for detector in cfg.detectors
    }


def _bundle_error(bundle: FeatureBundle, descriptor: str) -> Optional[str]:
    return bundle.detect_error or bundle.errors.get(descriptor)


def evaluate_trial(
    trial: Trial,
    resolution: float,
    references: Dict[str, FeatureBundle],
    cfg: BenchmarkConfig,
) -> Tuple[List[BenchmarkRecord], List[CellFailure]]:
    """Score one trial at one resolution for every detector and descriptor."""
    spec = trial.condition
    ref_img = downscale(trial.reference, resolution)
    test_img = downscale(trial.test, resolution)
    H = rescale_homography(spec.ground_truth, resolution)
    tests = compute_all_features(test_img, cfg)

    records, failures = [], []
    for detector in cfg.detectors:
        reference, test = references[detector], tests[detector]
        counts = None
        if H is not None and reference.detect_error is None and test.detect_error is None:
            counts = find_correspondences_with_counts(
                reference.keypoints, test.keypoints, H,
                (ref_img.width, ref_img.height), (test_img.width, test_img.height),
                cfg.eps_pos, cfg.tau,
            )

        for descriptor in cfg.descriptors:
            reason = _bundle_error(reference, descriptor) or _bundle_error(test, descriptor)
            if reason is not None:
                failures.append(CellFailure(spec.family, spec.parameter, detector, descriptor, resolution, reason))
                continue
            start = time.perf_counter()
            try:
                ref_x, test_x = reference.extractions[descriptor], test.extractions[descriptor]
                pairs = match_descriptors(ref_x.descriptors, test_x.descriptors, cfg.ratio)
                correct = None
                if H is not None:
                    correct, _ = score_matches(pairs, ref_x.keypoints, test_x.keypoints, H, cfg.eps_pos)
            except FeatBenchError as e:
                failures.append(CellFailure(spec.family, spec.parameter, detector, descriptor, resolution,
                                            f"matching failed: {e}"))
                continue
            elapsed = (
                reference.detect_ms + test.detect_ms
                + reference.describe_ms.get(descriptor, 0.0) + test.describe_ms.get(descriptor, 0.0)
                + (time.perf_counter() - start) * 1000.0
            )
            record = RepeatabilityRecord(
                detector_tag=detector,
                descriptor_tag=descriptor,
                condition=spec.label,
                repeatability=counts.repeatability if counts is not None else None,
                n_keypoints_a=len(reference.keypoints),
                n_keypoints_b=len(test.keypoints),
                n_correspondences=len(counts.correspondences) if counts is not None else None,
                n_matches=len(pairs),
                n_correct_matches=correct,
            )
            records.append(BenchmarkRecord(
                spec.family, spec.parameter, resolution, record, elapsed, trial.subject,
                counts.denominator if counts is not None else None,
            ))
    return records, failures


def pool_records(subject_records: List[BenchmarkRecord]) -> List[BenchmarkRecord]:
    """Sum counts per cell; repeatability = sum of correspondences / max(1, sum of denominators)."""
    groups: Dict[CellKey, List[BenchmarkRecord]] = defaultdict(list)
    for r in subject_records:
        groups[r.cell_key()].append(r)
    pooled = []
    for (family, parameter, detector, descriptor, resolution), rows in groups.items():
        has_truth = all(r.record.repeatability is not None for r in rows)
        n_corr = sum(r.record.n_correspondences for r in rows) if has_truth else None
        denominator = sum(r.denominator for r in rows) if has_truth else None
        record = RepeatabilityRecord(
            detector_tag=detector,
            descriptor_tag=descriptor,
            condition=rows[0].record.condition,
            repeatability=n_corr / max(1, denominator) if has_truth else None,
            n_keypoints_a=sum(r.record.n_keypoints_a for r in rows),
            n_keypoints_b=sum(r.record.n_keypoints_b for r in rows),
            n_correspondences=n_corr,
            n_matches=sum(r.record.n_matches for r in rows),
            n_correct_matches=sum(r.record.n_correct_matches for r in rows) if has_truth else None,
        )
        pooled.append(BenchmarkRecord(family, parameter, resolution, record,
                                      sum(r.runtime_ms for r in rows), None, denominator))
    return sorted(pooled, key=BenchmarkRecord.sort_key)


def run_benchmark(cfg: BenchmarkConfig) -> BenchmarkReport:
    """Run every cell of the grid; failed cells are reported, not raised."""
    started = time.perf_counter()
    threads = cfg.effective_threads()
    trials = build_trials(cfg)

    ref_jobs: Dict[Tuple[str, float], GrayImage] = {}
    for trial in trials:
        for resolution in cfg.resolutions:
            ref_jobs.setdefault((trial.reference_key, resolution), trial.reference)

    def reference_job(key):
        _, resolution = key
        return key, compute_all_features(downscale(ref_jobs[key], resolution), cfg)

    units = [(t, r) for t in trials for r in cfg.resolutions]
    done = [0]
    progress = threading.Lock()

    def trial_job(unit):
        trial, resolution = unit
        out = evaluate_trial(trial, resolution, references[(trial.reference_key, resolution)], cfg)
        with progress:
            done[0] += 1
            logger.info(f"[{done[0]}/{len(units)}] {trial.subject} {trial.condition.label} @ {resolution:g}")
        return out

    with ThreadPoolExecutor(max_workers=threads) as pool:
        references = dict(pool.map(reference_job, sorted(ref_jobs)))
        results = list(pool.map(trial_job, units))

    subject_records = [r for recs, _ in results for r in recs]
    subject_failures = [f for _, fails in results for f in fails]

    failed_keys: Dict[CellKey, str] = {}
    for f in subject_failures:
        failed_keys.setdefault((f.family, f.parameter, f.detector, f.descriptor, f.resolution), f.reason)
    for key, reason in failed_keys.items():
        logger.warning(f"Cell {key} failed: {reason}")

    kept = [r for r in subject_records if r.cell_key() not in failed_keys]
    failures = [CellFailure(*key, reason) for key, reason in failed_keys.items()]
    failures.sort(key=lambda f: (f.family, str(f.parameter), f.detector, f.descriptor, f.resolution))

    report = BenchmarkReport(
        records=pool_records(kept),
        subject_records=sorted(kept, key=BenchmarkRecord.sort_key),
        failures=failures,
        config_digest=cfg.digest(),
        wall_time_s=time.perf_counter() - started,
        timings_in_csv=cfg.timings_in_csv,
    )
    logger.info(f"Benchmark finished: {len(report.records)} cells, {len(failures)} failed, "
                f"{report.wall_time_s:.1f}s on {threads} threads")
    return report


def ensure_success(report: BenchmarkReport) -> None:
    """Raise when more than half of the cells failed."""
    if report.total_cells and report.failed_fraction > 0.5:
        raise BenchmarkFailedError(len(report.failures), report.total_cells)
