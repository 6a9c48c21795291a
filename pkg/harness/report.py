"""results.csv, results_by_subject.csv, run_metadata.json and one SVG chart per family"""
import csv
import io
import json
import logging
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from config.settings import SERVER_VERSION  # noqa: E402
from detectors.export import fmt6  # noqa: E402
from harness.benchmark import BenchmarkRecord, BenchmarkReport  # noqa: E402

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "family", "parameter", "detector", "descriptor", "resolution",
    "n_kp_ref", "n_kp_test", "n_correspondences", "repeatability",
    "n_matches", "n_correct", "runtime_ms",
]

plt.rcParams["svg.hashsalt"] = "featbench"


def _blank(value, fmt=str) -> str:
    return "" if value is None else fmt(value)


def _parameter(value) -> str:
    return value if isinstance(value, str) else fmt6(value)


def record_row(r: BenchmarkRecord, with_timing: bool) -> List[str]:
    rec = r.record
    return [
        r.family,
        _parameter(r.parameter),
        rec.detector_tag,
        rec.descriptor_tag,
        fmt6(r.resolution),
        str(rec.n_keypoints_a),
        str(rec.n_keypoints_b),
        _blank(rec.n_correspondences),
        _blank(rec.repeatability, lambda v: f"{v:.6f}"),
        str(rec.n_matches),
        _blank(rec.n_correct_matches),
        f"{r.runtime_ms:.0f}" if with_timing else "",
    ]


def results_csv(records: List[BenchmarkRecord], with_timing: bool = False, by_subject: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow((["subject"] if by_subject else []) + RESULT_COLUMNS)
    for r in records:
        writer.writerow(([r.subject or ""] if by_subject else []) + record_row(r, with_timing))
    return buf.getvalue()


def run_metadata(report: BenchmarkReport) -> Dict:
    return {
        "config_digest": report.config_digest,
        "toolkit_version": SERVER_VERSION,
        "wall_time_s": round(report.wall_time_s, 3),
        "cells": len(report.records),
        "cell_runtime_ms": {
            "|".join([r.family, _parameter(r.parameter), r.record.detector_tag, r.record.descriptor_tag,
                      fmt6(r.resolution)]): round(r.runtime_ms, 1)
            for r in report.records
        },
        "failed_cells": [
            {
                "family": f.family,
                "parameter": _parameter(f.parameter),
                "detector": f.detector,
                "descriptor": f.descriptor,
                "resolution": f.resolution,
                "reason": f.reason,
            }
            for f in report.failures
        ],
    }


def plot_family(family: str, records: List[BenchmarkRecord], path: Path) -> None:
    """Repeatability panel plus a correct-match (or plain match) count panel."""
    params = []
    for r in records:
        if r.parameter not in params:
            params.append(r.parameter)
    categorical = any(isinstance(p, str) for p in params)
    xs_of = {p: (i if categorical else p) for i, p in enumerate(params)}
    multi_res = len({r.resolution for r in records}) > 1

    series: Dict[str, List[BenchmarkRecord]] = defaultdict(list)
    for r in records:
        label = f"{r.record.detector_tag}-{r.record.descriptor_tag}"
        if multi_res:
            label += f" @{fmt6(r.resolution)}"
        series[label].append(r)

    has_truth = any(r.record.n_correct_matches is not None for r in records)
    fig, (ax_rep, ax_match) = plt.subplots(1, 2, figsize=(12, 4.5))
    for label in sorted(series):
        rows = series[label]
        xs = [xs_of[r.parameter] for r in rows]
        rep = [(x, r.record.repeatability) for x, r in zip(xs, rows) if r.record.repeatability is not None]
        if rep:
            ax_rep.plot([p[0] for p in rep], [p[1] for p in rep], marker="o", label=label)
        counts = [r.record.n_correct_matches if has_truth else r.record.n_matches for r in rows]
        ax_match.plot(xs, [c if c is not None else float("nan") for c in counts], marker="o", label=label)

    ax_rep.set_title(f"Repeatability ({family})")
    ax_rep.set_ylabel("repeatability")
    ax_rep.set_ylim(0.0, 1.05)
    if not ax_rep.lines:
        ax_rep.text(0.5, 0.5, "no ground truth", ha="center", va="center", transform=ax_rep.transAxes)
    ax_match.set_title(f"{'Correct matches' if has_truth else 'Matches'} ({family})")
    ax_match.set_ylabel("correct matches" if has_truth else "matches")
    for ax in (ax_rep, ax_match):
        ax.set_xlabel("condition")
        ax.grid(True, alpha=0.3)
        if categorical:
            ax.set_xticks(range(len(params)))
            ax.set_xticklabels([str(p) for p in params], rotation=45, ha="right")
    ax_match.legend(fontsize="small", loc="center left", bbox_to_anchor=(1.0, 0.5))
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def write_report(report: BenchmarkReport, out_dir: Union[str, Path]) -> List[Path]:
    """Write all report files; an empty report yields header-only CSVs and no charts."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    results = out / "results.csv"
    results.write_text(results_csv(report.records, report.timings_in_csv), encoding="utf-8")
    by_subject = out / "results_by_subject.csv"
    by_subject.write_text(results_csv(report.subject_records, report.timings_in_csv, by_subject=True),
                          encoding="utf-8")
    metadata = out / "run_metadata.json"
    metadata.write_text(json.dumps(run_metadata(report), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written += [results, by_subject, metadata]

    families: Dict[str, List[BenchmarkRecord]] = defaultdict(list)
    for r in report.records:
        families[r.family].append(r)
    for family, records in sorted(families.items()):
        chart = out / f"{family}.svg"
        plot_family(family, records, chart)
        written.append(chart)
    logger.info(f"Wrote {len(written)} report files to {out}")
    return written
