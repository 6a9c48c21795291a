#!/usr/bin/env python3
"""featbench command line: detect, describe, match, eval, synth and bench

Exit codes: 0 on success, 1 on a toolkit failure, 2 on a usage error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config.benchmark_config import load_config, load_detector_params
from config.logging_config import configure_logging
from config.settings import LOG_FORMAT, LOG_LEVEL
from descriptors import DESCRIPTOR_TAGS, describe_keypoints, read_descriptors, write_descriptors
from detectors import DETECTORS, keypoints_to_csv, write_keypoints_csv
from detectors.params import DetectorParams
from errors import FeatBenchError
from evaluation import evaluate_image_pair
from harness import SYNTHETIC_FAMILIES, ensure_success, generate_series, run_benchmark, write_report
from imaging.io import load_homography, load_image, save_homography, save_pgm
from matching import DEFAULT_RATIO, match_descriptors, matches_to_csv, write_matches_csv

logger = logging.getLogger("featbench")


def _params(path: Optional[str]) -> DetectorParams:
    return load_detector_params(path) if path else DetectorParams()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_detect(args) -> int:
    img = load_image(args.image)
    keypoints = DETECTORS[args.detector](img, _params(args.params))
    logger.info(f"{args.detector}: {len(keypoints)} keypoints in {args.image}")
    _emit(keypoints_to_csv(keypoints), args.out)
    return 0


def cmd_describe(args) -> int:
    img = load_image(args.image)
    keypoints = DETECTORS[args.detector](img, _params(args.params))
    extraction = describe_keypoints(img, keypoints, args.descriptor)
    out = Path(args.out or f"{Path(args.image).stem}.{args.descriptor}.fdsc")
    write_descriptors(extraction.descriptors, out)
    if args.keypoints_out:
        write_keypoints_csv(extraction.keypoints, args.keypoints_out)
    logger.info(f"Wrote {len(extraction.descriptors)} {args.descriptor} descriptors to {out}")
    return 0


def cmd_match(args) -> int:
    queries = read_descriptors(args.desc_a)
    train = read_descriptors(args.desc_b)
    pairs = match_descriptors(queries, train, args.ratio)
    if args.out:
        write_matches_csv(pairs, args.out)
    else:
        sys.stdout.write(matches_to_csv(pairs))
    return 0


def cmd_eval(args) -> int:
    summary = evaluate_image_pair(
        load_image(args.image_a), load_image(args.image_b), load_homography(args.homography),
        args.detector, args.descriptor, _params(args.params), args.eps_pos, args.tau, args.ratio,
    )
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return 0


def cmd_synth(args) -> int:
    img = load_image(args.image)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.image).stem
    for spec, variant in generate_series(img, args.family):
        name = f"{stem}_{args.family}_{spec.parameter:g}"
        save_pgm(variant, out / f"{name}.pgm")
        save_homography(spec.ground_truth, out / f"{name}.H.txt")
    logger.info(f"Wrote {args.family} series for {args.image} to {out}")
    return 0


def cmd_bench(args) -> int:
    cfg = load_config(args.config)
    if args.out:
        cfg = cfg.model_copy(update={"output_dir": Path(args.out)})
    report = run_benchmark(cfg)
    write_report(report, cfg.output_dir)
    ensure_success(report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="featbench", description="Keypoint detector/descriptor benchmark toolkit")
    parser.add_argument("--log-level", default=LOG_LEVEL)
    parser.add_argument("--log-format", choices=["text", "json"], default=LOG_FORMAT)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect keypoints and print them as CSV")
    p.add_argument("image")
    p.add_argument("--detector", required=True, choices=sorted(DETECTORS))
    p.add_argument("--params", help="detector parameter file (.json or .toml)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("describe", help="detect and describe, writing an FDSC container")
    p.add_argument("image")
    p.add_argument("--detector", required=True, choices=sorted(DETECTORS))
    p.add_argument("--descriptor", required=True, choices=DESCRIPTOR_TAGS)
    p.add_argument("--params")
    p.add_argument("--out")
    p.add_argument("--keypoints-out", help="CSV of the described keypoints, row-aligned with the container")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("match", help="kNN (k=2) + ratio test between two FDSC files")
    p.add_argument("desc_a")
    p.add_argument("desc_b")
    p.add_argument("--ratio", type=float, default=DEFAULT_RATIO)
    p.add_argument("--out")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("eval", help="repeatability (and match correctness) of one image pair")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.add_argument("--homography", required=True)
    p.add_argument("--detector", required=True, choices=sorted(DETECTORS))
    p.add_argument("--descriptor", choices=DESCRIPTOR_TAGS)
    p.add_argument("--params")
    p.add_argument("--eps-pos", type=float, default=2.5)
    p.add_argument("--tau", type=float, default=2.0)
    p.add_argument("--ratio", type=float, default=DEFAULT_RATIO)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="write a synthetic condition series with ground-truth homographies")
    p.add_argument("image")
    p.add_argument("--family", required=True, choices=SYNTHETIC_FAMILIES)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="run the benchmark grid from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level, args.log_format)
    try:
        return args.func(args)
    except FeatBenchError as e:
        logger.error(str(e))
        return 1
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
