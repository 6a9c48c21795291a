"""Keypoint CSV export and import"""
import csv
import io
from pathlib import Path
from typing import Iterable, List, Union

from errors import InvalidInputError, InvalidParameterError
from detectors.keypoint import Keypoint

KEYPOINT_COLUMNS = ["x", "y", "scale", "orientation", "response", "octave", "detector"]


def fmt6(value: float) -> str:
    """Six significant digits, no trailing zeros."""
    return f"{value:.6g}"


def keypoints_to_csv(keypoints: Iterable[Keypoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(KEYPOINT_COLUMNS)
    for kp in keypoints:
        writer.writerow([
            fmt6(kp.x), fmt6(kp.y), fmt6(kp.scale), fmt6(kp.orientation),
            fmt6(kp.response), kp.octave, kp.detector,
        ])
    return buf.getvalue()


def write_keypoints_csv(keypoints: Iterable[Keypoint], path: Union[str, Path]) -> None:
    Path(path).write_text(keypoints_to_csv(keypoints), encoding="utf-8")


def parse_keypoints_csv(text: str, source: str = "<text>") -> List[Keypoint]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != KEYPOINT_COLUMNS:
        raise InvalidInputError(f"{source}: expected header {','.join(KEYPOINT_COLUMNS)}, got {reader.fieldnames}")
    keypoints = []
    for row_no, row in enumerate(reader, start=2):
        try:
            keypoints.append(Keypoint(
                x=float(row["x"]),
                y=float(row["y"]),
                scale=float(row["scale"]),
                orientation=float(row["orientation"]),
                response=float(row["response"]),
                octave=int(row["octave"]),
                detector=row["detector"],
            ))
        except (TypeError, ValueError, InvalidParameterError) as e:
            raise InvalidInputError(f"{source} line {row_no}: {e}")
    return keypoints


def read_keypoints_csv(path: Union[str, Path]) -> List[Keypoint]:
    return parse_keypoints_csv(Path(path).read_text(encoding="utf-8"), str(path))
