"""ALOI ingestion: pair reference and test images per object and condition family

Files are found by name anywhere under the root, following the published
naming ``<object>_<code>.<ext>``:

* illumination direction ``l<1-8>c<1-3>`` (reference ``l8c1``)
* illumination colour ``i<temperature>`` (reference ``i250``)
* viewpoint ``r<degrees>`` (reference ``r0``)
* stereo ``l`` / ``c`` / ``r``

A JSON manifest can replace the directory scan entirely.
"""
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ValidationError, model_validator

from errors import DatasetNotFoundError, InvalidInputError
from imaging.geometry import Homography

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".pgm", ".ppm")

CODE_GRAMMAR = {
    "aloi_illum_dir": re.compile(r"^l[1-8]c[1-3]$"),
    "aloi_illum_color": re.compile(r"^i\d{3}$"),
    "aloi_view": re.compile(r"^r\d{1,3}$"),
    "aloi_stereo": re.compile(r"^[lcr]$"),
}
REFERENCE_CODE = {
    "aloi_illum_dir": "l8c1",
    "aloi_illum_color": "i250",
    "aloi_view": "r0",
}
STEREO_PAIRS = (("c", "l"), ("c", "r"), ("l", "r"))
FILENAME = re.compile(r"^(?P<object>\d+)_(?P<code>[a-z0-9]+)$")

AloiFamily = Literal["aloi_illum_dir", "aloi_illum_color", "aloi_view", "aloi_stereo"]


@dataclass(frozen=True)
class AloiEntry:
    object_id: str
    family: str
    condition_code: str
    path: Path


@dataclass(frozen=True)
class AloiPair:
    reference: AloiEntry
    test: AloiEntry
    ground_truth: Optional[Homography]

    @property
    def parameter(self) -> str:
        if self.reference.family == "aloi_stereo":
            return f"{self.reference.condition_code}-{self.test.condition_code}"
        return self.test.condition_code


class ManifestEntry(BaseModel):
    path: str
    object_id: str
    family: AloiFamily
    condition_code: str
    role: Literal["reference", "test"]

    @model_validator(mode="after")
    def check_code(self):
        if not CODE_GRAMMAR[self.family].match(self.condition_code):
            raise ValueError(f"condition code {self.condition_code!r} does not fit family {self.family}")
        return self


def family_of(code: str) -> Optional[str]:
    for family, grammar in CODE_GRAMMAR.items():
        if grammar.match(code):
            return family
    return None


def _code_sort_key(code: str) -> Tuple:
    digits = re.findall(r"\d+", code)
    return tuple(int(d) for d in digits), code


def pair_ground_truth(family: str, reference_code: str, test_code: str) -> Optional[Homography]:
    """Identity for same-pose photometric pairs, None when the pose changes."""
    if family == "aloi_illum_color":
        return Homography.identity()
    if family == "aloi_illum_dir" and reference_code[-2:] == test_code[-2:]:
        return Homography.identity()
    return None


def scan_layout(root: Path, family: str, object_ids: Optional[Iterable[str]] = None) -> List[AloiEntry]:
    wanted = set(object_ids) if object_ids is not None else None
    entries = []
    for path in sorted(root.rglob("*")):
        if path.suffix.lower() not in IMAGE_SUFFIXES or not path.is_file():
            continue
        m = FILENAME.match(path.stem)
        if not m or (wanted is not None and m["object"] not in wanted):
            continue
        if family_of(m["code"]) == family:
            entries.append(AloiEntry(m["object"], family, m["code"], path))
    return entries


def read_manifest(path: Union[str, Path]) -> List[Tuple[AloiEntry, str]]:
    """(entry, role) rows; relative paths resolve against the manifest's directory."""
    path = Path(path)
    try:
        rows = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"{path}: cannot read manifest ({e})")
    if not isinstance(rows, list):
        raise InvalidInputError(f"{path}: manifest must be a JSON array")
    out = []
    for i, row in enumerate(rows):
        try:
            item = ManifestEntry.model_validate(row)
        except ValidationError as e:
            raise InvalidInputError(f"{path}: manifest row {i}: {e}")
        file_path = Path(item.path)
        if not file_path.is_absolute():
            file_path = path.parent / file_path
        out.append((AloiEntry(item.object_id, item.family, item.condition_code, file_path), item.role))
    return out


def _pair_scanned(entries: List[AloiEntry], family: str) -> List[AloiPair]:
    by_object: Dict[str, Dict[str, AloiEntry]] = {}
    for e in entries:
        by_object.setdefault(e.object_id, {})[e.condition_code] = e

    pairs = []
    for object_id in sorted(by_object, key=lambda o: (len(o), o)):
        codes = by_object[object_id]
        if family == "aloi_stereo":
            for ref, test in STEREO_PAIRS:
                if ref in codes and test in codes:
                    pairs.append(AloiPair(codes[ref], codes[test], None))
                else:
                    logger.warning(f"ALOI object {object_id}: stereo pair {ref}-{test} incomplete, skipped")
            continue
        reference = codes.get(REFERENCE_CODE[family])
        if reference is None:
            logger.warning(f"ALOI object {object_id}: no {REFERENCE_CODE[family]} reference for {family}, skipped")
            continue
        for code in sorted(codes, key=_code_sort_key):
            if family == "aloi_view" and code == reference.condition_code:
                continue
            pairs.append(AloiPair(reference, codes[code], pair_ground_truth(family, reference.condition_code, code)))
    return pairs


def _pair_manifest(rows: List[Tuple[AloiEntry, str]], family: str, object_ids) -> List[AloiPair]:
    wanted = set(object_ids) if object_ids is not None else None
    references: Dict[str, AloiEntry] = {}
    tests: List[AloiEntry] = []
    for entry, role in rows:
        if entry.family != family or (wanted is not None and entry.object_id not in wanted):
            continue
        if role == "reference":
            references[entry.object_id] = entry
        else:
            tests.append(entry)
    pairs = []
    for test in tests:
        reference = references.get(test.object_id)
        if reference is None:
            logger.warning(f"Manifest: no {family} reference for object {test.object_id}, skipping {test.path}")
            continue
        gt = pair_ground_truth(family, reference.condition_code, test.condition_code)
        if family == "aloi_stereo":
            gt = None
        pairs.append(AloiPair(reference, test, gt))
    return pairs


def load_aloi_subset(
    root: Optional[Union[str, Path]],
    family: str,
    object_ids: Optional[Iterable[str]] = None,
    manifest: Optional[Union[str, Path]] = None,
) -> List[AloiPair]:
    """(reference, test) pairs for one ALOI family; missing files are skipped with a warning."""
    if family not in CODE_GRAMMAR:
        raise InvalidInputError(f"unknown ALOI family {family!r}")
    if manifest is not None:
        pairs = _pair_manifest(read_manifest(manifest), family, object_ids)
    else:
        if root is None or not Path(root).is_dir():
            raise DatasetNotFoundError(f"ALOI root {root} is not a directory")
        pairs = _pair_scanned(scan_layout(Path(root), family, object_ids), family)

    present = []
    for pair in pairs:
        missing = [e.path for e in (pair.reference, pair.test) if not e.path.is_file()]
        if missing:
            logger.warning(f"ALOI pair {pair.reference.object_id}/{pair.parameter}: missing {missing[0]}, skipped")
            continue
        present.append(pair)
    if not present:
        raise DatasetNotFoundError(f"no {family} pairs found under {manifest or root}")
    logger.info(f"Loaded {len(present)} {family} pairs")
    return present
