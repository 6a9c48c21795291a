"""Ground-truth scoring of detections and matches under a known homography"""
import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from detectors.keypoint import Keypoint
from errors import InvalidInputError, InvalidParameterError, ProjectionError
from imaging.geometry import Homography
from matching.matcher import MatchPair

logger = logging.getLogger(__name__)

DEFAULT_EPS_POS = 2.5
DEFAULT_TAU = 2.0
W_EPSILON = 1e-9

Size = Tuple[int, int]


@dataclass(frozen=True)
class Correspondence:
    index_a: int
    index_b: int
    projection_error: float
    scale_ratio: float


@dataclass(frozen=True)
class RepeatabilityResult:
    """Correspondences plus the visible-set sizes they are normalized by."""

    correspondences: List[Correspondence]
    visible_a: int
    visible_b: int

    @property
    def denominator(self) -> int:
        return min(self.visible_a, self.visible_b)

    @property
    def repeatability(self) -> float:
        if self.denominator == 0:
            return 0.0
        return len(self.correspondences) / self.denominator


@dataclass(frozen=True)
class RepeatabilityRecord:
    """One benchmark cell. ``repeatability`` and the correctness counts are None without ground truth."""

    detector_tag: str
    descriptor_tag: str
    condition: str
    repeatability: Optional[float]
    n_keypoints_a: int
    n_keypoints_b: int
    n_correspondences: Optional[int]
    n_matches: int
    n_correct_matches: Optional[int]


def project_keypoint(kp: Keypoint, H: Homography) -> Keypoint:
    """Map position projectively and scale by sqrt(|det J|) of H at the point."""
    x, y, w = H.apply(kp.x, kp.y)
    w = float(w)
    if abs(w) <= W_EPSILON:
        raise ProjectionError(f"keypoint ({kp.x}, {kp.y}) projects to infinity")
    # det of the Jacobian of (u/w, v/w) is det(H) / w^3
    jac = abs(float(np.linalg.det(H.matrix)) / w ** 3)
    return replace(kp, x=float(x), y=float(y), scale=kp.scale * math.sqrt(jac))


def _margin(kp: Keypoint) -> int:
    return math.ceil(2.0 * kp.scale)


def visible(kp: Keypoint, size: Size) -> bool:
    """True when kp lies at least ceil(2*scale) pixels inside a (width, height) image."""
    width, height = size
    m = _margin(kp)
    return m <= kp.x <= width - 1 - m and m <= kp.y <= height - 1 - m


def _visible_projections(kps: Sequence[Keypoint], H: Homography, own: Size, other: Size) -> List[Tuple[int, Keypoint]]:
    out = []
    for i, kp in enumerate(kps):
        if not visible(kp, own):
            continue
        try:
            projected = project_keypoint(kp, H)
        except ProjectionError:
            continue
        if visible(projected, other):
            out.append((i, projected))
    return out


def find_correspondences_with_counts(
    kps_a: Sequence[Keypoint],
    kps_b: Sequence[Keypoint],
    H: Homography,
    size_a: Size,
    size_b: Size,
    eps_pos: float = DEFAULT_EPS_POS,
    tau: float = DEFAULT_TAU,
) -> RepeatabilityResult:
    if eps_pos < 0:
        raise InvalidParameterError(f"eps_pos must be non-negative, got {eps_pos}")
    if tau < 1:
        raise InvalidParameterError(f"tau must be at least 1, got {tau}")

    seen_a = _visible_projections(kps_a, H, size_a, size_b)
    seen_b = _visible_projections(kps_b, H.inverse(), size_b, size_a)
    if not seen_a or not seen_b:
        return RepeatabilityResult([], len(seen_a), len(seen_b))

    ia = np.array([i for i, _ in seen_a])
    ib = np.array([i for i, _ in seen_b])
    pa = np.array([[p.x, p.y] for _, p in seen_a])
    pb = np.array([[kps_b[i].x, kps_b[i].y] for i in ib])
    sa = np.array([p.scale for _, p in seen_a])
    sb = np.array([kps_b[i].scale for i in ib])

    err = cdist(pa, pb)
    ratio = sa[:, None] / sb[None, :]
    ok = (err <= eps_pos) & (ratio >= 1.0 / tau) & (ratio <= tau)
    ra, rb = np.nonzero(ok)
    e = err[ra, rb]
    log_ratio = np.abs(np.log(ratio[ra, rb]))
    order = np.lexsort((ib[rb], ia[ra], log_ratio, e))

    used_a, used_b = set(), set()
    found = []
    for k in order:
        a, b = int(ia[ra[k]]), int(ib[rb[k]])
        if a in used_a or b in used_b:
            continue
        used_a.add(a)
        used_b.add(b)
        found.append(Correspondence(a, b, float(e[k]), float(ratio[ra[k], rb[k]])))
    return RepeatabilityResult(found, len(seen_a), len(seen_b))


def find_correspondences(
    kps_a: Sequence[Keypoint],
    kps_b: Sequence[Keypoint],
    H: Homography,
    size_a: Size,
    size_b: Size,
    eps_pos: float = DEFAULT_EPS_POS,
    tau: float = DEFAULT_TAU,
) -> List[Correspondence]:
    """Greedy one-to-one assignment in ascending projection error.

    Only keypoints visible in their own image and, once projected, in the
    other image take part. Sizes are (width, height).
    """
    return find_correspondences_with_counts(kps_a, kps_b, H, size_a, size_b, eps_pos, tau).correspondences


def repeatability(
    kps_a: Sequence[Keypoint],
    kps_b: Sequence[Keypoint],
    H: Homography,
    size_a: Size,
    size_b: Size,
    eps_pos: float = DEFAULT_EPS_POS,
    tau: float = DEFAULT_TAU,
) -> float:
    return find_correspondences_with_counts(kps_a, kps_b, H, size_a, size_b, eps_pos, tau).repeatability


def score_matches(
    pairs: Sequence[MatchPair],
    kps_a: Sequence[Keypoint],
    kps_b: Sequence[Keypoint],
    H: Homography,
    eps_pos: float = DEFAULT_EPS_POS,
) -> Tuple[int, int]:
    """(n_correct, n_total): a match is correct when the projected query lands within eps_pos of its train keypoint."""
    correct = 0
    for p in pairs:
        if not (0 <= p.query_index < len(kps_a)) or not (0 <= p.train_index < len(kps_b)):
            raise InvalidInputError(
                f"match ({p.query_index}, {p.train_index}) out of range for {len(kps_a)}/{len(kps_b)} keypoints"
            )
        try:
            projected = project_keypoint(kps_a[p.query_index], H)
        except ProjectionError:
            continue
        target = kps_b[p.train_index]
        if math.hypot(projected.x - target.x, projected.y - target.y) <= eps_pos:
            correct += 1
    return correct, len(pairs)
