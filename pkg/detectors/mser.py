"""Maximally stable extremal regions from a component tree

The tree is built once per polarity by labelling each lower level set:
dark-on-bright regions come from the sweep over the image itself,
bright-on-dark regions from the sweep over its inverse. Each node stands
for one connected component over the range of gray levels during which it
does not change.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import ndimage

from detectors.keypoint import Keypoint, sort_keypoints
from detectors.params import DetectorParams, MserParams
from imaging.image import GrayImage

logger = logging.getLogger(__name__)

TAG = "mser"
MAX_LEVEL = 255
MIN_STABILITY = 1e-3


@dataclass(frozen=True, eq=False)
class ComponentTree:
    """Flat arrays indexed by node id; the root is the last node."""

    level: np.ndarray
    area: np.ndarray
    sum_x: np.ndarray
    sum_y: np.ndarray
    parent: np.ndarray
    largest_child: np.ndarray

    @property
    def size(self) -> int:
        return len(self.level)

    def end_level(self) -> np.ndarray:
        """Last gray level each node is alive for."""
        has_parent = self.parent >= 0
        end = np.full(self.size, MAX_LEVEL, dtype=np.int64)
        end[has_parent] = self.level[self.parent[has_parent]] - 1
        return end


def build_component_tree(levels: np.ndarray) -> ComponentTree:
    """Sweep 4-connected lower level sets of an 8-bit array in increasing order.

    At every distinct level the set is relabelled; components holding a pixel
    of that level become new nodes, the rest carry their node over.
    """
    h, w = levels.shape
    flat = levels.ravel().astype(np.int64)
    ys, xs = np.divmod(np.arange(flat.size), w)

    node_level, node_area, node_sx, node_sy = [], [], [], []
    child_ids, parent_ids = [], []
    count = 0
    # node and one member pixel of every component at the previous level
    prev_node = np.empty(0, dtype=np.int64)
    prev_rep = np.empty(0, dtype=np.int64)

    for t in np.unique(flat).tolist():
        labels, n = ndimage.label((flat <= t).reshape(h, w))
        labels = labels.ravel()
        area = np.bincount(labels, minlength=n + 1)
        sx = np.bincount(labels, weights=xs, minlength=n + 1)
        sy = np.bincount(labels, weights=ys, minlength=n + 1)

        touched = np.zeros(n + 1, dtype=bool)
        touched[labels[flat == t]] = True
        fresh = np.flatnonzero(touched)
        node = np.full(n + 1, -1, dtype=np.int64)
        node[fresh] = count + np.arange(len(fresh))

        carried_to = labels[prev_rep]
        merged = touched[carried_to]
        child_ids.append(prev_node[merged])
        parent_ids.append(node[carried_to[merged]])
        node[carried_to[~merged]] = prev_node[~merged]

        node_level.append(np.full(len(fresh), t, dtype=np.int64))
        node_area.append(area[fresh])
        node_sx.append(sx[fresh])
        node_sy.append(sy[fresh])
        count += len(fresh)

        members = np.flatnonzero(labels)
        rep = np.empty(n + 1, dtype=np.int64)
        rep[labels[members]] = members
        prev_node, prev_rep = node[1:], rep[1:]

    area = np.concatenate(node_area).astype(np.int64)
    children = np.concatenate(child_ids)
    parents = np.concatenate(parent_ids)
    parent = np.full(count, -1, dtype=np.int64)
    parent[children] = parents

    # largest child per parent, ties to the lower id
    largest = np.full(count, -1, dtype=np.int64)
    order = np.lexsort((children, -area[children], parents))
    first_parents, first = np.unique(parents[order], return_index=True)
    largest[first_parents] = children[order][first]
    return ComponentTree(
        level=np.concatenate(node_level),
        area=area,
        sum_x=np.concatenate(node_sx),
        sum_y=np.concatenate(node_sy),
        parent=parent,
        largest_child=largest,
    )


def node_stability(tree: ComponentTree, delta: int) -> np.ndarray:
    """Minimum of (|R(t+delta)| - |R(t-delta)|) / |R(t)| over every level t a node spans."""
    end = tree.end_level()
    spans = end - tree.level + 1
    nodes = np.repeat(np.arange(tree.size), spans)
    starts = np.repeat(tree.level, spans)
    offsets = np.arange(len(nodes)) - np.repeat(np.cumsum(spans) - spans, spans)
    t = starts + offsets

    # R(t + delta): climb while the parent is already alive at that level
    target = np.minimum(t + delta, MAX_LEVEL)
    up = nodes.copy()
    while True:
        nxt = tree.parent[up]
        move = (nxt >= 0) & (tree.level[np.maximum(nxt, 0)] <= target)
        if not move.any():
            break
        up = np.where(move, nxt, up)

    # R(t - delta): follow the largest child until its level is low enough
    floor = t - delta
    down = nodes.copy()
    area_down = np.zeros(len(nodes), dtype=np.float64)
    active = np.ones(len(nodes), dtype=bool)
    while active.any():
        settled = active & (tree.level[down] <= floor)
        area_down[settled] = tree.area[down[settled]]
        active &= ~settled
        child = tree.largest_child[down]
        vanished = active & (child < 0)
        active &= ~vanished
        down = np.where(active, child, down)

    per_level = (tree.area[up] - area_down) / tree.area[nodes]
    stability = np.full(tree.size, np.inf)
    np.minimum.at(stability, nodes, per_level)
    return stability


def _stable_nodes(tree: ComponentTree, stability: np.ndarray, p: MserParams, image_area: int) -> np.ndarray:
    max_area = p.resolved_max_area(image_area)
    has_parent = tree.parent >= 0
    parent_ok = np.ones(tree.size, dtype=bool)
    parent_ok[has_parent] = stability[has_parent] <= stability[tree.parent[has_parent]]

    child_min = np.full(tree.size, np.inf)
    np.minimum.at(child_min, tree.parent[has_parent], stability[has_parent])
    children_ok = stability <= child_min

    keep = (
        parent_ok
        & children_ok
        & (tree.area >= p.min_area)
        & (tree.area <= max_area)
        & (stability <= p.max_variation)
    )
    return np.flatnonzero(keep)


def _regions(levels: np.ndarray, p: MserParams) -> List[Keypoint]:
    tree = build_component_tree(levels)
    stability = node_stability(tree, p.delta)
    keypoints = []
    for node in _stable_nodes(tree, stability, p, levels.size):
        area = float(tree.area[node])
        keypoints.append(Keypoint(
            x=float(tree.sum_x[node] / area),
            y=float(tree.sum_y[node] / area),
            scale=math.sqrt(area / math.pi),
            orientation=0.0,
            response=1.0 / max(float(stability[node]), MIN_STABILITY),
            octave=0,
            detector=TAG,
        ))
    return keypoints


def detect_mser_split(img: GrayImage, p: Optional[DetectorParams] = None) -> Tuple[List[Keypoint], List[Keypoint]]:
    """(dark-on-bright, bright-on-dark) keypoints, each sorted."""
    params = (p or DetectorParams()).mser
    levels = img.to_uint8()
    dark = _regions(levels, params)
    bright = _regions(MAX_LEVEL - levels, params)
    return sort_keypoints(dark), sort_keypoints(bright)


def detect_mser(img: GrayImage, p: Optional[DetectorParams] = None) -> List[Keypoint]:
    dark, bright = detect_mser_split(img, p)
    logger.info(f"MSER found {len(dark)} dark and {len(bright)} bright regions in {img}")
    return sort_keypoints(dark + bright)
