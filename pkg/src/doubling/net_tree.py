"""Hierarchical net-trees over finite metrics.

Level i of the tree carries a net of the level below at radius 2**i, after
the metric has been rescaled so that its smallest distance is exactly
2**tau(eps). Leaves sit at level 0, one per point; the top level is the
first singleton net.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .errors import LevelOutOfRange, UnknownPoint
from .metric import REL_TOL, FiniteMetric, greedy_net

__all__ = [
    "tau_for",
    "check_eps",
    "NetTreeNode",
    "NetTree",
    "ValidationReport",
    "build_net_tree",
    "validate_net_tree",
    "istar",
    "level_ancestor_label",
    "save_net_tree",
    "load_net_tree",
]


def check_eps(eps: float) -> None:
    if not (0.0 < eps <= 0.25):
        raise ValueError(f"eps must lie in (0, 1/4], got {eps!r}")


def tau_for(eps: float) -> int:
    """Normalization exponent: rescaled minimum distance is 2**tau."""
    check_eps(eps)
    return 6 + math.ceil(math.log2(1.0 / eps))


@dataclass
class NetTreeNode:
    label: int
    parent: int | None  # index into the level above; None only at the top


class NetTree:
    """Levels of nodes plus the scale that took the metric to net units.

    ``levels[i]`` lists the nodes of level i in ascending label order;
    ``scaled_dist`` is the rescaled distance matrix the nets were built on.
    """

    def __init__(self, levels: list[list[NetTreeNode]], scale: float, scaled_dist: np.ndarray) -> None:
        self.levels = levels
        self.scale = scale
        self.scaled_dist = scaled_dist
        self._index: list[dict[int, int]] = [
            {node.label: k for k, node in enumerate(level)} for level in levels
        ]
        self._istar: dict[int, int] = {}
        for i, level in enumerate(levels):
            for node in level:
                self._istar[node.label] = i

    @property
    def n_points(self) -> int:
        return len(self.levels[0])

    @property
    def top_level(self) -> int:
        return len(self.levels) - 1

    def labels(self, i: int) -> list[int]:
        if not 0 <= i <= self.top_level:
            raise LevelOutOfRange(f"level {i} outside [0, {self.top_level}]")
        return [node.label for node in self.levels[i]]

    def node_index(self, i: int, label: int) -> int:
        return self._index[i][label]

    @staticmethod
    def radius(i: int) -> float:
        return 2.0**i


def build_net_tree(m: FiniteMetric, eps: float) -> NetTree:
    """Build the net-tree of a metric at accuracy eps.

    The metric is rescaled so its minimum distance is exactly 2**tau(eps),
    each level's labels are the greedy net of the level below at radius
    2**i, and every node's parent is the same label when it survives, else
    the lowest-id covering label. Levels stop at the first singleton.
    """
    tau = tau_for(eps)
    n = m.n
    if n == 1:
        scaled = np.zeros((1, 1))
        return NetTree([[NetTreeNode(0, None)]], 1.0, scaled)
    scale = 2.0**tau / m.min_distance()
    scaled = m.dist * scale
    scaled.setflags(write=False)
    sm = FiniteMetric(scaled, validate=False)

    levels = [[NetTreeNode(p, None) for p in range(n)]]
    current = list(range(n))
    i = 0
    while len(current) > 1:
        i += 1
        r = NetTree.radius(i)
        kept = greedy_net(sm, r, points=current)
        kept_set = set(kept)
        next_level = [NetTreeNode(label, None) for label in kept]
        index = {label: k for k, label in enumerate(kept)}
        for node in levels[-1]:
            if node.label in kept_set:
                node.parent = index[node.label]
            else:
                for q in kept:  # ascending, so the first hit is the lowest id
                    if scaled[node.label, q] <= r:
                        node.parent = index[q]
                        break
                else:  # pragma: no cover - greedy guarantees coverage
                    raise AssertionError(f"label {node.label} uncovered at level {i}")
        levels.append(next_level)
        current = kept
    return NetTree(levels, scale, scaled)


def istar(t: NetTree, v: int) -> int:
    """Highest level whose net still contains the point ``v``."""
    try:
        return t._istar[v]
    except KeyError:
        raise UnknownPoint(f"point {v} is not a leaf of this net-tree") from None


def level_ancestor_label(t: NetTree, v: int, i: int) -> int:
    """Label of the level-i ancestor of the leaf ``v``."""
    if v not in t._index[0]:
        raise UnknownPoint(f"point {v} is not a leaf of this net-tree")
    if not 0 <= i <= t.top_level:
        raise LevelOutOfRange(f"level {i} outside [0, {t.top_level}]")
    idx = t._index[0][v]
    for level in range(i):
        parent = t.levels[level][idx].parent
        if parent is None:  # pragma: no cover - only the top lacks a parent
            raise LevelOutOfRange(f"node at level {level} has no parent")
        idx = parent
    return t.levels[i][idx].label


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    clause: str | None = None
    detail: str = ""


def validate_net_tree(t: NetTree, m: FiniteMetric) -> ValidationReport:
    """Re-check every structural invariant, reporting the first violation."""
    n = m.n
    S = m.dist * t.scale

    leaf_labels = sorted(node.label for node in t.levels[0])
    if leaf_labels != list(range(n)):
        return ValidationReport(False, "leaf bijection", f"leaf labels {leaf_labels} != 0..{n - 1}")

    for i in range(1, t.top_level + 1):
        children: dict[int, list[int]] = {}
        for node in t.levels[i - 1]:
            if node.parent is None:
                return ValidationReport(False, "parent missing", f"level {i - 1} node {node.label}")
            if not 0 <= node.parent < len(t.levels[i]):
                return ValidationReport(False, "parent index", f"level {i - 1} node {node.label}")
            children.setdefault(node.parent, []).append(node.label)
        r = NetTree.radius(i)
        for k, node in enumerate(t.levels[i]):
            if node.label not in children.get(k, []):
                return ValidationReport(
                    False, "same-label child", f"level {i} node {node.label} has no child with its label"
                )
        for node in t.levels[i - 1]:
            parent_label = t.levels[i][node.parent].label
            if S[node.label, parent_label] > r * (1.0 + REL_TOL):
                return ValidationReport(
                    False,
                    "parent distance",
                    f"level {i - 1} node {node.label} is {S[node.label, parent_label]!r} from parent "
                    f"{parent_label}, over r={r!r}",
                )

        labels = t.labels(i)
        below = set(t.labels(i - 1))
        if not set(labels) <= below:
            return ValidationReport(False, "nesting", f"level {i} labels not a subset of level {i - 1}")
        for a_pos, a in enumerate(labels):
            for b in labels[a_pos + 1 :]:
                if S[a, b] < r * (1.0 - REL_TOL):
                    return ValidationReport(
                        False, "packing", f"level {i} labels {a},{b} at {S[a, b]!r} < r={r!r}"
                    )
        label_set = set(labels)
        for a in below:
            if a in label_set:
                continue
            if min(S[a, b] for b in labels) > r * (1.0 + REL_TOL):
                return ValidationReport(
                    False, "covering", f"level {i - 1} label {a} not within r={r!r} of level {i}"
                )

    if len(t.levels[-1]) != 1:
        return ValidationReport(False, "root", f"top level has {len(t.levels[-1])} nodes")
    return ValidationReport(True)


def save_net_tree(t: NetTree, path: str) -> None:
    """Write a ``nettree`` header plus one line per node."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"nettree {len(t.levels)} {t.scale!r}\n")
        for i, level in enumerate(t.levels):
            for k, node in enumerate(level):
                parent = "-" if node.parent is None else str(node.parent)
                fh.write(f"node {i} {k} {node.label} {parent}\n")


def load_net_tree(path: str, m: FiniteMetric) -> NetTree:
    """Read a net-tree saved by :func:`save_net_tree` over the metric ``m``."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = _records(fh)
        head = next(lines, None)
        if head is None or head[0] != "nettree" or len(head) != 3:
            raise ValueError(f"{path}: expected 'nettree <levels> <scale>' header")
        n_levels, scale = int(head[1]), float(head[2])
        levels: list[list[NetTreeNode]] = [[] for _ in range(n_levels)]
        for parts in lines:
            if parts[0] != "node" or len(parts) != 5:
                raise ValueError(f"{path}: bad record {' '.join(parts)!r}")
            level, index, label = int(parts[1]), int(parts[2]), int(parts[3])
            parent = None if parts[4] == "-" else int(parts[4])
            if not 0 <= level < n_levels:
                raise ValueError(f"{path}: level {level} out of range")
            if index != len(levels[level]):
                raise ValueError(f"{path}: node indices must appear in order")
            levels[level].append(NetTreeNode(label, parent))
    scaled = m.dist * scale
    return NetTree(levels, scale, scaled)


def _records(handle: TextIO) -> Iterable[list[str]]:
    for raw in handle:
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line.split()
