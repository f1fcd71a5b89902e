"""Instance generators and the two executable lower-bound certificates.

The generators cover the structured families (the exponential star and the
prefix hypercube metric) plus seeded random corpora. The certificates turn
the lower-bound arguments into distance computations on concrete builds:
nothing is assumed from the construction, every claimed separation is
re-measured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .closure import ConvPoint, conv_distance, conv_geodesic_point
from .completion import Completion
from .errors import TooFewLeaves, VertexSetMismatch
from .metric import FiniteMetric, WeightedGraph

__all__ = [
    "InstanceSpec",
    "exponential_star",
    "lcp_metric",
    "random_euclidean",
    "random_tree",
    "PackingCertificate",
    "star_lb_certificate",
    "CrossingReport",
    "lcp_crossing_check",
    "crossing_midpoint_packing",
]

FAMILIES = ("exponential-star", "lcp-hypercube", "euclidean-random", "random-tree")


def exponential_star(n: int) -> WeightedGraph:
    """Star with center 0 and leaves 1..n; edge to leaf i has length 2**i."""
    if n < 1:
        raise ValueError("need at least one leaf")
    return WeightedGraph(n + 1, [(0, i, 2.0**i) for i in range(1, n + 1)])


def lcp_metric(p: int) -> FiniteMetric:
    """All 2**p binary strings, at distance 2**(p - common prefix length).

    Point ids follow lexicographic string order, i.e. the integer value of
    the string. For distinct ids the exponent p − lcp is exactly the bit
    length of their XOR.
    """
    if p < 1:
        raise ValueError("need strings of positive length")
    n = 1 << p
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = float(1 << (i ^ j).bit_length())
    return FiniteMetric(D)


def random_euclidean(n: int, ambient_dim: int, seed: int) -> FiniteMetric:
    """Uniform points in the unit cube; plain Euclidean distances."""
    if n < 1:
        raise ValueError("need at least one point")
    if ambient_dim < 1:
        raise ValueError("ambient dimension must be positive")
    rng = np.random.default_rng(seed)
    pts = rng.random((n, ambient_dim))
    if n == 1:
        return FiniteMetric(np.zeros((1, 1)))
    return FiniteMetric(squareform(pdist(pts)))


def random_tree(n: int, seed: int) -> WeightedGraph:
    """Random recursive tree; lengths spread over ~3 decades of scale."""
    if n < 1:
        raise ValueError("need at least one vertex")
    rng = np.random.default_rng(seed)
    edges = []
    for v in range(1, n):
        parent = int(rng.integers(0, v))
        edges.append((parent, v, float(2.0 ** rng.uniform(0.0, 10.0))))
    return WeightedGraph(n, edges)


@dataclass(frozen=True)
class InstanceSpec:
    """Seeded description of a corpus instance; building it is pure."""

    family: str
    n: int | None = None
    p: int | None = None
    ambient_dim: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")

    def build(self) -> WeightedGraph | FiniteMetric:
        if self.family == "exponential-star":
            return exponential_star(_required(self.n, "n"))
        if self.family == "lcp-hypercube":
            return lcp_metric(_required(self.p, "p"))
        if self.family == "euclidean-random":
            return random_euclidean(_required(self.n, "n"), self.ambient_dim, self.seed)
        return random_tree(_required(self.n, "n"), self.seed)

    def describe(self) -> dict[str, object]:
        out: dict[str, object] = {"family": self.family}
        if self.n is not None:
            out["n"] = self.n
        if self.p is not None:
            out["p"] = self.p
        if self.family == "euclidean-random":
            out["ambient_dim"] = self.ambient_dim
        if self.family in ("euclidean-random", "random-tree"):
            out["seed"] = self.seed
        return out


def _required(value: int | None, name: str) -> int:
    if value is None:
        raise ValueError(f"instance spec is missing {name!r}")
    return value


@dataclass(frozen=True)
class PackingCertificate:
    """A measured packing: points near a center with a verified separation.

    ``dim_lower`` is half the log of the packing size, valid whenever the
    points fit in a ball of at most twice the minimum pairwise distance;
    ``ok`` records that plus the window checks that were requested.
    """

    center: int
    points: tuple[ConvPoint, ...]
    ball_radius: float
    min_pairwise: float
    max_pairwise: float
    dim_lower: float
    ok: bool

    @property
    def size(self) -> int:
        return len(self.points)


def star_lb_certificate(c: Completion, eps: float) -> PackingCertificate:
    """Unit-distance points toward the smallest leaves of a completed star.

    Walks distance 1 from the center toward leaf i for
    i = 1..floor(log2(1/(2 eps))) and verifies the landed points stay inside
    the radius-2 ball with pairwise distances in [1 − 1e−9, 2 + 1e−9]. The
    packing size therefore certifies a dimension lower bound that grows with
    log log(1/eps), however small eps gets.
    """
    if not 0.0 < eps <= 0.25:
        raise ValueError(f"eps must lie in (0, 1/4], got {eps!r}")
    k = math.floor(math.log2(1.0 / (2.0 * eps)))
    leaves = c.n_original - 1
    if leaves < k:
        raise TooFewLeaves(f"certificate needs {k} leaves, the star has {leaves}")
    g = c.output
    center = ConvPoint.at_vertex(0)
    points = tuple(
        conv_geodesic_point(g, center, ConvPoint.at_vertex(i), 1.0)
        for i in range(1, k + 1)
    )
    ok = True
    for pt in points:
        if not abs(conv_distance(g, center, pt) - 1.0) <= 1e-9:
            ok = False
        if conv_distance(g, center, pt) > 2.0 + 1e-9:
            ok = False
    lo, hi = math.inf, 0.0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = conv_distance(g, points[i], points[j])
            lo, hi = min(lo, d), max(hi, d)
    if len(points) > 1 and not (1.0 - 1e-9 <= lo and hi <= 2.0 + 1e-9):
        ok = False
    if len(points) <= 1:
        lo, hi = 0.0, 0.0
    return PackingCertificate(
        center=0,
        points=points,
        ball_radius=2.0,
        min_pairwise=lo,
        max_pairwise=hi,
        dim_lower=0.5 * math.log2(len(points)) if points else 0.0,
        ok=ok,
    )


@dataclass(frozen=True)
class CrossingReport:
    """Presence census of the edges between the two prefix halves."""

    present: int
    total: int
    missing: tuple[int, int] | None

    @property
    def all_present(self) -> bool:
        return self.missing is None


def lcp_crossing_check(h: WeightedGraph, p: int) -> CrossingReport:
    """Does ``h`` directly connect every 0-string to every 1-string?

    Any graph on exactly these points whose path metric stays within
    (1 + 2**-(p+1)) of the prefix metric must: a two-hop route through
    either half overshoots. The report counts the present pairs and names
    the first missing one, if any.
    """
    n = 1 << p
    if h.n_vertices != n:
        raise VertexSetMismatch(
            f"expected exactly the {n} prefix points, graph has {h.n_vertices} vertices"
        )
    half = n // 2
    present = 0
    missing = None
    for x in range(half):
        for y in range(half, n):
            if h.has_edge(x, y):
                present += 1
            elif missing is None:
                missing = (x, y)
    return CrossingReport(present, half * half, missing)


def crossing_midpoint_packing(h: WeightedGraph, p: int) -> PackingCertificate:
    """Midpoints of the crossing edges, measured as a packing in the closure.

    Crossing edges all have length 2**p; their midpoints should sit at
    pairwise distance between 2**p and 1.5 * 2**p, but the realized window
    is measured, not assumed. The half-log dimension bound is claimed only
    when the window supports it (minimum at least 2**p, maximum at most
    twice the minimum).
    """
    n = 1 << p
    if h.n_vertices != n:
        raise VertexSetMismatch(
            f"expected exactly the {n} prefix points, graph has {h.n_vertices} vertices"
        )
    half = n // 2
    offset = float(1 << (p - 1))
    points = []
    for x in range(half):
        for y in range(half, n):
            if h.has_edge(x, y):
                points.append(ConvPoint.on_edge(x, y, offset))
    pts = tuple(points)
    lo, hi = math.inf, 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = conv_distance(h, pts[i], pts[j])
            lo, hi = min(lo, d), max(hi, d)
    if len(pts) <= 1:
        lo, hi = 0.0, 0.0
    floor = float(1 << p)
    ok = len(pts) > 0 and (
        len(pts) == 1 or (lo >= floor - 1e-9 and hi <= 2.0 * lo + 1e-9)
    )
    return PackingCertificate(
        center=0,
        points=pts,
        ball_radius=hi,
        min_pairwise=lo,
        max_pairwise=hi,
        dim_lower=0.5 * math.log2(len(pts)) if ok and pts else 0.0,
        ok=ok,
    )
