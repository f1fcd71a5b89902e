"""Finite metric spaces, weighted graphs, nets, and dimension estimates.

Distances are plain float64 throughout. All comparisons that decide
pass/fail use a relative tolerance of ``REL_TOL``; structural choices
(greedy scans, covers, packings) use exact comparisons so that repeated
runs make identical choices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from . import cover
from .errors import DisconnectedGraph, SizeMismatch

__all__ = [
    "REL_TOL",
    "FiniteMetric",
    "WeightedGraph",
    "DimensionEstimate",
    "StretchReport",
    "shortest_path_metric",
    "greedy_net",
    "doubling_estimate",
    "packing_lower_bound",
    "verify_stretch",
    "load_metric",
    "save_metric",
    "load_graph",
    "save_graph",
]

REL_TOL = 1e-9


def _check_triangle(D: np.ndarray) -> None:
    n = D.shape[0]
    for k in range(n):
        via = D[:, k, None] + D[None, k, :]
        bad = D > via * (1.0 + REL_TOL)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise ValueError(
                f"triangle inequality fails: d({i},{j})={D[i, j]!r} > "
                f"d({i},{k})+d({k},{j})={via[i, j]!r}"
            )


class FiniteMetric:
    """A metric on points 0..n-1, stored as a dense symmetric matrix.

    Construction checks the zero diagonal, symmetry and positivity, and
    (unless ``validate=False``, for distances that are metrics by
    construction) the triangle inequality within relative tolerance 1e-9.
    The matrix is frozen after construction.
    """

    def __init__(self, dist: np.ndarray | Sequence[Sequence[float]], *, validate: bool = True) -> None:
        D = np.array(dist, dtype=np.float64)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise ValueError("distance matrix must be square")
        n = D.shape[0]
        if n == 0:
            raise ValueError("a metric needs at least one point")
        if np.diag(D).any():
            raise ValueError("diagonal must be exactly zero")
        if not np.array_equal(D, D.T):
            raise ValueError("distance matrix must be symmetric")
        if n > 1:
            off = D[~np.eye(n, dtype=bool)]
            if not (off > 0.0).all():
                raise ValueError("off-diagonal distances must be positive")
            if not np.isfinite(off).all():
                raise ValueError("distances must be finite")
        if validate:
            _check_triangle(D)
        D = np.ascontiguousarray(D)
        D.setflags(write=False)
        self.dist = D
        self.n = n

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    def min_distance(self) -> float:
        """Smallest off-diagonal distance (needs n >= 2)."""
        if self.n < 2:
            raise ValueError("min_distance needs at least two points")
        iu = np.triu_indices(self.n, k=1)
        return float(self.dist[iu].min())

    def diameter(self) -> float:
        return float(self.dist.max())

    def restrict(self, points: Sequence[int]) -> "FiniteMetric":
        """Submetric on the given points, reindexed in the given order."""
        idx = np.asarray(points, dtype=np.intp)
        sub = self.dist[np.ix_(idx, idx)]
        return FiniteMetric(sub, validate=False)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"FiniteMetric(n={self.n})"


class WeightedGraph:
    """An undirected graph with positive edge lengths.

    Edges are stored canonically: ``u < v``, no self-loops, at most one
    edge per pair, sorted by endpoint pair. The instance is treated as
    immutable once built; the shortest-path metric is cached on it.
    """

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int, float]]) -> None:
        if n_vertices < 1:
            raise ValueError("a graph needs at least one vertex")
        canonical: list[tuple[int, int, float]] = []
        seen: set[tuple[int, int]] = set()
        for u, v, length in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise ValueError(f"edge ({u},{v}) outside vertex range")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            length = float(length)
            if not (length > 0.0 and math.isfinite(length)):
                raise ValueError(f"edge ({u},{v}) needs a positive finite length")
            seen.add((u, v))
            canonical.append((u, v, length))
        canonical.sort()
        self.n_vertices = n_vertices
        self.edges: tuple[tuple[int, int, float], ...] = tuple(canonical)
        self._length = {(u, v): w for u, v, w in canonical}
        self._metric: FiniteMetric | None = None

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._length

    def edge_length(self, u: int, v: int) -> float:
        return self._length[(min(u, v), max(u, v))]

    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n_vertices)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        for lst in adj:
            lst.sort()
        return adj

    def degrees(self) -> list[int]:
        deg = [0] * self.n_vertices
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def _csgraph(self) -> csr_matrix:
        n = self.n_vertices
        rows: list[int] = []
        cols: list[int] = []
        data: list[float] = []
        for u, v, w in self.edges:
            rows += [u, v]
            cols += [v, u]
            data += [w, w]
        return csr_matrix((data, (rows, cols)), shape=(n, n))

    def component_labels(self) -> np.ndarray:
        _, labels = connected_components(self._csgraph(), directed=False)
        return labels

    def is_connected(self) -> bool:
        return bool((self.component_labels() == 0).all())

    def is_tree(self) -> bool:
        return len(self.edges) == self.n_vertices - 1 and self.is_connected()

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"WeightedGraph(n={self.n_vertices}, m={len(self.edges)})"


def shortest_path_metric(g: WeightedGraph) -> FiniteMetric:
    """All-pairs shortest-path metric of a connected graph.

    Raises :class:`DisconnectedGraph` naming one vertex per component when
    the graph is not connected. The result is cached on the graph.
    """
    if g._metric is not None:
        return g._metric
    labels = g.component_labels()
    if labels.max(initial=0) > 0:
        rep_a = int(np.flatnonzero(labels == 0)[0])
        rep_b = int(np.flatnonzero(labels != 0)[0])
        raise DisconnectedGraph(rep_a, rep_b)
    D = dijkstra(g._csgraph(), directed=False)
    # Dijkstra from each source is symmetric up to float rounding; make it exact.
    D = np.minimum(D, D.T)
    # shortest-path distances satisfy the triangle inequality by construction
    m = FiniteMetric(D, validate=False)
    g._metric = m
    return m


def greedy_net(m: FiniteMetric, r: float, points: Sequence[int] | None = None) -> list[int]:
    """Greedy r-net over ``points`` (default: all points), ascending id.

    A point is kept iff it lies strictly farther than ``r`` from every point
    kept before it; anything at distance <= r of the net is covered by it.
    The kept set is therefore an r-packing and an r-covering of the scan set.
    """
    if not (r > 0.0):
        raise ValueError("net radius must be positive")
    ids = np.arange(m.n) if points is None else np.asarray(sorted(points), dtype=np.intp)
    D = m.dist
    kept: list[int] = []
    eligible = np.ones(ids.size, dtype=bool)
    while True:
        remaining = np.flatnonzero(eligible)
        if remaining.size == 0:
            break
        p = int(ids[remaining[0]])
        kept.append(p)
        eligible &= D[p][ids] > r
    return kept


@dataclass(frozen=True)
class DimensionEstimate:
    """Doubling-dimension bounds with their witnesses.

    ``upper_witness`` is (center, radius, cover centers) for the worst ball;
    ``lower_witness`` is (center, radius, packed points). Fields not filled
    by the producing estimator are None.
    """

    lambda_upper: int | None = None
    dim_upper: float | None = None
    dim_lower: float | None = None
    mode: str | None = None
    upper_witness: tuple[int, float, tuple[int, ...]] | None = None
    lower_witness: tuple[int, float, tuple[int, ...]] | None = None

    def merged_with_lower(self, low: "DimensionEstimate") -> "DimensionEstimate":
        return DimensionEstimate(
            lambda_upper=self.lambda_upper,
            dim_upper=self.dim_upper,
            dim_lower=low.dim_lower,
            mode=self.mode,
            upper_witness=self.upper_witness,
            lower_witness=low.lower_witness,
        )


def doubling_estimate(m: FiniteMetric, exact_max_n: int = 64) -> DimensionEstimate:
    """Doubling constant of the metric: the worst number of radius-r balls
    needed to cover a ball of radius 2r, maximized over centers and radii.

    For a fixed center the cover minimum can only drop while B(x, 2r) stays
    the same (growing r only grows the covering balls), so it suffices to
    test the radii where B(x, 2r) gains a point: r = d(x, p)/2 for every p.
    The constant is attained at one of those events, and the greedy cover is
    at least the minimum cover there, so the same events suffice in both
    modes.

    Exact mode (n <= exact_max_n) uses branch and bound per ball, skipping
    instances whose greedy cover is already no larger than the best exact
    value found so far. Above the cutoff the greedy cover itself is the
    estimate. Either way ``lambda_upper`` bounds the true constant from above.
    """
    n, D = m.n, m.dist
    exact = n <= exact_max_n
    mode = "exact-cover" if exact else "greedy-cover"
    best = 0
    witness: tuple[int, float, tuple[int, ...]] | None = None
    for x in range(n):
        row = D[x]
        positive = np.unique(row[row > 0.0])
        radii = positive / 2.0
        for r in radii:
            universe = np.flatnonzero(row <= 2.0 * r)
            if universe.size <= best:
                continue
            greedy = cover.greedy_ball_cover(D, universe, float(r))
            if exact:
                if len(greedy) <= best:
                    continue
                size, centers, aborted = cover.min_ball_cover(
                    D, universe, float(r), greedy, prune_at=best
                )
                if aborted:
                    continue
                best = size
                witness = (x, float(r), tuple(centers))
            else:
                if len(greedy) > best:
                    best = len(greedy)
                    witness = (x, float(r), tuple(greedy))
    if best == 0:  # single point: one ball always suffices
        best, witness = 1, (0, 0.0, (0,))
    return DimensionEstimate(
        lambda_upper=best,
        dim_upper=math.log2(best),
        mode=mode,
        upper_witness=witness,
    )


def _verify_packing(D: np.ndarray, center: int, r: float, points: Sequence[int]) -> None:
    for a in points:
        if not D[center, a] <= r * (1.0 + REL_TOL):
            raise AssertionError(f"packed point {a} outside B({center}, {r!r})")
    for i, a in enumerate(points):
        for b in points[i + 1 :]:
            if not D[a, b] >= (r / 2.0) * (1.0 - REL_TOL):
                raise AssertionError(f"packed points {a},{b} closer than {r / 2.0!r}")


def packing_lower_bound(m: FiniteMetric) -> DimensionEstimate:
    """Dimension lower bound from a greedy packing witness.

    For every center x and radius r it extracts S within B(x, r) with pairwise
    distances >= r/2; such a set needs |S| distinct balls of radius r/4, which
    two doublings must provide, so dim >= log2(|S|)/2. Radii r = d(x, p) are
    where the ball grows; r = d(x, p)/2 probes the same balls against smaller
    separations. The best witness is re-verified by direct distance checks.
    """
    n, D = m.n, m.dist
    best = 1
    witness: tuple[int, float, tuple[int, ...]] = (0, 0.0, (0,))
    for x in range(n):
        row = D[x]
        positive = np.unique(row[row > 0.0])
        radii = np.unique(np.concatenate([positive / 2.0, positive]))
        for r in radii:
            ball = np.flatnonzero(row <= r)
            if ball.size <= best:
                continue
            packed = cover.greedy_packing(D, ball, float(r) / 2.0)
            if len(packed) > best:
                _verify_packing(D, x, float(r), packed)
                best = len(packed)
                witness = (x, float(r), tuple(packed))
    return DimensionEstimate(
        dim_lower=0.5 * math.log2(best),
        lower_witness=witness,
    )


@dataclass(frozen=True)
class StretchReport:
    """Outcome of comparing a test metric against a base metric pairwise."""

    min_ratio: float
    max_ratio: float
    passed: bool
    eps: float
    allow_contraction: bool
    violation: tuple[int, int] | None = None

    def bounds(self) -> tuple[float, float]:
        lower = 1.0 / (1.0 + self.eps) if self.allow_contraction else 1.0
        return lower, 1.0 + self.eps


def verify_stretch(
    base: FiniteMetric,
    test: FiniteMetric,
    eps: float,
    allow_contraction: bool = False,
) -> StretchReport:
    """Check that all pairwise ratios test/base stay within the eps window.

    Strict mode requires ratios in [1, 1+eps]; with ``allow_contraction``
    the window widens to [(1+eps)^-1, 1+eps]. Both ends get relative
    tolerance 1e-9. The violation field names the worst offending pair.
    """
    if base.n != test.n:
        raise SizeMismatch(f"metrics differ in size: {base.n} vs {test.n}")
    n = base.n
    lower = 1.0 / (1.0 + eps) if allow_contraction else 1.0
    upper = 1.0 + eps
    if n == 1:
        return StretchReport(1.0, 1.0, True, eps, allow_contraction)
    iu = np.triu_indices(n, k=1)
    ratios = test.dist[iu] / base.dist[iu]
    lo_pos = int(np.argmin(ratios))
    hi_pos = int(np.argmax(ratios))
    min_ratio = float(ratios[lo_pos])
    max_ratio = float(ratios[hi_pos])
    ok_low = min_ratio >= lower * (1.0 - REL_TOL)
    ok_high = max_ratio <= upper * (1.0 + REL_TOL)
    violation = None
    if not ok_high:
        violation = (int(iu[0][hi_pos]), int(iu[1][hi_pos]))
    elif not ok_low:
        violation = (int(iu[0][lo_pos]), int(iu[1][lo_pos]))
    return StretchReport(min_ratio, max_ratio, ok_low and ok_high, eps, allow_contraction, violation)


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def _data_lines(handle: TextIO) -> Iterable[list[str]]:
    for raw in handle:
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line.split()


def save_metric(m: FiniteMetric, path: str) -> None:
    """Write ``metric <n>`` followed by one ``d <i> <j> <value>`` per pair i<j."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"metric {m.n}\n")
        for i in range(m.n):
            for j in range(i + 1, m.n):
                fh.write(f"d {i} {j} {float(m.dist[i, j])!r}\n")


def load_metric(path: str) -> FiniteMetric:
    with open(path, "r", encoding="utf-8") as fh:
        lines = iter(_data_lines(fh))
        try:
            head = next(lines)
        except StopIteration:
            raise ValueError(f"{path}: empty metric file") from None
        if len(head) != 2 or head[0] != "metric":
            raise ValueError(f"{path}: expected 'metric <n>' header")
        n = int(head[1])
        D = np.zeros((n, n))
        filled = np.zeros((n, n), dtype=bool)
        for parts in lines:
            if parts[0] != "d" or len(parts) != 4:
                raise ValueError(f"{path}: bad record {' '.join(parts)!r}")
            i, j, value = int(parts[1]), int(parts[2]), float(parts[3])
            if not (0 <= i < j < n):
                raise ValueError(f"{path}: pair ({i},{j}) out of order or range")
            D[i, j] = D[j, i] = value
            filled[i, j] = True
        iu = np.triu_indices(n, k=1)
        if not filled[iu].all():
            i, j = np.argwhere(np.triu(~filled, k=1))[0]
            raise ValueError(f"{path}: missing distance for pair ({i},{j})")
    return FiniteMetric(D)


def save_graph(g: WeightedGraph, path: str) -> None:
    """Write ``graph <n>`` followed by one ``e <u> <v> <length>`` per edge."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"graph {g.n_vertices}\n")
        for u, v, w in g.edges:
            fh.write(f"e {u} {v} {w!r}\n")


def _parse_graph_lines(
    path: str, lines: Iterable[list[str]], extra_kinds: tuple[str, ...] = ()
) -> tuple[WeightedGraph, dict[str, list[list[str]]]]:
    lines = iter(lines)
    try:
        head = next(lines)
    except StopIteration:
        raise ValueError(f"{path}: empty graph file") from None
    if len(head) != 2 or head[0] != "graph":
        raise ValueError(f"{path}: expected 'graph <n>' header")
    n = int(head[1])
    edges: list[tuple[int, int, float]] = []
    extras: dict[str, list[list[str]]] = {kind: [] for kind in extra_kinds}
    for parts in lines:
        if parts[0] == "e" and len(parts) == 4:
            edges.append((int(parts[1]), int(parts[2]), float(parts[3])))
        elif parts[0] in extras:
            extras[parts[0]].append(parts[1:])
        else:
            raise ValueError(f"{path}: bad record {' '.join(parts)!r}")
    return WeightedGraph(n, edges), extras


def load_graph(path: str) -> WeightedGraph:
    with open(path, "r", encoding="utf-8") as fh:
        g, _ = _parse_graph_lines(path, _data_lines(fh))
    return g
