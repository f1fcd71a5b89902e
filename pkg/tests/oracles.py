"""Independent brute-force reference implementations for oracle tests.

These deliberately avoid the library's own sweep/search machinery: the
audit oracle evaluates the long-edge count over a dense radius grid, and
the doubling oracle enumerates center subsets outright. Slow but obviously
correct on the small fixtures they run against.
"""

from __future__ import annotations

import itertools

import numpy as np

from doubling import FiniteMetric, WeightedGraph, shortest_path_metric


def brute_audit_max(g: WeightedGraph) -> int:
    """Max long-edge count by direct evaluation over a dense radius grid.

    The grid holds every endpoint-distance and edge-length event, all
    midpoints of consecutive events, and 401 evenly spaced radii on top —
    anything piecewise constant between events is caught redundantly.
    """
    D = shortest_path_metric(g).dist
    lengths = [w for _, _, w in g.edges]
    if not lengths:
        return 0
    values = set(lengths)
    for u in range(g.n_vertices):
        for a, b, _ in g.edges:
            values.add(float(min(D[u, a], D[u, b])))
    grid = sorted(values)
    radii = set(grid)
    for lo, hi in zip(grid, grid[1:]):
        radii.add((lo + hi) / 2.0)
    radii.update(np.linspace(0.0, max(lengths) * 1.05, 401).tolist())
    best = 0
    for u in range(g.n_vertices):
        for r in radii:
            count = sum(
                1
                for a, b, w in g.edges
                if w > r and min(D[u, a], D[u, b]) <= r
            )
            best = max(best, count)
    return best


def exhaustive_doubling_constant(m: FiniteMetric) -> int:
    """Doubling constant by exhaustive minimum-cover search.

    Candidate radii are every pairwise distance and every half distance;
    ball centers range over all points; the minimum cover of each closed
    ball B(x, 2r) by closed radius-r balls is found by trying center
    subsets in increasing size. Only sane for n <= 10 or so.
    """
    D, n = m.dist, m.n
    distances = sorted(
        {float(D[i, j]) for i in range(n) for j in range(i + 1, n) if D[i, j] > 0}
    )
    radii = sorted({d / 2.0 for d in distances} | set(distances))
    lam = 1
    for x in range(n):
        for r in radii:
            universe = [p for p in range(n) if D[x, p] <= 2.0 * r]
            masks = sorted(
                {
                    sum(1 << k for k, p in enumerate(universe) if D[c, p] <= r)
                    for c in range(n)
                }
            )
            full = (1 << len(universe)) - 1
            found = None
            for size in range(1, len(universe) + 1):
                for combo in itertools.combinations(masks, size):
                    acc = 0
                    for s in combo:
                        acc |= s
                    if acc == full:
                        found = size
                        break
                if found is not None:
                    break
            assert found is not None
            lam = max(lam, found)
    return lam
