"""Shared fixtures. Expensive builds are session-scoped so the acceptance
tests and the module tests reuse the same artifacts."""

from __future__ import annotations

import numpy as np
import pytest

from doubling import (
    FiniteMetric,
    WeightedGraph,
    build_spanner,
    complete_tree,
    exponential_star,
    lcp_metric,
    random_euclidean,
    shortest_path_metric,
)


def small_audit_graphs() -> dict[str, WeightedGraph]:
    """Connected graphs with at most 8 edges, mixed scales and shapes."""
    return {
        "single_edge": WeightedGraph(2, [(0, 1, 2.0)]),
        "path3": WeightedGraph(3, [(0, 1, 1.0), (1, 2, 4.0)]),
        "triangle": WeightedGraph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]),
        "cycle4": WeightedGraph(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0), (0, 3, 2.0)]),
        "star5": exponential_star(5),
        "k4": WeightedGraph(
            4, [(i, j, 1.0 + 0.25 * (i + j)) for i in range(4) for j in range(i + 1, 4)]
        ),
        "star7": exponential_star(7),
    }


def small_metrics() -> dict[str, FiniteMetric]:
    """Metrics with n <= 10 for the exhaustive doubling oracle."""
    uniform4 = FiniteMetric(np.ones((4, 4)) - np.eye(4))
    from doubling import random_tree

    return {
        "uniform4": uniform4,
        "lcp2": lcp_metric(2),
        "lcp3": lcp_metric(3),
        "star5_vertices": shortest_path_metric(exponential_star(5)),
        "euclid8": random_euclidean(8, 2, 3),
        "euclid10": random_euclidean(10, 3, 7),
        "tree9": shortest_path_metric(random_tree(9, 2)),
        "collinear3": shortest_path_metric(WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])),
    }


@pytest.fixture(scope="session")
def audit_graphs():
    return small_audit_graphs()


@pytest.fixture(scope="session")
def oracle_metrics():
    return small_metrics()


@pytest.fixture(scope="session")
def star16_completion():
    return complete_tree(exponential_star(16), 0.25)


@pytest.fixture(scope="session")
def star32_completion():
    return complete_tree(exponential_star(32), 0.25)


@pytest.fixture(scope="session")
def lcp4_spanner():
    return build_spanner(lcp_metric(4), 1.0 / 32.0)


@pytest.fixture(scope="session")
def euclidean_max_degrees():
    """Max spanner degree per (n, seed) on the planar uniform family."""
    out: dict[tuple[int, int], int] = {}
    for n in (100, 400):
        for seed in range(1, 6):
            s = build_spanner(random_euclidean(n, 2, seed), 0.25)
            out[(n, seed)] = s.max_degree
    return out
