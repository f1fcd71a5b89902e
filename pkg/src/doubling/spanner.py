"""Bounded-degree (1+eps)-spanner construction over a net-tree.

Candidate edges connect net points of the same level at distances up to a
fixed multiple of the level radius; each edge is then directed toward the
endpoint that survives longer in the nets, and vertices with too many
in-edge levels donate their oldest excess groups to a nearby earlier
neighbour, re-measuring the moved edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import VerificationError
from .metric import (
    FiniteMetric,
    StretchReport,
    WeightedGraph,
    shortest_path_metric,
    verify_stretch,
)
from .net_tree import NetTree, build_net_tree, check_eps, istar

__all__ = [
    "cover_constant",
    "donation_threshold",
    "SpannerEdge",
    "Spanner",
    "build_base_edge_sets",
    "assign_directions",
    "donate_edges",
    "build_spanner",
    "save_spanner",
    "load_spanner",
]


def cover_constant(eps: float) -> float:
    """Edge-selection constant: level-i nets link pairs within (4 + 32/eps) * 2**i."""
    return 4.0 + 32.0 / eps


def donation_threshold(eps: float) -> int:
    """How many low in-edge level groups a vertex keeps untouched."""
    return math.ceil(7.0 * math.log2(1.0 / eps))


@dataclass(frozen=True)
class SpannerEdge:
    """One spanner edge, kept directed for bookkeeping.

    ``u`` is the tail (kind "A" there by construction), ``v`` the head,
    whose kind is "B" for an untouched in-edge or "C" for a donated one.
    A donated edge records the donor vertex; its originating pair is then
    (u, donor), which still determines the level bracket.
    """

    u: int
    v: int
    length: float
    level: int
    kind_u: str
    kind_v: str
    donor: int | None = None

    @property
    def pair(self) -> tuple[int, int]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)

    @property
    def origin(self) -> tuple[int, int]:
        head = self.v if self.donor is None else self.donor
        return (self.u, head) if self.u < head else (head, self.u)


@dataclass
class Spanner:
    graph: WeightedGraph
    edges: tuple[SpannerEdge, ...]
    eps: float
    net_tree: NetTree | None
    max_degree: int
    stretch: StretchReport | None = None


def build_base_edge_sets(m: FiniteMetric, t: NetTree, eps: float) -> list[list[tuple[int, int]]]:
    """Level-indexed candidate edge sets (index 0 is empty).

    E_i holds the pairs of level-i net labels within cover_constant * 2**i
    in the rescaled metric, minus everything that appeared at lower levels.
    Every fresh pair is asserted to fall in the half-open length bracket
    (C * 2**(i-1), C * 2**i]: nets are nested, so anything shorter was
    already eligible one level down.
    """
    check_eps(eps)
    if t.n_points != m.n:
        raise ValueError("net-tree and metric disagree on the point count")
    C = cover_constant(eps)
    S = t.scaled_dist
    seen: set[tuple[int, int]] = set()
    sets: list[list[tuple[int, int]]] = [[]]
    for i in range(1, t.top_level + 1):
        ids = np.asarray(t.labels(i), dtype=np.intp)
        limit = C * NetTree.radius(i)
        block = S[np.ix_(ids, ids)]
        rows, cols = np.nonzero(np.triu(block <= limit, k=1))
        fresh: list[tuple[int, int]] = []
        for a_pos, b_pos in zip(rows.tolist(), cols.tolist()):
            pair = (int(ids[a_pos]), int(ids[b_pos]))
            if pair in seen:
                continue
            seen.add(pair)
            d = S[pair]
            if not (C * NetTree.radius(i - 1) < d <= limit):
                raise AssertionError(
                    f"edge {pair} of scaled length {d!r} outside the level-{i} bracket"
                )
            fresh.append(pair)
        sets.append(fresh)
    return sets


def assign_directions(
    edge_sets: Sequence[Sequence[tuple[int, int]]], t: NetTree
) -> list[tuple[int, int, int]]:
    """Direct each pair toward the endpoint with larger istar (ties: larger id).

    Returns (tail, head, level) triples in deterministic order.
    """
    directed: list[tuple[int, int, int]] = []
    for level, pairs in enumerate(edge_sets):
        for a, b in sorted(pairs):
            # a < b, so on an istar tie the larger id b is the head
            if istar(t, a) > istar(t, b):
                directed.append((b, a, level))
            else:
                directed.append((a, b, level))
    return directed


def donate_edges(
    directed: Iterable[tuple[int, int, int]],
    m: FiniteMetric,
    eps: float,
    net_tree: NetTree | None = None,
) -> Spanner:
    """Apply the degree-reduction pass and assemble the spanner.

    For each vertex x the in-edges are grouped by level; with the nonempty
    groups ranked ascending, ranks above the donation threshold m0 are moved:
    rank j hands every edge {y, x} to the lowest-id tail u of the rank
    (j - m0) group, re-measured to d(y, u). Groups are taken from the
    original direction assignment only, so donated edges are never
    reprocessed and the per-vertex passes are independent.
    """
    check_eps(eps)
    m0 = donation_threshold(eps)
    D = m.dist
    by_head: dict[int, dict[int, list[int]]] = {}
    out_records: list[SpannerEdge] = []
    for tail, head, level in directed:
        by_head.setdefault(head, {}).setdefault(level, []).append(tail)

    for x in sorted(by_head):
        groups = sorted(by_head[x])
        for rank, level in enumerate(groups, start=1):
            tails = sorted(by_head[x][level])
            if rank <= m0:
                for y in tails:
                    out_records.append(
                        SpannerEdge(y, x, float(D[y, x]), level, "A", "B")
                    )
            else:
                target_level = groups[rank - 1 - m0]
                u = min(by_head[x][target_level])
                for y in tails:
                    out_records.append(
                        SpannerEdge(y, u, float(D[y, u]), level, "A", "C", donor=x)
                    )

    merged: dict[tuple[int, int], SpannerEdge] = {}
    for rec in out_records:
        prev = merged.get(rec.pair)
        if prev is None or rec.length < prev.length:
            merged[rec.pair] = rec
    records = tuple(merged[pair] for pair in sorted(merged))

    graph = WeightedGraph(m.n, [(r.pair[0], r.pair[1], r.length) for r in records])
    max_degree = max(graph.degrees(), default=0)
    return Spanner(graph, records, eps, net_tree, max_degree)


def build_spanner(m: FiniteMetric, eps: float) -> Spanner:
    """Net-tree, candidate edges, directions, donation — then verify stretch."""
    check_eps(eps)
    t = build_net_tree(m, eps)
    edge_sets = build_base_edge_sets(m, t, eps)
    directed = assign_directions(edge_sets, t)
    spanner = donate_edges(directed, m, eps, net_tree=t)
    report = verify_stretch(m, shortest_path_metric(spanner.graph), eps)
    if not report.passed:
        raise VerificationError(
            f"spanner stretch check failed: ratios in [{report.min_ratio!r}, {report.max_ratio!r}] "
            f"for eps={eps!r}, violation={report.violation}"
        )
    spanner.stretch = report
    return spanner


def save_spanner(s: Spanner, path: str) -> None:
    """Graph lines plus one ``meta`` sidecar line per directed edge record."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"graph {s.graph.n_vertices}\n")
        for u, v, w in s.graph.edges:
            fh.write(f"e {u} {v} {w!r}\n")
        for rec in s.edges:
            donor = "-" if rec.donor is None else str(rec.donor)
            fh.write(f"meta {rec.u} {rec.v} level={rec.level} kind={rec.kind_v} donor={donor}\n")


def load_spanner(path: str, eps: float) -> Spanner:
    """Rebuild a spanner record set saved by :func:`save_spanner`.

    The net-tree is not persisted, so the loaded spanner carries None there
    and no stretch report.
    """
    from .metric import _data_lines, _parse_graph_lines

    with open(path, "r", encoding="utf-8") as fh:
        graph, extras = _parse_graph_lines(path, _data_lines(fh), extra_kinds=("meta",))
    records: list[SpannerEdge] = []
    for parts in extras["meta"]:
        if len(parts) != 5:
            raise ValueError(f"{path}: bad meta record {' '.join(parts)!r}")
        u, v = int(parts[0]), int(parts[1])
        fields = dict(item.split("=", 1) for item in parts[2:])
        donor = None if fields["donor"] == "-" else int(fields["donor"])
        records.append(
            SpannerEdge(
                u,
                v,
                graph.edge_length(u, v),
                int(fields["level"]),
                "A",
                fields["kind"],
                donor=donor,
            )
        )
    max_degree = max(graph.degrees(), default=0)
    return Spanner(graph, tuple(records), eps, None, max_degree)
