"""Ball-cover and packing primitives used by the dimension estimators.

Covers live on small universes (a ball of a finite metric), so the exact
solver works on Python-int bitmasks: one bit per universe point, sets are
candidate balls restricted to the universe.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

__all__ = [
    "greedy_ball_cover",
    "greedy_packing",
    "min_ball_cover",
    "min_cover_bitmask",
]


def greedy_ball_cover(D: np.ndarray, universe: np.ndarray, r: float) -> list[int]:
    """Cover ``universe`` by balls of radius ``r``: repeatedly center a ball
    on the lowest-id point not yet covered.

    Deterministic, and every chosen center lies in the universe, so the
    result is always a valid (if not minimum) cover.
    """
    centers: list[int] = []
    uncovered = np.ones(universe.size, dtype=bool)
    while True:
        remaining = np.flatnonzero(uncovered)
        if remaining.size == 0:
            break
        p = int(universe[remaining[0]])
        centers.append(p)
        uncovered &= D[p][universe] > r
    return centers


def greedy_packing(D: np.ndarray, ball: np.ndarray, separation: float) -> list[int]:
    """Extract a subset of ``ball`` with pairwise distance >= ``separation``.

    Points are scanned in ascending id; a point joins the packing iff it is
    at least ``separation`` away from everything already kept.
    """
    kept: list[int] = []
    eligible = np.ones(ball.size, dtype=bool)
    while True:
        remaining = np.flatnonzero(eligible)
        if remaining.size == 0:
            break
        p = int(ball[remaining[0]])
        kept.append(p)
        eligible &= D[p][ball] >= separation
    return kept


class _Abort(Exception):
    pass


def min_cover_bitmask(
    sets: Sequence[int],
    full: int,
    ub_choice: Sequence[int],
    prune_at: int = 0,
) -> tuple[int, list[int], bool]:
    """Exact minimum set cover over bitmask sets via branch and bound.

    ``sets[k]`` is a bitmask of covered universe positions, ``full`` the mask
    of the whole universe, and ``ub_choice`` indices of a known valid cover
    (the starting upper bound). Branches on the uncovered element with the
    fewest candidate sets; at each node candidates are tried in decreasing
    order of fresh coverage.

    If a cover of size <= ``prune_at`` turns up, the search stops early and
    the last flag in the result is True (the exact minimum is then only known
    to be <= ``prune_at``). Otherwise the returned size is the true minimum.
    """
    n_bits = full.bit_count()
    covered_by: list[list[int]] = [[] for _ in range(n_bits)]
    for k, s in enumerate(sets):
        rem = s
        while rem:
            b = (rem & -rem).bit_length() - 1
            covered_by[b].append(k)
            rem &= rem - 1
    if any(not c for c in covered_by):
        raise ValueError("universe element not covered by any candidate set")

    max_set_bits = max(s.bit_count() for s in sets)
    best_size = len(ub_choice)
    best_choice = list(ub_choice)

    def search(covered: int, chosen: list[int]) -> None:
        nonlocal best_size, best_choice
        if covered == full:
            if len(chosen) < best_size:
                best_size = len(chosen)
                best_choice = list(chosen)
                if best_size <= prune_at:
                    raise _Abort
            return
        remaining = (full & ~covered).bit_count()
        bound = len(chosen) + math.ceil(remaining / max_set_bits)
        if bound >= best_size:
            return
        # branch on the uncovered element with the fewest candidate sets
        pick, pick_cands = -1, None
        rem = full & ~covered
        while rem:
            b = (rem & -rem).bit_length() - 1
            cands = [k for k in covered_by[b] if sets[k] & ~covered]
            if pick_cands is None or len(cands) < len(pick_cands):
                pick, pick_cands = b, cands
                if len(cands) == 1:
                    break
            rem &= rem - 1
        assert pick_cands is not None
        pick_cands.sort(key=lambda k: (-(sets[k] & ~covered).bit_count(), k))
        for k in pick_cands:
            chosen.append(k)
            search(covered | sets[k], chosen)
            chosen.pop()

    aborted = False
    try:
        search(0, [])
    except _Abort:
        aborted = True
    return best_size, best_choice, aborted


def min_ball_cover(
    D: np.ndarray,
    universe: np.ndarray,
    r: float,
    ub_centers: Sequence[int],
    prune_at: int = 0,
) -> tuple[int, list[int], bool]:
    """Exact minimum number of radius-``r`` balls covering ``universe``.

    Ball centers range over all points of the metric, not just the universe.
    Duplicate and dominated candidate balls are discarded before the search,
    keeping the lowest center id of each surviving mask as its witness.
    ``ub_centers`` and ``prune_at`` are passed through to the bitmask solver.
    """
    n = D.shape[0]
    full = (1 << universe.size) - 1
    mask_owner: dict[int, int] = {}
    for y in range(n):
        inside = D[y][universe] <= r
        mask = 0
        for pos in np.flatnonzero(inside):
            mask |= 1 << int(pos)
        if mask and mask not in mask_owner:
            mask_owner[mask] = y
    masks = sorted(mask_owner)
    # drop masks strictly contained in another candidate
    keep: list[int] = []
    for i, s in enumerate(masks):
        if not any(s != t and s & t == s for t in masks):
            keep.append(s)
    sets = keep
    owners = [mask_owner[s] for s in sets]

    ub_idx: list[int] = []
    covered = 0
    for c in ub_centers:
        inside = D[c][universe] <= r
        mask = 0
        for pos in np.flatnonzero(inside):
            mask |= 1 << int(pos)
        # map the greedy center onto a surviving candidate containing its ball
        for k, s in enumerate(sets):
            if mask & s == mask:
                if k not in ub_idx:
                    ub_idx.append(k)
                    covered |= s
                break
    if covered != full:  # pragma: no cover - greedy covers by construction
        raise ValueError("upper-bound cover does not cover the universe")
    if len(ub_idx) <= prune_at:
        return len(ub_idx), sorted(owners[k] for k in ub_idx), True

    size, choice, aborted = min_cover_bitmask(sets, full, ub_idx, prune_at)
    return size, sorted(owners[k] for k in choice), aborted
