"""Greedy (Δ+1)-coloring driven by neighbor queries, and Δ discovery."""

from __future__ import annotations

from .graph import Coloring
from .oracle import OracleSession


def discover_max_degree(s: OracleSession) -> int:
    """Exact maximum degree via a binary search over ``[1, n]`` at every vertex.

    Finds, per vertex, the largest index whose neighbor query is not ``None``.
    Costs at most ``ceil(log2(n + 1))`` neighbor queries per vertex.
    """
    n = s.n
    best = 0
    for v in range(n):
        lo, hi = 0, n  # degree lies in [lo, hi]
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if s.neighbor_query(v, mid) is None:
                hi = mid - 1
            else:
                lo = mid
        best = max(best, lo)
    return best


def greedy_color(s: OracleSession, delta: int) -> Coloring:
    """Color vertices in increasing id order with the lowest free color.

    Each vertex reads its whole neighbor list (``deg + 1`` queries, the last
    one hitting ``None``), so the total cost is ``sum(deg(v) + 1)``.
    """
    n = s.n
    palette = delta + 1
    assignment: list = [None] * n
    for v in range(n):
        taken = set()
        j = 1
        while True:
            u = s.neighbor_query(v, j)
            if u is None:
                break
            c = assignment[u]
            if c is not None:
                taken.add(c)
            j += 1
        c = 1
        while c in taken:
            c += 1
        if c > palette:
            raise ValueError(f"vertex {v} has more than delta={delta} colored neighbors")
        assignment[v] = c
    return Coloring(tuple(assignment), palette, method="greedy")
