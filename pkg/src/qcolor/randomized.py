"""Las Vegas (1+ε)Δ-coloring by random color trials, its Monte Carlo variant,
and the greedy/randomized dispatcher.

Each vertex, in increasing id order, draws colors uniformly from the palette
``[ceil((1+ε)Δ)]`` and scans the current color class with pair queries until
a color with no neighbor in its class turns up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional

from ._random import SeedLike, make_rng
from .graph import Coloring
from .greedy import discover_max_degree, greedy_color
from .oracle import PAIR, BudgetExhausted, OracleSession

MC_CAP_CONSTANT = 4


class ParameterError(ValueError):
    """ε, Δ or n outside the range an algorithm is defined for."""


def as_fraction(epsilon) -> Fraction:
    """Exact ε.  Floats go through their shortest repr, so ``0.1`` is ``1/10``."""
    if isinstance(epsilon, Rational):
        eps = Fraction(epsilon)
    elif isinstance(epsilon, float):
        if not math.isfinite(epsilon):
            raise ParameterError(f"epsilon must be finite, got {epsilon}")
        eps = Fraction(repr(epsilon))
    else:
        eps = Fraction(str(epsilon))
    if eps <= 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    return eps


def palette_size(delta: int, epsilon) -> int:
    """``ceil((1 + ε)Δ)``; requires ``εΔ >= 1``."""
    eps = as_fraction(epsilon)
    if eps * delta < 1:
        raise ParameterError(f"need epsilon * delta >= 1, got {eps} * {delta}")
    return math.ceil((1 + eps) * delta)


@dataclass(frozen=True)
class EpsilonParams:
    epsilon: Fraction
    delta: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if self.n < 1:
            raise ParameterError(f"need at least one vertex, got n={self.n}")
        if not 0 <= self.delta < self.n:
            raise ParameterError(f"max degree {self.delta} impossible on {self.n} vertices")
        if self.epsilon * self.delta < 1:
            raise ParameterError(f"need epsilon * delta >= 1, got {self.epsilon} * {self.delta}")

    @property
    def palette(self) -> int:
        return math.ceil((1 + self.epsilon) * self.delta)

    @property
    def dispatch_threshold(self) -> float:
        return math.sqrt(self.n / self.epsilon)


class PartialColoring:
    """Color classes ``classes[c]`` (index 0 unused) plus the vertex->color map.

    Vertices are colored in increasing id order, so appending keeps every
    class sorted.
    """

    def __init__(self, n: int, palette: int):
        self.L = palette
        self.classes: list[list[int]] = [[] for _ in range(palette + 1)]
        self.assignment: list = [None] * n

    def assign(self, v: int, c: int) -> None:
        if self.assignment[v] is not None:
            raise ValueError(f"vertex {v} already colored")
        cls = self.classes[c]
        if cls and cls[-1] > v:
            raise ValueError("vertices must be colored in increasing id order")
        cls.append(v)
        self.assignment[v] = c

    @property
    def class_sizes(self) -> list[int]:
        return [len(c) for c in self.classes[1:]]

    @property
    def colored(self) -> int:
        return sum(1 for c in self.assignment if c is not None)

    def check(self) -> None:
        for c, cls in enumerate(self.classes):
            for v in cls:
                if self.assignment[v] != c:
                    raise AssertionError(f"vertex {v} listed in class {c} but colored {self.assignment[v]}")
        if sum(self.class_sizes) != self.colored:
            raise AssertionError("class sizes do not add up to the colored count")

    def to_coloring(self, method: str) -> Coloring:
        return Coloring(tuple(self.assignment), self.L, method=method)


def find_conflict_classical(s: OracleSession, v: int, cls) -> Optional[int]:
    """First ``u`` in ``cls`` (sorted order) adjacent to ``v``, else ``None``."""
    members = cls if isinstance(cls, list) else sorted(cls)
    query = s.pair_query
    for u in members:
        if query(u, v):
            return u
    return None


def lv_color(
    s: OracleSession,
    params: EpsilonParams,
    seed: SeedLike,
    trace: Optional[list] = None,
) -> Coloring:
    """Always-proper ``ceil((1+ε)Δ)``-coloring; the query count is random.

    If ``trace`` is a list, the pair queries spent on each vertex are
    appended to it in vertex order.
    """
    if params.n != s.n:
        raise ParameterError(f"params are for n={params.n}, oracle has n={s.n}")
    rng = make_rng(seed)
    L = params.palette
    pc = PartialColoring(s.n, L)
    classes = pc.classes
    draw = rng.randrange
    for v in range(s.n):
        before = s.pair_queries
        while True:
            c = draw(L) + 1
            if find_conflict_classical(s, v, classes[c]) is None:
                pc.assign(v, c)
                break
        if trace is not None:
            trace.append(s.pair_queries - before)
    return pc.to_coloring("lv")


def expected_query_bound(params: EpsilonParams) -> float:
    """``min(n^2/(εΔ), ε^{-1/2} n^{3/2})``: the Las Vegas expectation bound."""
    n, eps, delta = params.n, float(params.epsilon), params.delta
    return min(n * n / (eps * delta), n ** 1.5 / math.sqrt(eps))


def mc_windows(n: int, k: float) -> int:
    return max(1, math.ceil(k * math.log2(n))) if n > 1 else 1


def mc_color(
    s: OracleSession,
    params: EpsilonParams,
    seed: SeedLike,
    k: float = 2,
    cap: Optional[int] = None,
) -> Optional[Coloring]:
    """Monte Carlo coloring: ``None`` on failure, else a proper coloring.

    Runs up to ``ceil(k log2 n)`` restarts of :func:`lv_color`, each limited
    to ``cap`` pair queries (default ``4 * expected_query_bound``).  By
    Markov each restart fails with probability at most 1/4, so all of them
    fail with probability at most ``n^{-2k}``.  The first restart draws from
    the same stream as ``lv_color(s, params, seed)``.
    """
    if cap is None:
        cap = math.floor(MC_CAP_CONSTANT * expected_query_bound(params))
    if cap <= 0:
        return None
    rng = make_rng(seed)
    for _ in range(mc_windows(params.n, k)):
        try:
            with s.limit(cap, kinds=(PAIR,)):
                col = lv_color(s, params, rng)
        except BudgetExhausted:
            continue
        return Coloring(col.assignment, col.palette_size, method="mc")
    return None


def use_greedy_classical(n: int, delta: int, epsilon) -> bool:
    """Greedy iff ``εΔ < 1`` or ``Δ <= sqrt(n/ε)``, compared exactly as ``Δ²ε <= n``."""
    eps = as_fraction(epsilon)
    return eps * delta < 1 or delta * delta * eps <= n


def greedy_in_palette(s: OracleSession, delta: int, epsilon, method: str = "greedy") -> Coloring:
    """Greedy coloring reported against ``ceil((1+ε)Δ)`` when ``εΔ >= 1``."""
    col = greedy_color(s, delta)
    eps = as_fraction(epsilon)
    palette = math.ceil((1 + eps) * delta) if eps * delta >= 1 else delta + 1
    return Coloring(col.assignment, palette, method=method)


def color_auto(s: OracleSession, epsilon, seed: SeedLike, delta: Optional[int] = None) -> Coloring:
    """Discover Δ (unless given), then run greedy or :func:`lv_color`."""
    as_fraction(epsilon)
    if delta is None:
        delta = discover_max_degree(s)
    if use_greedy_classical(s.n, delta, epsilon):
        return greedy_in_palette(s, delta, epsilon)
    return lv_color(s, EpsilonParams(epsilon, delta, s.n), seed)
