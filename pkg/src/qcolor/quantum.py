"""Quantum (1+ε)Δ-coloring: random color trials checked by amplified
Find-Conflict, restricted to small color classes, under a fixed query budget.

Two ledgers run side by side.  The *paper charge* adds
``2 sqrt(n/(εΔ)) log2 n`` for every Find-Conflict call that finds a conflict
and decides when the algorithm gives up (once it exceeds ``T``).  The
session counters record what the simulator actually spent, successful calls
included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

from ._random import SeedLike, make_rng
from .graph import Coloring
from .greedy import discover_max_degree
from .grover import find_conflict_amplified
from .oracle import OracleSession
from .randomized import (
    EpsilonParams,
    ParameterError,
    PartialColoring,
    as_fraction,
    greedy_in_palette,
)


class BudgetValues(NamedTuple):
    T: float
    per_call_charge: float
    small_class_threshold: Fraction
    per_vertex_budget: float


def budget_values(n: int, delta: int, epsilon) -> BudgetValues:
    """``T = 9 ε^{-3/2} log2(n)^2 sqrt(n^3/Δ)``, the per-call charge, the
    small-class threshold ``2n/(εΔ)`` (exact) and ``ℓ = T/n``."""
    eps = as_fraction(epsilon)
    if delta < 1 or eps * delta < 1:
        raise ParameterError(f"need delta >= 1 and epsilon * delta >= 1, got {eps}, {delta}")
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}")
    e = float(eps)
    lg = math.log2(n)
    T = 9 * e ** -1.5 * lg * lg * math.sqrt(n ** 3 / delta)
    per_call = 2 * math.sqrt(n / (e * delta)) * lg
    threshold = Fraction(2 * n) / (eps * delta)
    ell = 9 * e ** -1.5 * lg * lg * math.sqrt(n / delta)
    return BudgetValues(T, per_call, threshold, ell)


@dataclass
class QuantumBudget:
    """Paper-charge ledger and diagnostics for one :func:`quantum_color` run.

    ``calls_per_vertex[t]`` counts the Find-Conflict calls made while
    coloring vertex ``t``.  ``failed_call_quantum`` is the quantum charge the
    simulator actually spent inside calls that found a conflict, the
    quantity the paper charge is meant to dominate.
    """

    T: float
    per_call_charge: float
    small_class_threshold: Fraction
    per_vertex_budget: float
    paper_charge_accrued: float = 0.0
    actual_quantum: int = 0
    actual_pair: int = 0
    failed_call_quantum: int = 0
    calls_per_vertex: list = field(default_factory=list)
    exhausted: bool = False

    @classmethod
    def for_params(cls, params: EpsilonParams) -> "QuantumBudget":
        return cls(*budget_values(params.n, params.delta, params.epsilon))

    @property
    def max_small_class(self) -> int:
        return math.floor(self.small_class_threshold)

    @property
    def actual_total(self) -> int:
        return self.actual_quantum + self.actual_pair

    def success_call_allowance(self, n: int) -> float:
        """Unmetered cost of one successful call per vertex, ``n * per_call_charge``."""
        return n * self.per_call_charge

    def exceeds_allowance(self, n: int) -> bool:
        return self.actual_total > self.T + self.success_call_allowance(n)


def quantum_color(
    s: OracleSession,
    params: EpsilonParams,
    seed: SeedLike,
    budget: Optional[QuantumBudget] = None,
    schedule: str = "doubling",
) -> Optional[Coloring]:
    """Quantum-Color.  Returns ``None`` when the paper charge passes ``T``.

    Per vertex: draw a color; redraw for free if its class is larger than
    ``2n/(εΔ)``; otherwise run amplified Find-Conflict on the class, charge
    and redraw on a conflict, assign on none.  Pass ``budget`` to inspect
    the ledger afterwards.
    """
    if params.n != s.n:
        raise ParameterError(f"params are for n={params.n}, oracle has n={s.n}")
    if params.n < 2:
        raise ParameterError("quantum coloring needs n >= 2")
    b = budget if budget is not None else QuantumBudget.for_params(params)
    rng = make_rng(seed)
    n, L = s.n, params.palette
    max_small = b.max_small_class
    pc = PartialColoring(n, L)
    classes = pc.classes
    start = s.snapshot()
    draw = rng.randrange

    def settle():
        now = s.snapshot()
        b.actual_quantum = now.quantum - start.quantum
        b.actual_pair = now.pair - start.pair

    for v in range(n):
        calls = 0
        while True:
            c = draw(L) + 1
            cls = classes[c]
            if len(cls) > max_small:
                continue
            calls += 1
            before = s.quantum_queries
            hit = find_conflict_amplified(s, v, cls, rng, n, schedule)
            if hit is None:
                pc.assign(v, c)
                break
            b.failed_call_quantum += s.quantum_queries - before
            b.paper_charge_accrued += b.per_call_charge
            if b.paper_charge_accrued > b.T:
                b.calls_per_vertex.append(calls)
                b.exhausted = True
                settle()
                return None
        b.calls_per_vertex.append(calls)
    settle()
    return pc.to_coloring("quantum")


def use_greedy_quantum(n: int, delta: int, epsilon) -> bool:
    """Greedy iff ``εΔ < 1`` or ``Δ < n^{1/3}/ε``, compared exactly as ``(εΔ)^3 < n``."""
    eps = as_fraction(epsilon)
    return eps * delta < 1 or (eps * delta) ** 3 < n


def quantum_color_auto(
    s: OracleSession,
    epsilon,
    seed: SeedLike,
    delta: Optional[int] = None,
    budget: Optional[QuantumBudget] = None,
    schedule: str = "doubling",
) -> Coloring:
    """Discover Δ, then greedy or :func:`quantum_color`.

    Always returns a coloring: if the quantum run gives up, greedy finishes
    the job and the result's ``method`` is ``"greedy-fallback"``.
    """
    as_fraction(epsilon)
    if delta is None:
        delta = discover_max_degree(s)
    if s.n < 2 or use_greedy_quantum(s.n, delta, epsilon):
        return greedy_in_palette(s, delta, epsilon)
    params = EpsilonParams(epsilon, delta, s.n)
    col = quantum_color(s, params, seed, budget=budget, schedule=schedule)
    if col is None:
        return greedy_in_palette(s, delta, epsilon, method="greedy-fallback")
    return col

