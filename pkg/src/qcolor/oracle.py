"""Counted query access to a hidden graph.

Every algorithm in this package reaches the graph only through an
:class:`OracleSession`.  Pair and neighbor queries cost one unit each;
quantum queries are charged by the Grover simulator, one unit per oracle
application.
"""

from __future__ import annotations

import io
from contextlib import contextmanager
from typing import NamedTuple, Optional

from .graph import DENSE_ROW_LIMIT, Graph

PAIR = "pair"
NEIGHBOR = "neighbor"
QUANTUM = "quantum"
KINDS = (PAIR, NEIGHBOR, QUANTUM)


class BudgetExhausted(RuntimeError):
    """Raised instead of answering a query that would overrun the budget."""

    def __init__(self, kind: str, amount: int, spent: int, budget: int):
        super().__init__(f"{kind} query of cost {amount} would exceed budget {budget} (spent {spent})")
        self.kind = kind
        self.amount = amount
        self.spent = spent
        self.budget = budget


class QueryCounts(NamedTuple):
    pair: int
    neighbor: int
    quantum: int

    @property
    def total(self) -> int:
        return self.pair + self.neighbor + self.quantum

    def __sub__(self, other):
        return QueryCounts(self.pair - other.pair, self.neighbor - other.neighbor, self.quantum - other.quantum)


class OracleSession:
    """Instrumented oracle over one hidden graph.

    ``budget`` caps the sum of the counters named in ``budget_on``; a query
    that would push that sum past the cap raises :class:`BudgetExhausted`
    and leaves every counter unchanged.  With ``log_charges`` off the
    per-query charge log is not kept (counters still are).
    """

    def __init__(
        self,
        graph: Graph,
        budget: Optional[int] = None,
        budget_on: tuple = KINDS,
        log_charges: bool = True,
    ):
        for kind in budget_on:
            if kind not in KINDS:
                raise ValueError(f"unknown query kind {kind!r}")
        self._graph = graph
        self.n = graph.n
        self.pair_queries = 0
        self.neighbor_queries = 0
        self.quantum_queries = 0
        self.budget = budget
        self.budget_on = tuple(budget_on)
        self.log_charges = log_charges
        self.charge_log: list[tuple[str, int]] = []
        self._dense = graph.dense_rows() if graph.n <= DENSE_ROW_LIMIT else None

    @property
    def graph(self) -> Graph:
        """The hidden graph.  For simulators and checkers; algorithms must not read it."""
        return self._graph

    # -- budget bookkeeping ----------------------------------------------------

    @property
    def designated_total(self) -> int:
        return sum(getattr(self, f"{kind}_queries") for kind in self.budget_on)

    def _admit(self, kind: str, amount: int) -> None:
        if self.budget is not None and kind in self.budget_on:
            spent = self.designated_total
            if spent + amount > self.budget:
                raise BudgetExhausted(kind, amount, spent, self.budget)

    @contextmanager
    def limit(self, extra: int, kinds: tuple = KINDS):
        """Temporarily allow at most ``extra`` more units on ``kinds``."""
        saved = self.budget, self.budget_on
        self.budget_on = tuple(kinds)
        cap = self.designated_total + extra
        if saved[0] is not None and saved[1] == self.budget_on:
            cap = min(cap, saved[0])
        self.budget = cap
        try:
            yield self
        finally:
            self.budget, self.budget_on = saved

    # -- queries ---------------------------------------------------------------

    def pair_query(self, i: int, j: int) -> int:
        """``M[i, j]``: 1 if ``(i, j)`` is an edge, else 0."""
        if i == j:
            raise ValueError(f"pair query needs distinct vertices, got ({i}, {j})")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise ValueError(f"vertex out of range in pair query ({i}, {j})")
        if self.budget is not None:
            self._admit(PAIR, 1)
        self.pair_queries += 1
        if self.log_charges:
            self.charge_log.append((PAIR, 1))
        if self._dense is not None:
            return self._dense[i][j]
        return int(self._graph.has_edge(i, j))

    def neighbor_query(self, i: int, j: int) -> Optional[int]:
        """The ``j``-th neighbor of ``i`` (1-based, sorted order), or ``None`` past the degree."""
        if not 0 <= i < self.n:
            raise ValueError(f"vertex {i} out of range")
        if j < 1:
            raise ValueError(f"neighbor index is 1-based, got {j}")
        if self.budget is not None:
            self._admit(NEIGHBOR, 1)
        self.neighbor_queries += 1
        if self.log_charges:
            self.charge_log.append((NEIGHBOR, 1))
        nb = self._graph.neighbors(i)
        return nb[j - 1] if j <= len(nb) else None

    def charge_quantum(self, amount: int) -> None:
        """Record ``amount`` applications of the phase oracle."""
        if amount < 0:
            raise ValueError(f"quantum charge must be non-negative, got {amount}")
        if amount == 0:
            return
        self._admit(QUANTUM, amount)
        self.quantum_queries += amount
        if self.log_charges:
            self.charge_log.append((QUANTUM, amount))

    def snapshot(self) -> QueryCounts:
        return QueryCounts(self.pair_queries, self.neighbor_queries, self.quantum_queries)

    def charge_log_csv(self) -> str:
        """Charge log as ``kind,amount,cumulative`` rows; cumulative is per kind."""
        out = io.StringIO()
        out.write("kind,amount,cumulative\n")
        running = dict.fromkeys(KINDS, 0)
        for kind, amount in self.charge_log:
            running[kind] += amount
            out.write(f"{kind},{amount},{running[kind]}\n")
        return out.getvalue()
