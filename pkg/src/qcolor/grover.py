"""Simulated Grover search for a conflicting neighbor.

Find-Conflict asks whether vertex ``v`` has a neighbor inside a set ``S``
without knowing how many such neighbors exist.  Each round assumes a
marked count ``t``, applies ``floor(pi/4 * sqrt(N/t))`` Grover iterations to
the uniform superposition over ``S``, measures, and verifies the measured
candidate with one classical pair query, so a returned vertex is always a
true neighbor.

Sampling uses the exact two-dimensional rotation picture: after ``r``
iterations the marked subspace carries probability
``sin^2((2r + 1) * asin(sqrt(k/N)))`` and amplitudes are uniform within the
marked and unmarked sides.  :func:`statevector_reference` evolves the full
state vector and is kept as an independent check of that closed form.

The simulator reads the hidden graph only to learn ``k`` (which fixes the
rotation angle); the caller never sees it.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Collection, Optional, Sequence

import numpy as np

from ._random import SeedLike, make_rng
from .oracle import OracleSession

MAX_STATEVECTOR = 1 << 14

# "two-round": the two rounds t = 1, 2 only.
# "doubling": t = 1, 2, 4, ... up to the first t >= N.
SCHEDULES = ("doubling", "two-round")


class SimulationTooLarge(MemoryError):
    pass


def grover_success_prob(N: int, k: int, r: int) -> float:
    """Probability of measuring a marked element after ``r`` iterations."""
    if N < 1 or not 0 <= k <= N or r < 0:
        raise ValueError(f"invalid Grover parameters N={N}, k={k}, r={r}")
    if k == 0:
        return 0.0
    if k == N:
        return 1.0
    theta = math.asin(math.sqrt(k / N))
    return math.sin((2 * r + 1) * theta) ** 2


def iteration_count(N: int, t: int) -> int:
    return math.floor(math.pi / 4 * math.sqrt(N / t))


def round_schedule(N: int, schedule: str = "doubling") -> tuple:
    """Assumed marked counts ``t`` tried by one base Find-Conflict call."""
    if schedule == "two-round":
        return (1, 2)
    if schedule != "doubling":
        raise ValueError(f"unknown schedule {schedule!r}; expected one of {SCHEDULES}")
    ts = [1, 2]
    while ts[-1] < N:
        ts.append(ts[-1] * 2)
    return tuple(ts)


def schedule_cost(N: int, schedule: str = "doubling") -> tuple:
    """``(quantum, classical)`` queries of a base call that finds nothing."""
    ts = round_schedule(N, schedule)
    return sum(iteration_count(N, t) for t in ts), len(ts)


def composite_success(N: int, k: int, schedule: str = "doubling") -> float:
    """Probability that a base call returns a conflict when ``k`` exist."""
    miss = 1.0
    for t in round_schedule(N, schedule):
        miss *= 1.0 - grover_success_prob(N, k, iteration_count(N, t))
    return 1.0 - miss


def amplification_rounds(n: int) -> int:
    """Base-call repetitions for the amplified routine: ``ceil(3 log2 n)``."""
    return max(1, math.ceil(3 * math.log2(n))) if n > 1 else 1


@dataclass(frozen=True)
class GroverInstance:
    N: int
    k: int
    r: int

    def __post_init__(self):
        if self.N < 1 or not 0 <= self.k <= self.N or self.r < 0:
            raise ValueError(f"invalid Grover instance {self}")

    @property
    def success_prob(self) -> float:
        return grover_success_prob(self.N, self.k, self.r)


@dataclass(frozen=True)
class GroverOutcome:
    candidate: int
    verified: bool
    quantum_queries: int
    classical_queries: int


def _sample(N: int, marked: Sequence[int], marked_set, p: float, rng: random.Random) -> int:
    k = len(marked)
    if k and (k == N or rng.random() < p):
        return marked[rng.randrange(k)]
    if k == 0:
        return rng.randrange(N)
    while True:
        i = rng.randrange(N)
        if i not in marked_set:
            return i


def measure_grover(inst: GroverInstance, marked: Collection[int], seed: SeedLike) -> int:
    """Index observed after ``inst.r`` iterations with ``marked`` as solutions."""
    marked = sorted(marked)
    if len(marked) != inst.k:
        raise ValueError(f"instance says k={inst.k} but {len(marked)} elements are marked")
    if marked and (marked[0] < 0 or marked[-1] >= inst.N):
        raise ValueError("marked element outside [0, N)")
    return _sample(inst.N, marked, set(marked), inst.success_prob, make_rng(seed))


# -- statevector oracle ----------------------------------------------------------


def _check_size(N: int) -> None:
    if N < 1:
        raise ValueError("N must be positive")
    if N > MAX_STATEVECTOR:
        raise SimulationTooLarge(f"statevector limited to N <= {MAX_STATEVECTOR}, got {N}")


def statevector_reference(N: int, marked: Collection[int], r: int) -> np.ndarray:
    """Measurement distribution after ``r`` explicit Grover iterations."""
    _check_size(N)
    idx = np.fromiter(marked, dtype=np.int64)
    state = np.full(N, 1.0 / math.sqrt(N))
    for _ in range(r):
        state[idx] = -state[idx]                 # phase oracle
        state = 2.0 * state.mean() - state       # reflection about the uniform state
    return state * state


def marked_mass_trajectory(N: int, marked: Collection[int], r_max: int) -> np.ndarray:
    """Marked probability mass after each of ``0..r_max`` iterations."""
    _check_size(N)
    idx = np.fromiter(marked, dtype=np.int64)
    state = np.full(N, 1.0 / math.sqrt(N))
    out = np.empty(r_max + 1)
    out[0] = float(np.sum(state[idx] ** 2))
    for r in range(1, r_max + 1):
        state[idx] = -state[idx]
        state = 2.0 * state.mean() - state
        out[r] = float(np.sum(state[idx] ** 2))
    return out


# -- Find-Conflict ------------------------------------------------------------------


def _members(v: int, cls) -> list:
    members = cls if isinstance(cls, list) else sorted(cls)
    if v in members:
        raise ValueError(f"vertex {v} is inside the searched set")
    return members


def _conflict_positions(s: OracleSession, v: int, members: Sequence[int]) -> list:
    # simulator-side only: fixes the rotation angle, never returned to the caller
    g = s.graph
    return [i for i, u in enumerate(members) if g.has_edge(v, u)]


def grover_round(
    s: OracleSession,
    v: int,
    members: Sequence[int],
    marked: Sequence[int],
    t: int,
    rng: random.Random,
) -> GroverOutcome:
    """One search round assuming ``t`` marked elements, plus its verification."""
    N = len(members)
    r = iteration_count(N, t)
    s.charge_quantum(r)
    p = grover_success_prob(N, len(marked), r)
    u = members[_sample(N, marked, marked, p, rng)]
    return GroverOutcome(u, s.pair_query(v, u) == 1, r, 1)


def _base(s, v, members, marked, rng, rounds) -> Optional[int]:
    for t in rounds:
        out = grover_round(s, v, members, marked, t, rng)
        if out.verified:
            return out.candidate
    return None


def find_conflict(
    s: OracleSession, v: int, cls: Collection[int], seed: SeedLike, schedule: str = "doubling"
) -> Optional[int]:
    """A neighbor of ``v`` in ``cls`` or ``None``; never a false positive.

    An empty ``cls`` returns ``None`` without touching the oracle.
    """
    if not cls:
        return None
    members = _members(v, cls)
    marked = _conflict_positions(s, v, members)
    return _base(s, v, members, marked, make_rng(seed), round_schedule(len(members), schedule))


def find_conflict_amplified(
    s: OracleSession,
    v: int,
    cls: Collection[int],
    seed: SeedLike,
    n: int,
    schedule: str = "doubling",
) -> Optional[int]:
    """Repeat :func:`find_conflict` up to ``ceil(3 log2 n)`` times; first hit wins."""
    if not cls:
        return None
    members = _members(v, cls)
    marked = _conflict_positions(s, v, members)
    rng = make_rng(seed)
    rounds = round_schedule(len(members), schedule)
    for _ in range(amplification_rounds(n)):
        hit = _base(s, v, members, marked, rng, rounds)
        if hit is not None:
            return hit
    return None
