"""Hidden-input graphs: representation, generators, edge-list IO, validation.

Vertices are the integers ``0..n-1``.  A :class:`Graph` never changes after
construction; algorithms only ever see it through an
:class:`~qcolor.oracle.OracleSession`.
"""

from __future__ import annotations

import bisect
from array import array
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

# Above this size pair lookups fall back to bisection instead of dense rows.
DENSE_ROW_LIMIT = 1 << 14


class GenerationError(RuntimeError):
    """A generator could not produce a graph with the requested shape."""


class EdgeListError(ValueError):
    """Malformed edge-list text.  ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _int_array(values) -> array:
    out = array("i")
    out.frombytes(np.ascontiguousarray(values, dtype=np.int32).tobytes())
    return out


class Graph:
    """Immutable undirected simple graph.

    ``adjacency[v]`` is the strictly increasing sequence of neighbours of
    ``v``.  Construct through :meth:`from_edges` or :meth:`from_matrix`
    unless you already hold sorted neighbour lists.
    """

    __slots__ = ("_n", "_adj", "_max_degree", "_rows", "_edge_arrays")

    def __init__(self, n: int, adjacency: Sequence[Sequence[int]], *, check: bool = True):
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        if len(adjacency) != n:
            raise ValueError(f"expected {n} neighbour lists, got {len(adjacency)}")
        self._n = n
        self._adj = tuple(a if isinstance(a, array) else array("i", a) for a in adjacency)
        self._max_degree = max((len(a) for a in self._adj), default=0)
        self._rows: Optional[tuple] = None
        self._edge_arrays: Optional[tuple] = None
        if check:
            self.check_invariants()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build from an edge iterable; rejects self-loops, duplicates, bad ids."""
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        u, v = pairs[:, 0], pairs[:, 1]
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise ValueError(f"edge endpoint out of range for n={n}")
        if np.any(u == v):
            raise ValueError("self-loops are not allowed")
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        if len(np.unique(lo * max(n, 1) + hi)) != len(lo):
            raise ValueError("duplicate edge")
        return cls._from_arrays(n, lo, hi)

    @classmethod
    def from_matrix(cls, matrix) -> "Graph":
        """Build from a symmetric boolean adjacency matrix with empty diagonal."""
        mat = np.asarray(matrix, dtype=bool)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if np.any(np.diagonal(mat)):
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(mat, mat.T):
            raise ValueError("adjacency matrix must be symmetric")
        n = mat.shape[0]
        rows, cols = np.nonzero(mat)
        counts = np.bincount(rows, minlength=n)
        pieces = np.split(cols, np.cumsum(counts)[:-1]) if n else []
        g = cls(n, [_int_array(p) for p in pieces], check=False)
        if n <= DENSE_ROW_LIMIT:
            g._rows = tuple(mat[i].tobytes() for i in range(n))
        return g

    @classmethod
    def _from_arrays(cls, n: int, lo: np.ndarray, hi: np.ndarray) -> "Graph":
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        counts = np.bincount(src, minlength=n) if n else np.zeros(0, dtype=np.int64)
        pieces = np.split(dst, np.cumsum(counts)[:-1]) if n else []
        return cls(n, [_int_array(p) for p in pieces], check=False)

    # -- queries on the raw structure ---------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def max_degree(self) -> int:
        return self._max_degree

    @property
    def adjacency(self) -> tuple:
        return self._adj

    def neighbors(self, v: int) -> array:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    def has_edge(self, u: int, v: int) -> bool:
        if self._rows is None and self._n <= DENSE_ROW_LIMIT:
            self._build_rows()
        if self._rows is not None:
            return self._rows[u][v] == 1
        nb = self._adj[u]
        k = bisect.bisect_left(nb, v)
        return k < len(nb) and nb[k] == v

    def dense_rows(self) -> tuple:
        """Per-vertex 0/1 adjacency rows as ``bytes`` (only for ``n <= DENSE_ROW_LIMIT``)."""
        if self._rows is None:
            self._build_rows()
        return self._rows

    def _build_rows(self) -> None:
        if self._n > DENSE_ROW_LIMIT:
            raise MemoryError(f"dense rows disabled above n={DENSE_ROW_LIMIT}")
        mat = np.zeros((self._n, self._n), dtype=np.uint8)
        lo, hi = self.edge_arrays()
        mat[lo, hi] = 1
        mat[hi, lo] = 1
        self._rows = tuple(mat[i].tobytes() for i in range(self._n))

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        for u, nb in enumerate(self._adj):
            k = bisect.bisect_right(nb, u)
            for i in range(k, len(nb)):
                yield u, nb[i]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(lo, hi)`` endpoint arrays of all edges, cached."""
        if self._edge_arrays is None:
            if self._n == 0:
                src = dst = np.zeros(0, dtype=np.int64)
            else:
                degs = np.fromiter((len(a) for a in self._adj), dtype=np.int64, count=self._n)
                src = np.repeat(np.arange(self._n), degs)
                dst = np.concatenate(
                    [np.frombuffer(a.tobytes(), dtype=np.int32) for a in self._adj]
                ).astype(np.int64)
            keep = src < dst
            self._edge_arrays = (src[keep], dst[keep])
        return self._edge_arrays

    def check_invariants(self) -> None:
        """Recount pass: sortedness, no self-loops, symmetry, cached max degree."""
        n = self._n
        degs = [len(a) for a in self._adj]
        if max(degs, default=0) != self._max_degree:
            raise AssertionError("cached max degree is stale")
        if n == 0:
            return
        src = np.repeat(np.arange(n), degs)
        dst = np.concatenate([np.frombuffer(a.tobytes(), dtype=np.int32) for a in self._adj]).astype(
            np.int64
        ) if sum(degs) else np.zeros(0, dtype=np.int64)
        if dst.size and (dst.min() < 0 or dst.max() >= n):
            raise ValueError("neighbour id out of range")
        if np.any(src == dst):
            raise ValueError("self-loop in adjacency")
        same_row = src[1:] == src[:-1]
        if np.any(same_row & (dst[1:] <= dst[:-1])):
            raise ValueError("neighbour lists must be strictly increasing")
        fwd = np.sort(src * n + dst)
        bwd = np.sort(dst * n + src)
        if not np.array_equal(fwd, bwd):
            raise ValueError("adjacency is not symmetric")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._adj == other._adj

    def __hash__(self):
        return hash((self._n, self.edge_count, self._max_degree))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.edge_count}, max_degree={self._max_degree})"


# -- colorings ----------------------------------------------------------------


@dataclass(frozen=True)
class Coloring:
    """Per-vertex colors in ``1..palette_size``; ``None`` marks an uncolored vertex.

    ``method`` names the route that produced the coloring (``"greedy"``,
    ``"lv"``, ``"quantum"``, ...) and is informational only.
    """

    assignment: tuple
    palette_size: int
    method: str = ""

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(self.assignment))
        for v, c in enumerate(self.assignment):
            if c is not None and not 1 <= c <= self.palette_size:
                raise ValueError(f"vertex {v}: color {c} outside [1, {self.palette_size}]")

    def __len__(self) -> int:
        return len(self.assignment)

    @property
    def colors_used(self) -> int:
        return len({c for c in self.assignment if c is not None})


@dataclass
class ValidityReport:
    proper: bool
    monochromatic_edges: list = field(default_factory=list)
    uncolored: list = field(default_factory=list)


def validate_coloring(g: Graph, col: Coloring) -> ValidityReport:
    if len(col.assignment) != g.n:
        raise ValueError(f"assignment has {len(col.assignment)} entries, graph has {g.n} vertices")
    colors = np.fromiter((0 if c is None else c for c in col.assignment), dtype=np.int64, count=g.n)
    uncolored = np.flatnonzero(colors == 0).tolist()
    lo, hi = g.edge_arrays()
    bad = (colors[lo] == colors[hi]) & (colors[lo] != 0)
    mono = list(zip(lo[bad].tolist(), hi[bad].tolist()))
    return ValidityReport(proper=not mono and not uncolored, monochromatic_edges=mono, uncolored=uncolored)


# -- generators -----------------------------------------------------------------


def empty_graph(n: int) -> Graph:
    return Graph(n, [[] for _ in range(n)], check=False)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def star_graph(n: int) -> Graph:
    """Center 0 joined to leaves ``1..n-1``."""
    return Graph.from_edges(n, ((0, i) for i in range(1, n)))


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, j) for i in range(n) for j in range(i + 1, n)))


def gen_single_edge(n: int, i: int, j: int) -> Graph:
    """The graph on ``n`` vertices whose only edge is ``(i, j)``."""
    if i == j:
        raise ValueError("single-edge endpoints must differ")
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"endpoints ({i}, {j}) out of range for n={n}")
    return Graph.from_edges(n, [(i, j)])


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Erdős–Rényi G(n, p), deterministic per seed."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.default_rng(seed)
    lo, hi = np.triu_indices(n, 1)
    keep = rng.random(lo.size) < p
    return Graph._from_arrays(n, lo[keep].astype(np.int64), hi[keep].astype(np.int64))


def _stub_matching(n: int, d: int, rng: np.random.Generator, max_rounds: int = 200) -> np.ndarray:
    mat = np.zeros((n, n), dtype=bool)
    deficit = np.full(n, d, dtype=np.int64)
    stalls = 0
    for _ in range(max_rounds):
        stubs = np.repeat(np.arange(n), deficit)
        if stubs.size < 2:
            break
        rng.shuffle(stubs)
        stubs = stubs[: stubs.size - (stubs.size % 2)]
        a, b = stubs[0::2], stubs[1::2]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        ok = (lo != hi) & ~mat[lo, hi]
        lo, hi = lo[ok], hi[ok]
        _, first = np.unique(lo * n + hi, return_index=True)
        lo, hi = lo[first], hi[first]
        if lo.size == 0:
            stalls += 1
            if stalls >= 8:
                break
            continue
        mat[lo, hi] = True
        mat[hi, lo] = True
        np.subtract.at(deficit, lo, 1)
        np.subtract.at(deficit, hi, 1)

    # leftover stubs whose random partners kept colliding
    short = [int(v) for v in np.flatnonzero(deficit > 0)]
    for x, u in enumerate(short):
        for w in short[x + 1 :]:
            if deficit[u] == 0:
                break
            if deficit[w] > 0 and not mat[u, w]:
                mat[u, w] = mat[w, u] = True
                deficit[u] -= 1
                deficit[w] -= 1
    return mat


def gen_regular_like(n: int, target_delta: int, seed: int, retries: int = 8) -> Graph:
    """Near-regular graph with maximum degree exactly ``target_delta``.

    Stubs are matched at random, colliding pairs (self-loops, repeated edges)
    are dropped, and the leftover stubs are re-matched in further rounds.
    Degrees never exceed ``target_delta``; the result is checked and the
    construction retried under a derived seed if no vertex reaches it.
    """
    if not 1 <= target_delta < n:
        raise ValueError(f"need 1 <= target_delta < n, got target_delta={target_delta}, n={n}")
    if (n * target_delta) % 2:
        raise ValueError(f"n * target_delta must be even, got {n} * {target_delta}")
    for attempt in range(retries):
        rng = np.random.default_rng([seed, attempt])
        mat = _stub_matching(n, target_delta, rng)
        g = Graph.from_matrix(mat)
        if g.max_degree == target_delta:
            return g
    raise GenerationError(
        f"no graph with max degree {target_delta} on {n} vertices after {retries} attempts"
    )


# -- edge-list text format -------------------------------------------------------


def write_edge_list(g: Graph) -> str:
    lines = [str(g.n)]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_edge_list(text: str) -> Graph:
    """Parse ``n`` on the first line, then one ``u v`` edge per line."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise EdgeListError("missing vertex count", 1)
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise EdgeListError(f"bad vertex count {lines[0].strip()!r}", 1) from None
    if n < 0:
        raise EdgeListError("negative vertex count", 1)
    seen = set()
    edges = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split()
        if len(parts) != 2:
            raise EdgeListError(f"expected 'u v', got {raw!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"non-integer vertex in {raw!r}", lineno) from None
        if u == v:
            raise EdgeListError(f"self-loop at vertex {u}", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise EdgeListError(f"vertex id out of range for n={n}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise EdgeListError(f"duplicate edge {key}", lineno)
        seen.add(key)
        edges.append(key)
    return Graph.from_edges(n, edges)


def load_graph(path) -> Graph:
    with open(path) as fh:
        return read_edge_list(fh.read())


def save_graph(path, g: Graph) -> None:
    with open(path, "w") as fh:
        fh.write(write_edge_list(g))
