"""Strict partial orders, Hasse diagrams, levels, and layered partitions.

Points are 0-indexed in code; file formats and error messages are 1-indexed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CycleError",
    "StrictOrder",
    "HasseDag",
    "LevelAssignment",
    "KPartition",
    "KPartitionReport",
    "closure_from_edges",
    "transitive_closure",
    "transitive_reduction",
    "compute_levels",
    "mirsky_partition",
    "validate_kpartition",
]


class CycleError(ValueError):
    """An edge set that must be acyclic contains a directed cycle."""

    def __init__(self, cycle):
        self.cycle = tuple(int(v) for v in cycle)
        pretty = " -> ".join(str(v + 1) for v in self.cycle + (self.cycle[0],))
        super().__init__(f"cycle detected: {pretty}")


def _bool_matmul(a, b):
    # float32 matmul goes through BLAS; path counts stay far below 2**24
    if a.shape[0] <= 64:
        return (a.astype(np.uint8) @ b.astype(np.uint8)) > 0
    return (a.astype(np.float32) @ b.astype(np.float32)) > 0.5


def _reachability(adj):
    reach = adj.copy()
    while True:
        grown = reach | _bool_matmul(reach, reach)
        if np.array_equal(grown, reach):
            return reach
        reach = grown


def _smallest_cycle(adj, reach):
    # deterministic witness: start at the smallest node on a cycle, then walk
    # greedily to the smallest successor that can still return to the start
    start = int(np.flatnonzero(np.diag(reach)).min())
    path = [start]
    seen = {start}
    cur = start
    for _ in range(2 * adj.shape[0]):
        if adj[cur, start]:
            return path
        nxt = [int(v) for v in np.flatnonzero(adj[cur] & reach[:, start])]
        fresh = [v for v in nxt if v not in seen]
        cur = (fresh or nxt)[0]
        path.append(cur)
        seen.add(cur)
    return path


class StrictOrder:
    """Transitive closure of an acyclic relation; matrix[i, j] means i < j."""

    __slots__ = ("n", "matrix")

    def __init__(self, matrix):
        m = np.array(matrix, dtype=bool)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("closure matrix must be square")
        diag = m.diagonal()
        if diag.any():
            bad = int(np.flatnonzero(diag)[0])
            raise ValueError(f"relation is not irreflexive: point {bad + 1}")
        both = m & m.T
        if both.any():
            i, j = (int(v) for v in np.argwhere(both)[0])
            raise ValueError(
                f"relation is not antisymmetric: {i + 1} and {j + 1} are mutually related"
            )
        missing = _bool_matmul(m, m) & ~m
        if missing.any():
            i, j = (int(v) for v in np.argwhere(missing)[0])
            raise ValueError(f"relation is not transitive: {i + 1} < {j + 1} is implied but absent")
        m.setflags(write=False)
        self.n = int(m.shape[0])
        self.matrix = m

    @classmethod
    def from_relations(cls, n, relations, close=False):
        """Build from (a, b) pairs meaning a < b; `close` takes the transitive
        closure first instead of requiring the input to be closed already."""
        if close:
            return closure_from_edges(n, relations)
        m = np.zeros((n, n), dtype=bool)
        for a, b in relations:
            _check_point(a, n)
            _check_point(b, n)
            m[a, b] = True
        return cls(m)

    def relations(self):
        return [(int(a), int(b)) for a, b in np.argwhere(self.matrix)]

    @property
    def n_relations(self):
        return int(self.matrix.sum())

    @property
    def density(self):
        """Comparable-pair fraction: relations / n^2."""
        return self.n_relations / self.n**2

    def less(self, a, b):
        return bool(self.matrix[a, b])

    def comparable(self, a, b):
        return bool(self.matrix[a, b] or self.matrix[b, a])

    def __eq__(self, other):
        return isinstance(other, StrictOrder) and np.array_equal(self.matrix, other.matrix)

    def __repr__(self):
        return f"StrictOrder(n={self.n}, relations={self.n_relations})"


def _check_point(v, n):
    if not 0 <= v < n:
        raise ValueError(f"point {v + 1} out of range 1..{n}")
    return int(v)


class HasseDag:
    """Cover edges of a strict order: acyclic, with no shortcut edges."""

    __slots__ = ("n", "covers")

    def __init__(self, n, covers):
        n = int(n)
        edges = []
        seen = set()
        for a, b in covers:
            a, b = _check_point(a, n), _check_point(b, n)
            if a == b:
                raise ValueError(f"self-loop at point {a + 1}")
            if (a, b) in seen:
                continue
            seen.add((a, b))
            edges.append((a, b))
        adj = np.zeros((n, n), dtype=bool)
        for a, b in edges:
            adj[a, b] = True
        reach = _reachability(adj) if edges else adj
        if np.diag(reach).any():
            raise CycleError(_smallest_cycle(adj, reach))
        # shortcut edge: some longer directed path joins its endpoints
        long_path = _bool_matmul(adj, reach)
        bad = adj & long_path
        if bad.any():
            i, j = (int(v) for v in np.argwhere(bad)[0])
            raise ValueError(
                f"shortcut edge {i + 1} -> {j + 1}: a longer path joins its endpoints"
            )
        self.n = n
        self.covers = tuple(sorted(edges))

    def adjacency(self):
        adj = np.zeros((self.n, self.n), dtype=bool)
        for a, b in self.covers:
            adj[a, b] = True
        return adj

    def __eq__(self, other):
        return (
            isinstance(other, HasseDag) and self.n == other.n and self.covers == other.covers
        )

    def __repr__(self):
        return f"HasseDag(n={self.n}, covers={len(self.covers)})"


def closure_from_edges(n, edges):
    """Transitive closure of an arbitrary acyclic edge set (shortcuts allowed).

    Raises CycleError with a witness if the edges contain a directed cycle.
    """
    adj = np.zeros((n, n), dtype=bool)
    for a, b in edges:
        a, b = _check_point(a, n), _check_point(b, n)
        if a == b:
            raise CycleError((a,))
        adj[a, b] = True
    reach = _reachability(adj) if adj.any() else adj
    if np.diag(reach).any():
        raise CycleError(_smallest_cycle(adj, reach))
    return StrictOrder(reach)


def transitive_closure(dag):
    """Closure of a Hasse DAG; closure(reduction(P)) round-trips to P."""
    return closure_from_edges(dag.n, dag.covers)


def transitive_reduction(order):
    """Cover edges of a strict order: a < b with no z strictly between."""
    m = order.matrix
    two_step = _bool_matmul(m, m)
    covers = m & ~two_step
    return HasseDag(order.n, [(int(a), int(b)) for a, b in np.argwhere(covers)])


@dataclass(frozen=True)
class LevelAssignment:
    levels: tuple  # 1-based level per point
    height: int

    def level_sets(self):
        sets = [[] for _ in range(self.height)]
        for point, lev in enumerate(self.levels):
            sets[lev - 1].append(point)
        return sets


def compute_levels(order):
    """Assign levels by iteratively peeling minimal points.

    The height equals the maximum chain cardinality (Mirsky).
    """
    m = order.matrix
    n = order.n
    levels = np.zeros(n, dtype=int)
    remaining = np.ones(n, dtype=bool)
    level = 0
    while remaining.any():
        level += 1
        has_pred = (m & remaining[:, None] & remaining[None, :]).any(axis=0)
        minimal = remaining & ~has_pred
        levels[minimal] = level
        remaining &= ~minimal
    return LevelAssignment(tuple(int(v) for v in levels), level)


def mirsky_partition(order):
    """Height plus an antichain partition of that minimum size (level sets)."""
    assignment = compute_levels(order)
    return assignment.height, assignment.level_sets()


@dataclass(frozen=True)
class KPartition:
    k: int
    assignment: tuple  # layer in 1..k per point

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("layer count must be at least 1")
        present = set(self.assignment)
        if not present <= set(range(1, self.k + 1)):
            raise ValueError(f"layer labels must lie in 1..{self.k}")
        if present != set(range(1, self.k + 1)):
            raise ValueError("every layer must be non-empty")

    def layer_sizes(self):
        sizes = [0] * self.k
        for lev in self.assignment:
            sizes[lev - 1] += 1
        return sizes


@dataclass(frozen=True)
class KPartitionReport:
    valid: bool
    condition1_violations: tuple  # comparable pair not ascending in layers
    condition2_violations: tuple  # skip-layer pair left incomparable
    n_condition1: int
    n_condition2: int


_REPORT_CAP = 50


def validate_kpartition(order, part):
    """Check the two layered-model conditions and report violating pairs.

    Condition 1: x < y forces layer(x) < layer(y).
    Condition 2: layer(y) - layer(x) >= 2 forces x < y.
    """
    if len(part.assignment) != order.n:
        raise ValueError("partition assignment length differs from point count")
    layer = np.array(part.assignment)
    m = order.matrix
    c1 = m & (layer[:, None] >= layer[None, :])
    c2 = ((layer[None, :] - layer[:, None]) >= 2) & ~m
    n1, n2 = int(c1.sum()), int(c2.sum())
    pairs1 = tuple((int(a), int(b)) for a, b in np.argwhere(c1)[:_REPORT_CAP])
    pairs2 = tuple((int(a), int(b)) for a, b in np.argwhere(c2)[:_REPORT_CAP])
    return KPartitionReport(n1 == 0 and n2 == 0, pairs1, pairs2, n1, n2)
