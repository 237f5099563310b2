"""Discrete Bayesian networks: exact joints, edge interventions, sampling.

Storage conventions (also the JSON file format):
  * nodes are listed in topological order, so every parent index is smaller
    than its child's index;
  * each node's parents are listed in ascending node order;
  * CPT rows run over parent configurations in row-major (C) order, earlier
    parents most significant; each row is a distribution over the node's
    values.

An edge intervention severs a set S of edges. Each severed parent feeds its
child an independent copy drawn from the parent's pre-intervention marginal,
so the child's CPT is averaged over the severed parents under the product of
those marginals. Marginals are snapshotted from the joint before any edge is
cut.
"""

from __future__ import annotations

import numpy as np

from .orders import KPartition

__all__ = [
    "StateSpaceError",
    "DiscreteNet",
    "JointTable",
    "joint",
    "marginal",
    "node_marginal",
    "intervene",
    "targets",
    "sample",
    "parse_edges",
    "format_edges",
    "random_net",
    "random_layered_net",
]

DEFAULT_STATE_CAP = 2**24


class StateSpaceError(ValueError):
    """The exact joint would exceed the configured state-space cap."""


class DiscreteNet:
    __slots__ = ("names", "cards", "parents", "cpts")

    def __init__(self, names, cards, parents, cpts):
        names = tuple(str(s) for s in names)
        if len(set(names)) != len(names):
            raise ValueError("node names must be unique")
        cards = tuple(int(c) for c in cards)
        if any(c < 1 for c in cards):
            raise ValueError("cardinalities must be positive")
        n = len(names)
        if not (len(cards) == len(parents) == len(cpts) == n):
            raise ValueError("names, cards, parents and cpts must have equal length")
        clean_parents = []
        clean_cpts = []
        for i in range(n):
            pa = tuple(int(p) for p in parents[i])
            if list(pa) != sorted(set(pa)):
                raise ValueError(f"parents of {names[i]} must be distinct and in index order")
            if any(p < 0 or p >= i for p in pa):
                raise ValueError(
                    f"parents of {names[i]} must precede it; list nodes in topological order"
                )
            cfgs = int(np.prod([cards[p] for p in pa], dtype=np.int64)) if pa else 1
            cpt = np.array(cpts[i], dtype=np.float64)
            if cpt.shape != (cfgs, cards[i]):
                raise ValueError(
                    f"CPT of {names[i]} must have shape ({cfgs}, {cards[i]}), got {cpt.shape}"
                )
            if (cpt < -1e-12).any():
                raise ValueError(f"CPT of {names[i]} has negative entries")
            cpt = np.clip(cpt, 0.0, None)
            sums = cpt.sum(axis=1)
            if np.abs(sums - 1.0).max() > 1e-12:
                raise ValueError(f"CPT rows of {names[i]} must each sum to 1")
            cpt.setflags(write=False)
            clean_parents.append(pa)
            clean_cpts.append(cpt)
        self.names = names
        self.cards = cards
        self.parents = tuple(clean_parents)
        self.cpts = tuple(clean_cpts)

    @property
    def n(self):
        return len(self.names)

    @property
    def state_space(self):
        return int(np.prod(self.cards, dtype=np.int64))

    def node_index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise ValueError(f"unknown node {name!r}") from None

    def edges(self):
        return [(p, c) for c, pa in enumerate(self.parents) for p in pa]

    def __repr__(self):
        return f"DiscreteNet(nodes={self.names}, edges={len(self.edges())})"


class JointTable:
    """Exact distribution over an ordered variable scope, flattened C-order."""

    __slots__ = ("scope", "cards", "probs")

    def __init__(self, scope, cards, probs):
        self.scope = tuple(scope)
        self.cards = tuple(int(c) for c in cards)
        probs = np.array(probs, dtype=np.float64).ravel()
        if probs.size != int(np.prod(self.cards, dtype=np.int64)):
            raise ValueError("probability vector length must match the scope cards")
        if (probs < -1e-12).any():
            raise ValueError("probabilities must be non-negative")
        probs = np.clip(probs, 0.0, None)
        if abs(probs.sum() - 1.0) > 1e-10:
            raise ValueError("probabilities must sum to 1")
        probs.setflags(write=False)
        self.probs = probs

    def array(self):
        return self.probs.reshape(self.cards)

    def __repr__(self):
        return f"JointTable(scope={self.scope})"


def joint(net, cap=DEFAULT_STATE_CAP):
    """Exact product-form joint over all nodes."""
    size = net.state_space
    if size > cap:
        raise StateSpaceError(f"joint would hold {size} entries (cap {cap})")
    table = np.ones(net.cards, dtype=np.float64)
    for i, pa in enumerate(net.parents):
        member_axes = pa + (i,)
        shape = [1] * net.n
        for axis in member_axes:
            shape[axis] = net.cards[axis]
        table = table * net.cpts[i].reshape(shape)
    return JointTable(net.names, net.cards, table.ravel())


def marginal(table, keep):
    """Marginal over a subset of the scope (scope order preserved)."""
    keep = list(keep)
    missing = [v for v in keep if v not in table.scope]
    if missing:
        raise ValueError(f"unknown variable {missing[0]!r}")
    axes_keep = sorted(table.scope.index(v) for v in set(keep))
    drop = tuple(a for a in range(len(table.scope)) if a not in axes_keep)
    arr = table.array().sum(axis=drop) if drop else table.array()
    total = arr.sum()
    return JointTable(
        [table.scope[a] for a in axes_keep],
        [table.cards[a] for a in axes_keep],
        (arr / total).ravel(),
    )


def node_marginal(table, name):
    return marginal(table, [name]).probs


def targets(edges):
    """Target nodes of an intervention: children of the severed edges."""
    return sorted({c for _, c in edges})


def _validate_edges(net, edges):
    clean = set()
    for p, c in edges:
        p, c = int(p), int(c)
        if not (0 <= p < net.n and 0 <= c < net.n):
            raise ValueError(f"edge ({p + 1}, {c + 1}) out of range")
        if p not in net.parents[c]:
            raise ValueError(f"edge {net.names[p]} -> {net.names[c]} not in the network")
        clean.add((p, c))
    return frozenset(clean)


def intervene(net, edges, marginals=None, cap=DEFAULT_STATE_CAP):
    """Sever the edges in S, averaging each child's CPT over its cut parents.

    `marginals` takes a precomputed {node index: marginal vector} snapshot;
    by default it is read off the pre-intervention joint.
    """
    edges = _validate_edges(net, edges)
    if not edges:
        return net
    cut_parents = {p for p, _ in edges}
    if marginals is None:
        table = joint(net, cap=cap)
        marginals = {p: node_marginal(table, net.names[p]) for p in cut_parents}
    new_parents = list(net.parents)
    new_cpts = list(net.cpts)
    for child in targets(edges):
        pa = net.parents[child]
        severed = sorted(p for p, c in edges if c == child)
        kept = tuple(p for p in pa if p not in severed)
        arr = net.cpts[child].reshape(tuple(net.cards[p] for p in pa) + (net.cards[child],))
        for pos in sorted((pa.index(p) for p in severed), reverse=True):
            arr = np.tensordot(arr, marginals[pa[pos]], axes=(pos, 0))
        new_parents[child] = kept
        new_cpts[child] = arr.reshape(-1, net.cards[child])
    return DiscreteNet(net.names, net.cards, new_parents, new_cpts)


def sample(net, m, seed):
    """Forward ancestral sampling; deterministic for a given seed."""
    if m < 1:
        raise ValueError("sample count must be positive")
    rng = np.random.default_rng(seed)
    out = np.zeros((m, net.n), dtype=np.int64)
    for i, pa in enumerate(net.parents):
        if pa:
            cfg = np.ravel_multi_index(
                tuple(out[:, p] for p in pa), tuple(net.cards[p] for p in pa)
            )
            probs = net.cpts[i][cfg]
        else:
            probs = np.broadcast_to(net.cpts[i][0], (m, net.cards[i]))
        u = rng.random(m)
        out[:, i] = (probs.cumsum(axis=1) < u[:, None]).sum(axis=1)
    np.clip(out, 0, np.array(net.cards) - 1, out=out)
    return out


def parse_edges(text, names):
    """Parse "A->B,C->D" into index pairs using the model's node names."""
    index = {name: i for i, name in enumerate(names)}
    edges = set()
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if "->" not in token:
            raise ValueError(f"bad edge token {token!r}, expected PARENT->CHILD")
        left, right = (part.strip() for part in token.split("->", 1))
        if left not in index:
            raise ValueError(f"unknown node {left!r}")
        if right not in index:
            raise ValueError(f"unknown node {right!r}")
        edges.add((index[left], index[right]))
    return frozenset(edges)


def format_edges(edges, names):
    return ",".join(f"{names[p]}->{names[c]}" for p, c in sorted(edges))


def random_net(n, rng, card_choices=(2,), edge_prob=0.5):
    """Random net on n nodes with Dirichlet(1) CPT rows (test/simulation aid)."""
    names = [f"v{i + 1}" for i in range(n)]
    cards = [int(rng.choice(card_choices)) for _ in range(n)]
    parents, cpts = [], []
    for i in range(n):
        pa = tuple(p for p in range(i) if rng.random() < edge_prob)
        cfgs = int(np.prod([cards[p] for p in pa])) if pa else 1
        cpts.append(rng.dirichlet(np.ones(cards[i]), size=cfgs))
        parents.append(pa)
    return DiscreteNet(names, cards, parents, cpts)


def random_layered_net(layer_sizes, p_adjacent, card, seed):
    """Random layered net: adjacent-layer edges appear i.i.d. with density p.

    Returns the net plus its layer assignment.
    """
    sizes = [int(s) for s in layer_sizes]
    if any(s < 1 for s in sizes):
        raise ValueError("layer sizes must be positive")
    if not 0.0 <= p_adjacent <= 1.0:
        raise ValueError("adjacent-layer density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    n = sum(sizes)
    layers = []
    for lev, s in enumerate(sizes, start=1):
        layers.extend([lev] * s)
    names = [f"v{i + 1}" for i in range(n)]
    cards = [card] * n
    starts = np.cumsum([0] + sizes)
    parents, cpts = [], []
    for i in range(n):
        lev = layers[i]
        pa = []
        if lev > 1:
            lo, hi = starts[lev - 2], starts[lev - 1]
            pa = [p for p in range(lo, hi) if rng.random() < p_adjacent]
        cfgs = int(np.prod([cards[p] for p in pa])) if pa else 1
        cpts.append(rng.dirichlet(np.ones(card), size=cfgs))
        parents.append(tuple(pa))
    return DiscreteNet(names, cards, parents, cpts), KPartition(len(sizes), tuple(layers))
