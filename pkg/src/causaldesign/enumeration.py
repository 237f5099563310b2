"""Exhaustive census of labeled strict orders at small n.

This is the ground-truth oracle behind the counting bounds and the finite-n
entropy curve. Orders are held as packed bit rows (bit j of rows[i] set iff
i < j), which keeps the extension search cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .orders import StrictOrder

__all__ = [
    "EXHAUSTIVE_MAX_N",
    "EnumCensus",
    "LowerBoundReport",
    "all_orders",
    "rows_to_order",
    "enumerate_orders",
    "enumerate_orders_by_filter",
    "check_lower_bound",
    "empirical_entropy_curve",
    "count_kpartite",
    "estimate_order_count",
]

EXHAUSTIVE_MAX_N = 6


@dataclass(frozen=True)
class EnumCensus:
    n: int
    total: int
    by_relations: dict  # comparable-pair count -> order count
    by_height: dict  # height -> order count


@dataclass(frozen=True)
class LowerBoundReport:
    n: int
    total: int
    bound: int  # 2 ** floor(n^2 / 4)
    bipartite_family: int  # 2 ** (floor(n/2) * ceil(n/2)), equal to bound
    holds: bool


def all_orders(n):
    """All labeled strict orders on n points as packed bit-row tuples.

    Extension by one point: a new maximal/minimal/mixed point is attached by
    choosing a down-set D of points below it and an up-set U above it with
    every element of D below every element of U.
    """
    if not 0 <= n <= EXHAUSTIVE_MAX_N:
        raise ValueError(
            f"exhaustive enumeration is capped at n={EXHAUSTIVE_MAX_N}; "
            "use estimate_order_count for a sampling estimate"
        )
    orders = [()]
    for k in range(n):
        grown = []
        for rows in orders:
            below = [0] * k
            for c in range(k):
                r = rows[c]
                while r:
                    low = r & -r
                    below[low.bit_length() - 1] |= 1 << c
                    r ^= low
            downs, ups = [], []
            for mask in range(1 << k):
                rest, down_ok, up_ok = mask, True, True
                while rest:
                    low = rest & -rest
                    v = low.bit_length() - 1
                    if below[v] & ~mask:
                        down_ok = False
                    if rows[v] & ~mask:
                        up_ok = False
                    if not (down_ok or up_ok):
                        break
                    rest ^= low
                if down_ok:
                    downs.append(mask)
                if up_ok:
                    ups.append(mask)
            for d_mask in downs:
                allowed = (1 << k) - 1
                rest = d_mask
                while rest:
                    low = rest & -rest
                    allowed &= rows[low.bit_length() - 1]
                    rest ^= low
                allowed &= ~d_mask
                new_bit = 1 << k
                base = tuple(
                    rows[i] | new_bit if d_mask >> i & 1 else rows[i] for i in range(k)
                )
                for u_mask in ups:
                    if u_mask & ~allowed:
                        continue
                    grown.append(base + (u_mask,))
        orders = grown
    return orders


def rows_to_order(rows):
    n = len(rows)
    m = np.zeros((n, n), dtype=bool)
    for i, r in enumerate(rows):
        while r:
            low = r & -r
            m[i, low.bit_length() - 1] = True
            r ^= low
    return StrictOrder(m)


def _peel_height(rows):
    remaining = (1 << len(rows)) - 1
    height = 0
    while remaining:
        height += 1
        preceded = 0
        rest = remaining
        while rest:
            low = rest & -rest
            preceded |= rows[low.bit_length() - 1]
            rest ^= low
        remaining &= preceded
    return height


def _census_from(orders, n):
    by_relations, by_height = {}, {}
    for rows in orders:
        m = sum(r.bit_count() for r in rows)
        by_relations[m] = by_relations.get(m, 0) + 1
        h = _peel_height(rows)
        by_height[h] = by_height.get(h, 0) + 1
    return EnumCensus(n, len(orders), dict(sorted(by_relations.items())), dict(sorted(by_height.items())))


def enumerate_orders(n):
    """Census of all labeled strict orders on n points (n <= 6)."""
    return _census_from(all_orders(n), n)


def enumerate_orders_by_filter(n):
    """Independent second strategy: filter every relation subset (n <= 4).

    Walks all 2^(n(n-1)) directed pair sets and keeps those that are
    antisymmetric and transitively closed.
    """
    if not 0 <= n <= 4:
        raise ValueError("filter enumeration is capped at n=4")
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    kept = []
    for code in range(1 << len(pairs)):
        rows = [0] * n
        for idx, (i, j) in enumerate(pairs):
            if code >> idx & 1:
                rows[i] |= 1 << j
        ok = True
        for i in range(n):
            if not ok:
                break
            r = rows[i]
            if r >> i & 1:
                ok = False
                break
            rest = r
            while rest:
                low = rest & -rest
                j = low.bit_length() - 1
                if rows[j] >> i & 1 or rows[j] & ~r:
                    ok = False
                    break
                rest ^= low
        if ok:
            kept.append(tuple(rows))
    return _census_from(kept, n)


def check_lower_bound(census):
    """total >= 2^(n^2/4), with the free bipartite family size for comparison."""
    n = census.n
    bound = 2 ** (n * n // 4)
    family = 2 ** ((n // 2) * ((n + 1) // 2))
    return LowerBoundReport(n, census.total, bound, family, census.total >= bound)


def empirical_entropy_curve(census):
    """Finite-n entropy curve: (m/n^2, log2(count at m)/n^2) per relation count m."""
    n2 = census.n**2
    if n2 == 0:
        return []
    return [(m / n2, math.log2(cnt) / n2) for m, cnt in sorted(census.by_relations.items())]


def count_kpartite(layer_sizes):
    """Exponent of 2 in the count of layered models with the given layer sizes.

    Only adjacent-layer relations are free, so the exponent is the sum of
    adjacent size products. Layer-assignment factors are lower order and
    ignored.
    """
    sizes = [int(s) for s in layer_sizes]
    if not sizes or any(s <= 0 for s in sizes):
        raise ValueError("layer sizes must be positive")
    return sum(a * b for a, b in zip(sizes, sizes[1:]))


@dataclass(frozen=True)
class OrderCountEstimate:
    n: int
    estimate: float
    hits: int
    trials: int
    space: int


def estimate_order_count(n, trials=100_000, seed=0):
    """Approximate count of strict orders by uniform sampling of relation sets.

    Clearly labeled approximate: the hit rate collapses quickly with n, so this
    is only a rough desk check beyond the exhaustive range.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    space = 2 ** len(pairs)
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        code = rng.integers(0, 2, size=len(pairs))
        rows = [0] * n
        for idx, (i, j) in enumerate(pairs):
            if code[idx]:
                rows[i] |= 1 << j
        ok = True
        for i in range(n):
            r = rows[i]
            rest = r
            while rest:
                low = rest & -rest
                j = low.bit_length() - 1
                if rows[j] >> i & 1 or rows[j] & ~r:
                    ok = False
                    break
                rest ^= low
            if not ok:
                break
        hits += ok
    return OrderCountEstimate(n, hits / trials * space, hits, trials, space)
