"""Exact reference implementations of the agreement coefficients.

Written straight from the textbook definitions with ``fractions.Fraction``
and plain loops, sharing no code with the package. ``None`` marks an
undefined coefficient; ``None`` inside ratings marks a missing cell.
"""

from fractions import Fraction
from itertools import combinations_with_replacement, permutations


def cohen(r1, r2):
    pairs = [(a, b) for a, b in zip(r1, r2) if a is not None and b is not None]
    n = len(pairs)
    cats = sorted({a for a, _ in pairs} | {b for _, b in pairs})
    p_o = Fraction(sum(a == b for a, b in pairs), n)
    p_e = sum(Fraction(sum(a == c for a, _ in pairs), n) * Fraction(sum(b == c for _, b in pairs), n) for c in cats)
    if p_e == 1:
        return None
    return (p_o - p_e) / (1 - p_e)


def weight(scheme, i, j):
    if scheme == "identity":
        return int(i != j)
    if scheme == "linear":
        return abs(i - j)
    return (i - j) ** 2


def weighted(r1, r2, scheme, categories):
    pairs = [(a, b) for a, b in zip(r1, r2) if a is not None and b is not None]
    n = len(pairs)
    num = den = Fraction(0)
    for i in categories:
        row = sum(a == i for a, _ in pairs)
        for j in categories:
            col = sum(b == j for _, b in pairs)
            o = sum(a == i and b == j for a, b in pairs)
            e = Fraction(row * col, n)
            num += weight(scheme, i, j) * o
            den += weight(scheme, i, j) * e
    if den == 0:
        return None
    return 1 - num / den


def fleiss(rows):
    rows = [r for r in rows if all(v is not None for v in r)]
    N, n = len(rows), len(rows[0])
    cats = sorted({v for r in rows for v in r})
    P = [Fraction(sum(r.count(c) * (r.count(c) - 1) for c in cats), n * (n - 1)) for r in rows]
    p_bar = sum(P) / N
    p_e = sum(Fraction(sum(r.count(c) for r in rows), N * n) ** 2 for c in cats)
    if p_e == 1:
        return None
    return (p_bar - p_e) / (1 - p_e)


def _delta(metric, a, b, freq):
    if metric == "nominal":
        return int(a != b)
    if metric == "interval":
        return (a - b) ** 2
    lo, hi = min(a, b), max(a, b)
    span = sum(f for v, f in freq.items() if lo <= v <= hi)
    return (span - Fraction(freq[a] + freq[b], 2)) ** 2


def alpha(rows, metric="nominal"):
    """Pairwise form: D_o over within-unit value pairs, D_e over all pairs."""
    units = [[v for v in r if v is not None] for r in rows]
    units = [u for u in units if len(u) >= 2]
    pooled = [v for u in units for v in u]
    n = len(pooled)
    freq = {v: pooled.count(v) for v in set(pooled)}
    d_o = Fraction(0)
    for u in units:
        within = sum(_delta(metric, u[i], u[j], freq) for i in range(len(u)) for j in range(len(u)) if i != j)
        d_o += Fraction(within, len(u) - 1)
    d_o /= n
    d_e = Fraction(sum(_delta(metric, pooled[i], pooled[j], freq)
                       for i in range(n) for j in range(n) if i != j), n * (n - 1))
    if d_e == 0:
        return None
    return 1 - d_o / d_e


def tables(row_choices, max_items):
    """Every multiset of 1..max_items rows drawn from ``row_choices``."""
    for size in range(1, max_items + 1):
        yield from combinations_with_replacement(row_choices, size)


def value_multisets(categories, size):
    return list(combinations_with_replacement(categories, size))


def distinct_orderings(row):
    return sorted(set(permutations(row)))
