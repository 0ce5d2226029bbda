"""Deterministic monomial and subset enumerations shared by the modules."""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int, support: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of total ``degree`` in ``nvars`` variables, graded-lex.

    With ``support`` only the first ``support`` variables may occur.
    Graded-lex here means x_1^d first: exponent tuples in decreasing
    lexicographic order.
    """
    if degree < 0:
        return ()
    k = nvars if support is None else support
    if k == 0:
        return ((0,) * nvars,) if degree == 0 else ()
    out = []

    def rec(i, left, acc):
        if i == k - 1:
            out.append(tuple(acc + [left]) + (0,) * (nvars - k))
            return
        for e in range(left, -1, -1):
            rec(i + 1, left - e, acc + [e])

    rec(0, degree, [])
    return tuple(out)


@lru_cache(maxsize=None)
def subsets(m: int, n: int) -> tuple[tuple[int, ...], ...]:
    """n-subsets of range(m) as sorted tuples, colex order."""
    if n < 0 or n > m:
        return ()
    return tuple(sorted(combinations(range(m), n), key=lambda s: tuple(reversed(s))))


def insert_sign(t: tuple[int, ...], i: int) -> int:
    """(-1)^(number of elements of t smaller than i)."""
    return -1 if sum(1 for s in t if s < i) % 2 else 1


def add_exp(u, v):
    return tuple(a + b for a, b in zip(u, v))
