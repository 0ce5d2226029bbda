"""The universal algebra S_uni = k<x_0, x_1, ...> / (x_n x_{n+1} = 0), truncated.

Relations are monomial, so a word either is a basis element (no factor
x_n x_{n+1}) or vanishes.  The complex studied is the one-generator free
module complex S -> S -> S -> ... with n-th differential right
multiplication by x_n.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .exactla import Field, GF, SparseMatrix, hstack, kernel_basis, rank
from .gradedcomplex import Window, build_complex, cohomology

F2 = GF(2)

Word = tuple  # generator indices, normal form


class RelationViolation(ValueError):
    def __init__(self, n):
        super().__init__(f"z_{n} z_{n + 1} != 0 in the target algebra")
        self.n = n


def is_normal(w) -> bool:
    return all(b != a + 1 for a, b in zip(w, w[1:]))


def normal_form(w) -> Word | None:
    """w itself if it avoids every factor x_n x_{n+1}; None (zero) otherwise."""
    w = tuple(w)
    return w if is_normal(w) else None


@lru_cache(maxsize=None)
def basis_words(N: int, length: int) -> tuple[Word, ...]:
    """Normal-form words of exact length over x_0..x_N, lexicographic."""
    if length == 0:
        return ((),)
    out = []
    for w in basis_words(N, length - 1):
        for g in range(N + 1):
            if not w or g != w[-1] + 1:
                out.append(w + (g,))
    return tuple(out)


def count_basis_words(N: int, length: int) -> int:
    """Count by a transfer recursion on the last letter (independent of the enumeration)."""
    if length == 0:
        return 1
    ends = [1] * (N + 1)  # words of length 1 ending in g
    for _ in range(length - 1):
        tot = sum(ends)
        ends = [tot - (ends[g - 1] if g >= 1 else 0) for g in range(N + 1)]
    return sum(ends)


def brute_force_count(N: int, length: int) -> int:
    return sum(1 for w in product(range(N + 1), repeat=length) if is_normal(w))


@dataclass(frozen=True)
class TruncatedAlgebra:
    N: int
    L: int

    def basis(self, length: int | None = None):
        if length is None:
            return tuple(w for l in range(self.L + 1) for w in basis_words(self.N, l))
        return basis_words(self.N, length)

    def multiply(self, u: Word, v: Word) -> Word | None:
        if len(u) + len(v) > self.L:
            raise ValueError("product leaves the truncation")
        return normal_form(u + v)


def right_mult_operator(n: int, length: int, N: int, field: Field = F2) -> SparseMatrix:
    """Words of length ``length`` -> words of length + 1, w -> nf(w x_n)."""
    if not 0 <= n <= N:
        raise ValueError(f"generator x_{n} outside x_0..x_{N}")
    src = basis_words(N, length)
    tgt = {w: i for i, w in enumerate(basis_words(N, length + 1))}
    ents = []
    for j, w in enumerate(src):
        v = normal_form(w + (n,))
        if v is not None:
            ents.append((tgt[v], j, 1))
    return SparseMatrix(len(tgt), len(src), ents, field)


def kernel_oracle(n: int, length: int, N: int) -> tuple[Word, ...]:
    """Words w of the given length with w x_n = 0: exactly those ending in x_{n-1}."""
    return tuple(w for w in basis_words(N, length) if w and w[-1] == n - 1)


def _contained(small: SparseMatrix, big: SparseMatrix) -> bool:
    if not small.cols:
        return True
    return rank(hstack([big, small])) == rank(big)


def verify_exactness(N: int, L: int, field: Field = F2) -> dict:
    """Exactness of the complex at every complete length.

    At length l the check for ker(. x_{n+1}) = im(. x_n) uses words of
    length l (source of x_{n+1}) and l - 1 (source of x_n); the top length
    L is flagged since its products leave the truncation.
    """
    rows = []
    ok = True
    for l in range(L):
        m0 = right_mult_operator(0, l, N, field)
        k0 = m0.cols - rank(m0)
        rows.append({"n": -1, "length": l, "kernel_x0": k0, "pass": k0 == 0})
        ok &= k0 == 0
    for n in range(N):
        for l in range(1, L):
            a = right_mult_operator(n + 1, l, N, field)  # length l -> l+1
            b = right_mult_operator(n, l - 1, N, field)  # length l-1 -> l
            ker = kernel_basis(a)
            kdim = ker.cols
            idim = rank(b)
            contained = (a @ b).is_zero() and _contained(b, ker)
            oracle = kernel_oracle(n + 1, l, N)
            words = basis_words(N, l)
            oracle_cols = SparseMatrix(len(words), len(oracle),
                                       [(words.index(w), j, 1) for j, w in enumerate(oracle)], field)
            oracle_ok = len(oracle) == kdim and _contained(oracle_cols, ker)
            good = kdim == idim and contained and oracle_ok
            ok &= good
            rows.append({"n": n, "length": l, "kernel_dim": kdim, "image_dim": idim, "contained": contained,
                         "oracle_agrees": oracle_ok, "pass": good})
    return {"N": N, "L": L, "field": field.name, "rows": rows, "flagged_lengths": [L], "pass": bool(ok)}


def augmentation_certificate(N: int, field: Field = F2) -> dict:
    """k (x)_S the complex: every x_n acts by zero, one-dimensional terms."""
    terms = {(n, 0): 1 for n in range(N + 2)}
    # the augmentation sends x_n to 0, so each differential k -> k is 0
    diffs = {(n, 0): SparseMatrix(1, 1, [(0, 0, augmentation_value((n,)))], field) for n in range(N + 1)}
    cx = build_complex(terms, diffs, Window(0, N + 1, 0, 0), field)
    H = cohomology(cx)
    functorial = all(
        augmentation_value(w + (n,)) == 0
        for n in range(N + 1) for l in range(2) for w in basis_words(N, l)
    )
    zero_diff = all(cx.d(n, 0).is_zero() for n in range(N + 1))
    dims = {n: H.get(n, 0) for n in range(N + 2)}
    return {"N": N, "zero_differential": zero_diff, "cohomology": {str(n): d for n, d in dims.items()},
            "functorial": functorial, "nonacyclic_everywhere": all(d == 1 for d in dims.values()),
            "pass": zero_diff and functorial and all(d == 1 for d in dims.values())}


def augmentation_value(w: Word) -> int:
    """The augmentation S_uni -> k: 1 on the empty word, 0 on every other word."""
    return 1 if len(w) == 0 else 0


def specialize(z, target) -> dict:
    """The homomorphism S_uni -> target sending x_n to z[n], and the induced complex.

    ``target`` is a FinAlgebraRep; ``z`` a list of coordinate vectors.
    The complex has terms target at positions 0..len(z) and differentials
    right multiplication by z_n.
    """
    f = target.field
    zero = tuple(f.coerce(0) for _ in range(target.dim))
    for n in range(len(z) - 1):
        if target.mul(z[n], z[n + 1]) != zero:
            raise RelationViolation(n)
    terms = {(n, 0): target.dim for n in range(len(z) + 1)}
    diffs = {}
    for n, zn in enumerate(z):
        cols = [target.mul(target.basis_vector(j), zn) for j in range(target.dim)]
        diffs[(n, 0)] = SparseMatrix(target.dim, target.dim,
                                     [(i, j, v) for j, c in enumerate(cols) for i, v in enumerate(c) if v], f)
    cx = build_complex(terms, diffs, Window(0, len(z), 0, 0), f)
    return {"images": {f"x{n}": list(v) for n, v in enumerate(z)}, "complex": cx}
