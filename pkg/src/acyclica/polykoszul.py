"""Polynomial-ring side: graded free complexes over k[x_b : b in B].

Complexes of graded free modules are stored generator-wise with polynomial
matrices and realised slice by slice as :class:`BigradedComplex` objects.
Gradings: deg x_b = 1, a generator's shift is its internal degree, so all
differentials have internal degree 0.  The Koszul term K_n sits at
cohomological position -n with generators in degree n; its R-dual sits at
position n with generators in degree -n.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Mapping, Sequence

from ._basis import add_exp, insert_sign, monomials, subsets
from .exactla import DEFAULT_FIELD, Field, QuotientSpace, SparseMatrix
from .gradedcomplex import (
    BigradedComplex,
    ChainMap,
    CohomologyTable,
    InhomogeneousError,
    Window,
    build_complex,
    cohomology,
)

Poly = Mapping[tuple, object]  # exponent vector -> coefficient


@dataclass(frozen=True)
class VariableSet:
    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be distinct")

    @classmethod
    def standard(cls, m: int, prefix: str = "x") -> "VariableSet":
        return cls(tuple(f"{prefix}{i + 1}" for i in range(m)))

    @property
    def m(self) -> int:
        return len(self.names)

    def __len__(self):
        return len(self.names)


def poly_component_dim(B: VariableSet | int, t: int) -> int:
    m = B if isinstance(B, int) else B.m
    if t < 0:
        return 0
    if m == 0:
        return 1 if t == 0 else 0
    return comb(t + m - 1, t)


def monomial_basis(B: VariableSet | int, t: int) -> tuple[tuple[int, ...], ...]:
    m = B if isinstance(B, int) else B.m
    return monomials(m, t)


def _mono_label(names, u):
    return tuple((names[i], e) for i, e in enumerate(u) if e)


def _poly_degree(p: Poly) -> int | None:
    degs = {sum(e) for e, c in p.items() if c != 0}
    if len(degs) > 1:
        raise InhomogeneousError(f"polynomial {dict(p)} is not homogeneous")
    return degs.pop() if degs else None


@dataclass(frozen=True)
class FreeComplex:
    """Complex of graded free R_B-modules.

    ``gens[n]`` lists (label, degree) for the generators at position n;
    ``diffs[n]`` maps (target index, source index) to a polynomial for the
    differential from position n to n + 1.
    """

    variables: VariableSet
    gens: Mapping[int, tuple]
    diffs: Mapping[int, Mapping[tuple[int, int], Poly]]

    def positions(self):
        return sorted(n for n, g in self.gens.items() if g)

    def check_homogeneous(self):
        for n, block in self.diffs.items():
            for (j, i), p in block.items():
                d = _poly_degree(p)
                if d is not None and d != self.gens[n][i][1] - self.gens[n + 1][j][1]:
                    raise InhomogeneousError(f"entry ({j}, {i}) at position {n} has the wrong degree")

    def realize(self, window: Window, field: Field = DEFAULT_FIELD) -> BigradedComplex:
        names = self.variables.names
        m = self.variables.m
        basis: dict[tuple[int, int], list] = {}
        index: dict[tuple[int, int], dict] = {}
        for n in window.positions():
            for t in window.degrees():
                labs, idx = [], {}
                for gi, (glab, gdeg) in enumerate(self.gens.get(n, ())):
                    for u in monomials(m, t - gdeg):
                        idx[(gi, u)] = len(labs)
                        labs.append((glab, _mono_label(names, u)))
                if labs:
                    basis[(n, t)] = labs
                    index[(n, t)] = idx
        diffs = {}
        for n in window.positions():
            block = self.diffs.get(n)
            if not block or n + 1 > window.pos_hi:
                continue
            for t in window.degrees():
                src = index.get((n, t))
                tgt = index.get((n + 1, t))
                if not src or not tgt:
                    continue
                ents: dict[tuple[int, int], object] = {}
                for (gi, u), col in src.items():
                    for (j, i), p in block.items():
                        if i != gi:
                            continue
                        for e, c in p.items():
                            row = tgt.get((j, add_exp(u, e)))
                            if row is not None:
                                ents[(row, col)] = ents.get((row, col), 0) + c
                diffs[(n, t)] = SparseMatrix(len(basis[(n + 1, t)]), len(basis[(n, t)]), ents, field)
        ps = self.positions()
        degs = [g[1] for n in ps for g in self.gens[n]]
        support = (min(ps), max(ps), min(degs), None) if ps else (0, 0, 0, 0)
        return build_complex(basis, diffs, window, field, support=support)


def koszul_free_complex(B: VariableSet) -> FreeComplex:
    m = B.m
    gens = {-n: tuple((tuple(B.names[i] for i in s), n) for s in subsets(m, n)) for n in range(m + 1)}
    diffs = {}
    for n in range(1, m + 1):
        tgt_index = {s: j for j, s in enumerate(subsets(m, n - 1))}
        block = {}
        for i, s in enumerate(subsets(m, n)):
            for k, v in enumerate(s):
                e = tuple(1 if q == v else 0 for q in range(m))
                block[(tgt_index[s[:k] + s[k + 1:]], i)] = {e: -1 if k % 2 else 1}
        diffs[-n] = block
    return FreeComplex(B, gens, diffs)


def dual_koszul_free_complex(B: VariableSet) -> FreeComplex:
    """Hom_R(K^B, R): the transpose of the Koszul differential."""
    m = B.m
    gens = {n: tuple((("*",) + tuple(B.names[i] for i in s), -n) for s in subsets(m, n)) for n in range(m + 1)}
    diffs = {}
    for n in range(m):
        tgt_index = {s: j for j, s in enumerate(subsets(m, n + 1))}
        block = {}
        for i, s in enumerate(subsets(m, n)):
            for v in range(m):
                if v in s:
                    continue
                e = tuple(1 if q == v else 0 for q in range(m))
                big = tuple(sorted(s + (v,)))
                block[(tgt_index[big], i)] = {e: insert_sign(s, v)}
        diffs[n] = block
    return FreeComplex(B, gens, diffs)


def default_window(B: VariableSet | int, max_degree: int, dual: bool = False) -> Window:
    m = B if isinstance(B, int) else B.m
    if dual:
        return Window(0, m, -m, max_degree)
    return Window(-m, 0, 0, max_degree)


def koszul_complex(B: VariableSet, window: Window | None = None, field: Field = DEFAULT_FIELD,
                   max_degree: int = 6) -> BigradedComplex:
    """K^B(R) realised slicewise; K_n at position -n."""
    return koszul_free_complex(B).realize(window or default_window(B, max_degree), field)


def dual_koszul_complex(B: VariableSet, window: Window | None = None, field: Field = DEFAULT_FIELD,
                        max_degree: int = 6) -> BigradedComplex:
    """Hom_R(K^B(R), R) realised slicewise; the n-subset generators sit at position n."""
    return dual_koszul_free_complex(B).realize(window or default_window(B, max_degree, dual=True), field)


def graded_ext_k_R(B: VariableSet, window: Window | None = None, field: Field = DEFAULT_FIELD,
                   max_degree: int = 6) -> CohomologyTable:
    """Graded Ext^*(k, R) as the cohomology of the dual Koszul complex."""
    return cohomology(dual_koszul_complex(B, window, field, max_degree))


def koszul_inclusion(small: VariableSet, big: VariableSet, window: Window, field: Field = DEFAULT_FIELD) -> ChainMap:
    """The map K^{B'} -> K^{B''} of the direct system, for B' a subset of B''."""
    if not set(small.names) <= set(big.names):
        raise ValueError("variable sets are not nested")
    # realise K^{B'} with the big variable order so labels agree
    ordered = VariableSet(tuple(n for n in big.names if n in small.names))
    return ChainMap.from_labels(koszul_complex(ordered, window, field), koszul_complex(big, window, field))


# ---------------------------------------------------------------------------
# tensor products over R


def tensor_free(x: FreeComplex, y: FreeComplex) -> FreeComplex:
    """x (x)_R y with the Koszul sign rule; generators are pairs."""
    if x.variables != y.variables:
        raise ValueError("free complexes over different rings")
    gens: dict[int, list] = {}
    index: dict[tuple, tuple[int, int]] = {}
    for p in x.positions():
        for q in y.positions():
            for i, (gl, gd) in enumerate(x.gens[p]):
                for j, (hl, hd) in enumerate(y.gens[q]):
                    lst = gens.setdefault(p + q, [])
                    index[(p, i, q, j)] = (p + q, len(lst))
                    lst.append(((gl, hl), gd + hd))
    diffs: dict[int, dict] = {}
    for (p, i, q, j), (n, src) in index.items():
        for (a, b), poly in x.diffs.get(p, {}).items():
            if b == i:
                _, tgt = index[(p + 1, a, q, j)]
                _acc(diffs.setdefault(n, {}), (tgt, src), poly, 1)
        sign = -1 if p % 2 else 1
        for (a, b), poly in y.diffs.get(q, {}).items():
            if b == j:
                _, tgt = index[(p, i, q + 1, a)]
                _acc(diffs.setdefault(n, {}), (tgt, src), poly, sign)
    return FreeComplex(x.variables, {n: tuple(g) for n, g in gens.items()}, diffs)


def _acc(block, key, poly, sign):
    cur = dict(block.get(key, {}))
    for e, c in poly.items():
        cur[e] = cur.get(e, 0) + sign * c
    block[key] = {e: c for e, c in cur.items() if c != 0}


# ---------------------------------------------------------------------------
# finitely presented graded modules


@dataclass(frozen=True)
class FPGradedModule:
    """Cokernel of a homogeneous map of graded free modules F1 -> F0.

    ``generators``: (label, degree) of F0.  ``relations``: list of
    (degree, {generator index: polynomial}) -- one column of the
    presentation matrix each.
    """

    variables: VariableSet
    generators: tuple
    relations: tuple = ()

    def __post_init__(self):
        for deg, col in self.relations:
            for g, p in col.items():
                d = _poly_degree(p)
                if d is not None and d != deg - self.generators[g][1]:
                    raise InhomogeneousError(f"relation of degree {deg} has an entry of degree {d} on generator {g}")

    @classmethod
    def free(cls, B: VariableSet, degree: int = 0) -> "FPGradedModule":
        return cls(B, (("e", degree),))

    @classmethod
    def quotient_by_variables(cls, B: VariableSet, which: Sequence[int]) -> "FPGradedModule":
        """R / (x_i : i in which)."""
        rels = tuple((1, {0: {tuple(1 if q == i else 0 for q in range(B.m)): 1}}) for i in which)
        return cls(B, (("e", 0),), rels)

    def _free_basis(self, s: int):
        m = self.variables.m
        return [(g, u) for g, (_, d) in enumerate(self.generators) for u in monomials(m, s - d)]

    def component(self, s: int, field: Field) -> tuple[list, dict, QuotientSpace]:
        cache = self.__dict__.setdefault("_cache", {})
        key = (s, field)
        if key not in cache:
            basis = self._free_basis(s)
            idx = {b: i for i, b in enumerate(basis)}
            cols = []
            m = self.variables.m
            for deg, col in self.relations:
                for v in monomials(m, s - deg):
                    vec = {}
                    for g, p in col.items():
                        for e, c in p.items():
                            k = idx[(g, add_exp(v, e))]
                            vec[k] = vec.get(k, 0) + c
                    cols.append(vec)
            span = SparseMatrix(len(basis), len(cols), {(r, c): v for c, vec in enumerate(cols) for r, v in vec.items()},
                                field)
            cache[key] = (basis, idx, QuotientSpace(len(basis), span, field))
        return cache[key]

    def dim(self, s: int, field: Field = DEFAULT_FIELD) -> int:
        return self.component(s, field)[2].dim

    def multiply(self, poly: Poly, s: int, field: Field) -> SparseMatrix:
        """Multiplication by a homogeneous polynomial, M_s -> M_{s + deg}."""
        d = _poly_degree(poly)
        if d is None:
            return SparseMatrix.zero(0, self.dim(s, field), field)  # caller reshapes zero maps
        sb, _, sq = self.component(s, field)
        _, tidx, tq = self.component(s + d, field)
        ents = {}
        for col, j in enumerate(sq.basis):
            g, u = sb[j]
            vec = {}
            for e, c in poly.items():
                k = tidx[(g, add_exp(u, e))]
                vec[k] = vec.get(k, 0) + field.coerce(c)
            for r, v in tq.reduce(vec).items():
                ents[(r, col)] = v
        return SparseMatrix(tq.dim, sq.dim, ents, field)

    # JSON presentation ---------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "variables": list(self.variables.names),
            "generators": [{"label": l, "degree": d} for l, d in self.generators],
            "relations": [
                {"degree": deg,
                 "entries": [{"generator": g,
                              "poly": [{"exponent": list(e), "coeff": str(Fraction(c))} for e, c in sorted(p.items())]}
                             for g, p in sorted(col.items())]}
                for deg, col in self.relations
            ],
        }

    @classmethod
    def from_json_obj(cls, obj) -> "FPGradedModule":
        B = VariableSet(tuple(obj["variables"]))
        gens = tuple((g["label"], g["degree"]) for g in obj["generators"])
        rels = tuple(
            (r["degree"], {e["generator"]: {tuple(t["exponent"]): Fraction(t["coeff"]) for t in e["poly"]}
                           for e in r["entries"]})
            for r in obj.get("relations", [])
        )
        return cls(B, gens, rels)

    @classmethod
    def loads(cls, s: str) -> "FPGradedModule":
        return cls.from_json_obj(json.loads(s))


def tensor_fp_module(M: FPGradedModule, X: FreeComplex, window: Window, field: Field = DEFAULT_FIELD) -> BigradedComplex:
    """M (x)_R X realised slicewise; the slice of M (x) R(-d) in degree t is M_{t-d}."""
    if M.variables != X.variables:
        raise ValueError("module and complex over different rings")
    X.check_homogeneous()
    terms: dict[tuple[int, int], list] = {}
    offsets: dict[tuple[int, int], dict[int, int]] = {}
    for n in window.positions():
        for t in window.degrees():
            labs, off = [], {}
            for gi, (glab, gdeg) in enumerate(X.gens.get(n, ())):
                off[gi] = len(labs)
                labs.extend((glab, k) for k in range(M.dim(t - gdeg, field)))
            if labs:
                terms[(n, t)] = labs
                offsets[(n, t)] = off
    diffs = {}
    for n in window.positions():
        block = X.diffs.get(n)
        if not block or n + 1 > window.pos_hi:
            continue
        for t in window.degrees():
            if (n, t) not in terms or (n + 1, t) not in terms:
                continue
            ents: dict = {}
            for (j, i), p in block.items():
                s = t - X.gens[n][i][1]
                if M.dim(s, field) == 0 or not p:
                    continue
                mm = M.multiply(p, s, field)
                r0 = offsets[(n + 1, t)][j]
                c0 = offsets[(n, t)][i]
                for r, c, v in mm.entries:
                    ents[(r0 + r, c0 + c)] = ents.get((r0 + r, c0 + c), 0) + v
            diffs[(n, t)] = SparseMatrix(len(terms[(n + 1, t)]), len(terms[(n, t)]), ents, field)
    ps = X.positions()
    support = (min(ps), max(ps), None, None) if ps else (0, 0, 0, 0)
    lo = min(g[1] for n in ps for g in X.gens[n]) + min(g[1] for g in M.generators) if ps and M.generators else None
    support = (support[0], support[1], lo, None)
    return build_complex(terms, diffs, window, field, support=support)


def free_resolution_of_variable_quotient(B: VariableSet, i: int) -> FreeComplex:
    """G: R(-1) --x_i--> R, positions -1 and 0; resolves R/(x_i)."""
    e = tuple(1 if q == i else 0 for q in range(B.m))
    return FreeComplex(B, {-1: (("g1", 1),), 0: (("g0", 0),)}, {-1: {(0, 0): {e: 1}}})


def free_module_complex(B: VariableSet, M: FPGradedModule | None = None) -> FreeComplex:
    """A free module R viewed as a one-term complex at position 0."""
    return FreeComplex(B, {0: (("e", 0),)}, {})
