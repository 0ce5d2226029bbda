"""Symmetric coalgebra C = Sym(W) side: (co)free complexes and their truncations.

A monomial u (exponent vector of length a) is a basis vector of Sym_|u|(W).
The dual algebra C* = k[[x_1..x_a]] acts on C by x_i u = u_i (u - e_i), which
is the contraction coming from the comultiplication C -> C (x) W with
multiplicity coefficients.  So x^alpha acts on C by the divided-free
derivative d^alpha; on Hom(C, V) it acts by precomposition with d^alpha.

A :class:`LabelledComplex` stores a complex whose terms are all C (x) V
("cofree") or all Hom(C, V) ("free"), with differentials written as
matrices over C* between the multiplicity spaces.  Gradings: deg W = 1,
so u (x) v has internal degree |u| + deg v and a map u* (x) v in Hom(C, V)
has internal degree deg v - |u|.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from math import comb, factorial
from typing import Mapping

from ._basis import insert_sign, monomials, subsets
from .exactla import DEFAULT_FIELD, Field, SparseMatrix
from .gradedcomplex import BigradedComplex, ChainMap, Window, build_complex, zero_differential_complex


class UnlabeledTermError(ValueError):
    pass


def sym_dim(a: int, n: int) -> int:
    if n < 0:
        return 0
    if a == 0:
        return int(n == 0)
    return comb(n + a - 1, n)


def ext_dim(a: int, n: int) -> int:
    return comb(a, n) if 0 <= n <= a else 0


def sym_basis(a: int, n: int):
    return monomials(a, n)


def ext_basis(a: int, n: int):
    return subsets(a, n)


def _unit(a, i):
    return tuple(1 if q == i else 0 for q in range(a))


def comult_component(a: int, j: int, field: Field = DEFAULT_FIELD) -> SparseMatrix:
    """Sym_j -> Sym_{j-1} (x) W, u -> sum_i u_i (u - e_i) (x) x_i.

    Rows are ordered (monomial of degree j-1, variable index).
    """
    src = sym_basis(a, j)
    tgt = sym_basis(a, j - 1)
    if j <= 0:
        return SparseMatrix.zero(len(tgt) * a, len(src), field)
    tidx = {u: k for k, u in enumerate(tgt)}
    ents = []
    for c, u in enumerate(src):
        for i in range(a):
            if u[i]:
                v = u[:i] + (u[i] - 1,) + u[i + 1:]
                ents.append((tidx[v] * a + i, c, u[i]))
    return SparseMatrix(len(tgt) * a, len(src), ents, field)


def wedge_component(a: int, n: int, field: Field = DEFAULT_FIELD) -> SparseMatrix:
    """W (x) L^n(W) -> L^{n+1}(W); columns ordered (variable index, subset)."""
    src = ext_basis(a, n)
    tgt = {s: k for k, s in enumerate(ext_basis(a, n + 1))}
    ents = []
    for i in range(a):
        for k, s in enumerate(src):
            if i in s:
                continue
            ents.append((tgt[tuple(sorted(s + (i,)))], i * len(src) + k, insert_sign(s, i)))
    return SparseMatrix(len(tgt), a * len(src), ents, field)


def wedge_by(a: int, n: int, i: int) -> dict[tuple[int, int], int]:
    """x_i ^ - : L^n -> L^{n+1} as {(row, col): sign}."""
    tgt = {s: k for k, s in enumerate(ext_basis(a, n + 1))}
    return {(tgt[tuple(sorted(s + (i,)))], k): insert_sign(s, i)
            for k, s in enumerate(ext_basis(a, n)) if i not in s}


def contract_by(a: int, n: int, i: int) -> dict[tuple[int, int], int]:
    """Transpose of x_i ^ - : L^{n+1}* -> L^n*."""
    return {(c, r): v for (r, c), v in wedge_by(a, n, i).items()}


def apply_derivative(u: tuple, alpha: tuple):
    """d^alpha u = (u! / (u - alpha)!) (u - alpha), or None."""
    coef = 1
    out = []
    for ui, ai in zip(u, alpha):
        if ai > ui:
            return None
        for k in range(ai):
            coef *= ui - k
        out.append(ui - ai)
    return coef, tuple(out)


def apply_derivative_transpose(u: tuple, alpha: tuple):
    """(d^alpha)^T u* = ((u + alpha)! / u!) (u + alpha)*."""
    coef = 1
    out = []
    for ui, ai in zip(u, alpha):
        for k in range(ai):
            coef *= ui + k + 1
        out.append(ui + ai)
    return coef, tuple(out)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Augmentation:
    """A one-dimensional trivial term k attached to a (co)free complex.

    ``direction`` "in": k at ``position`` maps to 1 (x) v_index at position + 1.
    ``direction`` "out": the evaluation at 1 from position - 1 onto k.
    """

    position: int
    degree: int
    vindex: int
    direction: str


@dataclass(frozen=True)
class LabelledComplex:
    """Complex of cofree comodules C (x) V or free contramodules Hom(C, V).

    ``spaces[n]`` lists (label, degree) for a basis of the multiplicity space
    at position n.  ``ops[n]`` maps (target index, source index) to a C*
    element {exponent vector: coefficient} for the differential n -> n + 1.
    ``support`` restricts C to the subcoalgebra Sym of the first ``support``
    basis vectors of W.
    """

    carrier: str
    a: int
    spaces: Mapping[int, tuple]
    ops: Mapping[int, Mapping[tuple[int, int], Mapping[tuple, object]]]
    support: int | None = None
    augmentation: Augmentation | None = None

    def __post_init__(self):
        if self.carrier not in ("cofree", "free"):
            raise ValueError(f"unknown carrier {self.carrier!r}")
        if self.support is not None and not 0 <= self.support <= self.a:
            raise ValueError("support larger than dim W")

    @property
    def m(self) -> int:
        return self.a if self.support is None else self.support

    def positions(self):
        return sorted(n for n, v in self.spaces.items() if v)

    def truncate(self) -> "LabelledComplex":
        """Drop the trivial augmentation term."""
        return replace(self, augmentation=None)

    def restrict(self, m: int) -> "LabelledComplex":
        if m > self.a:
            raise ValueError(f"m = {m} exceeds dim W = {self.a}")
        return replace(self, support=m)

    def dual(self) -> "LabelledComplex":
        """Termwise vector-space dual: C (x) V  <->  Hom(C, V*)."""
        spaces = {-n: tuple((_star(l), -d) for l, d in v) for n, v in self.spaces.items()}
        ops = {-n - 1: {(i, j): p for (j, i), p in block.items()} for n, block in self.ops.items()}
        aug = None
        if self.augmentation is not None:
            g = self.augmentation
            aug = Augmentation(-g.position, -g.degree, g.vindex, "out" if g.direction == "in" else "in")
        return LabelledComplex("free" if self.carrier == "cofree" else "cofree", self.a, spaces, ops,
                               self.support, aug)

    # realisations --------------------------------------------------------

    def _sym_degree(self, vdeg, t):
        return t - vdeg if self.carrier == "cofree" else vdeg - t

    def support_box(self):
        ps = self.positions()
        vd = [d for n in ps for _, d in self.spaces[n]]
        lo, hi = min(ps), max(ps)
        if self.augmentation is not None:
            lo = min(lo, self.augmentation.position)
            hi = max(hi, self.augmentation.position)
        if self.carrier == "cofree":
            return (lo, hi, min(vd + [0]), None)
        return (lo, hi, None, max(vd + [0]))

    def realize(self, window: Window, field: Field = DEFAULT_FIELD) -> BigradedComplex:
        """Slicewise realisation; basis at (n, t) is (v, u), v-major, u graded-lex."""
        a, m = self.a, self.m
        basis: dict = {}
        index: dict = {}
        for n in window.positions():
            for t in window.degrees():
                labs, idx = [], {}
                for vi, (vl, vd) in enumerate(self.spaces.get(n, ())):
                    for u in monomials(a, self._sym_degree(vd, t), m):
                        idx[(vi, u)] = len(labs)
                        labs.append((vl, u))
                if labs:
                    basis[(n, t)] = labs
                    index[(n, t)] = idx
        aug = self.augmentation
        if aug is not None and (aug.position, aug.degree) in window:
            basis[(aug.position, aug.degree)] = [("k",)]
            index[(aug.position, aug.degree)] = {("k",): 0}
        act = apply_derivative if self.carrier == "cofree" else apply_derivative_transpose
        diffs = {}
        for n in window.positions():
            if n + 1 > window.pos_hi:
                continue
            block = self.ops.get(n, {})
            for t in window.degrees():
                src, tgt = index.get((n, t)), index.get((n + 1, t))
                if not src or not tgt:
                    continue
                ents: dict = {}
                if aug is not None and aug.direction == "in" and (n, t) == (aug.position, aug.degree):
                    ents[(tgt[(aug.vindex, (0,) * a)], 0)] = 1
                elif aug is not None and aug.direction == "out" and (n + 1, t) == (aug.position, aug.degree):
                    ents[(0, src[(aug.vindex, (0,) * a)])] = 1
                else:
                    for (vi, u), col in src.items():
                        for (j, i), poly in block.items():
                            if i != vi:
                                continue
                            for alpha, c in poly.items():
                                r = act(u, alpha)
                                if r is None:
                                    continue
                                k, w = r
                                row = tgt.get((j, w))
                                if row is not None:
                                    ents[(row, col)] = ents.get((row, col), 0) + k * c
                diffs[(n, t)] = SparseMatrix(len(basis[(n + 1, t)]), len(basis[(n, t)]), ents, field)
        return build_complex(basis, diffs, window, field, support=self.support_box())

    def default_window(self, degree_span: int = 4) -> Window:
        """Positions of the support; internal degrees around the multiplicity degrees."""
        lo, hi, dlo, dhi = self.support_box()
        if self.carrier == "cofree":
            return Window(lo, hi, dlo, dlo + degree_span + 2 * self.a)
        return Window(lo, hi, dhi - degree_span - 2 * self.a, dhi)

    def realize_truncated(self, d: int, field: Field = DEFAULT_FIELD):
        """Ungraded realisation over C_{<=d} with the C* action.

        Returns (complex, actions) where the complex lives in internal degree 0
        and ``actions[i]`` maps each bidegree to the matrix of x_i.
        """
        if self.augmentation is not None:
            raise UnlabeledTermError("truncated realisation needs every term (co)free")
        a, m = self.a, self.m
        us = [u for s in range(d + 1) for u in monomials(a, s, m)]
        uidx = {u: k for k, u in enumerate(us)}
        ps = self.positions()
        terms = {(n, 0): [(vl, u) for vl, _ in self.spaces[n] for u in us] for n in ps}
        nu = len(us)
        act = apply_derivative if self.carrier == "cofree" else apply_derivative_transpose

        def op_matrix(nv_src, nv_tgt, pairs):
            ents: dict = {}
            for (j, i), p in pairs:
                for alpha, c in p.items():
                    for col_u, u in enumerate(us):
                        r = act(u, alpha)
                        if r is None or r[1] not in uidx:
                            continue
                        key = (j * nu + uidx[r[1]], i * nu + col_u)
                        ents[key] = ents.get(key, 0) + r[0] * c
            return SparseMatrix(nv_tgt * nu, nv_src * nu, ents, field)

        diffs = {}
        for n in ps:
            if n + 1 in self.spaces and self.ops.get(n):
                diffs[(n, 0)] = op_matrix(len(self.spaces[n]), len(self.spaces[n + 1]),
                                          self.ops[n].items())
        window = Window(min(ps), max(ps), 0, 0)
        cx = build_complex(terms, diffs, window, field)
        actions = []
        for i in range(a):
            e = {_unit(a, i): 1}
            actions.append({(n, 0): op_matrix(len(self.spaces[n]), len(self.spaces[n]),
                                              [((k, k), e) for k in range(len(self.spaces[n]))])
                            for n in ps})
        return cx, actions

    # JSON ------------------------------------------------------------------

    def to_json_obj(self, window: Window | None = None, field: Field = DEFAULT_FIELD) -> dict:
        obj = self.realize(window or self.default_window(), field).to_json_obj()
        obj["carrier"] = {
            str(n): {"carrier": self.carrier, "multiplicity_dims": _graded_dims(v)}
            for n, v in sorted(self.spaces.items())
        }
        return obj


def _graded_dims(space):
    out: dict[str, int] = {}
    for _, d in space:
        out[str(d)] = out.get(str(d), 0) + 1
    return out


def _star(label):
    if isinstance(label, tuple) and len(label) == 2 and label[0] == "*":
        return label[1]
    return ("*", label)


def co_contra(x: LabelledComplex, direction: str) -> LabelledComplex:
    """Psi: C (x) V -> Hom(C, V);  Phi: Hom(C, V) -> C (x) V.  Matrices kept."""
    if x.augmentation is not None:
        raise UnlabeledTermError("the trivial term k is neither cofree nor free")
    if direction in ("psi", "Psi", "Ψ"):
        if x.carrier != "cofree":
            raise UnlabeledTermError("Psi applies to cofree comodules")
        return replace(x, carrier="free")
    if direction in ("phi", "Phi", "Φ"):
        if x.carrier != "free":
            raise UnlabeledTermError("Phi applies to free contramodules")
        return replace(x, carrier="cofree")
    raise ValueError(f"unknown direction {direction!r}")


def exterior_spaces(a: int, dual: bool = False, sign: int = 1):
    """Multiplicity spaces L^n(W) (or L^n(W)*) placed at position sign * n."""
    out = {}
    for n in range(a + 1):
        if dual:
            out[sign * n] = tuple((("*", s), -n) for s in ext_basis(a, n))
        else:
            out[sign * n] = tuple((s, n) for s in ext_basis(a, n))
    return out


def comodule_coresolution_lc(a: int, augmented: bool = True) -> LabelledComplex:
    """0 -> k -> C -> C (x) W -> C (x) L^2(W) -> ..., d = sum_i x_i (x) (x_i ^ -)."""
    if a < 1:
        raise ValueError("a >= 1 required")
    ops = {}
    for n in range(a):
        block: dict = {}
        for i in range(a):
            for (r, c), s in wedge_by(a, n, i).items():
                block[(r, c)] = {_unit(a, i): s}
        ops[n] = block
    aug = Augmentation(-1, 0, 0, "in") if augmented else None
    return LabelledComplex("cofree", a, exterior_spaces(a), ops, None, aug)


def comodule_coresolution(a: int, window: Window | None = None, field: Field = DEFAULT_FIELD,
                          max_degree: int = 6) -> BigradedComplex:
    """Augmented coresolution of k; term n is C (x) L^n(W) in internal degree |u| + n."""
    lc = comodule_coresolution_lc(a)
    return lc.realize(window or Window(-1, a, 0, max_degree), field)


def contramodule_resolution_lc(a: int, augmented: bool = True) -> LabelledComplex:
    """The dual of the comodule coresolution, carriers switched to free."""
    return comodule_coresolution_lc(a, augmented).dual()


def contramodule_resolution(a: int, window: Window | None = None, field: Field = DEFAULT_FIELD,
                            max_degree: int = 6) -> BigradedComplex:
    lc = contramodule_resolution_lc(a)
    return lc.realize(window or Window(-a, 1, -max_degree, 0), field)


def acyclic_comodule_lc(a: int) -> LabelledComplex:
    """Phi of the truncated contramodule resolution: C (x) L^n(W)* at position -n."""
    return co_contra(contramodule_resolution_lc(a).truncate(), "phi")


def acyclic_contramodule_lc(a: int) -> LabelledComplex:
    """Psi of the truncated comodule coresolution: Hom(C, L^n(W)) at position n."""
    return co_contra(comodule_coresolution_lc(a).truncate(), "psi")


def acyclic_comodule_complex(a: int, window: Window | None = None, field: Field = DEFAULT_FIELD,
                             max_degree: int = 6) -> BigradedComplex:
    return acyclic_comodule_lc(a).realize(window or Window(-a, 0, -a, max_degree), field)


def acyclic_contramodule_complex(a: int, window: Window | None = None, field: Field = DEFAULT_FIELD,
                                 max_degree: int = 6) -> BigradedComplex:
    return acyclic_contramodule_lc(a).realize(window or Window(0, a, -max_degree, a), field)


def cotensor_subcomplex(x: LabelledComplex, m: int, window: Window, field: Field = DEFAULT_FIELD):
    """C_B [] (x): replace C by C_B, multiplicity spaces unchanged.

    Returns (subcomplex, inclusion chain map into the realisation of x).
    """
    if x.carrier != "cofree":
        raise UnlabeledTermError("cotensor subcomplex needs cofree comodules")
    if m > x.a:
        raise ValueError(f"m = {m} exceeds a = {x.a}")
    sub = x.restrict(m).realize(window, field)
    full = x.realize(window, field)
    return sub, ChainMap.from_labels(sub, full)


def cohom_quotient(x: LabelledComplex, m: int, window: Window, field: Field = DEFAULT_FIELD):
    """Cohom_C(C_B, x): replace Hom(C, V) by Hom(C_B, V).

    Returns (quotient complex, projection chain map from the realisation of x).
    """
    if x.carrier != "free":
        raise UnlabeledTermError("Cohom quotient needs free contramodules")
    if m > x.a:
        raise ValueError(f"m = {m} exceeds a = {x.a}")
    quo = x.restrict(m).realize(window, field)
    full = x.realize(window, field)
    return quo, ChainMap.from_labels(full, quo)


def exterior_zero_complex(k: int, offset: int = 0, dual: bool = False, field: Field = DEFAULT_FIELD,
                          window: Window | None = None) -> BigradedComplex:
    """Zero-differential L(U), dim U = k, basis indices shifted by ``offset``.

    L^q(U) sits at bidegree (q, q), or (-q, -q) for the dual.
    """
    sgn = -1 if dual else 1
    dims = {}
    for q in range(k + 1):
        labs = [tuple(i + offset for i in s) for s in ext_basis(k, q)]
        dims[(sgn * q, sgn * q)] = [("*", l) for l in labs] if dual else labs
    if window is None:
        window = Window(-k, 0, -k, 0) if dual else Window(0, k, 0, k)
    return zero_differential_complex(dims, field, window)


def factorial_weight(u) -> int:
    w = 1
    for e in u:
        w *= factorial(e)
    return w


def signed_match(x: BigradedComplex, y: BigradedComplex, relabel) -> bool:
    """Whether y equals x after the basis bijection ``relabel`` and a choice of signs.

    ``relabel(n, t, label_of_x)`` returns the corresponding y label.  Signs
    are solved for by propagation along nonzero entries.
    """
    if x.field != y.field or x.window != y.window:
        return False
    perm = {}
    for n, t in [(n, t) for n in x.positions() for t in x.degrees()]:
        if x.dim(n, t) != y.dim(n, t):
            return False
        if not x.dim(n, t):
            continue
        yi = {l: i for i, l in enumerate(y.labels(n, t))}
        try:
            perm[(n, t)] = [yi[relabel(n, t, l)] for l in x.labels(n, t)]
        except KeyError:
            return False
    f = x.field
    sign: dict = {}
    for t in x.degrees():
        # build constraint graph: nodes (n, index in x basis)
        edges: dict = {}
        for n in x.positions():
            if (n, t) not in perm or (n + 1, t) not in perm:
                continue
            dx = x.d(n, t)
            dy = y.d(n, t)
            px, qx = perm[(n, t)], perm[(n + 1, t)]
            if dx.nnz != dy.nnz:
                return False
            for r, c, v in dx.entries:
                w = dy.get(qx[r], px[c])
                if w == v:
                    s = 1
                elif w == f.coerce(-v):
                    s = -1
                else:
                    return False
                edges.setdefault((n, t, c), []).append(((n + 1, t, r), s))
                edges.setdefault((n + 1, t, r), []).append(((n, t, c), s))
        for start in edges:
            if start in sign:
                continue
            sign[start] = 1
            stack = [start]
            while stack:
                u = stack.pop()
                for v, s in edges[u]:
                    want = sign[u] * s
                    if v in sign:
                        if sign[v] != want:
                            return False
                    else:
                        sign[v] = want
                        stack.append(v)
    return True
