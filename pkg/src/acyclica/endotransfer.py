"""Endomorphism algebras and the Hom functors of the Dress lemma, at desk scale.

Objects are finite-dimensional modules given by action matrices (one per
generator of the acting algebra).  add(M) membership is always witnessed by
an explicit splitting X -> M^r -> X; nothing here tries to recognise summands.

Conventions.  Endomorphisms compose as matrices: (f g)(v) = f(g(v)).
For the covariant functor Hom(M, -) the algebra S = End(M)^op acts on
Hom(M, X) by s . f = f o s; for the contravariant Hom(-, M) the algebra
End(M) acts by s . g = s o g.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

from .exactla import (
    DEFAULT_FIELD,
    Field,
    SparseMatrix,
    _Echelon,
    block_diag,
    kernel_basis,
    rank,
    solve_many,
)
from .gradedcomplex import (
    BigradedComplex,
    Window,
    build_complex,
    check_homotopy,
    cohomology,
    equivariant_basis,
    null_homotopy,
)


class SplittingError(ValueError):
    """A term was not certified to lie in add(M)."""


class FunctorMismatchError(ValueError):
    pass


# ---------------------------------------------------------------------------
# modules and algebras


@dataclass(frozen=True)
class FinModule:
    """Vector space k^dim with one action matrix per algebra generator."""

    dim: int
    actions: tuple
    field: Field = DEFAULT_FIELD
    name: str = "M"

    def __post_init__(self):
        for a in self.actions:
            if a.shape != (self.dim, self.dim):
                raise ValueError("action matrix has the wrong shape")

    def power(self, r: int) -> "FinModule":
        """M^r, blocks in order."""
        if r == 0:
            return FinModule(0, tuple(SparseMatrix.zero(0, 0, self.field) for _ in self.actions), self.field)
        return FinModule(self.dim * r, tuple(block_diag([a] * r) for a in self.actions), self.field,
                         f"{self.name}^{r}")

    def direct_sum(self, other: "FinModule") -> "FinModule":
        return FinModule(self.dim + other.dim, tuple(block_diag([a, b]) for a, b in zip(self.actions, other.actions)),
                         self.field, f"{self.name}+{other.name}")


def hom_basis(src: FinModule, tgt: FinModule) -> tuple:
    """Basis of the module maps src -> tgt (matrices tgt.dim x src.dim)."""
    return equivariant_basis(tuple(src.actions), tuple(tgt.actions), src.dim, tgt.dim, src.field)


def _vec(m: SparseMatrix) -> dict:
    return {r * m.cols + c: v for r, c, v in m.entries}


def coordinates(basis: Sequence[SparseMatrix], targets: Sequence[SparseMatrix], field: Field) -> SparseMatrix | None:
    """Columns: coordinates of each target in the span of ``basis`` (None if some target is outside)."""
    if not targets:
        return SparseMatrix.zero(len(basis), 0, field)
    n = targets[0].rows * targets[0].cols
    a = SparseMatrix(n, len(basis), [(k, j, v) for j, b in enumerate(basis) for k, v in _vec(b).items()], field)
    rhs = SparseMatrix(n, len(targets), [(k, j, v) for j, t in enumerate(targets) for k, v in _vec(t).items()], field)
    return solve_many(a, rhs)


def combine(basis: Sequence[SparseMatrix], coefs: Sequence, shape, field: Field) -> SparseMatrix:
    out = SparseMatrix.zero(shape[0], shape[1], field)
    for b, c in zip(basis, coefs):
        if c:
            out = out + b.scale(c)
    return out


@dataclass(frozen=True)
class FinAlgebraRep:
    """Finite-dimensional algebra by structure constants.

    ``mult[(i, j)]`` is the product of basis vectors i and j as a dict
    {k: coefficient}.  ``generators`` names elements (coordinate vectors)
    that generate the algebra.  ``modules`` maps a module name to its action
    matrices, one per generator.  When the algebra is a matrix algebra the
    basis matrices are kept in ``basis_matrices``.
    """

    dim: int
    mult: Mapping[tuple[int, int], Mapping[int, object]]
    unit: tuple
    generators: Mapping[str, tuple]
    field: Field = DEFAULT_FIELD
    modules: Mapping[str, tuple] = dc_field(default_factory=dict)
    basis_matrices: tuple | None = None
    opposite_of: bool = False

    def mul(self, x: Sequence, y: Sequence) -> tuple:
        f = self.field
        out = [f.coerce(0)] * self.dim
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                for k, c in self.mult.get((i, j), {}).items():
                    out[k] = f.coerce(out[k] + a * b * c)
        return tuple(out)

    def basis_vector(self, i: int) -> tuple:
        f = self.field
        return tuple(f.coerce(int(k == i)) for k in range(self.dim))

    def is_associative(self) -> bool:
        e = [self.basis_vector(i) for i in range(self.dim)]
        for x in e:
            for y in e:
                xy = self.mul(x, y)
                for z in e:
                    if self.mul(xy, z) != self.mul(x, self.mul(y, z)):
                        return False
        return True

    def is_unital(self) -> bool:
        return all(self.mul(self.unit, self.basis_vector(i)) == self.basis_vector(i)
                   == self.mul(self.basis_vector(i), self.unit) for i in range(self.dim))

    def opposite(self) -> "FinAlgebraRep":
        mult = {(j, i): v for (i, j), v in self.mult.items()}
        return FinAlgebraRep(self.dim, mult, self.unit, dict(self.generators), self.field, {}, self.basis_matrices,
                             not self.opposite_of)

    def left_mult_matrix(self, x: Sequence) -> SparseMatrix:
        cols = [self.mul(x, self.basis_vector(j)) for j in range(self.dim)]
        return SparseMatrix(self.dim, self.dim, [(i, j, v) for j, c in enumerate(cols) for i, v in enumerate(c) if v],
                            self.field)

    def check_module(self, name: str) -> bool:
        """Action matrices respect the relations among generator products.

        Checked as: the assignment extends to the subalgebra spanned by
        products of at most three generators, i.e. linear relations among
        such products in the algebra also hold among the matrices.
        """
        acts = self.modules[name]
        gens = list(self.generators.values())
        words = [((), self.unit, SparseMatrix.identity(acts[0].rows, self.field) if acts else None)]
        frontier = list(words)
        for _ in range(3):
            nxt = []
            for w, elt, mat in frontier:
                for g, (gv, a) in enumerate(zip(gens, acts)):
                    nxt.append((w + (g,), self.mul(elt, gv), mat @ a))
            words += nxt
            frontier = nxt
        f = self.field
        a = SparseMatrix(self.dim, len(words), [(i, j, v) for j, (_, e, _) in enumerate(words)
                                                 for i, v in enumerate(e) if v], f)
        for rel in _columns(kernel_basis(a)):
            tot = SparseMatrix.zero(acts[0].rows, acts[0].cols, f)
            for j, c in rel.items():
                tot = tot + words[j][2].scale(c)
            if not tot.is_zero():
                return False
        return True


def _columns(m: SparseMatrix) -> list[dict]:
    cols: list[dict] = [dict() for _ in range(m.cols)]
    for r, c, v in m.entries:
        cols[c][r] = v
    return cols


def endomorphism_algebra(M: FinModule, opposite: bool = False) -> FinAlgebraRep:
    """End(M) (or its opposite) with the basis of :func:`hom_basis`.

    Generators are chosen greedily among basis vectors until the generated
    subalgebra is everything.
    """
    f = M.field
    basis = hom_basis(M, M)
    prods = [basis[i] @ basis[j] for i in range(len(basis)) for j in range(len(basis))]
    coords = coordinates(basis, prods, f)
    if coords is None:
        raise ArithmeticError("End(M) not closed under composition")
    cols = _columns(coords)
    n = len(basis)
    mult = {}
    for i in range(n):
        for j in range(n):
            c = cols[i * n + j]
            if c:
                mult[(j, i) if opposite else (i, j)] = c
    unit_c = coordinates(basis, [SparseMatrix.identity(M.dim, f)], f)
    unit = tuple(f.coerce(unit_c.get(k, 0)) for k in range(n))
    alg = FinAlgebraRep(n, mult, unit, {}, f, {}, tuple(basis), opposite)
    gens = _greedy_generators(alg)
    return FinAlgebraRep(n, mult, unit, {f"s{i}": alg.basis_vector(i) for i in gens}, f, {}, tuple(basis), opposite)


def _greedy_generators(alg: FinAlgebraRep) -> list[int]:
    chosen: list[int] = []
    for i in range(alg.dim):
        if _generated_dim(alg, chosen) == alg.dim:
            break
        before = _generated_dim(alg, chosen)
        if _generated_dim(alg, chosen + [i]) > before:
            chosen.append(i)
    # drop generators the others already produce
    for i in list(reversed(chosen)):
        rest = [g for g in chosen if g != i]
        if _generated_dim(alg, rest) == alg.dim:
            chosen = rest
    return chosen


def _generated_dim(alg: FinAlgebraRep, gens: list[int]) -> int:
    ech = _Echelon(alg.field)
    span = []

    def add(v):
        row = {k: x for k, x in enumerate(v) if x}
        if row and ech.add(dict(row)) is not None:
            span.append(v)
            return True
        return False

    add(alg.unit)
    gv = [alg.basis_vector(g) for g in gens]
    i = 0
    while i < len(span):
        for g in gv:
            add(alg.mul(span[i], g))
        i += 1
    return ech.rank


# ---------------------------------------------------------------------------
# complexes in add(M)


@dataclass(frozen=True)
class Splitting:
    """X^n -> M^r -> X^n with pi o iota = id, both module maps."""

    r: int
    iota: SparseMatrix
    pi: SparseMatrix


@dataclass
class ModuleComplex:
    """An ungraded complex (internal degree 0) of modules with action matrices per term."""

    complex: BigradedComplex
    actions: list  # per generator: {bidegree: matrix}
    splittings: dict = dc_field(default_factory=dict)  # position -> Splitting

    def term(self, n: int) -> FinModule:
        return FinModule(self.complex.dim(n, 0), tuple(a[(n, 0)] for a in self.actions), self.complex.field, f"X{n}")

    def positions(self):
        return sorted({n for n, _ in self.complex.bidegrees()})


def identity_splitting(X: ModuleComplex, M: FinModule) -> dict:
    """Splittings for terms that are literally M^r."""
    out = {}
    for n in X.positions():
        k = X.complex.dim(n, 0)
        if k % M.dim:
            raise SplittingError(f"term at {n} has dimension {k}, not a multiple of {M.dim}")
        out[n] = Splitting(k // M.dim, SparseMatrix.identity(k, M.field), SparseMatrix.identity(k, M.field))
    return out


def check_splitting(X: ModuleComplex, M: FinModule, n: int, s: Splitting) -> bool:
    f = M.field
    k = X.complex.dim(n, 0)
    Mr = M.power(s.r)
    if s.iota.shape != (Mr.dim, k) or s.pi.shape != (k, Mr.dim):
        return False
    if s.pi @ s.iota != SparseMatrix.identity(k, f):
        return False
    for a, b in zip(X.term(n).actions, Mr.actions):
        if b @ s.iota != s.iota @ a or a @ s.pi != s.pi @ b:
            return False
    return True


@dataclass(frozen=True)
class ProjectiveWitness:
    """Idempotent e in Mat_r(End M), e = iota o pi, with Hom(M, X^n) = image of e."""

    position: int
    r: int
    e: tuple  # r x r nested tuple of coordinate vectors in the End(M) basis
    verified: bool


@dataclass
class SComplex:
    """Image of a complex in add(M) under a Hom functor."""

    variance: str
    algebra: FinAlgebraRep
    complex: BigradedComplex
    actions: list
    bases: dict  # position of the image -> tuple of matrices (Hom basis)
    witnesses: dict
    source_position: dict  # image position -> source position


def _block(m: SparseMatrix, i: int, j: int, size: int) -> SparseMatrix:
    ents = [(r - i * size, c - j * size, v) for r, c, v in m.entries
            if i * size <= r < (i + 1) * size and j * size <= c < (j + 1) * size]
    return SparseMatrix(size, size, ents, m.field)


def _witness(M: FinModule, alg: FinAlgebraRep, n: int, s: Splitting, image_dim: int) -> ProjectiveWitness:
    f = M.field
    e = s.iota @ s.pi
    blocks = [[_block(e, i, j, M.dim) for j in range(s.r)] for i in range(s.r)]
    flat = [b for row in blocks for b in row]
    co = coordinates(alg.basis_matrices, flat, f)
    if co is None:
        raise SplittingError(f"splitting at {n} is not a module map")
    cols = _columns(co)
    ecoord = tuple(tuple(tuple(f.coerce(cols[i * s.r + j].get(k, 0)) for k in range(alg.dim)) for j in range(s.r))
                   for i in range(s.r))
    ok = (e @ e == e)
    # the image of e acting on Hom(M, M^r) = S^r must have the dimension of Hom(M, X^n)
    Mr = M.power(s.r)
    hb = hom_basis(M, Mr)
    if hb:
        imgs = coordinates(hb, [e @ g for g in hb], f)
        ok = ok and imgs is not None and rank(imgs) == image_dim
    else:
        ok = ok and image_dim == 0
    return ProjectiveWitness(n, s.r, ecoord, ok)


def hom_functor(M: FinModule, X: ModuleComplex, variance: str = "covariant",
                algebra: FinAlgebraRep | None = None) -> SComplex:
    """Hom(M, X) (covariant) or Hom(X, M) (contravariant, positions reversed)."""
    if variance not in ("covariant", "contravariant"):
        raise ValueError(f"unknown variance {variance!r}")
    f = M.field
    cov = variance == "covariant"
    alg = algebra or endomorphism_algebra(M, opposite=cov)
    ps = X.positions()
    for n in ps:
        if n not in X.splittings:
            raise SplittingError(f"no splitting supplied for the term at position {n}")
        if not check_splitting(X, M, n, X.splittings[n]):
            raise SplittingError(f"splitting at position {n} does not verify")
    bases = {}
    src_pos = {}
    for n in ps:
        p = n if cov else -n
        bases[p] = hom_basis(M, X.term(n)) if cov else hom_basis(X.term(n), M)
        src_pos[p] = n
    terms = {(p, 0): len(b) for p, b in bases.items()}
    diffs = {}
    for p in bases:
        if p + 1 not in bases:
            continue
        if cov:
            d = X.complex.d(p, 0)
            imgs = [d @ g for g in bases[p]]
        else:
            d = X.complex.d(-p - 1, 0)  # X^{-p-1} -> X^{-p}
            imgs = [g @ d for g in bases[p]]
        co = coordinates(bases[p + 1], imgs, f)
        if co is None:
            raise ArithmeticError("functor image left the Hom space")
        diffs[(p, 0)] = co
    lo, hi = min(bases), max(bases)
    cx = build_complex(terms, diffs, Window(lo, hi, 0, 0), f)
    actions = []
    for gname, gv in alg.generators.items():
        smat = combine(alg.basis_matrices, gv, (M.dim, M.dim), f)
        act = {}
        for p, b in bases.items():
            imgs = [g @ smat for g in b] if cov else [smat @ g for g in b]
            co = coordinates(b, imgs, f)
            if co is None:
                raise ArithmeticError("S action left the Hom space")
            act[(p, 0)] = co
        actions.append(act)
    witnesses = {}
    for p, n in src_pos.items():
        s = X.splittings[n]
        if cov:
            witnesses[p] = _witness(M, alg, n, s, len(bases[p]))
        else:
            # Hom(X^n, M) is the image of composing with e on Hom(M^r, M)
            witnesses[p] = ProjectiveWitness(p, s.r, (), s.pi @ s.iota == SparseMatrix.identity(s.pi.rows, f))
    return SComplex(variance, alg, cx, actions, bases, witnesses, src_pos)


def functor_on_map(M: FinModule, phi: SparseMatrix, src_basis, tgt_basis, variance: str = "covariant"):
    """Matrix of Hom(M, phi) (or Hom(phi, M)) in the given Hom bases."""
    f = M.field
    imgs = [phi @ g for g in src_basis] if variance == "covariant" else [g @ phi for g in src_basis]
    return coordinates(tgt_basis, imgs, f)


# ---------------------------------------------------------------------------
# checks


def fully_faithful_check(M: FinModule, objects: Sequence[FinModule], algebra: FinAlgebraRep | None = None,
                         pairs: Sequence[tuple[int, int]] | None = None) -> bool:
    """Hom(X, Y) -> Hom_S(Hom(M, X), Hom(M, Y)) is bijective for the sampled pairs."""
    f = M.field
    alg = algebra or endomorphism_algebra(M, opposite=True)
    smats = [combine(alg.basis_matrices, gv, (M.dim, M.dim), f) for gv in alg.generators.values()]
    images = []
    for X in objects:
        b = hom_basis(M, X)
        acts = []
        for s in smats:
            co = coordinates(b, [g @ s for g in b], f)
            acts.append(co)
        images.append((b, tuple(acts)))
    if pairs is None:
        pairs = [(i, j) for i in range(len(objects)) for j in range(len(objects))]
    for i, j in pairs:
        X, Y = objects[i], objects[j]
        (bx, ax), (by, ay) = images[i], images[j]
        src = hom_basis(X, Y)
        tgt = equivariant_basis(ax, ay, len(bx), len(by), f)
        if len(src) != len(tgt):
            return False
        if not src:
            continue
        mats = [functor_on_map(M, phi, bx, by) for phi in src]
        if any(m is None for m in mats):
            return False
        co = coordinates(tgt, mats, f)
        if co is None or rank(co) != len(src):
            return False
    return True


@dataclass
class TransferReport:
    contractible_in_addM: bool
    contractible_over_S: bool
    agree: bool
    homotopy_transfers: bool | None

    def to_json_obj(self):
        return {"contractible_in_addM": self.contractible_in_addM, "contractible_over_S": self.contractible_over_S,
                "agree": self.agree, "homotopy_transfers": self.homotopy_transfers}


def contractibility_transfer_check(M: FinModule, X: ModuleComplex, algebra: FinAlgebraRep | None = None,
                                   image: SComplex | None = None) -> TransferReport:
    F = image or hom_functor(M, X, "covariant", algebra)
    hA = null_homotopy(X.complex, X.actions)
    hB = null_homotopy(F.complex, F.actions)
    transfers = None
    if hA is not None and hB is not None:
        hF = {}
        for (n, t), h in hA.items():
            if n - 1 in F.bases and n in F.bases:
                co = functor_on_map(M, h, F.bases[n], F.bases[n - 1])
                if co is None:
                    transfers = False
                    break
                hF[(n, t)] = co
        else:
            transfers = check_homotopy(F.complex, hF)
    return TransferReport(hA is not None, hB is not None, (hA is None) == (hB is None), transfers)


@dataclass
class Certificate:
    bidegree: tuple | None
    cohomology_dim: int
    equivariant_homotopy: bool
    fully_faithful: bool
    variance: str
    noncontractible: bool
    reason: str
    seed: int | None = None

    def to_json_obj(self):
        return {"bidegree": list(self.bidegree) if self.bidegree else None, "cohomology_dim": self.cohomology_dim,
                "equivariant_homotopy_exists": self.equivariant_homotopy, "fully_faithful": self.fully_faithful,
                "variance": self.variance, "noncontractible": self.noncontractible, "reason": self.reason,
                "master_seed": self.seed}


def noncontractibility_certificate(M: FinModule, preimage: ModuleComplex, X: SComplex | None = None,
                                   variance: str = "covariant", seed: int | None = None) -> Certificate | None:
    """Certificate that the functor image X of ``preimage`` is noncontractible.

    Either the preimage has a nonzero cohomology class (so it is not even
    acyclic), or no equivariant contracting homotopy exists; the fully
    faithful functor then carries noncontractibility over to X.
    """
    image = hom_functor(M, preimage, variance)
    if X is not None:
        same = (X.complex.bidegrees() == image.complex.bidegrees()
                and all(X.complex.d(*b) == image.complex.d(*b) for b in image.complex.bidegrees()))
        if not same:
            raise FunctorMismatchError("the given S-complex is not the functor image of the preimage")
    H = cohomology(preimage.complex)
    nz = H.nonzero()
    h = null_homotopy(preimage.complex, preimage.actions)
    objs = [preimage.term(n) for n in preimage.positions()]
    ff = fully_faithful_check(M, objs, image.algebra if variance == "covariant" else None) \
        if variance == "covariant" else fully_faithful_check(M, objs)
    if nz:
        b, k = next(iter(nz.items()))
        return Certificate(b, k, h is not None, ff, variance, ff, "nonacyclic", seed)
    if h is None:
        return Certificate(None, 0, False, ff, variance, ff, "equivariant-homotopy-infeasible", seed)
    return None


# ---------------------------------------------------------------------------
# desk instances


def truncated_cofree_module(a: int, d: int, r: int, field: Field = DEFAULT_FIELD) -> FinModule:
    """C_{<=d} (x) k^r over C = Sym(W), dim W = a; x_i acts as the derivative d_i."""
    from .symcoalgebra import LabelledComplex

    lc = LabelledComplex("cofree", a, {0: tuple((("v", j), 0) for j in range(r))}, {})
    cx, acts = lc.realize_truncated(d, field)
    return FinModule(cx.dim(0, 0), tuple(x[(0, 0)] for x in acts), field, f"C<={d}(x)k^{r}")


def truncated_free_module(a: int, d: int, r: int, field: Field = DEFAULT_FIELD) -> FinModule:
    """Hom(C_{<=d}, k^r); x_i acts by precomposition with the derivative d_i."""
    from .symcoalgebra import LabelledComplex

    lc = LabelledComplex("free", a, {0: tuple((("v", j), 0) for j in range(r))}, {})
    cx, acts = lc.realize_truncated(d, field)
    return FinModule(cx.dim(0, 0), tuple(x[(0, 0)] for x in acts), field, f"Hom(C<={d},k^{r})")


def module_complex_from_labelled(lc, d: int, field: Field = DEFAULT_FIELD) -> ModuleComplex:
    cx, acts = lc.realize_truncated(d, field)
    return ModuleComplex(cx, acts)


def block_splittings(X: ModuleComplex, M: FinModule, unit_dim: int) -> dict:
    """Splittings when each term is (unit)^v and M = (unit)^R: pad to a multiple of R copies."""
    f = M.field
    R = M.dim // unit_dim
    out = {}
    for n in X.positions():
        k = X.complex.dim(n, 0)
        v = k // unit_dim
        r = -(-v // R)
        iota = SparseMatrix(r * M.dim, k, [(i, i, 1) for i in range(k)], f)
        out[n] = Splitting(r, iota, iota.transpose())
    return out


def dual_numbers(field: Field = DEFAULT_FIELD) -> FinAlgebraRep:
    """k[e]/(e^2), basis (1, e)."""
    one = field.coerce(1)
    mult = {(0, 0): {0: one}, (0, 1): {1: one}, (1, 0): {1: one}}
    return FinAlgebraRep(2, mult, (one, field.coerce(0)), {"eps": (field.coerce(0), one)}, field)


# random complexes in add(M) ------------------------------------------------


def _random_map(basis, shape, rng: random.Random, field: Field) -> SparseMatrix:
    p = getattr(field, "p", 101)
    return combine(basis, [rng.randrange(p) for _ in basis], shape, field)


def _random_iso(M: FinModule, r: int, rng: random.Random) -> SparseMatrix:
    Mr = M.power(r)
    b = hom_basis(Mr, Mr)
    while True:
        g = _random_map(b, (Mr.dim, Mr.dim), rng, M.field)
        if rank(g) == Mr.dim:
            return g


def random_add_complex(M: FinModule, rng: random.Random, max_r: int = 2, length: int = 3) -> ModuleComplex:
    """A random bounded complex whose terms are M^r, r <= max_r.

    Mixes three shapes: cones of isomorphisms (contractible), random
    composable pairs with g f = 0, and stalks.
    """
    f = M.field
    kind = rng.choice(["cone", "pair", "pair", "stalk", "cone+stalk"])
    rs: list[int]
    ds: dict[int, SparseMatrix] = {}
    if kind == "cone" or (kind == "cone+stalk" and max_r < 2):
        r = rng.randint(1, max_r)
        rs = [r, r]
        ds[0] = _random_iso(M, r, rng)
    elif kind == "stalk":
        rs = [rng.randint(1, max_r)]
    elif kind == "cone+stalk" and max_r >= 2:
        # M --(iso, 0)--> M (+) M leaves a copy of M as cokernel
        rs = [1, 2]
        g = _random_iso(M, 1, rng)
        ds[0] = SparseMatrix(2 * M.dim, M.dim, list(g.entries), f)
    else:
        rs = [rng.randint(1, max_r) for _ in range(length)]
        for n in range(len(rs) - 1):
            src, tgt = M.power(rs[n]), M.power(rs[n + 1])
            b = hom_basis(src, tgt)
            if n == 0 or (n - 1) not in ds:
                cand = list(b)
            else:
                prev = ds[n - 1]
                # maps g with g o prev = 0
                comp = [g @ prev for g in b]
                co = SparseMatrix(tgt.dim * prev.cols, len(b),
                                  [(k, j, v) for j, c in enumerate(comp) for k, v in _vec(c).items()], f)
                ker = kernel_basis(co)
                cand = [combine(b, [ker.get(i, j) for i in range(len(b))], (tgt.dim, src.dim), f)
                        for j in range(ker.cols)]
            if cand:
                # a single basis map now and then keeps ranks low
                ds[n] = _random_map(cand, (tgt.dim, src.dim), rng, f) if rng.random() < 0.6 else cand[rng.randrange(len(cand))]
            else:
                ds[n] = SparseMatrix.zero(tgt.dim, src.dim, f)
    start = rng.randint(-1, 1)
    terms = {(start + n, 0): M.dim * r for n, r in enumerate(rs)}
    diffs = {(start + n, 0): m for n, m in ds.items()}
    window = Window(start, start + len(rs) - 1, 0, 0)
    cx = build_complex(terms, diffs, window, f)
    actions = [{(start + n, 0): M.power(r).actions[i] for n, r in enumerate(rs)} for i in range(len(M.actions))]
    X = ModuleComplex(cx, actions)
    X.splittings = identity_splitting(X, M)
    return X


def dress_trial(M: FinModule, seed: int, algebra: FinAlgebraRep | None = None, max_r: int = 2) -> dict:
    """One seeded trial of the transfer property."""
    rng = random.Random(seed)
    X = random_add_complex(M, rng, max_r)
    rep = contractibility_transfer_check(M, X, algebra)
    objs = [X.term(n) for n in X.positions()]
    ff = fully_faithful_check(M, objs, algebra)
    return {"seed": seed, "shape": [X.complex.dim(n, 0) // M.dim for n in X.positions()],
            "positions": X.positions(), **rep.to_json_obj(), "fully_faithful": ff,
            "pass": rep.agree and ff and rep.homotopy_transfers in (None, True)}
