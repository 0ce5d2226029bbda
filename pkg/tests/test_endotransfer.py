import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from acyclica.exactla import GF, SparseMatrix
from acyclica.endotransfer import (
    FinModule,
    FunctorMismatchError,
    ModuleComplex,
    Splitting,
    SplittingError,
    block_splittings,
    check_splitting,
    contractibility_transfer_check,
    dress_trial,
    dual_numbers,
    endomorphism_algebra,
    fully_faithful_check,
    hom_basis,
    hom_functor,
    identity_splitting,
    module_complex_from_labelled,
    noncontractibility_certificate,
    random_add_complex,
    truncated_cofree_module,
    truncated_free_module,
)
from acyclica.gradedcomplex import Window, build_complex, cohomology
from acyclica.symcoalgebra import comodule_coresolution_lc, contramodule_resolution_lc, sym_dim

F101 = GF(101)
F7 = GF(7)


def plain(n, field=F101):
    return FinModule(n, (), field)


def commuting_dim_sympy(actions, n):
    """dim {h : h A = A h} from a sympy nullspace on the n^2 unknowns."""
    hs = sympy.symbols(f"h0:{n * n}")
    H = sympy.Matrix(n, n, hs)
    eqs = []
    for a in actions:
        A = sympy.Matrix(a.to_dense())
        eqs += list(H * A - A * H)
    if not eqs:
        return n * n
    J = sympy.Matrix([[sympy.diff(e, h) for h in hs] for e in eqs])
    return n * n - J.rank()


# --- endomorphism algebras ----------------------------------------------------


def test_endomorphism_examples():
    S = endomorphism_algebra(plain(2))
    assert S.dim == 4 and S.is_associative() and S.is_unital()
    assert endomorphism_algebra(plain(1)).dim == 1


@pytest.mark.parametrize("d", [1, 2])
def test_endomorphism_dim_truncated_cofree(d):
    M = truncated_cofree_module(1, d, 2, F101)
    S = endomorphism_algebra(M)
    # comodule maps into a cofree comodule C (x) V: Hom(M, V), so r^2 dim C_{<=d}
    assert S.dim == 4 * sum(sym_dim(1, j) for j in range(d + 1))
    assert S.dim == commuting_dim_sympy(M.actions, M.dim)


def test_dress_module_algebra():
    M = truncated_cofree_module(2, 2, 2, F101)
    assert M.dim == 12
    S = endomorphism_algebra(M, opposite=True)
    assert S.dim == 24 == commuting_dim_sympy(M.actions, M.dim)
    assert S.is_associative() and S.is_unital()
    assert 0 < len(S.generators) <= 6


def test_opposite_twice():
    S = endomorphism_algebra(truncated_cofree_module(1, 2, 1, F101))
    back = S.opposite().opposite()
    assert dict(back.mult) == dict(S.mult) and back.opposite_of == S.opposite_of
    op = endomorphism_algebra(truncated_cofree_module(1, 2, 1, F101), opposite=True)
    assert dict(op.mult) == dict(S.opposite().mult)


def test_dual_numbers_algebra():
    D = dual_numbers(F101)
    assert D.is_associative() and D.is_unital()
    eps = D.generators["eps"]
    assert D.mul(eps, eps) == (0, 0)


# --- the Hom functor ----------------------------------------------------------


def stalk(M, r=1, pos=0):
    f = M.field
    cx = build_complex({(pos, 0): M.dim * r}, {}, Window(pos, pos, 0, 0), f)
    X = ModuleComplex(cx, [{(pos, 0): a} for a in M.power(r).actions])
    X.splittings = identity_splitting(X, M)
    return X


def two_term(M, d):
    f = M.field
    cx = build_complex({(0, 0): M.dim, (1, 0): M.dim}, {(0, 0): d}, Window(0, 1, 0, 0), f)
    X = ModuleComplex(cx, [{(0, 0): a, (1, 0): a} for a in M.actions])
    X.splittings = identity_splitting(X, M)
    return X


def test_hom_functor_of_M_is_S():
    M = truncated_cofree_module(1, 2, 1, F101)
    img = hom_functor(M, stalk(M))
    assert img.complex.dim(0, 0) == img.algebra.dim
    w = img.witnesses[0]
    assert w.verified and w.r == 1
    # the witness is the unit of S
    assert w.e[0][0] == img.algebra.unit


def test_hom_functor_of_zero_map():
    M = truncated_cofree_module(1, 2, 1, F101)
    img = hom_functor(M, two_term(M, SparseMatrix.zero(M.dim, M.dim, F101)))
    assert img.complex.d(0, 0).is_zero()
    assert img.complex.dim(0, 0) == img.complex.dim(1, 0) == img.algebra.dim


@pytest.mark.parametrize("variance", ["covariant", "contravariant"])
def test_hom_functor_coresolution_terms_cyclic_projective(variance):
    f = F101
    lc = comodule_coresolution_lc(1, augmented=False)
    X = module_complex_from_labelled(lc, 2, f)
    unit = truncated_cofree_module(1, 2, 1, f)
    M = unit.power(2)
    X.splittings = block_splittings(X, M, unit.dim)
    img = hom_functor(M, X, variance)
    assert all(w.verified for w in img.witnesses.values())
    for (n, t) in img.complex.bidegrees():
        assert (img.complex.d(n + 1, t) @ img.complex.d(n, t)).is_zero()
    if variance == "contravariant":
        assert sorted(img.bases) == sorted(-n for n in X.positions())


def test_missing_splitting_rejected():
    M = truncated_cofree_module(1, 1, 1, F101)
    X = stalk(M)
    X.splittings = {}
    with pytest.raises(SplittingError):
        hom_functor(M, X)
    X.splittings = {0: Splitting(1, SparseMatrix.zero(M.dim, M.dim, F101), SparseMatrix.zero(M.dim, M.dim, F101))}
    with pytest.raises(SplittingError):
        hom_functor(M, X)
    with pytest.raises(ValueError):
        hom_functor(M, stalk(M), "sideways")


def test_witness_idempotent_and_complement():
    M = truncated_cofree_module(1, 1, 1, F101)
    M2 = M.power(2)
    # X = M, split into M^2 as the first block
    k = M.dim
    iota = SparseMatrix(2 * k, k, [(i, i, 1) for i in range(k)], F101)
    s = Splitting(2, iota, iota.transpose())
    X = stalk(M)
    assert check_splitting(X, M, 0, s)
    e = iota @ iota.transpose()
    one_minus = SparseMatrix.identity(2 * k, F101) - e
    assert e @ e == e and one_minus @ one_minus == one_minus
    # S e (+) S (1 - e) = S^2 by dimension
    dims = [len(hom_basis(M, FinModule(k, M.actions, F101))), len(hom_basis(M, M))]
    assert sum(dims) == len(hom_basis(M, M2))


# --- fully faithful -----------------------------------------------------------


def test_fully_faithful_examples():
    M = truncated_cofree_module(1, 2, 1, F101)
    assert fully_faithful_check(M, [M])
    assert fully_faithful_check(M, [M, M.power(2)])
    assert len(hom_basis(M, M.power(2))) == 2 * len(hom_basis(M, M))


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_fully_faithful_random_summands(seed):
    rng = random.Random(seed)
    M = truncated_cofree_module(1, 1, 1, F101)
    objs = [M.power(rng.randint(1, 3)) for _ in range(2)]
    assert fully_faithful_check(M, objs)


# --- transfer -----------------------------------------------------------------


def test_transfer_examples():
    M = truncated_cofree_module(1, 2, 1, F101)
    rep = contractibility_transfer_check(M, two_term(M, SparseMatrix.identity(M.dim, F101)))
    assert rep.contractible_in_addM and rep.contractible_over_S and rep.agree and rep.homotopy_transfers
    rep = contractibility_transfer_check(M, stalk(M))
    assert not rep.contractible_in_addM and not rep.contractible_over_S and rep.agree


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_transfer_property_small(seed):
    M = truncated_cofree_module(1, 2, 1, F7)
    S = endomorphism_algebra(M, opposite=True)
    r = dress_trial(M, seed, S)
    assert r["pass"], r


def test_random_add_complex_is_valid():
    M = truncated_cofree_module(1, 1, 1, F101)
    rng = random.Random(4)
    for _ in range(10):
        X = random_add_complex(M, rng)
        for n in X.positions():
            assert check_splitting(X, M, n, X.splittings[n])
            assert X.complex.dim(n, 0) % M.dim == 0


# --- certificates -------------------------------------------------------------


@pytest.mark.parametrize("carrier", ["cofree", "free"])
def test_certificate_for_truncated_preimages(carrier):
    f = F101
    lc = comodule_coresolution_lc(1, augmented=False) if carrier == "cofree" else \
        contramodule_resolution_lc(1, augmented=False)
    X = module_complex_from_labelled(lc, 2, f)
    unit = truncated_cofree_module(1, 2, 1, f).dim
    M = (truncated_cofree_module if carrier == "cofree" else truncated_free_module)(1, 2, 2, f)
    X.splittings = block_splittings(X, M, unit)
    c = noncontractibility_certificate(M, X, seed=7)
    assert c is not None and c.noncontractible and c.fully_faithful
    assert c.reason == "nonacyclic" and c.cohomology_dim > 0
    assert cohomology(X.complex).get(*c.bidegree) == c.cohomology_dim
    obj = c.to_json_obj()
    assert obj["master_seed"] == 7 and obj["variance"] == "covariant"


def test_no_certificate_for_identity():
    M = truncated_cofree_module(1, 2, 1, F101)
    assert noncontractibility_certificate(M, two_term(M, SparseMatrix.identity(M.dim, F101))) is None


def dual_numbers_preimage(field=F101):
    """0 -> k -> S -> k -> 0 over S = k[e]/e^2, inside add(S (+) k)."""
    e_S = SparseMatrix.from_dense([[0, 0], [1, 0]], field)
    zero1 = SparseMatrix.zero(1, 1, field)
    S = FinModule(2, (e_S,), field, "S")
    k = FinModule(1, (zero1,), field, "k")
    M = S.direct_sum(k)
    inc = SparseMatrix.from_dense([[0], [1]], field)
    proj = SparseMatrix.from_dense([[1, 0]], field)
    cx = build_complex({(0, 0): 1, (1, 0): 2, (2, 0): 1}, {(0, 0): inc, (1, 0): proj}, Window(0, 2, 0, 0), field)
    X = ModuleComplex(cx, [{(0, 0): zero1, (1, 0): e_S, (2, 0): zero1}])
    k_in = SparseMatrix(3, 1, [(2, 0, 1)], field)
    s_in = SparseMatrix(3, 2, [(0, 0, 1), (1, 1, 1)], field)
    X.splittings = {0: Splitting(1, k_in, k_in.transpose()), 1: Splitting(1, s_in, s_in.transpose()),
                    2: Splitting(1, k_in, k_in.transpose())}
    return M, X


def test_certificate_for_dual_numbers_sequence():
    M, X = dual_numbers_preimage()
    assert cohomology(X.complex).is_zero()
    c = noncontractibility_certificate(M, X)
    assert c is not None and c.reason == "equivariant-homotopy-infeasible"
    assert c.noncontractible and c.fully_faithful and not c.equivariant_homotopy


def test_certificate_functor_mismatch():
    M = truncated_cofree_module(1, 2, 1, F101)
    other = hom_functor(M, two_term(M, SparseMatrix.identity(M.dim, F101)))
    with pytest.raises(FunctorMismatchError):
        noncontractibility_certificate(M, stalk(M), X=other)
