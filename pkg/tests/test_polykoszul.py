from itertools import product
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from acyclica.exactla import GF, QQ
from acyclica.gradedcomplex import InhomogeneousError, Window, cohomology, dualize, shift
from acyclica.polykoszul import (
    FPGradedModule,
    FreeComplex,
    VariableSet,
    dual_koszul_complex,
    dual_koszul_free_complex,
    free_module_complex,
    free_resolution_of_variable_quotient,
    graded_ext_k_R,
    koszul_complex,
    koszul_free_complex,
    koszul_inclusion,
    monomial_basis,
    poly_component_dim,
    tensor_fp_module,
    tensor_free,
)
from acyclica.symcoalgebra import signed_match

F101 = GF(101)


def brute_monomials(m, t):
    return sum(1 for e in product(range(t + 1), repeat=m) if sum(e) == t)


def test_poly_component_dim_examples():
    assert poly_component_dim(2, 3) == 4
    assert poly_component_dim(5, 0) == 1
    assert poly_component_dim(3, 2) == 6
    assert poly_component_dim(2, -1) == 0


@given(st.integers(1, 4), st.integers(0, 6))
def test_poly_component_dim_against_enumeration(m, t):
    assert poly_component_dim(m, t) == comb(t + m - 1, t) == brute_monomials(m, t)
    basis = monomial_basis(m, t)
    assert len(set(basis)) == len(basis)
    # graded-lex: exponent tuples descending
    assert list(basis) == sorted(basis, reverse=True)


def test_variable_set_rejects_duplicates():
    with pytest.raises(ValueError):
        VariableSet(("x", "x"))


def test_koszul_shape():
    k1 = koszul_free_complex(VariableSet.standard(1))
    assert [len(k1.gens[n]) for n in (-1, 0)] == [1, 1]
    assert list(k1.diffs[-1].values()) == [{(1,): 1}]
    k3 = koszul_free_complex(VariableSet.standard(3))
    assert [len(k3.gens[-n]) for n in range(4)] == [1, 3, 3, 1]
    assert all(k3.gens[-n][0][1] == n for n in range(4))


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("field", [F101, QQ])
def test_koszul_resolves_k(m, field):
    H = cohomology(koszul_complex(VariableSet.standard(m), Window(-m, 0, 0, 6), field))
    assert H.nonzero() == {(0, 0): 1}


@pytest.mark.parametrize("m", [1, 2, 3])
def test_dual_koszul_concentration(m):
    H = cohomology(dual_koszul_complex(VariableSet.standard(m), Window(0, m, -m, 6), F101))
    # generators of Hom_R(K_n, R) sit in degree -n, so the class has internal degree -m
    assert H.nonzero() == {(m, -m): 1}


def test_dual_koszul_m1_is_multiplication_by_x():
    x = dual_koszul_free_complex(VariableSet.standard(1))
    assert x.diffs[0] == {(0, 0): {(1,): 1}}


def test_graded_ext_examples():
    assert graded_ext_k_R(VariableSet.standard(1)).by_position() == {1: 1}
    H = graded_ext_k_R(VariableSet.standard(3), Window(0, 3, -3, 6))
    assert H.by_position() == {3: 1} and H.total() == 1
    H2 = graded_ext_k_R(VariableSet.standard(2))
    assert all(H2.get(0, t) == 0 for t in H2.window.degrees())


@pytest.mark.parametrize("m", [1, 2, 3])
def test_koszul_self_duality(m):
    """Hom_R(K, R) is K shifted by (m, -m), matching subsets to complements, up to signs."""
    B = VariableSet.standard(m)
    D = 4
    rd = dual_koszul_complex(B, Window(0, m, -m, D), F101)
    ks = shift(koszul_complex(B, Window(-m, 0, 0, D + m), F101), m, -m)
    names = set(B.names)

    def complement(n, t, lab):
        gen, mono = lab
        rest = tuple(x for x in B.names if x not in gen[1:])
        assert set(rest) | set(gen[1:]) == names
        return (rest, mono)

    assert signed_match(rd, ks, complement)
    # the vector-space dual has a single class as well
    dk = dualize(koszul_complex(B, Window(-m, 0, 0, D), F101))
    assert cohomology(dk).nonzero() == {(0, 0): 1}


def test_check_homogeneous():
    B = VariableSet.standard(2)
    bad = FreeComplex(B, {-1: (("g", 2),), 0: (("e", 0),)}, {-1: {(0, 0): {(1, 0): 1}}})
    with pytest.raises(InhomogeneousError):
        bad.check_homogeneous()
    koszul_free_complex(B).check_homogeneous()
    dual_koszul_free_complex(B).check_homogeneous()


def test_koszul_inclusion_is_chain_map():
    small = VariableSet(("x1", "x3"))
    big = VariableSet.standard(3)
    w = Window(-3, 0, 0, 4)
    f = koszul_inclusion(small, big, w, F101)
    assert not f.failures()
    assert f.induced_rank(0, 0) == 1
    with pytest.raises(ValueError):
        koszul_inclusion(VariableSet(("y",)), big, w, F101)


# --- finitely presented modules --------------------------------------------


def test_fp_module_dims():
    B = VariableSet.standard(2)
    assert [FPGradedModule.free(B).dim(t, F101) for t in range(4)] == [1, 2, 3, 4]
    q = FPGradedModule.quotient_by_variables(B, [0])
    assert [q.dim(t, F101) for t in range(4)] == [1, 1, 1, 1]
    k = FPGradedModule.quotient_by_variables(B, [0, 1])
    assert [k.dim(t, F101) for t in range(4)] == [1, 0, 0, 0]


def test_fp_module_inhomogeneous_rejected():
    B = VariableSet.standard(2)
    with pytest.raises(InhomogeneousError):
        FPGradedModule(B, (("e", 0),), ((2, {0: {(1, 0): 1}}),))


def test_fp_module_json_round_trip():
    B = VariableSet.standard(2)
    q = FPGradedModule.quotient_by_variables(B, [0, 1])
    back = FPGradedModule.from_json_obj(q.to_json_obj())
    assert back.to_json_obj() == q.to_json_obj()
    assert [back.dim(t, F101) for t in range(3)] == [1, 0, 0]


def test_tensor_with_free_module_is_identity():
    B = VariableSet.standard(2)
    X = dual_koszul_free_complex(B)
    w = Window(0, 2, -2, 4)
    a = tensor_fp_module(FPGradedModule.free(B), X, w, F101)
    b = X.realize(w, F101)
    for bd in b.bidegrees():
        assert a.dim(*bd) == b.dim(*bd)
        if b.has_d(*bd):
            assert a.d(*bd).with_labels(None, None) == b.d(*bd).with_labels(None, None)


def test_tensor_k_with_one_variable_koszul():
    B = VariableSet.standard(1)
    k = FPGradedModule.quotient_by_variables(B, [0])
    c = tensor_fp_module(k, koszul_free_complex(B), Window(-1, 0, 0, 3), F101)
    assert c.dim(-1, 1) == 1 and c.dim(0, 0) == 1
    assert c.d(-1, 1).is_zero()
    assert cohomology(c).by_position() == {-1: 1, 0: 1}


def test_remark_quasi_isomorphism():
    B = VariableSet.standard(2)
    M = FPGradedModule.quotient_by_variables(B, [0])
    X = dual_koszul_free_complex(B)
    w = Window(-1, 2, -3, 6)
    H1 = cohomology(tensor_fp_module(M, X, w, F101))
    H2 = cohomology(tensor_free(free_resolution_of_variable_quotient(B, 0), X).realize(w, F101))
    keys = set(H1.trusted()) & set(H2.trusted())
    assert keys
    assert all(H1.get(*b) == H2.get(*b) for b in keys)
    assert H1.nonzero() == {(1, -1): 1, (2, -2): 1}


def test_tensor_free_with_unit():
    B = VariableSet.standard(2)
    X = koszul_free_complex(B)
    w = Window(-2, 0, 0, 4)
    t = tensor_free(free_module_complex(B), X).realize(w, F101)
    assert cohomology(t).nonzero() == cohomology(X.realize(w, F101)).nonzero()


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 3), st.integers(0, 5))
def test_koszul_slices_square_to_zero(m, D):
    c = koszul_complex(VariableSet.standard(m), Window(-m, 0, 0, D), F101)
    for n, t in c.bidegrees():
        assert (c.d(n + 1, t) @ c.d(n, t)).is_zero()
