import pytest
from hypothesis import given, strategies as st

from acyclica.endotransfer import dual_numbers
from acyclica.exactla import GF
from acyclica.gradedcomplex import cohomology
from acyclica.monomialalg import (
    F2,
    RelationViolation,
    TruncatedAlgebra,
    augmentation_certificate,
    augmentation_value,
    basis_words,
    brute_force_count,
    count_basis_words,
    kernel_oracle,
    normal_form,
    right_mult_operator,
    specialize,
    verify_exactness,
)

words = st.lists(st.integers(0, 4), max_size=7).map(tuple)


def test_normal_form_examples():
    assert normal_form((0, 1)) is None
    assert normal_form((1, 0)) == (1, 0)
    assert normal_form((2, 2, 3)) is None
    assert normal_form(()) == ()


@given(words)
def test_normal_form_matches_factor_search(w):
    has_factor = any(w[i + 1] == w[i] + 1 for i in range(len(w) - 1))
    assert (normal_form(w) is None) == has_factor


def test_count_examples():
    assert count_basis_words(3, 0) == 1
    assert count_basis_words(2, 2) == 7
    assert count_basis_words(1, 2) == 3


@pytest.mark.parametrize("N", range(0, 5))
@pytest.mark.parametrize("length", range(0, 7))
def test_count_matches_brute_force(N, length):
    assert count_basis_words(N, length) == brute_force_count(N, length) == len(basis_words(N, length))


def test_truncated_algebra():
    A = TruncatedAlgebra(2, 3)
    assert len(A.basis()) == sum(count_basis_words(2, l) for l in range(4))
    assert A.multiply((0,), (1,)) is None
    assert A.multiply((1,), (0,)) == (1, 0)
    with pytest.raises(ValueError):
        A.multiply((0, 0), (0, 0))


def test_right_mult_examples():
    m = right_mult_operator(0, 0, 2)
    assert m.shape == (3, 1) and m.entries == ((0, 0, 1),)
    m = right_mult_operator(1, 1, 2)
    row_of_zero = basis_words(2, 1).index((0,))
    assert m.column_values(row_of_zero) == [0] * m.rows
    with pytest.raises(ValueError):
        right_mult_operator(5, 1, 2)


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("length", [0, 1, 2, 3, 4])
def test_consecutive_products_vanish(N, length):
    for n in range(N):
        a = right_mult_operator(n, length, N)
        b = right_mult_operator(n + 1, length + 1, N)
        assert (b @ a).is_zero()


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("length", [1, 2, 3, 4])
def test_kernel_oracle_by_brute_force(N, length):
    for n in range(1, N + 1):
        direct = tuple(w for w in basis_words(N, length) if normal_form(w + (n,)) is None)
        assert kernel_oracle(n, length, N) == direct


def test_verify_exactness_small():
    rep = verify_exactness(3, 5)
    assert rep["pass"] and rep["flagged_lengths"] == [5]
    assert all(r["kernel_x0"] == 0 for r in rep["rows"] if r["n"] == -1)
    assert all(r["oracle_agrees"] for r in rep["rows"] if r["n"] >= 0)


def test_verify_exactness_other_field():
    assert verify_exactness(2, 4, GF(3))["pass"]


def test_augmentation_certificate():
    cert = augmentation_certificate(4)
    assert cert["zero_differential"] and cert["functorial"]
    assert set(cert["cohomology"].values()) == {1}
    assert cert["nonacyclic_everywhere"] and cert["pass"]
    assert augmentation_value(()) == 1 and augmentation_value((0,)) == 0


def test_specialize_zero():
    D = dual_numbers(F2)
    out = specialize([(0, 0)] * 3, D)
    cx = out["complex"]
    assert all(cx.d(n, 0).is_zero() for n in range(3))


def test_specialize_dual_numbers():
    f = GF(101)
    D = dual_numbers(f)
    eps = D.generators["eps"]
    out = specialize([eps] * 4, D)
    H = cohomology(out["complex"])
    # interior positions are exact; the ends see the truncation
    assert all(H.total(n) == 0 for n in (1, 2, 3))
    assert out["images"]["x0"] == list(eps)


def test_specialize_rejects_violation():
    f = GF(101)
    D = dual_numbers(f)
    one = D.unit
    eps = D.generators["eps"]
    with pytest.raises(RelationViolation) as e:
        specialize([one, eps, eps], D)
    assert e.value.n == 0
