import pytest
from hypothesis import given, settings, strategies as st

from acyclica.exactla import GF, QQ, SparseMatrix
from acyclica.gradedcomplex import (
    ChainMap,
    CohomologyTable,
    CompositionNonzeroError,
    InhomogeneousError,
    UnboundedComplexError,
    BigradedComplex,
    Window,
    build_complex,
    check_homotopy,
    cohomology,
    dualize,
    hom_complex,
    null_homotopy,
    shift,
    tensor,
    zero_differential_complex,
)
from acyclica.polykoszul import VariableSet, koszul_complex
from acyclica.symcoalgebra import (
    acyclic_comodule_lc,
    comodule_coresolution,
    exterior_zero_complex,
    factorial_weight,
)

from conftest import F5, random_complex

F101 = GF(101)
W01 = Window(0, 1, 0, 0)


def one(field=F101):
    return SparseMatrix.identity(1, field)


def identity_complex(field=F101, lo=0):
    return build_complex({(lo, 0): 1, (lo + 1, 0): 1}, {(lo, 0): one(field)}, Window(lo, lo + 1, 0, 0), field)


def point(field=F101):
    return build_complex({(0, 0): 1}, {}, Window(0, 0, 0, 0), field)


# --- build_complex ----------------------------------------------------------


def test_build_examples():
    assert point().dim(0, 0) == 1
    assert identity_complex().d(0, 0) == one()
    with pytest.raises(CompositionNonzeroError) as e:
        build_complex({(0, 0): 1, (1, 0): 1, (2, 0): 1}, {(0, 0): one(), (1, 0): one()}, Window(0, 2, 0, 0), F101)
    assert "(0, 0)" in str(e.value)


def test_build_rejects_bad_shape_and_bidegree():
    with pytest.raises(ValueError):
        build_complex({(0, 0): 1, (1, 0): 2}, {(0, 0): one()}, W01, F101)
    with pytest.raises(InhomogeneousError):
        build_complex({(0, 0): 1, (1, 1): 1}, {((0, 0), (1, 1)): one()}, Window(0, 1, 0, 1), F101)


# --- cohomology -------------------------------------------------------------


def test_cohomology_examples():
    assert cohomology(identity_complex()).is_zero()
    z = zero_differential_complex({(0, 0): 1, (1, 0): 2, (2, 0): 1}, F101)
    assert cohomology(z).by_position() == {0: 1, 1: 2, 2: 1}


def test_one_variable_two_term_koszul():
    # 0 -> R(-1) -> R -> 0 by x at positions 0, 1, internal degrees up to 4
    D = 4
    terms = {}
    diffs = {}
    for t in range(D + 1):
        terms[(1, t)] = 1
        if t >= 1:
            terms[(0, t)] = 1
            diffs[(0, t)] = one()
    H = cohomology(build_complex(terms, diffs, Window(0, 1, 0, D), F101))
    assert H.nonzero() == {(1, 0): 1}


def test_boundary_flags():
    # the support may continue past the window on the right
    c = build_complex({(0, 0): 1}, {}, Window(0, 1, 0, 0), F101, support=(0, None, 0, 0))
    H = cohomology(c)
    assert (1, 0) in H.flagged and (0, 0) not in H.flagged


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_cohomology_of_random_complex(seed):
    c, expected = random_complex(seed)
    assert cohomology(c).nonzero() == {b: k for b, k in sorted(expected.items())}


# --- tensor -----------------------------------------------------------------


def test_tensor_examples():
    x, _ = random_complex(3)
    xt = tensor(x, build_complex({(0, 0): 1}, {}, Window(0, 0, 0, 0), F5))
    assert cohomology(xt).nonzero() == cohomology(x).nonzero()
    assert cohomology(tensor(identity_complex(), identity_complex())).is_zero()


def test_tensor_field_mismatch():
    with pytest.raises(ValueError):
        tensor(point(F101), point(GF(7)))


def test_tensor_comodule_complex_with_exterior_powers():
    # Kunneth oracle: class at (-2,-2) tensored with dims 1,2,1 at positions 0,-1,-2
    x = acyclic_comodule_lc(2).realize(Window(-2, 0, -2, 5), F101)
    z = exterior_zero_complex(2, offset=2, dual=True, field=F101)
    H = cohomology(tensor(x, z))
    assert H.by_position() == {-2: 1, -3: 2, -4: 1}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_kunneth(s1, s2):
    x, hx = random_complex(s1, positions=(0, 2))
    y, hy = random_complex(s2, positions=(-1, 1))
    H = cohomology(tensor(x, y))
    conv: dict = {}
    for (p, a), i in hx.items():
        for (q, b), j in hy.items():
            conv[(p + q, a + b)] = conv.get((p + q, a + b), 0) + i * j
    assert H.nonzero() == {b: k for b, k in sorted(conv.items()) if k}


def test_tensor_sign_rule_gives_square_zero():
    x, _ = random_complex(11)
    y, _ = random_complex(12)
    tensor(x, y)  # build_complex validates d o d = 0


# --- hom ----------------------------------------------------------------------


def test_hom_from_point_is_identity():
    y, _ = random_complex(5)
    h = hom_complex(build_complex({(0, 0): 1}, {}, Window(0, 0, 0, 0), F5), y)
    assert cohomology(h).nonzero() == cohomology(y).nonzero()
    for n, t in y.bidegrees():
        assert h.dim(n, t) == y.dim(n, t)


def test_hom_into_point_is_dual():
    x, _ = random_complex(6)
    h = hom_complex(x, build_complex({(0, 0): 1}, {}, Window(0, 0, 0, 0), F5))
    dx = dualize(x)
    for n, t in dx.bidegrees():
        assert h.dim(n, t) == dx.dim(n, t)
    assert cohomology(h).nonzero() == cohomology(dx).nonzero()


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_hom_cohomology_is_convolution(s1, s2):
    x, hx = random_complex(s1, positions=(0, 2), degrees=(0, 0))
    y, hy = random_complex(s2, positions=(0, 2), degrees=(0, 1))
    H = cohomology(hom_complex(x, y))
    conv: dict = {}
    for (p, a), i in hx.items():
        for (q, b), j in hy.items():
            conv[(q - p, b - a)] = conv.get((q - p, b - a), 0) + i * j
    assert H.nonzero() == {b: k for b, k in sorted(conv.items()) if k}


# --- dualize ------------------------------------------------------------------


def test_dualize_examples():
    d = dualize(point())
    assert d.bidegrees() == [(0, 0)]
    di = dualize(identity_complex())
    assert di.window.positions() == range(-1, 1)
    assert di.d(-1, 0) == one()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_dualize_involution_and_reversal(seed):
    x, _ = random_complex(seed)
    dd = dualize(dualize(x))
    assert dd.bidegrees() == x.bidegrees()
    for b in x.bidegrees():
        assert dd.labels(*b) == x.labels(*b)
        assert dd.d(*b) == x.d(*b).with_labels(None, None)
    Hx, Hd = cohomology(x), cohomology(dualize(x))
    assert {(-n, -t): k for (n, t), k in Hx.nonzero().items()} == Hd.nonzero()


def test_dual_coresolution_slice_is_koszul_slice():
    # m = 2, internal degree 3; equal after rescaling the basis u by u!
    c = comodule_coresolution(2, Window(-1, 2, 0, 5), QQ)
    dc = dualize(c)
    k = koszul_complex(VariableSet.standard(2), Window(-2, 0, 0, 5), QQ)
    for n in (-2, -1):
        a, b = dc.d(n, -3), k.d(n, 3)
        assert a.shape == b.shape
        src = [lab[1][1] for lab in dc.labels(n, -3)]
        tgt = [lab[1][1] for lab in dc.labels(n + 1, -3)]
        rescaled = SparseMatrix(a.rows, a.cols, [(r, c_, v * factorial_weight(src[c_]) / factorial_weight(tgt[r]))
                                                 for r, c_, v in a.entries], QQ)
        assert rescaled == b.with_labels(None, None)


# --- shift and serialization ------------------------------------------------


def test_shift():
    x, _ = random_complex(8)
    s = shift(x, 2, -1)
    assert {(n - 2, t + 1): k for (n, t), k in cohomology(s).nonzero().items()} == cohomology(x).nonzero()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_complex_json_round_trip(seed):
    x, _ = random_complex(seed)
    back = BigradedComplex.loads(x.dumps())
    assert back.dumps() == x.dumps()
    assert back.bidegrees() == x.bidegrees()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_table_json_csv_round_trip(seed):
    x, _ = random_complex(seed)
    H = cohomology(x)
    assert CohomologyTable.from_json_obj(H.to_json_obj()).rows() == H.rows()
    assert CohomologyTable.from_csv(H.to_csv(), H.window).rows() == H.rows()


# --- chain maps ---------------------------------------------------------------


def test_chain_map_from_labels_and_failure():
    x = identity_complex()
    ChainMap.from_labels(x, x)
    y = build_complex({(0, 0): 1, (1, 0): 1}, {}, W01, F101)
    with pytest.raises(ValueError):
        ChainMap.from_labels(x, y)


def test_induced_rank():
    p = point()
    m = ChainMap.from_labels(p, p)
    assert m.induced_rank(0, 0) == 1
    assert m.compose(m).induced_rank(0, 0) == 1


# --- null homotopy ----------------------------------------------------------


def test_null_homotopy_examples():
    h = null_homotopy(identity_complex())
    assert h is not None and check_homotopy(identity_complex(), h)
    assert null_homotopy(point()) is None


def test_null_homotopy_needs_bounded():
    c = build_complex({(0, 0): 1}, {}, Window(0, 1, 0, 0), F101, support=(0, None, 0, 0))
    with pytest.raises(UnboundedComplexError):
        null_homotopy(c)


def dual_numbers_sequence(field=F101):
    """0 -> k -> S -> k -> 0 over S = k[e]/e^2: acyclic, not split over S."""
    inc = SparseMatrix.from_dense([[0], [1]], field)  # 1 -> e
    proj = SparseMatrix.from_dense([[1, 0]], field)  # 1 -> 1, e -> 0
    x = build_complex({(0, 0): 1, (1, 0): 2, (2, 0): 1}, {(0, 0): inc, (1, 0): proj}, Window(0, 2, 0, 0), field)
    eps = {(0, 0): SparseMatrix.zero(1, 1, field),
           (1, 0): SparseMatrix.from_dense([[0, 0], [1, 0]], field),
           (2, 0): SparseMatrix.zero(1, 1, field)}
    return x, eps


def test_dual_numbers_equivariance():
    x, eps = dual_numbers_sequence()
    assert cohomology(x).is_zero()
    h = null_homotopy(x)
    assert h is not None and check_homotopy(x, h)
    assert null_homotopy(x, [eps]) is None


def test_free_dual_numbers_complex_is_equivariantly_contractible():
    # S -> S identity is contractible over S
    f = F101
    e = SparseMatrix.from_dense([[0, 0], [1, 0]], f)
    x = build_complex({(0, 0): 2, (1, 0): 2}, {(0, 0): SparseMatrix.identity(2, f)}, W01, f)
    h = null_homotopy(x, [{(0, 0): e, (1, 0): e}])
    assert h is not None and check_homotopy(x, h)
    for b, m in h.items():
        assert m @ e == e @ m


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_null_homotopy_iff_acyclic(seed):
    x, _ = random_complex(seed)
    h = null_homotopy(x)
    assert (h is not None) == cohomology(x).is_zero()
    if h is not None:
        assert check_homotopy(x, h)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_constructed_complexes_square_to_zero(s1, s2):
    x, _ = random_complex(s1, positions=(0, 1))
    y, _ = random_complex(s2, positions=(0, 1))
    for c in (tensor(x, y), hom_complex(x, y), dualize(x)):
        for (n, t) in c.bidegrees():
            assert (c.d(n + 1, t) @ c.d(n, t)).is_zero()
