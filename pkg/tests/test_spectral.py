import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dikincone.cone import construct_axis, construct_ones
from dikincone.errors import DimensionError, InvalidInputError
from dikincone.spectral import (
    ArrowheadMatrix,
    arrowhead_charpoly,
    arrowhead_eigenvalues,
    axis_cone_arrowhead,
    det_axis_cone,
    det_identity_plus_rank_one,
    equal_c_spectrum,
    inertia,
    lambda1_bounds_axis_cone,
    rank_one_spectrum,
    spectral_report,
)

from conftest import laplace_det


# -- arrowhead --------------------------------------------------------------

def test_charpoly_small_example():
    m = ArrowheadMatrix(2.0, [1.0], [1.0])
    # det(lam I - [[2,1],[1,1]]) = lam^2 - 3 lam + 1
    assert arrowhead_charpoly(m, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert arrowhead_charpoly(m, 1.0) == pytest.approx(-1.0, abs=1e-15)
    roots = arrowhead_eigenvalues(m)
    np.testing.assert_allclose(roots, [(3 + np.sqrt(5)) / 2, (3 - np.sqrt(5)) / 2], atol=1e-15)


def test_charpoly_matches_laplace_oracle(rng):
    for _ in range(30):
        k = int(rng.integers(1, 5))
        m = ArrowheadMatrix(rng.normal(), rng.normal(size=k), rng.normal(size=k))
        lam = rng.normal()
        oracle = laplace_det(lam * np.eye(k + 1) - m.to_dense())
        assert arrowhead_charpoly(m, lam) == pytest.approx(oracle, rel=1e-11, abs=1e-12)


def test_arrowhead_sorting_records_perm():
    m = ArrowheadMatrix(0.0, [1.0, 2.0, 3.0], [1.0, 3.0, 2.0])
    np.testing.assert_array_equal(m.b, [3.0, 2.0, 1.0])
    np.testing.assert_array_equal(m.p, [2.0, 3.0, 1.0])
    np.testing.assert_array_equal(m.perm, [1, 2, 0])


def test_arrowhead_round_trip():
    M = np.array([[1.0, 2.0, 3.0], [2.0, 5.0, 0.0], [3.0, 0.0, -1.0]])
    m = ArrowheadMatrix.from_dense(M)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(m.to_dense())),
                               np.sort(np.linalg.eigvalsh(M)), atol=1e-14)


def test_from_dense_rejects_full_matrix():
    with pytest.raises(InvalidInputError):
        ArrowheadMatrix.from_dense(np.ones((3, 3)))


def test_arrowhead_length_mismatch():
    with pytest.raises(DimensionError):
        ArrowheadMatrix(0.0, [1.0], [1.0, 2.0])


def test_one_by_one_arrowhead():
    np.testing.assert_array_equal(arrowhead_eigenvalues(ArrowheadMatrix(3.5, [], [])), [3.5])


@pytest.mark.parametrize("case", [
    dict(alpha=1.0, p=[0.0, 0.0], b=[2.0, -1.0]),                   # fully decoupled
    dict(alpha=0.0, p=[1.0, 1.0, 1.0], b=[2.0, 2.0, 2.0]),          # repeated diagonal
    dict(alpha=0.0, p=[1e-300, 1.0], b=[1.0, 1.0 + 1e-15]),          # near ties
    dict(alpha=5.0, p=[1e-8, 0.0, 3.0], b=[5.0, 5.0, -5.0]),
])
def test_arrowhead_degenerate_cases(case):
    m = ArrowheadMatrix(**case)
    ref = np.sort(np.linalg.eigvalsh(m.to_dense()))[::-1]
    np.testing.assert_allclose(arrowhead_eigenvalues(m), ref, atol=1e-12)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_arrowhead_matches_dense_solver(k, seed):
    g = np.random.default_rng(seed)
    b = g.normal(size=k)
    if k > 2:
        b[1] = b[0]   # keep some ties in play
    p = g.normal(size=k)
    p[g.random(k) < 0.2] = 0.0
    m = ArrowheadMatrix(g.normal(), p, b)
    ref = np.sort(np.linalg.eigvalsh(m.to_dense()))[::-1]
    got = arrowhead_eigenvalues(m)
    scale = 1.0 + np.abs(m.to_dense()).max()
    assert np.abs(got - ref).max() <= 1e-11 * scale


def test_arrowhead_eigenvalues_interlace(rng):
    for _ in range(50):
        k = int(rng.integers(1, 9))
        m = ArrowheadMatrix(rng.normal() * 3, rng.normal(size=k), rng.normal(size=k) * 3)
        lam = arrowhead_eigenvalues(m)
        assert lam[0] >= m.b[0] - 1e-12
        assert lam[-1] <= m.b[-1] + 1e-12
        for j in range(k - 1):
            assert m.b[j] + 1e-12 >= lam[j + 1] >= m.b[j + 1] - 1e-12


def test_axis_cone_arrowhead_is_recognized():
    c = np.array([1.0, 2.0, 0.5, 3.0])
    for i in range(4):
        Q = construct_axis(c, i).Q
        perm = [i] + [k for k in range(4) if k != i]
        m = ArrowheadMatrix.from_dense(Q[np.ix_(perm, perm)], atol=1e-15)
        ref = axis_cone_arrowhead(c, i)
        assert m.alpha == pytest.approx(ref.alpha)
        np.testing.assert_allclose(m.b, ref.b)
        np.testing.assert_allclose(np.abs(m.p), np.abs(ref.p))
        np.testing.assert_allclose(arrowhead_eigenvalues(ref),
                                   np.sort(np.linalg.eigvalsh(Q))[::-1], atol=1e-13)


# -- inertia ---------------------------------------------------------------

def test_inertia_simple():
    assert tuple(inertia(np.diag([1.0, 2.0, -3.0]))) == (2, 0, 1)
    assert tuple(inertia(np.diag([1.0, 0.0, -3.0]))) == (1, 1, 1)
    assert tuple(inertia(np.diag([1.0, 1e-14, -3.0]))) == (1, 1, 1)


def test_inertia_congruence_invariant(rng):
    Q = np.diag([3.0, 1.0, 0.5, -2.0])
    for _ in range(20):
        S = rng.normal(size=(4, 4)) + 4 * np.eye(4)
        assert tuple(inertia(S.T @ Q @ S)) == (3, 0, 1)


def test_inertia_rejects_asymmetric():
    with pytest.raises(InvalidInputError):
        inertia(np.array([[1.0, 2.0], [0.0, 1.0]]))


# -- determinants and bounds ----------------------------------------------

def test_det_axis_cone_small():
    assert det_axis_cone([1.0, 2.0, 3.0]) == pytest.approx(-1 / 36, rel=1e-15)
    Q = construct_axis([1.0, 2.0, 3.0], 0).Q
    assert laplace_det(Q) == pytest.approx(-1 / 36, rel=1e-12)


def test_det_identity_plus_rank_one_examples():
    assert det_identity_plus_rank_one(1.0, 1.0, 3) == pytest.approx(4.0)
    assert det_identity_plus_rank_one(2.0, -1.0, 2) == pytest.approx(0.0, abs=1e-15)
    assert det_identity_plus_rank_one(0.0, 1.0, 1) == pytest.approx(1.0)
    assert det_identity_plus_rank_one(0.0, 1.0, 3) == 0.0


def test_det_identity_plus_rank_one_laplace(rng):
    for _ in range(30):
        n = int(rng.integers(1, 6))
        beta, alpha = rng.uniform(-3, 3, 2)
        M = beta * np.eye(n) + alpha * np.ones((n, n))
        assert det_identity_plus_rank_one(beta, alpha, n) == pytest.approx(laplace_det(M), rel=1e-11, abs=1e-12)


def test_bounds_tight_at_ones():
    lo, hi = lambda1_bounds_axis_cone([1.0, 1.0, 1.0])
    assert lo == pytest.approx(1 + np.sqrt(2), abs=1e-14)
    assert hi == pytest.approx(1 + np.sqrt(2), abs=1e-14)
    lam = np.linalg.eigvalsh(construct_axis(np.ones(3), 0).Q)
    np.testing.assert_allclose(np.sort(lam), [1 - np.sqrt(2), 1.0, 1 + np.sqrt(2)], atol=1e-14)


def test_bounds_bracket_example():
    lo, hi = lambda1_bounds_axis_cone([1.0, 1.0, 2.0])
    lam1 = np.linalg.eigvalsh(construct_axis([1.0, 1.0, 2.0], 0).Q)[-1]
    assert lo < lam1 < hi
    assert (lo, lam1, hi) == pytest.approx((1.8042, 2.0710, 2.1180), abs=1e-4)


def test_bounds_need_two_dims():
    with pytest.raises(DimensionError):
        lambda1_bounds_axis_cone([1.0])


def test_axis_index_out_of_range():
    with pytest.raises(InvalidInputError):
        lambda1_bounds_axis_cone([1.0, 2.0], i=2)


# -- rank one and equal-c ---------------------------------------------------

def test_rank_one_generic():
    s = rank_one_spectrum([1.0, 2.0], [3.0, 4.0])
    assert (s.eigenvalue, s.multiplicity, s.zero_multiplicity, s.defective) == (11.0, 1, 1, False)


def test_rank_one_defective():
    s = rank_one_spectrum([1.0, 0.0], [0.0, 1.0])
    assert s.defective and s.multiplicity == 0
    M = np.outer([1.0, 0.0], [0.0, 1.0])
    assert np.any(M != 0) and np.allclose(M @ M, 0)


def test_rank_one_symmetric_matches_numeric(rng):
    a = rng.normal(size=5)
    s = rank_one_spectrum(a)
    np.testing.assert_allclose(np.sort(s.eigenvalues()), np.sort(np.linalg.eigvalsh(np.outer(a, a))), atol=1e-12)


@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("n", [2, 3, 5])
def test_equal_c_spectrum_matches_numeric(kappa, n):
    Q = construct_ones(np.full(n, kappa)).Q
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(Q))[::-1], equal_c_spectrum(kappa, n), atol=1e-12)


def test_spectral_report_fields():
    c = np.array([1.0, 2.0, 3.0])
    Q = construct_axis(c).Q
    rep = spectral_report(Q, det_axis_cone(c), lambda1_bounds_axis_cone(c))
    assert rep.det_agrees is True and rep.bounds_hold is True
    assert tuple(rep.inertia) == (2, 0, 1)
    d = rep.to_dict()
    assert d["inertia"] == [2, 0, 1]
    assert spectral_report(Q).det_agrees is None
