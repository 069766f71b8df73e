"""Acceptance suite: thirteen criteria, each at its stated tolerance.

Every test prints one PASS/FAIL line; the lines are repeated together in the
terminal summary. Seeds are fixed so the run is reproducible.
"""
import json

import numpy as np
import pytest

from dikincone.cli import main
from dikincone.cone import (
    classify,
    construct_axis,
    construct_general,
    construct_ones,
    construct_tangent_sphere,
    sandwich_decompose,
    standard_cone,
    standardize,
)
from dikincone.geometry import (
    DikinEllipsoid,
    Hyperplane,
    ones_complement_basis,
    sample_boundary,
    sample_interior,
    slice,
)
from dikincone.invariance import LinearSystem, certify_cone, nagumo_falsify, simulate
from dikincone.spectral import (
    ArrowheadMatrix,
    arrowhead_charpoly,
    arrowhead_eigenvalues,
    det_axis_cone,
    det_identity_plus_rank_one,
    equal_c_spectrum,
    inertia,
    lambda1_bounds_axis_cone,
)

from conftest import record_criterion


def random_case(rng, nmin=2, nmax=8):
    n = int(rng.integers(nmin, nmax + 1))
    return n, rng.uniform(0.1, 10.0, n)


def random_plane_normal(rng, n):
    return rng.uniform(0.05, 1.0, n)


# 1 -----------------------------------------------------------------------
def test_criterion_01_axis_determinant():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(200):
        n, c = random_case(rng)
        i = int(rng.integers(n))
        num = np.linalg.det(construct_axis(c, i).Q)
        closed = -np.prod(1.0 / c**2)
        worst = max(worst, abs(num - closed) / abs(closed))
        assert closed == det_axis_cone(c)
    ok = worst <= 1e-10
    record_criterion(1, "det Q_i = -prod 1/c_k^2", ok, f"max rel err {worst:.2e} <= 1e-10")
    assert ok


# 2 -----------------------------------------------------------------------
def test_criterion_02_inertia():
    rng = np.random.default_rng(102)
    bad = []
    for k in range(400):
        n, c = random_case(rng)
        kind = k % 4
        if kind == 0:
            cc = construct_axis(c, int(rng.integers(n)))
        elif kind == 1:
            cc = construct_ones(c)
        elif kind == 2:
            cc = construct_general(DikinEllipsoid(c), Hyperplane.through(random_plane_normal(rng, n), c))
        else:
            d = rng.normal(size=n)
            cc = construct_tangent_sphere(d / np.linalg.norm(d) * rng.uniform(1.05, 10.0))
        if tuple(inertia(cc.Q)) != (n - 1, 0, 1):
            bad.append((cc.kind, n))
    ok = not bad
    record_criterion(2, "inertia (n-1, 0, 1) for every construction", ok, f"{400 - len(bad)}/400 cases")
    assert ok, bad[:5]


# 3 -----------------------------------------------------------------------
def test_criterion_03_lambda1_bracketing():
    rng = np.random.default_rng(103)
    violations = 0
    for _ in range(200):
        n, c = random_case(rng)
        i = int(rng.integers(n))
        lo, hi = lambda1_bounds_axis_cone(c, i)
        lam1 = np.linalg.eigvalsh(construct_axis(c, i).Q)[-1]
        slack = 1e-12 * abs(lam1)
        if not (lo - slack <= lam1 <= hi + slack):
            violations += 1
    tight = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 9))
        c = np.full(n, rng.uniform(0.1, 10.0))
        i = int(rng.integers(n))
        c[i] = rng.uniform(0.1, 10.0)
        lo, hi = lambda1_bounds_axis_cone(c, i)
        lam1 = np.linalg.eigvalsh(construct_axis(c, i).Q)[-1]
        tight = max(tight, abs(lo - lam1), abs(hi - lam1))
    lo, hi = lambda1_bounds_axis_cone(np.ones(3))
    at_e = max(abs(lo - (1 + np.sqrt(2))), abs(hi - (1 + np.sqrt(2))))
    ok = violations == 0 and tight <= 1e-9 and at_e <= 1e-9
    record_criterion(3, "lower <= lambda_1 <= upper, tight for equal c_j", ok,
                     f"{violations} violations / 200, equal-c gap {tight:.1e}, gap at e {at_e:.1e}")
    assert ok


# 4 -----------------------------------------------------------------------
def _dikin_residuals(cc):
    c = cc.center
    D = np.diag(1.0 / c**2)
    H = cc.plane.basis
    Q = cc.Q
    return (np.linalg.norm(H.T @ D @ H - H.T @ Q @ H), np.linalg.norm(c @ Q @ H), abs(c @ Q @ c + 1.0))


def _sphere_residuals(cc):
    # base circle: centre t c, radius^2 t, where t = (|c|^2 - 1)/|c|^2
    c = cc.center
    t = (c @ c - 1.0) / (c @ c)
    H = cc.plane.basis
    Q = cc.Q
    x0 = t * c
    return (np.linalg.norm(H.T @ Q @ H - H.T @ H), np.linalg.norm(x0 @ Q @ H), abs(x0 @ Q @ x0 + t))


def test_criterion_04_construction_conditions():
    rng = np.random.default_rng(104)
    worst = {}
    for _ in range(300):
        n, c = random_case(rng)
        cases = {
            "axis": construct_axis(c, int(rng.integers(n))),
            "ones": construct_ones(c),
            "general": construct_general(DikinEllipsoid(c), Hyperplane.through(random_plane_normal(rng, n), c)),
        }
        for name, cc in cases.items():
            worst[name] = max(worst.get(name, 0.0), *_dikin_residuals(cc))
        d = rng.normal(size=n)
        sc = construct_tangent_sphere(d / np.linalg.norm(d) * rng.uniform(1.05, 10.0))
        worst["sphere"] = max(worst.get("sphere", 0.0), *_sphere_residuals(sc))
    ok = max(worst.values()) <= 1e-9
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    record_criterion(4, "base-matching residuals <= 1e-9", ok, detail)
    assert ok


# 5 -----------------------------------------------------------------------
def _axis_closed_form(c, i):
    n = c.size
    Q = np.diag(1.0 / c**2)
    for j in range(n):
        if j != i:
            Q[i, j] = Q[j, i] = -1.0 / (c[i] * c[j])
    Q[i, i] = (n - 2) / c[i] ** 2
    return Q


def _ones_closed_form(c):
    n, s = c.size, c.sum()
    Q = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            Q[i, j] = (n - 1) / s**2 - (1 / c[i] + 1 / c[j]) / s + (1 / c[i] ** 2 if i == j else 0.0)
    return Q


def test_criterion_05_specialization():
    rng = np.random.default_rng(105)
    worst = 0.0
    for k in range(200):
        n, c = random_case(rng)
        ed = DikinEllipsoid(c)
        if k % 2 == 0:
            i = int(rng.integers(n))
            got = construct_general(ed, Hyperplane.through(np.eye(n)[i], c)).Q
            ref = _axis_closed_form(c, i)
        else:
            got = construct_general(ed, Hyperplane(np.ones(n), c.sum(), ones_complement_basis(n))).Q
            ref = _ones_closed_form(c)
        worst = max(worst, np.abs(got - ref).max())
    ok = worst <= 1e-10
    record_criterion(5, "general construction reduces to the closed forms", ok, f"max entry err {worst:.2e}")
    assert ok


# 6 -----------------------------------------------------------------------
def test_criterion_06_equal_c_spectrum():
    worst = 0.0
    for kappa in (0.5, 1.0, 2.0, 5.0):
        for n in range(2, 9):
            lam = np.sort(np.linalg.eigvalsh(construct_ones(np.full(n, kappa)).Q))[::-1]
            expect = np.array([1 / kappa**2] * (n - 1) + [-1 / (n * kappa**2)])
            assert np.array_equal(expect, equal_c_spectrum(kappa, n))
            worst = max(worst, np.abs(lam - expect).max())
    ok = worst <= 1e-9
    record_criterion(6, "equal-c spectrum {1/k^2 x (n-1), -1/(n k^2)}", ok, f"max err {worst:.2e}")
    assert ok


# 7 -----------------------------------------------------------------------
def test_criterion_07_identity_plus_ones_det():
    worst = 0.0
    for beta in np.linspace(0.25, 4.0, 20):
        for alpha in np.linspace(-3.0, 3.0, 20):
            for n in range(2, 9):
                num = np.linalg.det(beta * np.eye(n) + alpha * np.ones((n, n)))
                closed = det_identity_plus_rank_one(beta, alpha, n)
                # relative to the size of the summands: the determinant itself
                # can cancel to ~0 on the grid
                scale = beta**n + n * abs(alpha) * beta ** (n - 1)
                worst = max(worst, abs(num - closed) / scale)
    ok = worst <= 1e-10
    record_criterion(7, "det(bI + a ee^T) closed form on 20x20x7 grid", ok, f"max rel err {worst:.2e}")
    assert ok


# 8 -----------------------------------------------------------------------
def test_criterion_08_arrowhead_interlacing():
    rng = np.random.default_rng(108)
    worst_gap, worst_res, worst_dense = 0.0, 0.0, 0.0
    for _ in range(200):
        k = int(rng.integers(1, 12))
        m = ArrowheadMatrix(rng.normal() * 5, rng.normal(size=k) * rng.uniform(0.01, 5),
                            rng.normal(size=k) * 5)
        lam = arrowhead_eigenvalues(m)
        dense = np.sort(np.linalg.eigvalsh(m.to_dense()))[::-1]
        worst_dense = max(worst_dense, np.abs(lam - dense).max() / np.abs(m.to_dense()).max())
        b = m.b
        # lam_1 >= b_1 >= lam_2 >= ... >= b_{n-1} >= lam_n
        seq = np.empty(2 * k + 1)
        seq[0::2], seq[1::2] = lam, b
        worst_gap = max(worst_gap, np.max(seq[1:] - seq[:-1], initial=0.0))
        for root in lam:
            val, scale = arrowhead_charpoly(m, root, return_scale=True)
            worst_res = max(worst_res, abs(val) / scale)
    ok = worst_gap <= 1e-9 and worst_res <= 1e-8 and worst_dense <= 1e-12
    record_criterion(8, "arrowhead interlacing and charpoly residual", ok,
                     f"interlace slack {worst_gap:.1e}, residual/scale {worst_res:.1e}, "
                     f"vs dense solver {worst_dense:.1e}")
    assert ok


# 9 -----------------------------------------------------------------------
def test_criterion_09_positivity():
    rng = np.random.default_rng(109)
    total, lowest = 0, np.inf
    while total < 100_000:
        n, c = random_case(rng)
        ed = DikinEllipsoid(c)
        sl = slice(ed, Hyperplane.through(rng.normal(size=n), c))
        seed = int(rng.integers(1 << 31))
        for X in (sample_boundary(ed, 1250, seed), sample_interior(ed, 1250, seed + 1),
                  sample_boundary(sl, 1250, seed + 2), sample_interior(sl, 1250, seed + 3)):
            lowest = min(lowest, X.min())
            total += X.shape[0]
    ok = lowest >= -1e-12
    record_criterion(9, "Dikin points are entrywise >= 0", ok, f"{total} points, min entry {lowest:.2e}")
    assert ok


# 10 ----------------------------------------------------------------------
BATTERY = [
    ("A = -I", -np.eye(2), True),
    ("A = swap", np.array([[0.0, 1.0], [1.0, 0.0]]), True),
    ("rotation", np.array([[0.0, -1.0], [1.0, 0.0]]), False),
]


def test_criterion_10_invariance_triangle():
    K = standard_cone(2)
    rng = np.random.default_rng(110)
    starts = np.vstack([[0.0, 1.0], [1.0, 1.0] / np.sqrt(2)])
    r = rng.uniform(0, 1, 8)
    s = rng.uniform(-1, 1, 8) * r
    starts = np.vstack([starts, np.column_stack([s, r])])
    notes, ok = [], True
    for name, A, expect in BATTERY:
        sys_ = LinearSystem(A)
        cert = certify_cone(sys_, K)
        cx = nagumo_falsify(sys_, K, samples=10_000, seed=0)
        recs = [simulate(sys_, K, x0, h=1e-3, T=10.0) for x0 in starts]
        if expect:
            good = (cert.feasible and abs(cert.lambda_max_at_a_star) <= 1e-12 and cx is None
                    and max(rec.max_violation for rec in recs) <= 1e-6 and not any(rec.exited for rec in recs))
            if name == "A = -I":
                good &= abs(cert.a_star - 2.0) <= 1e-9
        else:
            good = (not cert.feasible and abs(cert.lambda_max_at_a_star - 2.0) <= 1e-8
                    and cx is not None and any(rec.exited for rec in recs))
        ok &= bool(good)
        notes.append(f"{name}: a*={cert.a_star:.3g} f={cert.lambda_max_at_a_star:.1e} "
                     f"cx={'yes' if cx is not None else 'no'} exit={'yes' if any(r.exited for r in recs) else 'no'}")
    record_criterion(10, "certificate / falsifier / simulation agree", ok, "; ".join(notes))
    assert ok


# 11 ----------------------------------------------------------------------
def test_criterion_11_standardization():
    rng = np.random.default_rng(111)
    worst, flips = 0.0, 0
    for k in range(100):
        n, c = random_case(rng, 2, 6)
        kind = k % 4
        if kind == 0:
            cc = construct_axis(c, int(rng.integers(n)))
        elif kind == 1:
            cc = construct_ones(c)
        elif kind == 2:
            cc = construct_general(DikinEllipsoid(c), Hyperplane.through(random_plane_normal(rng, n), c))
        else:
            d = rng.normal(size=n)
            cc = construct_tangent_sphere(d / np.linalg.norm(d) * rng.uniform(1.2, 10.0))
        T = standardize(cc)
        I_tilde = np.diag([1.0] * (n - 1) + [-1.0])
        worst = max(worst, np.abs(T.P.T @ cc.Q @ T.P - I_tilde).max())
        X = cc.center + rng.normal(size=(1000, n)) * 2.0 * np.linalg.norm(cc.center)
        flips += int(np.sum(classify(cc, X) != classify(standard_cone(n), T.forward(X))))
    ok = worst <= 1e-8 and flips == 0
    record_criterion(11, "standardization to diag(1,..,1,-1) preserves membership", ok,
                     f"max congruence err {worst:.1e}, {flips} changed decisions / 100000")
    assert ok


# 12 ----------------------------------------------------------------------
def test_criterion_12_sandwich():
    rng = np.random.default_rng(112)
    worst_res, worst_z = 0.0, 0.0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        a = rng.normal(size=n)
        H = Hyperplane.from_normal(a).basis
        Hz = H @ rng.normal(size=n - 1)
        X = rng.normal() * np.outer(a, a) + np.outer(a, Hz) + np.outer(Hz, a)
        dec = sandwich_decompose(X, a, H)
        worst_res = max(worst_res, dec.residual / np.linalg.norm(X, 2))
    for _ in range(100):
        n, c = random_case(rng)
        a = random_plane_normal(rng, n)
        cc = construct_general(DikinEllipsoid(c), Hyperplane.through(a, c))
        H = cc.plane.basis
        D = np.diag(1.0 / c**2)
        z = sandwich_decompose(cc.Q - D, a, H).z
        expected = -np.linalg.solve(H.T @ H, H.T @ D @ c) / (a @ c)
        worst_z = max(worst_z, np.abs(z - expected).max())
    ok = worst_res <= 1e-9 and worst_z <= 1e-9
    record_criterion(12, "sandwich decomposition", ok,
                     f"residual/||X|| {worst_res:.1e}, z err {worst_z:.1e}")
    assert ok


# 13 ----------------------------------------------------------------------
CLI_CONFIGS = {
    "falsify": {"schema_version": 1, "dimension": 3, "center": [1.0, 2.0, 0.5],
                "cone": {"kind": "normal", "normal": [1.0, 0.3, 2.0]},
                "system": {"A": [[0.1, -1.0, 0.0], [1.0, 0.2, 0.0], [0.3, 0.0, -0.5]]},
                "options": {"seed": 17, "samples": 10000}},
    "simulate": {"schema_version": 1, "dimension": 2,
                 "cone": {"kind": "matrix", "Q": [[1.0, 0.0], [0.0, -1.0]], "axis_hint": [0.0, 1.0]},
                 "system": {"A": [[0.0, 1.0], [1.0, 0.0]]},
                 "options": {"initial_points": [[0.2, 1.0], [0.0, 1.0]]}},
    "certify": {"schema_version": 1, "dimension": 3, "center": [1.0, 1.0, 1.0], "cone": {"kind": "ones"},
                "system": {"A": [[-1.0, 0.2, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -2.0]]},
                "options": {"scan": True}},
    "spectrum": {"schema_version": 1, "dimension": 4, "center": [0.5, 1.0, 2.0, 3.0],
                 "cone": {"kind": "axis", "index": 2}},
}


def test_criterion_13_cli_determinism(tmp_path, capsys):
    same = []
    for command, cfg in CLI_CONFIGS.items():
        path = tmp_path / f"{command}.json"
        path.write_text(json.dumps(cfg))
        blobs = []
        for k in range(2):
            out = tmp_path / f"{command}-{k}.out.json"
            code = main([command, "--config", str(path), "--out", str(out)])
            assert code in (0, 3)
            blobs.append(out.read_bytes())
        same.append(blobs[0] == blobs[1])
    capsys.readouterr()
    ok = all(same)
    record_criterion(13, "identical config + seed gives byte-identical JSON", ok,
                     f"{sum(same)}/{len(same)} commands")
    assert ok
