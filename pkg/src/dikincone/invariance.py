"""Positive invariance of cones and ellipsoids under ``x' = A x``.

Three independent routes are provided and are expected to agree:

* ``certify_cone`` / ``certify_ellipsoid`` search for a scalar ``a`` with
  ``Q A + A^T Q + a Q <= 0`` (or check ``A^T P + P A <= 0``);
* ``nagumo_falsify`` samples the boundary and looks for ``<A x, Q x> > 0``;
* ``simulate`` integrates trajectories and watches the defining quadratic.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.linalg import expm

from .cone import ConeConstruction, LorenzCone, _lorenz_eig, classify
from .errors import DimensionError, InvalidInputError, PreconditionError
from .geometry import DikinEllipsoid, Ellipsoid
from .spectral import _check_symmetric

__all__ = [
    "Counterexample",
    "InvarianceCertificate",
    "LinearSystem",
    "TrajectoryRecord",
    "certificate_scan",
    "certify_cone",
    "certify_ellipsoid",
    "lmi_matrix",
    "nagumo_falsify",
    "simulate",
    "simulate_many",
]

log = logging.getLogger(__name__)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class LinearSystem:
    """Continuous-time system ``x'(t) = A x(t)``."""

    A: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError("A must be square")
        if not np.all(np.isfinite(A)):
            raise InvalidInputError("A has non-finite entries")
        A.flags.writeable = False
        object.__setattr__(self, "A", A)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def propagator(self, t: float) -> np.ndarray:
        """``exp(A t)``."""
        return expm(self.A * t)


def _cone_matrix(cone) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    if isinstance(cone, ConeConstruction):
        return cone.Q, cone.branch_normal
    if isinstance(cone, LorenzCone):
        if np.any(cone.p != 0.0):
            raise InvalidInputError("invariance tests need the cone vertex at the origin")
        return cone.Q, cone.axis_hint
    Q = _check_symmetric(cone)
    _lorenz_eig(Q)
    return Q, None


def _check_dims(system: LinearSystem, Q: np.ndarray):
    if Q.shape[0] != system.dim:
        raise DimensionError(f"system is {system.dim}-dimensional, set is {Q.shape[0]}-dimensional")


@dataclass(frozen=True)
class Counterexample:
    """Boundary point where the vector field points strictly outward."""

    point: np.ndarray
    inner_product: float  # <A x, Q x> at the unit-norm point
    quadratic: float      # x^T Q x, ~0 on the boundary

    def to_dict(self) -> dict:
        return {"point": [float(v) for v in self.point],
                "inner_product": self.inner_product,
                "quadratic": self.quadratic}


@dataclass(frozen=True)
class InvarianceCertificate:
    feasible: bool
    a_star: float
    lambda_max_at_a_star: float
    tolerance: float
    search_bracket: Tuple[float, float]
    counterexample: Optional[Counterexample] = None

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "a_star": self.a_star,
            "lambda_max_at_a_star": self.lambda_max_at_a_star,
            "tolerance": self.tolerance,
            "search_bracket": list(self.search_bracket),
            "counterexample": None if self.counterexample is None else self.counterexample.to_dict(),
        }


def lmi_matrix(system: LinearSystem, Q, a: float) -> np.ndarray:
    """``S(a) = Q A + A^T Q + a Q``."""
    Q = np.asarray(Q, dtype=float)
    QA = Q @ system.A
    return QA + QA.T + a * Q


def _lambda_max(M: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(M)[-1])


def _minimize_convex(f, max_doublings: int = 64):
    """Golden-section search on an expanding symmetric bracket."""
    w = 1.0
    f0 = f(0.0)
    for _ in range(max_doublings):
        if f(w) >= f(0.5 * w) and f(-w) >= f(-0.5 * w):
            break
        w *= 2.0
    else:
        raise InvalidInputError("objective did not turn upward; is the matrix indefinite?")
    lo, hi = -w, w
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > 1e-10 * (1.0 + abs(0.5 * (lo + hi))):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    best = (x1, f1) if f1 <= f2 else (x2, f2)
    if f0 < best[1]:
        best = (0.0, f0)
    return best, (-w, w)


def certify_cone(system: LinearSystem, cone, tol: Optional[float] = None) -> InvarianceCertificate:
    """Minimize ``f(a) = lambda_max(Q A + A^T Q + a Q)`` over the real line.

    ``f`` is convex (a maximum of affine functions of ``a``) and tends to
    ``+inf`` in both directions because ``Q`` is indefinite, so a 1-D search
    suffices. The search result is polished by also trying every real ``a``
    at which ``S(a)`` is singular; when the optimum is exactly zero it sits
    at one of those points.

    The cone is invariant iff ``min f <= tol``. The default tolerance is
    ``1e-9 * max(1, ||QA + A^T Q|| + |a*| ||Q||)``.
    """
    Q, _ = _cone_matrix(cone)
    _check_dims(system, Q)
    M = lmi_matrix(system, Q, 0.0)

    def f(a):
        return _lambda_max(M + a * Q)

    (a_star, f_star), bracket = _minimize_convex(f)
    pencil = np.linalg.eigvals(np.linalg.solve(Q, M))
    for cand in -pencil[np.abs(pencil.imag) <= 1e-12 * (1.0 + np.abs(pencil.real))].real:
        fc = f(cand)
        if fc <= f_star:
            a_star, f_star = float(cand), fc
    if tol is None:
        scale = np.linalg.norm(M, 2) + abs(a_star) * np.linalg.norm(Q, 2)
        tol = 1e-9 * max(1.0, scale)
    log.debug("certify_cone: a*=%.6g f*=%.3e tol=%.1e bracket=%s", a_star, f_star, tol, bracket)
    return InvarianceCertificate(bool(f_star <= tol), float(a_star), float(f_star), float(tol),
                                 (float(bracket[0]), float(bracket[1])))


def certify_ellipsoid(system: LinearSystem, P, tol: Optional[float] = None) -> InvarianceCertificate:
    """Invariance of ``{x : x^T P x <= 1}``: ``lambda_max(A^T P + P A) <= tol``."""
    if isinstance(P, Ellipsoid):
        if np.any(P.p != 0.0):
            raise InvalidInputError("invariance tests need the ellipsoid centered at the origin")
        P = P.Q
    P = _check_symmetric(P)
    _check_dims(system, P)
    if np.linalg.eigvalsh(P)[0] <= 0.0:
        raise InvalidInputError("P must be positive definite")
    PA = P @ system.A
    S = PA + PA.T
    lam = _lambda_max(S)
    if tol is None:
        tol = 1e-9 * max(1.0, np.linalg.norm(S, 2))
    return InvarianceCertificate(bool(lam <= tol), 0.0, lam, float(tol), (0.0, 0.0))


def certificate_scan(system: LinearSystem, cone, a_grid) -> np.ndarray:
    """Table of ``(a, lambda_max(S(a)))`` over ``a_grid``; shape (m, 2)."""
    Q, _ = _cone_matrix(cone)
    _check_dims(system, Q)
    a_grid = np.asarray(a_grid, dtype=float).ravel()
    if a_grid.size == 0:
        raise InvalidInputError("empty grid")
    M = lmi_matrix(system, Q, 0.0)
    return np.column_stack([a_grid, [_lambda_max(M + a * Q) for a in a_grid]])


def cone_boundary_points(Q, count: int, seed: int = 0, hint=None) -> np.ndarray:
    """Unit-norm points with ``x^T Q x = 0`` on one branch.

    Directions are drawn uniformly on the sphere of the positive eigenspace
    (in the metric of ``Q``); the coordinate along the negative eigenvector
    is then fixed by the quadratic.
    """
    lam, U = _lorenz_eig(np.asarray(Q, dtype=float))
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((int(count), lam.size - 1))
    g /= np.linalg.norm(g, axis=1)[:, None]
    axis = U[:, 0]
    if hint is not None and axis @ hint < 0:
        axis = -axis
    X = (g / np.sqrt(lam[1:])) @ U[:, 1:].T + axis / np.sqrt(-lam[0])
    return X / np.linalg.norm(X, axis=1)[:, None]


def nagumo_falsify(system: LinearSystem, cone, samples: int = 10_000, seed: int = 0,
                   tol: float = 1e-8) -> Optional[Counterexample]:
    """Search the cone boundary for a point with ``<A x, Q x> > tol``.

    Returns the worst sampled point, or ``None`` when every sample satisfies
    the tangency condition. Deterministic for a fixed seed.
    """
    if int(samples) < 1:
        raise InvalidInputError("samples must be >= 1")
    Q, hint = _cone_matrix(cone)
    _check_dims(system, Q)
    X = cone_boundary_points(Q, samples, seed, hint)
    inner = np.einsum("ij,ij->i", X @ system.A.T, X @ Q)
    k = int(np.argmax(inner))
    if inner[k] <= tol:
        return None
    x = X[k]
    return Counterexample(x.copy(), float(inner[k]), float(x @ Q @ x))


@dataclass(frozen=True)
class TrajectoryRecord:
    initial_point: np.ndarray
    step: float
    horizon: float
    steps: int
    max_violation: float
    exited: bool
    exit_time: Optional[float]
    final_point: np.ndarray

    def to_dict(self) -> dict:
        return {
            "initial_point": [float(v) for v in self.initial_point],
            "step": self.step,
            "horizon": self.horizon,
            "steps": self.steps,
            "max_violation": self.max_violation,
            "exited": self.exited,
            "exit_time": self.exit_time,
            "final_point": [float(v) for v in self.final_point],
        }


SetLike = Union[LorenzCone, ConeConstruction, Ellipsoid, DikinEllipsoid]


def _set_functions(target: SetLike):
    """Return (q, side) where the set is ``q <= 0`` and, for cones, ``side >= 0``."""
    if isinstance(target, (LorenzCone, ConeConstruction)):
        side = target.branch_coordinate
        if isinstance(target, LorenzCone) and target.axis_hint is None:
            side = None
        return target.quadratic, side
    if isinstance(target, (Ellipsoid, DikinEllipsoid)):
        return (lambda X: target.quadratic(X) - 1.0), None
    raise InvalidInputError(f"cannot simulate against {type(target).__name__}")


def _rk4_step(A: np.ndarray, X: np.ndarray, h: float) -> np.ndarray:
    # rows of X are states; x' = A x becomes X' = X A^T
    At = A.T
    k1 = X @ At
    k2 = (X + 0.5 * h * k1) @ At
    k3 = (X + 0.5 * h * k2) @ At
    k4 = (X + h * k3) @ At
    return X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate_many(system: LinearSystem, target: SetLike, X0, h: float = 1e-3, T: float = 10.0,
                  method: str = "rk4", exit_tol: float = 1e-6) -> list:
    """Integrate many initial points at once; see :func:`simulate`."""
    X = np.atleast_2d(np.asarray(X0, dtype=float)).copy()
    if X.shape[1] != system.dim:
        raise DimensionError("initial points have the wrong dimension")
    if not (h > 0.0 and T > 0.0):
        raise InvalidInputError("step and horizon must be positive")
    if method not in ("rk4", "expm"):
        raise InvalidInputError("method must be 'rk4' or 'expm'")
    q, side = _set_functions(target)

    def violations(Y):
        scale = 1.0 + np.sum(Y * Y, axis=1)
        qv = q(Y)
        out = qv > exit_tol * scale
        if side is not None:
            out |= side(Y) < -exit_tol * np.sqrt(scale)
        return np.maximum(qv, 0.0), out

    if not np.all(_member_mask(target, X)):
        raise PreconditionError("initial point is not a member of the set")
    viol, _ = violations(X)
    X0 = X.copy()

    steps = max(1, math.ceil(T / h - 1e-9))
    last = T - (steps - 1) * h
    A = system.A
    if method == "expm":
        prop, prop_last = expm(A * h).T, expm(A * last).T

    max_viol = viol.copy()
    exit_time = np.full(X.shape[0], np.nan)
    for k in range(steps):
        hk = h if k < steps - 1 else last
        if method == "rk4":
            X = _rk4_step(A, X, hk)
        else:
            X = X @ (prop if k < steps - 1 else prop_last)
        viol, out = violations(X)
        np.maximum(max_viol, viol, out=max_viol)
        fresh = out & np.isnan(exit_time)
        exit_time[fresh] = min(T, (k + 1) * h)
    return [
        TrajectoryRecord(X0[j].copy(), float(h), float(T), steps, float(max_viol[j]),
                         bool(not np.isnan(exit_time[j])),
                         None if np.isnan(exit_time[j]) else float(exit_time[j]), X[j].copy())
        for j in range(X.shape[0])
    ]


def _member_mask(target, X):
    return classify(target, X) <= 0


def simulate(system: LinearSystem, target: SetLike, x0, h: float = 1e-3, T: float = 10.0,
             method: str = "rk4", exit_tol: float = 1e-6) -> TrajectoryRecord:
    """Fixed-step trajectory of ``x' = A x`` started inside ``target``.

    ``method="rk4"`` uses classical fourth-order Runge-Kutta; ``"expm"``
    applies the exact propagator ``exp(A h)`` at each step (useful as a
    reference, and as the discrete map ``x -> exp(A h) x``).

    The record keeps the largest positive value of the defining quadratic
    seen along the way. The trajectory counts as having exited at the first
    step where that value exceeds ``exit_tol (1 + ||x||^2)`` or the state
    crosses to the other branch of a cone.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    return simulate_many(system, target, x0[None, :], h, T, method, exit_tol)[0]
