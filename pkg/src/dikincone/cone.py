"""Lorenz cones with a Dikin-ellipsoid base.

All constructed cones have their vertex at the origin and are normalized so
that the base slice ``{x0 + H z : z^T G z <= 1}`` satisfies

    H^T Q H = beta G,    x0^T Q H = 0,    x0^T Q x0 = -beta,

with ``beta = 1`` for Dikin bases. The quadratic ``x^T Q x <= 0`` describes
two opposite branches; a construction keeps the one that contains its base.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import (
    DegenerateConeError,
    DimensionError,
    InvalidInputError,
    NearTangencyError,
    NotALorenzConeError,
    NotInKernelError,
)
from .geometry import (
    DikinEllipsoid,
    Ellipsoid,
    EllipsoidSlice,
    Hyperplane,
    complementary_basis,
    ones_complement_basis,
    slice as slice_ellipsoid,
)
from .spectral import _axis_index, _check_symmetric, _positive_vector, inertia

__all__ = [
    "ConditionResiduals",
    "ConeConstruction",
    "LorenzCone",
    "Membership",
    "MembershipResult",
    "StandardizingTransform",
    "classify",
    "construct_axis",
    "construct_general",
    "construct_ones",
    "construct_tangent_sphere",
    "membership",
    "sandwich_decompose",
    "standard_cone",
    "standardize",
    "verify_conditions",
]

_BAND = 1e-10


def _lorenz_eig(Q):
    lam, U = np.linalg.eigh(Q)
    tau = 1e-10 * np.abs(lam).max(initial=0.0)
    n = lam.size
    if not (np.sum(lam > tau) == n - 1 and np.sum(lam < -tau) == 1):
        pos, zero, neg = inertia(Q)
        raise NotALorenzConeError(f"inertia is ({pos}, {zero}, {neg}), expected ({n - 1}, 0, 1)")
    return lam, U


@dataclass(frozen=True)
class LorenzCone:
    """``{x : x^T Q x + 2 p^T x + rho <= 0}`` with inertia ``(n-1, 0, 1)``.

    ``rho`` is derived as ``p^T Q^{-1} p`` when omitted. Without an
    ``axis_hint`` both branches belong to the set; with one, only the branch
    on whose side the hint points is kept.
    """

    Q: np.ndarray
    p: Optional[np.ndarray] = None
    rho: Optional[float] = None
    axis_hint: Optional[np.ndarray] = None

    def __post_init__(self):
        Q = _check_symmetric(self.Q)
        n = Q.shape[0]
        if n < 2:
            raise DimensionError("Lorenz cones need n >= 2")
        lam, U = _lorenz_eig(Q)
        p = np.zeros(n) if self.p is None else np.asarray(self.p, dtype=float).ravel()
        if p.size != n:
            raise DimensionError("p has the wrong length")
        rho = float(p @ np.linalg.solve(Q, p))
        if self.rho is not None and abs(float(self.rho) - rho) > 1e-8 * max(1.0, abs(rho)):
            raise InvalidInputError("rho must equal p^T Q^{-1} p for a cone")
        hint = self.axis_hint
        if hint is not None:
            hint = np.asarray(hint, dtype=float).ravel()
            if hint.size != n or np.linalg.norm(hint) == 0.0:
                raise InvalidInputError("axis_hint must be a nonzero vector of length n")
            hint = hint / np.linalg.norm(hint)
            if abs(hint @ U[:, 0]) <= 1e-12:
                raise InvalidInputError("axis_hint does not select a branch")
        for arr in (Q, p) + ((hint,) if hint is not None else ()):
            arr.flags.writeable = False
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "axis_hint", hint)

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    @property
    def vertex(self) -> np.ndarray:
        return -np.linalg.solve(self.Q, self.p)

    @property
    def axis(self) -> np.ndarray:
        """Unit eigenvector of the negative eigenvalue, oriented along the hint."""
        lam, U = np.linalg.eigh(self.Q)
        u = U[:, 0]
        if self.axis_hint is not None and u @ self.axis_hint < 0:
            u = -u
        return u

    def quadratic(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.Q, x) + 2.0 * x @ self.p + self.rho

    def branch_coordinate(self, x) -> Optional[np.ndarray]:
        if self.axis_hint is None:
            return None
        return (np.asarray(x, dtype=float) - self.vertex) @ self.axis


def standard_cone(n: int) -> LorenzCone:
    """``x_1^2 + ... + x_{n-1}^2 <= x_n^2``, ``x_n >= 0``."""
    n = int(n)
    if n < 2:
        raise DimensionError("n must be >= 2")
    I_tilde = np.eye(n)
    I_tilde[-1, -1] = -1.0
    return LorenzCone(I_tilde, axis_hint=np.eye(n)[-1])


class ConditionResiduals(NamedTuple):
    subspace: float  # ||H^T Q H - beta G||_F
    cross: float     # ||x0^T Q H||
    offset: float    # |x0^T Q x0 + beta|

    def ok(self, tol: float = 1e-9) -> bool:
        return max(self) <= tol


@dataclass(frozen=True)
class ConeConstruction:
    """A cone with vertex at the origin built on an ellipsoidal base slice.

    ``gamma`` and ``beta`` are the free positive scalings of the general
    formula; ``gamma`` is fixed to 1, ``beta`` is 1 for Dikin bases and
    ``(||c||^2 - 1)/||c||^2`` for the unit-sphere tangent cone, whose matrix
    has a fixed normalization of its own.
    """

    kind: str
    Q: np.ndarray
    source: Union[DikinEllipsoid, Ellipsoid]
    plane: Hyperplane
    base: EllipsoidSlice
    gamma: float = 1.0
    beta: float = 1.0
    residuals: Optional[ConditionResiduals] = None

    def __post_init__(self):
        Q = np.array(self.Q, dtype=float)
        Q = 0.5 * (Q + Q.T)
        Q.flags.writeable = False
        object.__setattr__(self, "Q", Q)
        if self.residuals is None:
            object.__setattr__(self, "residuals", verify_conditions(self))

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    @property
    def center(self) -> np.ndarray:
        return self.source.center

    @property
    def branch_normal(self) -> np.ndarray:
        """Plane normal oriented so the base lies on its positive side."""
        a = self.plane.normal
        return a if a @ self.base.anchor > 0 else -a

    @property
    def cone(self) -> LorenzCone:
        return LorenzCone(self.Q, axis_hint=self.branch_normal)

    def quadratic(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.Q, x)

    def branch_coordinate(self, x) -> np.ndarray:
        a = self.branch_normal
        return np.asarray(x, dtype=float) @ a / np.linalg.norm(a)

    def base_point(self, z) -> np.ndarray:
        return self.base.point(z)


def _dikin_base(ed: DikinEllipsoid, plane: Hyperplane) -> EllipsoidSlice:
    return slice_ellipsoid(ed, plane)


def _check_through_center(ed: DikinEllipsoid, a: np.ndarray) -> float:
    c = ed.center
    alpha = float(a @ c)
    if abs(alpha) <= 1e-10 * np.linalg.norm(a) * np.linalg.norm(c):
        raise DegenerateConeError(
            "plane normal is orthogonal to the center; the cone vertex would be at infinity"
        )
    return alpha


def construct_general(ed: DikinEllipsoid, plane: Hyperplane) -> ConeConstruction:
    """Cone from the origin through ``plane ∩ ed`` for any plane through the center.

    ``Q = D - ((1 + c^T D~ c)/alpha^2) a a^T - (a c^T D H~ + H~ D c a^T)/alpha``
    with ``D = C^{-2}``, ``H~ = H (H^T H)^{-1} H^T``, ``D~ = D - (D H~ + H~ D)``
    and ``alpha = a^T c``.
    """
    if plane.dim != ed.dim:
        raise DimensionError("plane and ellipsoid dimensions differ")
    base = _dikin_base(ed, plane)
    a = plane.normal
    alpha = _check_through_center(ed, a)
    c = ed.center
    D = ed.scaling
    Ht = plane.projector()
    Dt = D - (D @ Ht + Ht @ D)
    v = Ht @ (D @ c)  # (c^T D H~)^T
    mu = (1.0 + c @ Dt @ c) / alpha**2
    Q = D - mu * np.outer(a, a) - (np.outer(a, v) + np.outer(v, a)) / alpha
    return ConeConstruction("general", Q, ed, plane, base)


def _axis_plane(c: np.ndarray, i: int) -> Hyperplane:
    n = c.size
    e = np.eye(n)
    return Hyperplane(e[i], c[i], np.delete(e, i, axis=1))


def construct_axis(c, i: int = 0) -> ConeConstruction:
    """Closed-form cone for the plane ``x_i = c_i`` (``i`` is 0-based).

    ``Q_i = D + ((n-3)/c_i^2) E_ii - sum_{j != i} (E_ij + E_ji) / (c_i c_j)``.
    """
    c = _positive_vector(c)
    n = c.size
    if n < 2:
        raise DimensionError("n must be >= 2")
    i = _axis_index(i, n)
    Q = np.diag(1.0 / c**2)
    Q[i, i] += (n - 3) / c[i] ** 2
    off = -1.0 / (c[i] * c)
    off[i] = Q[i, i]
    Q[i, :] = off
    Q[:, i] = off
    ed = DikinEllipsoid(c)
    plane = _axis_plane(c, i)
    return ConeConstruction("axis", Q, ed, plane, _dikin_base(ed, plane))


def construct_ones(c) -> ConeConstruction:
    """Closed-form cone for the plane ``e^T x = e^T c``.

    ``Q_ij = D_ij + (n-1)/s^2 - (1/c_i + 1/c_j)/s`` with ``s = e^T c``.
    """
    c = _positive_vector(c)
    n = c.size
    if n < 2:
        raise DimensionError("n must be >= 2")
    s = c.sum()
    r = 1.0 / c
    Q = np.diag(r**2) + (n - 1) / s**2 - (r[:, None] + r[None, :]) / s
    ed = DikinEllipsoid(c)
    plane = Hyperplane(np.ones(n), s, ones_complement_basis(n))
    return ConeConstruction("ones", Q, ed, plane, _dikin_base(ed, plane))


def construct_tangent_sphere(c) -> ConeConstruction:
    """Cone from the origin tangent to the unit sphere centered at ``c``.

    ``Q = I - c c^T / (||c||^2 - 1)``; it touches the sphere along the plane
    ``c^T x = ||c||^2 - 1``.
    """
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    if n < 2:
        raise DimensionError("n must be >= 2")
    if not np.all(np.isfinite(c)):
        raise InvalidInputError("non-finite center")
    gap = float(c @ c) - 1.0
    if gap <= 0.0:
        raise DegenerateConeError("origin lies inside the sphere; no tangent cone exists")
    if gap < 1e-8:
        raise NearTangencyError("origin is numerically on the sphere (||c||^2 - 1 < 1e-8)")
    Q = np.eye(n) - np.outer(c, c) / gap
    t = gap / (c @ c)
    H = complementary_basis(c)
    plane = Hyperplane(c, gap, H)
    # the touching circle: center t*c, radius^2 = 1 - 1/||c||^2 = t
    base = EllipsoidSlice(t * c, H, (H.T @ H) / t)
    sphere = Ellipsoid(np.eye(n), -c)
    return ConeConstruction("sphere", Q, sphere, plane, base, beta=t)


def verify_conditions(cc: ConeConstruction) -> ConditionResiduals:
    """Residuals of the three base-matching conditions for ``cc``."""
    Q = cc.Q
    H = cc.base.basis
    x0 = cc.base.anchor
    beta = cc.beta
    QH = Q @ H
    return ConditionResiduals(
        float(np.linalg.norm(H.T @ QH - beta * cc.base.gram)),
        float(np.linalg.norm(x0 @ QH)),
        float(abs(x0 @ Q @ x0 + beta)),
    )


class SandwichDecomposition(NamedTuple):
    mu: float
    z: np.ndarray
    residual: float


def sandwich_decompose(X, a, H) -> SandwichDecomposition:
    """Write symmetric ``X`` with ``H^T X H = 0`` as ``mu a a^T + a z^T H^T + H z a^T``."""
    X = _check_symmetric(X)
    a = np.asarray(a, dtype=float).ravel()
    H = np.asarray(H, dtype=float)
    n = a.size
    if X.shape != (n, n) or H.shape != (n, n - 1):
        raise DimensionError("inconsistent shapes for X, a, H")
    xnorm = np.linalg.norm(X, 2)
    if np.linalg.norm(H.T @ X @ H, 2) > 1e-8 * xnorm:
        raise NotInKernelError("H^T X H is not zero")
    a2 = a @ a
    if a2 == 0.0:
        raise InvalidInputError("a must be nonzero")
    Xa = X @ a
    mu = float(a @ Xa / a2**2)
    z = np.linalg.solve(H.T @ H, H.T @ Xa) / a2
    Hz = H @ z
    recon = mu * np.outer(a, a) + np.outer(a, Hz) + np.outer(Hz, a)
    return SandwichDecomposition(mu, z, float(np.linalg.norm(X - recon, 2)))


@dataclass(frozen=True)
class StandardizingTransform:
    """``x -> P^{-1} x + shift`` carrying a cone (ellipsoid) to standard form.

    For cones ``P^T Q P = diag(1, ..., 1, -1)`` and the kept branch lands in
    ``x_n >= 0``; for ellipsoids ``P^T Q P = I`` and the image is the unit ball.
    """

    P: np.ndarray
    shift: np.ndarray
    target: str

    def forward(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.linalg.solve(self.P, x.T).T + self.shift

    def inverse(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return (y - self.shift) @ self.P.T


def standardize(obj) -> StandardizingTransform:
    """Congruence ``P`` built from the eigendecomposition ``Q = U diag(lam) U^T``.

    ``P = U diag(1/sqrt|lam|)`` with positive eigenvalues first. The shift is
    ``(Q P)^{-1} p`` so the vertex (center) goes to the origin.
    """
    if isinstance(obj, ConeConstruction):
        obj = obj.cone
    if isinstance(obj, LorenzCone):
        lam, U = _lorenz_eig(obj.Q)
        order = np.r_[np.arange(1, lam.size), 0]
        lam, U = lam[order], U[:, order].copy()
        if obj.axis_hint is not None and U[:, -1] @ obj.axis_hint < 0:
            U[:, -1] = -U[:, -1]
        target = "cone"
    elif isinstance(obj, (Ellipsoid, DikinEllipsoid)):
        if isinstance(obj, DikinEllipsoid):
            obj = obj.as_ellipsoid()
        lam, U = np.linalg.eigh(obj.Q)
        target = "ellipsoid"
    else:
        raise InvalidInputError(f"cannot standardize {type(obj).__name__}")
    P = U / np.sqrt(np.abs(lam))
    shift = np.linalg.solve(obj.Q @ P, obj.p)
    return StandardizingTransform(P, shift, target)


class Membership(enum.IntEnum):
    INTERIOR = -1
    BOUNDARY = 0
    EXTERIOR = 1


class MembershipResult(NamedTuple):
    status: Membership
    value: float  # defining quadratic at x; negative inside


def _band(obj, x):
    x = np.asarray(x, dtype=float)
    if isinstance(obj, LorenzCone):
        x = x - obj.vertex
    qscale = max(1.0, float(np.abs(obj.Q).max()))
    sq = np.sum(x * x, axis=-1)
    return _BAND * (1.0 + sq) * qscale, _BAND * (1.0 + np.sqrt(sq))


def classify(obj, X) -> np.ndarray:
    """Vectorized membership codes (-1 interior, 0 boundary, 1 exterior) for rows of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(obj, DikinEllipsoid):
        obj = obj.as_ellipsoid()
    q = obj.quadratic(X)
    if isinstance(obj, (Ellipsoid, DikinEllipsoid)):
        q = q - 1.0
    band, lin_band = _band(obj, X)
    codes = np.where(q < -band, Membership.INTERIOR, np.where(q > band, Membership.EXTERIOR,
                                                              Membership.BOUNDARY)).astype(int)
    side = obj.branch_coordinate(X) if hasattr(obj, "branch_coordinate") else None
    if side is not None:
        codes = np.where((codes <= 0) & (side < -lin_band), int(Membership.EXTERIOR), codes)
    return codes


def membership(obj, x) -> MembershipResult:
    """Classify ``x`` against a cone (or ellipsoid) by the sign of its defining quadratic.

    For ellipsoids the reported value is ``quadratic(x) - 1``.

    Values within ``1e-10 (1 + ||x||^2) max(1, max|Q|)`` of zero count as
    boundary. For constructions (and hinted cones) points on the opposite
    branch are exterior.
    """
    x = np.asarray(x, dtype=float).ravel()
    code = int(classify(obj, x[None, :])[0])
    q = float(obj.quadratic(x))
    if isinstance(obj, (Ellipsoid, DikinEllipsoid)):
        q -= 1.0
    return MembershipResult(Membership(code), q)
