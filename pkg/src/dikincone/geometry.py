"""Hyperplanes, complementary bases, Dikin ellipsoids and their central slices.

A hyperplane is kept in both of its usual forms at once: the normal/offset
pair ``a^T x = alpha`` and the affine parametrization ``x = x0 + H z`` where
the columns of ``H`` span the orthogonal complement of ``a``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DimensionError, InvalidInputError, PreconditionError

__all__ = [
    "Hyperplane",
    "DikinEllipsoid",
    "Ellipsoid",
    "EllipsoidSlice",
    "complementary_basis",
    "ones_complement_basis",
    "distance_to_hyperplane",
    "slice",
    "sample_boundary",
    "sample_interior",
]

_ORTHO_TOL = 1e-12
_CENTER_TOL = 1e-10


def _readonly(x, ndim=None):
    arr = np.array(x, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise InvalidInputError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("non-finite entries")
    arr.flags.writeable = False
    return arr


def complementary_basis(a) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``a``.

    The frame is completed with a single Householder reflection that maps
    ``a / ||a||`` onto a multiple of ``e_1``; the remaining ``n - 1`` columns
    of the reflector are returned.

    Parameters
    ----------
    a : array_like, shape (n,)
        Nonzero normal vector, ``n >= 2``.

    Returns
    -------
    H : ndarray, shape (n, n - 1)
        ``a^T H = 0`` and ``H^T H = I``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 1:
        raise InvalidInputError("normal must be a vector")
    if a.size < 2:
        raise DimensionError("need n >= 2 for a complementary basis")
    norm = np.linalg.norm(a)
    if norm == 0.0 or not np.isfinite(norm):
        raise InvalidInputError("normal vector must be nonzero and finite")
    u = a / norm
    v = u.copy()
    v[0] += 1.0 if u[0] >= 0.0 else -1.0
    reflector = np.eye(a.size) - 2.0 * np.outer(v, v) / (v @ v)
    return reflector[:, 1:].copy()


def ones_complement_basis(n: int) -> np.ndarray:
    """Explicit orthonormal basis of ``e^perp`` for ``e = (1, ..., 1)``.

    Column ``i`` (1-based) is
    ``-(1/sqrt(i(i+1))) * (e_1 + ... + e_i) + sqrt(i/(i+1)) * e_{i+1}``,
    so the matrix is upper-Hessenberg-like with a growing block of equal
    negative entries above a single positive one.
    """
    n = int(n)
    if n < 2:
        raise DimensionError("ones_complement_basis needs n >= 2")
    H = np.zeros((n, n - 1))
    for i in range(1, n):
        H[:i, i - 1] = -1.0 / np.sqrt(i * (i + 1))
        H[i, i - 1] = np.sqrt(i) / np.sqrt(i + 1)
    return H


@dataclass(frozen=True)
class Hyperplane:
    """The set ``{x : a^T x = alpha}`` with a complementary basis ``H``."""

    normal: np.ndarray
    offset: float
    basis: np.ndarray

    def __post_init__(self):
        a = _readonly(self.normal, ndim=1)
        H = _readonly(self.basis, ndim=2)
        n = a.size
        if n < 2:
            raise DimensionError("hyperplanes need n >= 2")
        if H.shape != (n, n - 1):
            raise DimensionError(f"basis must be {n}x{n - 1}, got {H.shape}")
        na = np.linalg.norm(a)
        if na == 0.0:
            raise InvalidInputError("normal vector must be nonzero")
        col_norms = np.linalg.norm(H, axis=0)
        if np.any(col_norms == 0.0):
            raise InvalidInputError("basis has a zero column")
        # 1e-10 rather than 1e-12: bases built from rounded inputs drift slightly
        if np.any(np.abs(a @ H) > 1e-10 * na * col_norms):
            raise InvalidInputError("basis columns are not orthogonal to the normal")
        if np.linalg.matrix_rank(H) != n - 1:
            raise InvalidInputError("basis columns are linearly dependent")
        object.__setattr__(self, "normal", a)
        object.__setattr__(self, "basis", H)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_normal(cls, a, alpha: float = 0.0) -> "Hyperplane":
        """Hyperplane ``a^T x = alpha`` with a Householder orthonormal basis."""
        return cls(np.asarray(a, dtype=float), alpha, complementary_basis(a))

    @classmethod
    def through(cls, a, point, basis=None) -> "Hyperplane":
        """Hyperplane with normal ``a`` passing through ``point``."""
        a = np.asarray(a, dtype=float)
        if basis is None:
            basis = complementary_basis(a)
        return cls(a, float(a @ np.asarray(point, dtype=float)), basis)

    @property
    def dim(self) -> int:
        return self.normal.size

    @property
    def is_orthonormal(self) -> bool:
        H = self.basis
        return bool(np.allclose(H.T @ H, np.eye(H.shape[1]), rtol=0.0, atol=_ORTHO_TOL))

    def projector(self) -> np.ndarray:
        """``H (H^T H)^{-1} H^T``, the orthogonal projector onto ``a^perp``."""
        H = self.basis
        return H @ np.linalg.solve(H.T @ H, H.T)

    def contains(self, x, tol: float = _CENTER_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(abs(self.normal @ x - self.offset) <= tol * (1.0 + abs(self.offset)))

    def point(self, anchor, z) -> np.ndarray:
        """``anchor + H z``; ``anchor`` must lie on the plane."""
        return np.asarray(anchor, dtype=float) + self.basis @ np.asarray(z, dtype=float)


def distance_to_hyperplane(x, plane: Hyperplane) -> float:
    """Euclidean distance ``|a^T x - alpha| / ||a||``."""
    x = np.asarray(x, dtype=float)
    a = plane.normal
    return float(abs(a @ x - plane.offset) / np.linalg.norm(a))


@dataclass(frozen=True)
class DikinEllipsoid:
    """``{x : (x - c)^T C^{-2} (x - c) <= 1}`` with ``C = diag(c)``, ``c > 0``.

    Every point satisfies ``0 <= x_i <= 2 c_i``.
    """

    center: np.ndarray

    def __post_init__(self):
        c = _readonly(self.center, ndim=1)
        if c.size < 1:
            raise DimensionError("empty center")
        if np.any(c <= 0.0):
            raise InvalidInputError("Dikin center must be strictly positive")
        object.__setattr__(self, "center", c)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def scaling(self) -> np.ndarray:
        """``D = C^{-2}``."""
        return np.diag(1.0 / self.center**2)

    def quadratic(self, x) -> np.ndarray:
        """``(x - c)^T C^{-2} (x - c)``, vectorized over the last axis."""
        x = np.asarray(x, dtype=float)
        return np.sum(((x - self.center) / self.center) ** 2, axis=-1)

    def contains(self, x, tol: float = 1e-12) -> bool:
        return bool(self.quadratic(x) <= 1.0 + tol)

    def as_ellipsoid(self) -> "Ellipsoid":
        D = self.scaling
        return Ellipsoid(D, -D @ self.center)


@dataclass(frozen=True)
class Ellipsoid:
    """``{x : x^T Q x + 2 p^T x + rho <= 1}`` with ``Q`` positive definite.

    ``rho`` is pinned to ``p^T Q^{-1} p`` so the center is ``-Q^{-1} p`` and
    the set is the unit level set of ``(x - center)^T Q (x - center)``.
    Passing ``rho`` explicitly is allowed but it must match.
    """

    Q: np.ndarray
    p: Optional[np.ndarray] = None
    rho: Optional[float] = None

    def __post_init__(self):
        Q = _readonly(self.Q, ndim=2)
        n = Q.shape[0]
        if Q.shape != (n, n):
            raise DimensionError("Q must be square")
        if not np.allclose(Q, Q.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(Q).max())):
            raise InvalidInputError("Q must be symmetric")
        if np.linalg.eigvalsh(Q)[0] <= 0.0:
            raise InvalidInputError("ellipsoid matrix must be positive definite")
        p = np.zeros(n) if self.p is None else self.p
        p = _readonly(p, ndim=1)
        if p.size != n:
            raise DimensionError("p has the wrong length")
        rho = float(p @ np.linalg.solve(Q, p))
        if self.rho is not None and abs(float(self.rho) - rho) > 1e-10 * max(1.0, abs(rho)):
            raise InvalidInputError("rho must equal p^T Q^{-1} p")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    @property
    def center(self) -> np.ndarray:
        return -np.linalg.solve(self.Q, self.p)

    def quadratic(self, x) -> np.ndarray:
        """``x^T Q x + 2 p^T x + rho``, vectorized over the last axis."""
        x = np.asarray(x, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.Q, x) + 2.0 * x @ self.p + self.rho

    def contains(self, x, tol: float = 1e-12) -> bool:
        return bool(self.quadratic(x) <= 1.0 + tol)


@dataclass(frozen=True)
class EllipsoidSlice:
    """``{anchor + H z : z^T G z <= 1}``, an (n-1)-dimensional ellipsoid."""

    anchor: np.ndarray
    basis: np.ndarray
    gram: np.ndarray

    def __post_init__(self):
        x0 = _readonly(self.anchor, ndim=1)
        H = _readonly(self.basis, ndim=2)
        G = _readonly(self.gram, ndim=2)
        n = x0.size
        if H.shape != (n, n - 1) or G.shape != (n - 1, n - 1):
            raise DimensionError("inconsistent slice dimensions")
        if np.linalg.eigvalsh(G)[0] <= 0.0:
            raise InvalidInputError("slice gram matrix must be positive definite")
        object.__setattr__(self, "anchor", x0)
        object.__setattr__(self, "basis", H)
        object.__setattr__(self, "gram", G)

    @property
    def dim(self) -> int:
        return self.anchor.size

    def point(self, z) -> np.ndarray:
        """Map parameters ``z`` (shape (..., n-1)) to points in R^n."""
        z = np.asarray(z, dtype=float)
        return self.anchor + z @ self.basis.T

    def quadratic_z(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.einsum("...i,ij,...j->...", z, self.gram, z)

    def contains_z(self, z, tol: float = 1e-12) -> bool:
        return bool(self.quadratic_z(z) <= 1.0 + tol)

    def boundary_z(self, directions) -> np.ndarray:
        """Scale unit ``directions`` (rows) onto ``z^T G z = 1``."""
        L = np.linalg.cholesky(self.gram)
        # z = L^{-T} u gives z^T L L^T z = u^T u
        return np.linalg.solve(L.T, np.asarray(directions, dtype=float).T).T


def slice(ed: DikinEllipsoid, plane: Hyperplane) -> EllipsoidSlice:  # noqa: A001
    """Intersect a Dikin ellipsoid with a hyperplane through its center.

    With ``x = c + H z`` the ellipsoid inequality becomes
    ``z^T (H^T C^{-2} H) z <= 1``.
    """
    c = ed.center
    if plane.dim != ed.dim:
        raise DimensionError("plane and ellipsoid dimensions differ")
    gap = abs(plane.normal @ c - plane.offset)
    if gap > _CENTER_TOL * (1.0 + abs(plane.offset)):
        raise PreconditionError(
            f"plane does not pass through the ellipsoid center (|a^T c - alpha| = {gap:.3e})"
        )
    H = plane.basis
    G = (H / c[:, None] ** 2).T @ H
    G = 0.5 * (G + G.T)
    return EllipsoidSlice(c, H, G)


def _unit_directions(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((count, dim))
    norms = np.linalg.norm(g, axis=1)
    # a zero draw has probability 0 but would break normalization
    bad = norms == 0.0
    g[bad, 0] = 1.0
    norms[bad] = 1.0
    return g / norms[:, None]


SampleTarget = Union[DikinEllipsoid, EllipsoidSlice, Ellipsoid]


def sample_boundary(target: SampleTarget, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic points on the boundary surface of ``target``.

    Unit directions drawn from a seeded normal generator are pushed through
    the affine square root of the defining quadratic, so each returned row
    satisfies the defining inequality with equality up to rounding.

    Returns
    -------
    ndarray, shape (count, n)
    """
    count = int(count)
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(target, DikinEllipsoid):
        u = _unit_directions(rng, count, target.dim)
        return target.center + u * target.center
    if isinstance(target, EllipsoidSlice):
        u = _unit_directions(rng, count, target.dim - 1)
        return target.point(target.boundary_z(u))
    if isinstance(target, Ellipsoid):
        u = _unit_directions(rng, count, target.dim)
        L = np.linalg.cholesky(target.Q)
        return target.center + np.linalg.solve(L.T, u.T).T
    raise InvalidInputError(f"cannot sample {type(target).__name__}")


def sample_interior(target: SampleTarget, count: int, seed: int = 0) -> np.ndarray:
    """Uniform samples from the solid set (radius drawn as ``U^(1/d)``)."""
    count = int(count)
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(target, EllipsoidSlice):
        d = target.dim - 1
    else:
        d = target.dim
    u = _unit_directions(rng, count, d) * rng.random(count)[:, None] ** (1.0 / d)
    if isinstance(target, DikinEllipsoid):
        return target.center + u * target.center
    if isinstance(target, EllipsoidSlice):
        return target.point(target.boundary_z(u))
    if isinstance(target, Ellipsoid):
        L = np.linalg.cholesky(target.Q)
        return target.center + np.linalg.solve(L.T, u.T).T
    raise InvalidInputError(f"cannot sample {type(target).__name__}")
