"""Arrowhead eigenvalues, inertia, and closed-form spectral facts for cone matrices."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .errors import DimensionError, InvalidInputError

__all__ = [
    "ArrowheadMatrix",
    "Inertia",
    "RankOneSpectrum",
    "SpectralReport",
    "arrowhead_charpoly",
    "arrowhead_eigenvalues",
    "axis_cone_arrowhead",
    "det_axis_cone",
    "det_identity_plus_rank_one",
    "equal_c_spectrum",
    "inertia",
    "lambda1_bounds_axis_cone",
    "rank_one_spectrum",
    "spectral_report",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ArrowheadMatrix:
    """Symmetric ``[[alpha, p^T], [p, diag(b)]]``.

    ``b`` is stored sorted in descending order; ``perm`` records the
    reordering (``b_sorted = b_given[perm]``) and ``p`` is permuted with it.
    """

    alpha: float
    p: np.ndarray
    b: np.ndarray
    perm: np.ndarray = field(default=None)

    def __post_init__(self):
        p = np.array(self.p, dtype=float).ravel()
        b = np.array(self.b, dtype=float).ravel()
        if p.size != b.size:
            raise DimensionError("p and b must have the same length")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(b)) and np.isfinite(self.alpha)):
            raise InvalidInputError("non-finite arrowhead entries")
        order = np.argsort(-b, kind="stable")
        perm = order if self.perm is None else np.asarray(self.perm)[order]
        p, b = p[order], b[order]
        for arr in (p, b, perm):
            arr.flags.writeable = False
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "perm", perm)

    @property
    def dim(self) -> int:
        return self.b.size + 1

    def to_dense(self) -> np.ndarray:
        n = self.dim
        M = np.zeros((n, n))
        M[0, 0] = self.alpha
        M[0, 1:] = self.p
        M[1:, 0] = self.p
        M[1:, 1:] = np.diag(self.b)
        return M

    @classmethod
    def from_dense(cls, M, atol: float = 0.0) -> "ArrowheadMatrix":
        """Read an arrowhead matrix; off-arrow entries must be ``<= atol``."""
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
            raise DimensionError("arrowhead matrix must be square")
        inner = M[1:, 1:] - np.diag(np.diag(M[1:, 1:]))
        if np.any(np.abs(inner) > atol) or np.any(np.abs(M[0, 1:] - M[1:, 0]) > atol):
            raise InvalidInputError("matrix is not a symmetric arrowhead")
        return cls(M[0, 0], M[0, 1:], np.diag(M)[1:].copy())


def _products_excluding(factors: np.ndarray) -> np.ndarray:
    # prod_{k != j} factors[k] without dividing, so zero factors are harmless
    m = factors.size
    prefix = np.ones(m + 1)
    suffix = np.ones(m + 1)
    prefix[1:] = np.cumprod(factors)
    suffix[:-1] = np.cumprod(factors[::-1])[::-1]
    return prefix[:-1] * suffix[1:]


def arrowhead_charpoly(m: ArrowheadMatrix, lam: float, return_scale: bool = False):
    """``det(lam I - D)`` for an arrowhead matrix ``D``.

    ``(lam - alpha) prod_k (lam - b_k) - sum_j p_j^2 prod_{k != j} (lam - b_k)``.

    With ``return_scale=True`` also returns the same expression with every
    factor replaced by the magnitudes of its operands
    (``|lam| + |alpha|``, ``|lam| + |b_k|``, ``p_j^2``). That bounds the
    rounding error of the evaluation, and of a one-ulp change in ``lam``.
    """
    lam = float(lam)
    d = lam - m.b
    lead = (lam - m.alpha) * np.prod(d)
    value = float(lead - np.sum(m.p**2 * _products_excluding(d)))
    if return_scale:
        mag = abs(lam) + np.abs(m.b)
        scale = (abs(lam) + abs(m.alpha)) * np.prod(mag) + np.sum(m.p**2 * _products_excluding(mag))
        return value, float(scale)
    return value


def _secular_roots(alpha: float, q: np.ndarray, d: np.ndarray, max_iter: int = 256) -> np.ndarray:
    """Roots of ``lam - alpha - sum q^2 / (lam - d)`` for strictly descending ``d``, nonzero ``q``."""
    k = d.size
    if k == 0:
        return np.array([alpha])
    qn = np.linalg.norm(q)
    q2 = q**2
    lo = np.empty(k + 1)
    hi = np.empty(k + 1)
    # root 0 lies above d_0, root j in (d_j, d_{j-1}), root k below d_{k-1}
    lo[:k] = d
    hi[1:] = d
    hi[0] = max(alpha, d[0]) + qn
    lo[k] = min(alpha, d[-1]) - qn
    # widen the outer brackets by a hair so rounding in the bound cannot exclude the root
    hi[0] += 4 * _EPS * max(1.0, abs(hi[0]))
    lo[k] -= 4 * _EPS * max(1.0, abs(lo[k]))

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        done = (mid <= lo) | (mid >= hi)
        if np.all(done):
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            f = mid - alpha - np.sum(q2[None, :] / (mid[:, None] - d[None, :]), axis=1)
        neg = (f < 0.0) & ~done
        pos = (f >= 0.0) & ~done
        lo = np.where(neg, mid, lo)
        hi = np.where(pos, mid, hi)
    return 0.5 * (lo + hi)


def arrowhead_eigenvalues(m: ArrowheadMatrix) -> np.ndarray:
    """All eigenvalues of an arrowhead matrix, in descending order.

    Entries of ``p`` that vanish, and groups of repeated ``b_k``, are deflated
    first: each pins an eigenvalue exactly at the corresponding ``b_k``. The
    reduced problem has strictly interlacing roots, found by bisection on the
    secular function inside each interlacing bracket.
    """
    b, p, alpha = m.b, m.p, m.alpha
    scale = max(abs(alpha), np.abs(b).max(initial=0.0), np.linalg.norm(p))
    if scale == 0.0:
        return np.zeros(m.dim)
    pinned = []
    keep_d, keep_q = [], []
    tiny = 8 * _EPS * scale
    i = 0
    while i < b.size:
        j = i
        while j + 1 < b.size and b[i] - b[j + 1] <= tiny:
            j += 1
        group_p = p[i:j + 1]
        group_b = b[i:j + 1]
        live = np.abs(group_p) > tiny
        pinned.extend(group_b[~live])
        if np.any(live):
            # a rotation inside the group collapses it to one coupled entry
            pinned.extend(group_b[live][1:])
            keep_d.append(group_b[live][0])
            keep_q.append(np.linalg.norm(group_p[live]))
        i = j + 1
    roots = _secular_roots(alpha, np.array(keep_q), np.array(keep_d))
    eig = np.concatenate([roots, np.array(pinned, dtype=float)])
    return np.sort(eig)[::-1]


def axis_cone_arrowhead(c, i: int = 0) -> ArrowheadMatrix:
    """Arrowhead form of the axis-plane cone matrix after moving index ``i`` first."""
    c = _positive_vector(c)
    n = c.size
    i = _axis_index(i, n)
    others = np.delete(c, i)
    return ArrowheadMatrix((n - 2) / c[i] ** 2, -1.0 / (c[i] * others), 1.0 / others**2,
                           perm=np.delete(np.arange(n), i))


class Inertia(NamedTuple):
    positive: int
    zero: int
    negative: int


def _check_symmetric(Q) -> np.ndarray:
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise InvalidInputError("expected a square matrix")
    if not np.all(np.isfinite(Q)):
        raise InvalidInputError("non-finite matrix entries")
    scale = np.abs(Q).max(initial=0.0)
    if np.abs(Q - Q.T).max(initial=0.0) > 1e-12 * scale:
        raise InvalidInputError("matrix is not symmetric")
    return 0.5 * (Q + Q.T)


def inertia(Q, rtol: float = 1e-10) -> Inertia:
    """Counts of positive, zero and negative eigenvalues.

    An eigenvalue counts as zero when its magnitude is at most
    ``rtol * max |lambda|``.
    """
    lam = np.linalg.eigvalsh(_check_symmetric(Q))
    tau = rtol * np.abs(lam).max(initial=0.0)
    return Inertia(int(np.sum(lam > tau)), int(np.sum(np.abs(lam) <= tau)), int(np.sum(lam < -tau)))


def _positive_vector(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.ndim != 1 or c.size < 1:
        raise InvalidInputError("expected a nonempty vector")
    if not np.all(np.isfinite(c)) or np.any(c <= 0.0):
        raise InvalidInputError("all entries must be finite and strictly positive")
    return c


def _axis_index(i: int, n: int) -> int:
    i = int(i)
    if not 0 <= i < n:
        raise InvalidInputError(f"axis index {i} out of range for n={n}")
    return i


def det_axis_cone(c) -> float:
    """``det Q_i = -prod_k 1/c_k^2`` (independent of the axis ``i``)."""
    c = _positive_vector(c)
    return -float(np.prod(1.0 / c**2))


def det_identity_plus_rank_one(beta: float, alpha: float, n: int) -> float:
    """``det(beta I + alpha e e^T) = (1 + n alpha / beta) beta^n``.

    Evaluated as ``beta^n + n alpha beta^(n-1)`` so ``beta = 0`` is covered.
    """
    n = int(n)
    if n < 1:
        raise DimensionError("n must be >= 1")
    beta, alpha = float(beta), float(alpha)
    return beta**n + n * alpha * beta ** (n - 1)


def lambda1_bounds_axis_cone(c, i: int = 0) -> Tuple[float, float]:
    """Lower and upper bounds on the largest eigenvalue of ``Q_i``.

    Both are the larger eigenvalue of the 2x2 matrix
    ``[[(n-2)/c_i^2, ||p||], [||p||, 1/c_j^2]]`` with ``c_j`` replaced by the
    largest (lower bound) or smallest (upper bound) of the other centers.
    """
    c = _positive_vector(c)
    n = c.size
    if n < 2:
        raise DimensionError("bounds need n >= 2")
    i = _axis_index(i, n)
    ci = c[i]
    others = np.delete(c, i)
    s = np.sum(1.0 / others**2)

    def bound(cj):
        return 0.5 * ((n - 2) / ci**2 + 1.0 / cj**2
                      + np.sqrt(((n - 2) / ci - ci / cj**2) ** 2 + 4.0 * s) / ci)

    return float(bound(others.max())), float(bound(others.min()))


@dataclass(frozen=True)
class RankOneSpectrum:
    """Spectrum of ``a c^T``: one eigenvalue ``a^T c`` and ``n - 1`` zeros.

    ``defective`` marks the nilpotent case ``a^T c = 0`` with ``a, c != 0``,
    where every eigenvalue is zero but the matrix is not.
    """

    eigenvalue: float
    multiplicity: int
    zero_multiplicity: int
    defective: bool

    def eigenvalues(self) -> np.ndarray:
        return np.concatenate([np.full(self.multiplicity, self.eigenvalue),
                               np.zeros(self.zero_multiplicity)])


def rank_one_spectrum(a, c=None) -> RankOneSpectrum:
    """Eigenvalue structure of ``a c^T`` (``c`` defaults to ``a``)."""
    a = np.asarray(a, dtype=float).ravel()
    c = a if c is None else np.asarray(c, dtype=float).ravel()
    if a.size != c.size:
        raise DimensionError("a and c must have the same length")
    na, nc = np.linalg.norm(a), np.linalg.norm(c)
    if na == 0.0 and nc == 0.0:
        raise InvalidInputError("a and c cannot both be zero")
    n = a.size
    lam = float(a @ c)
    if abs(lam) <= 1e-12 * na * nc:
        return RankOneSpectrum(0.0, 0, n, defective=bool(na > 0.0 and nc > 0.0))
    return RankOneSpectrum(lam, 1, n - 1, defective=False)


def equal_c_spectrum(c: float, n: int) -> np.ndarray:
    """Spectrum of the ones-plane cone matrix at ``c_1 = ... = c_n = c``.

    ``1/c^2`` with multiplicity ``n - 1`` and ``-1/(n c^2)`` once, descending.
    """
    c, n = float(c), int(n)
    if not c > 0.0:
        raise InvalidInputError("c must be positive")
    if n < 2:
        raise DimensionError("n must be >= 2")
    return np.concatenate([np.full(n - 1, 1.0 / c**2), [-1.0 / (n * c**2)]])


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    inertia: Inertia
    det_numeric: float
    det_closed_form: Optional[float] = None
    lambda1_lower: Optional[float] = None
    lambda1_upper: Optional[float] = None

    @property
    def det_agrees(self) -> Optional[bool]:
        if self.det_closed_form is None:
            return None
        return bool(abs(self.det_closed_form - self.det_numeric) <= 1e-8 * max(1.0, abs(self.det_numeric)))

    @property
    def bounds_hold(self) -> Optional[bool]:
        if self.lambda1_lower is None:
            return None
        lam1 = self.eigenvalues[0]
        slack = 1e-9 * max(1.0, abs(lam1))
        return bool(self.lambda1_lower - slack <= lam1 <= self.lambda1_upper + slack)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "inertia": list(self.inertia),
            "det_numeric": self.det_numeric,
            "det_closed_form": self.det_closed_form,
            "det_agrees": self.det_agrees,
            "lambda1_lower": self.lambda1_lower,
            "lambda1_upper": self.lambda1_upper,
            "bounds_hold": self.bounds_hold,
        }


def spectral_report(Q, det_closed_form: Optional[float] = None,
                    lambda1_bounds: Optional[Tuple[float, float]] = None) -> SpectralReport:
    """Numeric spectrum of ``Q`` alongside whatever closed forms are known."""
    Q = _check_symmetric(Q)
    eig = np.sort(np.linalg.eigvalsh(Q))[::-1]
    lower, upper = lambda1_bounds if lambda1_bounds is not None else (None, None)
    return SpectralReport(
        eigenvalues=eig,
        inertia=inertia(Q),
        det_numeric=float(np.linalg.det(Q)),
        det_closed_form=None if det_closed_form is None else float(det_closed_form),
        lambda1_lower=None if lower is None else float(lower),
        lambda1_upper=None if upper is None else float(upper),
    )
