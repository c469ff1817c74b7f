"""Geometry of the disc and H^2: metrics, kernels, Blaschke products, Carleson norms.

Carleson norms of atomic measures are estimated on a dyadic window grid:
windows ``Q(theta0, delta) = {r e^{i theta}: r >= 1 - delta, |theta - theta0| <= delta}``
with ``delta = 2**-m`` and ``theta0`` stepping by ``delta/2``.  Every grid
window is a genuine Carleson window, so the reported supremum is a guaranteed
lower bound on the true norm; the grid is refined until no window can contain
a point, which caps the achievable ratio exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import (
    CurveTouchesBoundary,
    DegenerateDenominator,
    DuplicatePoints,
)

_DISTINCT_TOL = 1e-15


# ---------------------------------------------------------------------------
# point sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointSequence:
    """A finite ordered list of points of the open disc."""

    points: np.ndarray
    distinct: bool = True

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        if np.any(np.abs(pts) >= 1):
            raise ValueError("all points must lie in the open disc")
        if self.distinct and len(pts) > 1:
            if _min_pairwise_distance(pts) < _DISTINCT_TOL:
                raise DuplicatePoints("points closer than 1e-15 in a distinct sequence")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


PointsLike = Union[PointSequence, Sequence[complex], np.ndarray]


def as_points(z: PointsLike, distinct: bool = True) -> PointSequence:
    if isinstance(z, PointSequence):
        return z
    return PointSequence(np.asarray(list(z), dtype=complex), distinct=distinct)


def _min_pairwise_distance(pts: np.ndarray) -> float:
    diff = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())


# ---------------------------------------------------------------------------
# metrics and kernels
# ---------------------------------------------------------------------------

def pseudo_distance(z: complex, w: complex) -> float:
    """rho(z, w) = |z - w| / |1 - conj(z) w|."""
    z, w = complex(z), complex(w)
    num = abs(z - w)
    if num == 0:
        return 0.0
    den = abs(1 - z.conjugate() * w)
    if den < 1e-300:
        raise DegenerateDenominator(f"|1 - conj(z) w| ~ 0 at z={z}, w={w}")
    return num / den


def pseudo_distance_array(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Vectorised rho, clipped to [0, 1]; rho = 0 wherever z == w exactly.

    Safe on boundary samples where the denominator underflows: rho on the
    closed bidisc never exceeds 1, so clipping cannot weaken suprema.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    num = np.abs(z - w)
    den = np.abs(1 - np.conj(z) * w)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = num / np.maximum(den, 1e-300)
    rho = np.where(num == 0, 0.0, rho)
    return np.clip(np.where(np.isfinite(rho), rho, 1.0), 0.0, 1.0)


def hyperbolic_distance(z: complex, w: complex) -> float:
    """d(z, w) = log((1 + rho)/(1 - rho)); rho = (1 - e^-d)/(1 + e^-d)."""
    rho = pseudo_distance(z, w)
    if rho >= 1:
        raise ValueError("hyperbolic distance requires both points inside the disc")
    return math.log1p(rho) - math.log1p(-rho)


def kernel_norm_sq(w: complex) -> float:
    """Squared H^2 norm of the reproducing kernel k_w(z) = 1/(1 - conj(w) z)."""
    w = complex(w)
    mod2 = abs(w) ** 2
    if mod2 >= 1:
        raise ValueError("kernel norm requires |w| < 1")
    return 1.0 / (1.0 - mod2)


def kernel_gram(points: PointsLike) -> np.ndarray:
    """Gram matrix G[j, k] = <k_{z_k}, k_{z_j}> = 1/(1 - conj(z_j) z_k)."""
    z = as_points(points, distinct=False).points
    return 1.0 / (1.0 - np.conj(z)[:, None] * z[None, :])


# ---------------------------------------------------------------------------
# Blaschke products
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product with the prescribed zeros."""

    zeros: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.zeros, dtype=complex).ravel()
        if np.any(np.abs(z) >= 1):
            raise ValueError("Blaschke zeros must lie in the open disc")
        z.setflags(write=False)
        object.__setattr__(self, "zeros", z)

    @property
    def degree(self) -> int:
        return len(self.zeros)


def blaschke_eval(product: BlaschkeProduct, z) -> np.ndarray:
    """Evaluate prod_a (|a|/a)(a - z)/(1 - conj(a) z), with factor z when a = 0."""
    zz = np.asarray(z, dtype=complex)
    scalar = zz.ndim == 0
    zz = np.atleast_1d(zz)
    out = np.ones_like(zz)
    for a in product.zeros:
        if a == 0:
            out = out * zz
        else:
            out = out * (abs(a) / a) * (a - zz) / (1 - a.conjugate() * zz)
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# hyperbolic length
# ---------------------------------------------------------------------------

def hyperbolic_length(curve: Sequence[complex]) -> float:
    """Composite trapezoid for 2 * integral |dz| / (1 - |z|^2) along samples."""
    pts = np.asarray(list(curve), dtype=complex)
    if len(pts) < 2:
        return 0.0
    if np.any(np.abs(pts) >= 1 - 1e-12):
        raise CurveTouchesBoundary("curve sample within 1e-12 of the unit circle")
    g = 2.0 / (1.0 - np.abs(pts) ** 2)
    seg = np.abs(np.diff(pts))
    return float(np.sum(seg * (g[:-1] + g[1:]) / 2.0))


def hyperbolic_length_refined(parametrize, t0: float, t1: float,
                              rel_tol: float = 1e-6, start: int = 64,
                              max_doublings: int = 22) -> float:
    """Refine a parametrised curve by doubling until the length is stable."""
    n = start
    prev = None
    for _ in range(max_doublings):
        t = np.linspace(t0, t1, n + 1)
        length = hyperbolic_length(parametrize(t))
        if prev is not None and abs(length - prev) <= rel_tol * max(abs(length), 1e-300):
            return length
        prev = length
        n *= 2
    return prev


def cumulative_hyperbolic_length(pts: np.ndarray) -> np.ndarray:
    """Running hyperbolic length along a sampled path (first entry 0)."""
    g = 2.0 / (1.0 - np.abs(pts) ** 2)
    seg = np.abs(np.diff(pts)) * (g[:-1] + g[1:]) / 2.0
    return np.concatenate([[0.0], np.cumsum(seg)])


# ---------------------------------------------------------------------------
# separation, Carleson norm, interpolation constant
# ---------------------------------------------------------------------------

def _log_rho_matrix(pts: np.ndarray) -> np.ndarray:
    num = np.abs(pts[:, None] - pts[None, :])
    den = np.abs(1 - np.conj(pts)[:, None] * pts[None, :])
    with np.errstate(divide="ignore"):
        lr = np.log(num) - np.log(den)
    np.fill_diagonal(lr, 0.0)
    return lr


def uniform_separation(points: PointsLike) -> float:
    """delta(Z) = inf_j prod_{k != j} rho(z_j, z_k); empty products are 1."""
    seq = as_points(points, distinct=True)
    pts = seq.points
    if len(pts) <= 1:
        return 1.0
    if _min_pairwise_distance(pts) < _DISTINCT_TOL:
        raise DuplicatePoints("uniform separation requires distinct points")
    # products over many near-unit factors: run in the log domain
    log_products = _log_rho_matrix(pts).sum(axis=1)
    return float(np.exp(log_products.min()))


def _separation_or_zero(pts: np.ndarray) -> float:
    if len(pts) <= 1:
        return 1.0
    if _min_pairwise_distance(pts) < _DISTINCT_TOL:
        return 0.0
    return float(np.exp(_log_rho_matrix(pts).sum(axis=1).min()))


@dataclass(frozen=True)
class CarlesonEstimate:
    """Window-grid supremum and the separation-based logarithmic bound."""

    geometric: float
    log_bound: float
    delta_min: float
    windows_checked: int

    def __post_init__(self):
        if self.geometric < 0:
            raise ValueError("Carleson estimate must be non-negative")


def carleson_norm(points: PointsLike) -> CarlesonEstimate:
    """Estimate the Carleson norm of nu_Z = sum_j (1 - |z_j|^2) delta_{z_j}.

    The geometric value drives certificates; the log bound
    ``1 + log(1/delta(Z))`` is reported alongside (infinite for sequences
    with repeats).
    """
    seq = as_points(points, distinct=False)
    pts = seq.points
    if len(pts) == 0:
        raise ValueError("carleson_norm requires a nonempty sequence")
    masses = 1.0 - np.abs(pts) ** 2
    gaps = 1.0 - np.abs(pts)
    angles = np.angle(pts)

    best = 0.0
    windows = 0
    m = 0
    delta = 1.0
    while m <= 52:
        delta = 2.0 ** (-m)
        admissible = gaps <= delta
        if not np.any(admissible):
            break
        step = delta / 2.0
        k_lo = math.ceil(-math.pi / step)
        k_hi = math.floor(math.pi / step)
        acc: dict = {}
        for theta, mass in zip(angles[admissible], masses[admissible]):
            for shift in (-2 * math.pi, 0.0, 2 * math.pi):
                th = theta + shift
                lo = max(k_lo, math.ceil((th - delta) / step - 1e-12))
                hi = min(k_hi, math.floor((th + delta) / step + 1e-12))
                for k in range(lo, hi + 1):
                    acc[k] = acc.get(k, 0.0) + mass
        if acc:
            windows += len(acc)
            best = max(best, max(acc.values()) / delta)
        m += 1

    delta_z = _separation_or_zero(pts)
    log_bound = math.inf if delta_z == 0 else 1.0 + math.log(1.0 / delta_z)
    return CarlesonEstimate(geometric=best, log_bound=log_bound,
                            delta_min=delta, windows_checked=windows)


def interpolation_constant_bound(points: PointsLike) -> float:
    """Shapiro-Shields bound M(Z) <= sqrt(||nu_Z||_C) / delta(Z)."""
    seq = as_points(points, distinct=True)
    delta = uniform_separation(seq)
    est = carleson_norm(seq)
    return math.sqrt(est.geometric) / delta
