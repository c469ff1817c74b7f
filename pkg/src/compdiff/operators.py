"""Truncated matrix models of (weighted) composition operators and their spectra.

On the monomial basis of H^2, column k of the matrix of ``g -> w * (g o phi)``
holds the Taylor coefficients of ``w * phi**k``.  Powers are built by iterated
truncated Cauchy products of the base coefficient vector (column-wise
recursion, never boundary-FFT extraction, whose ``r**-j`` factor would
amplify errors for maps that touch the circle).

The n-th singular value of the N x N truncation approximates the n-th
approximation number from below; every spectrum carries a stability horizon
``n*`` up to which values move by less than 1% when N doubles, and nothing
beyond the horizon should be fed into fits or certificates.
"""

from __future__ import annotations

import functools
import io
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import (
    BoundaryFixedOrigin,
    HorizonExceeded,
    NonFinite,
    NotSelfMap,
    NumericalBreakdown,
)
from .series import Symbol, eval_boundary, boundary_grid, evaluate, taylor_array, validate_self_map

_VALIDATION_SAMPLES = 2048
_HORIZON_RTOL = 1e-2


@functools.lru_cache(maxsize=256)
def _self_map_report(symbol: Symbol):
    return validate_self_map(symbol, _VALIDATION_SAMPLES)


def ensure_self_map(symbol: Symbol) -> None:
    report = _self_map_report(symbol)
    if not report.passed:
        raise NotSelfMap(
            f"{symbol.name}: boundary modulus reaches {report.max_modulus:.6g}")


def _ensure_bounded_weight(symbol: Symbol) -> float:
    values = np.abs(eval_boundary(symbol, boundary_grid(1024)))
    if not np.all(np.isfinite(values)) or values.max() > 1e8:
        raise NonFinite(f"weight {symbol.name} is not bounded on the disc")
    return float(values.max())


@dataclass(frozen=True)
class TruncatedOperator:
    """Dense N x N truncation with builder metadata."""

    matrix: np.ndarray
    symbol_name: str
    weight_name: Optional[str] = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("expected a square matrix")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def order(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SingularSpectrum:
    """Non-increasing singular values of a truncation, with stability metadata."""

    values: np.ndarray
    order: int
    horizon: Optional[int] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def sigma(self, n: int) -> float:
        """n-th singular value, 1-indexed."""
        if not 1 <= n <= len(self.values):
            raise IndexError(f"index {n} outside 1..{len(self.values)}")
        return float(self.values[n - 1])

    def sigma_checked(self, n: int) -> float:
        """Like :meth:`sigma` but refuses indices beyond the horizon."""
        if self.horizon is None or n > self.horizon:
            raise HorizonExceeded(
                f"sigma_{n} requested but horizon is {self.horizon}")
        return self.sigma(n)

    def __len__(self) -> int:
        return len(self.values)


# ---------------------------------------------------------------------------
# matrix builders
# ---------------------------------------------------------------------------

def _power_columns(base: np.ndarray, first: np.ndarray, n: int) -> np.ndarray:
    """Columns first, first*base, first*base^2, ... truncated to n coefficients."""
    out = np.empty((n, n), dtype=complex)
    out[:, 0] = first
    if n == 1:
        return out
    if n <= 128:
        col = first
        for k in range(1, n):
            col = np.convolve(col, base)[:n]
            out[:, k] = col
        return out
    size = 1 << (2 * n - 1).bit_length()
    fbase = np.fft.fft(base, size)
    col = first
    for k in range(1, n):
        col = np.fft.ifft(np.fft.fft(col, size) * fbase)[:n]
        out[:, k] = col
    return out


def composition_matrix(phi: Symbol, n: int) -> TruncatedOperator:
    """N x N truncation of C_phi : f -> f o phi; column k = taylor(phi**k, N)."""
    if n < 2:
        raise ValueError("truncation order must be at least 2")
    ensure_self_map(phi)
    base = taylor_array(phi, n)
    first = np.zeros(n, dtype=complex)
    first[0] = 1.0
    return TruncatedOperator(_power_columns(base, first, n), phi.name)


def weighted_composition_matrix(omega: Symbol, phi: Symbol, n: int) -> TruncatedOperator:
    """Truncation of g -> omega * (g o phi); column k = taylor(omega * phi**k, N)."""
    if n < 2:
        raise ValueError("truncation order must be at least 2")
    ensure_self_map(phi)
    _ensure_bounded_weight(omega)
    base = taylor_array(phi, n)
    first = taylor_array(omega, n)
    return TruncatedOperator(_power_columns(base, first, n), phi.name,
                             weight_name=omega.name)


def difference_matrix(phi: Symbol, psi: Symbol, n: int) -> TruncatedOperator:
    a = composition_matrix(phi, n)
    b = composition_matrix(psi, n)
    return TruncatedOperator(a.matrix - b.matrix, f"{phi.name} - {psi.name}")


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def singular_spectrum(op: TruncatedOperator) -> SingularSpectrum:
    """Dense SVD of the truncation, values sorted non-increasing."""
    if not np.all(np.isfinite(op.matrix)):
        raise NumericalBreakdown("matrix contains non-finite entries")
    try:
        values = np.linalg.svd(op.matrix, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown(str(exc)) from exc
    return SingularSpectrum(values, order=op.order)


def difference_spectrum(phi: Symbol, psi: Symbol, n: int) -> SingularSpectrum:
    """Spectrum of C_phi - C_psi at truncation N; identical symbols short-circuit to 0."""
    if phi.expr == psi.expr:
        ensure_self_map(phi)
        return SingularSpectrum(np.zeros(n), order=n, horizon=n)
    return singular_spectrum(difference_matrix(phi, psi, n))


def operator_norm_bound(phi: Symbol) -> float:
    """Classical bound ||C_phi|| <= sqrt((1 + |phi(0)|) / (1 - |phi(0)|))."""
    ensure_self_map(phi)
    p0 = abs(evaluate(phi, 0.0))
    if p0 >= 1:
        raise BoundaryFixedOrigin(f"|phi(0)| = {p0} >= 1")
    return math.sqrt((1 + p0) / (1 - p0))


def tensor_spectrum(s: SingularSpectrum, t: SingularSpectrum,
                    count: int) -> SingularSpectrum:
    """Largest ``count`` pairwise products; exact spectrum of the Kronecker truncation."""
    if len(s) == 0 or len(t) == 0:
        raise ValueError("tensor_spectrum requires nonempty spectra")
    products = np.sort(np.outer(s.values, t.values).ravel())[::-1]
    count = min(count, len(products))
    values = products[:count]
    horizon = None
    if s.horizon is not None and t.horizon is not None:
        trusted = np.sort(np.outer(s.values[: s.horizon],
                                   t.values[: t.horizon]).ravel())[::-1]
        # the leading tensor values are trusted as long as the full product
        # list agrees with the trusted-only list
        horizon = 0
        for a, b in zip(values, trusted):
            if a != b:
                break
            horizon += 1
    return SingularSpectrum(values, order=s.order * t.order, horizon=horizon)


def convergence_horizon(build: Callable[[int], TruncatedOperator],
                        n0: int) -> SingularSpectrum:
    """Build at N0 and 2*N0; annotate the N0 spectrum with its stability horizon.

    The horizon is the largest n* such that sigma_n agrees within 1% between
    the two truncations for every n <= n*.
    """
    if n0 < 16:
        raise ValueError("doubling diagnostics start at N0 >= 16")
    s_small = singular_spectrum(build(n0))
    s_big = singular_spectrum(build(2 * n0))
    floor = 1e-14 * max(s_big.values[0], 1e-300)
    horizon = 0
    for n in range(len(s_small)):
        a, b = s_small.values[n], s_big.values[n]
        if abs(a - b) <= _HORIZON_RTOL * max(b, floor):
            horizon += 1
        else:
            break
    return replace(s_small, horizon=horizon)


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def spectrum_to_csv(spectrum: SingularSpectrum) -> str:
    """CSV dump: header ``n,sigma,N,horizon``, 17 significant digits."""
    buf = io.StringIO()
    buf.write("n,sigma,N,horizon\n")
    horizon = "" if spectrum.horizon is None else str(spectrum.horizon)
    for i, sigma in enumerate(spectrum.values, start=1):
        buf.write(f"{i},{sigma:.17g},{spectrum.order},{horizon}\n")
    return buf.getvalue()


def spectrum_from_csv(text: str) -> SingularSpectrum:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0] != "n,sigma,N,horizon":
        raise ValueError("not a spectrum CSV (missing 'n,sigma,N,horizon' header)")
    values, order, horizon = [], 0, None
    for ln in lines[1:]:
        _, sigma, n_str, hor = ln.split(",")
        values.append(float(sigma))
        order = int(n_str)
        horizon = int(hor) if hor else None
    return SingularSpectrum(np.array(values), order=order, horizon=horizon)
