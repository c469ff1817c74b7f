"""End-to-end experiment drivers and decay-model fitting.

Each driver produces an :class:`ExperimentResult` whose verdicts are
derivable from the serialised payload alone: spectra go to CSV, certificate
and bound series are embedded in ``result.json``, and :func:`recheck`
re-fits and re-derives every verdict offline.

Fitted decay models (all linearised least squares):

* ``power``      sigma_n ~ C * n**-p
* ``power_log``  sigma_n ~ C * (log n)**q * n**-p   (q fixed by the caller)
* ``stretched``  log sigma_n ~ -c * n / log n
* ``root_exp``   log sigma_n ~ -c * sqrt(n)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import WindowExceedsHorizon, ZeroInWindow
from . import series as sym
from .bounds import (
    blaschke_zeros_for_symbol,
    lower_certificate,
    optimize_upper,
    sequence_boundary_pinch,
    triangular_bound,
    weighted_lower_certificate,
    weighted_upper_certificate,
)
from .operators import (
    SingularSpectrum,
    composition_matrix,
    convergence_horizon,
    difference_matrix,
    spectrum_from_csv,
    spectrum_to_csv,
    tensor_spectrum,
    weighted_composition_matrix,
)

# "root_n_over_log" (x = sqrt(n / log n)) serves the bidisc block bounds;
# spectra are fitted with the first four.
MODELS = ("power", "power_log", "stretched", "root_exp", "root_n_over_log")

DEFAULT_R_GRID = tuple(1.0 - np.geomspace(1e-5, 0.4, 17))


# ---------------------------------------------------------------------------
# decay fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    model: str
    params: dict
    r2: float
    window: tuple

    @property
    def rate(self) -> float:
        """The decay exponent: p for power models, c for exponential ones."""
        return self.params["p"] if "p" in self.params else self.params["c"]

    def to_dict(self) -> dict:
        return {"model": self.model, "params": dict(self.params),
                "r2": self.r2, "window": list(self.window)}


def _abscissa(model: str, n: np.ndarray) -> np.ndarray:
    if model in ("power", "power_log"):
        return np.log(n)
    if model == "stretched":
        return n / np.log(n)
    if model == "root_exp":
        return np.sqrt(n)
    if model == "root_n_over_log":
        return np.sqrt(n / np.log(n))
    raise ValueError(f"unknown model {model!r}; choose from {MODELS}")


def fit_series(ns: Sequence[int], values: Sequence[float], model: str,
               q: float = 0.0) -> DecayFit:
    """Least squares in the model's natural coordinates for (n, value) pairs."""
    n = np.asarray(ns, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(n) < 3:
        raise ValueError("need at least 3 points to fit")
    if n.min() < 2:
        raise ValueError("fit indices start at n = 2")
    if np.any(v <= 0):
        raise ZeroInWindow("fit values must be positive")
    y = np.log(v)
    if model == "power_log":
        y = y - q * np.log(np.log(n))
    x = _abscissa(model, n)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
    if model in ("power", "power_log"):
        params = {"p": -float(slope), "log_C": float(intercept)}
        if model == "power_log":
            params["q"] = q
    else:
        params = {"c": -float(slope), "log_C": float(intercept)}
    return DecayFit(model=model, params=params, r2=r2,
                    window=(int(n.min()), int(n.max())))


def _fit_raw(spectrum: SingularSpectrum, model: str, window: tuple,
             q: float = 0.0) -> DecayFit:
    """Fit without the horizon guard (used only with flagged fallback windows)."""
    lo, hi = int(window[0]), int(window[1])
    ns = np.arange(lo, hi + 1)
    return fit_series(ns, spectrum.values[lo - 1: hi], model, q=q)


def fit_decay(spectrum: SingularSpectrum, model: str, window: tuple,
              q: float = 0.0) -> DecayFit:
    """Fit a decay model to sigma_n over ``window = (n_lo, n_hi)`` inclusive.

    The window must sit inside [2, horizon]; positive values only.
    """
    lo, hi = int(window[0]), int(window[1])
    if lo < 2 or hi < lo:
        raise ValueError(f"bad window {window}")
    if spectrum.horizon is not None and hi > spectrum.horizon:
        raise WindowExceedsHorizon(
            f"window top {hi} exceeds horizon {spectrum.horizon}")
    if hi > len(spectrum):
        raise WindowExceedsHorizon(f"window top {hi} exceeds truncation {len(spectrum)}")
    ns = np.arange(lo, hi + 1)
    vals = spectrum.values[lo - 1: hi]
    if np.any(vals <= 0):
        raise ZeroInWindow(f"sigma_n <= 0 inside window [{lo}, {hi}]")
    return fit_series(ns, vals, model, q=q)


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass
class ExperimentResult:
    name: str
    parameters: dict
    spectra: dict = field(default_factory=dict)       # label -> SingularSpectrum
    fits: dict = field(default_factory=dict)          # label -> DecayFit
    certificates: dict = field(default_factory=dict)  # label -> list of dicts
    verdicts: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def passed(self) -> bool:
        return all(self.verdicts.values())

    def write(self, outdir) -> Path:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        spectra_files = {}
        for i, (label, spectrum) in enumerate(self.spectra.items()):
            fname = "spectrum.csv" if i == 0 else f"spectrum_{label}.csv"
            (out / fname).write_text(spectrum_to_csv(spectrum))
            spectra_files[label] = fname
        if self.certificates:
            (out / "certificates.json").write_text(
                json.dumps(self.certificates, indent=2, sort_keys=True) + "\n")
        payload = {
            "name": self.name,
            "parameters": self.parameters,
            "fits": {k: f.to_dict() for k, f in self.fits.items()},
            "verdicts": self.verdicts,
            "details": self.details,
            "spectra_files": spectra_files,
            "certificates_file": "certificates.json" if self.certificates else None,
        }
        (out / "result.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return out / "result.json"


def _refit_from_payload(payload: dict, spectra: dict) -> dict:
    """Recreate every fit recorded in a result payload from stored data."""
    fits = {}
    for label, spec in payload["fits"].items():
        model = spec["model"]
        q = spec["params"].get("q", 0.0)
        source = payload["details"]["fit_sources"][label]
        if source["type"] == "spectrum":
            spectrum = spectra[source["label"]]
            fits[label] = fit_decay(spectrum, model, tuple(source["window"]), q=q)
        elif source["type"] == "spectrum_raw":
            spectrum = spectra[source["label"]]
            fits[label] = _fit_raw(spectrum, model, tuple(source["window"]), q=q)
        else:
            ns, values = zip(*source["series"])
            fits[label] = fit_series(ns, values, model, q=q)
    return fits


def recheck(outdir) -> dict:
    """Recompute verdicts from the serialised result; no operator numerics."""
    out = Path(outdir)
    payload = json.loads((out / "result.json").read_text())
    spectra = {label: spectrum_from_csv((out / fname).read_text())
               for label, fname in payload["spectra_files"].items()}
    fits = _refit_from_payload(payload, spectra)
    return _derive_verdicts(payload["name"], payload["parameters"], fits,
                            spectra, payload["details"])


def _derive_verdicts(name: str, parameters: dict, fits: dict, spectra: dict,
                     details: dict) -> dict:
    if name == "smooth_perturbation":
        alpha = parameters["alpha"]
        p = fits["sigma_power"].params["p"]
        verdicts = {"power_band": abs(p - (alpha - 2)) <= 0.5}
        slopes = [fits[k].params["p"] for k in
                  ("sigma_power", "lower_power", "upper_power") if k in fits]
        if len(slopes) == 3:
            gap = max(abs(a - b) for a in slopes for b in slopes)
            verdicts["slopes_pairwise_within_half"] = gap <= 0.5
        return verdicts
    if name == "corner_perturbation":
        single_re = fits["single_root_exp"].r2
        single_st = fits["single_stretched"].r2
        diff_st = fits["diff_stretched"].r2
        diff_re = fits["diff_root_exp"].r2
        s = spectra["single"]
        d = spectra["difference"]
        return {
            "diff_stretched_r2": diff_st >= 0.95,
            "diff_stretched_beats_root_exp": diff_st - diff_re >= 0.02,
            "single_root_exp_r2": single_re >= 0.95,
            "single_root_exp_beats_stretched": single_re - single_st >= 0.02,
            "sigma64_separation": d.sigma(64) < 1e-2 * s.sigma(64),
        }
    if name == "weighted_power":
        if details.get("zero_slope"):
            return {"zero_slope": True}
        alpha = parameters["alpha"]
        p = fits["sigma_power"].params["p"]
        return {"power_band": (alpha - 0.3) <= p <= (alpha + 0.4),
                "zero_slope": False}
    if name == "bidisc_split":
        verdicts = {"tensor_products_exact": details["tensor_products_exact"]}
        if "square_index_stretched" in fits:
            f = fits["square_index_stretched"]
            verdicts["square_index_rate"] = f.r2 >= 0.9 and f.params["c"] > 0
        return verdicts
    if name == "bidisc_glued":
        return {"restriction_identity": details["restriction_max_error"] <= 1e-12}
    if name == "bidisc_triangular":
        f = fits["bound_vs_sqrt_n_log"]
        return {"bound_rate": f.r2 >= 0.9 and f.params["c"] > 0}
    raise ValueError(f"unknown experiment {name!r}")


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def _geometric_indices(lo: int, hi: int, count: int = 7) -> list:
    grid = np.unique(np.round(np.geomspace(lo, hi, count)).astype(int))
    return [int(g) for g in grid if lo <= g <= hi]


def run_smooth_perturbation(alpha: float, c: float, n_trunc: int = 1024,
                            window: tuple = (8, 64),
                            r_grid: Sequence[float] = DEFAULT_R_GRID,
                            certificates: bool = True) -> ExperimentResult:
    """Half map against its power perturbation: power-law decay of the difference.

    Fits sigma_n ~ C n**-p on the window and, when ``certificates`` is on,
    tracks the constant-free lower values on boundary-pinch sequences and the
    optimised Blaschke upper values on the same index grid.
    """
    if not alpha > 2:
        raise ValueError("alpha must exceed 2")
    phi = sym.half_map()
    psi = sym.power_perturbation(alpha, c)
    spectrum = convergence_horizon(lambda m: difference_matrix(phi, psi, m),
                                   n_trunc)
    lo = window[0]
    hi = min(window[1], spectrum.horizon or 0)
    if hi < lo:
        raise WindowExceedsHorizon(
            f"horizon {spectrum.horizon} below the fit window start {lo}")
    sigma_window = (lo, hi)

    result = ExperimentResult(
        name="smooth_perturbation",
        parameters={"alpha": alpha, "c": c, "N": n_trunc},
        spectra={"difference": spectrum},
    )
    result.fits["sigma_power"] = fit_decay(spectrum, "power", sigma_window)
    fit_sources = {"sigma_power": {"type": "spectrum", "label": "difference",
                                   "window": list(sigma_window)}}

    if certificates:
        # certificates carry no truncation horizon; they span the window as
        # requested even where the sigma fit had to stop at the horizon
        n_grid = _geometric_indices(window[0], window[1])
        lower_series, upper_series = [], []
        lower_docs, upper_docs = [], []
        for n in n_grid:
            cert = lower_certificate(phi, psi, sequence_boundary_pinch(2 * n))
            lower_series.append((n, cert.value_constant_free))
            lower_docs.append(cert.to_dict())
            opt = optimize_upper(phi, psi, n, r_grid)
            upper_series.append((n, opt.best.value))
            upper_docs.append(opt.to_dict())
        result.certificates = {"lower": lower_docs, "upper": upper_docs}
        result.fits["lower_power"] = fit_series(*zip(*lower_series), "power")
        result.fits["upper_power"] = fit_series(*zip(*upper_series), "power")
        fit_sources["lower_power"] = {
            "type": "series", "series": [[n, v] for n, v in lower_series]}
        fit_sources["upper_power"] = {
            "type": "series", "series": [[n, v] for n, v in upper_series]}

    result.details = {"window": list(sigma_window),
                      "certificate_window": list(window),
                      "fit_sources": fit_sources,
                      "r_grid": [float(r) for r in r_grid]}
    result.verdicts = _derive_verdicts(result.name, result.parameters,
                                       result.fits, result.spectra,
                                       result.details)
    return result


def _measurable_window(spectrum: SingularSpectrum, lo: int, hi: int,
                       min_points: int = 5):
    """Largest fit window inside [lo, hi], horizon-clamped when possible.

    Corner-type truncations have horizons growing only logarithmically in N,
    far short of the asymptotic fit ranges; when the horizon cannot host a
    fit, fall back to the indices above the SVD noise floor and say so.
    """
    horizon_top = min(hi, spectrum.horizon or 0)
    if horizon_top - lo + 1 >= min_points:
        return (lo, horizon_top), False
    floor = 1e-13 * float(spectrum.values[0])
    top = lo - 1
    for n in range(lo, min(hi, len(spectrum)) + 1):
        if spectrum.sigma(n) > floor:
            top = n
        else:
            break
    if top - lo + 1 < min_points:
        raise WindowExceedsHorizon(
            f"no usable fit window above n={lo} (horizon {spectrum.horizon})")
    return (lo, top), True


def run_corner_perturbation(c: float = 0.01, n_trunc: int = 1024,
                            window: tuple = (16, 100),
                            spec_single: Optional[SingularSpectrum] = None,
                            spec_diff: Optional[SingularSpectrum] = None
                            ) -> ExperimentResult:
    """Corner map against its flat perturbation.

    The single operator decays like exp(-c sqrt(n)); the difference decays in
    the strictly faster exp(-c n / log n) class.  Model competition is decided
    by R^2 with a 0.02 superiority margin.
    """
    phi = sym.corner_map()
    psi = sym.corner_perturbation(c)
    if spec_single is None:
        spec_single = convergence_horizon(lambda m: composition_matrix(phi, m),
                                          n_trunc)
    if spec_diff is None:
        spec_diff = convergence_horizon(lambda m: difference_matrix(phi, psi, m),
                                        n_trunc)
    w_single, single_raw = _measurable_window(spec_single, *window)
    w_diff, diff_raw = _measurable_window(spec_diff, *window)

    result = ExperimentResult(
        name="corner_perturbation",
        parameters={"c": c, "N": n_trunc},
        spectra={"single": spec_single, "difference": spec_diff},
    )
    result.fits["single_root_exp"] = _fit_raw(spec_single, "root_exp", w_single)
    result.fits["single_stretched"] = _fit_raw(spec_single, "stretched", w_single)
    result.fits["diff_root_exp"] = _fit_raw(spec_diff, "root_exp", w_diff)
    result.fits["diff_stretched"] = _fit_raw(spec_diff, "stretched", w_diff)

    def competition(stretched: DecayFit, root_exp: DecayFit) -> str:
        # R^2 with a 0.02 superiority margin; anything closer is a tie
        if stretched.r2 - root_exp.r2 >= 0.02:
            return "stretched"
        if root_exp.r2 - stretched.r2 >= 0.02:
            return "root_exp"
        return "inconclusive"
    result.details = {
        "window_single": list(w_single),
        "window_diff": list(w_diff),
        "window_exceeds_horizon_single": single_raw,
        "window_exceeds_horizon_diff": diff_raw,
        "model_competition_single": competition(
            result.fits["single_stretched"], result.fits["single_root_exp"]),
        "model_competition_diff": competition(
            result.fits["diff_stretched"], result.fits["diff_root_exp"]),
        "sigma64_single": spec_single.sigma(64),
        "sigma64_difference": spec_diff.sigma(64),
        "fit_sources": {
            "single_root_exp": {"type": "spectrum_raw", "label": "single",
                                "window": list(w_single)},
            "single_stretched": {"type": "spectrum_raw", "label": "single",
                                 "window": list(w_single)},
            "diff_root_exp": {"type": "spectrum_raw", "label": "difference",
                              "window": list(w_diff)},
            "diff_stretched": {"type": "spectrum_raw", "label": "difference",
                               "window": list(w_diff)},
        },
    }
    result.verdicts = _derive_verdicts(result.name, result.parameters,
                                       result.fits, result.spectra,
                                       result.details)
    return result


def run_weighted_power(alpha: float, n_trunc: int = 1024,
                       window: tuple = (8, 100),
                       r_grid: Sequence[float] = DEFAULT_R_GRID,
                       certificates: bool = True) -> ExperimentResult:
    """Power weight (1-z)**alpha against the half map: a_n ~ n**-alpha.

    alpha = 0 degenerates to the plain (non-compact) composition operator and
    takes the zero-slope verdict path instead of a power-band verdict.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    omega = sym.weight_power(alpha)
    phi = sym.half_map()
    spectrum = convergence_horizon(
        lambda m: weighted_composition_matrix(omega, phi, m), n_trunc)

    result = ExperimentResult(
        name="weighted_power",
        parameters={"alpha": alpha, "N": n_trunc},
        spectra={"weighted": spectrum},
    )
    lo = window[0]
    hi = min(window[1], spectrum.horizon or 0)
    if hi - lo + 1 < 5:
        # non-compact degenerate case (e.g. the unit weight): the stability
        # horizon collapses and no power fit is possible
        result.details = {"window": None, "zero_slope": True,
                          "fit_sources": {}}
        result.verdicts = _derive_verdicts(result.name, result.parameters,
                                           result.fits, result.spectra,
                                           result.details)
        return result
    window = (lo, hi)
    fit = fit_decay(spectrum, "power", window)
    result.fits["sigma_power"] = fit
    fit_sources = {"sigma_power": {"type": "spectrum", "label": "weighted",
                                   "window": list(window)}}
    zero_slope = abs(fit.params["p"]) < 0.1
    result.details = {"window": list(window), "zero_slope": zero_slope,
                      "fit_sources": fit_sources}

    if certificates and not zero_slope:
        n_grid = _geometric_indices(window[0], min(window[1], 64))
        lower_series, upper_series = [], []
        lower_docs, upper_docs = [], []
        for n in n_grid:
            cert = weighted_lower_certificate(
                omega, phi, sequence_boundary_pinch(2 * n))
            lower_series.append((n, cert.value_constant_free))
            lower_docs.append(cert.to_dict())
            best = None
            for r in r_grid:
                zeros = blaschke_zeros_for_symbol(phi, r, n)
                cert_u = weighted_upper_certificate(omega, phi, n, r, zeros)
                if best is None or cert_u.value < best.value:
                    best = cert_u
            upper_series.append((n, best.value))
            upper_docs.append(best.to_dict())
        result.certificates = {"lower": lower_docs, "upper": upper_docs}
        if all(v > 0 for _, v in lower_series):
            result.fits["lower_power"] = fit_series(*zip(*lower_series), "power")
            fit_sources["lower_power"] = {
                "type": "series", "series": [[n, v] for n, v in lower_series]}
        if all(v > 0 for _, v in upper_series):
            result.fits["upper_power"] = fit_series(*zip(*upper_series), "power")
            fit_sources["upper_power"] = {
                "type": "series", "series": [[n, v] for n, v in upper_series]}

    result.verdicts = _derive_verdicts(result.name, result.parameters,
                                       result.fits, result.spectra,
                                       result.details)
    return result


# ---------------------------------------------------------------------------
# bidisc drivers
# ---------------------------------------------------------------------------

def glued_difference_matrix(phi: sym.Symbol, psi: sym.Symbol,
                            m: int) -> np.ndarray:
    """Truncation of C_Phi - C_Psi for glued symbols (f(z1, z2) -> f(phi, phi)).

    Basis z1^j z2^k with j, k < m; the image of every monomial depends on z1
    alone, so all rows with z2-degree > 0 vanish.
    """
    def powers(symbol):
        base = sym.taylor_array(symbol, m)
        table = np.zeros((2 * m - 1, m), dtype=complex)
        table[0, 0] = 1.0
        for k in range(1, 2 * m - 1):
            table[k] = np.convolve(table[k - 1], base)[:m]
        return table

    p_phi, p_psi = powers(phi), powers(psi)
    out = np.zeros((m * m, m * m), dtype=complex)
    for j in range(m):
        for k in range(m):
            col = p_phi[j + k] - p_psi[j + k]
            out[0: m * m: m, j * m + k] = col  # rows (p, q=0) at index p*m
    return out


def run_bidisc(kind: str, **params) -> ExperimentResult:
    """Bidisc constructions: ``split``, ``glued`` or ``triangular``."""
    if kind == "split":
        return _run_split(**params)
    if kind == "glued":
        return _run_glued(**params)
    if kind == "triangular":
        return _run_triangular(**params)
    raise ValueError(f"unknown bidisc kind {kind!r}")


def _run_split(c: float = 0.01, n_trunc: int = 512, count: int = 4096,
               factor_dilation: float = 0.5,
               diff_spectrum: Optional[SingularSpectrum] = None,
               factor_spectrum: Optional[SingularSpectrum] = None
               ) -> ExperimentResult:
    """Split symbols (phi_i(z1), psi(z2)): the difference tensorises.

    The corner pair supplies the first factor; the compact second factor is
    a dilation, whose truncations are exact at every order (a corner-type
    factor would cap the trusted tensor range at its tiny stability horizon).
    """
    phi0 = sym.corner_map()
    phi1 = sym.corner_perturbation(c)
    if diff_spectrum is None:
        diff_spectrum = convergence_horizon(
            lambda m: difference_matrix(phi0, phi1, m), n_trunc)
    if factor_spectrum is None:
        factor_spectrum = convergence_horizon(
            lambda m: composition_matrix(sym.dilation(factor_dilation), m),
            n_trunc)
    tensor = tensor_spectrum(diff_spectrum, factor_spectrum, count)

    exact = True
    for m in range(1, 9):
        for n in range(1, 9):
            if (tensor.values[m * n - 1]
                    < diff_spectrum.values[m - 1] * factor_spectrum.values[n - 1]
                    - 1e-12):
                exact = False

    result = ExperimentResult(
        name="bidisc_split",
        parameters={"c": c, "N": n_trunc, "count": count},
        spectra={"tensor": tensor, "difference": diff_spectrum,
                 "factor": factor_spectrum},
        details={"tensor_products_exact": exact},
    )
    m_hor = min(diff_spectrum.horizon or 0, factor_spectrum.horizon or 0)
    m_max = min(int(math.isqrt(len(tensor))), m_hor)
    if m_max >= 6:
        ms = np.arange(3, m_max + 1)
        vals = np.array([tensor.values[m * m - 1] for m in ms])
        if np.all(vals > 0):
            result.fits["square_index_stretched"] = fit_series(ms, vals,
                                                               "stretched")
            result.details["fit_sources"] = {
                "square_index_stretched": {
                    "type": "series",
                    "series": [[int(m), float(v)] for m, v in zip(ms, vals)]}}
    result.details.setdefault("fit_sources", {})
    result.verdicts = _derive_verdicts(result.name, result.parameters,
                                       result.fits, result.spectra,
                                       result.details)
    return result


def _run_glued(c: float = 0.01, n_trunc: int = 256,
               check_order: int = 8) -> ExperimentResult:
    """Glued symbols (phi(z1), phi(z1)): the z2-independent subspace carries C_phi."""
    phi = sym.corner_map()
    psi = sym.corner_perturbation(c)
    spectrum = convergence_horizon(lambda m: difference_matrix(phi, psi, m),
                                   max(n_trunc, 16))

    glued = glued_difference_matrix(phi, psi, check_order)
    # basis packing is index = (z1 degree) * m + (z2 degree); the invariant
    # subspace z2-degree 0 picks rows and columns at multiples of m
    idx = np.arange(check_order) * check_order
    restricted = glued[np.ix_(idx, idx)]
    one_dim = difference_matrix(phi, psi, check_order).matrix
    err = float(np.abs(restricted - one_dim).max())

    result = ExperimentResult(
        name="bidisc_glued",
        parameters={"c": c, "N": max(n_trunc, 16), "check_order": check_order},
        spectra={"difference": spectrum},
        details={"restriction_max_error": err, "fit_sources": {}},
    )
    result.verdicts = _derive_verdicts(result.name, result.parameters,
                                       result.fits, result.spectra,
                                       result.details)
    return result


def _run_triangular(c: float = 0.01, weight_modulus: float = 0.5,
                    n_trunc: int = 2048, k_range: Sequence[int] = range(3, 8),
                    diff_spectrum: Optional[SingularSpectrum] = None,
                    phi0_spectrum: Optional[SingularSpectrum] = None,
                    phi1_spectrum: Optional[SingularSpectrum] = None
                    ) -> ExperimentResult:
    """Triangularly separated symbols with the doubling block schedule n_k = 2^K."""
    phi0 = sym.corner_map()
    phi1 = sym.corner_perturbation(c)
    u0 = sym.constant(weight_modulus)
    u1 = sym.dilation(weight_modulus)
    if diff_spectrum is None:
        diff_spectrum = convergence_horizon(
            lambda m: difference_matrix(phi0, phi1, m), n_trunc)
    if phi0_spectrum is None:
        phi0_spectrum = convergence_horizon(
            lambda m: composition_matrix(phi0, m), n_trunc)
    if phi1_spectrum is None:
        phi1_spectrum = convergence_horizon(
            lambda m: composition_matrix(phi1, m), n_trunc)

    # corner-pair truncations cannot certify sigma_n at the 2^K block sizes
    # (their stability horizons grow only logarithmically in N); the raw
    # values sit far below the geometric tail that decides the max, so the
    # bound itself is unaffected and the flag records the shortcut
    bounds_series = []
    docs = []
    for big_k in k_range:
        sizes = [2 ** big_k] * (big_k + 1)
        tb = triangular_bound(u0, u1, phi0, phi1, sizes,
                              diff_spectrum, phi0_spectrum, phi1_spectrum,
                              enforce_horizons=False)
        bounds_series.append((tb.index, tb.value))
        docs.append(tb.to_dict())

    ns = [n for n, _ in bounds_series]
    vals = [v for _, v in bounds_series]
    result = ExperimentResult(
        name="bidisc_triangular",
        parameters={"c": c, "weight_modulus": weight_modulus, "N": n_trunc,
                    "K_range": [int(k) for k in k_range]},
        spectra={"difference": diff_spectrum, "phi0": phi0_spectrum,
                 "phi1": phi1_spectrum},
        certificates={"triangular": docs},
    )
    result.fits["bound_vs_sqrt_n_log"] = fit_series(ns, vals, "root_n_over_log")
    result.details = {
        "bound_series": [[int(n), float(v)] for n, v in bounds_series],
        "fit_sources": {"bound_vs_sqrt_n_log": {
            "type": "series",
            "series": [[int(n), float(v)] for n, v in bounds_series]}},
    }
    result.verdicts = _derive_verdicts(result.name, result.parameters,
                                       result.fits, result.spectra,
                                       result.details)
    return result
