"""Detection chain: Fabry-Perot scans, HBT timing response, Michelson
visibility, laser leakage and detector background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import signal

from .bloch import steady_state
from .closed_form import coherent_fraction, g1_incoherent_closed, spectrum_total
from .exceptions import InvalidParameterError, ResolutionError
from .params import TwoLevelParams, rabi_from_power
from .traces import CorrelationTrace, PoleSum, SpectrumTrace, as_grid

__all__ = [
    "InstrumentResponse",
    "BackgroundModel",
    "ScanTrace",
    "SBRCurves",
    "convolve_lorentzian",
    "fp_scan",
    "irf_convolve_correlation",
    "michelson_visibility",
    "calibrate_background",
    "sbr_curves",
]

_FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))
# numeric convolution needs at least this many samples per kernel FWHM
_SAMPLES_PER_FWHM = 10


@dataclass(frozen=True)
class InstrumentResponse:
    """Parametric or tabulated response function.

    ``kind`` is ``"lorentzian"``, ``"gaussian"`` or ``"tabulated"``. The
    axis unit (Hz or seconds) is whatever the caller convolves against.
    A ``"delta"`` response is the identity.
    """

    kind: str
    fwhm: float | None = None
    grid: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.kind in ("lorentzian", "gaussian"):
            if self.fwhm is None or not self.fwhm > 0:
                raise InvalidParameterError(f"{self.kind} response needs fwhm > 0")
        elif self.kind == "tabulated":
            grid = as_grid(self.grid, "response grid")
            w = np.asarray(self.weights, dtype=float)
            if w.shape != grid.shape or grid.size < 3:
                raise InvalidParameterError("tabulated response needs >= 3 matching samples")
            if np.any(w < 0):
                raise InvalidParameterError("tabulated response must be non-negative")
            area = np.trapezoid(w, grid)
            if not area > 0:
                raise InvalidParameterError("tabulated response has zero area")
            object.__setattr__(self, "grid", grid)
            object.__setattr__(self, "weights", w / area)
        elif self.kind != "delta":
            raise InvalidParameterError(f"unknown response kind {self.kind!r}")

    @classmethod
    def lorentzian(cls, fwhm):
        return cls("lorentzian", fwhm=float(fwhm))

    @classmethod
    def gaussian(cls, fwhm):
        return cls("gaussian", fwhm=float(fwhm))

    @classmethod
    def delta(cls):
        return cls("delta")

    @classmethod
    def from_file(cls, path, delimiter=None):
        """Two-column text file ``(axis, weight)``; ``#`` starts a comment.

        Columns are split on commas or whitespace unless ``delimiter`` is given.
        """
        path = Path(path)
        if delimiter is None:
            lines = (ln.split("#", 1)[0].replace(",", " ") for ln in path.read_text().splitlines())
            data = np.loadtxt(lines, ndmin=2)
        else:
            data = np.loadtxt(path, delimiter=delimiter, comments="#", ndmin=2)
        if data.shape[1] != 2:
            raise InvalidParameterError(f"{path}: expected two columns, found {data.shape[1]}")
        order = np.argsort(data[:, 0], kind="stable")
        return cls("tabulated", grid=data[order, 0], weights=data[order, 1])

    def density(self, x):
        """Unit-area response evaluated at ``x``."""
        x = np.asarray(x, dtype=float)
        if self.kind == "lorentzian":
            h = 0.5 * self.fwhm
            return (h / np.pi) / (x**2 + h**2)
        if self.kind == "gaussian":
            s = self.fwhm / _FWHM_PER_SIGMA
            return np.exp(-0.5 * (x / s) ** 2) / (s * math.sqrt(2.0 * math.pi))
        if self.kind == "tabulated":
            return np.interp(x, self.grid, self.weights, left=0.0, right=0.0)
        raise InvalidParameterError("a delta response has no density")

    @property
    def width(self):
        """FWHM for parametric kinds, full support for tabulated ones."""
        if self.kind == "tabulated":
            return float(self.grid[-1] - self.grid[0])
        return 0.0 if self.kind == "delta" else float(self.fwhm)

    def kernel(self, spacing):
        """Unit-sum samples on a uniform grid centred on zero."""
        if self.kind == "delta":
            return np.ones(1)
        if self.kind == "tabulated":
            half = max(abs(self.grid[0]), abs(self.grid[-1]))
        elif self.kind == "gaussian":
            half = 6.0 * self.fwhm
        else:
            half = 200.0 * self.fwhm
        n = int(math.ceil(half / spacing))
        k = self.density(np.arange(-n, n + 1) * spacing)
        return k / k.sum()


@dataclass(frozen=True)
class BackgroundModel:
    """Residual laser leakage, dark counts and collection efficiency.

    ``leakage_per_power`` is counts/s per unit ``P / P_sat``; ``dark_rate``
    is counts/s.
    """

    leakage_per_power: float = 0.0
    dark_rate: float = 0.0
    collection_efficiency: float = 1.0

    def __post_init__(self):
        for name in ("leakage_per_power", "dark_rate", "collection_efficiency"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidParameterError(f"{name} must be finite and >= 0, got {v}")
        if self.collection_efficiency > 1:
            raise InvalidParameterError("collection_efficiency must be <= 1")

    def off_resonance(self, power_ratio):
        return self.leakage_per_power * np.asarray(power_ratio, dtype=float) + self.dark_rate

    @property
    def background_at_saturation(self):
        return self.leakage_per_power + self.dark_rate


@dataclass(frozen=True)
class ScanTrace:
    """Count rate versus scan detuning (Hz)."""

    scan_axis: np.ndarray
    counts: np.ndarray
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.asarray(self.counts) < 0):
            raise InvalidParameterError("counts must be non-negative")


def _check_resolution(spacing, fwhm, span=None):
    if spacing * _SAMPLES_PER_FWHM > fwhm:
        raise ResolutionError(
            f"grid spacing {spacing:.4g} is too coarse for a response of FWHM {fwhm:.4g}; "
            f"need <= {fwhm / _SAMPLES_PER_FWHM:.4g}"
        )
    if span is not None and span < 2.0 * fwhm:
        raise ResolutionError(f"grid span {span:.4g} is narrower than twice the response FWHM {fwhm:.4g}")


def _uniform_spacing(grid):
    steps = np.diff(grid)
    if steps.size == 0:
        raise ResolutionError("need at least two grid points")
    spacing = steps.mean()
    if np.max(np.abs(steps - spacing)) > 1e-6 * spacing:
        raise ResolutionError("numeric convolution requires a uniform grid")
    return spacing


def convolve_lorentzian(trace: SpectrumTrace, fwhm, numeric=False) -> SpectrumTrace:
    """Convolve a spectrum with a unit-area Lorentzian of FWHM ``fwhm`` (Hz).

    Analytic line shapes are broadened exactly (half widths add). Sampled
    spectra, or ``numeric=True``, use a discrete convolution on the trace's
    uniform grid; that path rejects grids with fewer than ten samples per
    FWHM.
    """
    if not fwhm > 0:
        raise InvalidParameterError(f"fwhm must be positive, got {fwhm}")
    grid = trace.detunings
    if trace.is_analytic and not numeric:
        return SpectrumTrace.from_lines(
            grid,
            trace.coherent_lines.convolve_lorentzian(fwhm),
            trace.incoherent_lines.convolve_lorentzian(fwhm),
        )
    spacing = _uniform_spacing(grid)
    _check_resolution(spacing, fwhm, grid[-1] - grid[0])
    if trace.is_analytic:
        poles = np.concatenate([trace.coherent_lines.poles, trace.incoherent_lines.poles])
        if poles.size:
            _check_resolution(spacing, 2.0 * poles.real.min())
    kernel = InstrumentResponse.lorentzian(fwhm)
    n = grid.size
    # kernel spans the whole grid on both sides so every output sees every input
    offsets = np.arange(-(n - 1), n) * spacing
    k = kernel.density(offsets) * spacing
    coh = signal.fftconvolve(trace.coherent, k, mode="full")[n - 1:2 * n - 1]
    inc = signal.fftconvolve(trace.incoherent, k, mode="full")[n - 1:2 * n - 1]
    if trace.coherent_weight:
        coh = coh + trace.coherent_weight * kernel.density(grid)
    return SpectrumTrace(grid, coh, inc, coh + inc)


def fp_scan(
    params: TwoLevelParams,
    laser_linewidth,
    cavity_fwhm,
    scan_grid,
    background: BackgroundModel | None = None,
    power_ratio=0.0,
) -> ScanTrace:
    """Count rate transmitted through a scanning Fabry-Perot cavity.

    The cavity transmission is a Lorentzian of peak one, so a line much
    narrower than the cavity reads its full emission rate at the peak
    scaled by ``pi * cavity_fwhm / 2`` per unit density. Residual laser
    light appears as a cavity-width Lorentzian at zero detuning.

    Returns
    -------
    ScanTrace
        ``components`` holds ``coherent``, ``incoherent``, ``leakage`` and
        ``dark`` contributions in counts/s.
    """
    background = background or BackgroundModel()
    if not cavity_fwhm > 0:
        raise InvalidParameterError("cavity_fwhm must be positive")
    grid = as_grid(scan_grid, "scan_grid")
    peak_transmission_area = 0.5 * np.pi * cavity_fwhm
    eff = background.collection_efficiency
    if params.rabi > 0:
        spec = spectrum_total(params, laser_linewidth, grid)
        seen = convolve_lorentzian(spec, cavity_fwhm)
        coh = eff * peak_transmission_area * seen.coherent
        inc = eff * peak_transmission_area * seen.incoherent
    else:
        coh = np.zeros(grid.size)
        inc = np.zeros(grid.size)
    leak_rate = background.leakage_per_power * float(power_ratio)
    transmission = 1.0 / (1.0 + (2.0 * grid / cavity_fwhm) ** 2)
    leakage = leak_rate * transmission
    dark = np.full(grid.size, background.dark_rate)
    counts = np.clip(coh + inc, 0.0, None) + leakage + dark
    return ScanTrace(
        grid, counts, {"coherent": coh, "incoherent": inc, "leakage": leakage, "dark": dark}
    )


def irf_convolve_correlation(trace: CorrelationTrace, irf: InstrumentResponse) -> CorrelationTrace:
    """Instrument view of an intensity correlation.

    The trace (non-negative delays on a uniform grid) is mirrored to
    negative delays, padded with its asymptotic value and convolved with the
    unit-area response. The result lives on the symmetric grid; ``raw``
    carries the mirrored ideal values.
    """
    if trace.kind != "g2":
        raise InvalidParameterError("irf_convolve_correlation expects a g2 trace")
    tau = trace.delays
    if tau[0] != 0:
        raise InvalidParameterError("trace must start at zero delay")
    spacing = _uniform_spacing(tau)
    sym_tau = np.concatenate([-tau[:0:-1], tau])
    sym_val = np.concatenate([trace.values[:0:-1], trace.values])
    if irf.kind == "delta":
        return CorrelationTrace(sym_tau, sym_val.copy(), "g2", raw=sym_val)
    support = tau[-1]
    if irf.width >= support:
        raise InvalidParameterError(
            f"response width {irf.width:.3g} s exceeds the trace support {support:.3g} s"
        )
    if irf.kind != "tabulated":
        _check_resolution(spacing, irf.fwhm)
    kernel = irf.kernel(spacing)
    pad = kernel.size // 2
    tail = trace.values[-1]
    padded = np.concatenate([np.full(pad, tail), sym_val, np.full(pad, tail)])
    out = np.convolve(padded, kernel[::-1], mode="valid")
    return CorrelationTrace(sym_tau, out, "g2", raw=sym_val)


def michelson_visibility(
    params: TwoLevelParams,
    laser_tau,
    coherent_tau,
    setup_visibility,
    delays,
) -> CorrelationTrace:
    """Fringe visibility of the scattered light versus interferometer delay.

    ``V = setup_visibility * |f exp(-|tau|/(2 coherent_tau)) + (1 - f) g1_inc(tau)|``
    with ``f`` the coherent fraction. The elastic line is a Lorentzian whose
    FWHM is ``1 / (2 pi coherent_tau)``, bounded by the laser's own.
    """
    if not 0 < setup_visibility <= 1:
        raise InvalidParameterError("setup_visibility must lie in (0, 1]")
    if not (coherent_tau > 0 and laser_tau > 0):
        raise InvalidParameterError("coherence times must be positive")
    if coherent_tau > laser_tau * (1 + 1e-12):
        raise InvalidParameterError("coherent_tau cannot exceed the laser coherence time")
    tau = as_grid(delays, "delays")
    a = np.abs(tau)
    order = np.argsort(a, kind="stable")
    f = coherent_fraction(params)
    if f < 1.0:
        uniq, inverse = np.unique(a[order], return_inverse=True)
        g1 = np.empty_like(a)
        g1[order] = g1_incoherent_closed(params, uniq).values[inverse]
    else:
        g1 = np.zeros_like(a)
    coh = f * np.exp(-a / (2.0 * coherent_tau))
    inc = (1.0 - f) * g1
    values = setup_visibility * np.abs(coh + inc)
    return CorrelationTrace(tau, values, "g1_total", raw=np.abs(coh + inc))


def laser_visibility(laser_tau, setup_visibility, delays):
    """Reference visibility of the bare laser, ``setup * exp(-|tau|/(2 laser_tau))``."""
    tau = as_grid(delays, "delays")
    return setup_visibility * np.exp(-np.abs(tau) / (2.0 * laser_tau))


@dataclass(frozen=True)
class SBRCurves:
    power_ratio: np.ndarray
    signal: np.ndarray
    off_resonance: np.ndarray
    leakage: np.ndarray
    dark: np.ndarray

    @property
    def on_resonance(self):
        return self.signal + self.off_resonance

    @property
    def sbr(self):
        """Signal over off-resonance counts; ``inf`` where there is no background."""
        out = np.full(self.signal.shape, np.inf)
        np.divide(self.signal, self.off_resonance, out=out, where=self.off_resonance > 0)
        return out


def calibrate_background(params_at_sat: TwoLevelParams, signal_at_sat, sbr_at_sat, crossover_power=0.2):
    """Background model anchored on the saturation count rate and SBR.

    The background at saturation is ``signal_at_sat / sbr_at_sat``. It is
    split so that laser leakage equals the dark rate at
    ``crossover_power * P_sat``; below that power the dark floor dominates.
    The default puts the crossing at 0.2 P_sat, so the leakage is half the
    dark rate at a tenth of saturation.

    Returns
    -------
    BackgroundModel, dict
        The model and a report with the implied background fraction of the
        total detected counts at saturation.
    """
    if not (signal_at_sat > 0 and sbr_at_sat > 0 and crossover_power > 0):
        raise InvalidParameterError("signal, SBR and crossover power must be positive")
    ree_sat = _excited_population(params_at_sat, 1.0)
    efficiency = signal_at_sat / (params_at_sat.gamma * ree_sat)
    if efficiency > 1:
        raise InvalidParameterError(
            f"signal {signal_at_sat:.3g}/s exceeds the emission rate at saturation"
        )
    background = signal_at_sat / sbr_at_sat
    leakage = background / (1.0 + crossover_power)
    dark = background - leakage
    model = BackgroundModel(leakage, dark, efficiency)
    report = {
        "collection_efficiency": efficiency,
        "background_at_saturation": background,
        "background_fraction": background / (signal_at_sat + background),
        "leakage_per_power": leakage,
        "dark_rate": dark,
    }
    return model, report


def _excited_population(params_at_sat, power_ratio):
    rabi = rabi_from_power(power_ratio, params_at_sat.t1, params_at_sat.t2)
    return steady_state(params_at_sat.replace(rabi=rabi)).excited_population


def sbr_curves(power_grid, params_at_sat: TwoLevelParams, background: BackgroundModel) -> SBRCurves:
    """Signal, off-resonance background and SBR versus ``P / P_sat``.

    ``signal = efficiency * gamma * rho_ee(P)``; the background is linear
    leakage plus a flat dark floor. A background of zero yields an infinite
    SBR.
    """
    p = as_grid(power_grid, "power_grid", strictly_increasing=False)
    if np.any(p < 0):
        raise InvalidParameterError("powers must be non-negative")
    ree = np.array([_excited_population(params_at_sat, float(x)) for x in p])
    sig = background.collection_efficiency * params_at_sat.gamma * ree
    leak = background.leakage_per_power * p
    dark = np.full(p.size, background.dark_rate)
    return SBRCurves(p, sig, leak + dark, leak, dark)
