"""Sampled spectra and correlation functions.

Spectral line shapes are carried alongside their samples as a sum of
complex-pole terms so that Lorentzian instrument widths can be applied
exactly. A term with amplitude ``a`` and pole ``p = h + i*nu0`` (Hz) has
density ``Re[a / (h - i*(nu - nu0))] / pi``: a real ``a`` gives a Lorentzian
of area ``a`` and half width ``h`` centred at ``nu0``, an imaginary ``a``
gives the matching zero-area dispersive shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidParameterError

__all__ = ["PoleSum", "SpectrumTrace", "CorrelationTrace", "as_grid"]

CORRELATION_KINDS = ("g1_incoherent", "g1_total", "g2")


def as_grid(values, name="grid", strictly_increasing=True, allow_empty=False):
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1:
        raise InvalidParameterError(f"{name} must be one-dimensional")
    if arr.size == 0 and not allow_empty:
        raise InvalidParameterError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} contains non-finite values")
    if strictly_increasing and arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise InvalidParameterError(f"{name} must be strictly increasing")
    return arr


@dataclass(frozen=True)
class PoleSum:
    """Sum of Lorentzian / dispersive terms, see module docstring.

    ``delta_weight`` holds the area of an unbroadened line at zero
    detuning, which has no finite density.
    """

    amplitudes: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    poles: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    delta_weight: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).ravel()
        p = np.asarray(self.poles, dtype=complex).ravel()
        if a.shape != p.shape:
            raise InvalidParameterError("amplitudes and poles must have equal length")
        if np.any(p.real <= 0):
            raise InvalidParameterError("every pole needs a positive half width")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "poles", p)

    @classmethod
    def lorentzian(cls, area, fwhm, center=0.0):
        if fwhm == 0:
            if center != 0:
                raise InvalidParameterError("delta lines are only supported at zero detuning")
            return cls(delta_weight=float(area))
        return cls([area], [fwhm / 2.0 + 1j * center])

    def density(self, nu):
        nu = np.asarray(nu, dtype=float)
        if self.poles.size == 0:
            return np.zeros_like(nu)
        z = self.poles[:, None] - 1j * nu.ravel()[None, :]
        out = np.real(self.amplitudes[:, None] / z).sum(axis=0) / np.pi
        return out.reshape(nu.shape)

    @property
    def area(self):
        return float(self.amplitudes.real.sum() + self.delta_weight)

    def convolve_lorentzian(self, fwhm):
        """Exact convolution with a unit-area Lorentzian of the given FWHM (Hz)."""
        if not fwhm > 0:
            raise InvalidParameterError(f"fwhm must be positive, got {fwhm}")
        amps = self.amplitudes
        poles = self.poles + fwhm / 2.0
        if self.delta_weight:
            amps = np.append(amps, self.delta_weight)
            poles = np.append(poles, fwhm / 2.0)
        return PoleSum(amps, poles)

    def scaled(self, factor):
        return PoleSum(self.amplitudes * factor, self.poles, self.delta_weight * factor)

    def __add__(self, other):
        if not isinstance(other, PoleSum):
            return NotImplemented
        return PoleSum(
            np.concatenate([self.amplitudes, other.amplitudes]),
            np.concatenate([self.poles, other.poles]),
            self.delta_weight + other.delta_weight,
        )


@dataclass(frozen=True)
class SpectrumTrace:
    """Spectral density sampled on a detuning grid.

    Attributes
    ----------
    detunings : ndarray
        Linear-frequency detuning from the laser, Hz, strictly increasing.
    coherent, incoherent, total : ndarray
        Densities in photons/s per Hz. ``coherent`` is zero where the elastic
        line is an unbroadened delta; its area then sits in ``coherent_weight``.
    coherent_weight : float
        Delta weight (photons/s) of the unbroadened elastic line, else 0.
    coherent_lines, incoherent_lines : PoleSum or None
        Analytic line shapes, when known.
    """

    detunings: np.ndarray
    coherent: np.ndarray
    incoherent: np.ndarray
    total: np.ndarray
    coherent_weight: float = 0.0
    coherent_lines: PoleSum | None = None
    incoherent_lines: PoleSum | None = None

    def __post_init__(self):
        grid = as_grid(self.detunings, "detunings")
        object.__setattr__(self, "detunings", grid)
        for name in ("coherent", "incoherent", "total"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != grid.shape:
                raise InvalidParameterError(f"{name} has shape {arr.shape}, expected {grid.shape}")
            object.__setattr__(self, name, arr)

    @classmethod
    def from_lines(cls, grid, coherent_lines, incoherent_lines):
        grid = as_grid(grid, "detunings")
        coh = coherent_lines.density(grid)
        inc = incoherent_lines.density(grid)
        # round-off in the dispersive terms can dip a hair below zero far out in the wings
        inc = np.where(np.abs(inc) < 1e-12 * max(np.abs(inc).max(), 1e-300), 0.0, inc)
        return cls(
            detunings=grid,
            coherent=coh,
            incoherent=inc,
            total=coh + inc,
            coherent_weight=coherent_lines.delta_weight,
            coherent_lines=coherent_lines,
            incoherent_lines=incoherent_lines,
        )

    @property
    def is_analytic(self):
        return self.coherent_lines is not None and self.incoherent_lines is not None

    def integrated(self):
        """Trapezoid area of ``total`` plus the delta weight."""
        return float(np.trapezoid(self.total, self.detunings) + self.coherent_weight)


@dataclass(frozen=True)
class CorrelationTrace:
    """Correlation function sampled on a delay grid (seconds).

    ``values`` may be complex for detuned field correlations. ``raw`` keeps
    the un-convolved samples when the trace is an instrument view.
    """

    delays: np.ndarray
    values: np.ndarray
    kind: str
    raw: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in CORRELATION_KINDS:
            raise InvalidParameterError(f"kind must be one of {CORRELATION_KINDS}, got {self.kind!r}")
        delays = as_grid(self.delays, "delays", strictly_increasing=False)
        values = np.asarray(self.values)
        if not np.iscomplexobj(values):
            values = values.astype(float)
        if values.shape != delays.shape:
            raise InvalidParameterError("values and delays differ in shape")
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "values", values)
