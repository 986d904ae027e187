"""Decomposition of a sampled spectrum into a central line and a sideband pair.

Used to read the Mollow sideband splitting off a spectrum in which the
sidebands are still shoulders rather than separate maxima. Line areas
enter linearly and are solved for exactly at each trial of the three
nonlinear parameters (widths and splitting).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ..exceptions import InvalidParameterError

__all__ = ["TripletFit", "LorentzianFit", "fit_mollow_triplet", "fit_lorentzian"]


@dataclass(frozen=True)
class TripletFit:
    sideband_offset: float
    sideband_hwhm: float
    center_hwhm: float
    center_area: float
    sideband_area: float
    dispersive_area: float
    narrow_area: float
    residual_rms: float


@dataclass(frozen=True)
class LorentzianFit:
    center: float
    fwhm: float
    area: float
    offset: float


def _lor(x, h):
    return (h / np.pi) / (x**2 + h**2)


def _dsp(x, h):
    return (x / np.pi) / (x**2 + h**2)


def _basis(nu, c_h, s_h, s_off, narrow_hwhm):
    cols = [
        _lor(nu, c_h),
        0.5 * (_lor(nu - s_off, s_h) + _lor(nu + s_off, s_h)),
        # opposite dispersive shapes on the two sidebands keep the spectrum even
        _dsp(nu + s_off, s_h) - _dsp(nu - s_off, s_h),
    ]
    if narrow_hwhm:
        cols.append(_lor(nu, narrow_hwhm))
    return np.column_stack(cols)


def fit_mollow_triplet(nu, density, guess_offset, narrow_fwhm=None) -> TripletFit:
    """Fit central Lorentzian + symmetric sideband pair (+ optional fixed-width narrow line).

    Parameters
    ----------
    nu, density : array_like
        Frequency grid (Hz) and spectral density.
    guess_offset : float
        Rough sideband offset (Hz); starts are spread around it.
    narrow_fwhm : float, optional
        FWHM of an additional centred line of known width, e.g. the
        instrument-broadened elastic peak.
    """
    nu = np.asarray(nu, dtype=float)
    y = np.asarray(density, dtype=float)
    if nu.shape != y.shape or nu.size < 10:
        raise InvalidParameterError("need matching grids with >= 10 samples")
    if not guess_offset > 0:
        raise InvalidParameterError("guess_offset must be positive")
    narrow_hwhm = 0.5 * narrow_fwhm if narrow_fwhm else 0.0
    scale = np.abs(y).max()
    g = guess_offset

    def linear(p):
        basis = _basis(nu, *(p * g), narrow_hwhm)
        coef, *_ = np.linalg.lstsq(basis, y / scale, rcond=None)
        return basis, coef

    def resid(p):
        basis, coef = linear(p)
        return basis @ coef - y / scale

    bounds = ([1e-3, 1e-3, 0.2], [5.0, 5.0, 3.0])
    best = None
    for c_h, s_h, off in itertools.product((0.2, 0.5), (0.3, 0.6), (0.7, 1.0, 1.3)):
        res = optimize.least_squares(resid, [c_h, s_h, off], bounds=bounds, xtol=1e-14, ftol=1e-14, gtol=1e-14)
        if best is None or res.cost < best.cost:
            best = res
    _, coef = linear(best.x)
    coef = coef * scale
    c_h, s_h, s_off = best.x * g
    return TripletFit(
        sideband_offset=float(s_off),
        sideband_hwhm=float(s_h),
        center_hwhm=float(c_h),
        center_area=float(coef[0]),
        sideband_area=float(coef[1]),
        dispersive_area=float(coef[2]),
        narrow_area=float(coef[3]) if narrow_hwhm else 0.0,
        residual_rms=float(np.sqrt(np.mean(best.fun**2))),
    )


def fit_lorentzian(nu, values) -> LorentzianFit:
    """Single Lorentzian on a flat offset, started from the half-maximum width."""
    nu = np.asarray(nu, dtype=float)
    y = np.asarray(values, dtype=float)
    if nu.shape != y.shape or nu.size < 5:
        raise InvalidParameterError("need matching grids with >= 5 samples")
    base = float(np.min(y))
    peak = int(np.argmax(y))
    above = nu[y - base >= 0.5 * (y[peak] - base)]
    width0 = max(float(above[-1] - above[0]), float(np.min(np.diff(nu))))
    scale = float(y[peak] - base) or 1.0

    def resid(p):
        c, w, a, off = p
        return (a * _lor(nu - c, 0.5 * w) + off - y) / scale

    p0 = [nu[peak], width0, 0.5 * np.pi * width0 * scale, base]
    res = optimize.least_squares(resid, p0, x_scale=[width0, width0, abs(p0[2]), scale])
    c, w, a, off = res.x
    return LorentzianFit(float(c), float(abs(w)), float(a), float(off))
