"""Closed-form resonance-fluorescence expressions for a resonant drive.

With ``g1 = 1/t1``, ``g2 = 1/t2``, ``eta = (g1 + g2)/2`` and
``mu = sqrt(rabi**2 - ((g1 - g2)/2)**2)`` the incoherent field correlation
normalized to the excited population is

    G_inc(tau)/rho_ee = 1/2 exp(-g2 tau)
                        + exp(-eta tau) [N cos(mu tau) + M sin(mu tau)]

    N = (rabi**2 - g1 (g1 - g2)) / (2 (rabi**2 + g1 g2))
    M = (rabi**2 (3 g1 - g2) - g1 (g1 - g2)**2) / (4 mu (rabi**2 + g1 g2))

and the incoherent spectrum (photons/s per Hz, omega = 2 pi nu) is

    S_inc = gamma rho_ee [ g2/(omega**2 + g2**2)
            + ((A eta/2 + (omega + mu) B/(8 mu)) / ((omega + mu)**2 + eta**2)
             + (A eta/2 - (omega - mu) B/(8 mu)) / ((omega - mu)**2 + eta**2))
              / (rabi**2 + g1 g2) ]

    A = rabi**2 - g1 (g1 - g2)
    B = 2 rabi**2 (3 g1 - g2) - 2 g1 (g1 - g2)**2

Below ``rabi = |g1 - g2|/2`` the sidebands merge (``mu`` imaginary) and the
trigonometric functions continue to hyperbolic ones. Every expression here
is checked against :mod:`heitler.bloch` in the test suite.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .bloch import steady_state
from .exceptions import InvalidParameterError, NoEmissionError, UnsupportedConfigurationError
from .params import TwoLevelParams
from .traces import CorrelationTrace, PoleSum, SpectrumTrace, as_grid

logger = logging.getLogger(__name__)

__all__ = [
    "MollowCoefficients",
    "CoherentFractionReport",
    "mollow_coefficients",
    "coherent_fraction",
    "coherent_fraction_report",
    "incoherent_lines",
    "spectrum_incoherent_closed",
    "spectrum_total",
    "g1_incoherent_closed",
    "g2_closed",
    "g2_bin_averaged",
]

# below this |mu| * t1 the oscillatory factors are replaced by their series
_CRITICAL = 1e-6


def _require_resonant(params):
    if not params.is_resonant:
        raise UnsupportedConfigurationError(
            "closed forms assume a resonant drive; use heitler.bloch for detuned emitters"
        )


@dataclass(frozen=True)
class MollowCoefficients:
    """Shorthand coefficients of the resonant spectrum and field correlation (SI units).

    ``mu`` and ``omega_prime`` are the same oscillation frequency. In the
    overdamped regime ``overdamped`` is set, ``mu`` holds the real decay
    splitting ``sqrt(((g1 - g2)/2)**2 - rabi**2)`` and ``m_coef`` is the
    coefficient of ``sinh`` instead of ``sin``.
    """

    a: float
    b: float
    mu: float
    eta: float
    omega_prime: float
    n_coef: float
    m_coef: float
    overdamped: bool
    mu_squared: float
    m_times_mu: float

    @property
    def critical(self):
        return abs(self.mu_squared) ** 0.5 < _CRITICAL * self.eta


def mollow_coefficients(params: TwoLevelParams) -> MollowCoefficients:
    _require_resonant(params)
    g1, g2, om = 1.0 / params.t1, 1.0 / params.t2, params.rabi
    eta = 0.5 * (g1 + g2)
    mu2 = om**2 - 0.25 * (g1 - g2) ** 2
    mu = math.sqrt(abs(mu2))
    denom = om**2 + g1 * g2
    a = om**2 - g1 * (g1 - g2)
    b = 2.0 * om**2 * (3.0 * g1 - g2) - 2.0 * g1 * (g1 - g2) ** 2
    n = a / (2.0 * denom)
    x = b / (8.0 * denom)  # = M * mu
    if mu < _CRITICAL * eta:
        m = math.inf if x else 0.0
    else:
        # sin(i k t) / (i k) = sinh(k t) / k, so the sinh coefficient is x / k either way
        m = x / mu
    return MollowCoefficients(
        a=a, b=b, mu=mu, eta=eta, omega_prime=mu, n_coef=n, m_coef=m,
        overdamped=mu2 < 0, mu_squared=mu2, m_times_mu=x,
    )


@dataclass(frozen=True)
class CoherentFractionReport:
    """Reference coherent fraction and the alternative textbook expression.

    ``textbook`` is ``(1/2 + t1/t2 + 2 rabi**2 t1**2)**-1``; it coincides with
    the Bloch result only for ``t2 = 2 t1``.
    """

    oracle: float
    textbook: float

    @property
    def deviation(self):
        return self.textbook - self.oracle


def coherent_fraction_report(params: TwoLevelParams) -> CoherentFractionReport:
    _require_resonant(params)
    return CoherentFractionReport(
        oracle=_coherent_fraction_any(params),
        textbook=1.0 / (0.5 + params.t1 / params.t2 + 2.0 * params.rabi**2 * params.t1**2),
    )


def _coherent_fraction_any(params):
    ss = steady_state(params)
    ree = ss.excited_population
    if ree <= 0:
        # weak-drive limit of |rho_eg|^2 / rho_ee
        return min(1.0, params.t2 / (2.0 * params.t1))
    return ss.coherence_squared / ree


def coherent_fraction(params: TwoLevelParams) -> float:
    """Elastic share ``I_coh / (I_coh + I_inc)`` of the scattered light.

    Computed from the Bloch steady state as ``|rho_eg|**2 / rho_ee``.

    Examples
    --------
    >>> p = TwoLevelParams.from_gamma_units(760e-12, 0.22)
    >>> round(1 - coherent_fraction(p), 4)
    0.0883
    """
    report = coherent_fraction_report(params)
    if abs(report.deviation) > 1e-9:
        logger.debug(
            "coherent fraction: Bloch %.6g vs textbook form %.6g (t2/t1 = %.4g)",
            report.oracle, report.textbook, params.t2 / params.t1,
        )
    return report.oracle


def _mollow_poles(coef):
    """Exponents and weights of the ``exp(-eta tau)[N cos + M sin]`` factor, per unit rho_ee."""
    n, x = coef.n_coef, coef.m_times_mu
    if coef.critical:
        # nudge off the exceptional point; the induced error is O(mu^2 tau^2)
        mu = complex(_CRITICAL * coef.eta)
    elif coef.overdamped:
        mu = 1j * coef.mu
    else:
        mu = complex(coef.mu)
    m = x / mu
    lam = np.array([coef.eta - 1j * mu, coef.eta + 1j * mu])
    c = np.array([0.5 * (n - 1j * m), 0.5 * (n + 1j * m)])
    return lam, c


def incoherent_lines(params: TwoLevelParams) -> PoleSum:
    """Incoherent spectrum as a :class:`PoleSum` normalized to ``gamma * rho_ee * (1 - f_coh)``."""
    _require_resonant(params)
    coef = mollow_coefficients(params)
    ree = steady_state(params).excited_population
    lam_m, c_m = _mollow_poles(coef)
    lam = np.concatenate([[1.0 / params.t2], lam_m])
    c = np.concatenate([[0.5], c_m])
    scale = params.gamma * ree
    # exp(-lam tau) <-> pole lam / (2 pi) in Hz
    return PoleSum(c * scale, lam / (2.0 * np.pi))


def spectrum_incoherent_closed(params: TwoLevelParams, grid) -> SpectrumTrace:
    """Three-line incoherent spectrum on a linear-frequency grid (Hz).

    Densities are photons/s per Hz; the integral over all detunings is
    ``gamma * rho_ee * (1 - coherent_fraction)``.
    """
    _require_resonant(params)
    grid = as_grid(grid, "grid")
    lines = incoherent_lines(params)
    if params.rabi == 0:
        lines = PoleSum()
    return SpectrumTrace.from_lines(grid, PoleSum(), lines)


def spectrum_total(params: TwoLevelParams, laser_linewidth, grid) -> SpectrumTrace:
    """Incoherent spectrum plus the elastic line broadened to the laser FWHM (Hz).

    With ``laser_linewidth == 0`` the elastic part is kept as a delta weight
    in :attr:`SpectrumTrace.coherent_weight`.
    """
    _require_resonant(params)
    if not laser_linewidth >= 0:
        raise InvalidParameterError(f"laser_linewidth must be >= 0, got {laser_linewidth}")
    grid = as_grid(grid, "grid")
    ss = steady_state(params)
    emission = params.gamma * ss.excited_population
    coh_weight = params.gamma * ss.coherence_squared
    coherent = PoleSum.lorentzian(coh_weight, laser_linewidth)
    inc = incoherent_lines(params) if params.rabi > 0 else PoleSum()
    trace = SpectrumTrace.from_lines(grid, coherent, inc)
    logger.debug("spectrum_total: emission %.6g /s, elastic weight %.6g /s", emission, coh_weight)
    return trace


def _delays(delays):
    delays = as_grid(delays, "delays", strictly_increasing=False)
    if np.any(delays < 0):
        raise InvalidParameterError("delays must be non-negative; use |tau| for negative delays")
    return delays


def _oscillatory(coef, tau):
    """``cos(mu tau)`` and ``sin(mu tau)/mu`` on the appropriate branch."""
    mu = coef.mu
    if coef.critical:
        x2 = coef.mu_squared * tau**2
        return 1.0 - x2 / 2.0 + x2**2 / 24.0, tau * (1.0 - x2 / 6.0 + x2**2 / 120.0)
    if coef.overdamped:
        return np.cosh(mu * tau), np.sinh(mu * tau) / mu
    return np.cos(mu * tau), np.sin(mu * tau) / mu


def g1_incoherent_closed(params: TwoLevelParams, delays, normalize=True) -> CorrelationTrace:
    """Incoherent field correlation, normalized to 1 at zero delay by default.

    Without normalization the value at zero delay is ``1/2 + N``.
    """
    _require_resonant(params)
    tau = _delays(delays)
    coef = mollow_coefficients(params)
    cos_t, sinc_t = _oscillatory(coef, tau)
    # the hyperbolic branch flips sign on mu^2, so sin(mu t)/mu * (M mu) holds on both
    values = 0.5 * np.exp(-tau / params.t2) + np.exp(-coef.eta * tau) * (
        coef.n_coef * cos_t + coef.m_times_mu * sinc_t
    )
    if normalize:
        v0 = 0.5 + coef.n_coef
        if v0 <= 0:
            raise InvalidParameterError("incoherent emission vanishes; g1 cannot be normalized")
        values = values / v0
    return CorrelationTrace(tau, values, "g1_incoherent")


def g2_closed(params: TwoLevelParams, delays) -> CorrelationTrace:
    """``g2(tau) = 1 - exp(-eta tau) [cos(mu tau) + eta sin(mu tau)/mu]``.

    Raises
    ------
    NoEmissionError
        For an undriven emitter, whose normalized correlation is undefined.
    """
    _require_resonant(params)
    if params.rabi == 0:
        raise NoEmissionError("no drive, no emission: g2 is undefined at zero Rabi frequency")
    tau = _delays(delays)
    coef = mollow_coefficients(params)
    cos_t, sinc_t = _oscillatory(coef, tau)
    values = 1.0 - np.exp(-coef.eta * tau) * (cos_t + coef.eta * sinc_t)
    values[tau == 0] = 0.0
    return CorrelationTrace(tau, values, "g2")


def g2_bin_averaged(params: TwoLevelParams, centers, bin_width, order=16):
    """Mean of :func:`g2_closed` over bins ``[c - w/2, c + w/2]`` (Gauss-Legendre).

    This is the expectation of a normalized coincidence histogram bin.
    """
    centers = np.asarray(centers, dtype=float)
    x, w = np.polynomial.legendre.leggauss(order)
    nodes = np.abs(centers[:, None] + 0.5 * bin_width * x[None, :])
    vals = g2_closed(params, nodes.ravel()).values.reshape(nodes.shape)
    return 0.5 * (vals * w[None, :]).sum(axis=1)
