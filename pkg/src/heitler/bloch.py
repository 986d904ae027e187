"""Optical Bloch equations and quantum-regression correlators.

This is the reference path for every closed-form expression in
:mod:`heitler.closed_form`. The Bloch generator is assembled numerically
from the rotating-frame Hamiltonian and the Lindblad collapse operators,
so nothing here reuses the analytic results it is meant to check.

Conventions: basis ``(e, g)``, ``sigma_minus = |g><e|``, Bloch components
``(<sx>, <sy>, <sz>)`` with ``<sx> = 2 Re rho_eg`` and ``<sy> = -2 Im rho_eg``
where ``rho_eg = <sigma_minus>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, linalg

from .exceptions import IntegrationError, NoEmissionError
from .params import TwoLevelParams
from .traces import CorrelationTrace, as_grid

__all__ = [
    "BlochVector",
    "bloch_generator",
    "steady_state",
    "field_correlation_oracle",
    "g2_oracle",
    "correlators_oracle",
    "spectrum_oracle",
    "wiener_khinchin_spectrum",
]

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
_SM = np.array([[0, 0], [1, 0]], dtype=complex)
_PAULI = (_SX, _SY, _SZ)


@dataclass(frozen=True)
class BlochVector:
    """Steady-state Bloch vector, ``u = 2 Re rho_eg``, ``v = 2 Im rho_eg``, ``w = rho_ee - rho_gg``."""

    u: float
    v: float
    w: float
    # rho_ee without the cancellation in (w + 1) / 2 at weak drive, when known
    excited: float | None = field(default=None, compare=False, repr=False)

    @property
    def excited_population(self):
        if self.excited is not None:
            return self.excited
        return 0.5 * (self.w + 1.0)

    @property
    def coherence_squared(self):
        """``|rho_eg|**2``."""
        return 0.25 * (self.u**2 + self.v**2)

    @property
    def sigma_minus(self):
        """``<sigma_minus> = rho_eg``."""
        return 0.5 * (self.u + 1j * self.v)

    @property
    def length(self):
        return float(np.sqrt(self.u**2 + self.v**2 + self.w**2))


def _lindbladian(params):
    h = np.array([[-params.detuning, 0.5 * params.rabi], [0.5 * params.rabi, 0.0]], dtype=complex)
    collapse = [np.sqrt(params.gamma) * _SM]
    gd = params.pure_dephasing_rate
    if gd > 0:
        # sqrt(gd/2) sigma_z damps the coherence at gd
        collapse.append(np.sqrt(0.5 * gd) * _SZ)

    def apply(rho):
        out = -1j * (h @ rho - rho @ h)
        for c in collapse:
            cd = c.conj().T
            out += c @ rho @ cd - 0.5 * (cd @ c @ rho + rho @ cd @ c)
        return out

    return apply


def bloch_generator(params: TwoLevelParams):
    """Affine Bloch generator ``d r/dt = M r + b``.

    Returns
    -------
    M : ndarray, shape (3, 3)
    b : ndarray, shape (3,)
    """
    lind = _lindbladian(params)
    m = np.empty((3, 3))
    for j, sj in enumerate(_PAULI):
        image = lind(sj)
        for i, si in enumerate(_PAULI):
            m[i, j] = 0.5 * np.trace(si @ image).real
    image = lind(np.eye(2, dtype=complex))
    b = np.array([0.5 * np.trace(si @ image).real for si in _PAULI])
    return m, b


def steady_state(params: TwoLevelParams) -> BlochVector:
    """Stationary solution of the optical Bloch equations.

    >>> bv = steady_state(TwoLevelParams(t1=1.0, t2=2.0, rabi=0.0))
    >>> (bv.u, bv.v, bv.w)
    (0.0, 0.0, -1.0)
    """
    m, b = bloch_generator(params)
    # Eliminate the coherences first: their block holds only decay and detuning,
    # so (u, y) = w * k keeps full relative precision however weak the drive.
    # A plain 3x3 solve carries errors of order |w| into the tiny coherences.
    k = np.linalg.solve(m[:2, :2], -m[:2, 2])
    w = -b[2] / (m[2, 2] + m[2, :2] @ k)
    u, y = w * k + 0.0  # fold -0.0
    # the z row reads m22 (w + 1) = -(m20 u + m21 y) because b2 = m22 = -gamma
    excited = -0.5 * (m[2, 0] * u + m[2, 1] * y) / m[2, 2] + 0.0
    return BlochVector(u=float(u), v=float(-y + 0.0), w=float(w), excited=float(excited))


def _affine_propagators(m, inhom, delays):
    """``exp(A tau)`` for the augmented generator ``[[M, inhom], [0, 0]]``."""
    n = m.shape[0]
    aug = np.zeros((n + 1, n + 1), dtype=complex)
    aug[:n, :n] = m
    aug[:n, n] = inhom
    return linalg.expm(aug[None, :, :] * np.asarray(delays)[:, None, None])


def _regression_field(params, delays, method):
    """``<r(tau) sigma_minus(0)>`` for every delay, shape (n, 3)."""
    m, b = bloch_generator(params)
    ss = steady_state(params)
    sm = ss.sigma_minus
    ree = ss.excited_population
    # sx sm = |e><e|, sy sm = -i |e><e|, sz sm = -sm
    c0 = np.array([ree, -1j * ree, -sm], dtype=complex)
    return _propagate(m, b * sm, c0, delays, method, params.t1)


def _propagate(m, inhom, c0, delays, method, t_scale):
    if method == "expm":
        props = _affine_propagators(m, inhom, delays)
        x0 = np.append(c0, 1.0)
        return (props @ x0)[:, :3]
    if method == "ode":
        def rhs(_t, y):
            c = y[:3] + 1j * y[3:]
            d = m @ c + inhom
            return np.concatenate([d.real, d.imag])

        sol = integrate.solve_ivp(
            rhs,
            (0.0, float(delays[-1]) if delays[-1] > 0 else t_scale),
            np.concatenate([c0.real, c0.imag]),
            method="DOP853",
            t_eval=delays,
            rtol=1e-12,
            atol=1e-14,
            max_step=t_scale / 4,
        )
        if not sol.success:
            raise IntegrationError(f"Bloch propagation failed: {sol.message}")
        return (sol.y[:3] + 1j * sol.y[3:]).T
    raise ValueError(f"unknown method {method!r}")


def field_correlation_oracle(params: TwoLevelParams, delays, method="expm", incoherent=False):
    """First-order correlation ``G(tau) = <sigma_plus(tau) sigma_minus(0)>``.

    Parameters
    ----------
    params : TwoLevelParams
    delays : array_like
        Non-negative, strictly increasing delays (s).
    method : {"expm", "ode"}
        Matrix exponential of the regression generator or adaptive
        time stepping; the two agree to ~1e-10 and serve as mutual checks.
    incoherent : bool
        Subtract the coherent plateau ``|<sigma_minus>|**2``.

    Returns
    -------
    CorrelationTrace
        Unnormalized (``G(0) = rho_ee``), complex for a detuned drive. With
        no drive the emitter never scatters; the free-induction decay of a
        unit dipole, ``exp(-tau / t2)``, is returned instead.
    """
    delays = as_grid(delays, "delays")
    if delays[0] < 0:
        raise ValueError("delays must be non-negative")
    kind = "g1_incoherent" if incoherent else "g1_total"
    if params.rabi == 0:
        m, _ = bloch_generator(params)
        c0 = np.array([1.0, -1j, 0.0], dtype=complex)
        c = _propagate(m, np.zeros(3), c0, delays, method, params.t1)
        g = 0.5 * (c[:, 0] + 1j * c[:, 1])
        return CorrelationTrace(delays, _maybe_real(g), kind)
    c = _regression_field(params, delays, method)
    g = 0.5 * (c[:, 0] + 1j * c[:, 1])
    if incoherent:
        g = g - abs(steady_state(params).sigma_minus) ** 2
    return CorrelationTrace(delays, _maybe_real(g), kind)


def _maybe_real(values):
    if np.all(np.abs(values.imag) <= 1e-15 * max(np.abs(values).max(), 1e-300)):
        return values.real.copy()
    return values


def g2_oracle(params: TwoLevelParams, delays, method="expm"):
    """Normalized intensity correlation from the quantum regression theorem.

    After a detection the emitter is in the ground state, so
    ``g2(tau) = rho_ee(tau | ground) / rho_ee(steady state)``.
    """
    delays = as_grid(delays, "delays")
    if delays[0] < 0:
        raise ValueError("delays must be non-negative")
    ree = steady_state(params).excited_population
    if params.rabi == 0 or ree <= 0:
        raise NoEmissionError("no drive: the emitter scatters no photons and g2 is undefined")
    m, b = bloch_generator(params)
    c = _propagate(m, b.astype(complex), np.array([0, 0, -1.0], dtype=complex), delays, method, params.t1)
    g2 = 0.5 * (c[:, 2].real + 1.0) / ree
    return CorrelationTrace(delays, g2, "g2")


def correlators_oracle(params: TwoLevelParams, delays, method="expm"):
    """Unnormalized total field correlation and ``g2`` on the same delays."""
    g2 = g2_oracle(params, delays, method)
    g1 = field_correlation_oracle(params, delays, method)
    return g1, g2


def spectrum_oracle(params: TwoLevelParams, grid):
    """Incoherent emission density (photons/s per Hz) from the regression resolvent.

    Covers detuned drives. Frequencies are linear detunings from the laser;
    the result integrates to ``gamma * (rho_ee - |rho_eg|**2)``.
    """
    grid = as_grid(grid, "grid", strictly_increasing=False)
    m, b = bloch_generator(params)
    ss = steady_state(params)
    sm = ss.sigma_minus
    ree = ss.excited_population
    c0 = np.array([ree, -1j * ree, -sm], dtype=complex)
    r_ss = np.array([ss.u, -ss.v, ss.w])
    # incoherent part: deviations from the stationary value obey d = M d
    d0 = c0 - r_ss * sm
    out = np.empty(grid.size)
    eye = np.eye(3)
    for k, nu in enumerate(grid):
        s = -2j * np.pi * nu
        d = np.linalg.solve(s * eye - m, d0)
        out[k] = 2.0 * np.real(0.5 * (d[0] + 1j * d[1]))
    return params.gamma * out


def wiener_khinchin_spectrum(delays, correlation, grid):
    """Spectral density from a one-sided correlation function by quadrature.

    ``S(nu) = 2 Re int_0^inf G(tau) exp(2 pi i nu tau) d tau`` evaluated with
    composite Simpson on the supplied (uniform, fine) delay grid. Intended as
    an independent numerical check, not for speed.
    """
    delays = as_grid(delays, "delays")
    g = np.asarray(correlation)
    grid = as_grid(grid, "grid", strictly_increasing=False)
    out = np.empty(grid.size)
    chunk = max(1, 2_000_000 // delays.size)
    for start in range(0, grid.size, chunk):
        nu = grid[start:start + chunk]
        kernel = np.exp(2j * np.pi * nu[:, None] * delays[None, :])
        out[start:start + chunk] = 2.0 * np.real(integrate.simpson(g[None, :] * kernel, x=delays, axis=1))
    return out
