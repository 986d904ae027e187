"""Monte Carlo photon streams and their correlation estimators.

Emission times come from a quantum-jump unraveling of the master
equation. Between jumps the (unnormalized) state evolves under

    H_eff = H - i/2 (gamma + 2 gamma_d) |e><e|

where the emission channel is ``sqrt(gamma) sigma_minus`` and pure
dephasing is the projective channel ``sqrt(2 gamma_d) |e><e|``. Both jump
rates are proportional to the excited amplitude, so a jump is an emission
with fixed probability ``gamma / (gamma + 2 gamma_d)``. The state after an
emission is ``|g>`` and after a dephasing jump ``|e>``: the waiting-time
distributions out of those two states are all that is needed, and they are
tabulated once and sampled by inverse CDF.

Seeds: every public function takes an integer seed and builds its own
``numpy.random.Generator``. Independent sub-streams for the same scenario
are derived with ``numpy.random.SeedSequence(seed).spawn(n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bloch import steady_state
from .exceptions import InvalidParameterError
from .params import TwoLevelParams
from .traces import as_grid

__all__ = [
    "PhotonStream",
    "DetectorModel",
    "CorrelationHistogram",
    "FringeFit",
    "WaitingTimeSampler",
    "simulate_stream",
    "apply_detector",
    "hbt_split",
    "g2_histogram",
    "merge_histograms",
    "visibility_from_fringe",
    "spawn_seeds",
    "write_stream",
    "read_stream",
]

# emission times are refined to this fraction of t1
_TIME_TOL = 1e-9
# survival table spacing, in units of t1
_TABLE_STEP = 0.05
# a record cut at max_photons ends this long after its last emission (s)
_TAIL_MARGIN = 1e-12
# the table ends once survival drops below this; beyond it the slowest mode is extrapolated
_TABLE_FLOOR = 1e-13


def spawn_seeds(seed, n):
    """``n`` independent integer seeds derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


@dataclass(frozen=True)
class PhotonStream:
    """Detection timestamps (s) in ``[0, duration)``, strictly increasing."""

    timestamps: np.ndarray
    duration: float
    channel: str = "0"
    seed: int | None = None

    def __post_init__(self):
        t = np.asarray(self.timestamps, dtype=float).ravel()
        if not self.duration > 0:
            raise InvalidParameterError("duration must be positive")
        if t.size:
            if t[0] < 0 or t[-1] >= self.duration:
                raise InvalidParameterError("timestamps must lie in [0, duration)")
            if np.any(np.diff(t) <= 0):
                raise InvalidParameterError("timestamps must be strictly increasing")
        object.__setattr__(self, "timestamps", t)

    def __len__(self):
        return self.timestamps.size

    @property
    def rate(self):
        return self.timestamps.size / self.duration


@dataclass(frozen=True)
class DetectorModel:
    """Single-photon detector: efficiency, dark counts (1/s), jitter FWHM and dead time (s)."""

    efficiency: float = 1.0
    dark_rate: float = 0.0
    jitter_fwhm: float = 0.0
    dead_time: float = 0.0

    def __post_init__(self):
        if not 0 <= self.efficiency <= 1:
            raise InvalidParameterError("efficiency must lie in [0, 1]")
        for name in ("dark_rate", "jitter_fwhm", "dead_time"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidParameterError(f"{name} must be finite and >= 0")


class WaitingTimeSampler:
    """Inverse-CDF sampler for the no-jump survival out of a fixed pure state.

    The survival ``S(t) = |exp(-i H_eff t) psi0|**2`` is tabulated on a
    uniform grid; a uniform variate ``u`` is bracketed by linear
    interpolation of the table and the time with ``S(t) = u`` is then
    refined by bisection on the exact propagator.
    """

    def __init__(self, params: TwoLevelParams, start="g"):
        self.t1 = params.t1
        gd = params.pure_dephasing_rate
        loss = params.gamma + 2.0 * gd
        h = np.array(
            [[-params.detuning - 0.5j * loss, 0.5 * params.rabi], [0.5 * params.rabi, 0.0]],
            dtype=complex,
        )  # basis (e, g)
        self._gen = -1j * h
        self._psi0 = np.array([0.0, 1.0], complex) if start == "g" else np.array([1.0, 0.0], complex)
        eig = np.linalg.eigvals(self._gen)
        # slowest decay of the norm; survival ~ exp(2 Re(lambda) t) asymptotically
        self._slow = -2.0 * eig.real.max()
        self.never = self._slow <= 0 or (start == "g" and params.rabi == 0)
        if self.never:
            return
        step = _TABLE_STEP * self.t1
        horizon = max(50.0 * self.t1, 40.0 / self._slow)
        times = np.arange(0.0, horizon + step, step)
        surv = self.survival(times)
        while surv[-1] > _TABLE_FLOOR:
            extra = times[-1] + step * np.arange(1, times.size + 1)
            times = np.concatenate([times, extra])
            surv = np.concatenate([surv, self.survival(extra)])
        # survival is non-increasing by construction; guard round-off before inverting
        self._times = times
        self._surv = np.minimum.accumulate(surv)

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        a = self._gen
        tr = 0.5 * (a[0, 0] + a[1, 1])
        b = a - tr * np.eye(2)
        q = np.sqrt(complex(b[0, 0] ** 2 + b[0, 1] * b[1, 0]))
        qt = q * t
        small = np.abs(qt) < 1e-4
        with np.errstate(invalid="ignore", divide="ignore"):
            shc = np.where(small, 1.0 + qt**2 / 6.0 + qt**4 / 120.0, np.sinh(qt) / np.where(small, 1.0, qt))
        ch = np.cosh(qt)
        pref = np.exp(tr * t)
        bpsi = b @ self._psi0
        e_amp = pref * (ch * self._psi0[0] + t * shc * bpsi[0])
        g_amp = pref * (ch * self._psi0[1] + t * shc * bpsi[1])
        return np.abs(e_amp) ** 2 + np.abs(g_amp) ** 2

    def sample(self, rng, n):
        if self.never:
            return np.full(n, np.inf)
        u = 1.0 - rng.random(n)  # (0, 1]
        times, surv = self._times, self._surv
        out = np.empty(n)
        beyond = u < surv[-1]
        if np.any(beyond):
            out[beyond] = times[-1] + np.log(surv[-1] / u[beyond]) / self._slow
        inside = ~beyond
        ui = u[inside]
        # surv is decreasing; search on the reversed array
        idx = surv.size - np.searchsorted(surv[::-1], ui, side="left")
        idx = np.clip(idx, 1, surv.size - 1)
        lo = times[idx - 1].copy()
        hi = times[idx].copy()
        tol = _TIME_TOL * self.t1
        while np.any(hi - lo > tol):
            mid = 0.5 * (lo + hi)
            above = self.survival(mid) > ui
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        out[inside] = 0.5 * (lo + hi)
        return out


def _emission_intervals(rng, sampler_g, sampler_e, p_emit, n):
    waits = sampler_g.sample(rng, n)
    if p_emit >= 1.0:
        return waits
    # dephasing jumps before each emission: geometric count, each restarting from |e>
    extra = rng.geometric(p_emit, size=n) - 1
    total = int(extra.sum())
    if total:
        e_waits = sampler_e.sample(rng, total)
        owner = np.repeat(np.arange(n), extra)
        waits = waits + np.bincount(owner, weights=e_waits, minlength=n)
    return waits


def simulate_stream(params: TwoLevelParams, duration, seed, max_photons=None) -> PhotonStream:
    """Emission times of one quantum-jump trajectory starting in the ground state.

    Parameters
    ----------
    params : TwoLevelParams
    duration : float
        Length of the record (s).
    seed : int
    max_photons : int, optional
        Stop after this many emissions; ``duration`` then ends 1 ps after
        the last one.

    Returns
    -------
    PhotonStream
        Empty (but valid) when the emitter is not driven.
    """
    if not duration > 0:
        raise InvalidParameterError("duration must be positive")
    rng = np.random.default_rng(seed)
    sampler_g = WaitingTimeSampler(params, "g")
    if sampler_g.never:
        return PhotonStream(np.zeros(0), duration, "emitter", seed)
    gd = params.pure_dephasing_rate
    p_emit = params.gamma / (params.gamma + 2.0 * gd)
    sampler_e = WaitingTimeSampler(params, "e") if p_emit < 1 else None
    rate = params.gamma * steady_state(params).excited_population
    expected = duration * rate
    if max_photons is not None:
        expected = min(expected, max_photons)
    chunk = int(min(max(1024, 1.05 * expected + 5 * math.sqrt(expected + 1)), 4_000_000))
    pieces = []
    t0 = 0.0
    count = 0
    while True:
        times = t0 + np.cumsum(_emission_intervals(rng, sampler_g, sampler_e, p_emit, chunk))
        keep = times < duration
        if max_photons is not None:
            keep[max(0, max_photons - count):] = False
        pieces.append(times[keep])
        count += int(keep.sum())
        if not keep.all():
            break
        t0 = times[-1]
    stamps = np.concatenate(pieces)
    if max_photons is not None and count >= max_photons and stamps.size:
        duration = float(stamps[-1] + _TAIL_MARGIN)
    return PhotonStream(stamps, duration, "emitter", seed)


def apply_detector(stream: PhotonStream, det: DetectorModel, seed) -> PhotonStream:
    """Thin, jitter, add dark counts and apply a non-paralyzable dead time."""
    rng = np.random.default_rng(seed)
    t = stream.timestamps
    if det.efficiency < 1:
        t = t[rng.random(t.size) < det.efficiency]
    if det.jitter_fwhm > 0:
        t = t + rng.normal(0.0, det.jitter_fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0))), t.size)
    if det.dark_rate > 0:
        n_dark = rng.poisson(det.dark_rate * stream.duration)
        t = np.concatenate([t, rng.uniform(0.0, stream.duration, n_dark)])
    t = np.sort(t[(t >= 0) & (t < stream.duration)], kind="stable")
    t = np.unique(t)
    if det.dead_time > 0 and t.size:
        keep = np.zeros(t.size, dtype=bool)
        last = -np.inf
        for i, ti in enumerate(t):
            if ti - last >= det.dead_time:
                keep[i] = True
                last = ti
        t = t[keep]
    return PhotonStream(t, stream.duration, stream.channel, stream.seed)


def hbt_split(stream: PhotonStream, seed):
    """Route each photon to channel ``"A"`` or ``"B"`` with probability 1/2."""
    rng = np.random.default_rng(seed)
    to_a = rng.random(len(stream)) < 0.5
    t = stream.timestamps
    return (
        PhotonStream(t[to_a], stream.duration, "A", stream.seed),
        PhotonStream(t[~to_a], stream.duration, "B", stream.seed),
    )


@dataclass(frozen=True)
class CorrelationHistogram:
    """Cross-correlation histogram of ``t_b - t_a``.

    Bins are centred on integer multiples of the bin width. ``normalized``
    divides each bin by ``rate_a * rate_b * bin_width * (duration - |tau|)``.
    """

    bin_edges: np.ndarray
    counts: np.ndarray
    normalized: np.ndarray
    total_pairs: int
    expected: np.ndarray = field(repr=False, default=None)

    @property
    def centers(self):
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def bin_width(self):
        return float(self.bin_edges[1] - self.bin_edges[0])


def _pair_differences(a, b, max_delay):
    lo = np.searchsorted(b, a - max_delay, side="left")
    hi = np.searchsorted(b, a + max_delay, side="right")
    n = hi - lo
    total = int(n.sum())
    if total == 0:
        return np.zeros(0)
    owner = np.repeat(np.arange(a.size), n)
    start = np.repeat(lo - np.concatenate([[0], np.cumsum(n)[:-1]]), n)
    idx = start + np.arange(total)
    return b[idx] - a[owner]


def g2_histogram(a: PhotonStream, b: PhotonStream, bin_width, max_delay) -> CorrelationHistogram:
    """Histogram every pair with ``|t_b - t_a| <= max_delay``.

    All pairs are counted (not start-stop), so the estimate carries no
    pile-up bias. Normalization uses the measured channel rates with an
    overlap correction ``duration - |tau|``.
    """
    if not bin_width > 0 or not max_delay >= bin_width:
        raise InvalidParameterError("need bin_width > 0 and max_delay >= bin_width")
    if len(a) == 0 or len(b) == 0:
        raise InvalidParameterError("both streams must contain photons")
    if a.duration != b.duration:
        raise InvalidParameterError("streams must share one duration")
    n_half = int(math.floor(max_delay / bin_width + 0.5 + 1e-9))
    edges = (np.arange(-n_half, n_half + 2) - 0.5) * bin_width
    diffs = _pair_differences(a.timestamps, b.timestamps, edges[-1])
    counts, _ = np.histogram(diffs, bins=edges)
    centers = 0.5 * (edges[1:] + edges[:-1])
    duration = a.duration
    expected = (len(a) / duration) * (len(b) / duration) * bin_width * (duration - np.abs(centers))
    return CorrelationHistogram(edges, counts.astype(np.int64), counts / expected, int(counts.sum()), expected)


def merge_histograms(hists):
    """Sum histograms from independent segments with identical binning."""
    hists = list(hists)
    if not hists:
        raise InvalidParameterError("nothing to merge")
    edges = hists[0].bin_edges
    for h in hists[1:]:
        if not np.array_equal(h.bin_edges, edges):
            raise InvalidParameterError("histograms use different bins")
    counts = sum(h.counts for h in hists)
    expected = sum(h.expected for h in hists)
    return CorrelationHistogram(edges, counts, counts / expected, int(counts.sum()), expected)


@dataclass(frozen=True)
class FringeFit:
    visibility: float
    offset: float
    amplitude: float
    phase: float
    flat: bool


def visibility_from_fringe(phase, counts) -> FringeFit:
    """Least-squares fit of ``c + a cos(phase + phi0)``; visibility is ``a / c``."""
    phase = np.asarray(phase, dtype=float).ravel()
    counts = np.asarray(counts, dtype=float).ravel()
    if phase.shape != counts.shape or phase.size < 3:
        raise InvalidParameterError("need >= 3 matching (phase, counts) samples")
    # each sample stands for one mean spacing, so a uniform grid without its endpoint counts as a period
    coverage = np.ptp(phase) * phase.size / (phase.size - 1)
    if coverage < 2.0 * np.pi * (1 - 1e-9):
        raise InvalidParameterError("phase samples must cover at least one full period")
    design = np.column_stack([np.ones_like(phase), np.cos(phase), -np.sin(phase)])
    (c, x, y), *_ = np.linalg.lstsq(design, counts, rcond=None)
    amp = math.hypot(x, y)
    scale = max(abs(c), np.abs(counts).max(), 1e-300)
    if amp <= 1e-12 * scale or c <= 0:
        return FringeFit(0.0, float(c), 0.0, 0.0, True)
    return FringeFit(amp / c, float(c), amp, math.atan2(y, x), False)


def write_stream(stream: PhotonStream, path):
    """One timestamp per line in ns, fixed-point at 1 fs, after a header comment.

    Fixed-point keeps the absolute resolution constant over long records,
    which a fixed number of significant digits would not.
    """
    ns = stream.timestamps * 1e9
    lines = [f"{t:.6f}" for t in ns]
    if len(set(lines)) != len(lines):
        raise InvalidParameterError("timestamps collide at 1 fs resolution")
    duration_ns = float(stream.duration * 1e9)
    if lines and float(lines[-1]) >= duration_ns:
        raise InvalidParameterError("last timestamp rounds onto the end of the record")
    header = f"# unit=ns duration={duration_ns!r} seed={stream.seed} channel={stream.channel}\n"
    Path(path).write_text(header + "".join(s + "\n" for s in lines))


def read_stream(path) -> PhotonStream:
    """Inverse of :func:`write_stream`; times come back in seconds."""
    path = Path(path)
    with path.open() as fh:
        first = fh.readline()
    if not first.startswith("#"):
        raise InvalidParameterError(f"{path}: missing header line")
    meta = dict(tok.split("=", 1) for tok in first[1:].split() if "=" in tok)
    if "duration" not in meta or meta.get("unit") != "ns":
        raise InvalidParameterError(f"{path}: header must give unit=ns and duration")
    stamps = np.loadtxt(path, comments="#", ndmin=1) * 1e-9
    seed = meta.get("seed")
    return PhotonStream(
        stamps,
        float(meta["duration"]) * 1e-9,
        meta.get("channel", "0"),
        None if seed in (None, "None") else int(seed),
    )
