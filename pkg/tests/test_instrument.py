import math

import numpy as np
import pytest

from heitler import InvalidParameterError, ResolutionError
from heitler.bloch import steady_state
from heitler.closed_form import coherent_fraction, g2_closed, spectrum_total
from heitler.fitting import fit_lorentzian, fit_mollow_triplet
from heitler.instrument import (
    BackgroundModel,
    InstrumentResponse,
    calibrate_background,
    convolve_lorentzian,
    fp_scan,
    irf_convolve_correlation,
    laser_visibility,
    michelson_visibility,
    sbr_curves,
)
from heitler.traces import PoleSum, SpectrumTrace

from conftest import MHZ, NS, T1, drive

CAVITY = 29 * MHZ
LASER = 3 * MHZ


def _fwhm(x, y):
    above = x[y >= 0.5 * y.max()]
    return above[-1] - above[0]


def test_lorentzian_widths_add_through_trace():
    grid = np.linspace(-500 * MHZ, 500 * MHZ, 100001)
    tr = SpectrumTrace.from_lines(grid, PoleSum.lorentzian(1.0, 7 * MHZ), PoleSum())
    out = convolve_lorentzian(tr, CAVITY)
    assert _fwhm(grid, out.total) == pytest.approx(36 * MHZ, rel=1e-3)
    np.testing.assert_allclose(out.total, PoleSum.lorentzian(1.0, 36 * MHZ).density(grid), rtol=1e-12)


def test_delta_line_becomes_cavity_lorentzian():
    grid = np.linspace(-300 * MHZ, 300 * MHZ, 601)
    tr = SpectrumTrace.from_lines(grid, PoleSum.lorentzian(0.7, 0.0), PoleSum())
    out = convolve_lorentzian(tr, CAVITY)
    np.testing.assert_allclose(out.coherent, PoleSum.lorentzian(0.7, CAVITY).density(grid), rtol=1e-12)
    assert out.coherent_weight == 0.0


def test_numeric_path_agrees_with_analytic():
    grid = np.linspace(-5e9, 5e9, 50001)
    s = spectrum_total(drive(0.6), LASER, grid)
    a = convolve_lorentzian(s, CAVITY)
    b = convolve_lorentzian(s, CAVITY, numeric=True)
    assert np.max(np.abs(a.total - b.total)) / a.total.max() < 1e-4


def test_numeric_delta_line():
    grid = np.linspace(-2e9, 2e9, 40001)
    s = spectrum_total(drive(0.6), 0.0, grid)
    a = convolve_lorentzian(s, CAVITY)
    b = convolve_lorentzian(s, CAVITY, numeric=True)
    assert np.max(np.abs(a.total - b.total)) / a.total.max() < 1e-4


def test_coarse_grid_rejected():
    grid = np.linspace(-1e9, 1e9, 201)
    s = spectrum_total(drive(0.6), LASER, grid)
    with pytest.raises(ResolutionError):
        convolve_lorentzian(s, CAVITY, numeric=True)
    with pytest.raises(InvalidParameterError):
        convolve_lorentzian(s, 0.0)


def test_convolution_associative():
    grid = np.linspace(-1e9, 1e9, 401)
    s = spectrum_total(drive(1.0), LASER, grid)
    one = convolve_lorentzian(convolve_lorentzian(s, 10 * MHZ), 19 * MHZ)
    two = convolve_lorentzian(s, CAVITY)
    np.testing.assert_allclose(one.total, two.total, rtol=1e-6)


def test_two_component_shape_near_saturation():
    grid = np.linspace(-600 * MHZ, 600 * MHZ, 2401)
    scan = fp_scan(drive(0.6), LASER, CAVITY, grid)
    coh, inc = scan.components["coherent"], scan.components["incoherent"]
    # narrow elastic peak on a broad, still significant incoherent pedestal
    assert 0.05 < inc.max() / coh.max() < 1.0
    assert _fwhm(grid, coh) == pytest.approx(32 * MHZ, rel=1e-2)
    assert _fwhm(grid, inc) > 5 * CAVITY


def test_scan_weak_drive_resolution_limited():
    grid = np.linspace(-200 * MHZ, 200 * MHZ, 801)
    scan = fp_scan(drive(0.22), LASER, CAVITY, grid)
    lor = fit_lorentzian(grid, scan.counts)
    assert lor.fwhm == pytest.approx(CAVITY, rel=0.25)


def test_scan_strong_drive_sidebands():
    grid = np.linspace(-800 * MHZ, 800 * MHZ, 3201)
    scan = fp_scan(drive(1.5), LASER, CAVITY, grid)
    emitted = scan.components["coherent"] + scan.components["incoherent"]
    trip = fit_mollow_triplet(grid, emitted, 300 * MHZ, narrow_fwhm=LASER + CAVITY)
    assert trip.sideband_offset / MHZ == pytest.approx(310, abs=15)


def test_background_only_scan():
    grid = np.linspace(-200 * MHZ, 200 * MHZ, 401)
    bg = BackgroundModel(leakage_per_power=1000.0, dark_rate=100.0)
    scan = fp_scan(drive(0.0), LASER, CAVITY, grid, bg, power_ratio=2.0)
    expected = 100.0 + 2000.0 / (1 + (2 * grid / CAVITY) ** 2)
    np.testing.assert_allclose(scan.counts, expected, rtol=1e-12)
    assert np.all(scan.components["coherent"] == 0)


def test_scan_peak_reads_emission_rate():
    # a line much narrower than the cavity transmits its full rate at the peak
    p = drive(0.05)
    scan = fp_scan(p, 0.1 * MHZ, CAVITY, np.array([-1.0, 0.0, 1.0]))
    elastic = p.gamma * steady_state(p).coherence_squared
    assert scan.components["coherent"][1] == pytest.approx(elastic * CAVITY / (CAVITY + 0.1 * MHZ), rel=1e-9)


def test_scan_counts_nonnegative():
    grid = np.linspace(-1e9, 1e9, 401)
    scan = fp_scan(drive(2.0, 1.2), LASER, CAVITY, grid, BackgroundModel(10.0, 5.0, 0.01), 1.0)
    assert np.all(scan.counts >= 0)
    with pytest.raises(InvalidParameterError):
        fp_scan(drive(1.0), LASER, 0.0, grid)


def _g2_trace(p, span=20 * T1, step=T1 / 100):
    tau = np.arange(0.0, span + step / 2, step)
    return g2_closed(p, tau)


def test_delta_irf_is_identity():
    tr = _g2_trace(drive(1.5))
    out = irf_convolve_correlation(tr, InstrumentResponse.delta())
    np.testing.assert_array_equal(out.values[tr.values.size - 1:], tr.values)
    np.testing.assert_array_equal(out.values, out.raw)


def test_irf_fills_dip_and_keeps_limits():
    tr = _g2_trace(drive(0.22), span=30 * T1)
    out = irf_convolve_correlation(tr, InstrumentResponse.gaussian(0.4 * NS))
    zero = np.argmin(np.abs(out.delays))
    assert out.values[zero] > 0.0
    assert out.values[0] == pytest.approx(1.0, abs=1e-3)
    assert out.values[-1] == pytest.approx(1.0, abs=1e-3)
    dt = out.delays[1] - out.delays[0]
    area_before = np.sum(1 - out.raw) * dt
    area_after = np.sum(1 - out.values) * dt
    assert area_after == pytest.approx(area_before, rel=1e-6)
    np.testing.assert_array_equal(out.raw[tr.values.size - 1:], tr.values)


def test_irf_wider_than_support():
    tr = _g2_trace(drive(1.0), span=2 * T1)
    with pytest.raises(InvalidParameterError):
        irf_convolve_correlation(tr, InstrumentResponse.gaussian(5 * T1))


def test_tabulated_irf_from_file(tmp_path):
    t = np.linspace(-2 * NS, 2 * NS, 401)
    w = np.exp(-0.5 * (t / (0.17 * NS)) ** 2) * 7.0
    path = tmp_path / "irf.txt"
    np.savetxt(path, np.column_stack([t, w]), header="time_s weight")
    irf = InstrumentResponse.from_file(path)
    assert np.trapezoid(irf.weights, irf.grid) == pytest.approx(1.0)
    tr = _g2_trace(drive(1.0), span=20 * T1)
    a = irf_convolve_correlation(tr, irf).values
    b = irf_convolve_correlation(tr, InstrumentResponse.gaussian(0.17 * NS * 2.3548200450309493)).values
    assert np.max(np.abs(a - b)) < 1e-3


def test_response_validation(tmp_path):
    with pytest.raises(InvalidParameterError):
        InstrumentResponse.gaussian(0.0)
    with pytest.raises(InvalidParameterError):
        InstrumentResponse("tabulated", grid=[0.0, 1.0, 2.0], weights=[1.0, -1.0, 1.0])
    with pytest.raises(InvalidParameterError):
        InstrumentResponse("boxcar", fwhm=1.0)
    bad = tmp_path / "three.txt"
    np.savetxt(bad, np.ones((4, 3)))
    with pytest.raises(InvalidParameterError):
        InstrumentResponse.from_file(bad)


def test_visibility_at_zero_delay():
    v = michelson_visibility(drive(0.22), 53 * NS, 22 * NS, 0.9, [0.0, 1 * NS])
    assert v.values[0] == pytest.approx(0.9)


def test_visibility_tail_follows_coherent_time():
    p = drive(0.22)
    tau = np.linspace(30 * NS, 90 * NS, 61)
    v = michelson_visibility(p, 53 * NS, 22 * NS, 1.0, tau).values
    slope = np.polyfit(tau, np.log(v), 1)[0]
    assert -0.5 / slope == pytest.approx(22 * NS, rel=1e-6)
    assert v[0] / math.exp(-tau[0] / (2 * 22 * NS)) == pytest.approx(coherent_fraction(p), rel=1e-6)


def test_visibility_after_fast_transient():
    p = drive(0.17)
    v = michelson_visibility(p, 53 * NS, 22 * NS, 1.0, [2.68 * NS]).values[0]
    f = coherent_fraction(p)
    assert f == pytest.approx(0.95, abs=0.01)
    coherent_part = f * math.exp(-2.68 / 44)
    assert coherent_part / v > 0.95
    # relative to the laser itself the ideal model sits near 94%
    assert v / laser_visibility(53 * NS, 1.0, [2.68 * NS])[0] == pytest.approx(0.94, abs=0.01)


def test_visibility_monotone_for_weak_drive():
    for om in (0.1, 0.17, 0.22):
        v = michelson_visibility(drive(om), 53 * NS, 22 * NS, 1.0, np.linspace(0, 100 * NS, 2001)).values
        assert np.all(np.diff(v) <= 1e-15)


def test_visibility_symmetric_in_delay():
    tau = np.linspace(-10 * NS, 10 * NS, 41)
    v = michelson_visibility(drive(0.6), 53 * NS, 22 * NS, 1.0, tau).values
    np.testing.assert_allclose(v, v[::-1])


def test_visibility_validation():
    with pytest.raises(InvalidParameterError):
        michelson_visibility(drive(0.2), 53 * NS, 22 * NS, 0.0, [0.0])
    with pytest.raises(InvalidParameterError):
        michelson_visibility(drive(0.2), 20 * NS, 22 * NS, 1.0, [0.0])


def test_laser_visibility():
    np.testing.assert_allclose(laser_visibility(53 * NS, 1.0, [0.0, 106 * NS]), [1.0, math.exp(-1)])


def _calibrated():
    sat = drive(0.0)
    model, report = calibrate_background(sat, 1.25e6, 1050.0)
    return sat, model, report


def test_sbr_at_saturation():
    sat, model, report = _calibrated()
    c = sbr_curves([1.0], sat, model)
    assert c.sbr[0] == pytest.approx(1050.0)
    assert c.signal[0] == pytest.approx(1.25e6)
    assert c.off_resonance[0] == pytest.approx(1.2e3, rel=0.01)
    # the implied background share differs from the quoted 0.084% by about 12%
    assert report["background_fraction"] == pytest.approx(0.00095, rel=0.01)


def test_sbr_high_power_limit():
    sat, model, _ = _calibrated()
    c = sbr_curves([1e2, 1e4, 1e6], sat, model)
    assert np.all(np.diff(c.sbr) < 0)
    assert c.sbr[-1] < 1.0


def test_leakage_below_dark_at_low_power():
    sat, model, _ = _calibrated()
    p = np.linspace(0.0, 0.1, 11)
    c = sbr_curves(p, sat, model)
    assert np.all(c.leakage < c.dark)


def test_signal_monotone_concave_and_single_sbr_peak():
    sat, model, _ = _calibrated()
    p = np.linspace(0.0, 20.0, 401)
    c = sbr_curves(p, sat, model)
    assert np.all(np.diff(c.signal) > 0)
    assert np.all(np.diff(c.signal, 2) < 0)
    d = np.sign(np.diff(c.sbr))
    assert np.count_nonzero(np.diff(d) != 0) == 1


def test_sbr_zero_background_is_infinite():
    c = sbr_curves([0.5, 1.0], drive(0.0), BackgroundModel(0.0, 0.0, 0.5))
    assert np.all(np.isinf(c.sbr))


def test_background_validation():
    with pytest.raises(InvalidParameterError):
        BackgroundModel(-1.0, 0.0)
    with pytest.raises(InvalidParameterError):
        BackgroundModel(0.0, 0.0, 1.5)
    with pytest.raises(InvalidParameterError):
        calibrate_background(drive(0.0), 1e12, 1050.0)
    with pytest.raises(InvalidParameterError):
        sbr_curves([-1.0], drive(0.0), BackgroundModel())
