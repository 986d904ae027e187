import numpy as np
import pytest

from heitler import InvalidParameterError
from heitler.traces import CorrelationTrace, PoleSum, SpectrumTrace, as_grid


def test_as_grid_rules():
    assert as_grid([1, 2, 3]).dtype == float
    with pytest.raises(InvalidParameterError):
        as_grid([])
    with pytest.raises(InvalidParameterError):
        as_grid([1, 1, 2])
    with pytest.raises(InvalidParameterError):
        as_grid([0, np.nan])
    assert as_grid([2, 1], strictly_increasing=False).size == 2


def test_lorentzian_area_and_width():
    line = PoleSum.lorentzian(3.0, 10.0, center=5.0)
    nu = np.linspace(-5000, 5000, 400001)
    assert np.trapezoid(line.density(nu), nu) == pytest.approx(3.0, rel=2e-3)
    peak = line.density(np.array([5.0]))[0]
    assert line.density(np.array([10.0]))[0] == pytest.approx(peak / 2)
    assert line.area == pytest.approx(3.0)


def test_lorentzian_widths_add():
    a = PoleSum.lorentzian(1.0, 7e6).convolve_lorentzian(29e6)
    ref = PoleSum.lorentzian(1.0, 36e6)
    nu = np.linspace(-300e6, 300e6, 1001)
    np.testing.assert_allclose(a.density(nu), ref.density(nu), rtol=1e-12)


def test_delta_convolves_to_lorentzian():
    d = PoleSum.lorentzian(2.0, 0.0)
    assert d.delta_weight == 2.0
    c = d.convolve_lorentzian(29e6)
    nu = np.linspace(-100e6, 100e6, 11)
    np.testing.assert_allclose(c.density(nu), PoleSum.lorentzian(2.0, 29e6).density(nu), rtol=1e-12)
    assert c.delta_weight == 0.0


def test_convolution_associative():
    line = PoleSum.lorentzian(1.0, 3e6)
    nu = np.linspace(-1e8, 1e8, 101)
    a = line.convolve_lorentzian(5e6).convolve_lorentzian(7e6).density(nu)
    b = line.convolve_lorentzian(12e6).density(nu)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_spectrum_trace_integrates_delta():
    grid = np.linspace(-1e9, 1e9, 2001)
    tr = SpectrumTrace.from_lines(grid, PoleSum.lorentzian(0.4, 0.0), PoleSum.lorentzian(0.6, 5e6))
    assert tr.coherent_weight == 0.4
    assert tr.integrated() == pytest.approx(1.0, rel=1e-2)
    assert tr.is_analytic


def test_spectrum_trace_shape_checks():
    with pytest.raises(InvalidParameterError):
        SpectrumTrace(np.arange(3.0), np.zeros(3), np.zeros(2), np.zeros(3))


def test_correlation_trace_kinds():
    with pytest.raises(InvalidParameterError):
        CorrelationTrace(np.arange(3.0), np.zeros(3), "g3")
    tr = CorrelationTrace(np.arange(3.0), np.array([1, 1j, 0]), "g1_total")
    assert np.iscomplexobj(tr.values)
