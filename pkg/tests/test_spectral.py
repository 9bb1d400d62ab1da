from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from gl3k.errors import OutsideWindow
from gl3k.kernels.spectral import (
    WEYL_LABELS,
    SpectralPoint,
    TestFunctionParams,
    log_slope,
    main_term_volume,
    nu_coords,
    spec_measure,
    test_function_h as h_fn,
    weyl_action,
)

reals = st.floats(-40, 40, allow_nan=False)


def test_spectral_point_validation():
    with pytest.raises(ValueError):
        SpectralPoint((1, 1, 1))
    p = SpectralPoint.imaginary(1.0, 2.0)
    assert p.mu == (1j, 2j, -3j)
    assert nu_coords(p) == pytest.approx(((1j - 2j) / 3, 5j / 3, -4j / 3))
    assert sum(p.nu) == pytest.approx(0)
    assert (-p).mu == (-1j, -2j, 3j)


def test_weyl_group_is_s3():
    p = SpectralPoint((1, 2, -3))
    images = {weyl_action(w, p).mu for w in WEYL_LABELS}
    assert len(images) == 6
    w4 = weyl_action("w4", p).mu
    assert w4 == (-3, 1, 2)
    assert weyl_action("w4", weyl_action("w4", p)).mu == weyl_action("w5", p).mu
    assert weyl_action("w4", weyl_action("w5", p)).mu == p.mu
    with pytest.raises(ValueError):
        weyl_action("w7", p)


def test_spec_measure_formula():
    # prod 3 nu_j tan(3 pi nu_j / 2) with 3 nu_j = i r_j
    t1, t2 = 1.3, -0.4
    p = SpectralPoint.imaginary(t1, t2)
    want = 1.0
    for n in p.nu:
        z = 3 * n
        want *= z * np.tan(1.5 * np.pi * n)
    assert spec_measure(p) == pytest.approx(want.real, rel=1e-12)
    assert abs(want.imag) < 1e-12 * abs(want)
    with pytest.raises(OutsideWindow):
        spec_measure(SpectralPoint((0.1, -0.1, 0)))


@given(reals, reals)
def test_weyl_invariance(t1, t2):
    p = SpectralPoint.imaginary(t1, t2)
    prm = TestFunctionParams(T=4)
    s0, h0 = spec_measure(p), h_fn(prm, p)
    for w in WEYL_LABELS:
        q = weyl_action(w, p)
        assert abs(spec_measure(q) - s0) <= 1e-12 * max(1.0, abs(s0))
        assert abs(h_fn(prm, q) - h0) <= 1e-12 * max(1e-300, abs(h0))


def test_h_is_nonnegative_and_peaks_near_T_mu0():
    prm = TestFunctionParams(T=8)
    c = [prm.T * m.imag for m in prm.mu0.mu]
    at = h_fn(prm, SpectralPoint.imaginary(c[0], c[1]))
    off = h_fn(prm, SpectralPoint.imaginary(c[0] + 10 * prm.width, c[1]))
    assert at > 0 and off >= 0 and off < 1e-20 * at


def test_params_validation():
    with pytest.raises(ValueError):
        TestFunctionParams(T=0.5)
    with pytest.raises(ValueError):
        TestFunctionParams(T=4, A=20)
    with pytest.raises(ValueError):
        TestFunctionParams(T=4, mu0=SpectralPoint.imaginary(1.0, 1.0))
    assert TestFunctionParams(T=4).nu0_abs == pytest.approx((80.0, 80.0, 160.0))


def test_volume_strategies_agree():
    prm = TestFunctionParams(T=4)
    a = main_term_volume(prm, strategy="chamber")
    b = main_term_volume(prm, strategy="full")
    assert a.value > 0
    assert b.value == pytest.approx(a.value, rel=1e-8)


def test_volume_against_scipy_dblquad():
    prm = TestFunctionParams(T=4)
    c = [prm.T * m.imag for m in prm.mu0.mu]
    W = prm.width
    from gl3k.kernels.spectral import _h_t, _spec_t

    f = lambda y, x: float(-_h_t(prm, x, y) * _spec_t(x, y))  # noqa: E731
    val, _ = integrate.dblquad(f, c[0] - 6 * W, c[0] + 6 * W, c[1] - 6 * W, c[1] + 6 * W, epsabs=0, epsrel=1e-10)
    assert main_term_volume(prm).value == pytest.approx(6 * val, rel=1e-7)


def test_volume_window_option():
    prm = TestFunctionParams(T=4)
    c = [prm.T * m.imag for m in prm.mu0.mu]
    W = prm.width
    r = main_term_volume(prm, window=((c[0] - 8 * W, c[0] + 8 * W), (c[1] - 8 * W, c[1] + 8 * W)))
    assert 6 * r.value == pytest.approx(main_term_volume(prm).value, rel=1e-6)
    with pytest.raises(OutsideWindow):
        main_term_volume(TestFunctionParams(T=100))


def test_log_slope():
    assert log_slope([1, 2, 4], [3, 24, 192]) == pytest.approx(3.0)
    assert math.isclose(log_slope([4, 8], [5 * 4**5, 5 * 8**5]), 5.0)
