"""Bessel functions of complex order in the normalisations

    J^+_a(x) = (pi/2) (J_{-a}(2x) + J_a(2x)) / cos(pi a / 2)
    J^-_a(x) = (pi/2) (J_{-a}(2x) - J_a(2x)) / sin(pi a / 2)
    Kt_a(x)  = 2 cos(pi a / 2) K_a(2x).

Two independent routes:

* scalar reference values (``bessel_J_pm``, ``bessel_Ktilde``) from the
  power series in multiprecision, with guard digits sized to the
  cancellation the series will suffer;
* vectorised values for quadrature (``jpm_vec``, ``ktilde_vec``) from the
  integral representations

      J^-_a(x) = int_R cos(2x cosh v) e^{a v} dv,
      J^+_a(x) = int_R sin(2x cosh v) e^{a v} dv,
      Kt_a(x)  = int_R cos(2x sinh v) e^{a v} dv,

  split into e^{+-2ix phi(v)} halves and each half moved onto a contour
  where it decays double-exponentially; the trapezoid rule then converges
  geometrically. For large x the Kt value is exponentially small and comes
  from K_a(z) = int_0^inf exp(-z cosh t) cosh(a t) dt instead.
"""

from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np

from ..errors import OutsideWindow

__all__ = [
    "bessel_J_pm",
    "bessel_Ktilde",
    "jpm_vec",
    "ktilde_vec",
    "ktilde_intrep",
    "X_MIN",
    "X_MAX",
    "IM_ALPHA_MAX",
]

X_MIN = 1e-3
X_MAX = 50.0
IM_ALPHA_MAX = 10.0
_SMALL_ORDER = 1e-30
_DECAY = 50.0  # the contour integrands are cut where they fall below e^-50


def _check_window(alpha: complex, x: float) -> None:
    if not (X_MIN <= x <= X_MAX):
        raise OutsideWindow(f"x = {x} outside [{X_MIN}, {X_MAX}]")
    if abs(alpha.imag) > IM_ALPHA_MAX:
        raise OutsideWindow(f"|Im alpha| = {abs(alpha.imag)} exceeds {IM_ALPHA_MAX}")
    if abs(alpha.real) >= 1:
        raise OutsideWindow(f"|Re alpha| = {abs(alpha.real)} must be < 1")


# -- series route -------------------------------------------------------------

def _series(alpha, z, sign: int):
    """sum_k sign^k (z/2)^(2k+alpha) / (k! Gamma(k+alpha+1)) at the current mp precision."""
    half = z / 2
    q = sign * half * half
    term = half**alpha * mpmath.rgamma(alpha + 1)
    total = term
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec)
    k = 0
    while True:
        k += 1
        term = term * q / (k * (k + alpha))
        total += term
        if k > abs(half) and abs(term) <= eps * abs(total):
            return total


def _guard_digits(alpha: complex, x: float, k_like: bool) -> int:
    # series terms peak near e^{2x}; Kt loses another e^{2x} to the I-difference;
    # imaginary orders cost e^{pi |Im a|} in the +-a combinations
    loss = 2 * x * (2 if k_like else 1) + math.pi * abs(alpha.imag)
    digits = 30 + int(loss / math.log(10))
    if 0 < abs(alpha) < 1:
        digits += int(-math.log10(abs(alpha)))
    return digits


def bessel_J_pm(sign: int, alpha: complex, x: float) -> complex:
    """J^+_alpha(x) (sign = +1) or J^-_alpha(x) (sign = -1) from the power series."""
    alpha = complex(alpha)
    x = float(x)
    _check_window(alpha, x)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    with mpmath.workdps(_guard_digits(alpha, x, k_like=False)):
        z = mpmath.mpf(2) * x
        if sign == -1 and abs(alpha) < _SMALL_ORDER:
            # removable 0/0: the limit is -pi Y_0(2x)
            return complex(-mpmath.pi * mpmath.bessely(0, z))
        a = mpmath.mpc(alpha)
        jp, jm = _series(a, z, -1), _series(-a, z, -1)
        if sign == 1:
            val = mpmath.pi / 2 * (jm + jp) / mpmath.cos(mpmath.pi * a / 2)
        else:
            val = mpmath.pi / 2 * (jm - jp) / mpmath.sin(mpmath.pi * a / 2)
        return complex(val)


def bessel_Ktilde(alpha: complex, x: float) -> complex:
    """Kt_alpha(x) = 2 cos(pi alpha/2) K_alpha(2x), with K from (pi/2)(I_{-a} - I_a)/sin(pi a)."""
    alpha = complex(alpha)
    x = float(x)
    _check_window(alpha, x)
    with mpmath.workdps(_guard_digits(alpha, x, k_like=True)):
        z = mpmath.mpf(2) * x
        if abs(alpha) < _SMALL_ORDER:
            return complex(2 * mpmath.besselk(0, z))
        a = mpmath.mpc(alpha)
        k = mpmath.pi / 2 * (_series(-a, z, 1) - _series(a, z, 1)) / mpmath.sin(mpmath.pi * a)
        return complex(2 * mpmath.cos(mpmath.pi * a / 2) * k)


# -- contour-integral route ------------------------------------------------------

def _theta(alpha: complex) -> float:
    # deeper contours decay faster but cost e^{theta |Im a|} in cancellation
    return min(math.pi / 4, 2.0 / max(abs(alpha.imag), 1e-300))


def _vmax(x: float, theta: float, kind: str, alpha: complex) -> float:
    """Half-length of the contour beyond which |integrand| < e^-DECAY."""
    target = _DECAY + theta * abs(alpha.imag)
    lo, hi = 0.0, 64.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if kind == "sinh":
            damp = 2 * x * math.cosh(mid) * math.sin(theta)
        else:
            damp = 2 * x * math.sinh(mid) * math.sin(theta * math.tanh(mid))
        if damp - abs(alpha.real) * mid > target:
            hi = mid
        else:
            lo = mid
    return hi


def _half_integral(x: np.ndarray, alpha: complex, kind: str, sigma: int) -> np.ndarray:
    """int e^{i sigma 2x phi(v)} e^{alpha v} dv on the decaying contour, for x in one octave."""
    theta = _theta(alpha)
    xlo, xhi = float(x.min()), float(x.max())
    vmax = _vmax(xlo, theta, kind, alpha)
    vtop = _vmax(xhi, theta, kind, alpha)
    dphi = 2 * xhi * (math.cosh(vtop) if kind == "sinh" else math.sinh(vtop))
    dphi = max(dphi, 2 * xlo * (math.cosh(vmax) if kind == "sinh" else math.sinh(vmax)))
    h = 2 * math.pi / (1.6 * (dphi + abs(alpha) + 1.0))
    n = int(math.ceil(vmax / h))
    v = np.linspace(-vmax, vmax, 2 * n + 1)
    h = v[1] - v[0]
    if kind == "sinh":
        z = v + 1j * sigma * theta
        dz = np.ones_like(v)
        phi = np.sinh(z)
    else:
        z = v + 1j * sigma * theta * np.tanh(v)
        dz = 1 + 1j * sigma * theta / np.cosh(v) ** 2
        phi = np.cosh(z)
    w = np.exp(alpha * z) * dz * h
    return np.exp(1j * sigma * 2 * x[:, None] * phi[None, :]) @ w


def _by_octave(x: np.ndarray, fn) -> np.ndarray:
    out = np.empty(x.shape, dtype=complex)
    flat = x.ravel()
    res = out.ravel()
    key = np.floor(np.log2(flat)).astype(int)
    for k in np.unique(key):
        idx = np.flatnonzero(key == k)
        for start in range(0, idx.size, 512):
            sl = idx[start : start + 512]
            res[sl] = fn(flat[sl])
    return res.reshape(x.shape)


def _as_positive_array(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise OutsideWindow("Bessel arguments must be positive")
    return x


def jpm_vec(sign: int, alpha: complex, x) -> np.ndarray:
    """J^+_alpha (sign=+1) or J^-_alpha (sign=-1) on an array of x > 0."""
    alpha = complex(alpha)
    if abs(alpha.real) >= 1:
        raise OutsideWindow("integral route needs |Re alpha| < 1")
    x = _as_positive_array(x)

    def fn(xs):
        up = _half_integral(xs, alpha, "cosh", 1)
        dn = _half_integral(xs, alpha, "cosh", -1)
        return 0.5 * (up + dn) if sign == -1 else (up - dn) / 2j

    return _by_octave(x, fn)


def ktilde_intrep(alpha: complex, x) -> np.ndarray:
    """Kt_alpha(x) = int_R cos(2x sinh v) e^{alpha v} dv on rotated contours v +- i theta."""
    alpha = complex(alpha)
    x = _as_positive_array(x)

    def fn(xs):
        return 0.5 * (_half_integral(xs, alpha, "sinh", 1) + _half_integral(xs, alpha, "sinh", -1))

    return _by_octave(x, fn)


def _ktilde_exp(alpha: complex, x: np.ndarray) -> np.ndarray:
    """2 cos(pi a/2) int_0^inf exp(-2x cosh t) cosh(a t) dt, for x well past the turning point."""
    xlo = float(x.min())
    tmax = math.acosh(max(1.0, (_DECAY + 40) / (2 * xlo) + 1)) + 1
    om = abs(alpha) + 2 * float(x.max()) * math.sinh(min(tmax, 3.0)) + 1
    h = min(0.05, 2 * math.pi / (1.6 * om))
    n = int(math.ceil(tmax / h))
    t = np.linspace(-tmax, tmax, 2 * n + 1)
    h = t[1] - t[0]
    k = np.exp(-2 * x[:, None] * np.cosh(t)[None, :]) @ (np.exp(alpha * t) * (0.5 * h))
    return 2 * cmath.cos(math.pi * alpha / 2) * k


def ktilde_vec(alpha: complex, x) -> np.ndarray:
    """Kt_alpha on an array of x > 0, picking the stable route per argument."""
    alpha = complex(alpha)
    x = _as_positive_array(x)
    out = np.empty(x.shape, dtype=complex)
    switch = max(6.0, 0.5 * abs(alpha.imag) + 4.0)
    near = x < switch
    if near.any():
        out[near] = ktilde_intrep(alpha, x[near])
    if (~near).any():
        out[~near] = _by_octave(x[~near], lambda xs: _ktilde_exp(alpha, xs))
    return out
