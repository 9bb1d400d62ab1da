"""Long-element kernel functions: double-Bessel integrals and the (+,+) Mellin-Barnes integral.

Every J_j integral is taken in a logarithmic variable w with u = u(w)
chosen so that the Bessel arguments are elementary in w. Ends where a Kt
factor decays are truncated; ends where a J^+- factor oscillates with a
power-law envelope are integrated in the Bessel argument z itself, in
half-period panels whose partial sums are extrapolated by repeated
averaging.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize
from scipy.special import loggamma

from ..errors import NotConverged, OutsideWindow, QuadratureNotConverged
from .bessel import jpm_vec, ktilde_vec
from .spectral import SpectralPoint, nu_coords, weyl_action

__all__ = [
    "KernelQuery",
    "KernelValue",
    "gamma_factor",
    "trig_factor",
    "J_double",
    "mellin_barnes_pp",
    "kernel_pp_bessel",
    "kernel_pm_weyl_sum",
    "kernel_mp_weyl_sum",
    "kernel_mm_weyl_sum",
    "trig_identity_residual",
    "Y_MIN",
    "Y_MAX",
    "IM_MU_MAX",
]

Y_MIN = 0.05
Y_MAX = 50.0
IM_MU_MAX = 10.0
TARGETS = {1: 1e-3, 2: 1e-3, 3: 1e-6, 4: 1e-6, 5: 1e-6}
_PI = math.pi


@dataclass(frozen=True)
class KernelQuery:
    y1: float
    y2: float
    mu: SpectralPoint

    def __post_init__(self):
        for y in (self.y1, self.y2):
            if not (Y_MIN <= abs(y) <= Y_MAX):
                raise OutsideWindow(f"|y| = {abs(y)} outside [{Y_MIN}, {Y_MAX}]")
        if any(abs(m.imag) > IM_MU_MAX for m in self.mu.mu):
            raise OutsideWindow(f"|Im mu_j| must be <= {IM_MU_MAX}")
        if any(abs(m.real) > 1e-12 for m in self.mu.mu):
            raise OutsideWindow("kernels are evaluated on Re mu = 0")

    def swapped(self) -> "KernelQuery":
        return KernelQuery(self.y2, self.y1, self.mu)


@dataclass(frozen=True)
class KernelValue:
    which: str
    value: complex
    est_error: float
    converged: bool

    def as_dict(self, q: KernelQuery | None = None) -> dict:
        d = {
            "which": self.which,
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "est_error": self.est_error,
            "converged": self.converged,
        }
        if q is not None:
            d.update(y1=q.y1, y2=q.y2, mu=[[m.real, m.imag] for m in q.mu.mu])
        return d


# -- Mellin-Barnes ingredients ------------------------------------------------------

def gamma_factor(s, mu) -> complex:
    """G(s, mu) = prod_j Gamma(s1 - mu_j) Gamma(s2 + mu_j) / Gamma(s1 + s2)."""
    s1, s2 = s
    m = mu.mu if isinstance(mu, SpectralPoint) else tuple(mu)
    lg = sum(loggamma(s1 - x) + loggamma(s2 + x) for x in m) - loggamma(s1 + s2)
    return complex(np.exp(lg))


def trig_factor(signs: str, s, mu) -> complex:
    """S^{signs}(s, mu) for signs in {'++', '+-', '-+', '--'}."""
    s1, s2 = s
    m = mu.mu if isinstance(mu, SpectralPoint) else tuple(mu)
    n1, n2, n3 = nu_coords(m)

    def c(z):
        return cmath.cos(1.5 * _PI * z)

    def sn(z):
        return cmath.sin(1.5 * _PI * z)

    def sp(z):
        return cmath.sin(_PI * z)

    if signs == "++":
        return c(n1) * c(n2) * c(n3) / (24 * _PI**2)
    if signs == "+-":
        return -c(n2) * sp(s1 - m[0]) * sp(s2 + m[1]) * sp(s2 + m[2]) / (
            32 * _PI**2 * sn(n1) * sn(n3) * sp(s1 + s2))
    if signs == "-+":
        return -c(n1) * sp(s1 - m[0]) * sp(s1 - m[1]) * sp(s2 + m[2]) / (
            32 * _PI**2 * sn(n2) * sn(n3) * sp(s1 + s2))
    if signs == "--":
        return c(n3) * sp(s1 - m[1]) * sp(s2 + m[1]) / (32 * _PI**2 * sn(n2) * sn(n1))
    raise ValueError(f"unknown sign pair {signs!r}")


def trig_identity_residual(s, mu, cycle: str = "w4") -> float:
    """|S^{-+}(s, mu) - S^{+-}((s2, s1), cycle(-mu))| relative to |S^{-+}(s, mu)|.

    G((s2, s1), w(-mu)) = G(s, mu) for every permutation w, so a vanishing
    residual for all s is the integrand form of the (-,+) reflection.
    """
    mu = mu if isinstance(mu, SpectralPoint) else SpectralPoint(tuple(mu))
    a = trig_factor("-+", s, mu)
    b = trig_factor("+-", (s[1], s[0]), weyl_action(cycle, -mu))
    return abs(a - b) / abs(a)


def _mb_log_integrand(s1, s2, L1, L2, mu):
    lg = -s1 * L1 - s2 * L2 - loggamma(s1 + s2)
    for x in mu:
        lg = lg + loggamma(s1 - x) + loggamma(s2 + x)
    return lg


def _mb_saddle(L1: float, L2: float, mu) -> tuple[float, float]:
    """Real (sigma1, sigma2) minimising the integrand modulus at t = 0.

    All poles lie to the left of Re s = 1/4, so the contour may sit anywhere
    to the right; at the saddle the integrand hardly oscillates and the
    trapezoid sum does not cancel down to round-off.
    """
    def f(x):
        return float(_mb_log_integrand(x[0], x[1], L1, L2, mu).real)

    res = minimize(f, x0=[1.0, 1.0], bounds=[(0.25, 60.0), (0.25, 60.0)], method="L-BFGS-B")
    return float(res.x[0]), float(res.x[1])


def mellin_barnes_pp(q: KernelQuery, h: float = 0.05, rtol: float = 1e-6) -> KernelValue:
    """K^{++}(y; mu) as a double Mellin-Barnes integral over Re s = sigma.

    The integrand (1/4 pi^2) S^{++} G(s, mu) (4 pi^2 y1)^{-s1} (4 pi^2 y2)^{-s2}
    is integrated with the trapezoid rule on a square t-grid, which converges
    geometrically for analytic integrands; the estimate compares steps h and 2h.
    """
    if q.y1 <= 0 or q.y2 <= 0:
        raise OutsideWindow("the Mellin-Barnes route covers y1, y2 > 0 only")
    m = q.mu.mu
    tau = max(abs(x.imag) for x in m)
    L1 = math.log(4 * _PI**2 * q.y1)
    L2 = math.log(4 * _PI**2 * q.y2)
    sig1, sig2 = _mb_saddle(L1, L2, m)
    R = 12.0 + 2.0 * tau + 2.0 * math.sqrt(sig1 + sig2)
    for _ in range(6):
        n = int(math.ceil(R / h))
        t = np.linspace(-n * h, n * h, 2 * n + 1)
        lg = _mb_log_integrand(sig1 + 1j * t[:, None], sig2 + 1j * t[None, :], L1, L2, m)
        f = np.exp(lg - lg.real.max())
        edge = max(np.abs(f[0]).max(), np.abs(f[-1]).max(), np.abs(f[:, 0]).max(), np.abs(f[:, -1]).max())
        if edge <= 1e-16:
            break
        R *= 1.5
    else:
        raise NotConverged("Mellin-Barnes integrand does not decay inside the grid")
    pref = trig_factor("++", (sig1, sig2), q.mu) / (4 * _PI**2) * math.exp(lg.real.max())
    fine = complex(f.sum()) * h * h * pref
    coarse = complex(f[::2, ::2].sum()) * (2 * h) ** 2 * pref
    err = abs(fine - coarse)
    return KernelValue("mb++", fine, err, err <= rtol * abs(fine))


# -- quadrature helpers -----------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _gl(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int) -> complex:
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    x = (mid + half * _GL_X[None, :]).ravel()
    w = (half * _GL_W[None, :]).ravel()
    return complex(np.dot(f(x), w))


def _bulk(f, a: float, b: float, width: float = 0.4) -> tuple[complex, float]:
    if b <= a:
        return 0j, 0.0
    n = max(2, int(math.ceil((b - a) / width)))
    coarse = _gl(f, a, b, n)
    fine = _gl(f, a, b, 2 * n)
    return fine, abs(fine - coarse)


def _averaged_limit(partial: np.ndarray, levels: int) -> tuple[complex, float]:
    """Limit of alternating partial sums by repeated averaging (an Euler-type transform)."""
    row = partial[-(levels + 1):]
    prev = row[-1]
    for _ in range(levels):
        prev = row[-1]
        row = 0.5 * (row[1:] + row[:-1])
    val = complex(row[-1])
    return val, abs(val - complex(prev))


def _osc_tail(F: Callable[[np.ndarray], np.ndarray], z0: float, tol: float) -> tuple[complex, float]:
    """int_{z0}^inf F(z) dz for F ~ z^-p cos(2z + slow phase).

    Half-period panels of length pi/2 give an alternating series of panel
    integrals with a smooth envelope; repeated averaging of the partial
    sums extrapolates its limit.
    """
    step = _PI / 2
    levels = 12
    npan = 48
    while True:
        edges = z0 + step * np.arange(npan + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
        x = (mid + 0.5 * step * _GL_X[None, :]).ravel()
        panels = F(x).reshape(npan, -1) @ (0.5 * step * _GL_W)
        val, err = _averaged_limit(np.cumsum(panels), levels)
        if err <= tol * max(abs(val), 1e-300) or npan >= 768:
            return val, err
        npan *= 2


def _args(q: KernelQuery):
    m = q.mu.mu
    alpha = 3 * nu_coords(m)[2]
    pref = cmath.exp(0.5 * m[1] * math.log(abs(q.y1 / q.y2)))
    a = 2 * _PI * math.sqrt(abs(q.y1))
    b = 2 * _PI * math.sqrt(abs(q.y2))
    return alpha, 3 * m[1], pref, a, b


def _k_cut(alpha: complex) -> float:
    """Argument beyond which Kt_alpha is below ~1e-17 of its scale."""
    return 20.0 + 0.8 * abs(alpha.imag)


def _finish(which: str, j: int, total: complex, err: float, strict: bool) -> KernelValue:
    ok = err <= TARGETS[j] * max(abs(total), 1e-300)
    if strict and not ok:
        raise QuadratureNotConverged(f"{which}: estimated error {err:.3g} vs value {abs(total):.3g}")
    return KernelValue(which, total, err, ok)


# -- the five integrals -------------------------------------------------------

def _j5(q, strict):
    alpha, e, pref, a, b = _args(q)
    X = _k_cut(alpha)
    hi = 0.5 * math.log(max((X / a) ** 2 - 1, 1e-300))
    lo = -0.5 * math.log(max((X / b) ** 2 - 1, 1e-300))

    def f(w):
        return ktilde_vec(alpha, a * np.sqrt(1 + np.exp(2 * w))) * ktilde_vec(
            alpha, b * np.sqrt(1 + np.exp(-2 * w))) * np.exp(e * w)

    val, err = _bulk(f, lo, hi)
    return _finish("J5", 5, pref * val, abs(pref) * err, strict)


def _j4(q, strict):
    alpha, e, pref, a, b = _args(q)
    X = _k_cut(alpha)
    # u = (1 + e^{-2w})^{-1/2}: sqrt(1-u^2) = (1+e^{2w})^{-1/2}, sqrt(u^-2 - 1) = e^{-w}
    lo = -math.log(X / b)
    hi = 16.0 + abs(e.real)

    def f(w):
        ex = np.exp(2 * w)
        logu = -0.5 * np.log1p(np.exp(-2 * w))
        return (ktilde_vec(alpha, a / np.sqrt(1 + ex)) * ktilde_vec(alpha, b * np.exp(-w))
                * np.exp(e * logu) / (1 + ex))

    val, err = _bulk(f, lo, hi, width=0.25)
    return _finish("J4", 4, pref * val, abs(pref) * err, strict)


def _j3(q, strict):
    alpha, e, pref, a, b = _args(q)
    X = _k_cut(alpha)
    hi = 0.5 * math.log(max((X / a) ** 2 - 1, 1e-300))
    w0 = -1.0
    z0 = b * math.sqrt(1 + math.exp(-2 * w0))

    def f(w):
        return ktilde_vec(alpha, a * np.sqrt(1 + np.exp(2 * w))) * jpm_vec(
            -1, alpha, b * np.sqrt(1 + np.exp(-2 * w))) * np.exp(e * w)

    def F(z):
        u = 1 / np.sqrt((z / b) ** 2 - 1)
        return ktilde_vec(alpha, a * np.sqrt(1 + u * u)) * jpm_vec(-1, alpha, z) * u**e * z / (z * z - b * b)

    val, err = _bulk(f, w0, max(hi, w0))
    tail, terr = _osc_tail(F, z0, 1e-9)
    return _finish("J3", 3, pref * (val + tail), abs(pref) * (err + terr), strict)


def _j2(q, strict):
    alpha, e, pref, a, b = _args(q)
    # u = sqrt(1 + e^{2w}): sqrt(u^2-1) = e^w, sqrt(1-u^-2) = e^w / sqrt(1+e^{2w})
    lo = -16.0 - abs(e.real)
    w0 = 1.0
    z0 = a * math.exp(w0)

    def f(w):
        ex = np.exp(2 * w)
        return (jpm_vec(-1, alpha, a * np.exp(w)) * jpm_vec(-1, alpha, b * np.exp(w) / np.sqrt(1 + ex))
                * np.exp(0.5 * e * np.log1p(ex)) * ex / (1 + ex))

    def F(z):
        r = z / a
        return (jpm_vec(-1, alpha, z) * jpm_vec(-1, alpha, b * r / np.sqrt(1 + r * r))
                * np.exp(0.5 * e * np.log1p(r * r)) * r * r / (1 + r * r) / z)

    val, err = _bulk(f, lo, w0, width=0.25)
    tail, terr = _osc_tail(F, z0, 1e-6)
    return _finish("J2", 2, pref * (val + tail), abs(pref) * (err + terr), strict)


def _j1(q, strict, sign):
    alpha, e, pref, a, b = _args(q)
    w0 = 1.0
    za = a * math.sqrt(1 + math.exp(2 * w0))
    zb = b * math.sqrt(1 + math.exp(2 * w0))

    def f(w):
        return jpm_vec(sign, alpha, a * np.sqrt(1 + np.exp(2 * w))) * jpm_vec(
            sign, alpha, b * np.sqrt(1 + np.exp(-2 * w))) * np.exp(e * w)

    def F_hi(z):
        # u large: z = a sqrt(1+u^2)
        u = np.sqrt((z / a) ** 2 - 1)
        return jpm_vec(sign, alpha, z) * jpm_vec(sign, alpha, b * np.sqrt(1 + u**-2)) * u**e * z / (z * z - a * a)

    def F_lo(z):
        # u small: z = b sqrt(1+u^-2)
        u = 1 / np.sqrt((z / b) ** 2 - 1)
        return jpm_vec(sign, alpha, a * np.sqrt(1 + u * u)) * jpm_vec(sign, alpha, z) * u**e * z / (z * z - b * b)

    val, err = _bulk(f, -w0, w0, width=0.25)
    t1, e1 = _osc_tail(F_hi, za, 1e-6)
    t2, e2 = _osc_tail(F_lo, zb, 1e-6)
    which = "J1+" if sign == 1 else "J1-"
    return _finish(which, 1, pref * (val + t1 + t2), abs(pref) * (err + e1 + e2), strict)


def J_double(j: int, q: KernelQuery, variant: str = "+", strict: bool = True) -> KernelValue:
    """The double-Bessel integral J_j(y; mu), j = 1..5; ``variant`` picks J^+ or J^- in J_1."""
    if j == 1:
        if variant not in ("+", "-"):
            raise ValueError("variant must be '+' or '-'")
        return _j1(q, strict, 1 if variant == "+" else -1)
    fn = {2: _j2, 3: _j3, 4: _j4, 5: _j5}.get(j)
    if fn is None:
        raise ValueError(f"j must be in 1..5, got {j}")
    return fn(q, strict)


# -- kernel assemblies ------------------------------------------------------------

_CYCLE = ("I", "w4", "w5")


def kernel_pp_bessel(q: KernelQuery) -> KernelValue:
    """K^{++} from J_5: (1/12 pi^2) cos(3pi nu1/2) cos(3pi nu2/2) / cos(3pi nu3/2) J_5."""
    n1, n2, n3 = q.mu.nu
    c = cmath.cos(1.5 * _PI * n1) * cmath.cos(1.5 * _PI * n2) / cmath.cos(1.5 * _PI * n3)
    j5 = J_double(5, q)
    f = c / (12 * _PI**2)
    return KernelValue("K++", f * j5.value, abs(f) * j5.est_error, j5.converged)


def _weyl_sum(q: KernelQuery, parts, scale, which, strict) -> KernelValue:
    total, err, ok = 0j, 0.0, True
    for w in _CYCLE:
        qq = KernelQuery(q.y1, q.y2, weyl_action(w, q.mu))
        for coef, j, var in parts:
            r = J_double(j, qq, var, strict=strict)
            total += coef * r.value
            err += abs(coef) * r.est_error
            ok &= r.converged
    return KernelValue(which, scale * total, abs(scale) * err, ok)


def kernel_pm_weyl_sum(q: KernelQuery, strict: bool = True) -> KernelValue:
    """sum over {I, w4, w5} of K^{+-}(y; w(mu)), via J_2 + J_3 + J_4 (y1 > 0 > y2)."""
    if not (q.y1 > 0 > q.y2):
        raise OutsideWindow("the (+,-) kernel needs y1 > 0 > y2")
    return _weyl_sum(q, [(1, 2, "-"), (1, 3, "-"), (1, 4, "-")], 1 / (24 * _PI**2), "K+-", strict)


def kernel_mp_weyl_sum(q: KernelQuery, cycle: str = "w4", strict: bool = True) -> KernelValue:
    """sum over {I, w4, w5} of K^{-+}(y; w(mu)) through K^{-+}((y1,y2); mu) = K^{+-}((y2,y1); w4(-mu))."""
    if not (q.y2 > 0 > q.y1):
        raise OutsideWindow("the (-,+) kernel needs y2 > 0 > y1")
    r = kernel_pm_weyl_sum(KernelQuery(q.y2, q.y1, weyl_action(cycle, -q.mu)), strict=strict)
    return KernelValue("K-+", r.value, r.est_error, r.converged)


def kernel_mm_weyl_sum(q: KernelQuery, strict: bool = True) -> KernelValue:
    """sum over {I, w4, w5} of K^{--}(y; w(mu)), via 4 J_1^- + 2 J_1^+ (y1, y2 < 0)."""
    if not (q.y1 < 0 and q.y2 < 0):
        raise OutsideWindow("the (-,-) kernel needs y1, y2 < 0")
    return _weyl_sum(q, [(4, 1, "-"), (2, 1, "+")], 1 / (48 * _PI**2), "K--", strict)
