"""Spectral parameters, the spectral measure and the test function h.

A spectral point is mu = (mu1, mu2, mu3) with mu1 + mu2 + mu3 = 0. On the
tempered axis mu = i t with real t, and the measure d mu = d mu1 d mu2 equals
-dt1 dt2, so ``main_term_volume`` integrates h * spec * (-1) over the t-plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import OutsideWindow, QuadratureNotConverged

__all__ = [
    "SpectralPoint",
    "WEYL_LABELS",
    "nu_coords",
    "weyl_action",
    "spec_measure",
    "TestFunctionParams",
    "test_function_h",
    "main_term_volume",
    "VolumeResult",
    "log_slope",
]

_SUM_TOL = 1e-12

# images of (mu1, mu2, mu3); w4 and w5 are the two 3-cycles, w6 the reversal
WEYL_PERMS = {
    "I": (0, 1, 2),
    "w2": (1, 0, 2),
    "w3": (0, 2, 1),
    "w4": (2, 0, 1),
    "w5": (1, 2, 0),
    "w6": (2, 1, 0),
}
WEYL_LABELS = tuple(WEYL_PERMS)


@dataclass(frozen=True)
class SpectralPoint:
    mu: tuple[complex, complex, complex]

    def __post_init__(self):
        mu = tuple(complex(m) for m in self.mu)
        if len(mu) != 3:
            raise ValueError("a spectral point has three coordinates")
        if abs(sum(mu)) > _SUM_TOL * max(1.0, max(abs(m) for m in mu)):
            raise ValueError(f"coordinates must sum to zero, got {sum(mu)}")
        object.__setattr__(self, "mu", mu)

    @classmethod
    def imaginary(cls, t1: float, t2: float) -> "SpectralPoint":
        """The tempered point i (t1, t2, -t1 - t2)."""
        return cls((1j * t1, 1j * t2, -1j * (t1 + t2)))

    @property
    def nu(self) -> tuple[complex, complex, complex]:
        return nu_coords(self.mu)

    def __neg__(self) -> "SpectralPoint":
        return SpectralPoint(tuple(-m for m in self.mu))

    def __mul__(self, c: float) -> "SpectralPoint":
        return SpectralPoint(tuple(c * m for m in self.mu))

    __rmul__ = __mul__


def _mu(x) -> tuple[complex, complex, complex]:
    return x.mu if isinstance(x, SpectralPoint) else tuple(x)


def nu_coords(mu) -> tuple[complex, complex, complex]:
    m1, m2, m3 = _mu(mu)
    return ((m1 - m2) / 3, (m2 - m3) / 3, (m3 - m1) / 3)


def weyl_action(w: str, mu) -> SpectralPoint:
    """Permute the coordinates of mu; w is one of ``WEYL_LABELS``."""
    try:
        perm = WEYL_PERMS[w]
    except KeyError:
        raise ValueError(f"unknown Weyl element {w!r}; expected one of {WEYL_LABELS}") from None
    m = _mu(mu)
    return SpectralPoint(tuple(m[i] for i in perm))


def _spec_t(t1, t2):
    """spec(i t) for arrays of (t1, t2): -prod r_j tanh(pi r_j / 2) with 3 nu_j = i r_j."""
    t3 = -t1 - t2
    out = -1.0
    for r in (t1 - t2, t2 - t3, t3 - t1):
        out = out * r * np.tanh(0.5 * np.pi * r)
    return out


def spec_measure(mu) -> float:
    """prod_j 3 nu_j tan(3 pi nu_j / 2), real on the tempered axis."""
    m = _mu(mu)
    if any(abs(x.real) > 1e-12 for x in m):
        raise OutsideWindow("spec_measure is evaluated on Re mu = 0 only")
    return float(_spec_t(m[0].imag, m[1].imag))


@dataclass(frozen=True)
class TestFunctionParams:
    T: float
    mu0: SpectralPoint = field(default_factory=lambda: SpectralPoint.imaginary(60.0, 0.0))
    A: int = 5
    eps: float = 0.2

    __test__ = False  # keep pytest from collecting this as a test class

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if not (0 <= self.A <= 12):
            raise ValueError("A must lie in [0, 12]")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if any(abs(m.real) > 1e-12 for m in self.mu0.mu):
            raise ValueError("mu0 must lie on the imaginary axis")
        if min(abs(v) for v in self.mu0.nu) < 1e-9:
            raise ValueError("mu0 must stay off the Weyl chamber walls (all nu_j nonzero)")

    @property
    def nu0_abs(self) -> tuple[float, float, float]:
        """|nu_{0,j}| taken from T mu0."""
        return tuple(abs(self.T * v) for v in self.mu0.nu)

    @property
    def width(self) -> float:
        return self.T ** (1 - self.eps)


def _h_t(p: TestFunctionParams, t1, t2):
    """h at mu = i (t1, t2, -t1-t2); arrays broadcast."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    t3 = -t1 - t2
    ts = (t1, t2, t3)
    # P(mu): nu_j = i r_j / 3, and (nu - c)(nu + c) = -(r^2/9 + c^2)
    logp = np.zeros(np.broadcast(t1, t2).shape)
    sign = 1.0
    for j, r in enumerate((t1 - t2, t2 - t3, t3 - t1)):
        n0 = p.nu0_abs[j] ** 2
        for n in range(p.A + 1):
            c = (1 + 2 * n) / 3
            logp = logp + np.log((r * r / 9 + c * c) / n0)
            sign = -sign
    c0 = [p.T * m.imag for m in p.mu0.mu]
    wsum = 0.0
    for perm in WEYL_PERMS.values():
        # psi((w(mu) - T mu0)/W) = exp(-sum (t_w - T t0)^2 / W^2)
        d2 = sum((ts[perm[k]] - c0[k]) ** 2 for k in range(3))
        wsum = wsum + np.exp(-d2 / p.width**2)
    # P^2 has even degree, so the sign drops out
    return np.exp(2 * logp) * wsum * wsum


def test_function_h(params: TestFunctionParams, mu) -> float:
    """h(mu) = P(mu)^2 (sum_w psi((w(mu) - T mu0)/T^(1-eps)))^2 on Re mu = 0."""
    m = _mu(mu)
    if any(abs(x.real) > 1e-12 for x in m):
        raise OutsideWindow("test_function_h is evaluated on Re mu = 0 only")
    return float(_h_t(params, m[0].imag, m[1].imag))


test_function_h.__test__ = False


@dataclass(frozen=True)
class VolumeResult:
    value: float
    est_error: float
    nodes: int
    strategy: str


def _grid_integral(f, c1, c2, half, n):
    """Trapezoid on [c1-half, c1+half] x [c2-half, c2+half] with n points per side."""
    x = np.linspace(c1 - half, c1 + half, n)
    y = np.linspace(c2 - half, c2 + half, n)
    h = x[1] - x[0]
    X, Y = np.meshgrid(x, y, indexing="ij")
    vals = f(X, Y)
    edge = max(np.abs(vals[0]).max(), np.abs(vals[-1]).max(), np.abs(vals[:, 0]).max(), np.abs(vals[:, -1]).max())
    return float(vals.sum() * h * h), float(edge), float(np.abs(vals).max())


def main_term_volume(params: TestFunctionParams, window=None, strategy: str = "chamber",
                     rtol: float = 1e-10) -> VolumeResult:
    """int_{Re mu = 0} h(mu) spec(mu) d mu, as a t-plane integral of -h * spec.

    ``strategy="chamber"`` integrates a box around the image T mu0 of one Weyl
    chamber and multiplies by 6 (h and spec are Weyl invariant);
    ``strategy="full"`` integrates one box that contains all six images.
    ``window = ((a1, b1), (a2, b2))`` restricts to a given (t1, t2) box.
    """
    if params.T > 64:
        raise OutsideWindow("main_term_volume supports T <= 64")

    def f(t1, t2):
        return -_h_t(params, t1, t2) * _spec_t(t1, t2)

    W = params.width
    c = [params.T * m.imag for m in params.mu0.mu]
    if window is not None:
        (a1, b1), (a2, b2) = window
        n = 801
        x = np.linspace(a1, b1, n)
        y = np.linspace(a2, b2, n)
        X, Y = np.meshgrid(x, y, indexing="ij")
        vals = f(X, Y)
        val = float(np.trapezoid(np.trapezoid(vals, y, axis=1), x))
        return VolumeResult(val, 0.0, n * n, "window")

    if strategy == "chamber":
        half = 8.0 * W
        centers = [(c[0], c[1])]
        factor = 6.0
    elif strategy == "full":
        pts = [[c[p[0]], c[p[1]]] for p in WEYL_PERMS.values()]
        lo = np.min(pts, axis=0) - 8.0 * W
        hi = np.max(pts, axis=0) + 8.0 * W
        half = float(max(hi - lo)) / 2
        centers = [tuple((lo + hi) / 2)]
        factor = 1.0
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    # widen the box until the edge is negligible, then refine until stable
    for _ in range(8):
        probe = [_grid_integral(f, cc[0], cc[1], half, 121) for cc in centers]
        if max(p[1] for p in probe) <= 1e-12 * max(p[2] for p in probe):
            break
        half *= 1.5
    else:
        raise QuadratureNotConverged("integrand mass does not fit in the quadrature box")
    n = 121
    prev = None
    for _ in range(7):
        total = 0.0
        for cc in centers:
            total += _grid_integral(f, cc[0], cc[1], half, n)[0]
        total *= factor
        if prev is not None and abs(total - prev) <= rtol * abs(total):
            return VolumeResult(total, abs(total - prev), n * n * len(centers), strategy)
        prev = total
        n = 2 * n - 1
    raise QuadratureNotConverged(f"volume did not converge: last change {abs(total - prev):.3g}")


def log_slope(ts: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log2(values) against log2(ts)."""
    return float(np.polyfit(np.log2(ts), np.log2(values), 1)[0])
