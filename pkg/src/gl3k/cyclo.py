"""Exact finite sums of roots of unity with rational coefficients.

A :class:`CycloValue` stores a length-``Q`` coefficient vector over the
redundant basis ``e(j/Q)``, ``j = 0..Q-1``, with a common positive
denominator. Accumulating exponential sums is then plain index counting.
Equality is equality of complex values and goes through division by the
``Q``-th cyclotomic polynomial.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np

from .arith import divisors, mobius
from .errors import OrderTooLarge

__all__ = ["CycloValue", "root_term", "cyclotomic_poly", "MAX_ORDER"]

MAX_ORDER = 10**6
_INT64_SAFE = 1 << 62


def _check_order(Q: int) -> int:
    Q = int(Q)
    if Q < 1:
        raise ValueError(f"root-of-unity order must be >= 1, got {Q}")
    if Q > MAX_ORDER:
        raise OrderTooLarge(f"order {Q} exceeds cap {MAX_ORDER}")
    return Q


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a)
    return int(np.abs(a).max())


def _fit(a: np.ndarray) -> np.ndarray:
    """Downcast to int64 when every entry comfortably fits, else keep Python ints."""
    if a.dtype == object:
        if _maxabs(a) < _INT64_SAFE:
            return a.astype(np.int64)
        return a
    return a


def _to_object(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def _gcd_all(a: np.ndarray, den: int) -> int:
    g = den
    if a.dtype == object:
        for x in a:
            if x:
                g = math.gcd(g, int(x))
                if g == 1:
                    break
        return g
    nz = a[a != 0]
    if nz.size == 0:
        return den
    return math.gcd(int(np.gcd.reduce(np.abs(nz))), den)


@lru_cache(maxsize=512)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, constant term first.

    Uses Phi_n = prod_{d | n} (x^d - 1)^{mu(n/d)}: multiply the numerator
    factors, then divide out the denominator factors exactly.
    """
    num = [1]
    dens = []
    for d in divisors(n):
        mu = mobius(n // d)
        if mu == 1:
            # multiply by (x^d - 1)
            out = [0] * (len(num) + d)
            for i, c in enumerate(num):
                out[i] -= c
                out[i + d] += c
            num = out
        elif mu == -1:
            dens.append(d)
    for d in dens:
        # exact division by (x^d - 1): q_i = q_{i-d} - r_i synthetic recurrence
        deg = len(num) - 1
        q = [0] * (deg - d + 1)
        rem = list(num)
        for i in range(deg, d - 1, -1):
            c = rem[i]
            if c:
                q[i - d] = c
                rem[i] = 0
                rem[i - d] += c
        assert not any(rem[:d]), "non-exact cyclotomic division"
        num = q
    return tuple(num)


class CycloValue:
    """Immutable exact element sum_j (num[j]/den) * e(j/Q)."""

    __slots__ = ("Q", "_num", "_den")

    def __init__(self, Q: int, coeffs=None):
        Q = _check_order(Q)
        if coeffs is None:
            num, den = np.zeros(Q, dtype=np.int64), 1
        else:
            coeffs = list(coeffs)
            if len(coeffs) != Q:
                raise ValueError(f"expected {Q} coefficients, got {len(coeffs)}")
            fr = [Fraction(c) for c in coeffs]
            den = math.lcm(1, *(f.denominator for f in fr))
            num = _fit(np.array([f.numerator * (den // f.denominator) for f in fr], dtype=object))
        self._set(Q, num, den)

    def _set(self, Q, num, den):
        g = _gcd_all(num, den)
        if g > 1:
            num = num // g
            den //= g
        num.flags.writeable = False
        self.Q = Q
        self._num = num
        self._den = int(den)

    @classmethod
    def _raw(cls, Q: int, num: np.ndarray, den: int = 1) -> "CycloValue":
        self = object.__new__(cls)
        self._set(_check_order(Q), _fit(np.asarray(num)), den)
        return self

    @classmethod
    def from_int_array(cls, Q: int, num, den: int = 1) -> "CycloValue":
        num = np.asarray(num)
        if num.shape != (Q,):
            raise ValueError(f"expected shape ({Q},), got {num.shape}")
        if den < 1:
            raise ValueError("denominator must be positive")
        if num.dtype != object:
            num = num.astype(np.int64)
        return cls._raw(Q, num.copy(), den)

    @classmethod
    def from_exponents(cls, Q: int, exponents, weights=None) -> "CycloValue":
        """Sum of e(k/Q) over the given integer exponents (optionally integer-weighted)."""
        Q = _check_order(Q)
        ex = np.mod(np.asarray(exponents, dtype=np.int64), Q)
        if weights is None:
            counts = np.bincount(ex, minlength=Q).astype(np.int64)
        else:
            counts = np.zeros(Q, dtype=np.int64)
            np.add.at(counts, ex, np.asarray(weights, dtype=np.int64))
        return cls._raw(Q, counts)

    @classmethod
    def constant(cls, c, Q: int = 1) -> "CycloValue":
        c = Fraction(c)
        num = np.zeros(_check_order(Q), dtype=object)
        num[0] = c.numerator
        return cls._raw(Q, num, c.denominator)

    # -- accessors ---------------------------------------------------------

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(x), self._den) for x in self._num)

    @property
    def numerators(self) -> np.ndarray:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    def lift(self, Q: int) -> "CycloValue":
        """Re-express over the Q-th roots of unity (self.Q must divide Q)."""
        Q = _check_order(Q)
        if Q == self.Q:
            return self
        if Q % self.Q:
            raise ValueError(f"cannot lift order {self.Q} to {Q}")
        num = np.zeros(Q, dtype=self._num.dtype)
        num[:: Q // self.Q] = self._num
        return CycloValue._raw(Q, num, self._den)

    def _common(self, other: "CycloValue"):
        Q = _check_order(math.lcm(self.Q, other.Q))
        return Q, self.lift(Q), other.lift(Q)

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "CycloValue":
        if isinstance(x, CycloValue):
            return x
        if isinstance(x, (int, Rational)):
            return CycloValue.constant(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        Q, a, b = self._common(other)
        den = math.lcm(a._den, b._den)
        fa, fb = den // a._den, den // b._den
        bound = _maxabs(a._num) * fa + _maxabs(b._num) * fb
        if bound < _INT64_SAFE:
            num = a._num.astype(np.int64) * fa + b._num.astype(np.int64) * fb
        else:
            num = _to_object(a._num) * fa + _to_object(b._num) * fb
        return CycloValue._raw(Q, num, den)

    __radd__ = __add__

    def __neg__(self):
        return CycloValue._raw(self.Q, -self._num, self._den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        if not isinstance(other, CycloValue):
            return NotImplemented
        Q, a, b = self._common(other)
        ia = np.flatnonzero(a._num)
        ib = np.flatnonzero(b._num)
        if ia.size > ib.size:
            a, b, ia, ib = b, a, ib, ia
        bound = _maxabs(a._num) * _maxabs(b._num) * max(1, ia.size)
        if bound < _INT64_SAFE:
            bn = b._num.astype(np.int64)
            out = np.zeros(Q, dtype=np.int64)
        else:
            bn = _to_object(b._num)
            out = np.zeros(Q, dtype=object)
        for i in ia:
            out += np.roll(bn, int(i)) * a._num[i]
        return CycloValue._raw(Q, out, a._den * b._den)

    __rmul__ = __mul__

    def scale(self, c) -> "CycloValue":
        c = Fraction(c)
        if c == 0:
            return CycloValue._raw(self.Q, np.zeros(self.Q, dtype=np.int64))
        if _maxabs(self._num) * abs(c.numerator) < _INT64_SAFE:
            num = self._num.astype(np.int64) * c.numerator
        else:
            num = _to_object(self._num) * c.numerator
        return CycloValue._raw(self.Q, num, self._den * c.denominator)

    def conjugate(self) -> "CycloValue":
        idx = (-np.arange(self.Q)) % self.Q
        return CycloValue._raw(self.Q, self._num[idx], self._den)

    def reduced_order(self) -> "CycloValue":
        """Same value over the smallest order dividing Q that holds the support."""
        nz = np.flatnonzero(self._num)
        g = self.Q
        for i in nz:
            g = math.gcd(g, int(i))
        step = g if nz.size else self.Q
        if step <= 1:
            return self
        return CycloValue._raw(self.Q // step, self._num[::step].copy(), self._den)

    # -- predicates and embeddings -----------------------------------------

    def is_zero(self) -> bool:
        """Exact test: Phi_Q divides the coefficient polynomial."""
        x = self.reduced_order()
        Q = x.Q
        nz = np.flatnonzero(x._num)
        if nz.size == 0:
            return True
        if Q == 1:
            return False
        # a value this far from 0 cannot vanish; embedding error is ~1e-12 * sum|c|
        scale = float(sum(abs(int(c)) for c in x._num[nz])) / x._den
        if abs(x.to_complex()) > 1e-9 * max(1.0, scale):
            return False
        phi = cyclotomic_poly(Q)
        d = len(phi) - 1
        ph = np.array(phi[:d], dtype=object)
        r = _to_object(x._num).copy()
        # phi is monic: eliminate x^i for i = Q-1 down to d
        for i in range(Q - 1, d - 1, -1):
            c = r[i]
            if c:
                r[i - d : i] -= c * ph
                r[i] = 0
        return not any(r[:d])

    def to_complex(self) -> complex:
        nz = np.flatnonzero(self._num)
        if nz.size == 0:
            return 0j
        ang = 2.0 * np.pi * (nz / self.Q)
        w = np.asarray(self._num[nz], dtype=float)
        return complex(np.sum(w * np.cos(ang)), np.sum(w * np.sin(ang))) / self._den

    def __complex__(self):
        return self.to_complex()

    def as_rational(self):
        """The rational value if this element is rational (else None)."""
        x = self.reduced_order()
        if x.Q == 1:
            return Fraction(int(x._num[0]), x._den)
        z = x.to_complex()
        cand = Fraction(round(z.real * x._den), x._den)
        if abs(z.imag) < 1e-6 and (x - cand).is_zero():
            return cand
        return None

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.Q == other.Q and self._den == other._den and np.array_equal(self._num, other._num):
            return True
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        terms = [f"{Fraction(int(c), self._den)}*e({j}/{self.Q})" for j, c in enumerate(self._num) if c]
        if len(terms) > 8:
            terms = terms[:8] + [f"... ({len(terms) - 8} more)"]
        return f"CycloValue(Q={self.Q}: {' + '.join(terms) or '0'})"


def root_term(numerator: int, Q: int) -> CycloValue:
    """The value e(numerator/Q)."""
    Q = _check_order(Q)
    num = np.zeros(Q, dtype=np.int64)
    num[int(numerator) % Q] = 1
    return CycloValue._raw(Q, num)


def approx_equal(x: CycloValue, z: complex, tol: float = 1e-9) -> bool:
    return cmath.isclose(x.to_complex(), z, abs_tol=tol)
