"""Classical Kloosterman sums S(m, n; c) and Ramanujan sums S(0, n; c).

Two routes: ``kloosterman_direct`` sums the definition over reduced
residues, ``kloosterman_fast`` splits c into prime powers by twisted
multiplicativity and sums each prime-power piece directly. The fast path
is only trusted because the test-suite checks it against the direct one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import euler_phi, factorize, inv_mod, mobius
from .cyclo import CycloValue

__all__ = [
    "KloostermanQuery",
    "kloosterman_direct",
    "kloosterman_fast",
    "kloosterman",
    "ramanujan",
    "units_and_inverses",
]

_TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class KloostermanQuery:
    m: int
    n: int
    c: int

    def __post_init__(self):
        if self.c < 1:
            raise ValueError(f"modulus must be >= 1, got {self.c}")


@lru_cache(maxsize=4096)
def units_and_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced residues mod c and their inverses, as int64 arrays."""
    if c == 1:
        return np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64)
    xs = [x for x in range(1, c) if math.gcd(x, c) == 1]
    inv = [pow(x, -1, c) for x in xs]
    a, b = np.array(xs, dtype=np.int64), np.array(inv, dtype=np.int64)
    a.flags.writeable = False
    b.flags.writeable = False
    return a, b


def _exponents(m: int, n: int, c: int) -> np.ndarray:
    x, xb = units_and_inverses(c)
    return (m % c * x + n % c * xb) % c


def _float_from_exponents(ex: np.ndarray, c: int) -> complex:
    return complex(np.exp(_TWO_PI_I * (ex / c)).sum())


def kloosterman_direct(m: int, n: int, c: int, mode: str = "exact"):
    """S(m, n; c) by summing e((m x + n xbar)/c) over x coprime to c."""
    if c < 1:
        raise ValueError(f"modulus must be >= 1, got {c}")
    ex = _exponents(m, n, c)
    if mode == "exact":
        return CycloValue.from_exponents(c, ex)
    if mode == "float":
        return _float_from_exponents(ex, c)
    raise ValueError(f"unknown mode {mode!r}")


@lru_cache(maxsize=1 << 16)
def _prime_power_counts(m: int, n: int, q: int) -> np.ndarray:
    counts = np.bincount(_exponents(m, n, q), minlength=q).astype(np.int64)
    counts.flags.writeable = False
    return counts


def _local_pieces(m: int, n: int, c: int):
    """(q, m_q) pairs with S(m, n; c) = prod_q S(m_q, n; q) over prime powers q || c."""
    out = []
    for q in factorize(c).prime_powers():
        r = c // q
        rb = inv_mod(r, q)
        out.append((q, (m * rb * rb) % q))
    return out


@lru_cache(maxsize=1 << 16)
def _fast_counts(m: int, n: int, c: int) -> np.ndarray:
    counts = np.ones(1, dtype=np.int64)
    order = 1
    for q, mq in _local_pieces(m, n, c):
        local = _prime_power_counts(mq, n % q, q)
        new = order * q
        # e(a/order) e(b/q) = e((a q + b order)/new); the index map is a bijection by CRT
        idx = (np.arange(order)[:, None] * q + np.arange(q)[None, :] * order) % new
        out = np.zeros(new, dtype=np.int64)
        out[idx.ravel()] = np.outer(counts, local).ravel()
        counts, order = out, new
    counts.flags.writeable = False
    return counts


@lru_cache(maxsize=1 << 16)
def _fast_float(m: int, n: int, c: int) -> complex:
    val = 1 + 0j
    for q, mq in _local_pieces(m, n, c):
        val *= _float_from_exponents(_exponents(mq, n % q, q), q)
    return val


def kloosterman_fast(m: int, n: int, c: int, mode: str = "exact"):
    """S(m, n; c) via twisted multiplicativity over the prime powers of c.

    Results are memoised on (m mod c, n mod c, c); ``lru_cache`` makes the
    table safe to share between threads.
    """
    if c < 1:
        raise ValueError(f"modulus must be >= 1, got {c}")
    m, n = m % c, n % c
    if mode == "exact":
        return CycloValue.from_int_array(c, _fast_counts(m, n, c))
    if mode == "float":
        return _fast_float(m, n, c)
    raise ValueError(f"unknown mode {mode!r}")


def kloosterman(q: KloostermanQuery, mode: str = "exact", fast: bool = True):
    fn = kloosterman_fast if fast else kloosterman_direct
    return fn(q.m, q.n, q.c, mode)


def kloosterman_counts(m: int, n: int, c: int) -> np.ndarray:
    """Read-only multiplicity vector of S(m, n; c) over e(j/c) (fast path)."""
    return _fast_counts(m % c, n % c, c)


@lru_cache(maxsize=1 << 16)
def ramanujan(n: int, c: int) -> int:
    """S(0, n; c) = mu(c/d) phi(c) / phi(c/d), d = gcd(n, c)."""
    if c < 1:
        raise ValueError(f"modulus must be >= 1, got {c}")
    d = math.gcd(n, c)
    return mobius(c // d) * euler_phi(c) // euler_phi(c // d)


def kloosterman_abs_bound(c: int) -> int:
    return euler_phi(c)


def to_complex(value) -> complex:
    if isinstance(value, CycloValue):
        return value.to_complex()
    return complex(value)


def isclose(a, b, tol=1e-9) -> bool:
    return cmath.isclose(to_complex(a), to_complex(b), abs_tol=tol)
