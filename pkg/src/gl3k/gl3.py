"""The GL(3) long-Weyl-element Kloosterman sum and the S-tilde sum.

``s_long_bruteforce`` evaluates the defining sum over (B1, C1, B2, C2).
The congruence D1*C2 + B1*B2 + D2*C1 = 0 (mod D1*D2) forces
D1 | B1*B2 + D2*C1 and then fixes C2 modulo D2, so the loop only runs
over (B1, C1, B2): O(D1^2 D2) work instead of O(D1^2 D2^2).

All exact values live in the cyclotomic field of order lcm(D1, D2), since
every phase is a/D1 + b/D2 for integers a, b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .arith import inv_mod
from .cyclo import CycloValue
from .errors import DivisibilityViolated, InvalidSplit

__all__ = [
    "GL3Params",
    "TildeParams",
    "LongTerms",
    "long_terms",
    "yz_table",
    "random_yz",
    "s_long_bruteforce",
    "s_long_many",
    "s_long_crt",
    "crt_split_params",
    "s_tilde",
]

_TWO_PI_I = 2j * math.pi


class GL3Params(NamedTuple):
    m1: int
    m2: int
    n1: int
    n2: int
    D1: int
    D2: int


class TildeParams(NamedTuple):
    n1: int
    n2: int
    m1: int
    D1: int
    D2: int


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


@lru_cache(maxsize=256)
def yz_table(D: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Canonical (Y, Z) with Y*B + Z*C = 1 (mod D) for every admissible (B, C).

    Returns ``(valid, Y, Z)`` as ``D x D`` arrays indexed by ``[B, C]``;
    ``valid`` marks gcd(B, C, D) = 1 (with gcd(0, x) = |x|).
    """
    valid = np.zeros((D, D), dtype=bool)
    Y = np.zeros((D, D), dtype=np.int64)
    Z = np.zeros((D, D), dtype=np.int64)
    if D == 1:
        valid[0, 0] = True
        return valid, Y, Z
    for B in range(D):
        for C in range(D):
            g, x, y = _ext_gcd(B, C)
            if g == 0 or math.gcd(g, D) != 1:
                continue
            gi = pow(g, -1, D)
            valid[B, C] = True
            Y[B, C] = x * gi % D
            Z[B, C] = y * gi % D
    for a in (valid, Y, Z):
        a.flags.writeable = False
    return valid, Y, Z


def random_yz(B: np.ndarray, C: np.ndarray, D: int, rng: np.random.Generator):
    """A random valid (Y, Z) per (B, C): canonical solution plus a random kernel element."""
    _, Yt, Zt = yz_table(D)
    Y = Yt[B, C].copy()
    Z = Zt[B, C].copy()
    if D == 1:
        return Y, Z
    k1, k2, k3 = (rng.integers(0, D, size=B.shape) for _ in range(3))
    gb = np.gcd(B, D)
    gc = np.gcd(C, D)
    # (C, -B), (D/gcd(B, D), 0) and (0, D/gcd(C, D)) all solve Y*B + Z*C = 0 (mod D)
    Y = (Y + k1 * C + k2 * (D // gb)) % D
    Z = (Z - k1 * B + k3 * (D // gc)) % D
    return Y, Z


@dataclass(frozen=True)
class LongTerms:
    """All admissible (B1, C1, B2, C2) of the long-element sum with (Y_j, Z_j)."""

    D1: int
    D2: int
    B1: np.ndarray
    C1: np.ndarray
    B2: np.ndarray
    C2: np.ndarray
    Y1: np.ndarray
    Z1: np.ndarray
    Y2: np.ndarray
    Z2: np.ndarray

    def __len__(self):
        return int(self.B1.size)

    @property
    def order(self) -> int:
        return math.lcm(self.D1, self.D2)

    def with_yz(self, rng: np.random.Generator) -> "LongTerms":
        Y1, Z1 = random_yz(self.B1, self.C1, self.D1, rng)
        Y2, Z2 = random_yz(self.B2, self.C2, self.D2, rng)
        return LongTerms(self.D1, self.D2, self.B1, self.C1, self.B2, self.C2, Y1, Z1, Y2, Z2)

    def exponents(self, m1: int, m2: int, n1: int, n2: int) -> np.ndarray:
        """Phase numerators over lcm(D1, D2), one per admissible tuple."""
        D1, D2 = self.D1, self.D2
        L = self.order
        a = (m1 % D1 * self.B1 + n1 % D1 * ((self.Y1 * D2 - self.Z1 * self.B2) % D1)) % D1
        b = (m2 % D2 * self.B2 + n2 % D2 * ((self.Y2 * D1 - self.Z2 * self.B1) % D2)) % D2
        return (a * (L // D1) + b * (L // D2)) % L


@lru_cache(maxsize=64)
def long_terms(D1: int, D2: int) -> LongTerms:
    if D1 < 1 or D2 < 1:
        raise ValueError(f"moduli must be positive, got {(D1, D2)}")
    v1, Y1t, Z1t = yz_table(D1)
    v2, Y2t, Z2t = yz_table(D2)
    C1g, B2g = np.meshgrid(np.arange(D1, dtype=np.int64), np.arange(D2, dtype=np.int64), indexing="ij")
    parts = []
    for B1 in range(D1):
        t = B1 * B2g + D2 * C1g
        ok = (t % D1 == 0) & v1[B1, C1g]
        c1, b2 = C1g[ok], B2g[ok]
        c2 = (-(t[ok] // D1)) % D2
        keep = v2[b2, c2]
        c1, b2, c2 = c1[keep], b2[keep], c2[keep]
        parts.append((np.full(c1.size, B1, dtype=np.int64), c1, b2, c2))
    B1, C1, B2, C2 = (np.concatenate(p) for p in zip(*parts))
    arrays = dict(
        B1=B1, C1=C1, B2=B2, C2=C2,
        Y1=Y1t[B1, C1], Z1=Z1t[B1, C1], Y2=Y2t[B2, C2], Z2=Z2t[B2, C2],
    )
    for a in arrays.values():
        a.flags.writeable = False
    return LongTerms(D1, D2, **arrays)


def _evaluate(terms: LongTerms, m1, m2, n1, n2, mode):
    ex = terms.exponents(m1, m2, n1, n2)
    L = terms.order
    if mode == "exact":
        return CycloValue.from_exponents(L, ex)
    if mode == "float":
        return complex(np.exp(_TWO_PI_I * (ex / L)).sum())
    raise ValueError(f"unknown mode {mode!r}")


def s_long_bruteforce(m1: int, m2: int, n1: int, n2: int, D1: int, D2: int,
                      mode: str = "exact", rng: np.random.Generator | None = None):
    """S(m1, m2, n1, n2; D1, D2) from its definition.

    With ``rng`` given, each (Y_j, Z_j) is a random valid solution instead of
    the canonical one; the value must not change.
    """
    terms = long_terms(D1, D2)
    if rng is not None:
        terms = terms.with_yz(rng)
    return _evaluate(terms, m1, m2, n1, n2, mode)


def s_long_many(D1: int, D2: int, params, mode: str = "exact") -> list:
    """Evaluate several (m1, m2, n1, n2) for one modulus pair, sharing the enumeration."""
    terms = long_terms(D1, D2)
    return [_evaluate(terms, *p, mode) for p in params]


def crt_split_params(p: GL3Params, split: tuple[int, int, int, int]) -> tuple[GL3Params, GL3Params]:
    """The two factor sums of a coprime split (d1, d1', d2, d2') of (D1, D2)."""
    d1, d1p, d2, d2p = split
    if min(split) < 1 or d1 * d1p != p.D1 or d2 * d2p != p.D2:
        raise InvalidSplit(f"{split} does not factor {(p.D1, p.D2)}")
    if math.gcd(d1 * d2, d1p * d2p) != 1:
        raise InvalidSplit(f"{split}: the two halves are not coprime")
    # m1 only matters mod d1 (resp. d1'), m2 only mod d2 (resp. d2')
    left = GL3Params(
        p.m1 * inv_mod(d1p, d1) ** 2 * d2p % d1,
        p.m2 * inv_mod(d2p, d2) ** 2 * d1p % d2,
        p.n1, p.n2, d1, d2,
    )
    right = GL3Params(
        p.m1 * inv_mod(d1, d1p) ** 2 * d2 % d1p,
        p.m2 * inv_mod(d2, d2p) ** 2 * d1 % d2p,
        p.n1, p.n2, d1p, d2p,
    )
    return left, right


def s_long_crt(p: GL3Params, split: tuple[int, int, int, int], mode: str = "exact"):
    """Evaluate S(p) as the product of the two sums of a coprime split."""
    left, right = crt_split_params(p, split)
    return s_long_bruteforce(*left, mode=mode) * s_long_bruteforce(*right, mode=mode)


def s_tilde(n1: int, n2: int, m1: int, D1: int, D2: int, mode: str = "exact"):
    """S~(n1, n2, m1; D1, D2) for D1 | D2.

    Sum over C1 mod D1 and C2 mod D2 with (C1, D1) = (C2, D2/D1) = 1 of
    e(n2 * C1bar * C2 / D1 + m1 * C2bar / (D2/D1) + n1 * C1 / D1).
    """
    if D1 < 1 or D2 < 1:
        raise ValueError(f"moduli must be positive, got {(D1, D2)}")
    if D2 % D1:
        raise DivisibilityViolated(f"{D1} does not divide {D2}")
    q = D2 // D1
    c1 = np.array([c for c in range(D1) if math.gcd(c, D1) == 1], dtype=np.int64)
    c1b = np.array([inv_mod(int(c), D1) for c in c1], dtype=np.int64)
    c2 = np.array([c for c in range(D2) if math.gcd(c, q) == 1], dtype=np.int64)
    c2b = np.array([inv_mod(int(c), q) for c in c2], dtype=np.int64)
    a = (n2 % D1 * ((c1b[:, None] * c2[None, :]) % D1) + (n1 % D1 * c1)[:, None]) % D1
    b = (m1 % q * c2b) % q
    ex = (a * q + (b * D1)[None, :]) % D2
    if mode == "exact":
        return CycloValue.from_exponents(D2, ex.ravel())
    if mode == "float":
        return complex(np.exp(_TWO_PI_I * (ex / D2)).sum())
    raise ValueError(f"unknown mode {mode!r}")
