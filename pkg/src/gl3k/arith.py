"""Integer number theory: inverses, CRT, factorization, divisor splits.

Everything here is a pure function of small integers. Factorization is
plain trial division (deterministic, fine below ~10^12) backed by a
deterministic Miller-Rabin test for large cofactors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce

from .errors import ModuliNotCoprime, NotDivisor, NotInvertible

__all__ = [
    "Factorization",
    "RationalWeight",
    "inv_mod",
    "crt",
    "factorize",
    "valuation",
    "squarefree_kernel",
    "c_factor",
    "unitary_splits",
    "divisors",
    "mobius",
    "euler_phi",
    "is_prime",
    "primes_up_to",
]


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factorization {self.factors}")
            last = p
            prod *= p**e
        if prod != self.n:
            raise ValueError(f"factors multiply to {prod}, not {self.n}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def prime_powers(self) -> tuple[int, ...]:
        return tuple(p**e for p, e in self.factors)

    def value(self) -> int:
        return math.prod(p**e for p, e in self.factors)


# A reduced fraction already has exactly the RationalWeight contract.
RationalWeight = Fraction


def inv_mod(a: int, q: int) -> int:
    """Inverse of ``a`` modulo ``q`` in ``[0, q)``; ``inv_mod(a, 1) == 0``."""
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    if q == 1:
        return 0
    try:
        return pow(a, -1, q)
    except ValueError:
        raise NotInvertible(f"{a} is not invertible modulo {q}") from None


def crt(residues) -> tuple[int, int]:
    """Solve ``x = a_i (mod q_i)`` for pairwise coprime ``q_i``.

    Returns ``(x, Q)`` with ``Q = prod q_i`` and ``0 <= x < Q``.
    """
    x, Q = 0, 1
    for a, q in residues:
        if q < 1:
            raise ValueError(f"modulus must be positive, got {q}")
        if math.gcd(Q, q) != 1:
            raise ModuliNotCoprime(f"modulus {q} shares a factor with {Q}")
        # x + Q*t = a (mod q)
        t = ((a - x) * inv_mod(Q, q)) % q if q > 1 else 0
        x += Q * t
        Q *= q
        x %= Q
    return x, Q


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_TRIAL_LIMIT = 10**6


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> Factorization:
    if n < 1:
        raise ValueError(f"can only factor positive integers, got {n}")
    m = n
    out = []
    for p in itertools.chain((2, 3), itertools.count(5, 2)):
        if p * p > m or p > _TRIAL_LIMIT:
            break
        if m % p:
            continue
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        out.append((p, e))
    if m > 1:
        if m > _TRIAL_LIMIT**2 and not is_prime(m):
            raise NotImplementedError(f"cofactor {m} of {n} is composite beyond trial range")
        out.append((m, 1))
    return Factorization(n, tuple(out))


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def squarefree_kernel(n: int) -> int:
    return math.prod(factorize(n).primes)


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for _, e in f.factors):
        return 0
    return -1 if len(f.factors) % 2 else 1


def euler_phi(n: int) -> int:
    r = n
    for p in factorize(n).primes:
        r = r // p * (p - 1)
    return r


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n).factors:
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def c_factor(D: int, E: int) -> Fraction:
    """Product of p/(p-1) over primes p | D whose valuation in E equals that in D."""
    if D < 1 or E < 1 or D % E:
        raise NotDivisor(f"{E} does not divide {D}")
    num = den = 1
    for p, e in factorize(D).factors:
        if valuation(E, p) == e:
            num *= p
            den *= p - 1
    return Fraction(num, den)


def unitary_splits(n: int, parts: int) -> list[tuple[int, ...]]:
    """All ordered k-tuples of pairwise coprime factors with product n.

    Each full prime power of n goes to exactly one slot, so there are
    ``parts ** omega(n)`` tuples. Order is lexicographic in the slot
    assignment, which is deterministic.
    """
    if parts < 1:
        raise ValueError("need at least one part")
    pps = factorize(n).prime_powers()
    out = []
    for assign in itertools.product(range(parts), repeat=len(pps)):
        t = [1] * parts
        for q, slot in zip(pps, assign):
            t[slot] *= q
        out.append(tuple(t))
    return out


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
    return [i for i in range(n + 1) if sieve[i]]


def lcm(*xs: int) -> int:
    return reduce(math.lcm, xs, 1)
