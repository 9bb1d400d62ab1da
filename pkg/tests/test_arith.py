from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gl3k.arith import (
    Factorization,
    c_factor,
    crt,
    divisors,
    euler_phi,
    factorize,
    inv_mod,
    is_prime,
    mobius,
    primes_up_to,
    squarefree_kernel,
    unitary_splits,
    valuation,
)
from gl3k.errors import ModuliNotCoprime, NotDivisor, NotInvertible


def test_inv_mod_examples():
    assert inv_mod(3, 7) == 5  # 15 = 2*7 + 1
    for n in range(2, 30):
        assert inv_mod(1, n) == 1
    assert inv_mod(5, 1) == 0
    with pytest.raises(NotInvertible):
        inv_mod(2, 4)


@given(st.integers(2, 10**6), st.integers(-(10**9), 10**9))
def test_inv_mod_property(q, a):
    if math.gcd(a, q) != 1:
        with pytest.raises(NotInvertible):
            inv_mod(a, q)
        return
    x = inv_mod(a, q)
    assert 0 <= x < q and a * x % q == 1


def test_crt_examples():
    assert crt([(1, 3), (2, 5)]) == (7, 15)
    assert crt([(0, 11)]) == (0, 11)
    with pytest.raises(ModuliNotCoprime):
        crt([(1, 2), (1, 4)])


def test_crt_random_instances():
    rng = np.random.default_rng(1)
    ps = primes_up_to(200)
    for _ in range(1000):
        k = int(rng.integers(1, 5))
        chosen = rng.choice(len(ps), size=k, replace=False)
        mods = [ps[i] ** int(rng.integers(1, 3)) for i in chosen]
        res = [(int(rng.integers(-1000, 1000)), q) for q in mods]
        x, Q = crt(res)
        assert Q == math.prod(mods) and 0 <= x < Q
        assert all((x - a) % q == 0 for a, q in res)


def test_squarefree_kernel():
    assert squarefree_kernel(12) == 6
    assert squarefree_kernel(1) == 1
    for p in (2, 3, 7, 97):
        for k in range(1, 6):
            assert squarefree_kernel(p**k) == p


def _spf_table(n: int) -> np.ndarray:
    spf = np.arange(n + 1)
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == p:
            block = spf[p * p :: p]
            np.copyto(block, p, where=block == np.arange(p * p, n + 1, p))
    return spf


def test_factorization_roundtrip_to_1e6():
    limit = 10**6
    spf = _spf_table(limit)
    for n in range(1, limit + 1):
        f = factorize(n)
        assert f.value() == n
        if n > 1:
            assert f.factors[0][0] == spf[n]


def test_factorization_rejects_bad_input():
    with pytest.raises(ValueError):
        Factorization(12, ((3, 1), (2, 2)))
    with pytest.raises(ValueError):
        Factorization(12, ((2, 1), (3, 1)))


def test_large_prime_cofactor():
    p = 1_000_000_007
    assert is_prime(p)
    assert factorize(6 * p).factors == ((2, 1), (3, 1), (p, 1))


def test_c_factor_examples():
    for p in primes_up_to(97):
        # the diagonal check 1 + 1 + p / C_{p,p} = p + 1 needs C_{p,p} = p / (p - 1)
        assert c_factor(p, p) == Fraction(p, p - 1)
        assert 1 + 1 + p / c_factor(p, p) == p + 1
    assert c_factor(12, 4) == 2
    assert c_factor(12, 2) == 1
    with pytest.raises(NotDivisor):
        c_factor(12, 5)


def _c_oracle(D: int, E: int) -> Fraction:
    out = Fraction(1)
    for p in range(2, D + 1):
        if D % p == 0 and all(p % q for q in range(2, math.isqrt(p) + 1)):
            if valuation(D, p) == valuation(E, p):
                out *= Fraction(p, p - 1)
    return out


def test_c_factor_exhaustive():
    for D in range(1, 501):
        full = math.prod(Fraction(p, p - 1) for p in factorize(D).primes)
        assert c_factor(D, D) == full
        for E in divisors(D):
            c = c_factor(D, E)
            assert c == _c_oracle(D, E)
            if all(valuation(D, p) > valuation(E, p) for p in factorize(D).primes):
                assert c == 1


def test_unitary_splits_examples():
    assert set(unitary_splits(12, 2)) == {(1, 12), (12, 1), (4, 3), (3, 4)}
    assert unitary_splits(1, 3) == [(1, 1, 1)]
    assert set(unitary_splits(7, 2)) == {(1, 7), (7, 1)}


@given(st.integers(1, 5000), st.integers(1, 4))
def test_unitary_splits_property(n, k):
    splits = unitary_splits(n, k)
    assert len(splits) == k ** len(factorize(n).factors)
    assert len(set(splits)) == len(splits)
    for t in splits:
        assert math.prod(t) == n
        assert all(math.gcd(a, b) == 1 for i, a in enumerate(t) for b in t[i + 1 :])


@given(st.integers(1, 10**5))
def test_mobius_phi_divisors(n):
    ds = divisors(n)
    assert sum(mobius(d) for d in ds) == (1 if n == 1 else 0)
    assert sum(euler_phi(d) for d in ds) == n
    if n <= 2000:
        assert euler_phi(n) == sum(1 for x in range(1, n + 1) if math.gcd(x, n) == 1)
