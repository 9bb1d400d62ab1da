from __future__ import annotations

import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gl3k.arith import inv_mod, primes_up_to, valuation
from gl3k.decomp import (
    BlockSplit,
    DecompTuple,
    _replace,
    alpha_beta,
    block_split,
    decomposition_work,
    enumerate_tuples,
    s_long_decomposed,
    validate_tuple,
    verify_decomposition,
)
from gl3k.errors import InternalNonCoprime
from gl3k.gl3 import s_long_bruteforce
from gl3k.kloosterman import kloosterman_direct


def test_block_split_examples():
    assert block_split(4, 9) == BlockSplit(4, 9, 1, 1, 1, 1, 1)
    b = block_split(7, 7)
    assert (b.I, b.I1, b.I2) == (7, 7, 7) and b.F1 == b.F2 == b.G1 == b.H1 == 1
    # p = 2: v = (2, 1) goes to H; p = 3: v = (1, 2) goes to G
    assert block_split(12, 18) == BlockSplit(1, 1, 3, 9, 4, 2, 1)


@given(st.integers(1, 3000), st.integers(1, 3000))
def test_block_split_invariants(D1, D2):
    b = block_split(D1, D2)
    assert b.F1 * b.G1 * b.H1 * b.I == D1
    assert b.F2 * b.G2 * b.H2 * b.I == D2
    for p in primes_up_to(max(D1, D2)):
        a, c = valuation(D1, p), valuation(D2, p)
        assert valuation(b.F1, p) == (a if c == 0 else 0)
        assert valuation(b.F2, p) == (c if a == 0 else 0)
        assert valuation(b.G1, p) == (a if 0 < a < c else 0)
        assert valuation(b.H1, p) == (a if a > c > 0 else 0)
        assert valuation(b.I, p) == (a if a == c else 0)


def test_coprime_single_tuple():
    for D1, D2 in [(4, 9), (5, 12), (1, 1), (7, 1)]:
        ts = list(enumerate_tuples(1, 1, D1, D2))
        assert len(ts) == 1
        t = ts[0]
        assert (t.F1, t.F2) == (D1, D2)
        assert (t.modulus_m, t.modulus_n) == (D2, D1)
        assert t.e2 == t.e3 == t.e4 == t.e6 == t.e7 == t.e8 == t.e9 == 1


def test_prime_diagonal_three_tuples():
    for p in primes_up_to(97):
        for m, n in [(1, 1), (p + 1, 2 * p + 1)]:
            ts = list(enumerate_tuples(m, n, p, p))
            assert len(ts) == 3
            kinds = sorted((t.e7, t.e8, t.e9, t.E9) for t in ts)
            assert kinds == sorted([(p, 1, 1, 1), (1, p, 1, 1), (1, 1, p, p)])
            for t in ts:
                if t.e9 == p:
                    # J3 = 1 collapses both moduli
                    assert t.modulus_m == t.modulus_n == 1
            assert s_long_decomposed(m, n, p, p) == p + 1


CASES = [(D1, D2, m, n) for D1 in range(1, 21) for D2 in range(1, 21) for m, n in [(1, 1), (2, 6), (4, 2), (12, 3)]]


def test_every_tuple_is_admissible():
    for D1, D2, m, n in CASES:
        for t in enumerate_tuples(m, n, D1, D2):
            assert validate_tuple(t, m, n, D1, D2) == [], (D1, D2, m, n, t)


def test_validator_catches_violations():
    t = next(t for t in enumerate_tuples(1, 1, 8, 8) if t.e9 > 1)
    assert "product D1" in validate_tuple(_replace(t, F1=3), 1, 1, 8, 8)
    assert "weight" in validate_tuple(_replace(t, weight=t.weight + 1), 1, 1, 8, 8)
    assert "J2 | (m, n)" in validate_tuple(_replace(t, J2=2, E9=t.E9 // 2 or 1), 1, 1, 8, 8)


def test_alpha_first_congruence_and_recomputation():
    for D1, D2, m, n in CASES[::7]:
        for t in enumerate_tuples(m, n, D1, D2):
            assert (t.alpha, t.beta) == alpha_beta(t)
            q = t.F2 * t.f2
            common = t.e4 * t.e7 * t.e8 * t.J1 * t.E8 * t.E9
            assert t.alpha % q == inv_mod(common, q) * t.f4 * t.f6 * t.J3 % q
            assert math.gcd(t.alpha, t.modulus_m) == 1 and math.gcd(t.beta, t.modulus_n) == 1


def test_alpha_independent_of_F1_beta_of_F2():
    t = next(t for t in enumerate_tuples(1, 1, 8 * 9, 8 * 5) if t.e9 > 1 or t.e8 > 1)
    a, b = alpha_beta(t)
    for F1 in (7, 11, 13):
        a2, _ = alpha_beta(_replace(t, F1=F1))
        assert a2 == a
    for F2 in (7, 11):
        _, b2 = alpha_beta(_replace(t, F2=F2))
        assert b2 == b


def test_alpha_beta_rejects_broken_tuple():
    t = list(enumerate_tuples(1, 1, 4, 9))[0]
    with pytest.raises(InternalNonCoprime):
        alpha_beta(_replace(t, e4=3))


def test_decomposed_examples():
    assert s_long_decomposed(1, 1, 4, 8) == s_long_bruteforce(1, 1, 1, 1, 4, 8)
    for D1, D2 in [(4, 9), (5, 8), (3, 7)]:
        for m, n in [(1, 1), (2, 3)]:
            want = kloosterman_direct(D2, n, D1) * kloosterman_direct(m * D1, 1, D2)
            assert s_long_decomposed(m, n, D1, D2) == want


def test_decomposed_float_mode():
    for D1, D2, m, n in [(8, 12, 2, 6), (9, 27, 3, 1), (16, 16, 4, 4)]:
        exact = s_long_bruteforce(1, m, n, 1, D1, D2).to_complex()
        assert abs(s_long_decomposed(m, n, D1, D2, "float") - exact) < 1e-9 * max(1, abs(exact))


def test_signed_falls_back_to_bruteforce():
    assert s_long_decomposed(-2, 3, 6, 4) == s_long_bruteforce(1, -2, 3, 1, 6, 4)


def test_input_caps():
    with pytest.raises(ValueError):
        list(enumerate_tuples(1, 1, 2000, 1000))


@given(st.integers(1, 24), st.integers(1, 24), st.sampled_from([1, 2, 3, 4, 6, 8, 9, 12]),
       st.sampled_from([1, 2, 3, 4, 6, 8, 9, 12]))
def test_decomposition_matches_bruteforce(D1, D2, m, n):
    assert s_long_decomposed(m, n, D1, D2) == s_long_bruteforce(1, m, n, 1, D1, D2)


def test_cost_accounting_prime_diagonal():
    for p in (97, 101):
        w = decomposition_work(1, 1, p, p)
        assert w["n_tuples"] == 3
        assert w["classical_terms"] <= 4 * p
        assert w["bruteforce_terms"] == p**3


def test_verify_report():
    rep = verify_decomposition([(1, 1)], [(1, 1)])
    assert rep.ok and rep.n_cases == 1
    rec = json.loads(next(rep.jsonl()))
    assert rec["value_re"] == pytest.approx(1.0) and rec["n_tuples"] == 1 and rec["match"]
    rep = verify_decomposition([(p, p) for p in primes_up_to(97)], [(1, 1)], workers=2)
    assert rep.ok
    for r in rep.records:
        assert r["value_re"] == pytest.approx(r["d1"] + 1)
    s = rep.summary()
    assert s["mismatches"] == 0 and s["pairs"] == 25


def test_tuples_sorted_and_unique():
    ts = list(enumerate_tuples(12, 12, 24, 24))
    assert ts == sorted(ts) and len(set(ts)) == len(ts)
    assert isinstance(ts[0], DecompTuple)
