from __future__ import annotations

import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gl3k.cyclo import CycloValue, cyclotomic_poly, root_term
from gl3k.errors import OrderTooLarge


def z3():
    return root_term(0, 3) + root_term(1, 3) + root_term(2, 3)


def test_root_term_examples():
    assert root_term(0, 7) == 1
    assert root_term(1, 2) == -1
    i = root_term(1, 4)
    assert list(i.numerators) == [0, 1, 0, 0]
    assert root_term(5, 4) == i


def test_arithmetic_examples():
    assert root_term(1, 3) + root_term(2, 3) == -1
    x = root_term(2, 9) + root_term(5, 7)
    assert x * 1 == x
    assert root_term(1, 2).scale(Fraction(3, 2)) == Fraction(-3, 2)


def test_is_zero_examples():
    assert z3().is_zero()
    assert not (root_term(1, 5) - root_term(2, 5)).is_zero()
    assert (root_term(2, 4) - root_term(1, 2)).is_zero()


def test_to_complex_examples():
    assert root_term(1, 2).to_complex() == pytest.approx(-1.0, abs=1e-15)
    assert root_term(1, 4).to_complex() == pytest.approx(1j, abs=1e-15)
    assert abs(z3().to_complex()) <= 1e-12


def test_order_cap():
    with pytest.raises(OrderTooLarge):
        root_term(1, 10**6 + 1)


def test_cyclotomic_poly_known():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)
    # Phi_105 is the first with a coefficient -2
    assert min(cyclotomic_poly(105)) == -2


@st.composite
def cyclo_values(draw, qmax=360, cmax=5):
    Q = draw(st.integers(1, qmax))
    k = draw(st.integers(0, 6))
    coeffs = [0] * Q
    for _ in range(k):
        j = draw(st.integers(0, Q - 1))
        coeffs[j] += Fraction(draw(st.integers(-cmax, cmax)), draw(st.integers(1, 3)))
    return CycloValue(Q, coeffs)


@given(cyclo_values(), cyclo_values())
def test_homomorphism(x, y):
    assert cmath.isclose((x + y).to_complex(), x.to_complex() + y.to_complex(), abs_tol=1e-10)
    assert cmath.isclose((x * y).to_complex(), x.to_complex() * y.to_complex(), abs_tol=1e-10)
    assert cmath.isclose((x - y).to_complex(), x.to_complex() - y.to_complex(), abs_tol=1e-10)


@given(cyclo_values())
def test_self_difference_is_zero(x):
    assert (x - x).is_zero()
    assert x == x
    assert x.conjugate().to_complex() == pytest.approx(x.to_complex().conjugate(), abs=1e-10)


def test_is_zero_agrees_with_embedding():
    rng = np.random.default_rng(7)
    zeros = 0
    for _ in range(1000):
        Q = int(rng.choice([2, 3, 4, 5, 6, 8, 9, 10, 12]))
        coeffs = rng.integers(-1, 2, size=Q)
        x = CycloValue(Q, [int(c) for c in coeffs])
        small = abs(x.to_complex()) < 1e-8
        assert x.is_zero() == small
        zeros += small
    assert zeros > 10  # the sample must exercise both branches


@given(st.integers(1, 60), st.integers(0, 1000))
def test_full_orbit_sums_to_zero(Q, shift):
    s = sum((root_term(j + shift, Q) for j in range(Q)), CycloValue(Q))
    assert s.is_zero() == (Q > 1)
