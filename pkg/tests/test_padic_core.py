import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padic_hlp.errors import ZeroInputError
from padic_hlp.padic_core import (Ball, PAdicScalar, PrimeBase, Sphere, digit_expansion,
                                  haar_measure, is_prime, padic_norm, partial_sum, unit_part,
                                  valuation)

PRIMES = [p for p in range(2, 101) if all(p % d for d in range(2, p))]

nonzero = st.builds(Fraction, st.integers(-10**6, 10**6).filter(bool), st.integers(1, 10**6))
primes = st.sampled_from(PRIMES)


def factor_exponent(n: int, p: int) -> int:
    """Exponent of p in |n| read off a full trial-division factorisation."""
    n = abs(n)
    counts = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            counts[d] = counts.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        counts[n] = counts.get(n, 0) + 1
    return counts.get(p, 0)


class TestPrimeBase:
    def test_primes_accepted(self):
        for p in (2, 3, 5, 97):
            assert PrimeBase(p).p == p

    @pytest.mark.parametrize("n", [0, 1, 4, 9, 91, -3])
    def test_composites_rejected(self, n):
        with pytest.raises(ValueError):
            PrimeBase(n)

    def test_non_int_rejected(self):
        with pytest.raises(TypeError):
            PrimeBase(2.0)
        with pytest.raises(TypeError):
            PrimeBase(True)

    def test_is_prime_matches_sieve(self):
        assert [n for n in range(101) if is_prime(n)] == PRIMES


class TestValuation:
    def test_examples(self):
        assert valuation(3, 3) == 1
        assert valuation(0, 5) == math.inf
        assert valuation(12, 2) == 2
        assert valuation(Fraction(1, 2), 2) == -1
        assert valuation("-9/20", 3) == 2

    def test_norm_examples(self):
        assert padic_norm(3, 3) == Fraction(1, 3)
        assert padic_norm(1, 7) == 1
        assert padic_norm(Fraction(1, 2), 2) == 2
        assert padic_norm(0, 5) == 0

    @given(nonzero, primes)
    def test_against_factorisation(self, x, p):
        expected = factor_exponent(x.numerator, p) - factor_exponent(x.denominator, p)
        assert valuation(x, p) == expected

    @given(nonzero, primes)
    def test_unit_part_is_a_unit(self, x, p):
        u = unit_part(x, p)
        assert valuation(u, p) == 0
        assert u * Fraction(p) ** valuation(x, p) == x

    def test_unit_part_of_zero(self):
        with pytest.raises(ZeroInputError):
            unit_part(0, 3)


class TestNormLaws:
    @settings(max_examples=300)
    @given(nonzero, nonzero, primes)
    def test_multiplicative(self, x, y, p):
        assert valuation(x * y, p) == valuation(x, p) + valuation(y, p)
        assert padic_norm(x * y, p) == padic_norm(x, p) * padic_norm(y, p)

    @settings(max_examples=300)
    @given(nonzero, nonzero, primes)
    def test_ultrametric(self, x, y, p):
        nx, ny = padic_norm(x, p), padic_norm(y, p)
        nxy = padic_norm(x + y, p)
        assert nxy <= max(nx, ny)
        if nx != ny:
            assert nxy == max(nx, ny)


class TestDigits:
    def test_examples(self):
        assert digit_expansion(Fraction(1, 2), 3, 4) == (0, [2, 1, 1, 1])
        assert digit_expansion(-1, 2, 5) == (0, [1, 1, 1, 1, 1])
        assert digit_expansion(9, 3, 3) == (2, [1, 0, 0])

    def test_one_half_partial_sums(self):
        # 1/2 - s_k must be divisible by 3**k
        g, digits = digit_expansion(Fraction(1, 2), 3, 4)
        for k in range(1, 5):
            assert valuation(Fraction(1, 2) - partial_sum(g, digits[:k], 3), 3) >= k

    def test_minus_one_is_all_ones(self):
        g, digits = digit_expansion(-1, 2, 5)
        for k in range(1, 6):
            assert (partial_sum(g, digits[:k], 2) + 1) % 2**k == 0

    def test_zero_rejected(self):
        with pytest.raises(ZeroInputError):
            digit_expansion(0, 5, 3)

    def test_needs_a_digit(self):
        with pytest.raises(ValueError):
            digit_expansion(1, 5, 0)

    @settings(max_examples=200)
    @given(nonzero, primes, st.integers(1, 30))
    def test_round_trip(self, x, p, n):
        g, digits = digit_expansion(x, p, n)
        assert g == valuation(x, p)
        assert len(digits) == n
        assert digits[0] != 0
        assert all(0 <= a < p for a in digits)
        assert valuation(x - partial_sum(g, digits, p), p) >= g + n


class TestHaar:
    def test_examples(self):
        assert haar_measure(Ball(0), 2) == 1
        assert haar_measure(Sphere(0), 3) == Fraction(2, 3)
        assert haar_measure(Ball(-2), 2) == Fraction(1, 4)
        assert haar_measure(Sphere(1), 5, exact=False) == pytest.approx(4.0)

    @given(primes, st.integers(-20, 20), st.integers(0, 40))
    def test_telescoping(self, p, gamma, K):
        spheres = sum(haar_measure(Sphere(k), p) for k in range(gamma - K, gamma + 1))
        assert haar_measure(Ball(gamma), p) - spheres == Fraction(p) ** (gamma - K - 1)

    def test_unknown_region(self):
        with pytest.raises(TypeError):
            haar_measure(3, 2)


class TestScalar:
    def test_cached_fields(self):
        x = PAdicScalar.of("12/5", 2)
        assert x.valuation == 2
        assert x.norm == Fraction(1, 4)
        assert x.digits(3) == digit_expansion(Fraction(12, 5), 2, 3)

    def test_arithmetic_stays_exact(self):
        x = PAdicScalar.of(Fraction(1, 3), 3)
        y = x * 9 + 1
        assert y.value == 4 and y.valuation == 0
        assert (x / 3).valuation == -2
        assert (1 - x).value == Fraction(2, 3)
        assert (-x).norm == 3

    def test_zero(self):
        z = PAdicScalar.of(0, 7)
        assert z.valuation == math.inf and z.norm == 0

    def test_mixed_primes(self):
        with pytest.raises(ValueError):
            PAdicScalar.of(1, 2) + PAdicScalar.of(1, 3)

    def test_divide_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            PAdicScalar.of(1, 2) / 0
