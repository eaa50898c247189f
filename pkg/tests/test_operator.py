import math
from fractions import Fraction as F

import numpy as np
import pytest

from padic_hlp.errors import OverflowFlag
from padic_hlp.operator import (KernelParams, SpaceParams, adjoint_params, apply_hlp,
                                build_matrix, decay_exponents, entry_exponent, kernel_eval,
                                kernel_sup_bound, matrix_prefactor, row_sum_tail,
                                toeplitz_row_sum_limit)
from padic_hlp.radial import (RadialFunction, ValuationWindow, indicator_sphere, lq_norm,
                              to_sequence_coords, weighted_inner, weighted_norm)

CANON_K = KernelParams(1, 0, 0)
CANON_S = SpaceParams(2, 2, 0, 0)

# balanced q = r points inside the boundedness region
BALANCED = [
    (KernelParams(1, 0, 0), SpaceParams(2, 2, 0, 0)),
    (KernelParams(F(7, 4), F(1, 4), F(1, 2)), SpaceParams(3, 3, F(1, 2), F(1, 2))),
    (KernelParams(2, F(1, 2), F(1, 2)), SpaceParams(F(3, 2), F(3, 2), F(1, 4), F(1, 4))),
    (KernelParams(F(5, 2), 1, F(1, 2)), SpaceParams(4, 4, 1, 1)),
    (KernelParams(1, 0, 0), SpaceParams(1, 1, F(-1, 2), F(-1, 2))),
]


def brute_apply(k, f: RadialFunction, out: ValuationWindow) -> np.ndarray:
    p = f.base.p
    res = []
    for m in out.gammas.tolist():
        total = 0.0
        for g, v in zip(f.window.gammas.tolist(), f.values.tolist()):
            total += (1 - 1 / p) * p**g * kernel_eval(float(p) ** g, float(p) ** m, k) * v
        res.append(total)
    return np.array(res)


def entry_by_definition(k, s, p, m, g):
    c = 1 - 1 / p
    left = (c * p ** (m * (float(s.beta) + 1))) ** (1 / float(s.r))
    right = (c * p ** (g * (float(s.alpha) + 1))) ** (-1 / float(s.q))
    return left * kernel_eval(float(p) ** g, float(p) ** m, k) * p**g * c * right


class TestKernel:
    def test_examples(self):
        assert kernel_eval(1, 1, KernelParams(1, 0, 0)) == 1
        assert kernel_eval(2, 4, KernelParams(1, 0, 0)) == 0.25
        assert kernel_eval(0.5, 0.5, KernelParams(2, 1, 0)) == 2

    def test_adjoint_params(self):
        assert adjoint_params(KernelParams(1, 0, 0), 0) == KernelParams(1, 0, 0)
        assert adjoint_params(KernelParams(2, 1, 0), 1) == KernelParams(2, 0, 0)


class TestApply:
    def test_single_sphere(self):
        hf = apply_hlp(CANON_K, indicator_sphere(2, 0), ValuationWindow(-3, 3))
        assert hf.at(0) == pytest.approx(0.5)
        assert hf.at(1) == pytest.approx(0.25)
        assert hf.at(-2) == pytest.approx(0.5)

    def test_zero_input(self):
        f = RadialFunction.zeros(3, ValuationWindow(-5, 5))
        assert not apply_hlp(CANON_K, f, ValuationWindow(-5, 5)).values.any()

    def test_matches_double_sum(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            p = int(rng.choice([2, 3, 5]))
            k = KernelParams(*rng.uniform(-1, 3, size=3))
            w = ValuationWindow(int(rng.integers(-8, 0)), int(rng.integers(0, 8)))
            out = ValuationWindow(int(rng.integers(-10, 0)), int(rng.integers(0, 10)))
            f = RadialFunction(p, w, rng.normal(size=w.size))
            got = apply_hlp(k, f, out).values
            want = brute_apply(k, f, out)
            scale = brute_apply(k, RadialFunction(p, w, np.abs(f.values)), out)
            assert np.all(np.abs(got - want) <= 1e-12 * scale + 1e-300)

    @pytest.mark.parametrize("k,s", BALANCED[:4])
    def test_radial_scaling(self, k, s):
        p, shift = 3, 4
        f = RadialFunction(p, ValuationWindow(-6, 6), np.linspace(1, 2, 13))
        g = RadialFunction(p, ValuationWindow(-6 + shift, 6 + shift), f.values)
        hf = apply_hlp(k, f, ValuationWindow(-10, 10))
        hg = apply_hlp(k, g, ValuationWindow(-10 + shift, 10 + shift))
        factor = p ** (shift * float(k.mu + k.nu + 1 - k.lam))
        assert np.allclose(hg.values, factor * hf.values, rtol=1e-12)

    def test_monotone_and_positive(self):
        rng = np.random.default_rng(3)
        w = ValuationWindow(-10, 10)
        for k, _ in BALANCED:
            a = rng.uniform(0, 1, size=w.size)
            b = a + rng.uniform(0, 1, size=w.size)
            ha = apply_hlp(k, RadialFunction(2, w, a), w).values
            hb = apply_hlp(k, RadialFunction(2, w, b), w).values
            assert np.all(ha >= 0) and np.all(hb >= ha)

    def test_overflow_flagged(self):
        f = RadialFunction(2, ValuationWindow(0, 400), np.ones(401))
        with pytest.raises(OverflowFlag):
            apply_hlp(KernelParams(0, 50, 0), f, ValuationWindow(0, 400))


class TestMatrix:
    def test_matches_definition(self):
        k = KernelParams(F(3, 2), F(1, 3), F(-1, 4))
        s = SpaceParams(F(3, 2), 3, F(1, 5), F(-1, 3))
        w = ValuationWindow(-3, 4)
        M = build_matrix(k, s, w, 5)
        for i, m in enumerate(w.gammas.tolist()):
            for j, g in enumerate(w.gammas.tolist()):
                assert M[i, j] == pytest.approx(entry_by_definition(k, s, 5, m, g), rel=1e-12)

    def test_single_entry_window(self):
        s = SpaceParams(3, 2, 1, 1)
        M = build_matrix(CANON_K, s, ValuationWindow(0, 0), 3)
        c = 2 / 3
        assert M.shape == (1, 1)
        assert M[0, 0] == pytest.approx(c ** 0.5 * c * c ** (-1 / 3))

    def test_coordinates_are_isometric(self):
        rng = np.random.default_rng(11)
        k = KernelParams(F(7, 4), F(1, 4), F(1, 2))
        for s in (SpaceParams(3, 3, F(1, 2), F(1, 2)), SpaceParams(2, 3, 0, F(1, 2))):
            w = ValuationWindow(-6, 6)
            f = RadialFunction(3, w, rng.uniform(0, 1, size=w.size))
            M = build_matrix(k, s, w, 3)
            u = to_sequence_coords(f, s.q, s.alpha)
            hf = apply_hlp(k, f, w)
            assert lq_norm(M @ u, s.r) == pytest.approx(weighted_norm(hf, s.r, s.beta), rel=1e-12)

    def test_sup_target_uses_plain_values(self):
        k, s = KernelParams(2, 0, 1), SpaceParams(2, math.inf, 0, 0)
        w = ValuationWindow(-5, 5)
        f = RadialFunction(2, w, np.linspace(0.5, 1.5, w.size))
        M = build_matrix(k, s, w, 2)
        hf = apply_hlp(k, f, w)
        assert np.allclose(M @ to_sequence_coords(f, 2, 0), hf.values, rtol=1e-12)

    def test_nonnegative(self):
        for k, s in BALANCED:
            assert np.all(build_matrix(k, s, ValuationWindow.symmetric(30), 3) >= 0)

    @pytest.mark.parametrize("k,s", BALANCED)
    def test_toeplitz_exponents_exact(self, k, s):
        for m in range(-6, 6):
            for g in range(-6, 6):
                assert entry_exponent(k, s, m + 1, g + 1) == entry_exponent(k, s, m, g)

    @pytest.mark.parametrize("k,s", BALANCED)
    def test_toeplitz_numeric(self, k, s):
        M = build_matrix(k, s, ValuationWindow.symmetric(12), 2)
        assert np.allclose(M[1:, 1:], M[:-1, :-1], rtol=1e-12, atol=0)

    def test_toeplitz_fails_off_balance(self):
        k, s = KernelParams(F(3, 2), 0, 0), SpaceParams(2, 2, 0, 0)
        assert entry_exponent(k, s, 1, 1) != entry_exponent(k, s, 0, 0)

    @pytest.mark.parametrize("k,s", BALANCED)
    def test_toeplitz_entries(self, k, s):
        p = 3
        a1, b1 = (float(x) for x in decay_exponents(k, s))
        M = build_matrix(k, s, ValuationWindow.symmetric(5), p)
        c = matrix_prefactor(s, p)
        for i in range(11):
            for j in range(11):
                d = i - j
                want = c * p ** (-a1 * d) if d >= 0 else c * p ** (b1 * d)
                assert M[i, j] == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("k,s", BALANCED)
    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_row_sum_identity(self, k, s, p):
        w = ValuationWindow.symmetric(40)
        M = build_matrix(k, s, w, p)
        limit = toeplitz_row_sum_limit(k, s, p)
        for i in range(5, w.size - 5, 7):
            m = int(w.gammas[i])
            tail = row_sum_tail(k, s, p, w, m)
            assert abs(M[i].sum() + tail - limit) <= 1e-10 * limit
            assert M[i].sum() <= limit * (1 + 1e-14)

    def test_canonical_row_sum(self):
        limit = toeplitz_row_sum_limit(CANON_K, CANON_S, 2)
        assert limit == pytest.approx(0.5 * (1 + 2 / (2**0.5 - 1)), rel=1e-15)

    def test_divergent_row_sum(self):
        k, s = KernelParams(1, 0, 0), SpaceParams(2, 2, 1, 1)
        assert toeplitz_row_sum_limit(k, s, 2) == math.inf


class TestAdjoint:
    def test_duality_random(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            p = int(rng.choice([2, 3, 5]))
            k = KernelParams(*rng.uniform(-1, 3, size=3))
            alpha = float(rng.uniform(-1, 1))
            wf = ValuationWindow(int(rng.integers(-6, 0)), int(rng.integers(0, 6)))
            wg = ValuationWindow(int(rng.integers(-6, 0)), int(rng.integers(0, 6)))
            f = RadialFunction(p, wf, rng.normal(size=wf.size))
            g = RadialFunction(p, wg, rng.normal(size=wg.size))
            lhs = weighted_inner(apply_hlp(k, f, wg), g, 0)
            rhs = weighted_inner(f, apply_hlp(adjoint_params(k, alpha), g, wf), alpha)
            scale = weighted_inner(apply_hlp(k, RadialFunction(p, wf, np.abs(f.values)), wg),
                                   RadialFunction(p, wg, np.abs(g.values)), 0)
            assert abs(lhs - rhs) <= 1e-10 * scale


class TestKernelSup:
    @staticmethod
    def grid_sup(a, b, lam, p=2, radius=20):
        best = 0.0
        for i in range(-radius, radius + 1):
            for j in range(-radius, radius + 1):
                x, y = float(p) ** i, float(p) ** j
                best = max(best, x**a * y ** (-b) / max(x, y) ** lam)
        return best

    @pytest.mark.parametrize("a,b,lam", [(1, -1, 2), (0, 0, 0), (1, 0, 1), (0.5, -1.5, 2)])
    def test_examples(self, a, b, lam):
        assert kernel_sup_bound(a, b, lam, 2) == pytest.approx(self.grid_sup(a, b, lam))
        assert kernel_sup_bound(a, b, lam, 3) == pytest.approx(1.0)

    @pytest.mark.parametrize("a,b,lam", [(1, -1, 1), (-1, -2, 1), (1, 0.5, 0.5)])
    def test_outside_lemma(self, a, b, lam):
        assert kernel_sup_bound(a, b, lam) == math.inf
