"""The HLP-type kernel and the operator it induces on radial functions.

    k(x, y) = |x|_p**mu * |y|_p**nu / max(|x|_p, |y|_p)**lam
    (H f)(y) = ∫ k(x, y) f(x) dx

Everything is expressed through valuations: a point ``|x|_p = p**g`` is
represented by the integer ``g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import OverflowFlag
from .padic_core import PrimeBase, as_base
from .radial import Exponent, RadialFunction, ValuationWindow, recip

_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class KernelParams:
    lam: Fraction | float
    mu: Fraction | float
    nu: Fraction | float


@dataclass(frozen=True)
class SpaceParams:
    """Source ``L^q_alpha`` and target ``L^r_beta``.

    Weights are ignored on an infinite exponent, where the space is the
    unweighted ``L^inf``.
    """

    q: Exponent
    r: Exponent
    alpha: Fraction | float = 0
    beta: Fraction | float = 0


def kernel_eval(xnorm: float, ynorm: float, k: KernelParams) -> float:
    return xnorm ** float(k.mu) * ynorm ** float(k.nu) / max(xnorm, ynorm) ** float(k.lam)


def _log_parts(vals: np.ndarray):
    with np.errstate(divide="ignore"):
        return np.log(np.where(vals > 0, vals, 0.0)), np.log(np.where(vals < 0, -vals, 0.0))


def _apply_log(k: KernelParams, lp: float, gam: np.ndarray, logf: np.ndarray,
               out: np.ndarray) -> np.ndarray:
    # split on max(|x|,|y|): the x <= y half needs a prefix sum, the x > y half a suffix sum
    lam, mu, nu = float(k.lam), float(k.mu), float(k.nu)
    pre = np.logaddexp.accumulate(gam * (mu + 1.0) * lp + logf)
    suf = np.logaddexp.accumulate((gam * (mu + 1.0 - lam) * lp + logf)[::-1])[::-1]
    n = gam.size
    idx = out - gam[0]
    lower = np.where(idx < 0, -np.inf, pre[np.clip(idx, 0, n - 1)])
    j = idx + 1
    upper = np.where(j >= n, -np.inf, suf[np.clip(j, 0, n - 1)])
    with np.errstate(invalid="ignore"):
        inner = np.logaddexp(-lam * out * lp + lower, upper)
    return inner + nu * out * lp


def apply_hlp(k: KernelParams, f: RadialFunction, out_window: ValuationWindow) -> RadialFunction:
    """``(H f)(p**m)`` for every ``m`` in ``out_window``.

    Each output is ``(1-1/p) * sum_g p**g k(p**g, p**m) f_g``. The kernel
    separates on either side of the diagonal, so the sum is two running
    log-sum-exps over the input window. That is linear time, and nothing
    overflows before the final exponentiation.
    """
    base = f.base
    lp = math.log(base.p)
    gam = f.window.gammas
    out = out_window.gammas
    logc = math.log1p(-1.0 / base.p)
    pos, neg = _log_parts(f.values)
    result = np.zeros(out.size)
    for logf, sign in ((pos, 1.0), (neg, -1.0)):
        if np.all(np.isneginf(logf)):
            continue
        lg = logc + _apply_log(k, lp, gam, logf, out)
        if np.any(lg > _LOG_MAX):
            raise OverflowFlag(
                "operator output exceeds float range; the parameters are probably "
                "far from the bounded regime")
        result += sign * np.exp(lg)
    return RadialFunction(base, out_window, result)


def _weight_exp(q: Exponent) -> float:
    return float(recip(q))


def entry_exponent(k: KernelParams, s: SpaceParams, m: int, g: int):
    """Exponent of ``p`` in matrix entry ``M[m, g]``, without the ``(1-1/p)`` factors.

    Exact when every parameter is rational, which makes Toeplitz checks exact.
    """
    iq, ir = recip(s.q), recip(s.r)
    return (ir * m * (s.beta + 1) + g + g * k.mu + m * k.nu - k.lam * max(g, m)
            - iq * g * (s.alpha + 1))


def matrix_prefactor(s: SpaceParams, base) -> float:
    """The ``(1-1/p)**(1/r + 1 - 1/q)`` factor shared by every entry."""
    c = 1.0 - 1.0 / as_base(base).p
    return c ** (_weight_exp(s.r) + 1.0 - _weight_exp(s.q))


def build_matrix(k: KernelParams, s: SpaceParams, window: ValuationWindow, base) -> np.ndarray:
    """Matrix of ``H`` in isometric coordinates on ``window x window``.

    Source coordinates carry the ``L^q_alpha`` weights and target
    coordinates the ``L^r_beta`` weights, so ``||M u||_r`` equals
    ``||H f||_{r,beta}`` on the window for the ``f`` whose coordinates are
    ``u``. Infinite exponents use plain values as coordinates.
    """
    base = as_base(base)
    lp = math.log(base.p)
    logc = math.log1p(-1.0 / base.p)
    iq, ir = _weight_exp(s.q), _weight_exp(s.r)
    lam, mu, nu = float(k.lam), float(k.mu), float(k.nu)
    a, b = float(s.alpha), float(s.beta)
    g = window.gammas.astype(float)
    m = g[:, None]
    gg = g[None, :]
    logm = (ir * (logc + m * (b + 1.0) * lp)
            + logc + gg * lp
            + (gg * mu + m * nu - lam * np.maximum(gg, m)) * lp
            - iq * (logc + gg * (a + 1.0) * lp))
    with np.errstate(over="ignore"):
        return np.exp(logm)


def decay_exponents(k: KernelParams, s: SpaceParams):
    """``(A1, B1) = (mu + 1 - (alpha+1)/q, nu + (beta+1)/r)``.

    Under the balance condition the matrix entries are
    ``pref * p**(-A1 (m-g))`` below the diagonal and ``pref * p**(-B1 (g-m))``
    above it.
    """
    return (k.mu + 1 - recip(s.q) * (s.alpha + 1),
            k.nu + recip(s.r) * (s.beta + 1))


def toeplitz_row_sum_limit(k: KernelParams, s: SpaceParams, base) -> float:
    """Row sum of the bi-infinite balanced Toeplitz matrix (inf if it diverges)."""
    p = as_base(base).p
    a1, b1 = (float(v) for v in decay_exponents(k, s))
    if a1 <= 0 or b1 <= 0:
        return math.inf
    return matrix_prefactor(s, p) * (1.0 + 1.0 / (p**a1 - 1.0) + 1.0 / (p**b1 - 1.0))


def row_sum_tail(k: KernelParams, s: SpaceParams, base, window: ValuationWindow, m: int) -> float:
    """Mass of row ``m`` that lies outside ``window`` (balanced case)."""
    p = as_base(base).p
    a1, b1 = (float(v) for v in decay_exponents(k, s))
    if a1 <= 0 or b1 <= 0:
        return math.inf
    left = p ** (-a1 * (m - window.gmin + 1)) / (1.0 - p ** (-a1))
    right = p ** (-b1 * (window.gmax - m + 1)) / (1.0 - p ** (-b1))
    return matrix_prefactor(s, p) * (left + right)


def adjoint_params(k: KernelParams, alpha) -> KernelParams:
    """Kernel of the adjoint of ``H: L^q_alpha -> L^inf`` under the ``|x|^alpha`` pairing.

    ``∫ (Hf) g dy = ∫ f (H* g) |x|_p**alpha dx`` with ``H* = H_{lam, nu, mu - alpha}``.
    """
    return KernelParams(k.lam, k.nu, k.mu - alpha)


def kernel_sup_bound(a, b, lam, base: PrimeBase | int = 2, radius: int = 20) -> float:
    """``sup |x|^a |y|^(-b) / max(|x|,|y|)^lam`` over p-power norms.

    Finite exactly when ``lam = a - b``, ``a >= 0`` and ``b <= 0``: the
    expression is then homogeneous of degree zero and a grid over
    valuations ``[-radius, radius]**2`` sees every ratio up to ``p**(2 radius)``.
    Outside those conditions the supremum is infinite (take ``|x| = |y|``
    growing, or the ratio to 0 or infinity), and ``math.inf`` is returned.
    """
    p = as_base(base).p
    a, b, lam = float(a), float(b), float(lam)
    if abs(lam - (a - b)) > 1e-12 * max(1.0, abs(lam)) or a < 0 or b > 0:
        return math.inf
    v = np.arange(-radius, radius + 1, dtype=float)
    i, j = v[:, None], v[None, :]
    expo = a * i - b * j - lam * np.maximum(i, j)
    return float(p ** expo.max())
