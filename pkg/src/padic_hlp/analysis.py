"""Closed-form results for ``H_{lam,mu,nu}: L^q_alpha -> L^r_beta``.

Covers the basic radial integral, the boundedness decision over every
exponent pair, sharp norms where they are known, exact endpoint norms,
and Schur-test upper bounds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (DivergesError, InfeasibleFreeParamsError, NotAvailableError,
                     NotBoundedError, WrongRegimeError)
from .operator import KernelParams, SpaceParams, kernel_sup_bound
from .padic_core import as_base
from .radial import conjugate, is_inf, recip

FLOAT_TOL = 1e-9

THEOREM_1 = "Theorem 1"
THEOREM_2 = "Theorem 2"
THEOREM_3 = "Theorem 3"
THEOREM_4 = "Theorem 4"
THEOREM_5 = "Theorem 5"
REMARK_R_LT_Q = "Remark r<q"
NO_CITATION = "none"


# -- the basic radial integral -----------------------------------------------

def radial_integral_constant(a, lam, base) -> float:
    """``∫ |t|^a / max(1,|t|)^lam dt`` over Q_p^*.

    Raises :class:`DivergesError` unless ``a > -1`` and ``lam - a - 1 > 0``.
    """
    p = as_base(base).p
    a, lam = float(a), float(lam)
    sides = []
    if not a > -1:
        sides.append("origin")
    if not lam - a - 1 > 0:
        sides.append("infinity")
    if sides:
        raise DivergesError(sides, f"a={a}, lam={lam}")
    return (1 - 1 / p) * (1 + 1 / (p ** (a + 1) - 1) + 1 / (p ** (lam - a - 1) - 1))


def closed_form_I(a, lam, ynorm, base) -> float:
    """``I(y) = ∫ |x|^a / max(|x|,|y|)^lam dx``, which scales as ``|y|^(a+1-lam) I(1)``."""
    return radial_integral_constant(a, lam, base) * float(ynorm) ** (float(a) + 1 - float(lam))


# -- verdicts ----------------------------------------------------------------

class Status(str, enum.Enum):
    BOUNDED = "Bounded"
    UNBOUNDED = "Unbounded"
    OUT_OF_SCOPE = "OutOfPaperScope"


@dataclass(frozen=True)
class Condition:
    name: str
    relation: str
    satisfied: bool


@dataclass(frozen=True)
class Verdict:
    status: Status
    tau: Fraction | float | None
    conditions: tuple[Condition, ...]
    citation: str
    detail: str = ""
    exact: bool = True

    @property
    def bounded(self) -> bool:
        return self.status is Status.BOUNDED

    def to_dict(self) -> dict:
        tau = self.tau
        return {
            "status": self.status.value,
            "tau": None if tau is None else float(tau),
            "tau_exact": str(tau) if isinstance(tau, (int, Fraction)) else None,
            "exact": self.exact,
            "citation": self.citation,
            "detail": self.detail,
            "conditions": [{"name": c.name, "relation": c.relation,
                            "satisfied": c.satisfied} for c in self.conditions],
        }


class _Cmp:
    """Comparisons that are exact on rationals and tolerant on floats."""

    def __init__(self, exact: bool):
        self.exact = exact

    def _tol(self, a, b):
        return FLOAT_TOL * max(1.0, abs(float(a)), abs(float(b)))

    def eq(self, a, b) -> bool:
        if self.exact:
            return a == b
        return abs(float(a) - float(b)) <= self._tol(a, b)

    def lt(self, a, b) -> bool:
        if self.exact:
            return a < b
        return float(b) - float(a) > self._tol(a, b)

    def le(self, a, b) -> bool:
        return self.lt(a, b) or self.eq(a, b)


def _is_exact(*vals) -> bool:
    return all(isinstance(v, (int, Fraction)) or is_inf(v) for v in vals)


def balance_residual(k: KernelParams, s: SpaceParams):
    """``tau = mu + nu + 1 + (beta+1)/r - (alpha+1)/q - lam``; an infinite exponent drops its term."""
    return (k.mu + k.nu + 1 + recip(s.r) * (s.beta + 1)
            - recip(s.q) * (s.alpha + 1) - k.lam)


def check_boundedness(k: KernelParams, s: SpaceParams, base=None) -> Verdict:
    """Decide whether ``H`` maps ``L^q_alpha`` boundedly into ``L^r_beta``.

    The prime plays no role in the decision; ``base`` is accepted for
    signature symmetry with the other entry points.
    """
    q, r = s.q, s.r
    lam, mu, nu, alpha, beta = k.lam, k.mu, k.nu, s.alpha, s.beta
    exact = _is_exact(q, r, lam, mu, nu, alpha, beta)
    cmp = _Cmp(exact)

    if (not is_inf(q) and q < 1) or (not is_inf(r) and r < 1):
        return Verdict(Status.OUT_OF_SCOPE, None,
                       (Condition("exponents", "q >= 1 and r >= 1", False),),
                       NO_CITATION, "exponents below 1 are not treated", exact)

    r_lt_q = (is_inf(q) and not is_inf(r)) or (not is_inf(q) and not is_inf(r) and r < q)
    if r_lt_q:
        if r == 1 and not is_inf(q):
            why = "row integral is a power of |x|, never in L^{q'}"
        elif is_inf(q):
            why = "column integral is a power of |y|, never in L^r_beta"
        else:
            why = "normalised power family has unbounded image norm as eps -> 0"
        return Verdict(Status.UNBOUNDED, balance_residual(k, s),
                       (Condition("order", "q <= r", False),),
                       REMARK_R_LT_Q, why, exact)

    tau = balance_residual(k, s)
    balance = Condition("balance", "tau == 0", cmp.eq(tau, 0))

    if not is_inf(r):
        # 1 <= q <= r < inf
        lower = Condition("lower", "-r*nu < beta+1", cmp.lt(-r * nu, beta + 1))
        upper = Condition("upper", "beta+1 < r*(lam-nu)", cmp.lt(beta + 1, r * (lam - nu)))
        conds = (balance, lower, upper)
        cite = THEOREM_4 if q == r else THEOREM_1
        detail = ""
        if balance.satisfied and cmp.eq(-r * nu, beta + 1):
            detail = "boundary beta+1 = -r*nu (alpha+1 = q(mu+1-lam)) is unbounded"
        elif balance.satisfied and cmp.eq(beta + 1, r * (lam - nu)):
            detail = "boundary beta+1 = r(lam-nu) (alpha+1 = q(mu+1)) is unbounded"
    elif q == 1:
        conds = (balance,
                 Condition("lower", "mu-lam <= alpha", cmp.le(mu - lam, alpha)),
                 Condition("upper", "alpha <= mu", cmp.le(alpha, mu)))
        cite, detail = THEOREM_2, ""
    elif not is_inf(q):
        conds = (balance,
                 Condition("lower", "0 < nu", cmp.lt(0, nu)),
                 Condition("upper", "nu < lam", cmp.lt(nu, lam)))
        cite, detail = THEOREM_3, ""
    else:
        # sup_y ∫ k(x,y) dx < inf: the x-integral needs mu+1 > 0 and lam-mu-1 > 0,
        # which under lam = mu+nu+1 reads 0 < nu < lam
        conds = (balance,
                 Condition("lower", "0 < nu", cmp.lt(0, nu)),
                 Condition("upper", "nu < lam", cmp.lt(nu, lam)))
        cite, detail = THEOREM_5, ""

    ok = all(c.satisfied for c in conds)
    return Verdict(Status.BOUNDED if ok else Status.UNBOUNDED, tau, conds, cite, detail, exact)


# -- sharp and exact norms ---------------------------------------------------

@dataclass(frozen=True)
class SharpNorm:
    value: float
    prefactor: float
    term_a: float
    term_b: float
    exponent_a: float
    exponent_b: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def sharp_norm_terms(k: KernelParams, s: SpaceParams, base) -> SharpNorm:
    """Sharp norm for ``q = r`` (finite or infinite), with its geometric terms.

    ``(1-1/p) [1 + 1/(p^A - 1) + 1/(p^B - 1)]`` with
    ``A = mu + 1 - (alpha+1)/q`` and ``B = nu + (beta+1)/q``; for ``q = inf``
    these are ``mu + 1`` and ``nu``.
    """
    p = as_base(base).p
    v = check_boundedness(k, s, p)
    if not v.bounded:
        raise NotBoundedError(f"operator is {v.status.value} ({v.citation})")
    if s.q != s.r:
        raise NotAvailableError("no sharp constant is known for q < r; only bounds")
    iq = recip(s.q)
    ea = float(k.mu + 1 - iq * (s.alpha + 1))
    eb = float(k.nu + iq * (s.beta + 1))
    c = 1 - 1 / p
    ta, tb = 1 / (p**ea - 1), 1 / (p**eb - 1)
    return SharpNorm(c * (1 + ta + tb), c, ta, tb, ea, eb)


def sharp_norm(k: KernelParams, s: SpaceParams, base) -> float:
    return sharp_norm_terms(k, s, base).value


def exact_norm_endpoint(k: KernelParams, s: SpaceParams, base) -> float:
    """Exact norm through a single integral, or ``inf`` when that integral certifies unboundedness.

    * ``q = inf``: the norm is ``|| ∫ k(x, y) dx ||_{r,beta}`` (a function of ``y``).
    * ``q = r = 1``: the norm is ``sup_x |x|^(-alpha) ∫ k(x, y) |y|^beta dy``.
    * ``r = 1 < q < inf``: the row integral is a pure power of ``|x|``, so
      never in ``L^{q'}``; returns ``inf``.
    """
    p = as_base(base).p
    lam, mu, nu = k.lam, k.mu, k.nu
    cmp = _Cmp(_is_exact(lam, mu, nu, s.alpha, s.beta))
    if is_inf(s.q):
        try:
            c = radial_integral_constant(mu, lam, p)
        except DivergesError:
            return math.inf
        if not is_inf(s.r):
            return math.inf  # a power of |y| is never in L^r_beta(Q_p^*)
        return c if cmp.eq(nu + mu + 1 - lam, 0) else math.inf
    if s.r == 1:
        if s.q != 1:
            return math.inf
        try:
            c = radial_integral_constant(nu + s.beta, lam, p)
        except DivergesError:
            return math.inf
        return c if cmp.eq(mu - s.alpha + nu + s.beta + 1 - lam, 0) else math.inf
    raise WrongRegimeError("endpoint route needs q = inf or r = 1")


# -- Schur test --------------------------------------------------------------

@dataclass(frozen=True)
class SchurCertificate:
    case: str
    params: dict
    constants: dict
    bound: float

    def to_dict(self) -> dict:
        return {"case": self.case, "params": dict(self.params),
                "constants": dict(self.constants), "bound": self.bound}


def _require_schur_regime(k, s, base):
    if is_inf(s.q) or is_inf(s.r) or s.q > s.r:
        raise WrongRegimeError("Schur certificates cover 1 <= q <= r < inf")
    v = check_boundedness(k, s, base)
    if not v.bounded:
        raise NotBoundedError(f"operator is {v.status.value} ({v.citation})")


def case1_window(k: KernelParams, s: SpaceParams, t: float) -> tuple[float, float]:
    """Open interval of admissible ``A`` for Case I at a given ``t > 1``.

    Intersection of the two windows that make both inner integrals converge.
    """
    lam, mu, nu = float(k.lam), float(k.mu), float(k.nu)
    q, r, beta = float(s.q), float(s.r), float(s.beta)
    iqc = 1 - 1 / q  # 1/q'
    is_ = 1 - 1 / t  # 1/s
    g = (beta + 1) / r + nu
    lo = max(-iqc - mu * is_, -g - mu * is_ - iqc + lam * is_)
    hi = min(-iqc - mu * is_ + lam * is_, -g - mu * is_ - iqc + lam)
    return lo, hi


def case2_window(k: KernelParams, s: SpaceParams, s_param: float) -> tuple[float, float]:
    """Open interval of admissible ``D`` for Case II at a given ``s > 1``."""
    lam, nu = float(k.lam), float(k.nu)
    r, beta = float(s.r), float(s.beta)
    is_ = 1 / s_param
    it = 1 - is_
    g = (beta + 1) / r
    lo = max(-nu * it - g, (nu - lam) * is_)
    hi = min((lam - nu) * it - g, nu * is_)
    return lo, hi


def _case1(k, s, p, t, A) -> SchurCertificate:
    lam, mu, nu = float(k.lam), float(k.mu), float(k.nu)
    r, beta = float(s.r), float(s.beta)
    if not t > 1:
        raise InfeasibleFreeParamsError(f"t must exceed 1, got {t}")
    lo, hi = case1_window(k, s, t)
    if not lo < A < hi:
        raise InfeasibleFreeParamsError(f"A={A} outside ({lo}, {hi}) at t={t}")
    qc = float(conjugate(s.q))
    is_ = 1 - 1 / t
    sp = 1 / is_
    B = r * (nu * is_ + mu * is_ + A + 1 / qc - lam * is_)
    try:
        c1 = radial_integral_constant(mu * qc * is_ + A * qc, lam * qc * is_, p)
        c2 = radial_integral_constant(nu * r / t + B + beta, lam * r / t, p)
    except DivergesError as exc:
        raise InfeasibleFreeParamsError(str(exc)) from exc
    bound = c1 ** (1 / qc) * c2 ** (1 / r)
    return SchurCertificate("I", {"t": t, "s": sp, "A": A, "B": B},
                            {"C1": c1, "C2": c2}, bound)


def _case2(k, s, p, s_param, D) -> SchurCertificate:
    lam, nu = float(k.lam), float(k.nu)
    r, beta = float(s.r), float(s.beta)
    if not s_param > 1:
        raise InfeasibleFreeParamsError(f"s must exceed 1, got {s_param}")
    lo, hi = case2_window(k, s, s_param)
    if not lo < D < hi:
        raise InfeasibleFreeParamsError(f"D={D} outside ({lo}, {hi}) at s={s_param}")
    is_ = 1 / s_param
    it = 1 - is_
    c3 = kernel_sup_bound((lam - nu) * is_ + D, D - nu * is_, lam * is_, p)
    try:
        c4 = radial_integral_constant(r * nu * it + r * D + beta, lam * r * it, p)
    except DivergesError as exc:
        raise InfeasibleFreeParamsError(str(exc)) from exc
    bound = c3 * c4 ** (1 / r)
    return SchurCertificate("II", {"s": s_param, "t": 1 / it, "D": D},
                            {"C3": c3, "C4": c4}, bound)


def schur_upper_bound(k: KernelParams, s: SpaceParams, base, *, t=None, A=None,
                      s_param=None, D=None) -> SchurCertificate:
    """Schur-test bound at the given free parameters.

    ``q > 1`` uses Case I with ``(t, A)``; ``q = 1`` uses Case II with ``(s_param, D)``.
    """
    p = as_base(base).p
    _require_schur_regime(k, s, p)
    if s.q > 1:
        if t is None or A is None:
            raise InfeasibleFreeParamsError("Case I needs t and A")
        return _case1(k, s, p, float(t), float(A))
    if s_param is None or D is None:
        raise InfeasibleFreeParamsError("Case II needs s_param and D")
    return _case2(k, s, p, float(s_param), float(D))


def canonical_case1_point(k: KernelParams, s: SpaceParams) -> tuple[float, float]:
    """``t = q`` and ``A = -(alpha+1)/(q q')``, which make both constants sharp when ``q = r``."""
    q = float(s.q)
    return q, -(float(s.alpha) + 1) / (q * float(conjugate(s.q)))


_GOLDEN = (math.sqrt(5) - 1) / 2


def _golden_min(fn, lo, hi, xtol=1e-13, max_iter=200):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    return (c, fc) if fc <= fd else (d, fd)


def optimize_schur_bound(k: KernelParams, s: SpaceParams, base, resolution: int = 33,
                         margin: float = 1e-6, refine: bool = True,
                         sweeps: int = 60) -> SchurCertificate:
    """Smallest Schur bound over the admissible free parameters.

    The region is parametrised as ``u = 1/t`` (Case I) or ``u = 1/s``
    (Case II) in ``(0, 1)``, and a fraction ``w`` in ``(0, 1)`` of the open
    ``A`` or ``D`` interval at that ``u``. Both are clamped inward by
    ``margin``. A ``resolution x resolution`` grid picks a start point;
    alternating golden-section searches on ``u`` and ``w`` then refine it.
    Grids with ``resolution = 2**j + 1`` are nested, so the unrefined
    result never increases as ``j`` grows.
    """
    p = as_base(base).p
    _require_schur_regime(k, s, p)
    case1 = s.q > 1

    def cert(u, w):
        if case1:
            t = 1 / u
            lo, hi = case1_window(k, s, t)
            return _case1(k, s, p, t, lo + w * (hi - lo))
        sp = 1 / u
        lo, hi = case2_window(k, s, sp)
        return _case2(k, s, p, sp, lo + w * (hi - lo))

    def value(u, w):
        try:
            return cert(u, w).bound
        except InfeasibleFreeParamsError:
            return math.inf

    lo_c, hi_c = margin, 1 - margin
    n = max(2, int(resolution))
    grid = [lo_c + (hi_c - lo_c) * i / (n - 1) for i in range(n)]
    best = (math.inf, grid[0], grid[0])
    for u in grid:
        for w in grid:
            v = value(u, w)
            if v < best[0]:
                best = (v, u, w)
    if not math.isfinite(best[0]):
        raise InfeasibleFreeParamsError("no admissible grid point gives a finite bound")

    if refine:
        val, u, w = best
        step = (hi_c - lo_c) / (n - 1)
        for _ in range(sweeps):
            prev = val
            u_lo, u_hi = max(lo_c, u - step), min(hi_c, u + step)
            u2, v2 = _golden_min(lambda x: value(x, w), u_lo, u_hi)
            if v2 < val:
                u, val = u2, v2
            w_lo, w_hi = max(lo_c, w - step), min(hi_c, w + step)
            w2, v2 = _golden_min(lambda x: value(u, x), w_lo, w_hi)
            if v2 < val:
                w, val = w2, v2
            step = max(step * 0.5, 1e-9)
            if prev - val <= 1e-16 * val and step <= 1e-8:
                break
        best = (val, u, w)
    return cert(best[1], best[2])
