"""Numerical lower bounds on operator norms and divergence witnesses.

Upper bounds only ever come from closed forms and Schur certificates; every
number produced here is a lower bound, up to floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import (SchurCertificate, Status, Verdict, check_boundedness,
                       optimize_schur_bound, sharp_norm)
from .errors import (NotAvailableError, PadicHLPError,
                     WindowTooShallowError, WrongRegimeError)
from .operator import (_LOG_MAX, KernelParams, SpaceParams, _apply_log, build_matrix,
                       decay_exponents)
from .padic_core import as_base
from .radial import (ValuationWindow, conjugate, exponent_str, family_exponent, is_inf,
                     log_weighted_norm, lq_norm)

DEFAULT_EPS = tuple(2.0 ** -k for k in range(1, 13))
GROWTH_THRESHOLD = 4.0


@dataclass
class PowerResult:
    value: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)
    vector: np.ndarray | None = field(default=None, repr=False)


def _dual(v: np.ndarray, s: float) -> np.ndarray:
    # v**(s-1) for v >= 0, rescaled first so large exponents stay finite
    m = v.max()
    if m <= 0:
        return np.ones_like(v)
    return np.power(v / m, s - 1.0)


def matrix_norm_lower(M: np.ndarray, q, r, tol: float = 1e-12, max_iter: int = 20000,
                      x0: np.ndarray | None = None) -> PowerResult:
    """Lower bound on ``max ||M x||_r / ||x||_q`` for entrywise nonnegative ``M``.

    Closed forms handle the corners: ``q = 1`` (largest column ``r``-norm),
    ``q = inf`` (``||M 1||_r``) and ``r = inf`` (largest row ``q'``-norm).
    Otherwise the nonlinear power iteration
    ``x <- (M^T (M x)^(r-1))^(q'-1)`` runs. Its quotient never decreases,
    because each half step is a Hölder duality. The iteration stops when the
    relative gain drops below ``tol``. The quotient at every iterate is a
    valid lower bound, so hitting ``max_iter`` still returns one with
    ``converged = False``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError("M must be a matrix")
    if not np.all(np.isfinite(M)):
        return PowerResult(math.inf, 0, True, [math.inf])
    if np.any(M < 0):
        raise ValueError("matrix must be entrywise nonnegative")
    if q < 1 or r < 1:
        raise ValueError("exponents must be >= 1")

    if q == 1:
        cols = [lq_norm(M[:, j], r) for j in range(M.shape[1])]
        j = int(np.argmax(cols))
        x = np.zeros(M.shape[1])
        x[j] = 1.0
        return PowerResult(cols[j], 0, True, [cols[j]], x)
    if is_inf(q):
        x = np.ones(M.shape[1])
        v = lq_norm(M @ x, r)
        return PowerResult(v, 0, True, [v], x)
    if is_inf(r):
        qc = conjugate(q)
        rows = [lq_norm(M[i, :], qc) for i in range(M.shape[0])]
        v = max(rows)
        return PowerResult(v, 0, True, [v])

    q, r = float(q), float(r)
    qc_minus_1 = 1.0 / (q - 1.0)
    x = np.ones(M.shape[1]) if x0 is None else np.abs(np.asarray(x0, dtype=float))
    x = x / lq_norm(x, q)
    val = lq_norm(M @ x, r)
    history = [val]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        z = M.T @ _dual(M @ x, r)
        if not np.any(z > 0):
            converged = True
            break
        xn = _dual(z, 1.0 + qc_minus_1)
        xn = xn / lq_norm(xn, q)
        vn = lq_norm(M @ xn, r)
        history.append(vn)
        gain = vn - val
        if vn >= val:
            x, val = xn, vn
        if gain <= tol * max(val, 1e-300):
            converged = True
            break
    return PowerResult(val, it, converged, history, x)


def matrix_lower_ladder(k: KernelParams, s: SpaceParams, base, windows, tol=1e-12,
                        max_iter=20000) -> list[tuple[ValuationWindow, PowerResult]]:
    """Matrix lower bounds on a chain of nested windows.

    Each window warm-starts from the previous maximiser padded with zeros.
    The padded vector already achieves the previous quotient, so the
    sequence is non-decreasing.
    """
    out = []
    prev = None
    for w in windows:
        M = build_matrix(k, s, w, base)
        x0 = None
        if prev is not None and prev[1].vector is not None and prev[1].vector.size == prev[0].size:
            pw, pres = prev
            if not (w.gmin <= pw.gmin and pw.gmax <= w.gmax):
                raise ValueError("ladder windows must be nested")
            x0 = np.zeros(w.size)
            x0[pw.gmin - w.gmin: pw.gmin - w.gmin + pw.size] = pres.vector
        res = matrix_norm_lower(M, s.q, s.r, tol=tol, max_iter=max_iter, x0=x0)
        if prev is not None and res.value < prev[1].value:
            # the smaller window's bound holds here too (submatrix); only rounding can undercut it
            res.value = prev[1].value
        out.append((w, res))
        prev = (w, res)
    return out


# -- extremal families -------------------------------------------------------

def sweep_depth(eps_schedule) -> int:
    return max(40, math.ceil(8.0 / min(eps_schedule)))


def family_ratio(k: KernelParams, s: SpaceParams, base, eps: float, depth: int,
                 kind: int = 2) -> float:
    """``||H f||_{r,beta} / ||f||_{q,alpha}`` for a truncated power family.

    The family is cut at valuation ``±depth`` and the image is measured on
    ``[-depth, depth]``. Both truncations only shrink the numerator for the
    given input, so the ratio stays a true lower bound.
    """
    base = as_base(base)
    lp = math.log(base.p)
    gam = np.arange(0, depth + 1) if kind == 2 else np.arange(-depth, 1)
    out = ValuationWindow.symmetric(depth).gammas
    # deep windows put the values far outside float range, so stay in logs
    logf = gam * family_exponent(kind, eps, s.q, s.alpha) * lp
    logh = math.log1p(-1.0 / base.p) + _apply_log(k, lp, gam, logf, out)
    num = log_weighted_norm(logh, out, base, s.r, s.beta)
    den = log_weighted_norm(logf, gam, base, s.q, s.alpha)
    if num - den > _LOG_MAX:
        return math.inf
    return math.exp(num - den)


def extremal_ratio_sweep(k: KernelParams, s: SpaceParams, base, eps_schedule=DEFAULT_EPS,
                         depth: int | None = None, kind: int = 2) -> list[tuple[float, float]]:
    """Lower bounds from the normalised power family as ``eps`` shrinks.

    Requires a bounded point with ``q = r`` finite. The default ``depth``
    is ``max(40, ceil(8/eps_min))`` valuations.
    """
    base = as_base(base)
    if is_inf(s.q) or s.q != s.r:
        raise WrongRegimeError("extremal sweep needs q = r < inf")
    if not check_boundedness(k, s, base).bounded:
        raise WrongRegimeError("extremal sweep needs a bounded point; use divergence_witness")
    eps_schedule = list(eps_schedule)
    if depth is None:
        depth = sweep_depth(eps_schedule)
    out = []
    for eps in eps_schedule:
        ratio = family_ratio(k, s, base, eps, depth, kind)
        # relative mass of the family lost past the far end of the window
        tail = float(base.p) ** (-eps * (depth + 1))
        if tail > 0.1:
            raise WindowTooShallowError(
                f"tail {tail:.3g} at eps={eps} exceeds 10% of the ratio; deepen the window")
        out.append((float(eps), ratio))
    return out


def growth_factor(base, q, r, eps) -> float:
    """``(1-1/p)^(1/r-1/q) (p^eps - 1)^(1/q) / (p^(r eps/q) - 1)^(1/r)``.

    Lower-bound factor for the normalised family in the ``r < q`` regime;
    it blows up like ``eps^(1/q - 1/r)``.
    """
    p = as_base(base).p
    q, r, eps = float(q), float(r), float(eps)
    return ((1 - 1 / p) ** (1 / r - 1 / q) * (p**eps - 1) ** (1 / q)
            / (p ** (r * eps / q) - 1) ** (1 / r))


@dataclass
class DivergenceReport:
    status: str
    method: str
    points: list
    growth: float
    threshold: float

    def to_dict(self) -> dict:
        return {"status": self.status, "method": self.method,
                "points": [[x, _num(y)] for x, y in self.points],
                "growth": _num(self.growth), "threshold": self.threshold}


def _family_kind(k, s, verdict: Verdict) -> int:
    a1, _ = decay_exponents(k, s)
    if verdict.tau is not None and float(verdict.tau) < 0:
        return 1
    if abs(float(a1)) <= 1e-12:
        return 1  # mu + 1 - (alpha+1)/q = 0: mass piles up at the origin
    return 2


def divergence_witness(k: KernelParams, s: SpaceParams, base, windows=None, eps_schedule=None,
                       method: str | None = None, threshold: float = GROWTH_THRESHOLD,
                       kind: int | None = None) -> DivergenceReport:
    """Watch lower bounds grow where the operator should be unbounded.

    ``method="matrix"`` runs truncated-matrix lower bounds over nested
    symmetric windows of the given half-widths. ``method="family"`` uses the
    power-family ratios as ``eps`` shrinks, with depth ``8/eps`` per point.
    ``method="factor"`` evaluates the closed-form growth factor of the
    normalised family for ``r < q``. The default is the factor for finite
    ``r < q``, the family for other finite exponents at exact balance, and
    the matrix otherwise. ``Confirmed`` means last/first reached
    ``threshold``; anything less is reported as ``Inconclusive``.
    """
    base = as_base(base)
    verdict = check_boundedness(k, s, base)
    balanced = verdict.tau is not None and abs(float(verdict.tau)) <= 1e-12
    finite = not is_inf(s.q) and not is_inf(s.r)
    if method is None:
        if finite and s.r < s.q:
            method = "factor"
        else:
            method = "family" if (balanced and finite) else "matrix"
    points = []
    if method == "factor":
        if not (finite and 1 <= s.r < s.q):
            raise WrongRegimeError("the growth factor applies to 1 <= r < q < inf")
        eps_schedule = list(eps_schedule or [2.0**-j for j in (4, 6, 8, 10, 12)])
        points = [(float(e), growth_factor(base, s.q, s.r, e)) for e in eps_schedule]
    elif method == "family":
        if is_inf(s.q):
            raise WrongRegimeError("power families need a finite source exponent")
        eps_schedule = list(eps_schedule or [2.0**-j for j in (2, 4, 6, 8, 10, 12)])
        if kind is None:
            kind = _family_kind(k, s, verdict)
        for eps in eps_schedule:
            ratio = family_ratio(k, s, base, eps, sweep_depth([eps]), kind)
            points.append((float(eps), ratio))
    elif method == "matrix":
        windows = list(windows or [8, 16, 32, 64, 128, 256])
        ladder = matrix_lower_ladder(k, s, base, [ValuationWindow.symmetric(w) for w in windows],
                                     tol=1e-9, max_iter=2000)
        points = [(w.gmax, res.value) for w, res in ladder]
    else:
        raise ValueError(f"unknown method {method!r}")
    first, last = points[0][1], points[-1][1]
    if math.isinf(last):
        growth = math.inf
    elif first > 0:
        growth = last / first
    else:
        growth = math.inf if last > 0 else 1.0
    status = "Confirmed" if growth >= threshold else "Inconclusive"
    return DivergenceReport(status, method, points, growth, threshold)


# -- full report -------------------------------------------------------------

@dataclass
class MatrixLower:
    value: float
    window: ValuationWindow
    iterations: int
    tolerance: float
    converged: bool

    def to_dict(self) -> dict:
        return {"value": _num(self.value), "gamma_min": self.window.gmin,
                "gamma_max": self.window.gmax, "iterations": self.iterations,
                "tolerance": self.tolerance, "converged": self.converged}


@dataclass
class NormReport:
    verdict: Verdict
    closed_form: float | None = None
    schur: SchurCertificate | None = None
    matrix_lower: MatrixLower | None = None
    extremal_lowers: list = field(default_factory=list)
    divergence: DivergenceReport | None = None
    notes: list = field(default_factory=list)

    @property
    def schur_bound(self) -> float | None:
        return None if self.schur is None else self.schur.bound

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.to_dict(),
            "closed_form": _num(self.closed_form),
            "schur_bound": _num(self.schur_bound),
            "schur": None if self.schur is None else self.schur.to_dict(),
            "matrix_lower": None if self.matrix_lower is None else self.matrix_lower.to_dict(),
            "extremal_lowers": [[e, _num(v)] for e, v in self.extremal_lowers],
            "divergence": None if self.divergence is None else self.divergence.to_dict(),
            "notes": list(self.notes),
        }


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf"
    return x


def estimate_norm(k: KernelParams, s: SpaceParams, base,
                  window: ValuationWindow = ValuationWindow(-40, 40), tol: float = 1e-12,
                  eps_schedule=DEFAULT_EPS, schur_resolution: int = 33,
                  extremal: bool = True) -> NormReport:
    """Collect everything known about one parameter point.

    Bounded points get the closed form (``q = r``), the optimised Schur
    bound (``q <= r < inf``), a matrix lower bound on ``window`` and, for
    ``q = r < inf``, the extremal sweep. Unbounded points get a divergence
    witness instead.
    """
    base = as_base(base)
    verdict = check_boundedness(k, s, base)
    report = NormReport(verdict)
    if verdict.status is Status.OUT_OF_SCOPE:
        report.notes.append("exponents outside [1, inf]; nothing to estimate")
        return report
    if not verdict.bounded:
        try:
            report.divergence = divergence_witness(k, s, base)
        except PadicHLPError as exc:
            report.notes.append(f"divergence witness unavailable: {exc}")
        return report

    try:
        report.closed_form = sharp_norm(k, s, base)
    except NotAvailableError as exc:
        report.notes.append(f"closed form: {exc}")
    if not is_inf(s.r) and not is_inf(s.q):
        report.schur = optimize_schur_bound(k, s, base, resolution=schur_resolution)
    M = build_matrix(k, s, window, base)
    res = matrix_norm_lower(M, s.q, s.r, tol=tol)
    report.matrix_lower = MatrixLower(res.value, window, res.iterations, tol, res.converged)
    if not res.converged:
        report.notes.append("matrix iteration hit max_iter; value is still a lower bound")
    if extremal and not is_inf(s.q) and s.q == s.r:
        report.extremal_lowers = extremal_ratio_sweep(k, s, base, eps_schedule)
    return report


def describe_space(s: SpaceParams) -> str:
    return f"L^{exponent_str(s.q)}_{s.alpha} -> L^{exponent_str(s.r)}_{s.beta}"
