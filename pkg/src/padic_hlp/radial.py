"""Radial functions on Q_p^* over a finite window of valuations.

A radial function takes one value per sphere ``|x|_p = p**g``, so it is
stored as a dense coefficient array indexed by ``g`` in a window
``[gmin, gmax]``; the function is zero outside the window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from .errors import BadWindowError
from .padic_core import PrimeBase, as_base

Exponent = Union[int, float, Fraction]


# -- extended exponents ------------------------------------------------------

def is_inf(q: Exponent) -> bool:
    return isinstance(q, float) and math.isinf(q)


def parse_exponent(text: str | Exponent) -> Exponent:
    """``"inf"`` becomes ``math.inf``; everything else an exact Fraction."""
    if not isinstance(text, str):
        return text
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo", "+inf"):
        return math.inf
    return Fraction(t)


def recip(q: Exponent):
    """``1/q`` with ``1/inf = 0``; exact for rational ``q``."""
    if is_inf(q):
        return 0
    if isinstance(q, (int, Fraction)):
        return Fraction(1) / q
    return 1.0 / q


def conjugate(q: Exponent) -> Exponent:
    """Hölder conjugate ``q'`` with ``1/q + 1/q' = 1``."""
    if is_inf(q):
        return 1
    if q == 1:
        return math.inf
    if q < 1:
        raise ValueError(f"conjugate exponent undefined for q={q}")
    if isinstance(q, (int, Fraction)):
        return Fraction(q) / (Fraction(q) - 1)
    return q / (q - 1.0)


def exponent_str(q: Exponent) -> str:
    return "inf" if is_inf(q) else str(q)


# -- windows and functions ---------------------------------------------------

@dataclass(frozen=True)
class ValuationWindow:
    gmin: int
    gmax: int

    def __post_init__(self):
        if self.gmin > self.gmax:
            raise BadWindowError(f"empty window [{self.gmin}, {self.gmax}]")

    @classmethod
    def symmetric(cls, depth: int) -> "ValuationWindow":
        return cls(-depth, depth)

    @property
    def size(self) -> int:
        return self.gmax - self.gmin + 1

    @property
    def gammas(self) -> np.ndarray:
        return np.arange(self.gmin, self.gmax + 1)

    def __contains__(self, g) -> bool:
        return self.gmin <= g <= self.gmax

    def __len__(self):
        return self.size


def _sphere_log_weights(base: PrimeBase, gammas: np.ndarray, theta: float) -> np.ndarray:
    """log of ``(1 - 1/p) * p**(g*(theta+1))``: the weighted measure of each sphere."""
    p = base.p
    return math.log1p(-1.0 / p) + gammas * (float(theta) + 1.0) * math.log(p)


@dataclass(frozen=True)
class RadialFunction:
    """``f(x) = values[g - gmin]`` on ``|x|_p = p**g``, zero off the window."""

    base: PrimeBase
    window: ValuationWindow
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "base", as_base(self.base))
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.window.size,):
            raise ValueError(
                f"expected {self.window.size} values for window "
                f"[{self.window.gmin}, {self.window.gmax}], got shape {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, base, window: ValuationWindow, fn: Callable[[int], float]):
        return cls(base, window, [fn(int(g)) for g in window.gammas])

    @classmethod
    def zeros(cls, base, window: ValuationWindow):
        return cls(base, window, np.zeros(window.size))

    def at(self, g: int) -> float:
        """Value on the sphere of valuation ``g`` (0 outside the window)."""
        if g in self.window:
            return float(self.values[g - self.window.gmin])
        return 0.0

    def to_dict(self) -> dict:
        return {"p": self.base.p, "gamma_min": self.window.gmin,
                "gamma_max": self.window.gmax, "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "RadialFunction":
        return cls(PrimeBase(int(d["p"])),
                   ValuationWindow(int(d["gamma_min"]), int(d["gamma_max"])),
                   d["values"])


def indicator_ball(base, gamma: int, depth: int) -> RadialFunction:
    """Indicator of ``|x|_p <= p**gamma`` truncated to ``depth`` spheres below it."""
    w = ValuationWindow(gamma - depth, gamma)
    return RadialFunction(base, w, np.ones(w.size))


def indicator_sphere(base, gamma: int) -> RadialFunction:
    return RadialFunction(base, ValuationWindow(gamma, gamma), [1.0])


def integrate_radial(f: RadialFunction) -> float:
    """Haar integral over Q_p^*, summed sphere by sphere."""
    p = f.base.p
    return float((1.0 - 1.0 / p) * np.sum(np.power(float(p), f.window.gammas) * f.values))


def to_sequence_coords(f: RadialFunction, q: Exponent, theta) -> np.ndarray:
    """Coordinates ``u`` with ``||u||_q = ||f||_{q,theta}``.

    ``u_g = f_g * ((1-1/p) p**(g(theta+1)))**(1/q)``, evaluated in log space.
    """
    if is_inf(q):
        raise ValueError("sequence coordinates need a finite exponent")
    logw = _sphere_log_weights(f.base, f.window.gammas, theta) / float(q)
    # combine in log space so tiny values on huge spheres do not become 0 * inf
    with np.errstate(divide="ignore"):
        mag = np.log(np.abs(f.values))
    return np.sign(f.values) * np.exp(mag + logw)


def lq_norm(u: np.ndarray, q: Exponent) -> float:
    """Plain l^q norm, scaled by the max entry to stay in range."""
    a = np.abs(np.asarray(u, dtype=float))
    if a.size == 0:
        return 0.0
    m = a.max()
    if m == 0.0:
        return 0.0
    if is_inf(q):
        return float(m)
    q = float(q)
    return float(m * np.sum((a / m) ** q) ** (1.0 / q))


def log_weighted_norm(logabs: np.ndarray, gammas: np.ndarray, base, q: Exponent, theta) -> float:
    """``log ||f||_{q,theta}`` from ``log|f|`` on each sphere; -inf for f = 0."""
    logabs = np.asarray(logabs, dtype=float)
    if logabs.size == 0 or np.all(np.isneginf(logabs)):
        return -math.inf
    if is_inf(q):
        return float(logabs.max())
    q = float(q)
    t = q * logabs + _sphere_log_weights(as_base(base), np.asarray(gammas), theta)
    top = t.max()
    return float((top + math.log(np.sum(np.exp(t - top)))) / q)


def weighted_norm(f: RadialFunction, q: Exponent, theta) -> float:
    """``||f||_{q,theta}``; for ``q = inf`` the plain sup (theta is ignored)."""
    if is_inf(q):
        return float(np.max(np.abs(f.values))) if f.values.size else 0.0
    return lq_norm(to_sequence_coords(f, q, theta), q)


def weighted_inner(f: RadialFunction, g: RadialFunction, theta=0.0) -> float:
    """``∫ f g |x|_p**theta dx`` over the overlap of the two windows."""
    lo = max(f.window.gmin, g.window.gmin)
    hi = min(f.window.gmax, g.window.gmax)
    if lo > hi:
        return 0.0
    gam = np.arange(lo, hi + 1)
    fv = f.values[lo - f.window.gmin: hi - f.window.gmin + 1]
    gv = g.values[lo - g.window.gmin: hi - g.window.gmin + 1]
    return float(np.sum(np.exp(_sphere_log_weights(f.base, gam, theta)) * fv * gv))


# -- extremal families -------------------------------------------------------

def family_exponent(kind: int, eps, q, alpha) -> float:
    """Power of ``|x|_p`` in the extremal family of the given kind (1 or 2)."""
    sign = 1.0 if kind == 1 else -1.0
    return -(float(alpha) + 1.0) / float(q) + sign * float(eps) / float(q)


def family_constant(base, eps, q) -> float:
    """Normalising factor that gives the untruncated family unit norm."""
    p = as_base(base).p
    return ((1.0 - p ** (-float(eps))) / (1.0 - 1.0 / p)) ** (1.0 / float(q))


def extremal_family(kind: int, eps, q, alpha, window: ValuationWindow, base,
                    normalized: bool = False) -> RadialFunction:
    """Power-function family ``|x|_p**(-(alpha+1)/q ± eps/q)``.

    Kind 1 lives on ``|x|_p <= 1`` (``+eps``), kind 2 on ``|x|_p >= 1``
    (``-eps``). Values outside the support are zero even if the window
    extends past it.
    """
    base = as_base(base)
    if kind not in (1, 2):
        raise ValueError("kind must be 1 or 2")
    if not eps > 0:
        raise ValueError("eps must be positive")
    if is_inf(q):
        raise ValueError("extremal families need a finite exponent")
    if (kind == 1 and window.gmin > 0) or (kind == 2 and window.gmax < 0):
        raise BadWindowError("window misses the support of the family")
    g = window.gammas
    e = family_exponent(kind, eps, q, alpha)
    vals = np.exp(g * e * math.log(base.p))
    vals[(g > 0) if kind == 1 else (g < 0)] = 0.0
    if normalized:
        vals = vals * family_constant(base, eps, q)
    return RadialFunction(base, window, vals)


def family_norm_q(base, eps) -> float:
    """``||f||_{q,alpha}**q`` of the untruncated, unnormalised family."""
    p = as_base(base).p
    return (1.0 - 1.0 / p) / (1.0 - p ** (-float(eps)))


def family_tail(kind: int, eps, window: ValuationWindow, base) -> float:
    """Part of ``||f||_{q,alpha}**q`` lost by truncating the family to ``window``.

    The q-th power norm of the family on each sphere is ``(1-1/p) p**(-eps*|g|)``,
    so the lost mass is a geometric tail past the far end of the window.
    """
    p = as_base(base).p
    eps = float(eps)
    depth = -window.gmin if kind == 1 else window.gmax
    return (1.0 - 1.0 / p) * p ** (-eps * (depth + 1)) / (1.0 - p ** (-eps))
