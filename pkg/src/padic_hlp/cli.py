"""Command-line front end.

Every numeric flag accepts integers, decimals, ``a/b`` rationals and, for
``--q``/``--r``, the literal ``inf``. Values are parsed to exact Fractions,
so the balance test stays exact end to end, and the original strings are
echoed back unchanged in the output header.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction

from .analysis import (Status, check_boundedness, exact_norm_endpoint, optimize_schur_bound,
                       sharp_norm, sharp_norm_terms)
from .errors import NotAvailableError, PadicHLPError, WrongRegimeError
from .estimation import (DEFAULT_EPS, _num, estimate_norm, family_ratio, matrix_norm_lower,
                         sweep_depth)
from .operator import KernelParams, SpaceParams, build_matrix
from .padic_core import PrimeBase, digit_expansion, padic_norm, valuation
from .radial import ValuationWindow, is_inf, parse_exponent

SCHEMA = "padic-hlp/1"

EXIT_BOUNDED = 0
EXIT_UNBOUNDED = 1
EXIT_OUT_OF_SCOPE = 2
EXIT_NOT_AVAILABLE = 3
EXIT_USAGE = 64

_STATUS_EXIT = {Status.BOUNDED: EXIT_BOUNDED, Status.UNBOUNDED: EXIT_UNBOUNDED,
                Status.OUT_OF_SCOPE: EXIT_OUT_OF_SCOPE}

PARAMS = ("lambda", "mu", "nu", "q", "r", "alpha", "beta")

SWEEP_COLUMNS = ("index", "p", "lambda", "mu", "nu", "q", "r", "alpha", "beta", "eps",
                 "verdict", "citation", "tau", "closed_form", "schur_bound",
                 "matrix_lower", "extremal_ratio")

SWEEP_HELP = """\
CSV columns, in order:
  index           grid position, 0-based
  p .. beta       parameters of the row, exactly as used (rationals as a/b)
  eps             family parameter when --vary eps, else empty
  verdict         Bounded | Unbounded | OutOfPaperScope
  citation        result that decides the verdict
  tau             balance residual (empty when out of scope)
  closed_form     sharp norm for bounded q = r, else empty
  schur_bound     optimised Schur upper bound for bounded q <= r < inf
  matrix_lower    truncated-matrix lower bound on the window (bounded rows)
  extremal_ratio  best power-family ratio over the eps schedule (q = r bounded);
                  with --vary eps, the ratio at that row's eps
Numbers are plain decimals; infinities are written as inf.
Rows are computed in parallel; PADIC_HLP_THREADS caps the worker count (0 = auto).
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors exit with 64 instead of 2.

    Negative fractions such as -1/4 are read as values, not option flags.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r"^-(\d+(/\d+)?|\d*\.\d+(e-?\d+)?)$")

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _exponent(text: str):
    try:
        return parse_exponent(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not an exponent (rational or inf): {text!r}") from None


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return repr(float(x)) if isinstance(x, float) else str(x)


@dataclass
class RunConfig:
    """Parameters of one run, kept as the strings the user typed."""

    p: int = 2
    params: dict = field(default_factory=lambda: {"lambda": "1", "mu": "0", "nu": "0",
                                                  "q": "2", "r": "2", "alpha": "0",
                                                  "beta": "0"})
    window: int = 40
    tol: float = 1e-12
    eps: list = field(default_factory=lambda: [repr(e) for e in DEFAULT_EPS])
    format: str = "json"
    out: str | None = None

    def validate(self):
        try:
            PrimeBase(self.p)
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        self.kernel()
        self.space()
        if self.window < 1:
            raise UsageError("--window must be at least 1")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if any(not e > 0 for e in self.eps_values()):
            raise UsageError("eps values must be positive")
        if self.format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")
        return self

    def kernel(self) -> KernelParams:
        v = self.params
        return KernelParams(_rational(v["lambda"]), _rational(v["mu"]), _rational(v["nu"]))

    def space(self) -> SpaceParams:
        v = self.params
        return SpaceParams(_exponent(v["q"]), _exponent(v["r"]),
                           _rational(v["alpha"]), _rational(v["beta"]))

    def eps_values(self) -> list[float]:
        return [float(_rational(e)) for e in self.eps]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(p=int(d["p"]), params=dict(d["params"]), window=int(d["window"]),
                   tol=float(d["tol"]), eps=list(d["eps"]), format=d["format"], out=d["out"])

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        params = {name: getattr(ns, name) for name in PARAMS}
        eps = ns.eps.split(",") if ns.eps else [repr(e) for e in DEFAULT_EPS]
        return cls(p=ns.p, params=params, window=ns.window, tol=ns.tol,
                   eps=[e.strip() for e in eps], format=ns.format, out=ns.out).validate()


# -- commands ----------------------------------------------------------------

def _envelope(command: str, cfg: RunConfig, result: dict) -> dict:
    return {"schema": SCHEMA, "command": command, "config": cfg.to_dict(), "result": result}


def cmd_check(cfg: RunConfig):
    v = check_boundedness(cfg.kernel(), cfg.space(), cfg.p)
    return _STATUS_EXIT[v.status], _envelope("check", cfg, v.to_dict())


def cmd_norm(cfg: RunConfig):
    k, s = cfg.kernel(), cfg.space()
    v = check_boundedness(k, s, cfg.p)
    result = {"verdict": v.to_dict()}
    if not v.bounded:
        result["error"] = f"operator is {v.status.value}; it has no finite norm"
        return _STATUS_EXIT[v.status], _envelope("norm", cfg, result)
    try:
        terms = sharp_norm_terms(k, s, cfg.p)
    except NotAvailableError as exc:
        result["error"] = str(exc)
        return EXIT_NOT_AVAILABLE, _envelope("norm", cfg, result)
    result["norm"] = terms.value
    result["terms"] = terms.to_dict()
    if is_inf(s.q) or s.r == 1:
        result["endpoint_norm"] = _num(exact_norm_endpoint(k, s, cfg.p))
    return EXIT_BOUNDED, _envelope("norm", cfg, result)


def cmd_estimate(cfg: RunConfig):
    report = estimate_norm(cfg.kernel(), cfg.space(), cfg.p,
                           window=ValuationWindow.symmetric(cfg.window), tol=cfg.tol,
                           eps_schedule=cfg.eps_values())
    return 0, _envelope("estimate", cfg, report.to_dict())


def _solve(cfg: RunConfig, target: str) -> RunConfig:
    """Rebalance by solving the balance condition for ``alpha`` or ``lambda``."""
    k, s = cfg.kernel(), cfg.space()
    iq = 0 if is_inf(s.q) else Fraction(1) / s.q
    ir = 0 if is_inf(s.r) else Fraction(1) / s.r
    rest = k.mu + k.nu + 1 + ir * (s.beta + 1)
    params = dict(cfg.params)
    if target == "lambda":
        params["lambda"] = str(rest - iq * (s.alpha + 1))
    else:
        if iq == 0:
            raise UsageError("cannot solve for alpha when q = inf")
        params["alpha"] = str((rest - k.lam) / iq - 1)
    return replace(cfg, params=params)


def _grid(start: Fraction, stop: Fraction, steps: int, geometric: bool) -> list:
    if steps < 1:
        raise UsageError("--steps must be at least 1")
    if steps > 1 and start == stop:
        raise UsageError("empty range: --start equals --stop")
    if steps == 1:
        return [start]
    if geometric:
        if start <= 0 or stop <= 0:
            raise UsageError("a geometric grid needs positive endpoints")
        ratio = (float(stop) / float(start)) ** (1.0 / (steps - 1))
        return [float(start) * ratio**i for i in range(steps)]
    h = (stop - start) / (steps - 1)
    return [start + i * h for i in range(steps)]


def _sweep_row(index, cfg: RunConfig, eps, depth):
    k, s = cfg.kernel(), cfg.space()
    v = check_boundedness(k, s, cfg.p)
    row = dict.fromkeys(SWEEP_COLUMNS, "")
    row.update(index=index, p=cfg.p, verdict=v.status.value, citation=v.citation,
               tau=_fmt(v.tau), eps="" if eps is None else _fmt(float(eps)))
    row.update({name: cfg.params[name] for name in PARAMS})
    if not v.bounded:
        return row
    try:
        row["closed_form"] = _fmt(sharp_norm(k, s, cfg.p))
    except NotAvailableError:
        pass
    if not is_inf(s.q) and not is_inf(s.r):
        row["schur_bound"] = _fmt(optimize_schur_bound(k, s, cfg.p).bound)
    M = build_matrix(k, s, ValuationWindow.symmetric(cfg.window), cfg.p)
    row["matrix_lower"] = _fmt(matrix_norm_lower(M, s.q, s.r, tol=cfg.tol).value)
    if not is_inf(s.q) and s.q == s.r:
        schedule = [eps] if eps is not None else cfg.eps_values()
        ratios = [family_ratio(k, s, cfg.p, e, depth, 2) for e in schedule]
        row["extremal_ratio"] = _fmt(max(ratios))
    return row


def thread_count() -> int:
    raw = os.environ.get("PADIC_HLP_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"PADIC_HLP_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise UsageError("PADIC_HLP_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def cmd_sweep(cfg: RunConfig, vary: str, start: str, stop: str, steps: int,
              solve: str | None = None, geometric: bool = False):
    if solve is not None and solve == vary:
        raise UsageError("--solve must name a parameter other than --vary")
    lo, hi = _rational(start), _rational(stop)
    grid = _grid(lo, hi, steps, geometric)
    configs, eps_values = [], []
    for x in grid:
        if vary == "eps":
            if not x > 0:
                raise UsageError("eps must stay positive over the range")
            c, e = cfg, float(x)
        else:
            c = replace(cfg, params={**cfg.params, vary: _fmt(x)})
            if solve:
                c = _solve(c, solve)
            c.validate()
            e = None
        configs.append(c)
        eps_values.append(e)
    schedule = [e for e in eps_values if e is not None] or cfg.eps_values()
    depth = sweep_depth(schedule)
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        rows = list(pool.map(_sweep_row, range(len(configs)), configs, eps_values,
                             [depth] * len(configs)))
    return 0, rows


def cmd_digits(x: str, p: int, n: int) -> str:
    g, digits = digit_expansion(_rational(x), p, n)
    return f"valuation {g}\ndigits {' '.join(map(str, digits))}"


def cmd_norm_of(x: str, p: int) -> str:
    v = _rational(x)
    g = valuation(v, p)
    return f"|{v}|_{p} = {padic_norm(v, p)} (valuation {'inf' if g == math.inf else g})"


# -- argument parsing --------------------------------------------------------

def _add_point_flags(sp: argparse.ArgumentParser):
    sp.add_argument("--p", type=int, default=2, help="prime (default 2)")
    sp.add_argument("--lambda", dest="lambda", default="1", help="kernel exponent lambda")
    sp.add_argument("--mu", default="0")
    sp.add_argument("--nu", default="0")
    sp.add_argument("--q", default="2", help="source exponent, rational or inf")
    sp.add_argument("--r", default="2", help="target exponent, rational or inf")
    sp.add_argument("--alpha", default="0", help="source weight")
    sp.add_argument("--beta", default="0", help="target weight")
    sp.add_argument("--window", type=int, default=40,
                    help="matrix window half-width in valuations (default 40)")
    sp.add_argument("--tol", type=float, default=1e-12, help="power-iteration tolerance")
    sp.add_argument("--eps", default=None,
                    help="comma-separated eps schedule (default 2^-1,...,2^-12)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", default=None, help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="padic-hlp",
                 description="Boundedness and norms of p-adic Hardy-Littlewood-Polya operators.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("check", help="boundedness verdict (exit 0/1/2)")
    _add_point_flags(sp)
    sp = sub.add_parser("norm", help="closed-form norm (exit 3 if none is known)")
    _add_point_flags(sp)
    sp = sub.add_parser("estimate", help="closed form, Schur bound and lower bounds")
    _add_point_flags(sp)
    sp = sub.add_parser("sweep", help="one CSV row per grid point",
                        epilog=SWEEP_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_point_flags(sp)
    sp.add_argument("--vary", required=True, choices=PARAMS + ("eps",))
    sp.add_argument("--start", required=True)
    sp.add_argument("--stop", required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--solve", choices=("alpha", "lambda"), default=None,
                    help="re-solve the balance condition for this parameter at each point")
    sp.add_argument("--geometric", action="store_true", help="geometric instead of linear grid")
    sp.set_defaults(format="csv")

    sp = sub.add_parser("digits", help="canonical p-adic digit expansion of a rational")
    sp.add_argument("x")
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--n", type=int, default=10, help="number of digits")
    sp = sub.add_parser("norm-of", help="p-adic norm of a rational")
    sp.add_argument("x")
    sp.add_argument("--p", type=int, default=2)
    return ap


def _rows_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _flat_csv(payload: dict) -> str:
    # one key/value line per scalar, dotted paths for nesting
    lines = []

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for key, val in obj.items():
                walk(f"{prefix}.{key}" if prefix else key, val)
        elif isinstance(obj, list):
            for i, val in enumerate(obj):
                walk(f"{prefix}.{i}", val)
        else:
            lines.append((prefix, "" if obj is None else obj))

    walk("", payload)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("key", "value"))
    w.writerows(lines)
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        if ns.command == "digits":
            PrimeBase(ns.p)
            if ns.n < 1:
                raise UsageError("--n must be at least 1")
            print(cmd_digits(ns.x, ns.p, ns.n))
            return 0
        if ns.command == "norm-of":
            PrimeBase(ns.p)
            print(cmd_norm_of(ns.x, ns.p))
            return 0
        cfg = RunConfig.from_args(ns)
        if ns.command == "sweep":
            code, rows = cmd_sweep(cfg, ns.vary, ns.start, ns.stop, ns.steps,
                                   ns.solve, ns.geometric)
            if cfg.format == "csv":
                text = _rows_csv(rows)
            else:
                payload = _envelope("sweep", cfg, {"vary": ns.vary, "start": ns.start,
                                                   "stop": ns.stop, "steps": ns.steps,
                                                   "solve": ns.solve, "rows": rows})
                text = json.dumps(payload, indent=2) + "\n"
        else:
            handler = {"check": cmd_check, "norm": cmd_norm, "estimate": cmd_estimate}
            code, payload = handler[ns.command](cfg)
            if cfg.format == "csv":
                text = _flat_csv(payload)
            else:
                text = json.dumps(payload, indent=2) + "\n"
        _emit(text, cfg.out)
        return code
    except UsageError as exc:
        print(f"padic-hlp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TypeError, ValueError, WrongRegimeError) as exc:
        # bad prime, zero input for digits, and similar malformed requests
        print(f"padic-hlp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PadicHLPError as exc:
        print(f"padic-hlp: error: {exc}", file=sys.stderr)
        return 70


if __name__ == "__main__":
    sys.exit(main())
