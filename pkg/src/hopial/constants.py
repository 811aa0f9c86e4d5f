"""Per-theorem multiplicative constants with factor-level breakdowns.

Each Hardy-type bound in the catalog has the shape

    LHS(f)  <=  constant(r, s, exponents, interval) * RHS(f),

and this module computes the constant as a product of named factors.  Odd
theorem numbers integrate f from the left endpoint and use the tail
integral R(x,b); their even partners mirror everything through R(a,x).

Two evaluation modes exist for the handful of catalog entries whose
typeset constant differs from the one their derivation supports
("as_printed" vs "as_derived"); everywhere else the modes coincide.  The
default mode is as_printed except where the printed form is vacuous
(the Beesack k = q substitution) or where the printed special-function
form drops an exponent (the L-based constants); see DEFAULT_MODES.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import eigen
from . import funcspace as fs
from . import quad
from . import special
from .errors import (
    DomainError,
    NoCrossing,
    NonIntegrable,
    PreconditionFailed,
)

__all__ = [
    "ExponentSet",
    "ConstantBreakdown",
    "THEOREM_IDS",
    "DEFAULT_MODES",
    "theorem_info",
    "canonical_id",
    "r_tail",
    "r_head",
    "WeightIntegral",
    "hardy_constant",
    "beesack_das_K1",
    "beesack_das_K2",
    "beesack_das_balance",
    "beesack_K",
]


@dataclass(frozen=True)
class ExponentSet:
    """Exponent parameters (p, q, k) of a theorem instance.

    q defaults to the Hoelder conjugate of p where a theorem requires
    1/p + 1/q = 1.  k is the extra integrability exponent of the Boyd- and
    Beesack-based entries (the theorem's free "s" resp. "k").
    """

    p: Optional[float] = None
    q: Optional[float] = None
    k: Optional[float] = None
    conjugate_check: bool = True


def _need_p(e: ExponentSet, cond: str = "p required") -> float:
    if e.p is None:
        raise PreconditionFailed(cond)
    return float(e.p)


def _conjugate_pair(e: ExponentSet):
    p = _need_p(e, "p > 1 with 1/p + 1/q = 1 required")
    if p <= 1:
        raise PreconditionFailed(f"p > 1 required, got p={p}")
    q = float(e.q) if e.q is not None else p / (p - 1.0)
    if e.conjugate_check and abs(1.0 / p + 1.0 / q - 1.0) > 1e-12:
        raise PreconditionFailed(f"1/p + 1/q = 1 violated (p={p}, q={q})")
    return p, q


def _positive_integer_p(e: ExponentSet, minimum: int = 1) -> float:
    p = _need_p(e, "positive integer p required")
    if not (float(p).is_integer() and p >= minimum):
        raise PreconditionFailed(f"p must be an integer >= {minimum}, got {p}")
    return float(p)


@dataclass(frozen=True)
class ConstantBreakdown:
    """A constant as the product of named factors.

    value == prod(factor values) to 1e-12 relative.  error_estimate is
    relative.  rhs_weight names a weight the verifier must fold into the
    right-hand-side integrand (the catalog entries whose bound carries
    R inside the RHS integral).
    """

    value: float
    factors: tuple
    mode: str
    error_estimate: float
    rhs_weight: Optional[str] = None

    def __post_init__(self):
        prod = 1.0
        for _, v in self.factors:
            prod *= v
        if not (self.value > 0 and math.isfinite(self.value)):
            raise DomainError(f"constant must be positive finite, got {self.value}")
        if abs(prod - self.value) > 1e-12 * abs(self.value):
            raise DomainError("factor product does not reproduce the constant")


# ---------------------------------------------------------------------------
# weight tail/head integrals
# ---------------------------------------------------------------------------


class WeightIntegral:
    """R(x,b) (side="tail") or R(a,x) (side="head") for a weight r.

    Uses the closed antiderivative when the catalog provides one (exact,
    zero extra error); otherwise a cumulative table whose query error is
    tracked.
    """

    def __init__(self, r, interval: fs.Interval, side: str, tol=None):
        if side not in ("tail", "head"):
            raise DomainError(f"side must be tail|head, got {side}")
        self.side = side
        self.interval = interval
        if callable(r):
            self.spec = None
        else:
            self.spec = (
                fs.tail_integral_spec(r, interval)
                if side == "tail"
                else fs.head_integral_spec(r, interval)
            )
        if self.spec is not None:
            self._fn = fs.compile_program(self.spec, interval)
            self.rel_error = 0.0
        else:
            table = quad.cumulative(r, interval, 128, tol)
            total = table.value_at(interval.b)
            if side == "tail":
                self._fn = lambda xs: total - table(xs)
            else:
                self._fn = table
            self.rel_error = table.query_error / max(abs(total), 1e-300)

    def __call__(self, xs):
        return self._fn(np.asarray(xs, dtype=float))

    def value_at(self, x: float) -> float:
        return float(np.asarray(self._fn(np.array([float(x)])))[0])


def r_tail(r, x: float, interval: fs.Interval) -> float:
    """R(x, b) = integral of r from x to b."""
    if not interval.contains(x):
        raise DomainError(f"x={x} outside the interval")
    return WeightIntegral(r, interval, "tail").value_at(x)


def r_head(r, x: float, interval: fs.Interval) -> float:
    """R(a, x) = integral of r from a to x."""
    if not interval.contains(x):
        raise DomainError(f"x={x} outside the interval")
    return WeightIntegral(r, interval, "head").value_at(x)


# ---------------------------------------------------------------------------
# Beesack-Das constants K1, K2 and the balancing constant
# ---------------------------------------------------------------------------


def _inner_cumulative(s, gamma: float, interval: fs.Interval, side: str, tol):
    """Cumulative of s^gamma from the relevant endpoint, with rel error."""
    spec = None if callable(s) else fs.power_of(s, gamma)
    if spec is not None:
        kappa = fs.endpoint_exponent(
            spec, interval, "left" if side == "head" else "right"
        )
        if kappa <= -1.0:
            raise NonIntegrable(
                f"inner weight integral diverges (exponent {kappa:.3g})"
            )
        anti = fs.closed_antiderivative(spec, interval)
        if anti is not None:
            if side == "head":
                return fs.compile_program(anti, interval), 0.0
            tail = fs.tail_integral_spec(spec, interval)
            return fs.compile_program(tail, interval), 0.0
        target = spec
    else:
        def target(xs):
            return np.asarray(s(xs), dtype=float) ** gamma

    table = quad.cumulative(target, interval, 128, tol)
    total = table.value_at(interval.b)
    rel = table.query_error / max(abs(total), 1e-300)
    if side == "head":
        return table, rel
    return (lambda xs: total - table(xs)), rel


def _sub_bounds(sub):
    """K1/K2 accept an Interval or a possibly-degenerate (lo, hi) pair."""
    if isinstance(sub, fs.Interval):
        return sub.a, sub.b
    lo, hi = sub
    return float(lo), float(hi)


def _beesack_das_core(e, r, s, sub, full: fs.Interval, side: str, tol):
    """Shared K1/K2 evaluation; side="head" gives K1, "tail" gives K2."""
    if e.p is None or e.q is None:
        raise PreconditionFailed("K1/K2 need explicit positive p and q")
    p, q = float(e.p), float(e.q)
    if p <= 0 or q <= 0 or p + q <= 1:
        raise PreconditionFailed(f"p, q > 0 with p + q > 1 required (p={p}, q={q})")
    lo, hi = _sub_bounds(sub)
    if lo < full.a - 1e-12 or hi > full.b + 1e-12:
        raise DomainError("sub-interval must lie inside the full interval")
    sub = fs.Interval(lo, hi)
    tol = tol or quad.SMOOTH_TOL

    gamma = -1.0 / (p + q - 1.0)
    inner, inner_rel = _inner_cumulative(s, gamma, full, side, tol)

    r_prog = r if callable(r) else fs.compile_program(r, full)
    s_prog = s if callable(s) else fs.compile_program(s, full)
    er, es = (p + q) / p, -q / p

    def integrand(xs):
        inner_vals = np.maximum(np.asarray(inner(xs), dtype=float), 0.0)
        return (
            np.asarray(r_prog(xs), float) ** er
            * np.asarray(s_prog(xs), float) ** es
            * inner_vals ** (p + q - 1.0)
        )

    kappa_l = kappa_r = 0.0
    if not callable(r):
        kappa_l += er * fs.endpoint_exponent(r, full, "left")
        kappa_r += er * fs.endpoint_exponent(r, full, "right")
    if not callable(s):
        kappa_l += es * fs.endpoint_exponent(s, full, "left")
        kappa_r += es * fs.endpoint_exponent(s, full, "right")
    # the vanishing inner factor only regularizes; ignore its positive order

    outer = quad.integrate(
        integrand,
        sub,
        tol=tol,
        home=full,
        endpoint_exponents=(kappa_l, kappa_r),
        breakpoints=None if callable(s) else fs.breakpoints(s, full),
    )
    lead = (q / (p + q)) ** (q / (p + q))
    if outer.value <= 0.0:
        return 0.0, 0.0
    value = lead * outer.value ** (p / (p + q))
    rel = (p / (p + q)) * (outer.rel_error + inner_rel * (p + q - 1.0))
    return value, rel


def beesack_das_K1(e: ExponentSet, r, s, sub, full: fs.Interval,
                   tol=None) -> float:
    """K1(a, X, p, q): head-side Beesack-Das constant on sub = (a, X)."""
    lo, hi = _sub_bounds(sub)
    if hi - lo <= 0:
        return 0.0
    return _beesack_das_core(e, r, s, sub, full, "head", tol)[0]


def beesack_das_K2(e: ExponentSet, r, s, sub, full: fs.Interval,
                   tol=None) -> float:
    """K2(X, b, p, q): tail-side mirror on sub = (X, b)."""
    lo, hi = _sub_bounds(sub)
    if hi - lo <= 0:
        return 0.0
    return _beesack_das_core(e, r, s, sub, full, "tail", tol)[0]


def beesack_das_balance(e: ExponentSet, r, s, interval: fs.Interval,
                        tol: float = 1e-9):
    """The h with K1(a, h) = K2(h, b) and the common value K.

    K1 grows from 0 and K2 decays to 0, so a bisection on h finds the
    unique crossing; a 9-point monotonicity audit guards the hypothesis.
    """
    a, b = interval.a, interval.b

    def k1(h):
        return beesack_das_K1(e, r, s, fs.Interval(a, h), interval, tol=1e-10)

    def k2(h):
        return beesack_das_K2(e, r, s, fs.Interval(h, b), interval, tol=1e-10)

    probes = np.linspace(a, b, 11)[1:-1]
    k1_vals = [k1(float(h)) for h in probes]
    k2_vals = [k2(float(h)) for h in probes]
    if any(x1 < x0 - 1e-12 for x0, x1 in zip(k1_vals, k1_vals[1:])):
        raise NoCrossing("K1 is not nondecreasing in h")
    if any(x1 > x0 + 1e-12 for x0, x1 in zip(k2_vals, k2_vals[1:])):
        raise NoCrossing("K2 is not nonincreasing in h")
    g_lo = k1_vals[0] - k2_vals[0]
    g_hi = k1_vals[-1] - k2_vals[-1]
    if not (g_lo < 0 < g_hi):
        raise NoCrossing("K1 - K2 does not change sign inside the interval")

    lo, hi = float(probes[0]), float(probes[-1])
    while True:
        h = 0.5 * (lo + hi)
        v1, v2 = k1(h), k2(h)
        if abs(v1 - v2) <= tol * max(v1, v2):
            return h, 0.5 * (v1 + v2)
        if v1 < v2:
            lo = h
        else:
            hi = h
        if hi - lo < 1e-15 * interval.width:
            return h, 0.5 * (v1 + v2)


def beesack_K(e: ExponentSet, r, s, interval: fs.Interval, side: str = "left",
              substituted: bool = True, tol=None):
    """K1/K2(p, q, k) of the three-exponent Beesack bound.

    substituted=True evaluates the (pq, q, k) form used by the Hardy
    catalog (identical to the raw form with p replaced by pq); side
    selects the y(a)=0 ("left") or y(b)=0 ("right") variant.
    """
    if e.p is None or e.q is None or e.k is None:
        raise PreconditionFailed("beesack_K needs p, q and k")
    p, q, k = float(e.p), float(e.q), float(e.k)
    if not (k > 1 and p > 0 and 0 < q < k):
        raise PreconditionFailed(
            f"k > 1, p > 0 and 0 < q < k required (p={p}, q={q}, k={k})"
        )
    tol = tol or quad.SMOOTH_TOL
    p_eff = p * q if substituted else p

    gamma = -1.0 / (k - 1.0)
    inner_side = "head" if side == "left" else "tail"
    inner, inner_rel = _inner_cumulative(s, gamma, interval, inner_side, tol)

    r_prog = r if callable(r) else fs.compile_program(r, interval)
    s_prog = s if callable(s) else fs.compile_program(s, interval)
    er, es = k / (k - q), -q / (k - q)
    e_in = p_eff * (k - 1.0) / (k - q)

    def integrand(xs):
        inner_vals = np.maximum(np.asarray(inner(xs), dtype=float), 0.0)
        return (
            np.asarray(r_prog(xs), float) ** er
            * np.asarray(s_prog(xs), float) ** es
            * inner_vals**e_in
        )

    kappa_l = kappa_r = 0.0
    if not callable(r):
        kappa_l += er * fs.endpoint_exponent(r, interval, "left")
        kappa_r += er * fs.endpoint_exponent(r, interval, "right")
    if not callable(s):
        kappa_l += es * fs.endpoint_exponent(s, interval, "left")
        kappa_r += es * fs.endpoint_exponent(s, interval, "right")

    outer = quad.integrate(
        integrand,
        interval,
        tol=tol,
        endpoint_exponents=(kappa_l, kappa_r),
        breakpoints=None if callable(s) else fs.breakpoints(s, interval),
    )
    lead = (q / (q + p_eff)) ** (q / k)
    value = lead * outer.value ** ((k - q) / k)
    rel = ((k - q) / k) * (outer.rel_error + e_in * inner_rel)
    return value, rel


# ---------------------------------------------------------------------------
# theorem registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TheoremInfo:
    """Catalog entry: arity, orientation and the constant builder."""

    ident: str
    side: str  # "left": F integrates f from a; "right": from b
    needs_s: bool
    build: Callable  # (ctx) -> ConstantBreakdown
    check: Callable  # (ExponentSet) -> dict of resolved exponents
    lhs: tuple  # shape tag consumed by the verifier
    rhs: tuple
    modes_differ: bool = False


@dataclass
class _Ctx:
    r: object
    s: object
    e: ExponentSet
    interval: fs.Interval
    mode: str
    tol: float
    side: str
    exps: dict = field(default_factory=dict)

    _R: Optional[WeightIntegral] = None

    @property
    def R(self) -> WeightIntegral:
        if self._R is None:
            side = "tail" if self.side == "left" else "head"
            self._R = WeightIntegral(self.r, self.interval, side, self.tol)
        return self._R

    def r_spec(self):
        return None if callable(self.r) else self.r

    def s_spec(self):
        return None if callable(self.s) else self.s

    def integrate_spec(self, spec, tol=None, exponents=None):
        return quad.integrate(
            spec,
            self.interval,
            tol=tol or self.tol,
            endpoint_exponents=exponents,
        )

    def integrate_fn(self, fn, tol=None, exponents=None, breaks=None):
        return quad.integrate(
            fn,
            self.interval,
            tol=tol or self.tol,
            endpoint_exponents=exponents,
            breakpoints=breaks,
        )

    def sup_R(self) -> quad.SupResult:
        target = self.R.spec if self.R.spec is not None else self.R
        return quad.sup_on_interval(target, self.interval)

    def width(self) -> float:
        return self.interval.width


def _weight_power_integral(ctx: _Ctx, w, exponent: float, tol=None) -> quad.QuadResult:
    """integral of w(x)^exponent over the interval, w a spec or callable."""
    if callable(w):
        fn = lambda xs: np.asarray(w(xs), float) ** exponent
        return ctx.integrate_fn(fn, tol=tol)
    return ctx.integrate_spec(fs.power_of(w, exponent), tol=tol)


def _mixed_integral(ctx: _Ctx, parts, tol=None, exponents=None) -> quad.QuadResult:
    """integral of a product of (spec_or_callable, exponent) factors."""
    specs = []
    fns = []
    breaks: set = set()
    kappa_l = kappa_r = 0.0
    for w, ex in parts:
        if callable(w):
            fns.append((w, ex))
        else:
            specs.append(fs.power_of(w, ex))
            kappa_l += fs.endpoint_exponent(specs[-1], ctx.interval, "left")
            kappa_r += fs.endpoint_exponent(specs[-1], ctx.interval, "right")
            breaks.update(fs.breakpoints(w, ctx.interval))
    if exponents is not None:
        kappa_l, kappa_r = exponents
    specs = fs.merge_product(specs)
    if not fns:
        return ctx.integrate_spec(
            fs.Product(specs) if len(specs) > 1 else specs[0],
            tol=tol,
            exponents=(kappa_l, kappa_r),
        )
    progs = [fs.compile_program(sp, ctx.interval) for sp in specs]

    def fn(xs):
        out = np.ones_like(xs)
        for prog in progs:
            out = out * prog(xs)
        for w, ex in fns:
            out = out * np.asarray(w(xs), float) ** ex
        return out

    return ctx.integrate_fn(fn, tol=tol, exponents=(kappa_l, kappa_r),
                            breaks=sorted(breaks))


def _breakdown(ctx, factors, rel_err, rhs_weight=None):
    value = 1.0
    for _, v in factors:
        value *= v
    return ConstantBreakdown(value, tuple(factors), ctx.mode, rel_err, rhs_weight)


# -- individual builders -----------------------------------------------------


def _build_t2_1(ctx: _Ctx):
    res = _mixed_integral(ctx, [(ctx.R.spec if ctx.R.spec is not None else ctx.R, 2.0),
                                (ctx.s, -1.0)])
    name = "int R_tail^2/s" if ctx.side == "left" else "int R_head^2/s"
    return _breakdown(ctx, [(name, res.value)],
                      res.rel_error + 2 * ctx.R.rel_error)


def _build_t2_3(ctx: _Ctx):
    sup = ctx.sup_R()
    name = "sup R_tail" if ctx.side == "left" else "sup R_head"
    return _breakdown(ctx, [("b-a", ctx.width()), (name, sup.value)],
                      1e-10 + ctx.R.rel_error)


def _build_t2_5(ctx: _Ctx):
    sup = ctx.sup_R()
    inv = _weight_power_integral(ctx, ctx.s, -1.0)
    name = "sup R_tail" if ctx.side == "left" else "sup R_head"
    return _breakdown(ctx, [(name, sup.value), ("int 1/s", inv.value)],
                      inv.rel_error + 1e-10 + ctx.R.rel_error)


def _build_t2_7(ctx: _Ctx):
    p = ctx.exps["p"]
    sup = ctx.sup_R()
    base = _weight_power_integral(ctx, ctx.s, -(p - 1.0))
    name = "sup R_tail" if ctx.side == "left" else "sup R_head"
    return _breakdown(
        ctx,
        [(name, sup.value), ("(int (1/s)^(p-1))^(2/p)", base.value ** (2.0 / p))],
        (2.0 / p) * base.rel_error + 1e-10 + ctx.R.rel_error,
    )


def _build_t2_9(ctx: _Ctx):
    inv = _weight_power_integral(ctx, ctx.s, -1.0)
    rhs_weight = "R_tail*s" if ctx.side == "left" else "R_head*s"
    return _breakdown(ctx, [("int 1/s", inv.value)], inv.rel_error,
                      rhs_weight=rhs_weight)


def _build_t2_11(ctx: _Ctx):
    p = ctx.exps["p"]
    sup = ctx.sup_R()
    name = "sup R_tail" if ctx.side == "left" else "sup R_head"
    return _breakdown(
        ctx,
        [("(b-a)^p", ctx.width() ** p), (name, sup.value)],
        1e-10 + ctx.R.rel_error,
    )


def _build_t2_13(ctx: _Ctx):
    p = ctx.exps["p"]
    value, rel = eigen.t2_13_constant_result(ctx.r, ctx.s, int(p), ctx.interval,
                                             tol=1e-8)
    return _breakdown(ctx, [("1/lambda0", value)], rel)


def _build_t2_14(ctx: _Ctx):
    p = ctx.exps["p"]
    sup = ctx.sup_R()
    base = _weight_power_integral(ctx, ctx.s, -1.0 / p)
    name = "sup R_tail" if ctx.side == "left" else "sup R_head"
    return _breakdown(
        ctx,
        [(name, sup.value), ("(int s^(-1/p))^p", base.value**p)],
        p * base.rel_error + 1e-10 + ctx.R.rel_error,
    )


def _build_t2_16(ctx: _Ctx):
    p, q = ctx.exps["p"], ctx.exps["q"]
    Rp = _mixed_integral(ctx, [(ctx.R.spec if ctx.R.spec is not None else ctx.R, p)])
    rname = "(int R_tail^p)^(1/p)" if ctx.side == "left" else "(int R_head^p)^(1/p)"
    if ctx.mode == "as_printed":
        lead_name, lead = "(p+1)^(1/p)", (p + 1.0) ** (1.0 / p)
    else:
        lead_name, lead = "(1/(p+1))^(1/q)", (1.0 / (p + 1.0)) ** (1.0 / q)
    return _breakdown(
        ctx,
        [(lead_name, lead), ("(b-a)^p", ctx.width() ** p),
         (rname, Rp.value ** (1.0 / p))],
        (1.0 / p) * (Rp.rel_error + p * ctx.R.rel_error),
    )


def _build_c2_1(ctx: _Ctx):
    p = ctx.exps["p"]
    Rp = _mixed_integral(ctx, [(ctx.R.spec if ctx.R.spec is not None else ctx.R, p)])
    rname = (
        "(int R_tail^p)^(1/(p(p+1)))"
        if ctx.side == "left"
        else "(int R_head^p)^(1/(p(p+1)))"
    )
    pp1 = p * (p + 1.0)
    return _breakdown(
        ctx,
        [
            ("(p+1)^(1/(p(p+1)))", (p + 1.0) ** (1.0 / pp1)),
            ("(b-a)^(p/(p+1))", ctx.width() ** (p / (p + 1.0))),
            (rname, Rp.value ** (1.0 / pp1)),
        ],
        (1.0 / pp1) * (Rp.rel_error + p * ctx.R.rel_error),
    )


def _build_t2_18(ctx: _Ctx):
    p = ctx.exps["p"]
    rhs_weight = "R_tail" if ctx.side == "left" else "R_head"
    return _breakdown(ctx, [("(b-a)^p", ctx.width() ** p)], ctx.R.rel_error,
                      rhs_weight=rhs_weight)


def _build_t2_20(ctx: _Ctx):
    p, q, s_exp = ctx.exps["p"], ctx.exps["q"], ctx.exps["k"]
    params = special.BoydParams(p * q, q, s_exp)
    n_val, n_rel = special.boyd_N_result(params, tol=1e-10)
    Rp = _mixed_integral(ctx, [(ctx.R.spec if ctx.R.spec is not None else ctx.R, p)])
    rname = "(int R_tail^p)^(1/p)" if ctx.side == "left" else "(int R_head^p)^(1/p)"
    return _breakdown(
        ctx,
        [
            ("p+1", p + 1.0),
            ("N^(1/q)(pq,q,s)", n_val ** (1.0 / q)),
            ("(b-a)^p", ctx.width() ** p),
            (rname, Rp.value ** (1.0 / p)),
        ],
        n_rel / q + (1.0 / p) * Rp.rel_error + ctx.R.rel_error,
    )


def _build_t2_22(ctx: _Ctx):
    p, q = ctx.exps["p"], ctx.exps["q"]
    l_mode = "as_printed" if ctx.mode == "as_printed" else "as_derived"
    l_val = special.boyd_L(p * q, q, mode=l_mode)
    Rp = _mixed_integral(ctx, [(ctx.R.spec if ctx.R.spec is not None else ctx.R, p)])
    rname = "(int R_tail^p)^(1/p)" if ctx.side == "left" else "(int R_head^p)^(1/p)"
    return _breakdown(
        ctx,
        [
            ("p+1", p + 1.0),
            ("L^(1/q)(pq,q)", l_val ** (1.0 / q)),
            ("(b-a)^p", ctx.width() ** p),
            (rname, Rp.value ** (1.0 / p)),
        ],
        (1.0 / p) * Rp.rel_error + ctx.R.rel_error + 1e-12,
    )


def _k1_with_mode(ctx: _Ctx, side: str):
    """K1/K2(a,b,pq,q) with the printed or substitution-consistent
    r-exponent; printed uses (pq+q)/p, derived (pq+q)/(pq)."""
    p, q = ctx.exps["p"], ctx.exps["q"]
    pq = p * q
    tol = ctx.tol
    gamma = -1.0 / (pq + q - 1.0)
    inner_side = "head" if side == "left" else "tail"
    inner, inner_rel = _inner_cumulative(ctx.s, gamma, ctx.interval, inner_side, tol)

    er = (pq + q) / p if ctx.mode == "as_printed" else (pq + q) / pq
    es = -q / pq

    r_prog = ctx.r if callable(ctx.r) else fs.compile_program(ctx.r, ctx.interval)
    s_prog = ctx.s if callable(ctx.s) else fs.compile_program(ctx.s, ctx.interval)

    def integrand(xs):
        inner_vals = np.maximum(np.asarray(inner(xs), dtype=float), 0.0)
        return (
            np.asarray(r_prog(xs), float) ** er
            * np.asarray(s_prog(xs), float) ** es
            * inner_vals ** (pq + q - 1.0)
        )

    kappa_l = kappa_r = 0.0
    if not callable(ctx.r):
        kappa_l += er * fs.endpoint_exponent(ctx.r, ctx.interval, "left")
        kappa_r += er * fs.endpoint_exponent(ctx.r, ctx.interval, "right")
    if not callable(ctx.s):
        kappa_l += es * fs.endpoint_exponent(ctx.s, ctx.interval, "left")
        kappa_r += es * fs.endpoint_exponent(ctx.s, ctx.interval, "right")

    outer = quad.integrate(
        integrand,
        ctx.interval,
        tol=tol,
        endpoint_exponents=(kappa_l, kappa_r),
        breakpoints=None if callable(ctx.s) else fs.breakpoints(ctx.s, ctx.interval),
    )
    lead = (q / (pq + q)) ** (q / (pq + q))
    value = lead * outer.value ** (pq / (pq + q))
    rel = (pq / (pq + q)) * (outer.rel_error + (pq + q - 1.0) * inner_rel)
    return value, rel


def _build_t2_27(ctx: _Ctx):
    p, q = ctx.exps["p"], ctx.exps["q"]
    k1, k1_rel = _k1_with_mode(ctx, ctx.side)
    mix = _mixed_integral(
        ctx,
        [(ctx.R.spec if ctx.R.spec is not None else ctx.R, p), (ctx.r, -1.0 / q)],
    )
    k_name = "K1^(1/q)(a,b,pq,q)" if ctx.side == "left" else "K2^(1/q)(a,b,pq,q)"
    rname = (
        "(int R_tail^p/r^(1/q))^(1/p)"
        if ctx.side == "left"
        else "(int R_head^p/r^(1/q))^(1/p)"
    )
    return _breakdown(
        ctx,
        [
            ("p+1", p + 1.0),
            (k_name, k1 ** (1.0 / q)),
            (rname, mix.value ** (1.0 / p)),
        ],
        k1_rel / q + (1.0 / p) * (mix.rel_error + p * ctx.R.rel_error),
    )


def _build_t2_30(ctx: _Ctx):
    p, q = ctx.exps["p"], ctx.exps["q"]
    k = ctx.exps["k"]
    if ctx.mode == "as_printed":
        raise PreconditionFailed(
            "as printed this constant sets k = q, which violates 0 < q < k; "
            "the k-free as_derived form is the supported reading"
        )
    side = "left" if ctx.side == "left" else "right"
    kv, k_rel = beesack_K(
        ExponentSet(p=p, q=q, k=k, conjugate_check=False),
        ctx.r,
        ctx.s,
        ctx.interval,
        side=side,
        substituted=True,
        tol=ctx.tol,
    )
    mix = _mixed_integral(
        ctx,
        [(ctx.R.spec if ctx.R.spec is not None else ctx.R, p), (ctx.r, -1.0 / q)],
    )
    k_name = "K1^(1/q)(pq,q,k)" if ctx.side == "left" else "K2^(1/q)(pq,q,k)"
    rname = (
        "(int R_tail^p/r^(1/q))^(1/p)"
        if ctx.side == "left"
        else "(int R_head^p/r^(1/q))^(1/p)"
    )
    return _breakdown(
        ctx,
        [
            ("p+1", p + 1.0),
            (k_name, kv ** (1.0 / q)),
            (rname, mix.value ** (1.0 / p)),
        ],
        k_rel / q + (1.0 / p) * (mix.rel_error + p * ctx.R.rel_error),
    )


def _build_hardy(ctx: _Ctx):
    p = ctx.exps["p"]
    return _breakdown(ctx, [("(p/(p-1))^p", (p / (p - 1.0)) ** p)], 0.0)


# -- parameter checks --------------------------------------------------------


def _check_none(e: ExponentSet):
    return {}


def _check_conjugate(e: ExponentSet):
    p, q = _conjugate_pair(e)
    return {"p": p, "q": q}


def _check_pint(minimum=1):
    def check(e: ExponentSet):
        return {"p": _positive_integer_p(e, minimum)}

    return check


def _check_conj_int(e: ExponentSet):
    p, q = _conjugate_pair(e)
    if not float(p).is_integer():
        raise PreconditionFailed(f"p must be an integer > 1, got {p}")
    return {"p": p, "q": q}


def _check_boyd(e: ExponentSet):
    p, q = _conjugate_pair(e)
    if e.k is None:
        raise PreconditionFailed("the Boyd integrability exponent (k) is required")
    s_exp = float(e.k)
    if not (s_exp > 1 and 0 <= q < s_exp):
        raise PreconditionFailed(
            f"s > 1 and 0 <= q < s required (q={q}, s={s_exp})"
        )
    return {"p": p, "q": q, "k": s_exp}


def _check_beesack_k(e: ExponentSet):
    p, q = _conjugate_pair(e)
    if not (p > 1 and q > 1):
        raise PreconditionFailed("p, q > 1 required")
    if e.k is None:
        raise PreconditionFailed("the integrability exponent k is required")
    k = float(e.k)
    if not (k > 1 and 0 < q < k):
        raise PreconditionFailed(f"k > 1 and 0 < q < k required (q={q}, k={k})")
    return {"p": p, "q": q, "k": k}


def _check_pq_gt1(e: ExponentSet):
    p, q = _conjugate_pair(e)
    if not (p > 1 and q > 1):
        raise PreconditionFailed("p, q > 1 required")
    return {"p": p, "q": q}


def _check_hardy(e: ExponentSet):
    p = _need_p(e, "p > 1 required")
    if p <= 1:
        raise PreconditionFailed(f"p > 1 required, got {p}")
    return {"p": p}


# -- registry ----------------------------------------------------------------


def _pair(num_left, num_right, needs_s, build, check, lhs, rhs, modes_differ=False):
    out = {}
    for ident, side in ((num_left, "left"), (num_right, "right")):
        out[ident] = TheoremInfo(ident, side, needs_s, build, check, lhs, rhs,
                                 modes_differ)
    return out


THEOREMS: dict = {}
THEOREMS.update(_pair("T2.1", "T2.2", True, _build_t2_1, _check_none,
                      ("sq_int_r_F",), ("int_f_pow", "2", "s")))
THEOREMS.update(_pair("T2.3", "T2.4", False, _build_t2_3, _check_none,
                      ("int_r_F_pow", "2"), ("int_f_pow", "2", None)))
THEOREMS.update(_pair("T2.5", "T2.6", True, _build_t2_5, _check_none,
                      ("int_r_F_pow", "2"), ("int_f_pow", "2", "s")))
THEOREMS.update(_pair("T2.7", "T2.8", True, _build_t2_7, _check_conjugate,
                      ("int_r_F_pow", "2"), ("pow_int_f", "q", "2/q", "s")))
THEOREMS.update(_pair("T2.9", "T2.10", True, _build_t2_9, _check_none,
                      ("int_r_F_pow", "2"), ("int_f_pow", "2", "rhs_weight")))
THEOREMS.update(_pair("T2.11", "T2.12", False, _build_t2_11, _check_pint(1),
                      ("int_r_F_pow", "p+1"), ("int_f_pow", "p+1", None)))
THEOREMS["T2.13"] = TheoremInfo("T2.13", "left", True, _build_t2_13,
                                _check_pint(1), ("int_r_F_pow", "p+1"),
                                ("int_f_pow", "p+1", "s"))
THEOREMS.update(_pair("T2.14", "T2.15", True, _build_t2_14, _check_pint(1),
                      ("int_r_F_pow", "p+1"), ("int_f_pow", "p+1", "s")))
THEOREMS.update(_pair("T2.16", "T2.17", False, _build_t2_16, _check_conj_int,
                      ("int_r_F_pow", "p+1"),
                      ("pow_int_f", "p(p+1)/(p-1)", "(p-1)/p", None), True))
THEOREMS.update(_pair("T2.18", "T2.19", False, _build_t2_18, _check_pint(0),
                      ("int_r_F_pow", "p+1"),
                      ("int_f_pow", "p+1", "rhs_weight")))
THEOREMS.update(_pair("T2.20", "T2.21", False, _build_t2_20, _check_boyd,
                      ("int_r_F_pow", "p+1"), ("pow_int_f", "k", "(p+1)/k", None)))
# the typeset right side of the L-based pair carries outer power p+1 on
# int f^q, which is not f-homogeneous; the chain supports (p+1)/q
THEOREMS.update(_pair("T2.22", "T2.23", False, _build_t2_22, _check_pq_gt1,
                      ("int_r_F_pow", "p+1"), ("pow_int_f", "q", "(p+1)/q", None),
                      True))
THEOREMS.update(_pair("T2.27", "T2.28", True, _build_t2_27, _check_pq_gt1,
                      ("int_r_F_pow", "p+1"),
                      ("pow_int_f", "pq+q", "1/q", "s"), True))
THEOREMS.update(_pair("T2.30", "T2.31", True, _build_t2_30, _check_beesack_k,
                      ("int_r_F_pow", "p+1"),
                      ("pow_int_f", "k", "(p+1)/k", "s"), True))
THEOREMS.update(_pair("C2.1a", "C2.1b", False, _build_c2_1, _check_conj_int,
                      ("root_int_r_F", "p+1"),
                      ("pow_int_f", "p(p+1)/(p-1)", "(p-1)/(p(p+1))", None)))
THEOREMS.update(_pair("C2.2a", "C2.2b", False, _build_c2_1, _check_conj_int,
                      ("root_int_r_F", "p+1"),
                      ("pow_int_f", "p(p+1)/(p-1)", "(p-1)/(p(p+1))", None)))
THEOREMS["HARDY"] = TheoremInfo("HARDY", "left", False, _build_hardy,
                                _check_hardy, ("hardy",), ("int_f_pow", "p", None))

THEOREM_IDS = tuple(sorted(THEOREMS))

DEFAULT_MODES = {ident: "as_printed" for ident in THEOREM_IDS}
# printed k = q is vacuous there, so the k-free derived reading is default
for _ident in ("T2.30", "T2.31"):
    DEFAULT_MODES[_ident] = "as_derived"
# The L-based constants default to the typeset L: restoring the dropped
# Gamma-ratio power makes the constant smaller than the sharp one (e.g.
# 0.0159 < 0.213 at (nu, eta) = (4, 2)) and the bound numerically false,
# while the typeset value stays above the Boyd limit on the conjugate
# (pq, q) range.  Both readings remain available per instance.

_ALIASES = {"HARDY_CLASSICAL": "HARDY"}


def canonical_id(ident: str) -> str:
    ident = ident.strip()
    ident = _ALIASES.get(ident.upper(), ident)
    norm = ident.upper().replace("_", ".")
    for known in THEOREMS:
        if known.upper() == norm or known.upper().replace(".", "_") == ident.upper():
            return known
    raise DomainError(f"unknown theorem id {ident!r}")


def theorem_info(ident: str) -> TheoremInfo:
    return THEOREMS[canonical_id(ident)]


def resolve_mode(ident: str, mode: str) -> str:
    if mode in (None, "default"):
        return DEFAULT_MODES[canonical_id(ident)]
    if mode not in ("as_printed", "as_derived"):
        raise DomainError(f"unknown mode {mode!r}")
    return mode


def hardy_constant(
    ident: str,
    r,
    s,
    e: ExponentSet,
    interval: fs.Interval,
    mode: str = "default",
    tol: Optional[float] = None,
) -> ConstantBreakdown:
    """The multiplicative constant of one catalog inequality.

    r and s are weight specs (or callables); theorems that take no second
    weight ignore s.  Raises PreconditionFailed when the exponents violate
    the stated hypotheses and NonIntegrable when a weight integral in the
    constant diverges.
    """
    ident = canonical_id(ident)
    info = THEOREMS[ident]
    mode = resolve_mode(ident, mode)
    if info.needs_s and s is None:
        raise PreconditionFailed(f"{ident} needs the weight s")
    if not callable(r) and r is not None:
        fs.validate_nonnegative(r, interval)
    if not callable(s) and s is not None and info.needs_s:
        fs.validate_nonnegative(s, interval)
    exps = info.check(e if e is not None else ExponentSet())
    ctx = _Ctx(
        r=r,
        s=s if info.needs_s else None,
        e=e,
        interval=interval,
        mode=mode,
        tol=tol or quad.SMOOTH_TOL,
        side=info.side,
        exps=exps,
    )
    return info.build(ctx)
