"""End-to-end verification of the Hardy-type catalog.

An instance binds a theorem id, weights, exponents, an interval and a
test function f.  The verifier assembles both sides exactly as the bound
is displayed -- outer powers included -- so ratio <= 1 is literally the
inequality.  The error budget is the first-order sum of the relative
quadrature errors of the left side, the constant and the right side;
statuses are Holds (ratio <= 1 + budget), Violated (> 1 + 10*budget) and
Inconclusive between.

Any Violated instance is re-run at 10x tighter quadrature tolerance and
in the alternate constant mode before being reported, which separates
typo-level constant issues from numerical noise.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import constants as ct
from . import funcspace as fs
from . import quad
from .errors import HopialError, PreconditionFailed
from .opial import classify_status

__all__ = [
    "TheoremInstance",
    "VerificationReport",
    "SweepReport",
    "SharpnessResult",
    "assemble_lhs",
    "assemble_rhs",
    "verify",
    "sweep",
    "sharpness_search",
    "thread_count",
]


@dataclass(frozen=True)
class TheoremInstance:
    ident: str
    r: Optional[object]
    s: Optional[object]
    f: object
    exponents: ct.ExponentSet
    interval: fs.Interval
    mode: str = "default"

    def resolved(self):
        ident = ct.canonical_id(self.ident)
        info = ct.theorem_info(ident)
        mode = ct.resolve_mode(ident, self.mode)
        if info.needs_s and self.s is None:
            raise PreconditionFailed(f"{ident} needs the weight s")
        if ident not in ("HARDY",) and self.r is None:
            raise PreconditionFailed(f"{ident} needs the weight r")
        exps = info.check(self.exponents or ct.ExponentSet())
        return ident, info, mode, exps


@dataclass(frozen=True)
class VerificationReport:
    ident: str
    mode: str
    lhs: float
    rhs_core: float
    constant: float
    ratio: float
    status: str
    error_budget: float
    breakdown: Optional[ct.ConstantBreakdown] = None
    detail: str = ""


@dataclass(frozen=True)
class SweepReport:
    ident: str
    mode: str
    reports: tuple
    max_ratio: float
    argmax: int
    n_holds: int
    n_violated: int
    n_inconclusive: int
    seed: int

    @property
    def violated(self):
        return [rep for rep in self.reports if rep.status == "Violated"]


@dataclass(frozen=True)
class SharpnessResult:
    ident: str
    best_ratio: float
    best_params: tuple
    evaluations: int
    best_report: Optional[VerificationReport]


def thread_count() -> int:
    raw = os.environ.get("HOPIAL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# side assembly
# ---------------------------------------------------------------------------


_POWER_EXPRS = {
    "2": lambda p, q, k: 2.0,
    "p": lambda p, q, k: p,
    "p+1": lambda p, q, k: p + 1.0,
    "q": lambda p, q, k: q,
    "k": lambda p, q, k: k,
    "pq+q": lambda p, q, k: p * q + q,
    "p(p+1)/(p-1)": lambda p, q, k: p * (p + 1.0) / (p - 1.0),
    "2/q": lambda p, q, k: 2.0 / q,
    "(p+1)/k": lambda p, q, k: (p + 1.0) / k,
    "(p+1)/q": lambda p, q, k: (p + 1.0) / q,
    "(p-1)/p": lambda p, q, k: (p - 1.0) / p,
    "1/q": lambda p, q, k: 1.0 / q,
    "(p-1)/(p(p+1))": lambda p, q, k: (p - 1.0) / (p * (p + 1.0)),
}


def _power_value(key: str, exps: dict) -> float:
    try:
        value = _POWER_EXPRS[key](exps.get("p"), exps.get("q"), exps.get("k"))
    except TypeError:
        raise PreconditionFailed(f"missing exponent for {key}")
    if value is None or not math.isfinite(value):
        raise PreconditionFailed(f"missing exponent for {key}")
    return float(value)


def _cumulative_F(inst: TheoremInstance, info) -> tuple:
    """(F spec or callable, rel error) from the correct endpoint."""
    if callable(inst.f):
        table = quad.cumulative(inst.f, inst.interval, 128)
        total = table.value_at(inst.interval.b)
        rel = table.query_error / max(abs(total), 1e-300)
        if info.side == "left":
            return table, rel
        return (lambda xs: total - table(xs)), rel
    spec = (
        fs.head_integral_spec(inst.f, inst.interval)
        if info.side == "left"
        else fs.tail_integral_spec(inst.f, inst.interval)
    )
    if spec is not None:
        return spec, 0.0
    table = quad.cumulative(inst.f, inst.interval, 128)
    total = table.value_at(inst.interval.b)
    rel = table.query_error / max(abs(total), 1e-300)
    if info.side == "left":
        return table, rel
    return (lambda xs: total - table(xs)), rel


def _product_integral(inst, parts, tol) -> quad.QuadResult:
    """integral over the instance interval of a product of (spec_or_fn,
    exponent) pairs, with structural splits/exponents where available."""
    interval = inst.interval
    specs, fns = [], []
    kappa_l = kappa_r = 0.0
    breaks: set = set()
    for w, ex in parts:
        if w is None or ex == 0:
            continue
        if callable(w):
            fns.append((w, ex))
        else:
            sp = fs.power_of(w, ex)
            specs.append(sp)
            kappa_l += fs.endpoint_exponent(sp, interval, "left")
            kappa_r += fs.endpoint_exponent(sp, interval, "right")
            breaks.update(fs.breakpoints(sp, interval))
    specs = fs.merge_product(specs)
    if not fns:
        target = specs[0] if len(specs) == 1 else fs.Product(specs)
        return quad.integrate(target, interval, tol=tol,
                              endpoint_exponents=(kappa_l, kappa_r))
    progs = [fs.compile_program(sp, interval) for sp in specs]

    def fn(xs):
        out = np.ones_like(xs)
        for prog in progs:
            out = out * prog(xs)
        for w, ex in fns:
            vals = np.asarray(w(xs), dtype=float)
            out = out * (vals if ex == 1 else vals**ex)
        return out

    return quad.integrate(fn, interval, tol=tol,
                          endpoint_exponents=(kappa_l, kappa_r),
                          breakpoints=sorted(breaks))


def assemble_lhs(inst: TheoremInstance, tol: Optional[float] = None) -> quad.QuadResult:
    """The displayed left-hand side, outer powers applied."""
    ident, info, mode, exps = inst.resolved()
    F, f_rel = _cumulative_F(inst, info)
    shape = info.lhs
    if shape[0] == "sq_int_r_F":
        base = _product_integral(inst, [(inst.r, 1.0), (F, 1.0)], tol)
        return quad.QuadResult(
            base.value**2,
            2.0 * (base.rel_error + f_rel) * base.value**2,
            base.subdivisions,
        )
    if shape[0] == "int_r_F_pow":
        power = _power_value(shape[1], exps)
        res = _product_integral(inst, [(inst.r, 1.0), (F, power)], tol)
        return quad.QuadResult(
            res.value,
            (res.rel_error + power * f_rel) * abs(res.value),
            res.subdivisions,
        )
    if shape[0] == "root_int_r_F":
        power = _power_value(shape[1], exps)
        res = _product_integral(inst, [(inst.r, 1.0), (F, power)], tol)
        root = 1.0 / power
        return quad.QuadResult(
            res.value**root,
            (root * res.rel_error + f_rel) * res.value**root,
            res.subdivisions,
        )
    if shape[0] == "hardy":
        p = exps["p"]
        inv = fs.PowerLaw(1.0, 1.0)
        res = _product_integral(inst, [(F, p), (inv, -p)], tol)
        return quad.QuadResult(
            res.value, (res.rel_error + p * f_rel) * abs(res.value),
            res.subdivisions,
        )
    raise HopialError(f"unknown lhs shape {shape}")


def _rhs_weight_parts(inst, ident, mode, weight_tag, rhs_weight, tol):
    parts = []
    if weight_tag == "s":
        parts.append((inst.s, 1.0))
    elif weight_tag == "rhs_weight":
        tag = rhs_weight
        if tag is None:
            bd = ct.hardy_constant(ident, inst.r, inst.s, inst.exponents,
                                   inst.interval, mode=mode, tol=tol)
            tag = bd.rhs_weight
        side = "tail" if tag.startswith("R_tail") else "head"
        R = ct.WeightIntegral(inst.r, inst.interval, side)
        parts.append((R.spec if R.spec is not None else R, 1.0))
        if tag.endswith("*s"):
            parts.append((inst.s, 1.0))
    return parts


def assemble_rhs(
    inst: TheoremInstance,
    tol: Optional[float] = None,
    rhs_weight: Optional[str] = None,
) -> quad.QuadResult:
    """The displayed right-hand side core (the constant excluded)."""
    ident, info, mode, exps = inst.resolved()
    shape = info.rhs
    if shape[0] == "int_f_pow":
        _, power_key, weight_tag = shape
        parts = _rhs_weight_parts(inst, ident, mode, weight_tag, rhs_weight, tol)
        parts.append((inst.f, _power_value(power_key, exps)))
        return _product_integral(inst, parts, tol)
    if shape[0] == "pow_int_f":
        _, power_key, outer_key, weight_tag = shape
        parts = _rhs_weight_parts(inst, ident, mode, weight_tag, rhs_weight, tol)
        parts.append((inst.f, _power_value(power_key, exps)))
        core = _product_integral(inst, parts, tol)
        outer = _power_value(outer_key, exps)
        if core.value < 0:
            raise HopialError("negative core under an outer power")
        value = core.value**outer
        return quad.QuadResult(
            value, outer * core.rel_error * abs(value), core.subdivisions
        )
    raise HopialError(f"unknown rhs shape {shape}")


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def _single_pass(inst, tol, breakdown=None):
    ident, info, mode, exps = inst.resolved()
    if breakdown is None:
        breakdown = ct.hardy_constant(ident, inst.r, inst.s, inst.exponents,
                                      inst.interval, mode=mode, tol=tol)
    lhs = assemble_lhs(inst, tol)
    rhs = assemble_rhs(inst, tol, rhs_weight=breakdown.rhs_weight)
    denom = breakdown.value * rhs.value
    if lhs.value == 0.0:
        ratio = 0.0
    elif denom <= 0.0:
        ratio = math.inf
    else:
        ratio = lhs.value / denom
    budget = max(
        lhs.rel_error + rhs.rel_error + breakdown.error_estimate, 1e-12
    )
    status = classify_status(ratio, budget)
    return VerificationReport(
        ident, mode, lhs.value, rhs.value, breakdown.value, ratio, status,
        budget, breakdown,
    )


def verify(
    inst: TheoremInstance,
    tol: Optional[float] = None,
    breakdown: Optional[ct.ConstantBreakdown] = None,
) -> VerificationReport:
    """Verify one instance; Violated results are re-examined first.

    The re-examination runs at 10x tighter tolerance and, for catalog
    entries with divergent printed/derived readings, also in the other
    mode; the outcome is attached to the report detail.
    """
    if not callable(inst.f):
        fs.validate_nonnegative(inst.f, inst.interval)
    report = _single_pass(inst, tol, breakdown)
    if report.status != "Violated":
        return report
    tight = max((tol or quad.SMOOTH_TOL) / 10.0, 2e-14)
    confirmed = _single_pass(inst, tight)
    detail = f"retested at tol={tight:g}: ratio={confirmed.ratio:.9g}"
    ident, info, mode, exps = inst.resolved()
    if info.modes_differ:
        other = "as_derived" if mode == "as_printed" else "as_printed"
        try:
            alt = _single_pass(replace(inst, mode=other), tol)
            detail += f"; {other} ratio={alt.ratio:.9g} ({alt.status})"
        except HopialError as exc:
            detail += f"; {other} unavailable ({type(exc).__name__})"
    return replace(confirmed, detail=detail)


def _instance_reports(inst_list, tol, breakdown, max_workers):
    def run(inst):
        try:
            return verify(inst, tol=tol, breakdown=breakdown)
        except HopialError as exc:
            ident = ct.canonical_id(inst.ident)
            return VerificationReport(
                ident, inst.mode, math.nan, math.nan, math.nan, math.nan,
                "Inconclusive", math.inf, None,
                f"{type(exc).__name__}: {exc}",
            )

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(run, inst_list))
    return [run(inst) for inst in inst_list]


def sweep(
    ident: str,
    family: fs.FamilySpec,
    r,
    s,
    exponents: ct.ExponentSet,
    interval: fs.Interval,
    count: int,
    mode: str = "default",
    tol: Optional[float] = None,
) -> SweepReport:
    """Verify `count` family members against fixed weights.

    The constant depends only on the weights, so it is computed once and
    shared; per-instance failures are recorded as Inconclusive reports
    with the reason, never aborting the sweep.  Deterministic for a fixed
    family seed; instances are verified (and merged) in index order.
    """
    ident = ct.canonical_id(ident)
    resolved_mode = ct.resolve_mode(ident, mode)
    breakdown = ct.hardy_constant(ident, r, s, exponents, interval,
                                  mode=resolved_mode, tol=tol)
    members = fs.sample_family(family, count)
    instances = [
        TheoremInstance(ident, r, s, f, exponents, interval, resolved_mode)
        for f in members
    ]
    reports = _instance_reports(instances, tol, breakdown, thread_count())
    finite = [
        (i, rep.ratio) for i, rep in enumerate(reports) if math.isfinite(rep.ratio)
    ]
    if finite:
        argmax, max_ratio = max(finite, key=lambda t: t[1])
    else:
        argmax, max_ratio = -1, math.nan
    seed = getattr(family, "seed", 0)
    return SweepReport(
        ident,
        resolved_mode,
        tuple(reports),
        max_ratio,
        argmax,
        sum(r_.status == "Holds" for r_ in reports),
        sum(r_.status == "Violated" for r_ in reports),
        sum(r_.status == "Inconclusive" for r_ in reports),
        seed,
    )


# ---------------------------------------------------------------------------
# sharpness search
# ---------------------------------------------------------------------------


def _nelder_mead_max(fn, bounds, budget):
    """Derivative-free ascent of fn over a box; returns (best_x, best_val,
    evaluations).  Standard simplex moves, deterministic start."""
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    dim = len(bounds)

    def clip(x):
        return np.array(
            [min(max(v, lo), hi) for v, (lo, hi) in zip(x, bounds)]
        )

    evals = 0

    def call(x):
        nonlocal evals
        evals += 1
        try:
            val = fn(clip(x))
        except HopialError:
            return -math.inf
        if val is None or not math.isfinite(val):
            return -math.inf
        return val

    x0 = np.array([0.5 * (lo + hi) for lo, hi in bounds])
    simplex = [x0]
    for i in range(dim):
        step = 0.35 * (bounds[i][1] - bounds[i][0])
        xi = x0.copy()
        xi[i] = min(xi[i] + step, bounds[i][1])
        simplex.append(xi)
    values = [call(x) for x in simplex]

    while evals < budget:
        order = np.argsort(values)[::-1]  # descending: best first
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        reflected = clip(centroid + (centroid - worst))
        fr = call(reflected)
        if fr > values[0]:
            expanded = clip(centroid + 2.0 * (centroid - worst))
            fe = call(expanded)
            if fe > fr:
                simplex[-1], values[-1] = expanded, fe
            else:
                simplex[-1], values[-1] = reflected, fr
        elif fr > values[-2]:
            simplex[-1], values[-1] = reflected, fr
        else:
            contracted = clip(centroid + 0.5 * (worst - centroid))
            fc = call(contracted)
            if fc > values[-1]:
                simplex[-1], values[-1] = contracted, fc
            else:
                best = simplex[0]
                simplex = [best] + [
                    clip(best + 0.5 * (x - best)) for x in simplex[1:]
                ]
                values = [values[0]] + [call(x) for x in simplex[1:]]
        spread = max(
            float(np.max(np.abs(np.asarray(x) - np.asarray(simplex[0]))))
            for x in simplex[1:]
        ) if dim else 0.0
        if spread < 1e-10:
            break

    i_best = int(np.argmax(values))
    return np.asarray(simplex[i_best]), values[i_best], evals


def sharpness_search(
    ident: str,
    builder: Callable,
    bounds: Sequence,
    r,
    s,
    exponents: ct.ExponentSet,
    interval: fs.Interval,
    budget: int = 200,
    mode: str = "default",
    tol: Optional[float] = None,
) -> SharpnessResult:
    """Probe how close the constant is to sharp over a parametric family.

    builder maps a parameter vector (at most 3 entries) to a test
    function.  The search is a simplex-style ascent on the ratio; a best
    ratio above 1 + budget is never reported as found without a re-run at
    10x tighter quadrature tolerance.
    """
    if len(bounds) > 3:
        raise PreconditionFailed("parametric families are limited to 3 parameters")
    if budget < 50:
        raise PreconditionFailed("search budget must be at least 50 evaluations")
    ident = ct.canonical_id(ident)
    resolved_mode = ct.resolve_mode(ident, mode)
    breakdown = ct.hardy_constant(ident, r, s, exponents, interval,
                                  mode=resolved_mode, tol=tol)

    def ratio_at(params):
        f = builder(params)
        inst = TheoremInstance(ident, r, s, f, exponents, interval, resolved_mode)
        return _single_pass(inst, tol, breakdown).ratio

    if not bounds:  # degenerate: constant family
        f = builder(())
        inst = TheoremInstance(ident, r, s, f, exponents, interval, resolved_mode)
        rep = verify(inst, tol=tol, breakdown=breakdown)
        return SharpnessResult(ident, rep.ratio, (), 1, rep)

    best_x, best_val, evals = _nelder_mead_max(ratio_at, bounds, budget)
    f = builder(best_x)
    inst = TheoremInstance(ident, r, s, f, exponents, interval, resolved_mode)
    rep = _single_pass(inst, tol, breakdown)
    if rep.ratio > 1.0 + rep.error_budget:
        tight = max((tol or quad.SMOOTH_TOL) / 10.0, 2e-14)
        rep = _single_pass(inst, tight)
    return SharpnessResult(ident, rep.ratio, tuple(float(v) for v in best_x),
                           evals, rep)


def lemma_sharpness(
    v,
    builder: Callable,
    bounds: Sequence,
    weights=None,
    exponents=None,
    budget: int = 200,
    mode: str = "default",
    tol: Optional[float] = None,
) -> SharpnessResult:
    """Sharpness probe on the lemma layer: ascend the variant ratio over a
    parametric path family (e.g. hat-peak position)."""
    from . import opial as op

    if budget < 50:
        raise PreconditionFailed("search budget must be at least 50 evaluations")

    def ratio_at(params):
        path = builder(params)
        return op.verify_variant(v, path, weights, exponents, mode=mode,
                                 tol=tol).ratio

    if not bounds:
        rec = op.verify_variant(v, builder(()), weights, exponents, mode=mode,
                                tol=tol)
        return SharpnessResult(v.identifier, rec.ratio, (), 1, None)
    best_x, _, evals = _nelder_mead_max(ratio_at, bounds, budget)
    rec = op.verify_variant(v, builder(best_x), weights, exponents, mode=mode,
                            tol=tol)
    return SharpnessResult(v.identifier, rec.ratio,
                           tuple(float(x) for x in best_x), evals, None)
