"""Closed catalog of nonnegative functions on an interval.

Weights and test functions are represented structurally (power laws,
exponentials, piecewise linear interpolants, sums/products) instead of as
raw callables, so that downstream code can

* pick quadrature rules from declared endpoint exponents,
* use closed-form antiderivatives and derivatives where they exist,
* compile the tree to a flat program evaluated by the array kernel.

A raw-callable escape hatch exists at the quadrature layer but disables
those fast paths.  Piecewise-constant steps and piecewise polynomials are
internal variants: they arise as exact derivatives/antiderivatives of the
public catalog and round-trip through JSON like everything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernel
from .errors import DomainError, InvalidSpec

__all__ = [
    "Interval",
    "Constant",
    "PowerLaw",
    "ShiftedPowerLaw",
    "Exponential",
    "PiecewiseLinear",
    "Step",
    "PiecewisePolynomial",
    "Sum",
    "Product",
    "Power",
    "AbsVal",
    "FunctionSpec",
    "FamilySpec",
    "RandomPiecewiseLinear",
    "RandomPowerLaw",
    "GridPowerLaw",
    "validate",
    "evaluate",
    "evaluate_array",
    "derivative",
    "closed_antiderivative",
    "breakpoints",
    "endpoint_exponent",
    "scale",
    "power_of",
    "spec_to_json",
    "spec_from_json",
    "sample_family",
    "compile_program",
]


@dataclass(frozen=True)
class Interval:
    """Finite open interval (a, b) with a < b."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidSpec("interval endpoints must be finite")
        if not self.a < self.b:
            raise InvalidSpec(f"interval requires a < b, got ({self.a}, {self.b})")

    @property
    def width(self) -> float:
        return self.b - self.a

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.a - slack <= x <= self.b + slack


# ---------------------------------------------------------------------------
# spec variants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    c: float


@dataclass(frozen=True)
class PowerLaw:
    """c * (x - a)^alpha, anchored at the interval's left endpoint."""

    c: float
    alpha: float


@dataclass(frozen=True)
class ShiftedPowerLaw:
    """c * (b - x)^alpha, anchored at the interval's right endpoint."""

    c: float
    alpha: float


@dataclass(frozen=True)
class Exponential:
    """c * exp(beta * x)."""

    c: float
    beta: float


@dataclass(frozen=True)
class PiecewiseLinear:
    """Linear interpolant of (x, value) knots; knots strictly increasing."""

    knots: tuple

    def __init__(self, knots):
        object.__setattr__(self, "knots", tuple((float(x), float(v)) for x, v in knots))


@dataclass(frozen=True)
class Step:
    """Right-continuous step: values[i] on [breaks[i], breaks[i+1])."""

    breaks: tuple
    values: tuple

    def __init__(self, breaks, values):
        object.__setattr__(self, "breaks", tuple(float(x) for x in breaks))
        object.__setattr__(self, "values", tuple(float(v) for v in values))


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Per-piece polynomials in the local variable (x - breaks[i])."""

    breaks: tuple
    coeffs: tuple  # coeffs[i][j] multiplies (x - breaks[i])^j

    def __init__(self, breaks, coeffs):
        object.__setattr__(self, "breaks", tuple(float(x) for x in breaks))
        object.__setattr__(
            self, "coeffs", tuple(tuple(float(c) for c in row) for row in coeffs)
        )


@dataclass(frozen=True)
class Sum:
    terms: tuple

    def __init__(self, terms):
        object.__setattr__(self, "terms", tuple(terms))


@dataclass(frozen=True)
class Product:
    terms: tuple

    def __init__(self, terms):
        object.__setattr__(self, "terms", tuple(terms))


@dataclass(frozen=True)
class Power:
    """base^exponent for a real exponent; base should be sign-definite."""

    base: "FunctionSpec"
    exponent: float


@dataclass(frozen=True)
class AbsVal:
    term: "FunctionSpec"


FunctionSpec = Union[
    Constant,
    PowerLaw,
    ShiftedPowerLaw,
    Exponential,
    PiecewiseLinear,
    Step,
    PiecewisePolynomial,
    Sum,
    Product,
    Power,
    AbsVal,
]


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def validate(spec: FunctionSpec, interval: Interval) -> None:
    """Check structural invariants of ``spec`` on ``interval``.

    Raises InvalidSpec on violations.  Nonnegativity is checked where the
    structure decides it (coefficients, knot values); composite specs are
    additionally probed on a sample grid by callers that require it.
    """
    if isinstance(spec, (Constant, PowerLaw, ShiftedPowerLaw, Exponential)):
        if not math.isfinite(spec.c):
            raise InvalidSpec("coefficient must be finite")
        return
    if isinstance(spec, PiecewiseLinear):
        xs = [x for x, _ in spec.knots]
        if len(xs) < 2:
            raise InvalidSpec("piecewise linear needs at least two knots")
        if any(x1 <= x0 for x0, x1 in zip(xs, xs[1:])):
            raise InvalidSpec("piecewise linear knots must be strictly increasing")
        tol = 1e-9 * max(interval.width, 1.0)
        if xs[0] > interval.a + tol or xs[-1] < interval.b - tol:
            raise InvalidSpec("piecewise linear knots must cover the interval")
        return
    if isinstance(spec, Step):
        if len(spec.breaks) != len(spec.values) + 1:
            raise InvalidSpec("step needs len(breaks) == len(values) + 1")
        if any(x1 <= x0 for x0, x1 in zip(spec.breaks, spec.breaks[1:])):
            raise InvalidSpec("step breaks must be strictly increasing")
        return
    if isinstance(spec, PiecewisePolynomial):
        if len(spec.breaks) != len(spec.coeffs) + 1:
            raise InvalidSpec("piecewise polynomial needs one coeff row per piece")
        if any(x1 <= x0 for x0, x1 in zip(spec.breaks, spec.breaks[1:])):
            raise InvalidSpec("piecewise polynomial breaks must be strictly increasing")
        return
    if isinstance(spec, (Sum, Product)):
        if not spec.terms:
            raise InvalidSpec(f"{type(spec).__name__} must be nonempty")
        for term in spec.terms:
            validate(term, interval)
        return
    if isinstance(spec, Power):
        if not math.isfinite(spec.exponent):
            raise InvalidSpec("power exponent must be finite")
        validate(spec.base, interval)
        return
    if isinstance(spec, AbsVal):
        validate(spec.term, interval)
        return
    raise InvalidSpec(f"unknown spec variant {type(spec).__name__}")


def validate_nonnegative(spec: FunctionSpec, interval: Interval, samples: int = 64) -> None:
    """Validate plus a sampled nonnegativity probe on interior points."""
    validate(spec, interval)
    xs = np.linspace(interval.a, interval.b, samples + 2)[1:-1]
    vals = evaluate_array(spec, xs, interval)
    if np.any(np.isnan(vals)):
        raise InvalidSpec("spec evaluates to NaN inside the interval")
    if np.any(vals < -1e-12 * max(1.0, float(np.nanmax(np.abs(vals))))):
        raise InvalidSpec("spec is negative inside the interval")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def evaluate(spec: FunctionSpec, x: float, interval: Interval) -> float:
    """Evaluate ``spec`` at a single point of [a, b].

    Endpoint power singularities return +inf (never a silent NaN).
    """
    if not interval.contains(x):
        raise DomainError(f"x={x} outside interval [{interval.a}, {interval.b}]")
    out = evaluate_array(spec, np.array([x], dtype=float), interval)
    return float(out[0])


def evaluate_array(spec: FunctionSpec, xs: np.ndarray, interval: Interval) -> np.ndarray:
    """Vectorized evaluation through the compiled (or fallback) kernel."""
    return compile_program(spec, interval)(np.asarray(xs, dtype=float))


# ---------------------------------------------------------------------------
# smart constructors
# ---------------------------------------------------------------------------


def scale(spec: FunctionSpec, c: float) -> FunctionSpec:
    """c * spec, folded into coefficients so closed forms survive."""
    if c == 1.0:
        return spec
    if isinstance(spec, Constant):
        return Constant(c * spec.c)
    if isinstance(spec, PowerLaw):
        return PowerLaw(c * spec.c, spec.alpha)
    if isinstance(spec, ShiftedPowerLaw):
        return ShiftedPowerLaw(c * spec.c, spec.alpha)
    if isinstance(spec, Exponential):
        return Exponential(c * spec.c, spec.beta)
    if isinstance(spec, PiecewiseLinear):
        return PiecewiseLinear([(x, c * v) for x, v in spec.knots])
    if isinstance(spec, Step):
        return Step(spec.breaks, [c * v for v in spec.values])
    if isinstance(spec, PiecewisePolynomial):
        return PiecewisePolynomial(
            spec.breaks, [[c * a for a in row] for row in spec.coeffs]
        )
    if isinstance(spec, Sum):
        return Sum([scale(t, c) for t in spec.terms])
    return Product([Constant(c), spec])


def merge_product(specs: Sequence[FunctionSpec]) -> list:
    """Combine same-anchor power-law/exponential factors of a product.

    Folding c1 (x-a)^a1 * c2 (x-a)^a2 into one factor keeps intermediate
    magnitudes representable near a singular endpoint where the unmerged
    factors would overflow before cancelling.
    """
    power = None
    shifted = None
    expo = None
    const = 1.0
    rest = []
    for sp in specs:
        if isinstance(sp, Constant):
            const *= sp.c
        elif isinstance(sp, PowerLaw):
            power = sp if power is None else PowerLaw(power.c * sp.c,
                                                      power.alpha + sp.alpha)
        elif isinstance(sp, ShiftedPowerLaw):
            shifted = sp if shifted is None else ShiftedPowerLaw(
                shifted.c * sp.c, shifted.alpha + sp.alpha
            )
        elif isinstance(sp, Exponential):
            expo = sp if expo is None else Exponential(expo.c * sp.c,
                                                       expo.beta + sp.beta)
        else:
            rest.append(sp)
    merged = [sp for sp in (power, shifted, expo) if sp is not None]
    if not merged and not rest:
        return [Constant(const)]
    if const != 1.0:
        if merged:
            merged[0] = scale(merged[0], const)
        else:
            rest[0] = scale(rest[0], const)
    return merged + rest


def power_of(spec: FunctionSpec, exponent: float) -> FunctionSpec:
    """spec^exponent, folding pure power laws so antiderivatives survive."""
    if exponent == 1.0:
        return spec
    if isinstance(spec, Constant):
        return Constant(spec.c**exponent)
    if isinstance(spec, PowerLaw) and spec.c >= 0:
        return PowerLaw(spec.c**exponent, spec.alpha * exponent)
    if isinstance(spec, ShiftedPowerLaw) and spec.c >= 0:
        return ShiftedPowerLaw(spec.c**exponent, spec.alpha * exponent)
    if isinstance(spec, Exponential) and spec.c >= 0:
        return Exponential(spec.c**exponent, spec.beta * exponent)
    if isinstance(spec, Power):
        return Power(spec.base, spec.exponent * exponent)
    return Power(spec, exponent)


# ---------------------------------------------------------------------------
# calculus on the catalog
# ---------------------------------------------------------------------------


def derivative(spec: FunctionSpec, interval: Interval) -> Optional[FunctionSpec]:
    """Exact derivative where the catalog is closed under it, else None.

    Piecewise linear specs differentiate to steps (a.e. derivative); steps
    and absolute values return None.
    """
    if isinstance(spec, Constant):
        return Constant(0.0)
    if isinstance(spec, PowerLaw):
        if spec.alpha == 0.0:
            return Constant(0.0)
        return PowerLaw(spec.c * spec.alpha, spec.alpha - 1.0)
    if isinstance(spec, ShiftedPowerLaw):
        if spec.alpha == 0.0:
            return Constant(0.0)
        return ShiftedPowerLaw(-spec.c * spec.alpha, spec.alpha - 1.0)
    if isinstance(spec, Exponential):
        return Exponential(spec.c * spec.beta, spec.beta)
    if isinstance(spec, PiecewiseLinear):
        xs = [x for x, _ in spec.knots]
        vs = [v for _, v in spec.knots]
        slopes = [
            (v1 - v0) / (x1 - x0)
            for (x0, v0), (x1, v1) in zip(spec.knots, spec.knots[1:])
        ]
        return Step(xs, slopes)
    if isinstance(spec, PiecewisePolynomial):
        rows = []
        for row in spec.coeffs:
            if len(row) <= 1:
                rows.append((0.0,))
            else:
                rows.append(tuple(j * row[j] for j in range(1, len(row))))
        return PiecewisePolynomial(spec.breaks, rows)
    if isinstance(spec, Sum):
        parts = [derivative(t, interval) for t in spec.terms]
        if any(p is None for p in parts):
            return None
        return Sum(parts)
    if isinstance(spec, Product):
        parts = [derivative(t, interval) for t in spec.terms]
        if any(p is None for p in parts):
            return None
        addends = []
        for i, dterm in enumerate(parts):
            factors = list(spec.terms)
            factors[i] = dterm
            addends.append(Product(factors))
        return Sum(addends)
    if isinstance(spec, Power):
        dbase = derivative(spec.base, interval)
        if dbase is None:
            return None
        return Product(
            [Constant(spec.exponent), power_of(spec.base, spec.exponent - 1.0), dbase]
        )
    return None


def closed_antiderivative(spec: FunctionSpec, interval: Interval) -> Optional[FunctionSpec]:
    """Antiderivative G with G(a) = 0, or None when no closed form exists.

    Products, powers of composites and absolute values are declared
    unsupported; callers fall back to cumulative tables.
    """
    a, b = interval.a, interval.b
    if isinstance(spec, Constant):
        return PowerLaw(spec.c, 1.0)
    if isinstance(spec, PowerLaw):
        if spec.alpha == -1.0:
            return None
        return PowerLaw(spec.c / (spec.alpha + 1.0), spec.alpha + 1.0)
    if isinstance(spec, ShiftedPowerLaw):
        if spec.alpha == -1.0:
            return None
        k = spec.c / (spec.alpha + 1.0)
        return Sum(
            [
                Constant(k * (b - a) ** (spec.alpha + 1.0)),
                ShiftedPowerLaw(-k, spec.alpha + 1.0),
            ]
        )
    if isinstance(spec, Exponential):
        if spec.beta == 0.0:
            return PowerLaw(spec.c, 1.0)
        k = spec.c / spec.beta
        return Sum([Exponential(k, spec.beta), Constant(-k * math.exp(spec.beta * a))])
    if isinstance(spec, PiecewiseLinear):
        xs = [x for x, _ in spec.knots]
        vs = [v for _, v in spec.knots]
        rows = []
        acc = 0.0
        for (x0, v0), (x1, v1) in zip(spec.knots, spec.knots[1:]):
            slope = (v1 - v0) / (x1 - x0)
            rows.append((acc, v0, slope / 2.0))
            acc += (v0 + v1) / 2.0 * (x1 - x0)
        return PiecewisePolynomial(xs, rows)
    if isinstance(spec, Step):
        xs = list(spec.breaks)
        vals = [0.0]
        for (x0, x1), v in zip(zip(xs, xs[1:]), spec.values):
            vals.append(vals[-1] + v * (x1 - x0))
        return PiecewiseLinear(list(zip(xs, vals)))
    if isinstance(spec, PiecewisePolynomial):
        rows = []
        acc = 0.0
        for (x0, x1), row in zip(zip(spec.breaks, spec.breaks[1:]), spec.coeffs):
            integ = [acc] + [row[j] / (j + 1.0) for j in range(len(row))]
            rows.append(tuple(integ))
            w = x1 - x0
            acc = sum(coef * w**j for j, coef in enumerate(integ))
        return PiecewisePolynomial(spec.breaks, rows)
    if isinstance(spec, Sum):
        parts = [closed_antiderivative(t, interval) for t in spec.terms]
        if any(p is None for p in parts):
            return None
        return Sum(parts)
    return None


def head_integral_spec(spec: FunctionSpec, interval: Interval) -> Optional[FunctionSpec]:
    """Running integral from the left endpoint, as a spec (or None)."""
    return closed_antiderivative(spec, interval)


def tail_integral_spec(spec: FunctionSpec, interval: Interval) -> Optional[FunctionSpec]:
    """Integral from x to the right endpoint, as a spec (or None)."""
    anti = closed_antiderivative(spec, interval)
    if anti is None:
        return None
    total = evaluate(anti, interval.b, interval)
    return Sum([Constant(total), scale(anti, -1.0)])


# ---------------------------------------------------------------------------
# structural analysis
# ---------------------------------------------------------------------------


def breakpoints(spec: FunctionSpec, interval: Interval) -> list:
    """Interior x values where the spec is only piecewise smooth."""
    pts: set = set()

    def walk(s):
        if isinstance(s, PiecewiseLinear):
            pts.update(x for x, _ in s.knots)
        elif isinstance(s, (Step, PiecewisePolynomial)):
            pts.update(s.breaks)
        elif isinstance(s, (Sum, Product)):
            for t in s.terms:
                walk(t)
        elif isinstance(s, Power):
            walk(s.base)
        elif isinstance(s, AbsVal):
            walk(s.term)

    walk(spec)
    eps = 1e-12 * interval.width
    return sorted(x for x in pts if interval.a + eps < x < interval.b - eps)


def endpoint_exponent(spec: FunctionSpec, interval: Interval, side: str) -> float:
    """Power-law exponent of the spec near one endpoint.

    Returns kappa such that spec(x) ~ C * dist^kappa with C != 0; 0.0 for a
    regular nonzero endpoint value, math.inf when the spec vanishes
    identically near the endpoint.  Signed sums use the min rule, which is
    exact for nonnegative terms; callers with cancelling sums must pass
    explicit exponents to the quadrature layer instead.
    """
    left = side == "left"
    if isinstance(spec, Constant):
        return 0.0 if spec.c != 0.0 else math.inf
    if isinstance(spec, PowerLaw):
        if spec.c == 0.0:
            return math.inf
        return spec.alpha if left else 0.0
    if isinstance(spec, ShiftedPowerLaw):
        if spec.c == 0.0:
            return math.inf
        return 0.0 if left else spec.alpha
    if isinstance(spec, Exponential):
        return 0.0 if spec.c != 0.0 else math.inf
    if isinstance(spec, PiecewiseLinear):
        knots = spec.knots if left else tuple(reversed(spec.knots))
        v_end = knots[0][1]
        if v_end != 0.0:
            return 0.0
        if knots[1][1] != 0.0:
            return 1.0
        return math.inf
    if isinstance(spec, Step):
        vals = spec.values if left else tuple(reversed(spec.values))
        return 0.0 if vals[0] != 0.0 else math.inf
    if isinstance(spec, PiecewisePolynomial):
        if left:
            row = spec.coeffs[0]
            scale_ref = max((abs(c) for c in row), default=0.0)
            for j, c in enumerate(row):
                if abs(c) > 1e-14 * max(scale_ref, 1.0):
                    return float(j)
            return math.inf
        row = spec.coeffs[-1]
        w = spec.breaks[-1] - spec.breaks[-2]
        # order of the zero at the right edge of the last piece
        derivs = list(row)
        scale_ref = max((abs(c) * w ** j for j, c in enumerate(row)), default=0.0)
        for j in range(len(row)):
            val = sum(
                derivs[k] * math.comb(k, j) * math.factorial(j) * w ** (k - j)
                for k in range(j, len(row))
            )
            if abs(val) > 1e-10 * max(scale_ref, 1e-300):
                return float(j)
        return math.inf
    if isinstance(spec, Sum):
        return min(endpoint_exponent(t, interval, side) for t in spec.terms)
    if isinstance(spec, Product):
        return sum(endpoint_exponent(t, interval, side) for t in spec.terms)
    if isinstance(spec, Power):
        kappa = endpoint_exponent(spec.base, interval, side)
        if math.isinf(kappa) and spec.exponent < 0:
            return -math.inf
        return kappa * spec.exponent
    if isinstance(spec, AbsVal):
        return endpoint_exponent(spec.term, interval, side)
    return 0.0


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

_VARIANT_NAMES = {
    Constant: "Constant",
    PowerLaw: "PowerLaw",
    ShiftedPowerLaw: "ShiftedPowerLaw",
    Exponential: "Exponential",
    PiecewiseLinear: "PiecewiseLinear",
    Step: "Step",
    PiecewisePolynomial: "PiecewisePolynomial",
    Sum: "Sum",
    Product: "Product",
    Power: "Power",
    AbsVal: "Abs",
}


def spec_to_json(spec: FunctionSpec) -> dict:
    name = _VARIANT_NAMES[type(spec)]
    if isinstance(spec, Constant):
        return {"variant": name, "c": spec.c}
    if isinstance(spec, (PowerLaw, ShiftedPowerLaw)):
        return {"variant": name, "c": spec.c, "alpha": spec.alpha}
    if isinstance(spec, Exponential):
        return {"variant": name, "c": spec.c, "beta": spec.beta}
    if isinstance(spec, PiecewiseLinear):
        return {"variant": name, "knots": [[x, v] for x, v in spec.knots]}
    if isinstance(spec, Step):
        return {"variant": name, "breaks": list(spec.breaks), "values": list(spec.values)}
    if isinstance(spec, PiecewisePolynomial):
        return {
            "variant": name,
            "breaks": list(spec.breaks),
            "coeffs": [list(row) for row in spec.coeffs],
        }
    if isinstance(spec, (Sum, Product)):
        return {"variant": name, "terms": [spec_to_json(t) for t in spec.terms]}
    if isinstance(spec, Power):
        return {"variant": name, "base": spec_to_json(spec.base), "exponent": spec.exponent}
    if isinstance(spec, AbsVal):
        return {"variant": name, "term": spec_to_json(spec.term)}
    raise InvalidSpec(f"cannot serialize {type(spec).__name__}")


def spec_from_json(obj: dict) -> FunctionSpec:
    try:
        variant = obj["variant"]
    except (TypeError, KeyError):
        raise InvalidSpec("function spec JSON needs a 'variant' field")
    if variant == "Constant":
        return Constant(float(obj["c"]))
    if variant == "PowerLaw":
        return PowerLaw(float(obj["c"]), float(obj["alpha"]))
    if variant == "ShiftedPowerLaw":
        return ShiftedPowerLaw(float(obj["c"]), float(obj["alpha"]))
    if variant == "Exponential":
        return Exponential(float(obj["c"]), float(obj["beta"]))
    if variant == "PiecewiseLinear":
        return PiecewiseLinear(obj["knots"])
    if variant == "Step":
        return Step(obj["breaks"], obj["values"])
    if variant == "PiecewisePolynomial":
        return PiecewisePolynomial(obj["breaks"], obj["coeffs"])
    if variant == "Sum":
        return Sum([spec_from_json(t) for t in obj["terms"]])
    if variant == "Product":
        return Product([spec_from_json(t) for t in obj["terms"]])
    if variant == "Power":
        return Power(spec_from_json(obj["base"]), float(obj["exponent"]))
    if variant == "Abs":
        return AbsVal(spec_from_json(obj["term"]))
    raise InvalidSpec(f"unknown spec variant {variant!r}")


# ---------------------------------------------------------------------------
# random families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RandomPiecewiseLinear:
    """Random nonnegative piecewise-linear functions on the interval.

    Values are uniform in value_range; endpoints are kept away from zero
    unless vanish_at requests otherwise ("left", "right", "both").
    """

    n_knots: int
    value_range: tuple
    seed: int
    interval: Interval = field(default_factory=lambda: Interval(0.0, 1.0))
    vanish_at: str = "none"


@dataclass(frozen=True)
class RandomPowerLaw:
    alpha_range: tuple
    c_range: tuple
    seed: int
    interval: Interval = field(default_factory=lambda: Interval(0.0, 1.0))


@dataclass(frozen=True)
class GridPowerLaw:
    alpha_list: tuple
    seed: int = 0

    def __init__(self, alpha_list, seed: int = 0):
        object.__setattr__(self, "alpha_list", tuple(float(a) for a in alpha_list))
        object.__setattr__(self, "seed", seed)


FamilySpec = Union[RandomPiecewiseLinear, RandomPowerLaw, GridPowerLaw]


def _member_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0x7FFFFFFF, index])


def _random_pwl(fam: RandomPiecewiseLinear, index: int) -> PiecewiseLinear:
    rng = _member_rng(fam.seed, index)
    a, b = fam.interval.a, fam.interval.b
    lo, hi = fam.value_range
    if not (hi > lo >= 0.0):
        raise InvalidSpec("value_range must satisfy 0 <= lo < hi")
    n = fam.n_knots
    if n < 2:
        raise InvalidSpec("need at least 2 knots")
    if n == 2:
        xs = np.array([a, b])
    else:
        inner = np.sort(rng.uniform(a, b, size=n - 2))
        # keep knots separated so slopes stay bounded
        min_gap = 1e-3 * (b - a) / n
        for i in range(1, len(inner)):
            if inner[i] - inner[i - 1] < min_gap:
                inner[i] = inner[i - 1] + min_gap
        inner = np.clip(inner, a + min_gap, b - min_gap)
        xs = np.concatenate([[a], inner, [b]])
    vals = rng.uniform(lo, hi, size=n)
    floor = lo + 0.1 * (hi - lo)
    if fam.vanish_at in ("left", "both"):
        vals[0] = 0.0
    else:
        vals[0] = max(vals[0], floor)
    if fam.vanish_at in ("right", "both"):
        vals[-1] = 0.0
    else:
        vals[-1] = max(vals[-1], floor)
    return PiecewiseLinear(list(zip(xs.tolist(), vals.tolist())))


def sample_family(family: FamilySpec, count: int) -> list:
    """Deterministic family members; member i depends only on (seed, i).

    sample_family(fam, n) is therefore always a prefix of
    sample_family(fam, n + k).
    """
    if count < 1:
        raise InvalidSpec("count must be >= 1")
    if isinstance(family, GridPowerLaw):
        if count > len(family.alpha_list):
            raise InvalidSpec(
                f"grid family has {len(family.alpha_list)} members, requested {count}"
            )
        return [PowerLaw(1.0, alpha) for alpha in family.alpha_list[:count]]
    if isinstance(family, RandomPowerLaw):
        lo_a, hi_a = family.alpha_range
        lo_c, hi_c = family.c_range
        if not (hi_a >= lo_a and hi_c >= lo_c and lo_c > 0):
            raise InvalidSpec("empty or nonpositive parameter ranges")
        out = []
        for i in range(count):
            rng = _member_rng(family.seed, i)
            out.append(PowerLaw(float(rng.uniform(lo_c, hi_c)), float(rng.uniform(lo_a, hi_a))))
        return out
    if isinstance(family, RandomPiecewiseLinear):
        return [_random_pwl(family, i) for i in range(count)]
    raise InvalidSpec(f"unknown family {type(family).__name__}")


# ---------------------------------------------------------------------------
# program compilation (array evaluation kernel)
# ---------------------------------------------------------------------------

_OP_CONST = 0
_OP_POW_LEFT = 1
_OP_POW_RIGHT = 2
_OP_EXP = 3
_OP_PWL = 4
_OP_STEP = 5
_OP_PPOLY = 6
_OP_ADD = 7
_OP_MUL = 8
_OP_POWER = 9
_OP_ABS = 10


class Program:
    """Flat postfix program evaluating a spec on float64 arrays."""

    __slots__ = ("ops", "fargs", "iargs", "data", "stack_depth")

    def __init__(self, ops, fargs, iargs, data, stack_depth):
        self.ops = np.asarray(ops, dtype=np.int32)
        self.fargs = np.asarray(fargs, dtype=np.float64).reshape(len(ops), 3)
        self.iargs = np.asarray(iargs, dtype=np.int32).reshape(len(ops), 2)
        self.data = np.asarray(data, dtype=np.float64)
        self.stack_depth = stack_depth

    def __call__(self, xs: np.ndarray) -> np.ndarray:
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        shape = xs.shape
        out = _kernel.eval_program(
            self.ops, self.fargs, self.iargs, self.data, xs.ravel(), self.stack_depth
        )
        return out.reshape(shape)


def _compile_into(spec, interval, ops, fargs, iargs, data):
    """Returns the stack depth needed by this subtree."""
    a, b = interval.a, interval.b
    if isinstance(spec, Constant):
        ops.append(_OP_CONST)
        fargs.append((spec.c, 0.0, 0.0))
        iargs.append((0, 0))
        return 1
    if isinstance(spec, PowerLaw):
        ops.append(_OP_POW_LEFT)
        fargs.append((spec.c, spec.alpha, a))
        iargs.append((0, 0))
        return 1
    if isinstance(spec, ShiftedPowerLaw):
        ops.append(_OP_POW_RIGHT)
        fargs.append((spec.c, spec.alpha, b))
        iargs.append((0, 0))
        return 1
    if isinstance(spec, Exponential):
        ops.append(_OP_EXP)
        fargs.append((spec.c, spec.beta, 0.0))
        iargs.append((0, 0))
        return 1
    if isinstance(spec, PiecewiseLinear):
        off = len(data)
        n = len(spec.knots)
        data.extend(x for x, _ in spec.knots)
        data.extend(v for _, v in spec.knots)
        ops.append(_OP_PWL)
        fargs.append((0.0, 0.0, 0.0))
        iargs.append((off, n))
        return 1
    if isinstance(spec, Step):
        off = len(data)
        n = len(spec.values)
        data.extend(spec.breaks)
        data.extend(spec.values)
        ops.append(_OP_STEP)
        fargs.append((0.0, 0.0, 0.0))
        iargs.append((off, n))
        return 1
    if isinstance(spec, PiecewisePolynomial):
        off = len(data)
        n = len(spec.coeffs)
        deg = max(len(row) for row in spec.coeffs) - 1
        data.extend(spec.breaks)
        for row in spec.coeffs:
            padded = list(row) + [0.0] * (deg + 1 - len(row))
            data.extend(padded)
        ops.append(_OP_PPOLY)
        fargs.append((float(deg), 0.0, 0.0))
        iargs.append((off, n))
        return 1
    if isinstance(spec, (Sum, Product)):
        opcode = _OP_ADD if isinstance(spec, Sum) else _OP_MUL
        depth = 0
        for i, term in enumerate(spec.terms):
            d = _compile_into(term, interval, ops, fargs, iargs, data)
            depth = max(depth, d + min(i, 1))
            if i > 0:
                ops.append(opcode)
                fargs.append((0.0, 0.0, 0.0))
                iargs.append((0, 0))
        return max(depth, 1)
    if isinstance(spec, Power):
        d = _compile_into(spec.base, interval, ops, fargs, iargs, data)
        ops.append(_OP_POWER)
        fargs.append((spec.exponent, 0.0, 0.0))
        iargs.append((0, 0))
        return d
    if isinstance(spec, AbsVal):
        d = _compile_into(spec.term, interval, ops, fargs, iargs, data)
        ops.append(_OP_ABS)
        fargs.append((0.0, 0.0, 0.0))
        iargs.append((0, 0))
        return d
    raise InvalidSpec(f"cannot compile {type(spec).__name__}")


_PROGRAM_CACHE: dict = {}
_PROGRAM_CACHE_MAX = 4096


def compile_program(spec: FunctionSpec, interval: Interval) -> Program:
    key = (spec, interval)
    prog = _PROGRAM_CACHE.get(key)
    if prog is not None:
        return prog
    ops: list = []
    fargs: list = []
    iargs: list = []
    data: list = []
    depth = _compile_into(spec, interval, ops, fargs, iargs, data)
    prog = Program(ops, fargs, iargs, data, depth)
    if len(_PROGRAM_CACHE) >= _PROGRAM_CACHE_MAX:
        _PROGRAM_CACHE.clear()
    _PROGRAM_CACHE[key] = prog
    return prog
