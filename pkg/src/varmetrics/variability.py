"""
Variability measures

The inter-quantile, inter-ES and inter-expectile differences, the range,
the classic dispersion measures (variance, STD, MAD, MMD, Gini deviation,
relative deviation, Gini coefficient), mixtures of inter-ES differences
over a measure on (0,1], and the `measure` command.
"""

import asyncio
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from .config import settings
from .errors import InvalidParameterError, LevelDomainError
from .output import CommandResult
from .probspace import (
    DiscreteDistribution,
    Exponential,
    LocationScale,
    Normal,
    Number,
    ParametricDistribution,
    Pareto,
    as_law,
    complement,
    parse_distribution,
)
from .riskmeasures import (
    Measurable,
    MEASURES as RISK_MEASURES,
    check_level,
    empirical_es,
    empirical_es_left,
    empirical_expectile,
    empirical_quantile_left,
    empirical_quantile_right,
    es,
    es_left,
    expectile,
    quantile_left,
    quantile_right,
    risk_measure,
)

logger = logging.getLogger(__name__)


class VariabilityKind(str, Enum):
    DELTA_Q = "dq"
    DELTA_ES = "des"
    DELTA_EX = "dex"
    RANGE = "range"
    VARIANCE = "var"
    STD = "std"
    MAD = "mad"
    MMD = "mmd"
    GINI_D = "gini"
    RELATIVE_DEVIATION = "reldev"
    GINI_COEFFICIENT = "ginicoef"

    @property
    def needs_level(self) -> bool:
        return self in (VariabilityKind.DELTA_Q, VariabilityKind.DELTA_ES, VariabilityKind.DELTA_EX)

    def level_ok(self, p: Number) -> bool:
        """Whether p lies in the level domain of this measure"""
        if self is VariabilityKind.DELTA_Q:
            return Fraction(1, 2) <= p < 1
        if self is VariabilityKind.DELTA_ES:
            return 0 < p < 1
        if self is VariabilityKind.DELTA_EX:
            return Fraction(1, 2) < p < 1
        return True


def _check_domain(kind: VariabilityKind, p: Number, allow_any_level: bool) -> None:
    if kind.level_ok(p):
        return
    if allow_any_level and 0 < p < 1:
        logger.warning("Level %s is outside the usual domain of %s, evaluating anyway", p, kind.value)
        return
    raise LevelDomainError(f"level {p} is outside the domain of {kind.value}")


def _is_unbounded_l1(dist: Measurable) -> bool:
    if isinstance(dist, ParametricDistribution):
        return not dist.has_finite_mean()
    return False


# Induced variability measures

def delta_q(dist: Measurable, p: Number, allow_any_level: bool = False) -> Number:
    """Q_p(X) - Q-_{1-p}(X); the level 1 gives the range"""
    if p == 1:
        return range_measure(dist)
    _check_domain(VariabilityKind.DELTA_Q, p, allow_any_level)
    return quantile_right(dist, p) - quantile_left(dist, complement(p))


def delta_es(dist: Measurable, p: Number) -> Number:
    """ES_p(X) - ES-_{1-p}(X); +inf off L1, the range at level 1"""
    if p == 1:
        return range_measure(dist)
    _check_domain(VariabilityKind.DELTA_ES, p, False)
    upper = es(dist, p)
    lower = es_left(dist, complement(p))
    if math.isinf(upper) or math.isinf(lower):
        return math.inf
    return upper - lower


def delta_ex(dist: Measurable, p: Number, allow_any_level: bool = False) -> Number:
    """ex_p(X) - ex_{1-p}(X); +inf when the mean is infinite"""
    _check_domain(VariabilityKind.DELTA_EX, p, allow_any_level)
    if _is_unbounded_l1(dist):
        return math.inf
    return expectile(dist, p) - expectile(dist, complement(p))


def sample_estimate(xs_sorted: np.ndarray, estimator: str, p: Number) -> float:
    """Empirical-law value of dq, des or dex on a sorted sample"""
    q = complement(p)
    if estimator == "dq":
        return empirical_quantile_right(xs_sorted, p) - empirical_quantile_left(xs_sorted, q)
    if estimator == "des":
        return empirical_es(xs_sorted, p) - empirical_es_left(xs_sorted, q)
    if estimator == "dex":
        return empirical_expectile(xs_sorted, p) - empirical_expectile(xs_sorted, q)
    raise KeyError(f"Estimator '{estimator}' not found")


def inter_risk_difference(upper: Callable[[Measurable], Number],
                          lower: Callable[[Measurable], Number],
                          dist: Measurable) -> Number:
    """rho1(X) - rho2(X) for a pair of risk measures with rho1 >= rho2"""
    hi = upper(dist)
    lo = lower(dist)
    if math.isinf(hi) or math.isinf(lo):
        if hi == lo:
            raise InvalidParameterError("both risk measures are infinite with the same sign")
        if hi < lo:
            raise InvalidParameterError("upper risk measure is below the lower one")
        return math.inf
    diff = hi - lo
    if diff < -1e-12 * (1 + abs(hi) + abs(lo)):
        raise InvalidParameterError(f"upper risk measure {hi} is below the lower one {lo}")
    return diff if diff > 0 else 0 * diff


# Classic measures

def range_measure(dist: Measurable) -> Number:
    if isinstance(dist, np.ndarray):
        return float(dist.max() - dist.min())
    law = as_law(dist)
    if isinstance(law, DiscreteDistribution):
        lo, hi = law.support_bounds()
        return hi - lo
    lo_f, hi_f = law.support()
    return hi_f - lo_f


def variance(dist: Measurable) -> Number:
    if isinstance(dist, np.ndarray):
        return float(np.var(dist))
    law = as_law(dist)
    if isinstance(law, DiscreteDistribution):
        m = law.mean()
        return sum(((v - m) ** 2 * w for v, w in zip(law.support, law.probs)), Fraction(0))
    return law.variance()


def std(dist: Measurable) -> float:
    return math.sqrt(float(variance(dist)))


def mad(dist: Measurable) -> Number:
    """E|X - E[X]|"""
    if isinstance(dist, np.ndarray):
        return float(np.abs(dist - dist.mean()).mean())
    law = as_law(dist)
    if isinstance(law, ParametricDistribution) and not law.has_finite_mean():
        return math.inf
    return 2 * law.upper_partial_moment(law.mean())


def mmd(dist: Measurable) -> Number:
    """E|X - Q_{1/2}(X)|, the minimal mean absolute deviation"""
    if isinstance(dist, np.ndarray):
        return float(np.abs(dist - np.median(dist)).mean())
    law = as_law(dist)
    if isinstance(law, DiscreteDistribution):
        med = quantile_left(law, Fraction(1, 2))
        return law.upper_partial_moment(med) + law.lower_partial_moment(med)
    if not law.has_finite_mean():
        return math.inf
    med = float(law.quantile(0.5))
    return 2 * law.upper_partial_moment(med) - (law.mean() - med)


def gini_d(dist: Measurable) -> Number:
    """Gini deviation: half the mean absolute difference of two iid copies"""
    if isinstance(dist, np.ndarray):
        xs = np.sort(dist)
        n = len(xs)
        coef = 2 * np.arange(1, n + 1) - n - 1
        return float((coef * xs).sum() / n ** 2)
    law = as_law(dist)
    if isinstance(law, DiscreteDistribution):
        xs, ws = law.support, law.probs
        total: Number = Fraction(0)
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                total = total + ws[i] * ws[j] * (xs[j] - xs[i])
        return total
    return _parametric_gini_d(law)


def _parametric_gini_d(dist: ParametricDistribution) -> float:
    if not dist.has_finite_mean():
        return math.inf
    if isinstance(dist, Normal):
        return dist.sigma / math.sqrt(math.pi)
    if isinstance(dist, Exponential):
        return 0.5 / dist.rate
    if isinstance(dist, Pareto):
        a = dist.alpha
        return a / ((a - 1) * (2 * a - 1))
    if isinstance(dist, LocationScale):
        return dist.scale * _parametric_gini_d(dist.base)
    value, _ = integrate.quad(lambda u: (2 * u - 1) * float(dist.quantile(u)), 0.0, 1.0,
                              epsabs=settings.quad_tol, limit=400)
    return float(value)


def _nonnegative_mean(dist: Measurable) -> Number:
    if isinstance(dist, np.ndarray):
        if dist.min() < 0:
            raise InvalidParameterError("sample has negative values")
        m: Number = float(dist.mean())
    else:
        law = as_law(dist)
        if isinstance(law, DiscreteDistribution):
            if law.support[0] < 0:
                raise InvalidParameterError("distribution puts mass on negative values")
        elif law.support()[0] < 0:
            raise InvalidParameterError(f"{law.describe()} is not supported on [0, inf)")
        m = law.mean()
    if m == 0:
        raise InvalidParameterError("relative measures need a positive mean")
    return m


def relative_deviation(dist: Measurable) -> Number:
    """SD(X) / E[X] for nonnegative X"""
    m = _nonnegative_mean(dist)
    return std(dist) / float(m)


def gini_coefficient(dist: Measurable) -> Number:
    """Gini deviation over the mean for nonnegative X"""
    m = _nonnegative_mean(dist)
    g = gini_d(dist)
    if isinstance(g, Fraction) and isinstance(m, Fraction):
        return g / m
    return float(g) / float(m)


_UNARY = {
    VariabilityKind.RANGE: range_measure,
    VariabilityKind.VARIANCE: variance,
    VariabilityKind.STD: std,
    VariabilityKind.MAD: mad,
    VariabilityKind.MMD: mmd,
    VariabilityKind.GINI_D: gini_d,
    VariabilityKind.RELATIVE_DEVIATION: relative_deviation,
    VariabilityKind.GINI_COEFFICIENT: gini_coefficient,
}


def evaluate(kind: Union[VariabilityKind, str], dist: Measurable,
             p: Optional[Number] = None, allow_any_level: bool = False) -> Number:
    """Evaluate a variability measure by tag"""
    kind = VariabilityKind(kind)
    if kind.needs_level:
        if p is None:
            raise LevelDomainError(f"{kind.value} needs a level p")
        if kind is VariabilityKind.DELTA_Q:
            return delta_q(dist, p, allow_any_level)
        if kind is VariabilityKind.DELTA_ES:
            return delta_es(dist, p)
        return delta_ex(dist, p, allow_any_level)
    return _UNARY[kind](dist)


# Mixtures of inter-ES differences

@dataclass(frozen=True)
class MixtureMeasure:
    """Finite measure on (0,1]: point masses plus an optional density"""

    atoms: Tuple[Tuple[Number, Number], ...] = ()
    density: Optional[Callable[[float], float]] = None
    tol: float = 1e-10

    def __post_init__(self) -> None:
        for loc, weight in self.atoms:
            if not 0 < loc <= 1:
                raise InvalidParameterError(f"atom location {loc} is outside (0,1]")
            if not weight > 0:
                raise InvalidParameterError(f"atom weight {weight} must be positive")
        if self.total_mass() <= 0:
            raise InvalidParameterError("mixture measure must have positive total mass")

    def density_mass(self) -> float:
        if self.density is None:
            return 0.0
        value, _ = integrate.quad(self.density, 0.0, 1.0, epsabs=self.tol, limit=200)
        return float(value)

    def total_mass(self) -> float:
        return float(sum(w for _, w in self.atoms)) + self.density_mass()

    @classmethod
    def dirac(cls, p: Number) -> "MixtureMeasure":
        return cls(atoms=((p, Fraction(1)),))

    @classmethod
    def gini(cls) -> "MixtureMeasure":
        """(1 - x) dx, whose inter-ES mixture is the Gini deviation"""
        return cls(density=lambda x: 1.0 - x)


def _es_breakpoints(dist: Measurable) -> List[float]:
    law = as_law(dist) if not isinstance(dist, np.ndarray) else None
    if not isinstance(law, DiscreteDistribution):
        return []
    points = set()
    for cum in law.cumulative()[:-1]:
        points.add(float(cum))
        points.add(1.0 - float(cum))
    return sorted(x for x in points if 0 < x < 1)


def mixture_es(dist: Measurable, mu: MixtureMeasure) -> Number:
    """Integral of the inter-ES difference against mu"""
    total: Number = Fraction(0)
    for loc, weight in mu.atoms:
        term = delta_es(dist, loc)
        if math.isinf(term):
            return math.inf
        total = total + weight * term
    if mu.density is None:
        return total
    density = mu.density

    def integrand(p: float) -> float:
        return float(delta_es(dist, p)) * density(p)

    if isinstance(dist, ParametricDistribution) and not dist.has_finite_mean():
        return math.inf
    points = _es_breakpoints(dist)
    value, err = integrate.quad(integrand, 0.0, 1.0, epsabs=mu.tol, epsrel=1e-12,
                                points=points or None, limit=max(200, 4 * len(points)))
    if err > mu.tol:
        logger.warning("Mixture integral error %.3g exceeds tolerance %.3g", err, mu.tol)
    return float(total) + float(value)


# Symmetric-law identities

@dataclass(frozen=True)
class SymmetricReport:
    p: float
    residual_q: float
    residual_es: float
    residual_ex: float

    @property
    def max_residual(self) -> float:
        return max(self.residual_q, self.residual_es, self.residual_ex)


def symmetric_identities_check(dist: Measurable, p: Number) -> SymmetricReport:
    """Residuals of the identities that hold when X and -X share a law"""
    check_level(p)
    rq = delta_q(dist, p) + 2 * quantile_left(dist, complement(p))
    res = delta_es(dist, p) + 2 * es_left(dist, complement(p))
    rex = delta_ex(dist, p) - 2 * expectile(dist, p)
    return SymmetricReport(float(p), abs(float(rq)), abs(float(res)), abs(float(rex)))


# measure command

@dataclass
class MeasureInput:
    dist: str
    measure: str
    p: Optional[float] = None
    allow_any_level: bool = False


MEASURE_NAMES: Sequence[str] = tuple(RISK_MEASURES) + tuple(k.value for k in VariabilityKind)


def _measure_sync(input: MeasureInput) -> CommandResult:
    dist = parse_distribution(input.dist)
    level: Optional[Number] = input.p
    if input.measure in RISK_MEASURES:
        if level is None:
            raise LevelDomainError(f"{input.measure} needs a level p")
        value = risk_measure(input.measure)(dist, level)
    elif input.measure in MEASURE_NAMES:
        value = evaluate(input.measure, dist, level, input.allow_any_level)
    else:
        raise InvalidParameterError(
            f"Unknown measure '{input.measure}', expected one of {', '.join(MEASURE_NAMES)}"
        )
    logger.info("%s of %s at p=%s is %s", input.measure, input.dist, input.p, value)
    return CommandResult(
        command="measure",
        fields={"dist": input.dist, "measure": input.measure, "p": input.p, "value": value},
        primary="value",
    )


async def measure(input: MeasureInput) -> CommandResult:
    """Evaluate one risk or variability measure on a distribution spec"""
    return await asyncio.to_thread(_measure_sync, input)
