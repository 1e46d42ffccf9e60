"""
Risk measures

Right and left quantiles (VaR), Expected Shortfall, left Expected
Shortfall and expectiles. Discrete laws and finite random variables are
evaluated exactly (rational in, rational out); samples are treated as
their empirical law through order statistics; parametric laws use closed
forms, quadrature on the quantile scale or monotone root finding.
"""

import logging
import math
from fractions import Fraction
from typing import Callable, Tuple, Union

import numpy as np
from scipy import integrate, optimize, special

from .config import settings
from .errors import InfiniteMeanError, LevelDomainError
from .probspace import (
    SQRT_2PI,
    DiscreteDistribution,
    Distribution,
    Exponential,
    LocationScale,
    Normal,
    Number,
    ParametricDistribution,
    Pareto,
    as_law,
    exact_level,
)

logger = logging.getLogger(__name__)

Measurable = Union[Distribution, np.ndarray]

MEASURES = ("varr", "varl", "es", "esl", "ex")


def check_level(p: Number) -> None:
    """Levels must lie strictly inside (0,1)"""
    if not 0 < p < 1:
        raise LevelDomainError(f"level must lie in (0,1), got {p}")


# Empirical laws given as sorted numpy samples

def _floor_np(n: int, p: Number) -> int:
    return math.floor(n * exact_level(p))


def empirical_quantile_right(xs: np.ndarray, p: Number) -> float:
    """X_(floor(np)+1) in 1-indexed order statistics"""
    n = len(xs)
    return float(xs[min(_floor_np(n, p), n - 1)])


def empirical_quantile_left(xs: np.ndarray, p: Number) -> float:
    """X_(ceil(np)) in 1-indexed order statistics"""
    n = len(xs)
    k = math.ceil(n * exact_level(p))
    return float(xs[max(k - 1, 0)])


def empirical_es(xs: np.ndarray, p: Number) -> float:
    n = len(xs)
    k = _floor_np(n, p)
    pf = float(p)
    boundary = ((k + 1) / n - pf) * xs[k]
    return float((boundary + xs[k + 1:].sum() / n) / (1.0 - pf))


def empirical_es_left(xs: np.ndarray, p: Number) -> float:
    n = len(xs)
    k = _floor_np(n, p)
    pf = float(p)
    boundary = (pf - k / n) * xs[k]
    return float((xs[:k].sum() / n + boundary) / pf)


def empirical_expectile(xs: np.ndarray, p: Number) -> float:
    """Root of the piecewise-linear identification function of the sample"""
    n = len(xs)
    pf = float(p)
    if xs[0] == xs[-1]:
        return float(xs[0])
    csum = np.cumsum(xs)
    total = csum[-1]
    idx = np.arange(n)
    # partial moments evaluated at each order statistic
    upper = (total - csum) - (n - 1 - idx) * xs
    lower = (idx + 1) * xs - csum
    psi = pf * upper - (1.0 - pf) * lower
    i = int(np.argmax(psi <= 0))
    if i == 0:
        return float(xs[0])
    c = i / n
    d = csum[i - 1] / n
    a = (total - csum[i - 1]) / n
    b = 1.0 - c
    root = (pf * a + (1.0 - pf) * d) / (pf * b + (1.0 - pf) * c)
    return float(min(max(root, xs[i - 1]), xs[i]))


# Discrete laws, exact arithmetic

def _discrete_quantile(law: DiscreteDistribution, p: Number, strict: bool) -> Number:
    level = exact_level(p)
    for value, cum in zip(law.support, law.cumulative()):
        if (cum > level) if strict else (cum >= level):
            return value
    return law.support[-1]


def _discrete_es(law: DiscreteDistribution, p: Number) -> Number:
    level = exact_level(p)
    acc: Number = Fraction(0)
    prev: Number = Fraction(0)
    for value, cum in zip(law.support, law.cumulative()):
        overlap = cum - max(prev, level)
        if overlap > 0:
            acc = acc + overlap * value
        prev = cum
    return acc / (1 - level)


def _discrete_es_left(law: DiscreteDistribution, p: Number) -> Number:
    level = exact_level(p)
    acc: Number = Fraction(0)
    prev: Number = Fraction(0)
    for value, cum in zip(law.support, law.cumulative()):
        overlap = min(cum, level) - prev
        if overlap > 0:
            acc = acc + overlap * value
        prev = cum
    return acc / level


def _discrete_expectile(law: DiscreteDistribution, p: Number) -> Number:
    level = exact_level(p)
    xs, ws = law.support, law.probs
    if len(xs) == 1:
        return xs[0]
    total_mass: Number = sum(ws, Fraction(0))
    mean = law.mean()
    c: Number = Fraction(0)
    d: Number = Fraction(0)
    for k in range(len(xs) - 1):
        c = c + ws[k]
        d = d + ws[k] * xs[k]
        a = mean - d
        b = total_mass - c
        root = (level * a + (1 - level) * d) / (level * b + (1 - level) * c)
        if xs[k] <= root <= xs[k + 1]:
            return root
    # unreachable for a valid law, kept for float round-off
    logger.debug("Expectile scan fell through at level %s, clamping", p)
    return xs[-1] if level > Fraction(1, 2) else xs[0]


# Parametric laws

def _quad(func: Callable[[float], float], a: float, b: float) -> Tuple[float, float]:
    value, err = integrate.quad(func, a, b, epsabs=settings.quad_tol, epsrel=1e-12, limit=400)
    if err > max(settings.quad_tol, 1e-10 * abs(value)):
        logger.warning("Quadrature on [%g, %g] reports error %.3g above tolerance", a, b, err)
    return float(value), float(err)


def es_by_quadrature(dist: ParametricDistribution, p: float) -> float:
    """ES as the average of the quantile function over (p,1)"""
    if dist.moment_exponent <= 1:
        return math.inf
    value, _ = _quad(lambda u: float(dist.quantile(u)), p, 1.0)
    return value / (1.0 - p)


def es_left_by_quadrature(dist: ParametricDistribution, p: float) -> float:
    if dist.moment_exponent <= 1 and dist.support()[0] == -math.inf:
        return -math.inf
    value, _ = _quad(lambda u: float(dist.quantile(u)), 0.0, p)
    return value / p


def _parametric_es(dist: ParametricDistribution, p: float) -> float:
    if isinstance(dist, Normal):
        z = float(special.ndtri(p))
        return dist.mu + dist.sigma * math.exp(-0.5 * z * z) / SQRT_2PI / (1.0 - p)
    if isinstance(dist, Exponential):
        return (1.0 - math.log1p(-p)) / dist.rate
    if isinstance(dist, Pareto):
        if dist.alpha <= 1:
            return math.inf
        return dist.alpha / (dist.alpha - 1) * (1.0 - p) ** (-1.0 / dist.alpha)
    if isinstance(dist, LocationScale):
        return dist.shift + dist.scale * _parametric_es(dist.base, p)
    if dist.moment_exponent <= 1:
        return math.inf
    q = float(dist.quantile(p))
    return q + dist.upper_partial_moment(q) / (1.0 - p)


def _parametric_es_left(dist: ParametricDistribution, p: float) -> float:
    if isinstance(dist, Normal):
        z = float(special.ndtri(p))
        return dist.mu - dist.sigma * math.exp(-0.5 * z * z) / SQRT_2PI / p
    if isinstance(dist, Exponential):
        return ((1.0 - p) * math.log1p(-p) + p) / (p * dist.rate)
    if isinstance(dist, Pareto):
        a = dist.alpha
        if a == 1:
            return -math.log1p(-p) / p
        return (1.0 - (1.0 - p) ** (1.0 - 1.0 / a)) / ((1.0 - 1.0 / a) * p)
    if isinstance(dist, LocationScale):
        return dist.shift + dist.scale * _parametric_es_left(dist.base, p)
    if dist.moment_exponent <= 1:
        return es_left_by_quadrature(dist, p)
    q = float(dist.quantile(p))
    return q - dist.lower_partial_moment(q) / p


def _parametric_expectile(dist: ParametricDistribution, p: float) -> float:
    mean = dist.mean()
    if p == 0.5:
        return mean

    def psi(x: float) -> float:
        return (2.0 * p - 1.0) * dist.upper_partial_moment(x) + (1.0 - p) * (mean - x)

    lo, hi = float(dist.quantile(1e-6)), float(dist.quantile(1 - 1e-6))
    width = max(hi - lo, 1.0)
    # psi is strictly decreasing; widen until it changes sign
    while psi(lo) < 0:
        lo -= width
        width *= 2
    while psi(hi) > 0:
        hi += width
        width *= 2
    return float(optimize.brentq(psi, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=500))


# Public dispatch

def quantile_right(dist: Measurable, p: Number) -> Number:
    """inf{x : P(X <= x) > p}"""
    check_level(p)
    if isinstance(dist, np.ndarray):
        return empirical_quantile_right(np.sort(dist), p)
    law = as_law(dist)
    if isinstance(law, DiscreteDistribution):
        return _discrete_quantile(law, p, strict=True)
    return float(law.quantile(float(p)))


def quantile_left(dist: Measurable, p: Number) -> Number:
    """inf{x : P(X <= x) >= p}"""
    check_level(p)
    if isinstance(dist, np.ndarray):
        return empirical_quantile_left(np.sort(dist), p)
    law = as_law(dist)
    if isinstance(law, DiscreteDistribution):
        return _discrete_quantile(law, p, strict=False)
    return float(law.quantile(float(p)))


def es(dist: Measurable, p: Number) -> Number:
    """Expected Shortfall: average of the quantile over (p,1); may be +inf"""
    check_level(p)
    if isinstance(dist, np.ndarray):
        return empirical_es(np.sort(dist), p)
    law = as_law(dist)
    if isinstance(law, DiscreteDistribution):
        return _discrete_es(law, p)
    return _parametric_es(law, float(p))


def es_left(dist: Measurable, p: Number) -> Number:
    """Left Expected Shortfall: average of the quantile over (0,p); may be -inf"""
    check_level(p)
    if isinstance(dist, np.ndarray):
        return empirical_es_left(np.sort(dist), p)
    law = as_law(dist)
    if isinstance(law, DiscreteDistribution):
        return _discrete_es_left(law, p)
    return _parametric_es_left(law, float(p))


def expectile(dist: Measurable, p: Number) -> Number:
    """Unique root of p E[(X-x)+] = (1-p) E[(X-x)-]"""
    check_level(p)
    if isinstance(dist, np.ndarray):
        return empirical_expectile(np.sort(dist), p)
    law = as_law(dist)
    if isinstance(law, DiscreteDistribution):
        return _discrete_expectile(law, p)
    if not law.has_finite_mean():
        raise InfiniteMeanError(f"expectile of {law.describe()} needs a finite mean")
    return _parametric_expectile(law, float(p))


def mean_of(dist: Measurable) -> Number:
    if isinstance(dist, np.ndarray):
        return float(dist.mean())
    return as_law(dist).mean()


_DISPATCH = {
    "varr": quantile_right,
    "varl": quantile_left,
    "es": es,
    "esl": es_left,
    "ex": expectile,
}


def risk_measure(name: str) -> Callable[[Measurable, Number], Number]:
    if name not in _DISPATCH:
        raise KeyError(f"Risk measure '{name}' not found")
    return _DISPATCH[name]
