"""
Asymptotic variances of the empirical inter-quantile, inter-ES and
inter-expectile differences.

Each estimator is asymptotically linear with a step weight function w on
the quantile scale, and its limiting variance is the quadratic form

    Q(w, w) = int int w(u) w(v) (u ^ v - uv) / (g(u) g(v)) du dv,

with g = f o F^-1. Substituting x = F^-1(u) turns the blocks of that form
into integrals of F and 1 - F, so off-diagonal blocks reduce to partial
moments and diagonal blocks to one adaptive quadrature each.
"""

import asyncio
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .config import settings
from .errors import AssumptionError, DivergentIntegralError, InvalidParameterError, LevelDomainError
from .output import CommandResult
from .probspace import (
    Distribution,
    Exponential,
    LocationScale,
    ParametricDistribution,
    Pareto,
    parse_distribution,
)
from .riskmeasures import expectile

logger = logging.getLogger(__name__)

ESTIMATORS = ("dq", "des", "dex")


@dataclass(frozen=True)
class QuantileDensity:
    """g(t) = f(F^-1(t)) for a law with a positive density on its support"""

    dist: ParametricDistribution

    def __call__(self, t: float) -> float:
        if not 0 < t < 1:
            raise LevelDomainError(f"quantile density is defined on (0,1), got {t}")
        return self._g(self.dist, t)

    @classmethod
    def _g(cls, dist: ParametricDistribution, t: float) -> float:
        if isinstance(dist, Exponential):
            return dist.rate * (1.0 - t)
        if isinstance(dist, Pareto):
            return dist.alpha * (1.0 - t) ** (1.0 + 1.0 / dist.alpha)
        if isinstance(dist, LocationScale):
            return cls._g(dist.base, t) / dist.scale
        return float(dist.density(dist.quantile(t)))


@dataclass
class AsymVarReport:
    sigma_sq: float
    method: str
    est_abs_error: float
    components: Dict[str, float] = field(default_factory=dict)


def _require_regular(dist: Distribution) -> ParametricDistribution:
    if not isinstance(dist, ParametricDistribution):
        raise AssumptionError(
            "asymptotic variances need a law with a positive density on an interval support"
        )
    return dist


def _require_level(p: float) -> None:
    if not 0.5 < p < 1:
        raise LevelDomainError(f"asymptotic variances are defined for p in (1/2,1), got {p}")


def _require_moments(dist: ParametricDistribution) -> None:
    if not dist.moment_exponent > 2:
        raise DivergentIntegralError(
            f"{dist.describe()} lacks a (2+delta)-th moment; the variance integral diverges"
        )


def g_eval(dist: Distribution, t: float) -> float:
    return QuantileDensity(_require_regular(dist))(t)


def sigma_q_sq(dist: Distribution, p: float) -> AsymVarReport:
    law = _require_regular(dist)
    _require_level(p)
    g = QuantileDensity(law)
    gp, gq = g(p), g(1.0 - p)
    if not (gp > 0 and gq > 0):
        raise AssumptionError(f"density vanishes at the quantiles of level {p}")
    value = p * (1 - p) / gp ** 2 + p * (1 - p) / gq ** 2 - 2 * (1 - p) ** 2 / (gp * gq)
    return AsymVarReport(max(value, 0.0), "closed_form", 0.0)


class _KernelBlocks:
    """Blocks of the bridge kernel over consecutive x-intervals"""

    def __init__(self, dist: ParametricDistribution, cuts: Sequence[float], tol: float) -> None:
        self.dist = dist
        self.cuts = list(cuts)
        self.tol = tol
        self.size = len(self.cuts) - 1
        self.value = np.zeros((self.size, self.size))
        self.error = np.zeros((self.size, self.size))
        self._computed = np.zeros((self.size, self.size), dtype=bool)

    def _upper(self, x: float) -> float:
        return 0.0 if x == math.inf else self.dist.upper_partial_moment(x)

    def _lower(self, x: float) -> float:
        return 0.0 if x == -math.inf else self.dist.lower_partial_moment(x)

    def _integral_cdf(self, i: int) -> float:
        # int_{cell i} F(x) dx
        return self._lower(self.cuts[i + 1]) - self._lower(self.cuts[i])

    def _integral_sf(self, j: int) -> float:
        # int_{cell j} (1 - F(x)) dx
        return self._upper(self.cuts[j]) - self._upper(self.cuts[j + 1])

    def _diagonal(self, i: int) -> Tuple[float, float]:
        a, b = self.cuts[i], self.cuts[i + 1]
        base = self._lower(a)
        dist = self.dist

        def integrand(y: float) -> float:
            return float(dist.sf(y)) * (dist.lower_partial_moment(y) - base)

        value, err = integrate.quad(integrand, a, b, epsabs=self.tol / 2, epsrel=1e-10, limit=500)
        if err > self.tol:
            logger.warning("Diagonal block on [%g, %g] has error %.3g above tolerance", a, b, err)
        return 2.0 * float(value), 2.0 * float(err)

    def block(self, i: int, j: int) -> Tuple[float, float]:
        if i > j:
            i, j = j, i
        if not self._computed[i, j]:
            if i == j:
                v, e = self._diagonal(i)
            else:
                v, e = self._integral_cdf(i) * self._integral_sf(j), 0.0
            self.value[i, j] = self.value[j, i] = v
            self.error[i, j] = self.error[j, i] = e
            self._computed[i, j] = self._computed[j, i] = True
        return float(self.value[i, j]), float(self.error[i, j])

    def quadratic_form(self, w1: Sequence[float], w2: Sequence[float]) -> Tuple[float, float]:
        """Sum of w1_i w2_j K_ij in a fixed (i, j) order"""
        total, err = 0.0, 0.0
        for i in range(self.size):
            for j in range(self.size):
                if w1[i] == 0 or w2[j] == 0:
                    continue
                v, e = self.block(i, j)
                total += w1[i] * w2[j] * v
                err += abs(w1[i] * w2[j]) * e
        return total, err


def sigma_es_sq(dist: Distribution, p: float, tol: Optional[float] = None) -> AsymVarReport:
    law = _require_regular(dist)
    _require_level(p)
    _require_moments(law)
    lo, hi = law.support()
    cuts = [lo, float(law.quantile(1.0 - p)), float(law.quantile(p)), hi]
    blocks = _KernelBlocks(law, cuts, tol or settings.quad_tol)
    c = 1.0 / (1.0 - p)
    weights = [-c, 0.0, c]
    value, err = blocks.quadratic_form(weights, weights)
    upper, _ = blocks.block(2, 2)
    lower, _ = blocks.block(0, 0)
    cross, _ = blocks.block(0, 2)
    return AsymVarReport(
        max(value, 0.0), "quadrature", err,
        {"upper_block": c * c * upper, "lower_block": c * c * lower, "cross_block": c * c * cross},
    )


def expectile_weights(dist: ParametricDistribution, r: float) -> Tuple[float, float, float]:
    """(F(ex_r), weight below, weight above) of the expectile influence step"""
    split = float(dist.cdf(expectile(dist, r)))
    denom = (1.0 - 2.0 * r) * split + r
    return split, (1.0 - r) / denom, r / denom


def sigma_ex_sq(dist: Distribution, p: float, tol: Optional[float] = None) -> AsymVarReport:
    law = _require_regular(dist)
    _require_level(p)
    _require_moments(law)
    lo, hi = law.support()
    e_low = float(expectile(law, 1.0 - p))
    e_high = float(expectile(law, p))
    cuts = [lo, e_low, e_high, hi]
    blocks = _KernelBlocks(law, cuts, tol or settings.quad_tol)

    def weights(r: float, split_cell: int) -> List[float]:
        _, below, above = expectile_weights(law, r)
        return [below if k < split_cell else above for k in range(3)]

    w_high = weights(p, 2)
    w_low = weights(1.0 - p, 1)
    s_p, err_p = blocks.quadratic_form(w_high, w_high)
    s_q, err_q = blocks.quadratic_form(w_low, w_low)
    c_p, err_c = blocks.quadratic_form(w_high, w_low)
    value = s_p + s_q - 2.0 * c_p
    return AsymVarReport(
        max(value, 0.0), "quadrature", err_p + err_q + 2.0 * err_c,
        {"s_p": s_p, "s_1mp": s_q, "c_p": c_p},
    )


def asymptotic_variance(dist: Distribution, estimator: str, p: float,
                        tol: Optional[float] = None) -> AsymVarReport:
    if estimator == "dq":
        return sigma_q_sq(dist, p)
    if estimator == "des":
        return sigma_es_sq(dist, p, tol)
    if estimator == "dex":
        return sigma_ex_sq(dist, p, tol)
    raise KeyError(f"Estimator '{estimator}' not found")


@dataclass
class AsymvarInput:
    dist: str
    estimator: str
    p: float
    tol: Optional[float] = None


def _asymvar_sync(input: AsymvarInput) -> CommandResult:
    if input.estimator not in ESTIMATORS:
        raise InvalidParameterError(f"Unknown estimator '{input.estimator}', expected one of {ESTIMATORS}")
    report = asymptotic_variance(parse_distribution(input.dist), input.estimator, input.p, input.tol)
    fields: Dict[str, object] = {
        "sigma_sq": report.sigma_sq,
        "est_abs_error": report.est_abs_error,
        "method": report.method,
    }
    fields.update(report.components)
    return CommandResult(command="asymvar", fields=fields)


async def asymvar(input: AsymvarInput) -> CommandResult:
    """Asymptotic variance of an empirical variability estimator"""
    return await asyncio.to_thread(_asymvar_sync, input)
