"""
Probability spaces and distributions

Parametric continuous laws (normal, exponential, Student-t, Pareto and
location-scale transforms of them), finite discrete laws with exact
rational weights, and random variables on a finite uniform probability
space. Everything here is immutable.
"""

import logging
import math
import re
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, List, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, optimize, special

from .errors import InfiniteMeanError, InvalidParameterError, SpecParseError

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]

SQRT_2PI = math.sqrt(2.0 * math.pi)
_SUM_TOL = 1e-12


def exact(value: Number) -> Number:
    """Promote ints to Fraction, keep Fraction and float as they are"""
    if isinstance(value, bool):
        raise InvalidParameterError("boolean is not a number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (Fraction, float)):
        return value
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return Fraction(int(value))
    raise InvalidParameterError(f"not a real number: {value!r}")


def exact_level(p: Number) -> Fraction:
    """Level as an exact rational (floats through their shortest repr)"""
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int) and not isinstance(p, bool):
        return Fraction(p)
    return Fraction(repr(float(p)))


def complement(p: Number) -> Fraction:
    """1 - p computed on the exact level"""
    return 1 - exact_level(p)


class ParametricDistribution(ABC):
    """A continuous law with a positive density on an interval support"""

    @abstractmethod
    def cdf(self, x: Any) -> Any: ...

    @abstractmethod
    def sf(self, x: Any) -> Any: ...

    @abstractmethod
    def density(self, x: Any) -> Any: ...

    @abstractmethod
    def quantile(self, p: Any) -> Any: ...

    @abstractmethod
    def support(self) -> Tuple[float, float]: ...

    @property
    @abstractmethod
    def moment_exponent(self) -> float:
        """Supremum of the orders k with E|X|^k finite"""

    @abstractmethod
    def upper_partial_moment(self, x: float) -> float:
        """E[(X - x)+]"""

    @abstractmethod
    def _mean(self) -> float: ...

    @abstractmethod
    def _variance(self) -> float: ...

    @property
    def is_symmetric(self) -> bool:
        return False

    @property
    def center(self) -> float:
        """Center of symmetry, meaningful only when is_symmetric"""
        return 0.0

    def has_finite_mean(self) -> bool:
        return self.moment_exponent > 1

    def mean(self) -> float:
        if not self.has_finite_mean():
            raise InfiniteMeanError(f"{self.describe()} has no finite mean")
        return self._mean()

    def variance(self) -> float:
        if self.moment_exponent <= 2:
            return math.inf
        return self._variance()

    def lower_partial_moment(self, x: float) -> float:
        """E[(X - x)-] through put-call parity"""
        return self.upper_partial_moment(x) - (self.mean() - x)

    def describe(self) -> str:
        return repr(self)


@dataclass(frozen=True)
class Normal(ParametricDistribution):
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if not self.sigma > 0 or not math.isfinite(self.sigma):
            raise InvalidParameterError(f"normal sigma must be positive, got {self.sigma}")
        if not math.isfinite(self.mu):
            raise InvalidParameterError(f"normal mu must be finite, got {self.mu}")

    def _z(self, x: Any) -> Any:
        return (np.asarray(x, dtype=float) - self.mu) / self.sigma

    def cdf(self, x: Any) -> Any:
        return special.ndtr(self._z(x))

    def sf(self, x: Any) -> Any:
        return special.ndtr(-self._z(x))

    def density(self, x: Any) -> Any:
        z = self._z(x)
        return np.exp(-0.5 * z * z) / (SQRT_2PI * self.sigma)

    def quantile(self, p: Any) -> Any:
        return self.mu + self.sigma * special.ndtri(p)

    def support(self) -> Tuple[float, float]:
        return (-math.inf, math.inf)

    @property
    def moment_exponent(self) -> float:
        return math.inf

    @property
    def is_symmetric(self) -> bool:
        return True

    @property
    def center(self) -> float:
        return self.mu

    def upper_partial_moment(self, x: float) -> float:
        z = (x - self.mu) / self.sigma
        phi = math.exp(-0.5 * z * z) / SQRT_2PI
        return self.sigma * (phi - z * float(special.ndtr(-z)))

    def lower_partial_moment(self, x: float) -> float:
        z = (x - self.mu) / self.sigma
        phi = math.exp(-0.5 * z * z) / SQRT_2PI
        return self.sigma * (phi + z * float(special.ndtr(z)))

    def _mean(self) -> float:
        return self.mu

    def _variance(self) -> float:
        return self.sigma ** 2

    def describe(self) -> str:
        return f"normal({self.mu:g},{self.sigma:g})"


@dataclass(frozen=True)
class Exponential(ParametricDistribution):
    rate: float = 1.0

    def __post_init__(self) -> None:
        if not self.rate > 0 or not math.isfinite(self.rate):
            raise InvalidParameterError(f"exponential rate must be positive, got {self.rate}")

    def cdf(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)

    def sf(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, np.exp(-self.rate * np.maximum(x, 0.0)), 1.0)

    def density(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)), 0.0)

    def quantile(self, p: Any) -> Any:
        return -np.log1p(-np.asarray(p, dtype=float)) / self.rate

    def support(self) -> Tuple[float, float]:
        return (0.0, math.inf)

    @property
    def moment_exponent(self) -> float:
        return math.inf

    def upper_partial_moment(self, x: float) -> float:
        if x >= 0:
            return math.exp(-self.rate * x) / self.rate
        return 1.0 / self.rate - x

    def lower_partial_moment(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return x - 1.0 / self.rate + math.exp(-self.rate * x) / self.rate

    def _mean(self) -> float:
        return 1.0 / self.rate

    def _variance(self) -> float:
        return 1.0 / self.rate ** 2

    def describe(self) -> str:
        return f"exp({self.rate:g})"


@dataclass(frozen=True)
class StudentT(ParametricDistribution):
    nu: float = 4.0

    def __post_init__(self) -> None:
        if not self.nu > 0 or not math.isfinite(self.nu):
            raise InvalidParameterError(f"t degrees of freedom must be positive, got {self.nu}")

    def cdf(self, x: Any) -> Any:
        return special.stdtr(self.nu, x)

    def sf(self, x: Any) -> Any:
        return special.stdtr(self.nu, -np.asarray(x, dtype=float))

    def density(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        nu = self.nu
        log_c = special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2) - 0.5 * math.log(nu * math.pi)
        return np.exp(log_c - (nu + 1) / 2 * np.log1p(x * x / nu))

    def quantile(self, p: Any) -> Any:
        q = special.stdtrit(self.nu, p)
        if np.ndim(q) == 0:
            return self._polish(float(p), float(q))
        return q

    def _polish(self, p: float, q: float) -> float:
        # incomplete-beta inversion, then bisection if the residual is off
        if not 0 < p < 1 or not math.isfinite(q):
            return q
        if abs(float(self.cdf(q)) - p) <= 1e-12:
            return q
        lo, hi = q - 1.0, q + 1.0
        while float(self.cdf(lo)) > p:
            lo -= 2 * (hi - lo)
        while float(self.cdf(hi)) < p:
            hi += 2 * (hi - lo)
        return float(optimize.brentq(lambda x: float(self.cdf(x)) - p, lo, hi, xtol=1e-14, rtol=1e-14))

    def support(self) -> Tuple[float, float]:
        return (-math.inf, math.inf)

    @property
    def moment_exponent(self) -> float:
        return self.nu

    @property
    def is_symmetric(self) -> bool:
        return True

    def upper_partial_moment(self, x: float) -> float:
        if self.nu <= 1:
            return math.inf
        return (self.nu + x * x) / (self.nu - 1) * float(self.density(x)) - x * float(self.sf(x))

    def lower_partial_moment(self, x: float) -> float:
        # symmetric about zero
        return self.upper_partial_moment(-x)

    def _mean(self) -> float:
        return 0.0

    def _variance(self) -> float:
        return self.nu / (self.nu - 2)

    def describe(self) -> str:
        return f"t({self.nu:g})"


@dataclass(frozen=True)
class Pareto(ParametricDistribution):
    """Survival x^-alpha on [1, inf)"""

    alpha: float = 4.0

    def __post_init__(self) -> None:
        if not self.alpha > 0 or not math.isfinite(self.alpha):
            raise InvalidParameterError(f"pareto alpha must be positive, got {self.alpha}")

    def cdf(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        return np.where(x > 1, -np.expm1(-self.alpha * np.log(np.maximum(x, 1.0))), 0.0)

    def sf(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        return np.where(x > 1, np.maximum(x, 1.0) ** -self.alpha, 1.0)

    def density(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        return np.where(x >= 1, self.alpha * np.maximum(x, 1.0) ** (-self.alpha - 1), 0.0)

    def quantile(self, p: Any) -> Any:
        return (1.0 - np.asarray(p, dtype=float)) ** (-1.0 / self.alpha)

    def support(self) -> Tuple[float, float]:
        return (1.0, math.inf)

    @property
    def moment_exponent(self) -> float:
        return self.alpha

    def upper_partial_moment(self, x: float) -> float:
        if self.alpha <= 1:
            return math.inf
        if x >= 1:
            return x ** (1 - self.alpha) / (self.alpha - 1)
        return self.alpha / (self.alpha - 1) - x

    def lower_partial_moment(self, x: float) -> float:
        if x <= 1:
            return 0.0
        return x - self.mean() + self.upper_partial_moment(x)

    def _mean(self) -> float:
        return self.alpha / (self.alpha - 1)

    def _variance(self) -> float:
        a = self.alpha
        return a / ((a - 1) ** 2 * (a - 2))

    def describe(self) -> str:
        return f"pareto({self.alpha:g})"


@dataclass(frozen=True)
class LocationScale(ParametricDistribution):
    """Law of shift + scale * X for X distributed as base"""

    base: ParametricDistribution
    shift: float = 0.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.scale > 0 or not math.isfinite(self.scale):
            raise InvalidParameterError(f"scale must be positive, got {self.scale}")
        if not math.isfinite(self.shift):
            raise InvalidParameterError(f"shift must be finite, got {self.shift}")

    def _std(self, x: Any) -> Any:
        return (np.asarray(x, dtype=float) - self.shift) / self.scale

    def cdf(self, x: Any) -> Any:
        return self.base.cdf(self._std(x))

    def sf(self, x: Any) -> Any:
        return self.base.sf(self._std(x))

    def density(self, x: Any) -> Any:
        return self.base.density(self._std(x)) / self.scale

    def quantile(self, p: Any) -> Any:
        return self.shift + self.scale * self.base.quantile(p)

    def support(self) -> Tuple[float, float]:
        lo, hi = self.base.support()
        return (self.shift + self.scale * lo, self.shift + self.scale * hi)

    @property
    def moment_exponent(self) -> float:
        return self.base.moment_exponent

    @property
    def is_symmetric(self) -> bool:
        return self.base.is_symmetric

    @property
    def center(self) -> float:
        return self.shift + self.scale * self.base.center

    def upper_partial_moment(self, x: float) -> float:
        return self.scale * self.base.upper_partial_moment((x - self.shift) / self.scale)

    def lower_partial_moment(self, x: float) -> float:
        return self.scale * self.base.lower_partial_moment((x - self.shift) / self.scale)

    def _mean(self) -> float:
        return self.shift + self.scale * self.base.mean()

    def _variance(self) -> float:
        return self.scale ** 2 * self.base.variance()

    def describe(self) -> str:
        return f"locscale({self.base.describe()},{self.shift:g},{self.scale:g})"


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite support with strictly positive weights summing to one"""

    support: Tuple[Number, ...]
    probs: Tuple[Number, ...]

    def __post_init__(self) -> None:
        support = tuple(exact(v) for v in self.support)
        probs = tuple(exact(w) for w in self.probs)
        if not support:
            raise InvalidParameterError("discrete law needs at least one support point")
        if len(support) != len(probs):
            raise InvalidParameterError(
                f"support has {len(support)} points but {len(probs)} weights were given"
            )
        if any(not math.isfinite(float(v)) for v in support):
            raise InvalidParameterError("support points must be finite")
        if any(b <= a for a, b in zip(support, support[1:])):
            raise InvalidParameterError("support must be strictly increasing without duplicates")
        if any(not w > 0 for w in probs):
            raise InvalidParameterError("weights must be strictly positive")
        total = sum(probs)
        if abs(float(total) - 1.0) > _SUM_TOL:
            raise InvalidParameterError(f"weights must sum to 1, got {total}")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point_mass(cls, value: Number) -> "DiscreteDistribution":
        return cls((value,), (Fraction(1),))

    @classmethod
    def from_weights(cls, weights: Iterable[Tuple[Number, Number]]) -> "DiscreteDistribution":
        """Build from (value, weight) pairs, merging repeated values"""
        merged: dict = {}
        for value, weight in weights:
            v = exact(value)
            merged[v] = merged.get(v, 0) + exact(weight)
        items = sorted((v, w) for v, w in merged.items() if w != 0)
        return cls(tuple(v for v, _ in items), tuple(w for _, w in items))

    def __len__(self) -> int:
        return len(self.support)

    @property
    def moment_exponent(self) -> float:
        return math.inf

    @property
    def is_point_mass(self) -> bool:
        return len(self.support) == 1

    def cumulative(self) -> List[Number]:
        """F evaluated at each support point"""
        out: List[Number] = []
        acc: Number = Fraction(0)
        for w in self.probs:
            acc = acc + w
            out.append(acc)
        return out

    def cdf(self, x: Number) -> Number:
        acc: Number = Fraction(0)
        for v, w in zip(self.support, self.probs):
            if v > x:
                break
            acc = acc + w
        return acc

    def mean(self) -> Number:
        return sum((v * w for v, w in zip(self.support, self.probs)), Fraction(0))

    def upper_partial_moment(self, x: Number) -> Number:
        return sum(((v - x) * w for v, w in zip(self.support, self.probs) if v > x), Fraction(0))

    def lower_partial_moment(self, x: Number) -> Number:
        return sum(((x - v) * w for v, w in zip(self.support, self.probs) if v < x), Fraction(0))

    def support_bounds(self) -> Tuple[Number, Number]:
        return (self.support[0], self.support[-1])

    def negate(self) -> "DiscreteDistribution":
        return DiscreteDistribution(tuple(-v for v in reversed(self.support)), tuple(reversed(self.probs)))

    def shift(self, c: Number) -> "DiscreteDistribution":
        c = exact(c)
        return DiscreteDistribution(tuple(v + c for v in self.support), self.probs)

    def scale(self, a: Number) -> "DiscreteDistribution":
        a = exact(a)
        if a == 0:
            return DiscreteDistribution.point_mass(0)
        if a < 0:
            return self.negate().scale(-a)
        return DiscreteDistribution(tuple(a * v for v in self.support), self.probs)

    def mixture(self, other: "DiscreteDistribution", lam: Number) -> "DiscreteDistribution":
        """Law lam * F_self + (1 - lam) * F_other"""
        lam = exact(lam)
        if not 0 <= lam <= 1:
            raise InvalidParameterError(f"mixture weight must lie in [0,1], got {lam}")
        pairs = [(v, lam * w) for v, w in zip(self.support, self.probs)]
        pairs += [(v, (1 - lam) * w) for v, w in zip(other.support, other.probs)]
        return DiscreteDistribution.from_weights(pairs)

    def sample(self, uniforms: np.ndarray) -> np.ndarray:
        """Right-quantile transform of an array of uniforms"""
        cum = np.cumsum([float(w) for w in self.probs])
        idx = np.searchsorted(cum, uniforms, side="right")
        values = np.array([float(v) for v in self.support])
        return values[np.minimum(idx, len(values) - 1)]

    def describe(self) -> str:
        body = ",".join(f"{v}:{w}" for v, w in zip(self.support, self.probs))
        return f"discrete({body})"


@dataclass(frozen=True)
class FiniteRV:
    """Random variable on the uniform n-point space {1..n}"""

    atoms: Tuple[Number, ...]

    def __post_init__(self) -> None:
        atoms = tuple(exact(a) for a in self.atoms)
        if not atoms:
            raise InvalidParameterError("a finite random variable needs at least one atom")
        object.__setattr__(self, "atoms", atoms)

    @property
    def n(self) -> int:
        return len(self.atoms)

    def _check_space(self, other: "FiniteRV") -> None:
        if other.n != self.n:
            raise InvalidParameterError(
                f"random variables live on different spaces ({self.n} vs {other.n} points)"
            )

    def __add__(self, other: Union["FiniteRV", Number]) -> "FiniteRV":
        if isinstance(other, FiniteRV):
            self._check_space(other)
            return FiniteRV(tuple(a + b for a, b in zip(self.atoms, other.atoms)))
        c = exact(other)
        return FiniteRV(tuple(a + c for a in self.atoms))

    __radd__ = __add__

    def __neg__(self) -> "FiniteRV":
        return FiniteRV(tuple(-a for a in self.atoms))

    def __sub__(self, other: Union["FiniteRV", Number]) -> "FiniteRV":
        return self + (-other)

    def __mul__(self, c: Number) -> "FiniteRV":
        c = exact(c)
        return FiniteRV(tuple(c * a for a in self.atoms))

    __rmul__ = __mul__

    def permute(self, order: Sequence[int]) -> "FiniteRV":
        if sorted(order) != list(range(self.n)):
            raise InvalidParameterError("order must be a permutation of the atom indices")
        return FiniteRV(tuple(self.atoms[i] for i in order))

    def sorted(self) -> "FiniteRV":
        return FiniteRV(tuple(sorted(self.atoms)))

    def is_comonotonic_with(self, other: "FiniteRV") -> bool:
        self._check_space(other)
        for i in range(self.n):
            for j in range(self.n):
                if (self.atoms[i] - self.atoms[j]) * (other.atoms[i] - other.atoms[j]) < 0:
                    return False
        return True


Distribution = Union[ParametricDistribution, DiscreteDistribution, FiniteRV]


def make_normal(mu: float, sigma: float) -> Normal:
    return Normal(float(mu), float(sigma))


def make_exponential(rate: float) -> Exponential:
    return Exponential(float(rate))


def make_student_t(nu: float) -> StudentT:
    return StudentT(float(nu))


def make_pareto(alpha: float) -> Pareto:
    return Pareto(float(alpha))


def make_location_scale(base: ParametricDistribution, shift: float, scale: float) -> LocationScale:
    if isinstance(base, LocationScale):
        # fold nested transforms into one
        return LocationScale(base.base, shift + scale * base.shift, scale * base.scale)
    return LocationScale(base, float(shift), float(scale))


def make_discrete(support: Sequence[Number], probs: Sequence[Number]) -> DiscreteDistribution:
    return DiscreteDistribution(tuple(support), tuple(probs))


def make_finite_rv(atoms: Sequence[Number]) -> FiniteRV:
    return FiniteRV(tuple(atoms))


def law_of(finite_rv: FiniteRV) -> DiscreteDistribution:
    """Collapse equal atoms and aggregate their 1/n weights"""
    counts = Counter(finite_rv.atoms)
    n = finite_rv.n
    support = sorted(counts)
    return DiscreteDistribution(tuple(support), tuple(Fraction(counts[v], n) for v in support))


def as_law(dist: Distribution) -> Union[ParametricDistribution, DiscreteDistribution]:
    if isinstance(dist, FiniteRV):
        return law_of(dist)
    return dist


def sample(dist: Distribution, uniforms: np.ndarray) -> np.ndarray:
    """Inverse-cdf transform of uniforms drawn from (0,1)"""
    law = as_law(dist)
    if isinstance(law, DiscreteDistribution):
        return law.sample(uniforms)
    return np.asarray(law.quantile(uniforms), dtype=float)


# Tail probabilities 1e-1, 10^-1.5, ..., 1e-10
_TAIL_LEVELS = tuple(10.0 ** (-k / 2) for k in range(2, 21))


def integrate_density(dist: ParametricDistribution) -> float:
    """Mass of the density between the 1e-10 and 1-1e-10 quantiles,
    integrated piecewise between quantiles half a decade of tail mass apart"""
    levels = sorted({*_TAIL_LEVELS, *(k / 10 for k in range(2, 9)), *(1 - t for t in _TAIL_LEVELS)})
    cuts = [float(dist.quantile(u)) for u in levels]
    mass = 0.0
    for a, b in zip(cuts, cuts[1:]):
        if b > a:
            piece, _ = integrate.quad(lambda x: float(dist.density(x)), a, b, limit=200)
            mass += piece
    return mass


# Distribution spec grammar
_NUM = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?"
_SIMPLE = {
    "normal": re.compile(rf"^normal\(({_NUM}),({_NUM})\)$"),
    "exp": re.compile(rf"^exp\(({_NUM})\)$"),
    "t": re.compile(rf"^t\(({_NUM})\)$"),
    "pareto": re.compile(rf"^pareto\(({_NUM})\)$"),
}
_DISCRETE = re.compile(r"^discrete\((.*)\)$")
_LOCSCALE = re.compile(rf"^locscale\((.+),({_NUM}),({_NUM})\)$")
_EXACT_NUM = re.compile(rf"^({_NUM}(?:/\d+)?)$")

SPEC_GRAMMAR = (
    "normal(mu,sigma) | exp(rate) | t(nu) | pareto(alpha) | "
    "discrete(v1:p1,v2:p2,...) | locscale(<spec>,shift,scale)"
)


def _exact_number(text: str, spec: str) -> Fraction:
    m = _EXACT_NUM.match(text)
    if not m:
        raise SpecParseError(f"'{text}' is not a number in '{spec}'")
    try:
        return Fraction(m.group(1))
    except (ValueError, ZeroDivisionError) as e:
        raise SpecParseError(f"'{text}' is not a number in '{spec}'") from e


def parse_distribution(spec: str) -> Union[ParametricDistribution, DiscreteDistribution]:
    """Parse a textual distribution spec, see SPEC_GRAMMAR"""
    text = spec.strip().replace(" ", "")
    if not text:
        raise SpecParseError("empty distribution spec")
    m = _LOCSCALE.match(text)
    if m:
        base = parse_distribution(m.group(1))
        shift, scale = float(m.group(2)), float(m.group(3))
        if isinstance(base, DiscreteDistribution):
            if not scale > 0:
                raise InvalidParameterError(f"scale must be positive, got {scale}")
            return base.scale(Fraction(m.group(3))).shift(Fraction(m.group(2)))
        return make_location_scale(base, shift, scale)
    m = _DISCRETE.match(text)
    if m:
        body = m.group(1)
        if not body:
            raise SpecParseError("discrete() needs at least one value:weight pair")
        pairs = []
        for item in body.split(","):
            if item.count(":") != 1:
                raise SpecParseError(f"'{item}' is not a value:weight pair in '{spec}'")
            v, w = item.split(":")
            pairs.append((_exact_number(v, spec), _exact_number(w, spec)))
        pairs.sort()
        return make_discrete([v for v, _ in pairs], [w for _, w in pairs])
    for name, pattern in _SIMPLE.items():
        m = pattern.match(text)
        if not m:
            continue
        args = [float(g) for g in m.groups()]
        logger.debug("Parsed %s%s from '%s'", name, tuple(args), spec)
        if name == "normal":
            return make_normal(args[0], args[1])
        if name == "exp":
            return make_exponential(args[0])
        if name == "t":
            return make_student_t(args[0])
        return make_pareto(args[0])
    raise SpecParseError(f"cannot parse distribution '{spec}', expected {SPEC_GRAMMAR}")
