import math
from fractions import Fraction

import numpy as np
import pytest

from varmetrics import probspace
from varmetrics.errors import InfiniteMeanError, InvalidParameterError, SpecParseError
from varmetrics.probspace import (
    DiscreteDistribution,
    law_of,
    make_discrete,
    make_exponential,
    make_finite_rv,
    make_location_scale,
    make_normal,
    make_pareto,
    make_student_t,
    parse_distribution,
)


def test_normal_quantiles_and_cdf():
    n = make_normal(0, 1)
    assert n.quantile(0.5) == pytest.approx(0.0, abs=1e-15)
    assert n.quantile(0.9) == pytest.approx(1.2816, abs=1e-4)
    assert make_normal(3, 2).cdf(3) == pytest.approx(0.5)


def test_pareto_examples():
    p = make_pareto(4)
    assert p.cdf(1) == 0
    assert p.quantile(0.9) == pytest.approx(0.1 ** -0.25, rel=1e-12)
    assert p.mean() == pytest.approx(4 / 3)
    assert p.support() == (1.0, math.inf)


def test_exponential_and_t():
    e = make_exponential(1)
    for p in (0.1, 0.5, 0.99):
        assert e.quantile(p) == pytest.approx(-math.log1p(-p))
    t = make_student_t(4)
    assert t.cdf(0) == pytest.approx(0.5)
    assert t.quantile(float(t.cdf(1.7))) == pytest.approx(1.7, rel=1e-9)
    assert t.variance() == pytest.approx(2.0)


def test_heavy_tails_have_no_mean():
    with pytest.raises(InfiniteMeanError):
        make_pareto(1).mean()
    with pytest.raises(InfiniteMeanError):
        make_student_t(1).mean()
    assert make_pareto(1.5).variance() == math.inf


def test_densities_integrate_to_one():
    laws = (make_normal(1, 2), make_exponential(3), make_student_t(5), make_pareto(4),
            make_student_t(0.5), make_pareto(0.3), make_location_scale(make_student_t(1), -2.0, 5.0))
    for dist in laws:
        assert probspace.integrate_density(dist) == pytest.approx(1.0, abs=1e-6)


def test_cdf_inverts_quantile_on_every_family():
    rng = np.random.default_rng(20210901)
    levels = rng.uniform(size=1000)
    laws = (make_normal(0.5, 2), make_exponential(0.7), make_student_t(4), make_student_t(1.5),
            make_pareto(4), make_location_scale(make_exponential(2), 1.0, 3.0))
    for dist in laws:
        worst = max(abs(float(dist.cdf(dist.quantile(p))) - p) for p in levels)
        assert worst < 1e-9, dist.describe()


def test_partial_moments_parity():
    for dist in (make_normal(0.5, 1.5), make_exponential(2), make_student_t(4), make_pareto(3)):
        x = float(dist.quantile(0.3))
        lhs = dist.upper_partial_moment(x) - dist.lower_partial_moment(x)
        assert lhs == pytest.approx(dist.mean() - x, abs=1e-10)


def test_invalid_parameters():
    with pytest.raises(InvalidParameterError):
        make_normal(0, 0)
    with pytest.raises(InvalidParameterError):
        make_exponential(-1)
    with pytest.raises(InvalidParameterError):
        make_pareto(0)
    with pytest.raises(InvalidParameterError):
        make_student_t(0)


def test_discrete_validation():
    law = make_discrete([-1, 1], [Fraction(1, 2), Fraction(1, 2)])
    assert law.mean() == 0
    with pytest.raises(InvalidParameterError):
        make_discrete([0, 1], [Fraction(1, 2), Fraction(1, 3)])
    with pytest.raises(InvalidParameterError):
        make_discrete([1, 0], [Fraction(1, 2), Fraction(1, 2)])
    with pytest.raises(InvalidParameterError):
        make_discrete([0, 1], [1, 0])
    with pytest.raises(InvalidParameterError):
        make_discrete([], [])


def test_law_of_finite_rv():
    law = law_of(make_finite_rv([1, 1, 2]))
    assert law.support == (1, 2)
    assert law.probs == (Fraction(2, 3), Fraction(1, 3))
    assert law_of(make_finite_rv([5])).is_point_mass
    uniform = law_of(make_finite_rv([-1, 0, 1]))
    assert uniform.probs == (Fraction(1, 3),) * 3


def test_finite_rv_arithmetic():
    x = make_finite_rv([0, 1, 2])
    y = make_finite_rv([2, 2, 5])
    assert (x + y).atoms == (2, 3, 7)
    assert (x - 1).atoms == (-1, 0, 1)
    assert (x * Fraction(1, 2)).atoms == (0, Fraction(1, 2), 1)
    assert x.is_comonotonic_with(y)
    assert not x.is_comonotonic_with(make_finite_rv([1, 0, 0]))
    with pytest.raises(InvalidParameterError):
        x + make_finite_rv([1, 2])


def test_mixture_and_transforms():
    f = make_discrete([0, 1], [Fraction(2, 3), Fraction(1, 3)])
    mix = f.mixture(f.negate(), Fraction(1, 2))
    assert mix.support == (-1, 0, 1)
    assert mix.probs == (Fraction(1, 6), Fraction(2, 3), Fraction(1, 6))
    assert f.scale(-2).support == (-2, 0)
    assert f.shift(3).support == (3, 4)


def test_sampling_is_inverse_transform():
    law = make_discrete([0, 10], [Fraction(1, 4), Fraction(3, 4)])
    u = np.array([0.1, 0.25, 0.3, 0.99])
    assert list(probspace.sample(law, u)) == [0.0, 10.0, 10.0, 10.0]
    normal = make_normal(0, 1)
    assert probspace.sample(normal, np.array([0.5]))[0] == pytest.approx(0.0, abs=1e-15)


def test_parse_distribution_grammar():
    assert parse_distribution("normal(0,1)") == make_normal(0, 1)
    assert parse_distribution(" exp( 2 ) ") == make_exponential(2)
    assert parse_distribution("t(4)") == make_student_t(4)
    assert parse_distribution("pareto(4)") == make_pareto(4)
    law = parse_distribution("discrete(1:1/3,0:2/3)")
    assert isinstance(law, DiscreteDistribution)
    assert law.support == (0, 1)
    assert law.probs == (Fraction(2, 3), Fraction(1, 3))
    half = parse_distribution("discrete(-1:0.5,1:0.5)")
    assert half.probs == (Fraction(1, 2), Fraction(1, 2))


def test_parse_location_scale():
    ls = parse_distribution("locscale(t(4),1,2)")
    assert ls == make_location_scale(make_student_t(4), 1.0, 2.0)
    assert ls.quantile(0.5) == pytest.approx(1.0)
    shifted = parse_distribution("locscale(discrete(0:1/2,1:1/2),1,3)")
    assert shifted.support == (1, 4)


def test_parse_errors():
    for bad in ("", "gamma(2)", "normal(0)", "discrete()", "discrete(1-1)", "discrete(a:1)"):
        with pytest.raises(SpecParseError):
            parse_distribution(bad)
