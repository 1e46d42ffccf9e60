import asyncio
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import special

from varmetrics import variability
from varmetrics.errors import InvalidParameterError, LevelDomainError
from varmetrics.probspace import (
    DiscreteDistribution,
    law_of,
    make_discrete,
    make_exponential,
    make_finite_rv,
    make_normal,
    make_pareto,
    make_student_t,
)
from varmetrics.variability import (
    MixtureMeasure,
    delta_es,
    delta_ex,
    delta_q,
    gini_d,
    mad,
    mixture_es,
    mmd,
    range_measure,
    variance,
)

HALF = Fraction(1, 2)
TWO_POINT = make_discrete([-1, 1], [HALF, HALF])
COIN = make_discrete([0, 1], [HALF, HALF])


def test_delta_q_examples():
    bernoulli = make_finite_rv([1, 1, 0, 0, 0, 0, 0, 0, 0, 0])
    assert delta_q(bernoulli, Fraction(7, 10)) == 0
    for p in (0.6, 0.95):
        assert delta_q(make_normal(0, 1), p) == pytest.approx(2 * special.ndtri(p))
    assert delta_q(make_pareto(4), 0.9) == pytest.approx(0.1 ** -0.25 - 0.9 ** -0.25, abs=1e-10)
    assert delta_q(make_pareto(4), 0.9) == pytest.approx(0.75161, abs=5e-5)


def test_delta_q_level_domain():
    with pytest.raises(LevelDomainError):
        delta_q(COIN, 0.3)
    assert delta_q(COIN, 1) == 1


def test_delta_es_examples():
    for p in (0.5, 0.75, 0.99):
        assert delta_es(COIN, p) == 1
    assert delta_es(COIN, Fraction(1, 2)) == 2 * mmd(COIN)
    z = special.ndtri(0.875)
    expected = 2 * math.exp(-z * z / 2) / math.sqrt(2 * math.pi) / 0.125
    assert delta_es(make_normal(0, 1), 0.875) == pytest.approx(expected, rel=1e-12)
    assert delta_es(make_pareto(1), 0.9) == math.inf
    assert delta_es(make_normal(0, 1), 1) == math.inf


def test_delta_es_level_swap():
    law = make_discrete([-2, 0, 3, 7], [Fraction(1, 10), Fraction(2, 5), Fraction(3, 10), Fraction(1, 5)])
    for p in (Fraction(1, 10), Fraction(1, 3), Fraction(4, 5)):
        assert (1 - p) * delta_es(law, p) == p * delta_es(law, 1 - p)


def test_delta_ex_examples():
    assert delta_ex(TWO_POINT, Fraction(9, 10)) == Fraction(8, 5)
    assert delta_ex(TWO_POINT, 0.9) == Fraction(8, 5)
    z = make_discrete([-1, 0, 1, 5], [Fraction(9, 20), Fraction(1, 15), Fraction(9, 20), Fraction(1, 30)])
    assert delta_ex(z, Fraction(9, 10)) == Fraction(2531, 1311)
    assert delta_ex(make_pareto(1), 0.9) == math.inf


def test_delta_ex_outside_domain_needs_opt_in(caplog):
    with pytest.raises(LevelDomainError):
        delta_ex(TWO_POINT, Fraction(1, 10))
    assert delta_ex(TWO_POINT, Fraction(1, 10), allow_any_level=True) == Fraction(-8, 5)
    assert "outside the usual domain" in caplog.text


def test_negation_identities_on_discrete_law():
    law = make_discrete([-3, 1, 2], [Fraction(1, 4), Fraction(1, 4), HALF])
    neg = law.negate()
    for p in (Fraction(1, 4), Fraction(3, 5), Fraction(9, 10)):
        assert variability.quantile_right(neg, p) == -variability.quantile_left(law, 1 - p)
        assert variability.es(neg, p) == -variability.es_left(law, 1 - p)
        assert variability.expectile(neg, p) == -variability.expectile(law, 1 - p)


def test_range_and_classic_measures():
    five = make_discrete([0, 5], [HALF, HALF])
    assert range_measure(five) == 5
    assert range_measure(make_normal(0, 1)) == math.inf
    assert gini_d(COIN) == Fraction(1, 4)
    assert variance(COIN) == Fraction(1, 4)
    assert mad(COIN) == HALF
    assert mmd(COIN) == HALF
    point = DiscreteDistribution.point_mass(3)
    for measure in (range_measure, variance, mad, mmd, gini_d):
        assert measure(point) == 0
    assert variability.std(point) == 0


def test_parametric_gini_matches_sample():
    rng = np.random.default_rng(1)
    xs = make_exponential(1).quantile(rng.random(200_000))
    assert gini_d(make_exponential(1)) == pytest.approx(gini_d(xs), abs=5e-3)
    assert gini_d(make_normal(0, 2)) == pytest.approx(2 / math.sqrt(math.pi))
    assert gini_d(make_student_t(4)) == pytest.approx(gini_d(make_student_t(4).quantile(rng.random(200_000))), abs=1e-2)


def test_relative_measures():
    e = make_exponential(1)
    assert variability.relative_deviation(e) == pytest.approx(1.0)
    assert variability.gini_coefficient(e) == pytest.approx(0.5)
    point = DiscreteDistribution.point_mass(2)
    assert variability.relative_deviation(point) == 0
    assert variability.gini_coefficient(point) == 0
    with pytest.raises(InvalidParameterError):
        variability.gini_coefficient(make_normal(0, 1))


def test_evaluate_dispatch():
    assert variability.evaluate("dex", TWO_POINT, Fraction(9, 10)) == Fraction(8, 5)
    assert variability.evaluate("range", COIN) == 1
    with pytest.raises(LevelDomainError):
        variability.evaluate("dq", COIN)
    with pytest.raises(ValueError):
        variability.evaluate("iqr", COIN)


def test_mixture_representation():
    assert mixture_es(COIN, MixtureMeasure.dirac(Fraction(3, 4))) == delta_es(COIN, Fraction(3, 4))
    assert mixture_es(COIN, MixtureMeasure.dirac(1)) == range_measure(COIN)
    assert mixture_es(COIN, MixtureMeasure.gini()) == pytest.approx(0.25, abs=1e-6)
    assert mixture_es(make_exponential(1), MixtureMeasure.gini()) == pytest.approx(0.5, abs=1e-6)


def test_mixture_matches_gini_on_random_laws():
    rng = np.random.default_rng(7)
    for _ in range(3):
        values = sorted(set(int(v) for v in rng.integers(-20, 21, size=4)))
        while len(values) < 4:
            values = sorted(set(values) | {int(rng.integers(-20, 21))})
        weights = rng.integers(1, 10, size=4)
        law = make_discrete(values, [Fraction(int(w), int(weights.sum())) for w in weights])
        assert mixture_es(law, MixtureMeasure.gini()) == pytest.approx(float(gini_d(law)), abs=1e-5)


def test_mixture_measure_validation():
    with pytest.raises(InvalidParameterError):
        MixtureMeasure(atoms=((Fraction(0), Fraction(1)),))
    with pytest.raises(InvalidParameterError):
        MixtureMeasure(atoms=((HALF, Fraction(-1)),))


def test_symmetric_identities():
    for p in (0.6, 0.9, 0.99):
        assert variability.symmetric_identities_check(make_normal(0, 1), p).max_residual < 1e-9
    uniform = law_of(make_finite_rv([-1, 0, 1]))
    assert variability.symmetric_identities_check(uniform, Fraction(3, 4)).max_residual == 0
    assert variability.symmetric_identities_check(make_student_t(4), 0.9).max_residual < 1e-8


def test_inter_risk_difference():
    value = variability.inter_risk_difference(
        lambda d: variability.es(d, Fraction(3, 4)), lambda d: variability.quantile_left(d, Fraction(3, 4)), COIN
    )
    assert value == 0
    with pytest.raises(InvalidParameterError):
        variability.inter_risk_difference(lambda d: 0, lambda d: 1, COIN)


def test_sample_estimate_on_sorted_sample():
    xs = np.arange(1.0, 11.0)
    assert variability.sample_estimate(xs, "dq", 0.9) == 10.0 - 1.0
    assert variability.sample_estimate(xs, "des", 0.9) == pytest.approx(9.0)
    with pytest.raises(KeyError):
        variability.sample_estimate(xs, "range", 0.9)


def test_measure_command():
    inp = variability.MeasureInput(dist="discrete(-1:0.5,1:0.5)", measure="dex", p=0.9)
    result = asyncio.run(variability.measure(inp))
    assert result.fields["value"] == Fraction(8, 5)
    assert result.primary == "value"
    with pytest.raises(LevelDomainError):
        asyncio.run(variability.measure(variability.MeasureInput(dist="normal(0,1)", measure="es")))
    with pytest.raises(InvalidParameterError):
        asyncio.run(variability.measure(variability.MeasureInput(dist="normal(0,1)", measure="iqr")))
