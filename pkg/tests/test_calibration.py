import asyncio
import math

import numpy as np
import pandas as pd
import pytest

from varmetrics import calibration
from varmetrics.calibration import LevelTriple, calibration_curve, match_levels, parse_grid, rule_of_thumb
from varmetrics.errors import (
    AssumptionError,
    InfiniteMeanError,
    InvalidParameterError,
    LevelDomainError,
)
from varmetrics.probspace import (
    DiscreteDistribution,
    make_exponential,
    make_location_scale,
    make_normal,
    make_pareto,
    make_student_t,
)
from varmetrics.variability import delta_es, delta_ex, delta_q


def test_rule_of_thumb_triples():
    triples = rule_of_thumb()
    assert [(t.p, t.q, t.r) for t in triples] == [(0.9, 0.75, 0.97), (0.95, 0.875, 0.99), (0.99, 0.97, 0.999)]


@pytest.mark.parametrize("triple", rule_of_thumb())
def test_normal_matches_rule_of_thumb(triple):
    matched = match_levels(make_normal(0, 1), triple.p)
    assert matched.q == pytest.approx(triple.q, abs=0.01)
    assert matched.r == pytest.approx(triple.r, abs=0.005)


def test_matched_levels_equalize_the_measures():
    law = make_student_t(4)
    t = match_levels(law, 0.95)
    target = delta_q(law, 0.95)
    assert float(delta_es(law, t.q)) == pytest.approx(target, rel=1e-8)
    assert float(delta_ex(law, t.r)) == pytest.approx(target, rel=1e-8)


def test_exponential_es_ratio_tends_to_e():
    t = match_levels(make_exponential(1), 0.99)
    assert t.es_ratio == pytest.approx(math.e, rel=0.1)


def test_location_scale_invariance():
    base = match_levels(make_student_t(10), 0.9)
    moved = match_levels(make_location_scale(make_student_t(10), 5.0, 3.0), 0.9)
    assert moved.q == pytest.approx(base.q, abs=1e-9)
    assert moved.r == pytest.approx(base.r, abs=1e-9)


@pytest.mark.parametrize("law", [make_normal(0, 1), make_exponential(1), make_student_t(4), make_student_t(10)])
def test_curve_columns_are_monotone(law):
    curve = calibration_curve(law, parse_grid("0.6:0.99"))
    assert list(curve.columns) == calibration.CURVE_COLUMNS
    for column in ("p", "q", "r"):
        assert curve[column].is_monotonic_increasing


def test_parse_grid():
    assert parse_grid("0.9:0.91") == pytest.approx([0.9, 0.905, 0.91])
    assert parse_grid("0.6:0.7:0.05") == pytest.approx([0.6, 0.65, 0.7])
    for bad in ("0.6", "0.6:0.5", "a:b", "0.6:0.7:0", "1:2:3:4"):
        with pytest.raises(InvalidParameterError):
            parse_grid(bad)


def test_calibration_errors():
    with pytest.raises(LevelDomainError):
        match_levels(make_normal(0, 1), 0.5)
    with pytest.raises(AssumptionError):
        match_levels(DiscreteDistribution.point_mass(0), 0.9)
    with pytest.raises(InfiniteMeanError):
        match_levels(make_pareto(1), 0.9)
    with pytest.raises(LevelDomainError):
        calibration_curve(make_normal(0, 1), [0.9, 1.0])
    with pytest.raises(LevelDomainError):
        LevelTriple(0.4, 0.5, 0.9)


def test_unreachable_target_is_reported():
    with pytest.raises(calibration.CalibrationRangeError):
        calibration._solve(lambda x: x, 0.0, 1.0, 2.0, "identity")


def test_calibrate_command(tmp_path):
    single = asyncio.run(calibration.calibrate(calibration.CalibrateInput(dist="normal(0,1)", p=0.95)))
    assert set(single.fields) == {"p", "q", "r", "es_ratio"}
    out = tmp_path / "curve.csv"
    written = asyncio.run(calibration.calibrate(
        calibration.CalibrateInput(dist="t(4)", grid="0.9:0.95:0.025", out=str(out))
    ))
    assert written.fields["points"] == 3
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["p", "q", "r", "es_ratio"]
    assert np.all(np.diff(frame["q"]) > 0)
    with pytest.raises(InvalidParameterError):
        asyncio.run(calibration.calibrate(calibration.CalibrateInput(dist="normal(0,1)")))
