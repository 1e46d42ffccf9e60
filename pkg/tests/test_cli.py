import json

import pytest

from varmetrics import command_registry
from varmetrics.cli import build_parser, main
from varmetrics.output import CommandResult
from varmetrics.probspace import SPEC_GRAMMAR


def test_measure_prints_a_single_value(capsys):
    assert main(["measure", "--dist", "normal(0,1)", "--measure", "dq", "--p", "0.95"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(3.2897, abs=1e-3)


def test_exact_levels_and_json(capsys):
    assert main(["measure", "--dist", "discrete(-1:1/2,1:1/2)", "--measure", "dex", "--p", "9/10"]) == 0
    assert capsys.readouterr().out == "1.6\n"
    assert main(["measure", "--dist", "discrete(-1:0.5,1:0.5)", "--measure", "dex", "--p", "0.9", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"] == 1.6
    assert payload["command"] == "measure"


def test_precision_flag(capsys):
    assert main(["asymvar", "--dist", "exp(1)", "--estimator", "dq", "--p", "0.9", "--precision", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("sigma_sq,est_abs_error,method")
    assert lines[1].startswith("8.89,0,")


def test_domain_errors_exit_with_one(capsys):
    assert main(["measure", "--dist", "normal(0,1)", "--measure", "dq", "--p", "0.3"]) == 1
    assert "❌ Error" in capsys.readouterr().err
    assert main(["measure", "--dist", "gamma(2)", "--measure", "dq", "--p", "0.9"]) == 1
    assert main(["rolling", "--losses", "/nonexistent/losses.csv"]) == 1


def test_usage_errors_exit_with_two():
    for argv in (["frobnicate"], ["measure", "--dist", "normal(0,1)", "--measure", "var_x"],
                 ["calibrate", "--dist", "normal(0,1)", "--p", "0.9", "--grid", "0.6:0.9"],
                 ["simulate", "--dist", "exp(1)", "--estimator", "dq", "--p", "0.9", "--n", "0"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2


def test_help_shows_the_distribution_grammar(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["measure", "--help"])
    assert exc.value.code == 0
    assert "locscale(<spec>,shift,scale)" in capsys.readouterr().out
    assert SPEC_GRAMMAR in build_parser().format_help()


def test_synth_then_rolling(tmp_path, capsys):
    losses = tmp_path / "losses.csv"
    assert main(["synth-losses", "--dist", "t(4)", "--n", "40", "--seed", "7", "--out", str(losses)]) == 0
    capsys.readouterr()
    assert main(["rolling", "--losses", str(losses), "--window", "30"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "date,ratio_es_q,ratio_es_ex"
    assert len(lines) == 1 + 40 - 30 + 1


def test_selftest_property_grid(capsys):
    assert main(["selftest", "table1", "--trials", "20", "--seed", "4"]) == 0
    assert "matches" in capsys.readouterr().out


def test_failed_result_exits_with_one(mocker, capsys):
    failed = CommandResult(command="selftest", fields={"matches": False}, text="grid differs", ok=False)
    call = mocker.patch.object(command_registry, "call_command", new=mocker.AsyncMock(return_value=failed))
    assert main(["selftest", "identities"]) == 1
    call.assert_awaited_once_with("selftest", {"suite": "identities", "trials": 200, "seed": None})
    assert capsys.readouterr().out == "grid differs\n"
