import json
from pathlib import Path

import numpy as np
import pytest

from timescale_lagrangian.cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_VALIDATION, main


def _write_config(tmp_path: Path, name: str, document: dict) -> Path:
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def _write_trajectory(path: Path, t: np.ndarray, y: np.ndarray) -> Path:
    lines = ["t,y"] + [f"{ti!r},{yi!r}" for ti, yi in zip(t.tolist(), y.tolist())]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


UNIFORM = {"kind": "uniform", "a": 0, "b": 3, "h": 0.5}
INGREDIENTS = {"P": "t*x^2 + sin(t)*x", "q": "x*t", "w": "x*v", "p": "1 + t^2", "C": 0.25, "R0": 0.5}


def test_build_then_verify_bundle(tmp_path, capsys):
    config = _write_config(tmp_path, "problem", {"timescale": UNIFORM, "ingredients": INGREDIENTS})
    out = tmp_path / "out"

    assert main(["build", str(config), "--output-dir", str(out)]) == EXIT_OK
    bundle = out / "problem.bundle.json"
    table = out / "problem.lagrangian.csv"
    assert bundle.is_file()
    assert table.is_file()
    assert table.read_text(encoding="utf-8").splitlines()[0] == "t,sigma,mu,offsetQ,Rprofile"

    assert main(["verify", str(bundle), "--output-dir", str(out)]) == EXIT_OK
    stdout = capsys.readouterr().out
    assert "[synthesized Lagrangian]" in stdout
    report = json.loads((out / "problem.bundle.report.json").read_text(encoding="utf-8"))
    assert report["el_constancy"] <= 1e-9
    assert report["el_constant"] == pytest.approx(0.25, abs=1e-12)


def test_verify_config_with_extremal(tmp_path, capsys):
    config = _write_config(
        tmp_path,
        "shifted",
        {
            "timescale": {"kind": "qpow", "q": 2, "kmin": 0, "kmax": 5},
            "ingredients": INGREDIENTS,
            "extremal": {"kind": "expr", "payload": "cos(t)"},
            "options": {"perturbations": 10, "seed": 4},
        },
    )

    assert main(["verify", str(config), "--output-dir", str(tmp_path / "out")]) == EXIT_OK
    report = json.loads((tmp_path / "out" / "shifted.report.json").read_text(encoding="utf-8"))
    assert report["legendre_deviation"] <= 1e-10 * 257
    assert report["perturbation_min_delta"] is not None


def test_build_rejects_nonpositive_p(tmp_path, capsys):
    config = _write_config(
        tmp_path, "bad", {"timescale": UNIFORM, "ingredients": {"P": "x^2", "p": "-1"}}
    )

    assert main(["build", str(config), "--output-dir", str(tmp_path / "out")]) == EXIT_VALIDATION
    assert "p(t) > 0" in capsys.readouterr().err
    assert not (tmp_path / "out" / "bad.bundle.json").exists()


def test_three_point_grid(tmp_path):
    config = _write_config(
        tmp_path,
        "tiny",
        {"timescale": {"kind": "explicit", "points": [0, 1, 3]}, "ingredients": INGREDIENTS},
    )
    out = tmp_path / "out"

    assert main(["build", str(config), "--output-dir", str(out)]) == EXIT_OK
    assert main(["verify", str(out / "tiny.bundle.json"), "--output-dir", str(out)]) == EXIT_OK


def test_hand_written_non_extremal_fails_checks(tmp_path, capsys):
    config = _write_config(
        tmp_path,
        "handwritten",
        {"timescale": {"kind": "uniform", "a": 0, "b": 3, "h": 1}, "lagrangian": "0.5*v^2 - x"},
    )

    code = main(["verify", str(config), "--output-dir", str(tmp_path / "out")])

    assert code == EXIT_CHECK_FAILED
    assert "[L = 0.5*v^2 - x]" in capsys.readouterr().out


def test_literal_general_comparison(tmp_path, capsys):
    config = _write_config(
        tmp_path,
        "literal",
        {
            "timescale": UNIFORM,
            "ingredients": INGREDIENTS,
            "extremal": {"kind": "expr", "payload": "t"},
        },
    )
    out = tmp_path / "out"

    assert main(["verify", str(config), "--literal-general", "--output-dir", str(out)]) == EXIT_OK
    stdout = capsys.readouterr().out
    assert "g_shifted" in stdout
    assert "g_literal" in stdout
    assert (out / "literal.literal.report.json").is_file()

    assert main(["build", str(config), "--literal-general", "--output-dir", str(out)]) == EXIT_OK
    assert (out / "literal.literal.bundle.json").is_file()


def test_eval_along_extremal_is_potential_sum(tmp_path, capsys):
    config = _write_config(
        tmp_path, "potential", {"timescale": UNIFORM, "ingredients": {**INGREDIENTS, "P": "t + x^2"}}
    )
    out = tmp_path / "out"
    assert main(["build", str(config), "--output-dir", str(out)]) == EXIT_OK
    capsys.readouterr()
    t = np.arange(7) * 0.5
    trajectory = _write_trajectory(tmp_path / "zero.csv", t, np.zeros(7))

    assert main(["eval", str(out / "potential.bundle.json"), str(trajectory)]) == EXIT_OK

    # sum of mu * t over [0, 3) with mu = 0.5
    assert float(capsys.readouterr().out) == pytest.approx(3.75, rel=1e-14)


def test_eval_constant_lagrangian_is_interval_length(tmp_path, capsys):
    config = _write_config(
        tmp_path,
        "unit",
        {"timescale": {"kind": "qpow", "q": 2, "kmin": 0, "kmax": 4}, "ingredients": {"P": "1"}},
    )
    out = tmp_path / "out"
    assert main(["build", str(config), "--output-dir", str(out)]) == EXIT_OK
    capsys.readouterr()
    t = 2.0 ** np.arange(5)
    trajectory = _write_trajectory(tmp_path / "zero.csv", t, np.zeros(5))

    assert main(["eval", str(out / "unit.bundle.json"), str(trajectory)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "15"


def test_eval_rejects_incomplete_or_mismatched_trajectories(tmp_path, capsys):
    config = _write_config(tmp_path, "problem", {"timescale": UNIFORM, "ingredients": INGREDIENTS})
    out = tmp_path / "out"
    assert main(["build", str(config), "--output-dir", str(out)]) == EXIT_OK
    bundle = out / "problem.bundle.json"
    t = np.arange(7) * 0.5

    missing = _write_trajectory(tmp_path / "missing.csv", t[:-1], np.zeros(6))
    with pytest.raises(SystemExit) as info:
        main(["eval", str(bundle), str(missing)])
    assert info.value.code == 2

    shifted = _write_trajectory(tmp_path / "shifted.csv", t, np.ones(7))
    assert main(["eval", str(bundle), str(shifted)]) == EXIT_CHECK_FAILED
    assert "boundary condition" in capsys.readouterr().err


def test_table_includes_exponential_of_r(tmp_path):
    config = _write_config(tmp_path, "grid", {"timescale": {"kind": "uniform", "a": 0, "b": 4, "h": 1}})
    out = tmp_path / "out"

    assert main(["table", str(config), "--output-dir", str(out)]) == EXIT_OK

    table = np.genfromtxt(out / "grid.table.csv", delimiter=",", names=True)
    assert table.dtype.names == ("index", "t", "sigma", "mu", "exp_r")
    # 1 + mu r = -1 on the integers
    assert table["exp_r"][:-1].tolist() == [1.0, -1.0, 1.0, -1.0]
    assert np.isnan(table["exp_r"][-1])


def test_output_dir_from_environment(tmp_path, monkeypatch):
    config = _write_config(tmp_path, "problem", {"timescale": UNIFORM, "ingredients": INGREDIENTS})
    monkeypatch.setenv("LAGRANGIAN_OUTPUT_DIR", str(tmp_path / "from-env"))

    assert main(["build", str(config)]) == EXIT_OK
    assert (tmp_path / "from-env" / "problem.bundle.json").is_file()


def test_schema(capsys):
    assert main(["schema"]) == EXIT_OK

    schema = json.loads(capsys.readouterr().out)
    assert "timescale" in schema["properties"]
    assert "timescale" in schema["required"]


def test_sweep(tmp_path, capsys):
    config = _write_config(tmp_path, "sweep", {"timescale": UNIFORM, "options": {"seed": 11}})

    assert main(["sweep", str(config), "--draws", "6", "--workers", "2"]) == EXIT_OK

    lines = dict(line.split(None, 1) for line in capsys.readouterr().out.splitlines())
    assert lines["draws"] == "6"
    assert lines["passed"] == "6"
    assert lines["failed"] == "0"


def test_build_is_deterministic(tmp_path):
    config = _write_config(
        tmp_path,
        "problem",
        {"timescale": UNIFORM, "ingredients": INGREDIENTS, "extremal": {"kind": "expr", "payload": "sin(t)"}},
    )

    assert main(["build", str(config), "--output-dir", str(tmp_path / "first")]) == EXIT_OK
    assert main(["build", str(config), "--output-dir", str(tmp_path / "second")]) == EXIT_OK

    first = (tmp_path / "first" / "problem.bundle.json").read_bytes()
    second = (tmp_path / "second" / "problem.bundle.json").read_bytes()
    assert first == second


@pytest.mark.parametrize(
    "document",
    [
        {"timescale": {"kind": "spiral"}},
        {"timescale": UNIFORM, "ingredients": INGREDIENTS, "lagrangian": "v^2"},
        {"timescale": UNIFORM, "ingredients": {"P": "2*(x"}},
    ],
)
def test_malformed_configuration_is_a_usage_error(tmp_path, document):
    config = _write_config(tmp_path, "broken", document)

    with pytest.raises(SystemExit) as info:
        main(["build", str(config), "--output-dir", str(tmp_path / "out")])
    assert info.value.code == 2


def test_missing_config_and_command(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", str(tmp_path / "absent.json")])
    assert info.value.code == 2

    assert main([]) == 2
    assert "usage" in capsys.readouterr().out


def test_eval_rejects_blank_trajectory_values(tmp_path, capsys):
    config = _write_config(tmp_path, "problem", {"timescale": UNIFORM, "ingredients": INGREDIENTS})
    out = tmp_path / "out"
    assert main(["build", str(config), "--output-dir", str(out)]) == EXIT_OK
    capsys.readouterr()
    trajectory = tmp_path / "blank.csv"
    rows = [f"{0.5 * i!r},0.0" for i in range(7)]
    rows[2] = "1.0,"
    trajectory.write_text("t,y\n" + "\n".join(rows) + "\n", encoding="utf-8")

    with pytest.raises(SystemExit) as info:
        main(["eval", str(out / "problem.bundle.json"), str(trajectory)])
    assert info.value.code == 2
    assert "t=1.0" in capsys.readouterr().err


def test_overflowing_ingredient_is_a_validation_error(tmp_path, capsys):
    config = _write_config(
        tmp_path, "overflow", {"timescale": UNIFORM, "ingredients": {"P": "exp(700)*exp(700)*x"}}
    )

    assert main(["build", str(config), "--output-dir", str(tmp_path / "out")]) == EXIT_VALIDATION
    assert "ingredient P is not finite" in capsys.readouterr().err
    assert not (tmp_path / "out" / "overflow.bundle.json").exists()


@pytest.mark.parametrize(
    ("timescale", "message"),
    [
        ({"kind": "qpow", "q": 1, "kmax": 3}, "needs q > 1"),
        ({"kind": "uniform", "a": 0, "b": 1, "h": 0.3}, "not an integer multiple"),
    ],
)
@pytest.mark.parametrize("command", ["build", "table"])
def test_inadmissible_grid_is_a_usage_error(tmp_path, capsys, timescale, message, command):
    config = _write_config(tmp_path, "grid", {"timescale": timescale, "ingredients": INGREDIENTS})

    with pytest.raises(SystemExit) as info:
        main([command, str(config), "--output-dir", str(tmp_path / "out")])
    assert info.value.code == 2
    assert message in capsys.readouterr().err


def test_literal_general_is_rejected_for_bundles(tmp_path, capsys):
    config = _write_config(tmp_path, "problem", {"timescale": UNIFORM, "ingredients": INGREDIENTS})
    out = tmp_path / "out"
    assert main(["build", str(config), "--output-dir", str(out)]) == EXIT_OK

    with pytest.raises(SystemExit) as info:
        main(["verify", str(out / "problem.bundle.json"), "--literal-general", "--output-dir", str(out)])
    assert info.value.code == 2
    assert "--literal-general" in capsys.readouterr().err
