import json
import math
import subprocess
from pathlib import Path

import pytest

from stokeslab.cli import dump_config, load_config, parse_form, parse_region, run_cli
from stokeslab.forms import Curve

README = Path(__file__).resolve().parents[1] / "README.md"


def run(capsys, *argv):
    code = run_cli(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestMiniSyntax:
    def test_box_region(self):
        region = parse_region("box:0,0,2,2")
        assert region.kind == "box"
        assert region.lo == (0.0, 0.0) and region.hi == (2.0, 2.0)

    def test_annulus_region(self):
        region = parse_region("annulus:1,2")
        assert region.kind == "annulus"
        assert (region.r_inner, region.r_outer) == (1.0, 2.0)

    def test_circle_clockwise(self):
        curve = parse_region("circle:1.5,cw")
        assert isinstance(curve, Curve)
        assert curve.orientation == -1

    def test_const_form(self):
        region = parse_region("box:0,0,2,2")
        form = parse_form("const:3", region)
        assert form.degree == 2
        assert form.coefficient_at((1.0, 1.0)) == 3.0

    def test_expr_form(self):
        region = parse_region("annulus:1,2")
        form = parse_form("expr:1:polar:0;r", region)
        assert form.degree == 1
        assert form.coefficient_at((1.5, 0.3), which=1) == 1.5

    def test_piecewise_form(self, tmp_path):
        data = {
            "degree": 2,
            "chart": "cartesian",
            "domain": {"lo": [0, 0], "hi": [2, 1]},
            "coefficients": ["0"],
            "pieces": [
                {"lo": [0, 0], "hi": [1, 1], "coefficients": ["1"]},
                {"lo": [1, 0], "hi": [2, 1], "coefficients": ["2"]},
            ],
        }
        path = tmp_path / "form.json"
        path.write_text(json.dumps(data))
        region = parse_region("box:0,0,2,1")
        form = parse_form(f"piecewise:@{path}", region)
        assert form.coefficient_at((0.5, 0.5)) == 1.0
        assert form.coefficient_at((1.5, 0.5)) == 2.0

    def test_bad_inputs(self):
        from stokeslab.errors import InvalidGeometryError
        with pytest.raises(InvalidGeometryError):
            parse_region("box:0,0,1")
        with pytest.raises(InvalidGeometryError):
            parse_region("torus:1,2")
        with pytest.raises(InvalidGeometryError):
            parse_form("mystery:1", parse_region("box:0,0,1,1"))


class TestSubcommands:
    def test_example_annulus(self, capsys):
        code, out, _ = run(capsys, "example", "annulus", "--ri", "1", "--ro", "2")
        assert code == 0
        payload = json.loads(out)
        assert payload["schema"] == "oracle_result"
        assert payload["S_circle"] == pytest.approx(1.837877066, abs=1e-6)
        assert payload["delta_S"] == pytest.approx(2.132075618, abs=1e-6)

    def test_example_rectangle_with_mean_order(self, capsys):
        code, out, _ = run(capsys, "example", "rectangle", "--a", "0.5",
                           "--b", "0.5", "--c", "1", "--r", "2", "--p", "2")
        assert code == 0
        payload = json.loads(out)
        assert payload["mean_p_X"] == pytest.approx(0.75 ** 0.5, abs=1e-12)

    def test_entropy_uniform(self, capsys):
        code, out, _ = run(capsys, "entropy", "--region", "box:0,0,2,2",
                           "--form", "const:1", "--resolution", "8")
        assert code == 0
        payload = json.loads(out)
        assert payload["S"] == pytest.approx(math.log(4.0), abs=1e-12)

    def test_stokes_check(self, capsys):
        code, out, _ = run(capsys, "stokes-check", "--form", "expr:1:polar:0;r",
                           "--region", "annulus:1,2", "--candidate", "circle:1",
                           "--resolution", "1024")
        assert code == 0
        payload = json.loads(out)
        assert payload["residual"] <= 1e-9

    def test_search(self, capsys, tmp_path):
        cochain = tmp_path / "dw.json"
        cochain.write_text(json.dumps(
            {"degree": 2, "shape": [2, 2], "values": [1, -1, 2, 0]}))
        code, out, _ = run(capsys, "search", "--grid", "2x2",
                           "--cochain", str(cochain), "--tol", "1e-9")
        assert code == 0
        payload = json.loads(out)
        assert len(payload["candidates"]) == 4
        assert payload["verdict"] == "tie-degenerate"
        assert payload["argmax"] == "boundary"

    def test_search_csv_output(self, capsys, tmp_path):
        cochain = tmp_path / "dw.json"
        cochain.write_text(json.dumps(
            {"degree": 2, "shape": [2, 2], "values": [1, 1, 1, 1]}))
        csv_path = tmp_path / "rows.csv"
        code, _, _ = run(capsys, "search", "--grid", "2x2",
                         "--cochain", str(cochain), "--csv", str(csv_path))
        assert code == 0
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "bitmask,residual,entropy"
        assert len(lines) == 2

    def test_converge(self, capsys):
        code, out, _ = run(capsys, "converge", "--quantity", "entropy",
                           "--example", "uniform", "--schedule", "8,16,32")
        assert code == 0
        payload = json.loads(out)
        assert payload["schema"] == "convergence_table"
        assert all(row["abs_error"] <= 1e-12 for row in payload["rows"])

    def test_report_file_output(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, _, _ = run(capsys, "entropy", "--region", "box:0,0,2,2",
                         "--form", "const:1", "--resolution", "8",
                         "--out", str(out_path))
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert payload["schema"] == "entropy_report"


class TestExitCodes:
    def test_unknown_flag(self, capsys):
        code, _, _ = run(capsys, "entropy", "--region", "box:0,0,2,2",
                         "--form", "const:1", "--wat", "1")
        assert code == 1

    def test_bad_region(self, capsys):
        code, _, err = run(capsys, "entropy", "--region", "box:0,0,1",
                           "--form", "const:1")
        assert code == 1
        assert "error" in err

    def test_missing_cochain_file(self, capsys):
        code, _, _ = run(capsys, "search", "--grid", "2x2",
                         "--cochain", "does-not-exist.json")
        assert code == 1

    def test_nonconvergent_exit_code(self, capsys):
        # a strictly non-monotone schedule is a validation error, not a
        # convergence failure; check both paths
        code, _, _ = run(capsys, "converge", "--quantity", "entropy",
                         "--example", "uniform", "--schedule", "8,8,8")
        assert code == 1


class TestConfig:
    def test_round_trip(self, tmp_path):
        configs = [
            {"resolution": 64, "convention": "coordinate"},
            {"tol": 1e-9, "seed": 7},
            {"region": "box:0,0,2,2", "form": "const:1"},
        ]
        for i, config in enumerate(configs):
            path = tmp_path / f"cfg{i}.json"
            dump_config(config, path)
            assert load_config(path) == config

    def test_config_supplies_defaults_flags_win(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"region": "box:0,0,2,2", "form": "const:1",
                                   "resolution": 8}))
        code, out, _ = run(capsys, "--config", str(cfg), "entropy")
        assert code == 0
        assert json.loads(out)["resolution"] == 8
        code, out, _ = run(capsys, "--config", str(cfg), "entropy",
                           "--resolution", "16")
        assert code == 0
        assert json.loads(out)["resolution"] == 16

    def test_determinism(self, capsys):
        argv = ["entropy", "--region", "box:0,0,2,2", "--form", "const:1",
                "--resolution", "8"]
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second


def readme_commands():
    """Every shell command shown in the README's fenced code blocks."""
    if not README.exists():
        return []
    commands = []
    in_block = False
    for line in README.read_text().splitlines():
        if line.startswith("```"):
            in_block = not in_block
            continue
        if in_block and line.startswith("$ "):
            commands.append(line[2:].strip())
    # install/test bootstrap lines need the package tree, not a scratch cwd
    return [c for c in commands
            if not c.startswith(("pip ", "pytest"))]


def test_readme_commands_run_clean(tmp_path):
    commands = readme_commands()
    assert commands, "README should document runnable commands"
    for command in commands:
        proc = subprocess.run(command, shell=True, cwd=tmp_path,
                              capture_output=True, text=True, timeout=300)
        assert proc.returncode == 0, f"{command!r} failed: {proc.stderr}"
