import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from isomel.cli import EXIT_INPUT, EXIT_MISMATCH, EXIT_NUMERIC, EXIT_OK, dumps, parse_range, run, svg_plot
from isomel.melnikov import PerturbationSpec
from isomel.zerolab import realize_perturbation


@pytest.fixture(scope="module")
def witness_file(tmp_path_factory):
    pert, _ = realize_perturbation("S1", 0, [math.sqrt(5) - 2])
    path = tmp_path_factory.mktemp("pert") / "w.json"
    path.write_text(pert.to_json())
    return str(path)


@pytest.fixture
def zero_file(tmp_path):
    path = tmp_path / "zero.json"
    path.write_text(PerturbationSpec.zero(2, "S2").to_json())
    return str(path)


def values(text):
    return [r["value"] for r in json.loads(text)["rows"]]


class TestBounds:
    def test_s3_range(self):
        code, out, _ = run(["bounds", "--center", "S3", "--n", "0..5"])
        assert code == EXIT_OK and values(out) == [1, 3, 5, 8, 10, 12]

    def test_s4_smooth(self):
        assert values(run(["bounds", "--center", "S4", "--smooth", "--n", "7"])[1]) == [15]

    def test_s2_zero(self):
        assert values(run(["bounds", "--center", "S2", "--n", "0"])[1]) == [1]

    def test_discrepancy_note(self):
        rows = json.loads(run(["bounds", "--center", "S4", "--n", "6"])[1])["rows"]
        assert rows[0]["notes"]["derived_value"] == 108

    def test_csv(self):
        code, out, _ = run(["bounds", "--n", "0,1", "--format", "csv"])
        assert code == 0 and len(out.strip().splitlines()) == 9


class TestVerify:
    def test_identities(self):
        code, out, _ = run(["verify", "identities"])
        doc = json.loads(out)
        names = [c["name"] for c in doc["suites"]["identities"]]
        assert code == EXIT_OK and "I_-3 = I_0 = h(4+h)pi/8" in names

    def test_fuchs(self):
        code, out, _ = run(["verify", "fuchs"])
        checks = {c["name"]: c for c in json.loads(out)["suites"]["fuchs"]}
        assert code == EXIT_OK
        assert checks["curve contact analysis"]["detail"]["verdict"] == "consistent"

    def test_unknown_suite(self):
        code, _, err = run(["verify", "everything"])
        assert code == EXIT_INPUT and "invalid choice" in err

    def test_mismatch_exit(self, monkeypatch):
        import isomel.cli as cli

        monkeypatch.setitem(cli.SUITES, "fuchs", lambda cfg: [cli._check("forced", False)])
        code, out, _ = run(["verify", "fuchs"])
        assert code == EXIT_MISMATCH and json.loads(out)["failures"] == ["forced"]


class TestEvalCount:
    def test_eval_zero(self, zero_file):
        code, out, _ = run(["eval", "--pert", zero_file])
        doc = json.loads(out)
        assert code == EXIT_OK
        assert doc["closed_form"] == [0] * 50 and doc["quadrature"] == [0] * 50
        assert doc["max_abs_deviation"] == 0

    def test_eval_witness(self, witness_file):
        code, out, _ = run(["eval", "--pert", witness_file, "--grid", "12"])
        assert code == EXIT_OK and json.loads(out)["max_rel_deviation"] < 1e-6

    def test_count_witness(self, witness_file):
        code, out, _ = run(["count", "--pert", witness_file])
        doc = json.loads(out)
        assert code == EXIT_OK and doc["report"]["count"] == 1
        assert doc["report"]["locations"][0]["root"] == pytest.approx(math.sqrt(5) - 2, abs=1e-8)
        assert doc["within_bound"]

    def test_count_builds_witness(self):
        code, out, _ = run(["count", "--witness", "--center", "S2", "--n", "1"])
        assert code == EXIT_OK and json.loads(out)["report"]["count"] == 2

    def test_map_coeffs(self, witness_file):
        code, out, _ = run(["map-coeffs", "--pert", witness_file])
        doc = json.loads(out)
        assert code == EXIT_OK and doc["center"] == "S1" and len(doc["terms"]) == 2
        code, out, _ = run(["map-coeffs", "--center", "S1", "--n", "0", "--format", "csv"])
        assert out.splitlines()[0].startswith("tag,a+00")

    def test_svg_output(self, witness_file):
        code, out, _ = run(["count", "--pert", witness_file, "--format", "svg"])
        assert code == EXIT_OK and out.startswith("<svg") and out.count("<circle") == 1


class TestSimulate:
    def test_one_cycle(self, witness_file):
        code, out, _ = run(["simulate", "--pert", witness_file, "--eps", "1e-3", "--h-range", "0.05..2", "--grid", "20"])
        doc = json.loads(out)
        assert code == EXIT_OK and doc["count"] == 1
        assert abs(doc["cycles"][0]["h"] - (math.sqrt(5) - 2)) < 10 * 1e-3

    def test_trajectory(self, witness_file):
        code, out, _ = run(["simulate", "--pert", witness_file, "--trajectory", "0.5"])
        assert code == EXIT_OK and out.splitlines()[0] == "t,x,y,H"


class TestErrors:
    def test_missing_file(self, tmp_path):
        code, _, err = run(["count", "--pert", str(tmp_path / "none.json"), "--center", "S1"])
        assert code == EXIT_INPUT and "cannot read" in err

    def test_malformed_reports_line(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"n": 1,\n"a_plus": [[0, 0, 1.0],]}')
        code, _, err = run(["count", "--pert", str(p), "--center", "S1"])
        assert code == EXIT_INPUT and "line 2" in err

    def test_bad_field(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"n": 1, "b_minus": [[3, 0, 1.0]]}')
        code, _, err = run(["eval", "--pert", str(p), "--center", "S2"])
        assert code == EXIT_INPUT and "exceeds degree" in err

    def test_center_conflict(self, witness_file):
        assert run(["count", "--pert", witness_file, "--center", "S2"])[0] == EXIT_INPUT

    def test_bad_tolerance(self, witness_file):
        assert run(["count", "--pert", witness_file, "--tol", "-1"])[0] == EXIT_INPUT

    def test_numeric_failure(self, witness_file, monkeypatch):
        import isomel.pwsim as pw

        monkeypatch.setattr(pw, "T_MAX", 1e-3)
        code, _, err = run(["simulate", "--pert", witness_file, "--grid", "4"])
        assert code == EXIT_NUMERIC and "numeric failure" in err

    def test_bad_range(self):
        assert run(["bounds", "--n", "5..2"])[0] == EXIT_INPUT

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "isomel", "bounds", "--center", "S1", "--n", "0"],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and values(proc.stdout) == [1]
        proc = subprocess.run([sys.executable, "-m", "isomel", "frobnicate"], capture_output=True, text=True)
        assert proc.returncode == EXIT_INPUT


class TestSerialization:
    def test_deterministic(self, witness_file):
        a = run(["count", "--pert", witness_file, "--seed", "3"])
        b = run(["count", "--pert", witness_file, "--seed", "3"])
        assert a == b

    def test_seeded_verify_deterministic(self):
        from isomel.cli import RunConfig, suite_identities

        a = dumps(suite_identities(RunConfig("verify", seed=7)))
        b = dumps(suite_identities(RunConfig("verify", seed=7)))
        assert a == b

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_float_round_trip(self, x):
        assert json.loads(dumps([x]))[0] == x

    def test_sorted_keys(self):
        assert dumps({"b": 1, "a": [1.5, None]}) == '{\n "a": [1.5, null],\n "b": 1\n}'

    def test_svg_golden(self):
        svg = svg_plot([1.0, 2.0, 3.0], [-1.0, 0.0, 1.0], "t")
        assert '<polyline fill="none" stroke="#1f4e9c" points="70.00,360.00 345.00,195.00 620.00,30.00"/>' in svg
        assert svg == svg_plot([1.0, 2.0, 3.0], [-1.0, 0.0, 1.0], "t")

    def test_svg_breaks_on_nan(self):
        svg = svg_plot([1.0, 2.0, 3.0, 4.0], [1.0, np.nan, 2.0, 3.0], log_x=True)
        assert svg.count("<polyline") == 2

    def test_parse_range(self):
        assert parse_range("0..3") == [0, 1, 2, 3]
        assert parse_range("2,4") == [2, 4]
