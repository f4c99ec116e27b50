import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from bipartite_mf.cli import main, parse_range
from bipartite_mf.finite import FiniteModel, exact_pressure, sandwich_envelope
from bipartite_mf.roots import solve_t_check

from conftest import symmetric_params

LN2 = math.log(2.0)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestPressure:
    def test_high_temperature(self, capsys):
        code, out, _ = run(capsys, "pressure", "--a", "0.2", "--b", "-0.8", "--t", "1.5")
        assert code == 0
        rec = json.loads(out)
        assert rec["pressure"] == pytest.approx(LN2, abs=1e-12)
        assert set(rec) == {"pressure", "f_max", "argmax", "degenerate_ground_state"}

    def test_full_flags_at_infinite_temperature(self, capsys):
        code, out, _ = run(capsys, "pressure", "--beta", "0", "--j11", "1", "--j12", "-1", "--j22", "1",
                           "--h1", "0", "--h2", "0", "--alpha", "0.5")
        assert code == 0
        assert json.loads(out)["pressure"] == LN2

    def test_ordered_phase_against_finite_size(self, capsys):
        code, out, _ = run(capsys, "pressure", "--a", "0.2", "--b", "-0.8", "--t", "0.5")
        rec = json.loads(out)
        assert code == 0 and rec["degenerate_ground_state"]
        p_n = exact_pressure(FiniteModel(5000, 5000, symmetric_params(0.5, -0.8)))
        assert abs(p_n - rec["pressure"]) < sandwich_envelope(5000, 5000, 2)

    def test_a_defaults_from_b(self, capsys):
        _, out1, _ = run(capsys, "pressure", "--b", "-0.8", "--t", "0.5")
        _, out2, _ = run(capsys, "pressure", "--a", "0.2", "--b", "-0.8", "--t", "0.5")
        assert out1 == out2

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "pressure", "--b", "-0.8", "--t", "0.5", "--format", "csv")
        assert code == 0
        table = rows(out)
        assert len(table) == 2
        assert "\r" not in out
        # 17 significant digits round-trip
        _, js, _ = run(capsys, "pressure", "--b", "-0.8", "--t", "0.5")
        assert float(table[0]["pressure"]) == json.loads(js)["pressure"]


class TestCriticalPoints:
    @pytest.mark.parametrize("t, count", [("1.1", 1), ("0.3", 5), ("0.25", 9)])
    def test_figure_counts(self, capsys, t, count):
        b = "-0.8" if t == "1.1" else "-0.3"
        code, out, _ = run(capsys, "critical-points", "--t", t, "--b", b)
        records = json.loads(out)
        assert code == 0 and len(records) == count
        for rec in records:
            assert set(rec) == {"case_label", "mu1", "mu2", "kind", "branch", "hessian_det", "f_value",
                                "numeric_fallback"}

    def test_generic_path(self, capsys):
        code, out, _ = run(capsys, "critical-points", "--j11", "1", "--j12", "-0.7", "--j22", "0.4",
                           "--h1", "0.2", "--h2", "0.1", "--alpha", "0.4", "--beta", "3", "--format", "csv")
        assert code == 0
        table = rows(out)
        assert table and all(r["case_label"] == "" for r in table)


class TestPhaseDiagram:
    def test_columns_and_order(self, capsys):
        code, out, _ = run(capsys, "phase-diagram", "--b-range", "-0.8:-0.2:3", "--t-range", "0.5:1.5:2")
        assert code == 0
        table = rows(out)
        assert list(table[0]) == ["t", "b", "case_label", "n_critical", "n_maxima", "pressure"]
        assert [(float(r["t"]), float(r["b"])) for r in table] == [
            (t, b) for t in (0.5, 1.5) for b in (-0.8, -0.5, -0.2)]

    def test_reference_cell(self, capsys):
        _, out, _ = run(capsys, "phase-diagram", "--b-range", "-0.3:-0.3:1", "--t-range", "0.5:0.5:1")
        (cell,) = rows(out)
        assert cell["case_label"] == "1d" and cell["n_critical"] == "3"

    def test_high_temperature_cells(self, capsys):
        _, out, _ = run(capsys, "phase-diagram", "--b-range", "-0.95:-0.05:7", "--t-range", "1.05:3:4")
        assert all(r["n_critical"] == "1" and r["case_label"] == "1a" for r in rows(out))

    def test_nine_point_boundary_follows_t_check(self, capsys):
        b_vals = np.linspace(-0.45, -0.05, 5)
        t_vals = np.linspace(0.02, 0.9, 89)
        _, out, _ = run(capsys, "phase-diagram", "--b-range", "-0.45:-0.05:5", "--t-range", "0.02:0.9:89")
        table = rows(out)
        step = t_vals[1] - t_vals[0]
        for b in b_vals:
            nine = [float(r["t"]) for r in table if float(r["b"]) == pytest.approx(b) and r["n_critical"] == "9"]
            assert nine, b
            assert abs(max(nine) - solve_t_check(b).root) <= step

    def test_byte_stable_across_threads(self, capsys):
        argv = ["phase-diagram", "--b-range", "-0.8:-0.1:6", "--t-range", "0.1:1.2:6"]
        outs = {run(capsys, *argv, "--threads", str(n))[1] for n in (1, 2, 5)}
        assert len(outs) == 1

    def test_json_output(self, capsys):
        _, out, _ = run(capsys, "phase-diagram", "--b-range", "-0.3:0.3:3", "--t-range", "0.5:0.5:1",
                        "--format", "json")
        recs = json.loads(out)
        assert [r["case_label"] for r in recs] == ["1d", None, "1d-mirrored"]


class TestFiniteN:
    def test_table(self, capsys):
        code, out, _ = run(capsys, "finite-n", "--t", "0.75", "--b", "-0.8", "--sizes", "100,1000,10000")
        assert code == 0
        rec = json.loads(out)
        assert rec["C"] == 2 and rec["multiplicity_bounds"]["lower_violations"] == 0
        residuals = [abs(r["residual"]) for r in rec["rows"]]
        assert residuals == sorted(residuals, reverse=True)
        assert all(abs(r["residual"]) < r["envelope"] for r in rec["rows"])

    def test_csv_with_explicit_constant(self, capsys):
        code, out, _ = run(capsys, "finite-n", "--t", "0.75", "--b", "-0.8", "--sizes", "10,20",
                           "--C", "3", "--bound-max", "50", "--format", "csv")
        assert code == 0
        assert [r["N"] for r in rows(out)] == ["10", "20"]


class TestFieldSelection:
    def test_selects(self, capsys):
        code, out, _ = run(capsys, "field-selection", "--t", "0.5", "--b", "-0.8", "--h1", "1e-4", "--h2", "-1e-4")
        rec = json.loads(out)
        assert code == 0
        assert rec["selected"][0] > 0 > rec["selected"][1]
        assert rec["dot_product"] > 0
        assert rec["field"] == [1e-4, -1e-4]

    def test_tie(self, capsys):
        code, out, _ = run(capsys, "field-selection", "--t", "0.5", "--b", "-0.8", "--h1", "1e-4", "--h2", "1e-4")
        assert code == 0 and json.loads(out)["selected"] == "tie"


class TestExitCodes:
    @pytest.mark.parametrize("argv", [
        [],
        ["nonsense"],
        ["pressure", "--t", "0.5"],
        ["pressure", "--b", "-0.8", "--t", "0.5", "--j11", "1"],
        ["pressure", "--j11", "1", "--j12", "-1"],
        ["pressure", "--b", "-0.8", "--t", "0.5", "--format", "xml"],
        ["pressure", "--a", "0.5", "--b", "-0.8", "--t", "0.5"],
        ["pressure", "--j11", "1", "--j12", "-1", "--j22", "1", "--beta", "-1"],
        ["phase-diagram", "--b-range", "1:2", "--t-range", "0:1:3"],
        ["phase-diagram", "--b-range", "-1:0:0", "--t-range", "0:1:3"],
        ["finite-n", "--b", "-0.8", "--t", "0.5", "--sizes", "a,b"],
        ["pressure", "--b", "-0.8", "--t", "0.5", "--threads", "0"],
        ["field-selection", "--t", "0.5", "--b", "-0.8"],
    ])
    def test_usage_errors(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2
        assert err

    def test_numeric_failure(self, capsys):
        # a model without degenerate ground state has nothing to select: a failed computation
        code, out, err = run(capsys, "field-selection", "--t", "1.5", "--b", "-0.8", "--h1", "1e-4", "--h2", "0")
        assert code == 1
        assert out == "" and "error" in err

    def test_size_cap_is_numeric_failure(self, capsys):
        code, _, _ = run(capsys, "finite-n", "--b", "-0.8", "--t", "0.5", "--sizes", "30000", "--bound-max", "5")
        assert code == 1


class TestOutput:
    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "out.json"
        code, out, _ = run(capsys, "pressure", "--b", "-0.8", "--t", "0.5", "--output", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["degenerate_ground_state"] is True

    def test_range_parsing(self):
        np.testing.assert_allclose(parse_range("0:1:3"), [0, 0.5, 1])
        np.testing.assert_allclose(parse_range("0.3:9:1"), [0.3])

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "bipartite_mf", "pressure", "--b", "-0.8", "--t", "2"],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["pressure"] == pytest.approx(LN2, abs=1e-12)
