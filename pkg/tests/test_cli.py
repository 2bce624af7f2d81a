import json
import math

import numpy as np
import pytest

from extremal import cli
from extremal.core import DiscConfiguration, TorusConfiguration, cassels_log_bound, log_pairwise_product
from extremal.report import (
    cmd_dubickas,
    cmd_identities,
    cmd_optimize,
    cmd_scan_g,
    cmd_verify,
    dumps,
    load_configuration,
)


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


@pytest.fixture
def pentagon(tmp_path):
    angles = (2 * np.pi * np.arange(5) / 5).tolist()
    return write(tmp_path, "pentagon.json", {"rho": 2, "angles": angles})


@pytest.fixture
def random_points(tmp_path):
    rng = np.random.default_rng(99)
    pts = 1.5 * np.sqrt(rng.uniform(0, 1, 6)) * np.exp(2j * np.pi * rng.uniform(0, 1, 6))
    path = write(tmp_path, "random.json", {"rho": 1.5, "points": [{"re": z.real, "im": z.imag} for z in pts]})
    return path, pts


def run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestConfigurationFiles:
    def test_angles_schema(self, pentagon):
        cfg, tcfg = load_configuration(pentagon)
        assert cfg.n == 5 and tcfg is not None
        assert np.allclose(np.abs(cfg.points), 2.0)

    def test_points_schema(self, random_points):
        path, pts = random_points
        cfg, tcfg = load_configuration(path)
        assert tcfg is None and np.allclose(cfg.points, pts)

    @pytest.mark.parametrize(
        "payload",
        [
            {"points": []},
            {"rho": 2, "points": [{"re": 1}]},
            {"rho": 2, "angles": [0], "points": []},
            {"rho": 2, "points": [{"re": 3, "im": 0}]},
            [1, 2],
            {"rho": "x", "angles": [0]},
            {"rho": 1, "angles": [0, 1]},
        ],
    )
    def test_malformed_inputs_exit_2(self, tmp_path, capsys, payload):
        path = write(tmp_path, "bad.json", payload)
        code, out, err = run_cli(["verify", "--input", str(path)], capsys)
        assert code == 2 and out == "" and "error" in err

    def test_missing_and_unparseable_files(self, tmp_path, capsys):
        assert run_cli(["verify", "--input", str(tmp_path / "nope.json")], capsys)[0] == 2
        bad = tmp_path / "garbage.json"
        bad.write_text("{not json")
        assert run_cli(["verify", "--input", str(bad)], capsys)[0] == 2


class TestVerify:
    def test_regular_pentagon(self, pentagon, capsys):
        code, out, _ = run_cli(["verify", "--input", str(pentagon)], capsys)
        doc = json.loads(out)
        assert code == 0 and doc["exit_status"] == 0
        assert doc["data"]["equality"] is True
        names = [c["name"] for c in doc["checks"]]
        assert names == ["main_inequality", "dubickas_factorization"]
        assert doc["manifest"]["tolerances"]["inequality"] == 1e-12

    def test_single_point(self, tmp_path):
        path = write(tmp_path, "one.json", {"rho": 3, "points": [{"re": 0.5, "im": 0.0}]})
        doc = cmd_verify(path)
        assert doc.exit_status == 0
        assert doc.checks[0].computed == 0.0 and doc.checks[0].reference == 0.0

    def test_random_config_positive_gap(self, random_points):
        path, pts = random_points
        doc = cmd_verify(path, identities=True)
        assert doc.exit_status == 0
        main = doc.checks[0]
        expected_gap = cassels_log_bound(6, 1.5) - log_pairwise_product(DiscConfiguration(pts, 1.5))
        assert main.gap == pytest.approx(expected_gap, rel=1e-12)
        assert main.gap > 0
        assert doc.data["equality"] is False
        assert any("skipped" in note for note in doc.notes)
        assert {"mean_B", "additive_inequality"} <= {c.name for c in doc.checks}

    def test_output_file(self, pentagon, tmp_path, capsys):
        target = tmp_path / "report.json"
        code, out, _ = run_cli(["verify", "--input", str(pentagon), "--output", str(target)], capsys)
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["schema"] == 1


class TestOptimize:
    def test_triangle(self):
        doc = cmd_optimize(3, 2.0, starts=50, seed=42)
        assert doc.exit_status == 0
        assert doc.data["best"]["log_product"] == pytest.approx(math.log(9261), abs=1e-8)
        assert doc.data["statuses"].get("global", 0) >= 1
        assert sum(doc.data["basins"].values()) == 50

    def test_two_points_antipodal(self):
        doc = cmd_optimize(2, 1.5, starts=4, seed=0)
        a = doc.data["best"]["angles"]
        assert abs(a[1] - a[0]) == pytest.approx(math.pi, abs=1e-8)

    @pytest.mark.parametrize("argv", [["--n", "1", "--rho", "2"], ["--n", "3", "--rho", "1"], ["--n", "3", "--rho", "2", "--starts", "0"]])
    def test_bad_parameters_exit_2(self, argv, capsys):
        assert run_cli(["optimize", *argv], capsys)[0] == 2

    def test_determinism(self, capsys):
        argv = ["optimize", "--n", "4", "--rho", "2.5", "--starts", "8", "--seed", "17"]
        first = json.loads(run_cli(argv, capsys)[1])
        second = json.loads(run_cli(argv, capsys)[1])
        for doc in (first, second):
            del doc["manifest"]["timestamp"]
        assert dumps(first) == dumps(second)


class TestIdentities:
    def test_sweep_passes(self):
        doc = cmd_identities(4, trials=100, seed=0)
        assert doc.exit_status == 0, [c.name for c in doc.checks if not c.passed]
        assert doc.findings == []

    def test_zero_trials(self):
        doc = cmd_identities(3, trials=0)
        assert doc.checks == [] and doc.exit_status == 0

    def test_equality_flags_for_generated_roots(self):
        doc = cmd_identities(3, trials=20, seed=5)
        names = {c.name: c for c in doc.checks}
        assert names["equality_case_additive"].passed
        assert names["equality_case_function"].passed

    def test_single_point(self):
        assert cmd_identities(1, trials=10, seed=2).exit_status == 0

    def test_cli_bad_n(self, capsys):
        assert run_cli(["identities", "--n", "0"], capsys)[0] == 2


class TestScanG:
    def test_regular_flat(self):
        doc = cmd_scan_g(5, regular=True, grid=40)
        assert doc.exit_status == 0
        assert max(abs(v) for v in doc.data["g"]) < 1e-10

    def test_random_nondecreasing(self):
        doc = cmd_scan_g(4, seed=3, grid=100, a_max=0.99)
        g = doc.data["g"]
        assert doc.exit_status == 0 and len(g) == 100
        assert all(b >= a - 1e-10 for a, b in zip(g, g[1:]))

    def test_single_point_zero(self):
        doc = cmd_scan_g(1, grid=10)
        assert all(abs(v) < 1e-14 for v in doc.data["g"])

    @pytest.mark.parametrize("argv", [["--n", "3", "--grid", "1"], ["--n", "3", "--a-max", "1.0"]])
    def test_bad_arguments(self, argv, capsys):
        assert run_cli(["scan-g", *argv], capsys)[0] == 2


class TestDubickas:
    def test_degree_two_not_exceeded(self):
        doc = cmd_dubickas(5, 2, trials=10_000, seed=0)
        assert doc.exit_status == 0
        assert doc.data["record"]["exceeds"] is False

    def test_two_points(self):
        doc = cmd_dubickas(2, 1, trials=500, seed=0)
        assert doc.data["record"]["regular_ngon_value"] == pytest.approx(4.0)
        assert doc.data["record"]["best_value"] == pytest.approx(4.0, abs=1e-9)

    def test_open_degree_reports_without_failing(self):
        doc = cmd_dubickas(6, 5, trials=2000, seed=1)
        assert doc.exit_status == 0
        assert doc.checks == []
        assert any("open case degree 5" in note for note in doc.notes)

    def test_bad_degree_exit_2(self, capsys):
        assert run_cli(["dubickas", "--n", "3", "--degree", "4"], capsys)[0] == 2
        assert run_cli(["dubickas", "--n", "3", "--degree", "0"], capsys)[0] == 2


class TestReportDocument:
    def test_round_trip_is_byte_identical(self, pentagon):
        doc = cmd_verify(pentagon, identities=True)
        text = doc.to_json()
        assert dumps(json.loads(text)) == text

    def test_round_trip_preserves_doubles(self):
        doc = cmd_scan_g(3, seed=8, grid=20)
        parsed = json.loads(doc.to_json())
        assert parsed["data"]["g"] == doc.data["g"].tolist()

    def test_exit_status_tracks_findings(self, pentagon):
        doc = cmd_verify(pentagon)
        assert doc.exit_status == 0
        doc.findings.append("synthetic")
        assert doc.exit_status == 1

    def test_failed_check_exit_1(self, tmp_path, capsys):
        # a negative slack makes even the equality case fail
        angles = TorusConfiguration.regular(4).angles.tolist()
        path = write(tmp_path, "sq.json", {"rho": 2, "angles": angles})
        code, out, _ = run_cli(["verify", "--input", str(path), "--tol", "-1.0"], capsys)
        assert code == 1 and json.loads(out)["exit_status"] == 1

    def test_manifest_records_rng_and_version(self):
        doc = cmd_scan_g(2, grid=5)
        manifest = doc.to_dict()["manifest"]
        assert manifest["rng"] == "numpy.random.PCG64"
        assert manifest["tool_version"] == "0.1.0"
        assert "timestamp" not in doc.payload()["manifest"]
