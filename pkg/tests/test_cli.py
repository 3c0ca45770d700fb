"""Command-line interface: subcommands, config handling, exit codes, outputs."""

import json
import math

import pytest

from sqdisp.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDensity:
    def test_vacuum_csv_peak_off_origin(self, tmp_path, capsys):
        csv = tmp_path / "vac.csv"
        code, out, err = run(capsys, "density", "--state", "vacuum",
                             "--resolution", "48", "--out-csv", str(csv))
        assert code == 0
        rows = csv.read_text().strip().splitlines()
        assert rows[0] == "x,r,density"
        best = max(rows[1:], key=lambda line: float(line.split(",")[2]))
        x, r, _ = (float(v) for v in best.split(","))
        assert math.hypot(x, r) > 0.1

    def test_coherent_summary_fields(self, capsys):
        code, out, err = run(capsys, "density", "--state", "coherent",
                             "--a", "10", "--resolution", "64")
        assert code == 0
        summary = json.loads(out)
        assert set(summary) == {"likelihood", "argmax_x", "argmax_r", "mean_x",
                                "mean_r", "delta_x", "delta_r", "mass",
                                "seed_kind", "state"}
        assert summary["delta_r"] == pytest.approx(0.0707, rel=0.05)
        assert summary["likelihood"] == pytest.approx(10 / math.pi, rel=1e-3)

    def test_empty_window_rejected(self, capsys):
        code, out, err = run(capsys, "density", "--state", "vacuum",
                             "--x-lo", "2", "--x-hi", "1",
                             "--r-lo", "0", "--r-hi", "1")
        assert code == 2

    def test_csv_deterministic(self, tmp_path, capsys):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            code, _, _ = run(capsys, "density", "--state", "coherent",
                             "--a", "2", "--resolution", "24",
                             "--out-csv", str(p))
            assert code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_srm_seed_on_vacuum_is_numeric_failure(self, capsys):
        code, out, err = run(capsys, "density", "--state", "vacuum",
                             "--seed-kind", "srm", "--resolution", "24")
        assert code == 3
        assert "DomainViolation" in err


class TestCompareSrm:
    def test_coherent_ratio_below_one(self, capsys):
        code, out, err = run(capsys, "compare-srm", "--state", "coherent",
                             "--a", "6")
        assert code == 0
        payload = json.loads(out)
        assert payload["ratio"] < 1.0
        assert payload["l_srm"] < payload["l_opt"]

    def test_vacuum_domain_violation(self, capsys):
        code, out, err = run(capsys, "compare-srm", "--state", "vacuum")
        assert code == 3
        assert "domain" in err.lower()

    def test_near_eigenstate_ratio(self, capsys):
        code, out, err = run(capsys, "compare-srm", "--state",
                             "displaced-squeezed", "--a", "2", "--z", "3")
        assert code == 0
        assert json.loads(out)["ratio"] == pytest.approx(1.0, abs=0.03)


class TestConfigHandling:
    def test_config_file_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("state = coherent\na = 4\nresolution = 24\n")
        code, out, err = run(capsys, "likelihood", "--config", str(cfg),
                             "--a", "6")
        assert code == 0
        payload = json.loads(out)
        assert payload["state"] == "coherent(a=6)"

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("stat = coherent\n")
        code, out, err = run(capsys, "likelihood", "--config", str(cfg))
        assert code == 2
        assert "unknown config key" in err

    def test_print_config_round_trip(self, tmp_path, capsys):
        code, out, err = run(capsys, "density", "--state", "coherent",
                             "--a", "3", "--print-config")
        assert code == 0
        cfg = tmp_path / "echo.cfg"
        kept = [line for line in out.splitlines()
                if not line.split("=")[1].strip() in ("nan", "")]
        cfg.write_text("\n".join(kept))
        code2, out2, err2 = run(capsys, "density", "--config", str(cfg),
                                "--resolution", "24", "--print-config")
        assert code2 == 0
        assert "a = 3.0" in out2

    def test_invalid_lambda(self, capsys):
        code, out, err = run(capsys, "two-mode", "--lam", "1.5")
        assert code == 2


class TestSampledFile:
    def test_round_trip(self, tmp_path, capsys):
        import numpy as np
        from sqdisp import default_grid
        grid = default_grid(0.0, n=512)
        y = grid.nodes
        amp = y * np.exp(-y ** 2)
        path = tmp_path / "odd.csv"
        lines = ["y,re,im"] + [f"{yy:.17g},{aa:.17g},0" for yy, aa in zip(y, amp)]
        path.write_text("\n".join(lines))
        code, out, err = run(capsys, "likelihood", "--state", "sampled-file",
                             "--sampled-path", str(path))
        assert code == 0
        payload = json.loads(out)
        assert payload["likelihood"] == pytest.approx(
            2.0 * math.sqrt(2.0 / math.pi) / math.pi, rel=1e-4)

    def test_missing_path_rejected(self, capsys):
        code, out, err = run(capsys, "likelihood", "--state", "sampled-file")
        assert code == 2


class TestAsymptoticsCommand:
    def test_payload(self, capsys):
        code, out, err = run(capsys, "asymptotics", "--a", "10",
                             "--nbar", "100")
        assert code == 0
        payload = json.loads(out)
        assert payload["delta_x"] == pytest.approx(1 / math.sqrt(2))
        assert payload["delta_r_opt"] == pytest.approx(0.05)
        assert payload["product_ratio"] == pytest.approx(2.0, abs=1e-12)
        assert payload["isotropic_a"] == pytest.approx(9.8995, abs=1e-3)


class TestTwoModeCommand:
    def test_summary(self, capsys):
        code, out, err = run(capsys, "two-mode", "--lam", "0.9",
                             "--n-max", "40", "--resolution", "24")
        assert code == 0
        payload = json.loads(out)
        assert payload["parity_violation"] == 0.0
        assert payload["norm_deviation"] < 1e-8
        assert payload["width_x"] > 0


class TestValidateCommand:
    def test_coarse_grid_fails_convergence(self, capsys):
        code, out, err = run(capsys, "validate", "--n", "64")
        assert code == 1
        lines = out.splitlines()
        assert any(line.startswith("FAIL quadrature-convergence") for line in lines)

    def test_check_count(self):
        from sqdisp.validate import build_checks
        assert len(build_checks()) >= 12
