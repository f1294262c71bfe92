"""CLI contract: exit codes, output formats, determinism, and diagnostics."""

import json
import subprocess
import sys

import pytest

from gmmstab.certify import builtin_example
from gmmstab.cli import main


@pytest.fixture()
def stable_path(tmp_path):
    stable, _ = builtin_example("fig-example1-stable")
    path = tmp_path / "stable.json"
    stable.save(path)
    return str(path)


@pytest.fixture()
def gaussian_paths(tmp_path):
    from gmmstab.gaussian_tv import SphericalGaussian
    from gmmstab.mixture import MixtureModel

    a = MixtureModel.create((SphericalGaussian((0.0,), 1.0),), (1.0,))
    b = MixtureModel.create((SphericalGaussian((2.0,), 1.0),), (1.0,))
    pa, pb = tmp_path / "a.json", tmp_path / "b.json"
    a.save(pa)
    b.save(pb)
    return str(pa), str(pb)


class TestCertifyCommand:
    def test_applicable_exit_zero(self, stable_path, capsys):
        code = main([
            "certify", stable_path, "--pi-min", "0.45", "--pi-max", "0.55",
            "--c", "2.999999999", "--epsilon", "0.001",
        ])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["applicable"] is True
        assert doc["per_component"][0]["mean_bound"] == pytest.approx(0.0200, abs=0.002)

    def test_inapplicable_exit_two_with_verdict(self, stable_path, capsys):
        code = main([
            "certify", stable_path, "--pi-min", "0.5", "--epsilon", "0.4",
        ])
        assert code == 2
        doc = json.loads(capsys.readouterr().out)
        assert doc["applicable"] is False
        assert "pi_min>2eps" in doc["failed_conditions"]

    def test_malformed_input_exit_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code = main(["certify", str(bad), "--pi-min", "0.5", "--epsilon", "0.0"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_output_file(self, stable_path, tmp_path):
        out = tmp_path / "cert.json"
        code = main([
            "certify", stable_path, "--pi-min", "0.45", "--pi-max", "0.55",
            "--c", "2.999999999", "--epsilon", "0.001", "-o", str(out),
        ])
        assert code == 0
        assert json.loads(out.read_text())["applicable"] is True

    def test_missing_output_dir(self, stable_path, capsys):
        code = main([
            "certify", stable_path, "--pi-min", "0.45", "--epsilon", "0.001",
            "-o", "/nonexistent-dir/cert.json",
        ])
        assert code == 1


class TestMinSeparationCommand:
    def test_anchor_rows(self, capsys):
        code = main(["min-separation", "--d", "1,35", "--K", "2", "--eta-pi", "1"])
        assert code == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "d,K,eta_pi,c0,eta0,c0_eta0,status"
        d1 = lines[1].split(",")
        d35 = lines[2].split(",")
        assert float(d1[5]) == pytest.approx(2.29, abs=0.02)
        assert float(d35[5]) == pytest.approx(1.55, abs=0.02)

    def test_infeasible_row_flagged(self, capsys):
        # pi_min = 1/(eta_pi + K - 1) = 1/17 <= 2 eps for eps = 0.05.
        code = main(["min-separation", "--d", "5", "--K", "2", "--eta-pi", "16",
                     "--epsilon", "0.05"])
        assert code == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[1].endswith("infeasible")
        assert lines[1].split(",")[3] == ""

    def test_k_range_syntax(self, capsys):
        code = main(["min-separation", "--d", "5", "--K", "2:4", "--eta-pi", "1"])
        assert code == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert len(lines) == 4  # header + K = 2, 3, 4

    def test_twelve_significant_digits(self, capsys):
        main(["min-separation", "--d", "1", "--K", "2", "--eta-pi", "1"])
        row = capsys.readouterr().out.strip().split("\n")[1].split(",")
        for cell in row[3:6]:
            mantissa = cell.replace("-", "").replace(".", "").lstrip("0")
            assert len(mantissa) <= 12
        assert row[3] == f"{float(row[3]):.12g}"


class TestBoundsSweepCommand:
    def test_header_and_infeasible_cells(self, capsys):
        code = main(["bounds-sweep", "--d", "20", "--K", "2,10", "--c", "3",
                     "--epsilon-grid", "0.01"])
        assert code == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "K,c,epsilon,c_star,eta_star_minus_1,pi_bound_over_pi_min"
        k2 = lines[1].split(",")
        k10 = lines[2].split(",")
        assert k2[3] != ""  # K=2, c=3 is certifiable
        assert k10[3] == "" and k10[4] == "" and k10[5] == ""  # K=10, c=3 is not

    def test_epsilon_flat_below_1e5(self, capsys):
        # At c = 3 the separation term dominates, so the bounds barely
        # move across the small-epsilon part of the grid.
        code = main(["bounds-sweep", "--d", "20", "--K", "2", "--c", "3",
                     "--epsilon-grid", "1e-7,1e-6,1e-5"])
        assert code == 0
        lines = capsys.readouterr().out.strip().split("\n")
        stars = [float(line.split(",")[3]) for line in lines[1:]]
        assert max(stars) - min(stars) <= 0.02 * max(stars)


class TestTvCommand:
    def test_same_file_zero(self, stable_path, capsys):
        code = main(["tv", stable_path, stable_path, "--n", "2000", "--seed", "0"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["value"] == 0.0
        assert doc["seed"] == 0

    def test_exact_two_unit_gaussians(self, gaussian_paths, capsys):
        pa, pb = gaussian_paths
        code = main(["tv", pa, pb, "--exact"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["method"] == "exact"
        assert doc["value"] == pytest.approx(0.6827, abs=1e-4)

    def test_mc_agrees_with_exact(self, gaussian_paths, capsys):
        pa, pb = gaussian_paths
        main(["tv", pa, pb, "--exact"])
        exact = json.loads(capsys.readouterr().out)["value"]
        main(["tv", pa, pb, "--n", "200000", "--seed", "3"])
        doc = json.loads(capsys.readouterr().out)
        assert abs(doc["value"] - exact) <= 3.0 * doc["std_error"]

    def test_exact_on_mixture_is_usage_error(self, stable_path, gaussian_paths, capsys):
        code = main(["tv", stable_path, gaussian_paths[0], "--exact"])
        assert code == 1

    def test_dim_mismatch_exit_one(self, tmp_path, gaussian_paths, capsys):
        from gmmstab.gaussian_tv import SphericalGaussian
        from gmmstab.mixture import MixtureModel

        m2 = MixtureModel.create((SphericalGaussian((0.0, 0.0), 1.0),), (1.0,))
        p2 = tmp_path / "m2.json"
        m2.save(p2)
        assert main(["tv", gaussian_paths[0], str(p2), "--n", "2000"]) == 1

    def test_min_samples_enforced(self, gaussian_paths):
        assert main(["tv", gaussian_paths[0], gaussian_paths[1], "--n", "10"]) == 1


class TestContaminateCommand:
    def test_lambda_zero_and_seed_header(self, capsys):
        code = main(["contaminate", "--example", "example1", "--lambda", "0",
                     "--sweep", "0.4", "--n", "5000", "--seed", "7"])
        assert code == 0
        out = capsys.readouterr().out
        lines = out.strip().split("\n")
        assert lines[0] == "# seed=7 n=5000"
        assert lines[1].startswith("sweep_value,lambda,epsilon_hat,")
        row = lines[2].split(",")
        assert float(row[2]) == 0.0  # epsilon_hat

    def test_deterministic_output(self, capsys):
        argv = ["contaminate", "--example", "example1", "--lambda", "0.01",
                "--sweep", "0.4", "--n", "5000", "--seed", "0"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        second = capsys.readouterr().out
        assert first == second

    def test_file_based_inputs(self, tmp_path, capsys):
        base, contaminant = builtin_example("example1")
        pb, pc = tmp_path / "base.json", tmp_path / "cont.json"
        base.save(pb)
        contaminant.save(pc)
        code = main(["contaminate", "--base", str(pb), "--contaminant", str(pc),
                     "--lambda", "0.01", "--sweep", "0.4", "--n", "5000"])
        assert code == 0

    def test_requires_source(self, capsys):
        assert main(["contaminate", "--lambda", "0.01", "--n", "5000"]) == 1

    def test_min_samples(self, capsys):
        assert main(["contaminate", "--example", "example1", "--lambda", "0",
                     "--n", "10"]) == 1


class TestDensityCommand:
    def test_table_shape(self, capsys):
        code = main(["density", "--example", "fig-example1-unstable",
                     "--x-min", "-6", "--x-max", "6", "--points", "25"])
        assert code == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "x,density_p,density_q"
        assert len(lines) == 26


class TestConsoleScript:
    def test_installed_entry_point(self, stable_path):
        proc = subprocess.run(
            [sys.executable, "-m", "gmmstab.cli", "certify", stable_path,
             "--pi-min", "0.45", "--pi-max", "0.55", "--c", "2.999999999",
             "--epsilon", "0.001"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["applicable"] is True
        assert proc.stdout.endswith("\n")
