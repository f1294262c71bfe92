"""Figure rendering against crafted and real gmmstab CSV inputs."""

import subprocess
import sys

import numpy as np
import pytest

from gmmstab_plots.figures import FigureError, FigureSpec, render
from gmmstab_plots.sep_vs_k import main as sep_vs_k_main

PNG_MAGIC = b"\x89PNG"


def write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture()
def sep_csv(tmp_path):
    lines = ["d,K,eta_pi,c0,eta0,c0_eta0,status"]
    for d in (5, 20, 35):
        for k in (2, 3, 4, 5):
            for eta_pi in (1, 2):
                if eta_pi == 2 and k == 3:
                    lines.append(f"{d},{k},{eta_pi},,,,infeasible")
                else:
                    lines.append(f"{d},{k},{eta_pi},1.5,1.4,{2.0 + 0.1 * k},ok")
    return write(tmp_path / "sep.csv", "\n".join(lines) + "\n")


@pytest.fixture()
def iterative_csv(tmp_path):
    lines = ["K,c,epsilon,c_star,eta_star_minus_1,pi_bound_over_pi_min"]
    for k in (2, 5, 10):
        for c in (3, 4):
            for eps in (1e-4, 1e-3, 1e-2):
                if k == 10 and c == 3:
                    lines.append(f"{k},{c},{eps},,,")
                else:
                    lines.append(f"{k},{c},{eps},{0.1 + eps},{0.02 + eps},{0.05 + eps}")
    return write(tmp_path / "ub.csv", "\n".join(lines) + "\n")


@pytest.fixture()
def contamination_csv(tmp_path):
    header = ("sweep_value,lambda,epsilon_hat,epsilon_hat_se,componentwise_tv,"
              "applicable,vacuous,failed_conditions,c_star,eta_star,max_mean_bound,"
              "sigma_ratio_bound,proportion_bound,conservative_applicable,"
              "conservative_vacuous,conservative_max_mean_bound")
    rows = [
        "# seed=0 n=1000",
        header,
        "0.3,0.01,0.009,0.0001,0.005;0.005,1,0,,0.2,1.1,0.06,1.1,0.01,1,0,0.07",
        "0.5,0.01,0.0095,0.0001,0.005;0.005,0,0,separation,,,,,,0,0,",
        "0.3,0.1,0.09,0.0003,0.05;0.05,0,0,separation,,,,,,0,0,",
    ]
    return write(tmp_path / "cont.csv", "\n".join(rows) + "\n")


@pytest.fixture()
def density_csv(tmp_path):
    lines = ["x,density_p,density_q"]
    for x in np.linspace(-4, 4, 33):
        lines.append(f"{x},{np.exp(-x * x / 2)},{np.exp(-((x - 0.1) ** 2) / 2)}")
    return write(tmp_path / "dens.csv", "\n".join(lines) + "\n")


class TestSepVsK:
    def test_layout_2x2(self, sep_csv, tmp_path):
        out = tmp_path / "sep.png"
        fig = render(FigureSpec(sep_csv, "sepVSK", out))
        assert len(fig.axes) == 4
        assert out.read_bytes()[:4] == PNG_MAGIC

    def test_infeasible_cells_leave_gaps(self, sep_csv, tmp_path):
        fig = render(FigureSpec(sep_csv, "sepVSK", tmp_path / "sep.png"))
        gap_lines = [
            line
            for ax in fig.axes[:3]
            for line in ax.get_lines()
            if np.isnan(line.get_ydata()).any()
        ]
        assert gap_lines, "expected at least one curve with a missing-cell gap"

    def test_script_entry_point(self, sep_csv, tmp_path):
        out = tmp_path / "cli.png"
        assert sep_vs_k_main(["--input", sep_csv, "--output", str(out)]) == 0
        assert out.exists()


class TestIterativeUb:
    def test_layout_3x3(self, iterative_csv, tmp_path):
        fig = render(FigureSpec(iterative_csv, "iterativeUB", tmp_path / "ub.png"))
        assert len(fig.axes) == 9

    def test_missing_curve_absent(self, iterative_csv, tmp_path):
        fig = render(FigureSpec(iterative_csv, "iterativeUB", tmp_path / "ub.png"))
        # Column for K=10: the c=3 curve is all-NaN, never interpolated.
        k10_top = fig.axes[2]  # axes laid out row-major: row 0, col 2
        datasets = [line.get_ydata() for line in k10_top.get_lines()]
        assert any(np.isnan(ys).all() for ys in datasets)

    def test_log_x_flag(self, iterative_csv, tmp_path):
        fig = render(
            FigureSpec(iterative_csv, "iterativeUB", tmp_path / "ub.png"), log_x=True
        )
        assert fig.axes[0].get_xscale() == "log"


class TestContamination:
    def test_two_panels(self, contamination_csv, tmp_path):
        fig = render(FigureSpec(contamination_csv, "contamination", tmp_path / "c.png"))
        assert len(fig.axes) == 2

    def test_comment_header_skipped(self, contamination_csv, tmp_path):
        out = tmp_path / "c.png"
        render(FigureSpec(contamination_csv, "contamination", out))
        assert out.exists()


class TestDensity:
    def test_single_panel_two_curves(self, density_csv, tmp_path):
        fig = render(FigureSpec(density_csv, "example1-density", tmp_path / "d.png"))
        assert len(fig.axes) == 1
        assert len(fig.axes[0].get_lines()) == 2


class TestErrors:
    def test_unknown_figure_id(self, density_csv, tmp_path):
        with pytest.raises(FigureError):
            FigureSpec(density_csv, "bogus", tmp_path / "x.png")

    def test_empty_csv_writes_nothing(self, tmp_path):
        empty = write(tmp_path / "empty.csv", "")
        out = tmp_path / "never.png"
        with pytest.raises(FigureError):
            render(FigureSpec(empty, "sepVSK", out))
        assert not out.exists()

    def test_header_only_csv(self, tmp_path):
        hdr = write(tmp_path / "hdr.csv", "x,density_p,density_q\n")
        with pytest.raises(FigureError):
            render(FigureSpec(hdr, "example1-density", tmp_path / "never.png"))

    def test_schema_mismatch(self, density_csv, tmp_path):
        out = tmp_path / "never.png"
        with pytest.raises(FigureError):
            render(FigureSpec(density_csv, "sepVSK", out))
        assert not out.exists()

    def test_missing_file(self, tmp_path):
        with pytest.raises(FigureError):
            render(FigureSpec(tmp_path / "nope.csv", "sepVSK", tmp_path / "x.png"))

    def test_script_exit_code_on_error(self, tmp_path):
        empty = write(tmp_path / "empty.csv", "")
        code = sep_vs_k_main(["--input", empty, "--output", str(tmp_path / "x.png")])
        assert code == 1


class TestDeterminism:
    def test_same_csv_same_bytes(self, density_csv, tmp_path):
        out1, out2 = tmp_path / "a.png", tmp_path / "b.png"
        render(FigureSpec(density_csv, "example1-density", out1))
        render(FigureSpec(density_csv, "example1-density", out2))
        assert out1.read_bytes() == out2.read_bytes()


class TestAgainstRealCli:
    """Consume CSV produced by the primary package's CLI (its external
    interface); skipped when the primary is not installed."""

    def test_sep_vs_k_from_cli_output(self, tmp_path):
        pytest.importorskip("gmmstab")
        csv_path = tmp_path / "real_sep.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "gmmstab.cli", "min-separation",
             "--d", "5,20,35", "--K", "2:6", "--eta-pi", "1,2",
             "-o", str(csv_path)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        out = tmp_path / "real_sep.png"
        fig = render(FigureSpec(csv_path, "sepVSK", out))
        assert len(fig.axes) == 4
        assert out.exists()

    def test_density_from_cli_output(self, tmp_path):
        pytest.importorskip("gmmstab")
        csv_path = tmp_path / "real_dens.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "gmmstab.cli", "density",
             "--example", "fig-example1-unstable", "--points", "101",
             "-o", str(csv_path)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        out = tmp_path / "real_dens.png"
        render(FigureSpec(csv_path, "example1-density", out))
        assert out.exists()
