"""File formats and the command line: round trips, reports, exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

from fdepth.core import Grid, FunctionalSample
from fdepth.covkernel import fit_model
from fdepth.depth import DepthResult
from fdepth.io import (
    DatasetFormatError,
    depth_report,
    format_report,
    read_dataset,
    read_model,
    write_dataset,
    write_model,
    write_plot_csv,
)
from fdepth.simgen import brownian_bridge_laplace_sample, fourier_gp_sample


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "fdepth.cli", *args],
        capture_output=True,
        text=True,
    )


@pytest.fixture
def sample():
    rng = np.random.default_rng(31)
    return FunctionalSample(Grid(0, 1, 17), rng.standard_normal((4, 17)),
                            ids=["a", "b", "c", "d"])


class TestDatasetRoundTrip:
    def test_values_and_ids_exact(self, tmp_path, sample):
        path = tmp_path / "data.csv"
        write_dataset(path, sample)
        back = read_dataset(path)
        np.testing.assert_array_equal(back.values, sample.values)
        assert back.ids == sample.ids
        assert back.grid == sample.grid

    def test_seventeen_digits_survive(self, tmp_path):
        values = np.array([[1.0 / 3.0, np.pi, np.e, 1e-17, -2.5e16]])
        s = FunctionalSample(Grid(0, 1, 5), values)
        path = tmp_path / "d.csv"
        write_dataset(path, s)
        np.testing.assert_array_equal(read_dataset(path).values, values)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("x,0.0,0.5,1.0\na,1,2,3\n")
        with pytest.raises(DatasetFormatError):
            read_dataset(path)

    def test_bad_cell_reports_line_number(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("t,0.0,0.5,1.0\na,1,2,3\nb,1,oops,3\n")
        with pytest.raises(DatasetFormatError, match="line 3"):
            read_dataset(path)

    def test_ragged_row_reports_line_number(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("t,0.0,0.5,1.0\na,1,2\n")
        with pytest.raises(DatasetFormatError, match="line 2"):
            read_dataset(path)

    def test_too_few_columns(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("t,0.0\na,1\n")
        with pytest.raises(DatasetFormatError):
            read_dataset(path)


class TestModelRoundTrip:
    def test_exact_round_trip(self, tmp_path):
        data, _ = brownian_bridge_laplace_sample(30, 20, seed=5, grid=Grid(0, 1, 41))
        model = fit_model(data, delta=1e-6)
        path = tmp_path / "model.json"
        write_model(path, model)
        back = read_model(path)
        np.testing.assert_array_equal(back.mean.values, model.mean.values)
        np.testing.assert_array_equal(back.system.eigenvalues, model.system.eigenvalues)
        np.testing.assert_array_equal(back.system.eigenfunctions, model.system.eigenfunctions)
        np.testing.assert_array_equal(back.coeffs.coeffs, model.coeffs.coeffs)
        assert back.delta == model.delta
        assert back.n == model.n
        assert back.centered == model.centered
        assert back.ids == model.ids
        assert back.system.grid == model.system.grid

    def test_format_marker_checked(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text(json.dumps({"format": "something-else"}))
        with pytest.raises(DatasetFormatError):
            read_model(path)


class TestReports:
    def test_deterministic_bytes(self):
        results = [DepthResult(0.4, "lp(2)", "monte-carlo", 100, 7, 1.25)]
        rep1 = depth_report("lp(2)", "monte-carlo", 100, 7, 1e-8, None,
                            ["a"], results, [False])
        rep2 = depth_report("lp(2)", "monte-carlo", 100, 7, 1e-8, None,
                            ["a"], results, [False])
        assert format_report(rep1) == format_report(rep2)
        assert format_report(rep1).endswith("\n")

    def test_entry_fields(self):
        results = [DepthResult(0.03, "chisq", "closed-form", 0, 0, 2.5)]
        rep = depth_report("chisq", "closed-form", 0, 0, None, None,
                           ["q1"], results, [True])
        entry = rep["results"][0]
        assert entry == {"id": "q1", "depth": 0.03, "criterion_value": 2.5,
                         "outlier": True}

    def test_plot_csv_shape(self, tmp_path, sample):
        path = tmp_path / "plot.csv"
        write_plot_csv(path, sample, [0.1, 0.2, 0.3, 0.4])
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "id,t,value,depth"
        assert len(lines) == 1 + 4 * 17

    def test_plot_csv_length_mismatch(self, tmp_path, sample):
        with pytest.raises(ValueError):
            write_plot_csv(tmp_path / "p.csv", sample, [0.1])


class TestCliFit:
    def test_fit_writes_model(self, tmp_path):
        data = tmp_path / "data.csv"
        sample, _ = brownian_bridge_laplace_sample(300, 50, seed=3, grid=Grid(0, 1, 101))
        write_dataset(data, sample)
        out = tmp_path / "model.json"
        proc = run_cli("fit", str(data), "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        model = read_model(out)
        assert model.system.C >= 5
        assert model.system.eigenvalues[0] == pytest.approx(1.0 / np.pi**2, rel=0.2)

    def test_fit_missing_file(self, tmp_path):
        proc = run_cli("fit", str(tmp_path / "absent.csv"), "--out", str(tmp_path / "m.json"))
        assert proc.returncode == 2

    def test_fit_malformed_file(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("t,0.0,0.5,1.0\na,1,zzz,3\n")
        proc = run_cli("fit", str(bad), "--out", str(tmp_path / "m.json"))
        assert proc.returncode == 2
        assert "line" in proc.stderr

    def test_fit_degenerate_data(self, tmp_path):
        data = tmp_path / "zeros.csv"
        write_dataset(data, FunctionalSample(Grid(0, 1, 9), np.zeros((5, 9))))
        proc = run_cli("fit", str(data), "--out", str(tmp_path / "m.json"))
        assert proc.returncode == 3

    def test_fit_rank_one_sample(self, tmp_path):
        grid = Grid(0, 1, 21)
        phi = np.sin(np.pi * grid.points)
        data = tmp_path / "pm.csv"
        write_dataset(data, FunctionalSample(grid, np.vstack([phi, -phi, phi, -phi])))
        out = tmp_path / "m.json"
        proc = run_cli("fit", str(data), "--out", str(out), "--no-center")
        assert proc.returncode == 0, proc.stderr
        assert read_model(out).system.C == 1


class TestCliDepth:
    @pytest.fixture
    def fitted(self, tmp_path):
        data = tmp_path / "data.csv"
        sample, _ = brownian_bridge_laplace_sample(60, 30, seed=8, grid=Grid(0, 1, 51))
        write_dataset(data, sample)
        model = tmp_path / "model.json"
        proc = run_cli("fit", str(data), "--out", str(model))
        assert proc.returncode == 0, proc.stderr
        return model, read_model(model)

    def test_model_mean_has_full_depth(self, tmp_path, fitted):
        model_path, model = fitted
        query = tmp_path / "query.csv"
        write_dataset(query, FunctionalSample(model.system.grid,
                                              model.mean.values[None, :], ids=["mean"]))
        proc = run_cli("depth", str(model_path), str(query),
                       "--criterion", "lp", "--p", "2", "--N", "200")
        assert proc.returncode == 0, proc.stderr
        report = json.loads(proc.stdout)
        assert report["results"][0]["depth"] == 1.0

    def test_closed_form_halfspace_center(self, tmp_path, fitted):
        model_path, model = fitted
        query = tmp_path / "query.csv"
        write_dataset(query, FunctionalSample(model.system.grid,
                                              model.mean.values[None, :], ids=["mean"]))
        proc = run_cli("depth", str(model_path), str(query), "--criterion", "halfspace")
        assert proc.returncode == 0, proc.stderr
        report = json.loads(proc.stdout)
        assert report["results"][0]["depth"] == 0.5
        assert report["estimator"] == "closed-form"

    def test_grid_mismatch_exit_code(self, tmp_path, fitted):
        model_path, _ = fitted
        query = tmp_path / "query.csv"
        write_dataset(query, FunctionalSample(Grid(0, 1, 31), np.zeros((1, 31))))
        proc = run_cli("depth", str(model_path), str(query), "--criterion", "lp")
        assert proc.returncode == 4

    def test_invalid_config_exit_code(self, tmp_path, fitted):
        model_path, model = fitted
        query = tmp_path / "query.csv"
        write_dataset(query, FunctionalSample(model.system.grid,
                                              np.zeros((1, model.system.grid.m))))
        proc = run_cli("depth", str(model_path), str(query),
                       "--criterion", "modified-rkhs", "--weights", "constant-one")
        assert proc.returncode == 5
        proc2 = run_cli("depth", str(model_path), str(query),
                        "--criterion", "mahalanobis")
        assert proc2.returncode == 5
        proc3 = run_cli("depth", str(model_path), str(query),
                        "--criterion", "lp", "--alpha", "1.5")
        assert proc3.returncode == 5

    def test_report_file_and_plot_csv(self, tmp_path, fitted):
        model_path, model = fitted
        query = tmp_path / "query.csv"
        write_dataset(query, FunctionalSample(model.system.grid,
                                              np.zeros((2, model.system.grid.m)),
                                              ids=["q1", "q2"]))
        out = tmp_path / "report.json"
        plot = tmp_path / "plot.csv"
        proc = run_cli("depth", str(model_path), str(query), "--criterion", "chisq",
                       "--out", str(out), "--plot-csv", str(plot))
        assert proc.returncode == 0, proc.stderr
        report = json.loads(out.read_text())
        assert [e["id"] for e in report["results"]] == ["q1", "q2"]
        lines = plot.read_text().strip().split("\n")
        assert len(lines) == 1 + 2 * model.system.grid.m


class TestCliOutliers:
    def _fit(self, tmp_path, values, grid):
        data = tmp_path / "data.csv"
        write_dataset(data, FunctionalSample(grid, values))
        model = tmp_path / "model.json"
        proc = run_cli("fit", str(data), "--out", str(model))
        assert proc.returncode == 0, proc.stderr
        return model

    def test_inflated_function_flagged(self, tmp_path):
        sample = fourier_gp_sample(5, "std-normal", 40, seed=6, grid=Grid(0, 1, 101))
        values = sample.values.copy()
        values[11] *= 9.0
        model = self._fit(tmp_path, values, sample.grid)
        proc = run_cli("outliers", str(model), "--criterion", "modified-rkhs",
                       "--alpha", "0.05", "--N", "500")
        assert proc.returncode == 0, proc.stderr
        report = json.loads(proc.stdout)
        flagged = [e["id"] for e in report["results"] if e["outlier"]]
        assert "11" in flagged

    def test_alpha_validation(self, tmp_path):
        sample = fourier_gp_sample(3, "std-normal", 10, seed=1, grid=Grid(0, 1, 31))
        model = self._fit(tmp_path, sample.values, sample.grid)
        proc = run_cli("outliers", str(model), "--alpha", "0")
        assert proc.returncode == 5

    def test_variance_outlier_preset_pipeline(self, tmp_path):
        data = tmp_path / "sim4.csv"
        proc = run_cli("simulate", "--preset", "sim4", "--seed", "0",
                       "--out", str(data))
        assert proc.returncode == 0, proc.stderr
        meta = json.loads((tmp_path / "sim4.meta.json").read_text())
        model = tmp_path / "model.json"
        proc = run_cli("fit", str(data), "--out", str(model))
        assert proc.returncode == 0, proc.stderr
        proc = run_cli("outliers", str(model), "--criterion", "modified-rkhs",
                       "--alpha", "0.1", "--N", "1000", "--seed", "0")
        assert proc.returncode == 0, proc.stderr
        report = json.loads(proc.stdout)
        flagged = {e["id"] for e in report["results"] if e["outlier"]}
        assert set(meta["outlier_ids"]) <= flagged
        assert len(flagged) <= 10


class TestCliSimulate:
    def test_presets_deterministic(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for path in (a, b):
            proc = run_cli("simulate", "--preset", "sim3", "--seed", "4",
                           "--out", str(path))
            assert proc.returncode == 0, proc.stderr
        assert a.read_text() == b.read_text()

    def test_interloper_metadata(self, tmp_path):
        out = tmp_path / "s1.csv"
        proc = run_cli("simulate", "--preset", "sim1", "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        meta = json.loads((tmp_path / "s1.meta.json").read_text())
        assert meta["interloper_ids"] == ["0"]
        sample = read_dataset(out)
        assert sample.n == 30

    def test_noisy_middle_metadata_and_flagging(self, tmp_path):
        out = tmp_path / "s2.csv"
        proc = run_cli("simulate", "--preset", "sim2", "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        meta = json.loads((tmp_path / "s2.meta.json").read_text())
        assert meta["noisy_id"] == "10"

    def test_multivariate_preset_plain_csv(self, tmp_path):
        out = tmp_path / "s6.csv"
        proc = run_cli("simulate", "--preset", "sim6", "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "id,x0,x1"
        assert len(lines) == 51


class TestCliAlign:
    def test_identical_rows_identity_warps(self, tmp_path):
        grid = Grid(0, 1, 51)
        f = np.sin(2 * np.pi * grid.points) + 1.0
        data = tmp_path / "data.csv"
        write_dataset(data, FunctionalSample(grid, np.tile(f, (3, 1))))
        tpl = tmp_path / "template.csv"
        wrp = tmp_path / "warpings.csv"
        proc = run_cli("align", str(data), "--out-template", str(tpl),
                       "--out-warpings", str(wrp), "--max-iter", "3")
        assert proc.returncode == 0, proc.stderr
        warps = read_dataset(wrp)
        for row in warps.values:
            np.testing.assert_array_equal(row, grid.points)

    def test_single_row_rejected(self, tmp_path):
        grid = Grid(0, 1, 21)
        data = tmp_path / "one.csv"
        write_dataset(data, FunctionalSample(grid, np.sin(grid.points)[None, :]))
        proc = run_cli("align", str(data), "--out-template", str(tmp_path / "t.csv"),
                       "--out-warpings", str(tmp_path / "w.csv"))
        assert proc.returncode == 2
