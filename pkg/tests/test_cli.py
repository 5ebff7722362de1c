"""End-to-end tests of the command-line interface and its file formats."""

import json

import numpy as np
import pytest

from swiptlab.cli import CSV_HEADER, main, read_boundary_csv
from swiptlab.core import REBoundary

FIG9_FLAGS = ["--h", "1", "--p", "100", "--zeta", "0.6", "--sa2", "1", "--scov2", "10"]


def run(args, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestRegionCommand:
    def test_ts_chord_file(self, tmp_path, monkeypatch, capsys):
        code, out, _ = run(["region", "--scheme", "ts", "--h", "1", "--p", "100",
                            "--zeta", "1", "--sa2", "1", "--scov2", "1"],
                           tmp_path, monkeypatch, capsys)
        assert code == 0
        path = tmp_path / "region_ts.csv"
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 1 + 512
        bnd = read_boundary_csv(path)
        assert bnd.points[0].rate == pytest.approx(5.672425341971495, rel=1e-12)
        assert bnd.points[0].energy == 0.0
        assert bnd.points[-1].rate == 0.0
        assert bnd.points[-1].energy == pytest.approx(100.0)
        assert np.all(np.diff(bnd.energies()) >= 0)

    def test_ub_box_polyline(self, tmp_path, monkeypatch, capsys):
        code, _, _ = run(["region", "--scheme", "ub", "--h", "1", "--p", "100",
                          "--sa2", "1", "--points", "17"],
                         tmp_path, monkeypatch, capsys)
        assert code == 0
        bnd = read_boundary_csv(tmp_path / "region_ub.csv")
        rates = bnd.rates()
        # flat top at R_max then the corner drop to (0, Q_max)
        assert np.all(rates[:-1] == rates[0])
        assert rates[-1] == 0.0
        assert bnd.points[-1].energy == bnd.points[-2].energy == pytest.approx(100.0)

    def test_ops_circuit_dominates_ts_and_sps_files(self, tmp_path, monkeypatch, capsys):
        files = {}
        for scheme in ("ops-circuit", "ts-circuit", "sps-circuit"):
            args = ["region", "--scheme", scheme, *FIG9_FLAGS,
                    "--points", "512", "--ps", "25"]
            code, _, _ = run(args, tmp_path, monkeypatch, capsys)
            assert code == 0
            files[scheme] = read_boundary_csv(tmp_path / f"region_{scheme}.csv")
        ops = files["ops-circuit"]
        for scheme in ("ts-circuit", "sps-circuit"):
            other = files[scheme]
            # compare at the other curve's own knots (exact there); 1e-5 covers
            # chord interpolation of the concave on-off boundary at 512 knots
            assert np.all(other.rates() <= ops.rate_at(other.energies()) + 1e-5)
        for bnd in files.values():
            assert np.all(np.diff(bnd.energies()) >= -1e-12)
            assert np.all(np.diff(bnd.rates()) <= 1e-12)

    def test_csv_json_round_trip(self, tmp_path, monkeypatch, capsys):
        base = ["region", "--scheme", "sps", "--h", "1", "--p", "10", "--sa2", "1",
                "--scov2", "0.5", "--points", "33"]
        run(base + ["--out", "bnd.csv", "--format", "csv"], tmp_path, monkeypatch, capsys)
        run(base + ["--out", "bnd.json", "--format", "json"], tmp_path, monkeypatch, capsys)
        from_csv = read_boundary_csv(tmp_path / "bnd.csv")
        doc = json.loads((tmp_path / "bnd.json").read_text())
        from_json = REBoundary.from_json_dict(doc["outputs"])
        assert from_csv == from_json

    def test_int_circuit_with_explicit_cap(self, tmp_path, monkeypatch, capsys):
        code, _, _ = run(["region", "--scheme", "int-circuit", "--h", "1", "--p", "100",
                          "--zeta", "0.6", "--sa2", "1", "--srec2", "100",
                          "--pi", "10", "--cap", "2.5", "--points", "65"],
                         tmp_path, monkeypatch, capsys)
        assert code == 0
        bnd = read_boundary_csv(tmp_path / "region_int-circuit.csv")
        assert bnd.rate_at(0.0) == pytest.approx(2.5)
        assert bnd.rate_at(50.0) == pytest.approx(2.5)
        assert bnd.points[-1].energy == pytest.approx(60.0)


class TestCapacityCommand:
    def test_byte_identical_rerun(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        args = ["capacity", "--hp", "100", "--sa2", "1e-4", "--srec2", "1",
                "--lower", "--samples", "10000", "--seed", "7"]
        run(args + ["--out", "a.json"], tmp_path, monkeypatch, capsys)
        run(args + ["--out", "b.json"], tmp_path, monkeypatch, capsys)
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        doc = json.loads((tmp_path / "a.json").read_text())
        assert doc["outputs"]["lower"]["seed"] == 7
        assert doc["provenance"]["seed"] == 7

    def test_upper_bounds_default(self, tmp_path, monkeypatch, capsys):
        code, _, _ = run(["capacity", "--hp", "100", "--sa2", "1", "--srec2", "1",
                          "--out", "up.json"], tmp_path, monkeypatch, capsys)
        assert code == 0
        doc = json.loads((tmp_path / "up.json").read_text())
        up = doc["outputs"]["upper"]
        assert up["cnl_upper_bits"] == pytest.approx(
            min(up["c1_upper_bits"], up["c2_upper_bits"]))


class TestSolveCommand:
    def test_p0_output(self, tmp_path, monkeypatch, capsys):
        code, _, _ = run(["solve", "--problem", "p0", "--q", "30", "--ps", "25",
                          *FIG9_FLAGS, "--out", "p0.json"],
                         tmp_path, monkeypatch, capsys)
        assert code == 0
        doc = json.loads((tmp_path / "p0.json").read_text())
        out = doc["outputs"]
        lp_q_max = 0.6 * 100.0
        net = (out["alpha_star"] * lp_q_max
               + (1 - out["alpha_star"]) * out["rho_star"] * lp_q_max
               - (1 - out["alpha_star"]) * 25.0)
        assert net == pytest.approx(30.0, abs=1e-8)
        assert out["converged"] is True

    def test_p2_full_requirement(self, tmp_path, monkeypatch, capsys):
        code, _, _ = run(["solve", "--problem", "p2", "--qreq", "60", "--pi", "10",
                          "--h", "1", "--p", "100", "--zeta", "0.6",
                          "--srec2", "100", "--out", "p2.json"],
                         tmp_path, monkeypatch, capsys)
        assert code == 0
        out = json.loads((tmp_path / "p2.json").read_text())["outputs"]
        assert out["alpha"] == 1.0 and out["rate_bits"] == 0.0


class TestLinkCommand:
    def test_distance_conversion(self, tmp_path, monkeypatch, capsys):
        code, _, _ = run(["link", "--distance", "10", "--zeta", "0.6",
                          "--out", "lp.json"], tmp_path, monkeypatch, capsys)
        assert code == 0
        out = json.loads((tmp_path / "lp.json").read_text())["outputs"]
        assert out["h"] == pytest.approx(1e-6, rel=1e-12)
        assert out["sigma2_a"] == pytest.approx(3.981071705534972e-14, rel=1e-12)
        assert out["sigma2_rec"] == pytest.approx(1e-16, rel=1e-12)


class TestSimulateCommand:
    def test_qam_reproducible(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        args = ["simulate", "--kind", "qam", "--m", "16", "--rho", "0.2",
                "--h", "1", "--p", "200", "--sa2", "1", "--scov2", "1",
                "--symbols", "20000", "--seed", "3"]
        run(args + ["--out", "a.json"], tmp_path, monkeypatch, capsys)
        run(args + ["--out", "b.json"], tmp_path, monkeypatch, capsys)
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        out = json.loads((tmp_path / "a.json").read_text())["outputs"]
        assert 0 <= out["ser_hat"] <= 1 and out["n_symbols"] == 20000


class TestFigureCommand:
    def test_fig5_curve_count(self, tmp_path, monkeypatch, capsys):
        code, out, _ = run(["figure", "fig5", "--points", "65", "--out-dir", "f5"],
                           tmp_path, monkeypatch, capsys)
        assert code == 0
        files = sorted((tmp_path / "f5").iterdir())
        assert len(files) == 5  # UB + TS x2 + SPS x2

    def test_fig9_regenerates_identically(self, tmp_path, monkeypatch, capsys):
        run(["figure", "fig9", "--points", "33", "--out-dir", "a"],
            tmp_path, monkeypatch, capsys)
        run(["figure", "fig9", "--points", "33", "--out-dir", "b"],
            tmp_path, monkeypatch, capsys)
        for f in sorted((tmp_path / "a").iterdir()):
            assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()

    def test_unknown_figure_id(self, tmp_path, monkeypatch, capsys):
        code, _, err = run(["figure", "fig99"], tmp_path, monkeypatch, capsys)
        assert code == 2
        assert json.loads(err)["error"]["type"] == "InvalidParams"


class TestErrorHandling:
    def test_invalid_parameters_exit_2(self, tmp_path, monkeypatch, capsys):
        code, _, err = run(["region", "--scheme", "ts", "--h", "-1", "--p", "100",
                            "--sa2", "1"], tmp_path, monkeypatch, capsys)
        assert code == 2
        doc = json.loads(err)
        assert doc["error"]["exit_code"] == 2

    def test_infeasible_exit_3(self, tmp_path, monkeypatch, capsys):
        code, _, err = run(["solve", "--problem", "p0", "--q", "100", "--ps", "25",
                            *FIG9_FLAGS], tmp_path, monkeypatch, capsys)
        assert code == 3
        assert json.loads(err)["error"]["type"] == "InfeasibleTarget"

    def test_config_file_with_flag_override(self, tmp_path, monkeypatch, capsys):
        cfg = {"h": 1.0, "p": 100.0, "sa2": 1.0, "scov2": 1.0, "zeta": 1.0,
               "points": 16}
        (tmp_path / "cfg.json").write_text(json.dumps(cfg))
        code, _, _ = run(["region", "--scheme", "ts", "--config", "cfg.json",
                          "--points", "8"], tmp_path, monkeypatch, capsys)
        assert code == 0
        lines = (tmp_path / "region_ts.csv").read_text().splitlines()
        assert len(lines) == 1 + 8  # the explicit flag beat the config value

    def test_unknown_config_key_rejected(self, tmp_path, monkeypatch, capsys):
        (tmp_path / "cfg.json").write_text(json.dumps({"nonsense": 1}))
        code, _, err = run(["region", "--scheme", "ts", "--config", "cfg.json"],
                           tmp_path, monkeypatch, capsys)
        assert code == 2
        assert "nonsense" in json.loads(err)["error"]["message"]
