import json

import numpy as np
import pytest

from schlab.cli import main


def run_cli(args):
    return main(args)


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def csv_summary(path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# results: "):
                return json.loads(line[len("# results: "):])
    raise AssertionError("no results comment in CSV output")


class TestUsage:
    def test_missing_required_option(self, tmp_path, capsys):
        code = run_cli(["dos", "--out", str(tmp_path / "x.csv")])
        assert code == 2

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            run_cli(["frobnicate"])
        assert exc.value.code == 2

    def test_bad_flag_value(self):
        with pytest.raises(SystemExit) as exc:
            run_cli(["dos", "--n", "x"])
        assert exc.value.code == 2

    def test_bad_config_key(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"nonsense": 1}))
        code = run_cli(["dos", "--n", "50", "--config", str(cfg)])
        assert code == 2

    def test_io_failure(self, tmp_path):
        code = run_cli(["dos", "--n", "30", "--out", str(tmp_path / "no" / "dir.csv")])
        assert code == 1


class TestDos:
    def test_clean_ks_small(self, tmp_path):
        out = tmp_path / "dos.csv"
        code = run_cli([
            "dos", "--n", "2000", "--sigma", "0", "--trials", "1",
            "--seed", "1", "--out", str(out),
        ])
        assert code == 0
        results = csv_summary(out)
        assert results["ks_vs_arcsine"] <= 0.01

    def test_json_schema(self, tmp_path):
        out = tmp_path / "dos.json"
        code = run_cli([
            "dos", "--n", "200", "--trials", "2", "--format", "json",
            "--out", str(out),
        ])
        assert code == 0
        doc = read_json(out)
        assert set(doc) == {"command", "version", "config", "results", "ci", "runtime_seconds"}
        assert doc["runtime_seconds"] is None
        assert doc["config"]["seed"] == 0
        assert doc["version"].startswith("schlab ")
        hist = doc["results"]["histogram"]
        assert len(hist["count"]) == doc["config"]["bins"]

    def test_config_file_precedence(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 100, "sigma": 0.0, "trials": 1}))
        out1 = tmp_path / "a.json"
        code = run_cli(["dos", "--config", str(cfg), "--format", "json", "--out", str(out1)])
        assert code == 0
        assert read_json(out1)["config"]["n"] == 100
        out2 = tmp_path / "b.json"
        code = run_cli([
            "dos", "--config", str(cfg), "--n", "120", "--format", "json", "--out", str(out2),
        ])
        assert code == 0
        assert read_json(out2)["config"]["n"] == 120


class TestEigvec:
    def test_row_counts(self, tmp_path):
        out = tmp_path / "vec.csv"
        code = run_cli([
            "eigvec", "--n", "300", "--sigma", "8", "--seed", "7", "--out", str(out),
        ])
        assert code == 0
        lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
        assert len(lines) == 1 + 300 + 64  # header + psi rows + bin rows

    def test_clean_mid_mode_flat_bins(self, tmp_path):
        # 10 bins over 101 sites: enough sites per bin for sin^2 to average
        out = tmp_path / "vec.json"
        code = run_cli([
            "eigvec", "--n", "101", "--sigma", "0", "--index", "50", "--bins", "10",
            "--format", "json", "--out", str(out),
        ])
        assert code == 0
        doc = read_json(out)
        bins = np.array(doc["results"]["bins"])
        assert np.max(np.abs(bins - 1.0)) <= 0.15

    def test_norm_sums_to_one(self, tmp_path):
        out = tmp_path / "vec.json"
        run_cli([
            "eigvec", "--n", "150", "--sigma", "2", "--seed", "3",
            "--format", "json", "--out", str(out),
        ])
        doc = read_json(out)
        assert abs(doc["results"]["psi_sq_sum"] - 1.0) <= 1e-10

    def test_index_validation(self, tmp_path):
        code = run_cli([
            "eigvec", "--n", "10", "--index", "10", "--out", str(tmp_path / "x.csv"),
        ])
        assert code == 2


class TestShapeStats:
    def test_blocks_share_schema(self, tmp_path):
        out = tmp_path / "shape.json"
        code = run_cli([
            "shape-stats", "--n", "200", "--sigma", "4", "--trials", "30",
            "--format", "json", "--out", str(out),
        ])
        assert code == 0
        doc = read_json(out)
        fin = doc["results"]["finite_n"]
        lim = doc["results"]["limit"]
        assert set(fin) == set(lim)
        assert set(fin["profile"]) == set(lim["profile"])
        assert len(fin["peaks"]) == 30

    def test_limit_slope_tracks_horizon(self, tmp_path):
        out = tmp_path / "shape.json"
        code = run_cli([
            "shape-stats", "--n", "400", "--sigma", "4", "--trials", "150",
            "--select", "nearest", "--energy", "0.5",
            "--format", "json", "--out", str(out),
        ])
        assert code == 0
        doc = read_json(out)
        lim = doc["results"]["limit"]
        tau = lim["tau_mean"]
        stderr = lim["slope_ci_halfwidth_99"] / 2.5758
        assert abs(lim["slope_mean"] - (-tau / 4.0)) <= 3.0 * stderr


class TestSchSim:
    def test_constant_functional_rhs_exact(self, tmp_path):
        out = tmp_path / "sch.json"
        code = run_cli([
            "sch-sim", "--trials", "60", "--g", "one", "--format", "json",
            "--out", str(out),
        ])
        assert code == 0
        doc = read_json(out)
        assert doc["results"]["intensity"]["rhs"] == 1.0
        mean = doc["results"]["root_count"]["mean"]
        ci = doc["results"]["root_count"]["ci_halfwidth_99"]
        assert abs(mean - 1.0) <= 3 * ci + 0.05

    def test_csv_rows(self, tmp_path):
        out = tmp_path / "sch.csv"
        code = run_cli([
            "sch-sim", "--trials", "25", "--format", "csv", "--out", str(out),
        ])
        assert code == 0
        results = csv_summary(out)
        rows = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
        total_roots = sum(len(r["roots"]) for r in results["realizations"])
        assert len(rows) == 1 + total_roots


class TestCompare:
    def test_degenerate_sigma_zero(self, tmp_path):
        out = tmp_path / "cmp.json"
        code = run_cli([
            "compare", "--n", "200", "--sigma", "0", "--energy", "0.5",
            "--trials", "5", "--format", "json", "--out", str(out),
        ])
        assert code == 0
        doc = read_json(out)
        assert doc["results"]["degenerate"] is True

    def test_thresholds_present_when_passing(self, tmp_path):
        out = tmp_path / "cmp.json"
        code = run_cli([
            "compare", "--n", "300", "--sigma", "1", "--energy", "0.5",
            "--trials", "120", "--format", "json", "--out", str(out),
        ])
        doc = read_json(out)
        assert doc["results"]["thresholds"]["count"] > 0
        assert doc["results"]["thresholds"]["first_gap"] > 0
        assert code == 0 and doc["results"]["passed"] is True

    def test_energy_validation(self, tmp_path):
        code = run_cli([
            "compare", "--n", "100", "--energy", "0", "--out", str(tmp_path / "x.json"),
        ])
        assert code == 2


class TestDeterminism:
    CASES = [
        ["dos", "--n", "150", "--sigma", "1", "--trials", "3"],
        ["eigvec", "--n", "120", "--sigma", "4"],
        ["shape-stats", "--n", "120", "--sigma", "2", "--trials", "8"],
        ["sch-sim", "--trials", "10"],
        ["compare", "--n", "150", "--sigma", "1", "--energy", "0.5", "--trials", "40"],
    ]

    @pytest.mark.parametrize("case", CASES, ids=lambda c: c[0])
    def test_rerun_and_thread_count_byte_identical(self, case, tmp_path):
        outs = []
        for run, threads in (("a", "1"), ("b", "1"), ("c", "4")):
            for fmt in ("csv", "json"):
                out = tmp_path / f"{run}-{fmt}.{fmt}"
                code = run_cli(
                    case + ["--seed", "5", "--threads", threads, "--format", fmt,
                            "--out", str(out)]
                )
                assert code in (0, 3)
                outs.append(read_bytes(out))
        base_csv, base_json = outs[0], outs[1]
        assert outs[2] == base_csv and outs[4] == base_csv
        assert outs[3] == base_json and outs[5] == base_json
