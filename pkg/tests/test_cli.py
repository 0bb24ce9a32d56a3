import json

import numpy as np
import pytest

from flexdog.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, main
from flexdog.imageio import read_pgm


def run_cli(*argv):
    return main(list(argv))


def load_report(out_dir, name="report.json"):
    with open(out_dir / name) as f:
        return json.load(f)


class TestRun:
    def test_default_run_produces_artifacts(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("run", "--input", "pattern:step", "--out-dir", str(out)) == EXIT_OK
        for name in ("input.pgm", "oracle_dog.pgm", "analog_dog.pgm", "report.json"):
            assert (out / name).exists()
        doc = load_report(out)
        assert doc["schema_version"] == 1
        assert doc["sim_report"]["energy_j"] == pytest.approx(1.16424e-9, rel=1e-12)
        assert doc["sim_report"]["power_w"] == pytest.approx(2.97e-6, rel=1e-12)
        assert doc["sim_report"]["runtime_s"] == pytest.approx(3.92e-4, rel=1e-12)
        assert doc["sim_report"]["realtime"] is True

    def test_constant_pattern_gives_uniform_mid_gray(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("run", "--input", "pattern:constant", "--no-binarize",
                       "--out-dir", str(out)) == EXIT_OK
        img = read_pgm(out / "analog_dog.pgm")
        gray = np.rint(img.pixels * 255)
        assert np.all(gray == 128)

    def test_missing_input_exits_io_without_artifacts(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("run", "--input", str(tmp_path / "nope.idx"),
                       "--out-dir", str(out)) == EXIT_IO
        assert not out.exists()

    def test_determinism_byte_identical(self, tmp_path):
        outs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            assert run_cli("run", "--input", "pattern:checkerboard", "--seed", "5",
                           "--variation-gamma", "0.05", "--out-dir", str(out)) == EXIT_OK
            outs.append(out)
        for name in ("input.pgm", "oracle_dog.pgm", "analog_dog.pgm"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
        docs = [load_report(o) for o in outs]
        for doc in docs:
            doc.pop("timestamp")
            doc.pop("artifacts")
            doc["config"].pop("out_dir")
        assert json.dumps(docs[0], sort_keys=True) == json.dumps(docs[1], sort_keys=True)

    def test_json_round_trips(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("run", "--input", "pattern:dot", "--out-dir", str(out)) == EXIT_OK
        doc = load_report(out)
        assert json.loads(json.dumps(doc)) == doc

    def test_idx_input(self, tmp_path):
        import struct

        rng = np.random.default_rng(2)
        images = rng.integers(0, 256, (2, 28, 28), dtype=np.uint8)
        idx = tmp_path / "digits.idx"
        with open(idx, "wb") as f:
            f.write(struct.pack(">iiii", 2051, 2, 28, 28))
            f.write(images.tobytes())
        out = tmp_path / "out"
        assert run_cli("run", "--input", str(idx), "--index", "1",
                       "--out-dir", str(out)) == EXIT_OK
        inp = read_pgm(out / "input.pgm")
        assert set(np.unique(np.rint(inp.pixels * 255))) <= {0.0, 255.0}  # binarized

    def test_config_file_with_cli_override(self, tmp_path):
        cfg = tmp_path / "settings.cfg"
        cfg.write_text("sigma1 = 1.0\nseed = 9  # comment\nvariation-gain = 0.03\n")
        out = tmp_path / "out"
        assert run_cli("run", "--config", str(cfg), "--sigma1", "0.9",
                       "--input", "pattern:step", "--out-dir", str(out)) == EXIT_OK
        doc = load_report(out)
        assert doc["config"]["sigma1"] == 0.9  # CLI wins
        assert doc["config"]["seed"] == 9
        assert doc["config"]["variation_gain"] == 0.03

    def test_unknown_config_key_is_config_error(self, tmp_path):
        cfg = tmp_path / "settings.cfg"
        cfg.write_text("sigma9 = 1.0\n")
        assert run_cli("run", "--config", str(cfg)) == EXIT_CONFIG

    def test_bad_sigma_ratio_is_config_error(self):
        assert run_cli("run", "--input", "pattern:step", "--sigma-ratio", "0.5") == EXIT_CONFIG


class TestMonteCarlo:
    def test_zero_variation_rows_identical(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("montecarlo", "--input", "pattern:checkerboard", "--trials", "5",
                       "--out-dir", str(out)) == EXIT_OK
        lines = (out / "montecarlo.csv").read_text().strip().splitlines()
        assert lines[0] == "level,trial,seed,mean_abs_error_code,flip_rate"
        assert len(lines) == 6
        maes = {line.split(",")[3] for line in lines[1:]}
        assert len(maes) == 1

    def test_levels_sweep_monotone(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("montecarlo", "--input", "pattern:checkerboard",
                       "--trials", "100", "--levels", "0.05,0.20",
                       "--out-dir", str(out)) == EXIT_OK
        doc = load_report(out, "montecarlo.json")
        maes = {lvl["level"]: lvl["mean_mae"] for lvl in doc["levels"]}
        assert maes[0.20] > maes[0.05]

    def test_zero_trials_is_config_error(self, tmp_path):
        assert run_cli("montecarlo", "--input", "pattern:step", "--trials", "0",
                       "--out-dir", str(tmp_path / "out")) == EXIT_CONFIG

    def test_csv_constant_column_count(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("montecarlo", "--input", "pattern:step", "--trials", "3",
                       "--levels", "0.0,0.1", "--out-dir", str(out)) == EXIT_OK
        lines = (out / "montecarlo.csv").read_text().strip().splitlines()
        assert {len(line.split(",")) for line in lines} == {5}


class TestDeviation:
    def test_ideal_mode_zero_deviation(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert run_cli("deviation", "--reference", "eq4-gaussian",
                       "--out-dir", str(out)) == EXIT_OK
        captured = capsys.readouterr().out
        assert "average deviation 0.0000 nA" in captured
        doc = load_report(out, "deviation.json")
        assert doc["deviation"]["avg_abs_deviation_a"] == 0.0

    def test_sigmoid_mode_nonzero_na(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert run_cli("deviation", "--model", "sigmoid-product",
                       "--out-dir", str(out)) == EXIT_OK
        doc = load_report(out, "deviation.json")
        avg = doc["deviation"]["avg_abs_deviation_a"]
        assert 0.0 < avg < 1e-8
        assert f"{avg * 1e9:.4f} nA" in capsys.readouterr().out

    def test_reversed_range_is_config_error(self, tmp_path):
        assert run_cli("deviation", "--sweep-lo", "1.3", "--sweep-hi", "-1.3",
                       "--out-dir", str(tmp_path / "out")) == EXIT_CONFIG

    def test_csv_rows(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("deviation", "--points", "21", "--out-dir", str(out)) == EXIT_OK
        lines = (out / "deviation.csv").read_text().strip().splitlines()
        assert lines[0] == "dv_v,i_out_a,reference_a,abs_deviation_a"
        assert len(lines) == 22


class TestPerf:
    def test_paper_table(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert run_cli("perf", "28", "28", "--out-dir", str(out)) == EXIT_OK
        captured = capsys.readouterr().out
        assert "2.97 uW" in captured
        assert "392 us" in captured
        assert "1.16424 nJ" in captured
        doc = load_report(out, "perf.json")
        assert doc["perf"]["realtime"] is True

    def test_single_pixel_row(self, tmp_path, capsys):
        assert run_cli("perf", "1", "1", "--out-dir", str(tmp_path / "out")) == EXIT_OK
        assert "0.5 us" in capsys.readouterr().out

    def test_megapixel_not_realtime(self, tmp_path):
        out = tmp_path / "out"
        assert run_cli("perf", "1000", "1000", "--out-dir", str(out)) == EXIT_OK
        doc = load_report(out, "perf.json")
        assert doc["perf"]["runtime_s"] == pytest.approx(0.5, rel=1e-12)
        assert doc["perf"]["realtime"] is False

    def test_bad_dimensions(self, tmp_path):
        assert run_cli("perf", "0", "28", "--out-dir", str(tmp_path / "out")) == EXIT_CONFIG
