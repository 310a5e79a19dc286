import json
import os

import numpy as np
import pytest

from voicepd.cli import RunConfig, main
from voicepd.features import FEATURE_NAMES

EXPECTED_HEADER = ",".join(FEATURE_NAMES) + ",label"


def run(*args):
    return main([str(a) for a in args])


def synth_dataset(out_dir, per_class=2, duration=1.0):
    """Pulse-train WAVs in three jitter classes plus a manifest file."""
    jitter_by_class = {0: 3.0, 1: 0.0, 2: 1.0}
    lines = []
    for label, jit in jitter_by_class.items():
        for i in range(per_class):
            name = f"c{label}_{i}"
            assert run("synth", "--kind", "pulse", "--out-dir", out_dir,
                       "--f0", 100, "--duration", duration, "--sample-rate", 16000,
                       "--jitter", jit, "--seed", 100 * label + i, "--name", name) == 0
            lines.append(f"{os.path.join(out_dir, name + '.wav')},{label}")
    manifest = os.path.join(out_dir, "manifest.csv")
    with open(manifest, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return manifest


class TestSynthCommand:
    def test_writes_wav_and_truth(self, tmp_path):
        assert run("synth", "--kind", "pulse", "--out-dir", tmp_path,
                   "--jitter", 1.0, "--name", "x") == 0
        assert (tmp_path / "x.wav").exists()
        truth = json.loads((tmp_path / "x.json").read_text())
        assert truth["spec"]["jitter_pct"] == 1.0
        assert len(truth["cycle_periods_s"]) > 50

    def test_invalid_f0_nonzero_exit(self, tmp_path, capsys):
        code = run("synth", "--kind", "sine", "--out-dir", tmp_path,
                   "--f0", 30000, "--sample-rate", 8000)
        assert code == 2
        assert "Nyquist" in capsys.readouterr().err

    def test_usage_error_exit_1(self):
        assert run("synth", "--kind", "triangle", "--out-dir", "/tmp/x") == 1


class TestExtractCommand:
    def test_end_to_end(self, tmp_path):
        manifest = synth_dataset(str(tmp_path))
        out = tmp_path / "features.csv"
        assert run("extract", "--manifest", manifest, "--out", out) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == EXPECTED_HEADER
        assert len(lines) == 7  # header + 6 recordings
        assert (tmp_path / "features.csv.rejects.csv").read_text() == "path,reason\n"

    def test_jitter_recovered_through_cli(self, tmp_path):
        manifest = synth_dataset(str(tmp_path), per_class=1, duration=2.0)
        out = tmp_path / "features.csv"
        assert run("extract", "--manifest", manifest, "--out", out) == 0
        lines = out.read_text().splitlines()[1:]
        j_col = FEATURE_NAMES.index("jitter_pct")
        by_label = {int(l.split(",")[-1]): float(l.split(",")[j_col]) for l in lines}
        assert by_label[1] == pytest.approx(0.0, abs=0.2)  # class 1 has no jitter
        assert by_label[2] == pytest.approx(1.0, abs=0.3)
        assert by_label[0] == pytest.approx(3.0, abs=0.4)

    def test_empty_manifest(self, tmp_path):
        manifest = tmp_path / "m.csv"
        manifest.write_text("")
        out = tmp_path / "f.csv"
        assert run("extract", "--manifest", manifest, "--out", out) == 0
        assert out.read_text().splitlines() == [EXPECTED_HEADER]

    def test_silence_goes_to_sidecar(self, tmp_path):
        assert run("synth", "--kind", "silence", "--out-dir", tmp_path, "--name", "quiet") == 0
        manifest = tmp_path / "m.csv"
        manifest.write_text(f"{tmp_path}/quiet.wav,0\n")
        out = tmp_path / "f.csv"
        assert run("extract", "--manifest", manifest, "--out", out) == 0
        assert out.read_text().splitlines() == [EXPECTED_HEADER]
        rejects = (tmp_path / "f.csv.rejects.csv").read_text().splitlines()
        assert len(rejects) == 2 and "quiet.wav" in rejects[1]

    def test_missing_manifest_exit_2(self, tmp_path):
        assert run("extract", "--manifest", tmp_path / "none.csv", "--out", tmp_path / "f.csv") == 2


class TestRankCommand:
    def test_label_copy_ranks_first(self, tmp_path):
        rng = np.random.default_rng(0)
        labels = np.repeat([0, 1, 2], 15)
        path = tmp_path / "f.csv"
        with open(path, "w") as fh:
            fh.write("noise_a,copied,noise_b,constant,label\n")
            for lb in labels:
                fh.write(f"{rng.standard_normal()!r},{float(lb)!r},"
                         f"{rng.standard_normal()!r},1.0,{lb}\n")
        out = tmp_path / "ranked.csv"
        assert run("rank", "--features", path, "--out", out) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "rank,feature,chi2"
        assert lines[1].split(",")[1] == "copied"
        constant_row = next(l for l in lines if l.split(",")[1] == "constant")
        assert float(constant_row.split(",")[2]) == 0.0
        assert constant_row.split(",")[0] == "4"


class TestEvaluateCommand:
    def _blob_csv(self, tmp_path):
        from voicepd.data import save_feature_csv
        from voicepd.synth import gen_blobs
        path = tmp_path / "blobs.csv"
        save_feature_csv(str(path), gen_blobs((22, 28, 30), seed=5))
        return path

    def test_report_contents(self, tmp_path):
        path = self._blob_csv(tmp_path)
        out = tmp_path / "report.json"
        assert run("evaluate", "--features", path, "--algorithm", "nb",
                   "--out", out, "--seed", 3) == 0
        report = json.loads(out.read_text())
        assert report["cv"]["pooled"]["accuracy"] >= 0.95
        assert set(report["holdout"]["per_class"]) == {
            "0 (Med Off)", "1 (Healthy)", "2 (Med On)"}

    def test_same_seed_identical_json(self, tmp_path):
        path = self._blob_csv(tmp_path)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run("evaluate", "--features", path, "--algorithm", "knn",
                   "--out", a, "--seed", 5) == 0
        assert run("evaluate", "--features", path, "--algorithm", "knn",
                   "--out", b, "--seed", 5) == 0
        assert a.read_bytes() == b.read_bytes()


class TestPlotdataCommand:
    def test_groups_and_conservation(self, tmp_path):
        from voicepd.data import save_feature_csv
        from voicepd.synth import gen_blobs
        path = tmp_path / "f.csv"
        save_feature_csv(str(path), gen_blobs(4, seed=0))
        out = tmp_path / "plot.csv"
        assert run("plotdata", "--features", path, "--feature", "kurtosis",
                   "--out", out) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "class,recording,value"
        assert len(lines) == 13  # header + 12 rows, one per input row
        assert {l.split(",")[0] for l in lines[1:]} == {"0", "1", "2"}

    def test_unknown_feature_lists_names(self, tmp_path, capsys):
        from voicepd.data import save_feature_csv
        from voicepd.synth import gen_blobs
        path = tmp_path / "f.csv"
        save_feature_csv(str(path), gen_blobs(2, seed=0))
        assert run("plotdata", "--features", path, "--feature", "sparkle",
                   "--out", tmp_path / "o.csv") == 2
        err = capsys.readouterr().err
        assert "sparkle" in err and "kurtosis" in err


class TestRunConfig:
    def test_roundtrip_through_file(self, tmp_path):
        cfg = RunConfig(seed=9, bins=7, top_k=4, nn_hidden=32, f0_min=70.0)
        path = tmp_path / "cfg.json"
        cfg.to_file(str(path))
        assert RunConfig.from_file(str(path)) == cfg

    def test_cli_honors_config_file(self, tmp_path):
        from voicepd.data import save_feature_csv
        from voicepd.synth import gen_blobs
        features = tmp_path / "f.csv"
        save_feature_csv(str(features), gen_blobs((22, 28, 30), seed=5))
        cfg = RunConfig(seed=11, cv_k=5)
        cfg_path = tmp_path / "cfg.json"
        cfg.to_file(str(cfg_path))
        out = tmp_path / "r.json"
        assert run("evaluate", "--features", features, "--algorithm", "nb",
                   "--config", cfg_path, "--out", out) == 0
        report = json.loads(out.read_text())
        assert report["seed"] == 11
        assert len(report["cv"]["folds"]) == 5

    def test_flag_overrides_config(self, tmp_path):
        from voicepd.data import save_feature_csv
        from voicepd.synth import gen_blobs
        features = tmp_path / "f.csv"
        save_feature_csv(str(features), gen_blobs((22, 28, 30), seed=5))
        cfg_path = tmp_path / "cfg.json"
        RunConfig(seed=11).to_file(str(cfg_path))
        out = tmp_path / "r.json"
        assert run("evaluate", "--features", features, "--algorithm", "nb",
                   "--config", cfg_path, "--seed", 99, "--out", out) == 0
        assert json.loads(out.read_text())["seed"] == 99


class TestFullPipelineDeterminism:
    def test_byte_identical_outputs(self, tmp_path):
        outputs = []
        for run_dir in ("run1", "run2"):
            base = tmp_path / run_dir
            base.mkdir()
            manifest = synth_dataset(str(base), per_class=4)
            features = base / "features.csv"
            ranked = base / "ranked.csv"
            report = base / "report.json"
            assert run("extract", "--manifest", manifest, "--out", features) == 0
            assert run("rank", "--features", features, "--out", ranked) == 0
            assert run("evaluate", "--features", features, "--algorithm", "tree",
                       "--cv-k", 3, "--test-fraction", 0.25, "--seed", 1,
                       "--out", report) == 0
            outputs.append(
                (features.read_bytes(), ranked.read_bytes(), report.read_bytes())
            )
        assert outputs[0] == outputs[1]
