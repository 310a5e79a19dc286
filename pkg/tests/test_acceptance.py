"""Top-level acceptance checks for the full pipeline.

Each test prints one `ACCEPTANCE n: PASS` / `FAIL` line (visible with
`pytest -s` or in captured output on failure) so the suite doubles as a
checklist.  Tolerances are stated inline next to each assertion.
"""

import contextlib
import json
import math
import time

import numpy as np
import pytest

from test_feature_oracles import (
    FS,
    REL,
    REL_SPECTRAL,
    oracle_log_entropy,
    oracle_mean_energy,
    oracle_mean_frequency,
    oracle_power_bandwidth,
    oracle_rms,
    oracle_shannon_entropy,
    oracle_stats,
    oracle_sure_entropy,
    oracle_welch_psd,
    oracle_zcr,
    random_signals,
)
from voicepd import features as F
from voicepd.audio_io import AudioSignal
from voicepd.classifiers import ALGORITHMS, NeuralNetwork, train
from voicepd.cli import main as cli_main
from voicepd.data import LabeledDataset
from voicepd.evaluation import (
    ConfusionMatrix,
    cross_validate,
    evaluate,
    kfold,
    metrics,
    stratified_split,
)
from voicepd.pitch import PitchTrack, analyze_pitch
from voicepd.selection import chi2_scores, chi2_statistic
from voicepd.synth import SynthSpec, gen_blobs, gen_signal


@contextlib.contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number}: FAIL ({description})")
        raise
    print(f"ACCEPTANCE {number}: PASS ({description})")


def measure_pulse_train(jitter_pct=0.0, shimmer_db=0.0, seed=0):
    sig, _ = gen_signal(SynthSpec(kind="pulse_train", f0=100, duration_s=2.0,
                                  sample_rate=48000, jitter_pct=jitter_pct,
                                  shimmer_db=shimmer_db, seed=seed))
    track = analyze_pitch(sig)
    return F.jitter(track), F.shimmer(track)


def test_criterion_1_jitter_oracle():
    with criterion(1, "programmed jitter recovered within 0.2 points, <5 s"):
        start = time.perf_counter()
        zero, _ = measure_pulse_train(jitter_pct=0.0)
        assert abs(zero) <= 1e-9
        for programmed in (0.5, 1.0, 2.0, 4.0):
            measured, _ = measure_pulse_train(jitter_pct=programmed, seed=7)
            assert measured == pytest.approx(programmed, abs=0.2)
        assert time.perf_counter() - start < 5.0


def test_criterion_2_shimmer_oracle():
    with criterion(2, "programmed shimmer recovered within 0.5 dB, <5 s"):
        start = time.perf_counter()
        for programmed in (0.0, 2.0, 6.02, 12.0):
            _, measured = measure_pulse_train(shimmer_db=programmed, seed=3)
            assert measured == pytest.approx(programmed, abs=0.5)
        assert time.perf_counter() - start < 5.0


def test_criterion_3_formula_equivalence():
    with criterion(3, "features match brute-force formulas on 100 random signals"):
        for sig in random_signals():
            x = sig.samples
            assert F.rms(sig) == pytest.approx(oracle_rms(x), rel=REL)
            assert F.zcr(sig) == pytest.approx(oracle_zcr(x), rel=REL, abs=1e-15)
            assert F.mean_energy(sig) == pytest.approx(
                oracle_mean_energy(x, FS), rel=REL)
            assert F.log_entropy(sig) == pytest.approx(
                oracle_log_entropy(x), rel=REL)
            assert F.sure_entropy(sig) == pytest.approx(
                oracle_sure_entropy(x), rel=REL)
            expected = oracle_stats(x)
            got = F.descriptive_stats(sig)
            for key, value in expected.items():
                assert got[key] == pytest.approx(value, rel=REL, abs=1e-15), key
            assert F.mean_frequency(sig) == pytest.approx(
                oracle_mean_frequency(x, FS), rel=REL_SPECTRAL)
            assert F.shannon_entropy(sig) == pytest.approx(
                oracle_shannon_entropy(x, FS), rel=REL_SPECTRAL)
            assert F.power_bandwidth(sig) == pytest.approx(
                oracle_power_bandwidth(x, FS), rel=REL_SPECTRAL)


def test_criterion_4_analytic_anchors():
    with criterion(4, "features hit closed-form values on analytic signals"):
        fs = 8000
        t = np.arange(fs) / fs
        sine = AudioSignal(np.sin(2 * np.pi * 100 * t), fs)
        assert F.rms(sine) == pytest.approx(math.sqrt(0.5), abs=1e-3)
        assert F.zcr(sine) == pytest.approx(2 * 100 / fs, rel=0.05)
        tone = AudioSignal(np.sin(2 * np.pi * 440 * np.arange(16000) / 16000), 16000)
        bin_hz = 16000 / 1024
        assert F.mean_frequency(tone) == pytest.approx(440.0, abs=bin_hz)
        normals = AudioSignal(
            np.random.default_rng(20240811).standard_normal(10 ** 6) * 0.1, fs)
        stats = F.descriptive_stats(normals)
        assert stats["kurtosis"] == pytest.approx(3.0, abs=0.1)
        assert stats["skewness"] == pytest.approx(0.0, abs=0.05)


def test_criterion_5_hand_cases():
    with criterion(5, "worked-by-hand examples reproduced to 1e-9"):
        track = PitchTrack(cycle_periods=np.array([100.0, 102.0, 98.0, 100.0]),
                           cycle_peaks=np.ones(4))
        assert F.jitter(track) == pytest.approx(8 / 3, abs=1e-9)
        track = PitchTrack(cycle_periods=np.full(4, 0.01),
                           cycle_peaks=np.array([1.0, 2.0, 1.0, 2.0]))
        assert F.shimmer(track) == pytest.approx(20 * math.log10(2), abs=1e-9)
        pair = AudioSignal(np.array([0.3, 0.4]), 8000)
        assert F.rms(pair) == pytest.approx(math.sqrt(0.125), abs=1e-9)
        alternating = AudioSignal(np.array([0.5, -0.5] * 8), 8000)
        assert F.zcr(alternating) == pytest.approx(1.0, abs=1e-9)


def test_criterion_6_chi_square():
    with criterion(6, "chi-square statistic and ranking behave as derived"):
        assert chi2_statistic([[10, 0], [0, 10]]) == pytest.approx(20.0, abs=1e-9)
        rng = np.random.default_rng(6)
        labels = np.repeat([0, 1, 2], 20)
        features = np.column_stack([
            rng.standard_normal(60),
            labels.astype(float),       # copy of the label: must rank first
            np.full(60, 3.0),           # constant: must score zero
            rng.standard_normal(60),
        ])
        ds = LabeledDataset(features=features, labels=labels,
                            feature_names=["a", "copied", "const", "b"])
        scores = chi2_scores(ds)
        assert scores[1].rank == 1
        assert scores[2].chi2 == 0.0


def test_criterion_7_classifier_sanity():
    with criterion(7, "all five algorithms separate 3 blobs; <60 s total"):
        start = time.perf_counter()
        blobs = gen_blobs((22, 28, 30), seed=5)
        train_idx, test_idx = stratified_split(blobs, 0.15, seed=0)
        for algorithm in ALGORITHMS:
            cv = cross_validate(algorithm, blobs, 10, seed=0)
            assert cv.pooled.accuracy >= 0.95, algorithm
            model = train(algorithm, blobs.subset(train_idx), seed=0)
            cm = evaluate(model, blobs.subset(test_idx))
            assert np.trace(cm.counts) / cm.total >= 0.90, algorithm
        assert time.perf_counter() - start < 60.0


def test_criterion_8_gradient_check():
    with criterion(8, "network gradients match finite differences to 1e-4"):
        rng = np.random.default_rng(8)
        X = rng.standard_normal((5, 7))
        y = np.array([0, 1, 2, 1, 0])
        net = NeuralNetwork(hidden=6, seed=8)
        net.init_params(7)
        _, grads = net.loss_and_gradients(X, y)
        h = 1e-6
        for name in ("W1", "b1", "W2", "b2"):
            param = getattr(net, name)
            fd = np.zeros_like(param)
            it = np.nditer(param, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                orig = param[idx]
                param[idx] = orig + h
                lp, _ = net.loss_and_gradients(X, y)
                param[idx] = orig - h
                lm, _ = net.loss_and_gradients(X, y)
                param[idx] = orig
                fd[idx] = (lp - lm) / (2 * h)
            rel = np.linalg.norm(grads[name] - fd) / max(
                np.linalg.norm(grads[name]), 1e-12)
            assert rel < 1e-4, name


def test_criterion_9_evaluation_protocol():
    with criterion(9, "splits, folds, and metric formulas are exact"):
        blobs = gen_blobs((22, 28, 30), seed=5)
        folds = kfold(blobs, 10, seed=0)
        assert [len(test) for _, test in folds] == [8] * 10
        train_idx, test_idx = stratified_split(blobs, 0.15, seed=0)
        assert len(test_idx) == 12
        report = metrics(ConfusionMatrix(
            np.array([[8, 1, 1], [2, 6, 2], [1, 1, 8]])))
        assert report.accuracy == pytest.approx(0.7333, abs=1e-4)
        assert report.per_class[0].precision == pytest.approx(0.7273, abs=1e-4)
        assert report.per_class[0].recall == pytest.approx(0.8000, abs=1e-4)
        assert report.per_class[0].f1 == pytest.approx(0.7619, abs=1e-4)
        doc = report.to_dict()
        assert set(doc["per_class"]) == {"0 (Med Off)", "1 (Healthy)", "2 (Med On)"}
        for entry in doc["per_class"].values():
            assert {"precision", "recall", "f1"} <= set(entry)
        assert "accuracy" in doc


def test_criterion_10_pipeline_determinism(tmp_path):
    with criterion(10, "same seeds give byte-identical CSV and JSON outputs"):
        outputs = []
        for run_dir in ("run1", "run2"):
            base = tmp_path / run_dir
            base.mkdir()
            lines = []
            for label, jit in ((0, 3.0), (1, 0.0), (2, 1.0)):
                for i in range(4):
                    name = f"c{label}_{i}"
                    assert cli_main([
                        "synth", "--kind", "pulse", "--out-dir", str(base),
                        "--f0", "100", "--duration", "1.0",
                        "--sample-rate", "16000", "--jitter", str(jit),
                        "--seed", str(100 * label + i), "--name", name]) == 0
                    lines.append(f"{base / (name + '.wav')},{label}")
            manifest = base / "manifest.csv"
            manifest.write_text("\n".join(lines) + "\n")
            features = base / "features.csv"
            ranked = base / "ranked.csv"
            report = base / "report.json"
            assert cli_main(["extract", "--manifest", str(manifest),
                             "--out", str(features)]) == 0
            assert cli_main(["rank", "--features", str(features),
                             "--out", str(ranked)]) == 0
            assert cli_main(["evaluate", "--features", str(features),
                             "--algorithm", "tree", "--cv-k", "3",
                             "--test-fraction", "0.25", "--seed", "1",
                             "--out", str(report)]) == 0
            json.loads(report.read_text())  # must be valid JSON
            outputs.append((features.read_bytes(), ranked.read_bytes(),
                            report.read_bytes()))
        assert outputs[0] == outputs[1]
