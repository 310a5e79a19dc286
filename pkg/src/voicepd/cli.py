"""Command-line surface: synth, extract, rank, evaluate, plotdata.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
All commands are deterministic given (inputs, config, seed).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import audio_io, evaluation
from .data import LabeledDataset, load_feature_csv, save_feature_csv
from .errors import VoicePDError
from .features import FEATURE_NAMES, FeatureConfig, extract_all
from .pitch import PitchConfig, analyze_pitch
from .selection import chi2_scores
from .synth import SynthSpec, gen_signal

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

_KIND_ALIASES = {"pulse": "pulse_train", "noise": "white_noise"}


@dataclass
class RunConfig:
    """Every tunable of the pipeline; round-trips through a JSON file."""

    seed: int = 0
    frame_ms: float = 40.0
    hop_ms: float = 10.0
    f0_min: float = 60.0
    f0_max: float = 500.0
    voicing_threshold: float = 0.30
    sure_threshold: float = 0.2
    bins: int = 10
    top_k: int | None = None
    algorithm: str = "knn"
    test_fraction: float = 0.15
    cv_k: int = 10
    knn_k: int = 5
    tree_max_depth: int = 8
    tree_min_leaf: int = 1
    nb_var_floor: float = 1e-9
    svm_lambda: float = 1e-3
    svm_epochs: int = 200
    nn_hidden: int = 16
    nn_lr: float = 0.01
    nn_epochs: int = 500
    nn_batch: int = 8

    def to_file(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(dataclasses.asdict(self), fh, sort_keys=True, indent=2)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise VoicePDError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    def feature_config(self) -> FeatureConfig:
        return FeatureConfig(
            pitch=PitchConfig(
                frame_ms=self.frame_ms, hop_ms=self.hop_ms,
                f0_min=self.f0_min, f0_max=self.f0_max,
                voicing_threshold=self.voicing_threshold,
            ),
            sure_threshold=self.sure_threshold,
        )

    def hyperparams(self) -> dict:
        return {
            "knn": {"k": self.knn_k},
            "tree": {"max_depth": self.tree_max_depth, "min_leaf": self.tree_min_leaf},
            "nb": {"var_floor": self.nb_var_floor},
            "svm": {"lam": self.svm_lambda, "epochs": self.svm_epochs},
            "nn": {"hidden": self.nn_hidden, "lr": self.nn_lr,
                   "epochs": self.nn_epochs, "batch_size": self.nn_batch},
        }[self.algorithm]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_config_flags(p: argparse.ArgumentParser, fields: list[str]) -> None:
    flag_types = {f.name: f for f in dataclasses.fields(RunConfig)}
    p.add_argument("--config", help="JSON config file providing defaults")
    for name in fields:
        f = flag_types[name]
        typ = {int: int, float: float, str: str}.get(type(f.default), None)
        if name == "top_k":
            p.add_argument("--top-k", dest="top_k", type=int, default=None)
        else:
            p.add_argument("--" + name.replace("_", "-"), dest=name,
                           type=typ or float, default=None)


def _merge_config(args: argparse.Namespace, fields: list[str]) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if getattr(args, "config", None) else RunConfig()
    for name in fields:
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    return cfg


_EXTRACT_FIELDS = ["seed", "frame_ms", "hop_ms", "f0_min", "f0_max",
                   "voicing_threshold", "sure_threshold"]
_EVAL_FIELDS = ["seed", "bins", "top_k", "test_fraction", "cv_k",
                "knn_k", "tree_max_depth", "tree_min_leaf", "nb_var_floor",
                "svm_lambda", "svm_epochs", "nn_hidden", "nn_lr", "nn_epochs",
                "nn_batch"]


def cmd_extract(args) -> int:
    cfg = _merge_config(args, _EXTRACT_FIELDS)
    feature_cfg = cfg.feature_config()
    entries = audio_io.load_manifest(args.manifest)
    rows, labels, rejects = [], [], []
    for entry in entries:
        try:
            signal = audio_io.load_wav(entry.path)
            track = analyze_pitch(signal, feature_cfg.pitch)
            vec = extract_all(signal, track, feature_cfg)
        except VoicePDError as exc:
            rejects.append((entry.path, str(exc)))
            continue
        rows.append(vec.as_array())
        labels.append(entry.label)
    features = np.array(rows) if rows else np.empty((0, len(FEATURE_NAMES)))
    dataset = LabeledDataset(features=features, labels=np.array(labels, dtype=np.int64))
    save_feature_csv(args.out, dataset)
    sidecar = args.out + ".rejects.csv"
    with open(sidecar, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("path,reason\n")
        for path, reason in rejects:
            fh.write(f"{path},{json.dumps(reason)}\n")
    print(f"wrote {len(rows)} rows to {args.out} ({len(rejects)} rejected)")
    return EXIT_OK


def cmd_rank(args) -> int:
    cfg = _merge_config(args, ["bins"])
    dataset = load_feature_csv(args.features)
    scores = chi2_scores(dataset, bins=cfg.bins)
    ranked = sorted(scores, key=lambda s: s.rank)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("rank,feature,chi2\n")
        for s in ranked:
            fh.write(f"{s.rank},{s.feature_name},{s.chi2!r}\n")
    print(f"wrote {len(ranked)} ranked features to {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = _merge_config(args, _EVAL_FIELDS)
    cfg.algorithm = args.algorithm
    dataset = load_feature_csv(args.features)
    report = evaluation.run_experiment(
        dataset, cfg.algorithm, seed=cfg.seed,
        test_fraction=cfg.test_fraction, cv_k=cfg.cv_k,
        hyperparams=cfg.hyperparams(), bins=cfg.bins, top_k=cfg.top_k,
    )
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_synth(args) -> int:
    kind = _KIND_ALIASES.get(args.kind, args.kind)
    spec = SynthSpec(
        kind=kind, f0=args.f0, duration_s=args.duration,
        sample_rate=args.sample_rate, jitter_pct=args.jitter,
        shimmer_db=args.shimmer, seed=args.seed,
    )
    signal, truth = gen_signal(spec)
    os.makedirs(args.out_dir, exist_ok=True)
    name = args.name or (
        f"{kind}_f{args.f0:g}_j{args.jitter:g}_s{args.shimmer:g}_seed{args.seed}"
    )
    wav_path = os.path.join(args.out_dir, name + ".wav")
    json_path = os.path.join(args.out_dir, name + ".json")
    audio_io.save_wav(signal, wav_path)
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(truth.to_json() + "\n")
    print(f"wrote {wav_path} and {json_path}")
    return EXIT_OK


def cmd_plotdata(args) -> int:
    dataset = load_feature_csv(args.features)
    if args.feature not in dataset.feature_names:
        raise VoicePDError(
            f"unknown feature {args.feature!r}; valid names: {', '.join(FEATURE_NAMES)}"
        )
    j = dataset.feature_names.index(args.feature)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("class,recording,value\n")
        for i, (row, label) in enumerate(zip(dataset.features, dataset.labels)):
            fh.write(f"{int(label)},{i},{float(row[j])!r}\n")
    print(f"wrote per-class series for {args.feature} to {args.out}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="voicepd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract the 19-feature table from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    _add_config_flags(p, _EXTRACT_FIELDS)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("rank", help="chi-square rank the features of a feature CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    _add_config_flags(p, ["bins"])
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("evaluate", help="holdout + k-fold CV report for one algorithm")
    p.add_argument("--features", required=True)
    p.add_argument("--algorithm", required=True, choices=["knn", "tree", "nb", "svm", "nn"])
    p.add_argument("--out", default=None)
    _add_config_flags(p, _EVAL_FIELDS)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic WAV plus ground-truth JSON")
    p.add_argument("--kind", required=True,
                   choices=["pulse", "pulse_train", "sine", "noise", "white_noise", "silence"])
    p.add_argument("--out-dir", required=True)
    p.add_argument("--f0", type=float, default=100.0)
    p.add_argument("--duration", type=float, default=2.0)
    p.add_argument("--sample-rate", type=int, default=48000)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--shimmer", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("plotdata", help="emit long-format per-class values of one feature")
    p.add_argument("--features", required=True)
    p.add_argument("--feature", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plotdata)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except VoicePDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
