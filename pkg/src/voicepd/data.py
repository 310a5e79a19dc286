"""Labeled feature datasets, z-score standardization, and CSV interchange."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .features import FEATURE_NAMES

CLASS_NAMES = {0: "0 (Med Off)", 1: "1 (Healthy)", 2: "2 (Med On)"}


@dataclass
class LabeledDataset:
    features: np.ndarray          # (n_samples, n_features)
    labels: np.ndarray            # (n_samples,) ints in {0, 1, 2}
    feature_names: list[str] = field(default_factory=lambda: list(FEATURE_NAMES))

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise DataError("features must be a 2-D array")
        if len(self.features) != len(self.labels):
            raise DataError("features and labels must have equal length")
        if len(self.labels) and not np.all(np.isin(self.labels, [0, 1, 2])):
            raise DataError("labels must be in {0, 1, 2}")
        if self.features.shape[1] != len(self.feature_names):
            raise DataError("feature_names length must match feature columns")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(
            features=self.features[indices],
            labels=self.labels[indices],
            feature_names=list(self.feature_names),
        )

    def select_features(self, mask: np.ndarray) -> "LabeledDataset":
        mask = np.asarray(mask, dtype=bool)
        names = [n for n, keep in zip(self.feature_names, mask) if keep]
        return LabeledDataset(self.features[:, mask], self.labels, names)

    def class_counts(self) -> dict[int, int]:
        return {c: int(np.count_nonzero(self.labels == c)) for c in (0, 1, 2)}


@dataclass
class Standardizer:
    """Per-feature z-scoring fitted on training data.

    Zero-variance features pass through unscaled (std pinned to 1).
    """

    mean: np.ndarray | None = None
    std: np.ndarray | None = None

    def fit(self, features: np.ndarray) -> "Standardizer":
        features = np.asarray(features, dtype=np.float64)
        self.mean = features.mean(axis=0)
        std = features.std(axis=0)
        std[std == 0.0] = 1.0
        self.std = std
        return self

    def transform(self, features: np.ndarray) -> np.ndarray:
        if self.mean is None:
            raise DataError("standardizer not fitted")
        return (np.asarray(features, dtype=np.float64) - self.mean) / self.std

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Standardizer":
        return cls(mean=np.array(d["mean"]), std=np.array(d["std"]))


def save_feature_csv(path: str, dataset: LabeledDataset) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(list(dataset.feature_names) + ["label"]) + "\n")
        for row, label in zip(dataset.features, dataset.labels):
            fh.write(",".join(repr(float(v)) for v in row) + f",{int(label)}\n")


def load_feature_csv(path: str) -> LabeledDataset:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise DataError(f"empty feature CSV: {path!r}")
    header = lines[0].split(",")
    if header[-1] != "label":
        raise DataError(f"feature CSV {path!r} must end with a `label` column")
    names = header[:-1]
    rows, labels = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(header):
            raise DataError(f"{path!r} line {lineno}: expected {len(header)} fields")
        try:
            rows.append([float(v) for v in parts[:-1]])
            labels.append(int(parts[-1]))
        except ValueError as exc:
            raise DataError(f"{path!r} line {lineno}: {exc}") from None
    features = np.array(rows) if rows else np.empty((0, len(names)))
    return LabeledDataset(features=features, labels=np.array(labels, dtype=np.int64),
                          feature_names=names)
