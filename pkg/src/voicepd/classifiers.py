"""Five classifier families, implemented from scratch on numpy.

All models consume z-scored features (the TrainedModel wrapper owns the
fitted Standardizer) and are deterministic given (data, hyperparams, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .data import LabeledDataset, Standardizer
from .errors import DataError

ALGORITHMS = ("knn", "tree", "nb", "svm", "nn")

MODEL_FORMAT_VERSION = 1


# --- k-nearest neighbors ---------------------------------------------------

class KNearestNeighbors:
    def __init__(self, k: int = 5):
        self.k = k
        self.X = None
        self.y = None
        self.classes_ = None

    def fit(self, X: np.ndarray, y: np.ndarray):
        if len(X) == 0:
            raise DataError("cannot fit knn on an empty dataset")
        if self.k > len(X):
            import warnings
            warnings.warn(f"knn k={self.k} > n={len(X)}; clamping to n")
            self.k = len(X)
        self.X = np.array(X)
        self.y = np.array(y)
        self.classes_ = np.unique(y)
        return self

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        scores = np.zeros((len(X), 3))
        for i, x in enumerate(np.asarray(X)):
            dists = np.sqrt(np.sum((self.X - x) ** 2, axis=1))
            order = np.argsort(dists, kind="stable")[: self.k]
            labels = self.y[order]
            for c in range(3):
                scores[i, c] = np.count_nonzero(labels == c) / self.k
        return scores

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros(len(X), dtype=np.int64)
        for i, x in enumerate(np.asarray(X)):
            dists = np.sqrt(np.sum((self.X - x) ** 2, axis=1))
            order = np.argsort(dists, kind="stable")[: self.k]
            labels = self.y[order]
            counts = np.bincount(labels, minlength=3)
            best = np.flatnonzero(counts == counts.max())
            if len(best) == 1:
                out[i] = best[0]
            else:
                # break vote ties by smaller summed neighbor distance, then lower label
                sums = {c: float(dists[order][labels == c].sum()) for c in best}
                out[i] = min(best, key=lambda c: (sums[c], c))
        return out

    def to_dict(self) -> dict:
        return {"k": self.k, "X": self.X.tolist(), "y": self.y.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "KNearestNeighbors":
        m = cls(k=d["k"])
        m.X = np.array(d["X"])
        m.y = np.array(d["y"], dtype=np.int64)
        m.classes_ = np.unique(m.y)
        return m


# --- CART decision tree ----------------------------------------------------

def _gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.sum(p * p))


class DecisionTree:
    """CART with Gini impurity, exhaustive threshold search at midpoints."""

    def __init__(self, max_depth: int = 8, min_leaf: int = 1):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.root = None

    def fit(self, X: np.ndarray, y: np.ndarray):
        if len(X) == 0:
            raise DataError("cannot fit tree on an empty dataset")
        self.root = self._build(np.asarray(X), np.asarray(y), depth=0)
        return self

    def _build(self, X, y, depth):
        counts = np.bincount(y, minlength=3)
        node = {"counts": counts.tolist()}
        if depth >= self.max_depth or len(np.unique(y)) <= 1 or len(y) < 2 * self.min_leaf:
            return node
        best = None  # (impurity, feature, threshold)
        for j in range(X.shape[1]):
            col = X[:, j]
            uniq = np.unique(col)
            if len(uniq) < 2:
                continue
            thresholds = (uniq[:-1] + uniq[1:]) / 2.0
            for t in thresholds:
                left = col <= t
                nl = int(np.count_nonzero(left))
                if nl < self.min_leaf or len(y) - nl < self.min_leaf:
                    continue
                gl = _gini(np.bincount(y[left], minlength=3))
                gr = _gini(np.bincount(y[~left], minlength=3))
                imp = (nl * gl + (len(y) - nl) * gr) / len(y)
                if best is None or imp < best[0] - 1e-15:
                    best = (imp, j, float(t))
        if best is None or best[0] >= _gini(counts) - 1e-15:
            return node
        _, j, t = best
        left = X[:, j] <= t
        node["feature"] = j
        node["threshold"] = t
        node["left"] = self._build(X[left], y[left], depth + 1)
        node["right"] = self._build(X[~left], y[~left], depth + 1)
        return node

    def _leaf(self, x):
        node = self.root
        while "feature" in node:
            node = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
        return node

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        scores = np.zeros((len(X), 3))
        for i, x in enumerate(np.asarray(X)):
            counts = np.array(self._leaf(x)["counts"], dtype=np.float64)
            scores[i] = counts / counts.sum()
        return scores

    def predict(self, X: np.ndarray) -> np.ndarray:
        scores = self.predict_scores(X)
        return np.argmax(scores, axis=1)  # argmax takes the lower label on ties

    def to_dict(self) -> dict:
        return {"max_depth": self.max_depth, "min_leaf": self.min_leaf, "root": self.root}

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTree":
        m = cls(max_depth=d["max_depth"], min_leaf=d["min_leaf"])
        m.root = d["root"]
        return m


# --- Gaussian naive Bayes --------------------------------------------------

class GaussianNaiveBayes:
    def __init__(self, var_floor: float = 1e-9):
        self.var_floor = var_floor
        self.classes_ = None
        self.priors = None
        self.means = None
        self.vars = None

    def fit(self, X: np.ndarray, y: np.ndarray):
        if len(X) == 0:
            raise DataError("cannot fit naive Bayes on an empty dataset")
        X, y = np.asarray(X), np.asarray(y)
        self.classes_ = np.unique(y)
        self.priors = np.array([np.mean(y == c) for c in self.classes_])
        self.means = np.array([X[y == c].mean(axis=0) for c in self.classes_])
        self.vars = np.maximum(
            np.array([X[y == c].var(axis=0) for c in self.classes_]), self.var_floor
        )
        return self

    def _log_joint(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X)
        out = np.zeros((len(X), len(self.classes_)))
        for ci in range(len(self.classes_)):
            ll = -0.5 * np.sum(
                np.log(2.0 * np.pi * self.vars[ci])
                + (X - self.means[ci]) ** 2 / self.vars[ci],
                axis=1,
            )
            out[:, ci] = np.log(self.priors[ci]) + ll
        return out

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        lj = self._log_joint(X)
        lj -= lj.max(axis=1, keepdims=True)
        p = np.exp(lj)
        p /= p.sum(axis=1, keepdims=True)
        scores = np.zeros((len(X), 3))
        for ci, c in enumerate(self.classes_):
            scores[:, c] = p[:, ci]
        return scores

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.classes_[np.argmax(self._log_joint(X), axis=1)]

    def to_dict(self) -> dict:
        return {
            "var_floor": self.var_floor,
            "classes": self.classes_.tolist(),
            "priors": self.priors.tolist(),
            "means": self.means.tolist(),
            "vars": self.vars.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianNaiveBayes":
        m = cls(var_floor=d["var_floor"])
        m.classes_ = np.array(d["classes"], dtype=np.int64)
        m.priors = np.array(d["priors"])
        m.means = np.array(d["means"])
        m.vars = np.array(d["vars"])
        return m


# --- linear one-vs-rest SVM ------------------------------------------------

class LinearSVM:
    """Primal sub-gradient descent on hinge loss, one binary machine per class."""

    def __init__(self, lam: float = 1e-3, epochs: int = 200, lr0: float = 1.0, seed: int = 0):
        self.lam = lam
        self.epochs = epochs
        self.lr0 = lr0
        self.seed = seed
        self.W = None  # (n_classes, n_features)
        self.b = None
        self.classes_ = None

    def fit(self, X: np.ndarray, y: np.ndarray):
        if len(X) == 0:
            raise DataError("cannot fit svm on an empty dataset")
        X, y = np.asarray(X), np.asarray(y)
        self.classes_ = np.unique(y)
        n, d = X.shape
        self.W = np.zeros((len(self.classes_), d))
        self.b = np.zeros(len(self.classes_))
        for ci, c in enumerate(self.classes_):
            target = np.where(y == c, 1.0, -1.0)
            rng = np.random.default_rng(self.seed + ci)
            w = np.zeros(d)
            b = 0.0
            t = 0
            for _ in range(self.epochs):
                for i in rng.permutation(n):
                    t += 1
                    eta = self.lr0 / (1.0 + self.lr0 * self.lam * t)
                    margin = target[i] * (X[i] @ w + b)
                    if margin < 1.0:
                        w = (1.0 - eta * self.lam) * w + eta * target[i] * X[i]
                        b += eta * target[i]
                    else:
                        w = (1.0 - eta * self.lam) * w
            self.W[ci] = w
            self.b[ci] = b
        return self

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        raw = np.asarray(X) @ self.W.T + self.b
        scores = np.full((len(X), 3), -np.inf)
        for ci, c in enumerate(self.classes_):
            scores[:, c] = raw[:, ci]
        return scores

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_scores(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "lam": self.lam, "epochs": self.epochs, "lr0": self.lr0, "seed": self.seed,
            "classes": self.classes_.tolist(), "W": self.W.tolist(), "b": self.b.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LinearSVM":
        m = cls(lam=d["lam"], epochs=d["epochs"], lr0=d["lr0"], seed=d["seed"])
        m.classes_ = np.array(d["classes"], dtype=np.int64)
        m.W = np.array(d["W"])
        m.b = np.array(d["b"])
        return m


# --- 3-layer neural network ------------------------------------------------

class NeuralNetwork:
    """input -> hidden (ReLU) -> 3-way softmax, cross-entropy loss,
    mini-batch gradient descent, Glorot-uniform initialization."""

    def __init__(self, hidden: int = 16, lr: float = 0.01, epochs: int = 500,
                 batch_size: int = 8, seed: int = 0):
        self.hidden = hidden
        self.lr = lr
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed
        self.W1 = self.b1 = self.W2 = self.b2 = None
        self.n_classes = 3
        self.loss_history: list[float] = []

    def init_params(self, n_features: int, rng: np.random.Generator | None = None):
        rng = rng or np.random.default_rng(self.seed)
        lim1 = np.sqrt(6.0 / (n_features + self.hidden))
        lim2 = np.sqrt(6.0 / (self.hidden + self.n_classes))
        self.W1 = rng.uniform(-lim1, lim1, size=(n_features, self.hidden))
        self.b1 = np.zeros(self.hidden)
        self.W2 = rng.uniform(-lim2, lim2, size=(self.hidden, self.n_classes))
        self.b2 = np.zeros(self.n_classes)

    def _forward(self, X: np.ndarray):
        z1 = X @ self.W1 + self.b1
        a1 = np.maximum(z1, 0.0)
        z2 = a1 @ self.W2 + self.b2
        z2 = z2 - z2.max(axis=1, keepdims=True)
        e = np.exp(z2)
        probs = e / e.sum(axis=1, keepdims=True)
        return z1, a1, probs

    def loss_and_gradients(self, X: np.ndarray, y: np.ndarray):
        """Mean cross-entropy and analytic gradients on a batch."""
        X = np.asarray(X)
        n = len(X)
        z1, a1, probs = self._forward(X)
        loss = float(-np.mean(np.log(probs[np.arange(n), y] + 1e-300)))
        delta2 = probs.copy()
        delta2[np.arange(n), y] -= 1.0
        delta2 /= n
        grads = {
            "W2": a1.T @ delta2,
            "b2": delta2.sum(axis=0),
        }
        delta1 = (delta2 @ self.W2.T) * (z1 > 0.0)
        grads["W1"] = X.T @ delta1
        grads["b1"] = delta1.sum(axis=0)
        return loss, grads

    def fit(self, X: np.ndarray, y: np.ndarray):
        if len(X) == 0:
            raise DataError("cannot fit neural network on an empty dataset")
        X, y = np.asarray(X), np.asarray(y, dtype=np.int64)
        rng = np.random.default_rng(self.seed)
        self.init_params(X.shape[1], rng)
        n = len(X)
        self.loss_history = []
        for _ in range(self.epochs):
            perm = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                idx = perm[start:start + self.batch_size]
                _, grads = self.loss_and_gradients(X[idx], y[idx])
                self.W1 -= self.lr * grads["W1"]
                self.b1 -= self.lr * grads["b1"]
                self.W2 -= self.lr * grads["W2"]
                self.b2 -= self.lr * grads["b2"]
            loss, _ = self.loss_and_gradients(X, y)
            self.loss_history.append(loss)
        return self

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        _, _, probs = self._forward(np.asarray(X))
        return probs

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_scores(X), axis=1)

    def to_dict(self) -> dict:
        return {
            "hidden": self.hidden, "lr": self.lr, "epochs": self.epochs,
            "batch_size": self.batch_size, "seed": self.seed,
            "W1": self.W1.tolist(), "b1": self.b1.tolist(),
            "W2": self.W2.tolist(), "b2": self.b2.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NeuralNetwork":
        m = cls(hidden=d["hidden"], lr=d["lr"], epochs=d["epochs"],
                batch_size=d["batch_size"], seed=d["seed"])
        m.W1 = np.array(d["W1"])
        m.b1 = np.array(d["b1"])
        m.W2 = np.array(d["W2"])
        m.b2 = np.array(d["b2"])
        return m


_MODEL_CLASSES = {
    "knn": KNearestNeighbors,
    "tree": DecisionTree,
    "nb": GaussianNaiveBayes,
    "svm": LinearSVM,
    "nn": NeuralNetwork,
}


def _make_model(algorithm: str, hyperparams: dict, seed: int):
    hp = dict(hyperparams or {})
    if algorithm == "knn":
        return KNearestNeighbors(k=hp.get("k", 5))
    if algorithm == "tree":
        return DecisionTree(max_depth=hp.get("max_depth", 8), min_leaf=hp.get("min_leaf", 1))
    if algorithm == "nb":
        return GaussianNaiveBayes(var_floor=hp.get("var_floor", 1e-9))
    if algorithm == "svm":
        return LinearSVM(lam=hp.get("lam", 1e-3), epochs=hp.get("epochs", 200),
                         lr0=hp.get("lr0", 1.0), seed=seed)
    if algorithm == "nn":
        return NeuralNetwork(hidden=hp.get("hidden", 16), lr=hp.get("lr", 0.01),
                             epochs=hp.get("epochs", 500),
                             batch_size=hp.get("batch_size", 8), seed=seed)
    raise DataError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


@dataclass
class TrainedModel:
    """A fitted classifier plus the standardization that produced its inputs."""

    algorithm: str
    model: object
    standardizer: Standardizer
    seed: int
    feature_names: list[str] = field(default_factory=list)

    def predict(self, features: np.ndarray) -> np.ndarray:
        features = np.atleast_2d(np.asarray(features, dtype=np.float64))
        if features.shape[1] != len(self.standardizer.mean):
            raise DataError(
                f"expected {len(self.standardizer.mean)} features, got {features.shape[1]}"
            )
        return self.model.predict(self.standardizer.transform(features))

    def predict_one(self, x: np.ndarray) -> tuple[int, np.ndarray]:
        features = self.standardizer.transform(np.atleast_2d(x))
        label = int(self.model.predict(features)[0])
        scores = self.model.predict_scores(features)[0]
        return label, scores

    def to_json(self) -> str:
        doc = {
            "version": MODEL_FORMAT_VERSION,
            "algorithm": self.algorithm,
            "seed": self.seed,
            "feature_names": self.feature_names,
            "standardization": self.standardizer.to_dict(),
            "parameters": self.model.to_dict(),
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        doc = json.loads(text)
        if doc.get("version") != MODEL_FORMAT_VERSION:
            raise DataError(f"unsupported model format version {doc.get('version')}")
        model = _MODEL_CLASSES[doc["algorithm"]].from_dict(doc["parameters"])
        return cls(
            algorithm=doc["algorithm"],
            model=model,
            standardizer=Standardizer.from_dict(doc["standardization"]),
            seed=doc["seed"],
            feature_names=doc["feature_names"],
        )


def train(algorithm: str, dataset: LabeledDataset,
          hyperparams: dict | None = None, seed: int = 0) -> TrainedModel:
    """Fit standardization on the dataset, then the requested classifier."""
    if len(dataset) == 0:
        raise DataError("cannot train on an empty dataset")
    standardizer = Standardizer().fit(dataset.features)
    model = _make_model(algorithm, hyperparams or {}, seed)
    model.fit(standardizer.transform(dataset.features), dataset.labels)
    return TrainedModel(
        algorithm=algorithm,
        model=model,
        standardizer=standardizer,
        seed=seed,
        feature_names=list(dataset.feature_names),
    )
