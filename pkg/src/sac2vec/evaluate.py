"""Classification, clustering and projection metrics for node embeddings."""

import json
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

log = logging.getLogger(__name__)

CLASSIFIER_NOTE = ("multinomial logistic regression (L2 1e-4, full-batch gradient descent) "
                   "used in place of a random forest")
TRAIN_FRACTIONS = (0.1, 0.2, 0.3, 0.4, 0.5)


@dataclass(frozen=True)
class LabeledSplit:
    train_ids: np.ndarray
    test_ids: np.ndarray
    labels: np.ndarray  # class id per node, -1 for unlabelled

    def __post_init__(self):
        if self.train_ids.size == 0 or self.test_ids.size == 0:
            raise ValueError("train and test sides must be non-empty")
        if np.intersect1d(self.train_ids, self.test_ids).size:
            raise ValueError("train and test overlap")


@dataclass
class EvalReport:
    metric_values: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_text(self):
        lines = [f"{k}\t{v!r}" for k, v in self.metric_values.items()]
        lines.append("#meta " + json.dumps(self.config, sort_keys=True))
        return "\n".join(lines) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text):
        report = cls()
        for line in text.splitlines():
            if line.startswith("#meta "):
                report.config.update(json.loads(line[6:]))
            elif line and not line.startswith("#"):
                k, v = line.split("\t")
                report.metric_values[k] = float(v)
        return report


def stratified_split(labels, train_fraction, seed):
    """Per-class shuffle; each class with >= 2 members keeps >= 1 node on both sides."""
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in np.unique(labels[labels >= 0]):
        members = rng.permutation(np.flatnonzero(labels == c))
        k = int(round(train_fraction * members.size))
        if members.size >= 2:
            k = min(max(k, 1), members.size - 1)
        train.append(members[:k])
        test.append(members[k:])
    return LabeledSplit(np.sort(np.concatenate(train)), np.sort(np.concatenate(test)), labels)


def f1_scores(y_true, y_pred, n_classes):
    """(micro, macro) F1; a class with no predictions or no support scores 0."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (y_true, y_pred), 1)
    tp = np.diag(cm).astype(float)
    pred_tot = cm.sum(axis=0)
    true_tot = cm.sum(axis=1)
    prec = np.divide(tp, pred_tot, out=np.zeros_like(tp), where=pred_tot > 0)
    rec = np.divide(tp, true_tot, out=np.zeros_like(tp), where=true_tot > 0)
    denom = prec + rec
    f1 = np.divide(2 * prec * rec, denom, out=np.zeros_like(tp), where=denom > 0)
    # micro precision = micro recall = accuracy for single-label prediction
    micro = tp.sum() / max(y_true.size, 1)
    return float(micro), float(f1.mean())


class LogisticRegression:
    """Multinomial logistic regression fit by gradient descent with backtracking."""

    def __init__(self, l2=1e-4, tol=1e-6, max_iter=500):
        self.l2 = l2
        self.tol = tol
        self.max_iter = max_iter
        self.loss_history = []

    def _loss_grad(self, W, X, Y):
        Z = X @ W
        Z -= Z.max(axis=1, keepdims=True)
        logp = Z - np.log(np.exp(Z).sum(axis=1, keepdims=True))
        n = X.shape[0]
        reg = W[:-1]
        loss = -(Y * logp).sum() / n + 0.5 * self.l2 * (reg * reg).sum()
        G = X.T @ (np.exp(logp) - Y) / n
        G[:-1] += self.l2 * reg
        return loss, G

    def fit(self, X, y, n_classes):
        self.mean_ = X.mean(axis=0)
        self.scale_ = X.std(axis=0)
        self.scale_[self.scale_ == 0] = 1.0
        Xb = self._design(X)
        Y = np.eye(n_classes)[y]
        W = np.zeros((Xb.shape[1], n_classes))
        loss, G = self._loss_grad(W, Xb, Y)
        self.loss_history = [loss]
        step = 1.0
        for _ in range(self.max_iter):
            gnorm2 = float((G * G).sum())
            if np.sqrt(gnorm2) < self.tol:
                break
            step *= 2.0
            while True:
                W_new = W - step * G
                new_loss, G_new = self._loss_grad(W_new, Xb, Y)
                if new_loss <= loss - 0.5 * step * gnorm2 or step < 1e-12:
                    break
                step *= 0.5
            if new_loss > loss:
                break
            W, loss, G = W_new, new_loss, G_new
            self.loss_history.append(loss)
        self.coef_ = W
        return self

    def _design(self, X):
        Xs = (X - self.mean_) / self.scale_
        return np.hstack([Xs, np.ones((X.shape[0], 1))])

    def predict(self, X):
        return np.argmax(self._design(X) @ self.coef_, axis=1)


def classify(embeddings, split, hyper=None):
    """Train on split.train_ids, report micro/macro F1 and accuracy on split.test_ids."""
    hyper = dict(hyper or {})
    X = embeddings.input_vectors if hasattr(embeddings, "input_vectors") else np.asarray(embeddings)
    labels = np.asarray(split.labels)
    n_classes = int(labels.max()) + 1
    y_tr = labels[split.train_ids]
    y_te = labels[split.test_ids]
    model = LogisticRegression(l2=hyper.get("l2", 1e-4), tol=hyper.get("tol", 1e-6),
                               max_iter=hyper.get("max_iter", 500))
    model.fit(X[split.train_ids], y_tr, n_classes)
    pred = model.predict(X[split.test_ids])
    micro, macro = f1_scores(y_te, pred, n_classes)
    missing = sorted(set(range(n_classes)) - set(y_tr.tolist()))
    return EvalReport(
        {"micro_f1": micro, "macro_f1": macro, "accuracy": float(np.mean(pred == y_te))},
        {"classifier": CLASSIFIER_NOTE, "train_size": int(split.train_ids.size),
         "test_size": int(split.test_ids.size), "classes_missing_from_train": missing,
         "loss_history_monotone": bool(np.all(np.diff(model.loss_history) <= 0))},
    )


def classification_sweep(embeddings, labels, fractions=TRAIN_FRACTIONS, repeats=10, seed=42, hyper=None):
    """Mean micro/macro F1 per training fraction over seeded stratified resplits."""
    metrics = {}
    runs = []
    for frac in fractions:
        micro, macro = [], []
        for rep in range(repeats):
            rep_seed = seed * 1000003 + int(round(frac * 100)) * 101 + rep
            r = classify(embeddings, stratified_split(labels, frac, rep_seed), hyper)
            if r.metric_values["micro_f1"] != r.metric_values["accuracy"]:
                raise AssertionError("micro-F1 must equal accuracy for single-label prediction")
            micro.append(r.metric_values["micro_f1"])
            macro.append(r.metric_values["macro_f1"])
            runs.append(r.config)
        tag = f"{int(round(frac * 100))}"
        metrics[f"micro_f1@{tag}"] = float(np.mean(micro))
        metrics[f"macro_f1@{tag}"] = float(np.mean(macro))
    return EvalReport(metrics, {"classifier": CLASSIFIER_NOTE, "repeats": repeats, "seed": seed,
                                "fractions": list(fractions),
                                "classes_missing_from_train": sorted({c for r in runs
                                                                      for c in r["classes_missing_from_train"]})})


@dataclass
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    distortions: list
    iterations: int


def _sqdist(X, C):
    d = (X * X).sum(1)[:, None] - 2.0 * X @ C.T + (C * C).sum(1)[None, :]
    return np.maximum(d, 0.0)


def kmeans_pp(X, k, seed=0, max_iter=300, n_init=1):
    """k-means++ seeding then Lloyd iterations until the assignment stops changing.

    ``distortions[t]`` is the sum of squared distances after the t-th assignment.
    With ``n_init > 1`` the run with the lowest final distortion is returned.
    """
    X = X.input_vectors if hasattr(X, "input_vectors") else np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    runs = [_kmeans_once(X, k, np.random.default_rng([seed, r]) if n_init > 1 else np.random.default_rng(seed),
                         max_iter) for r in range(n_init)]
    return min(runs, key=lambda r: r.distortions[-1])


def _kmeans_once(X, k, rng, max_iter):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = _sqdist(X, centers[:1]).ravel()
    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        centers[c] = X[idx]
        closest = np.minimum(closest, _sqdist(X, centers[c:c + 1]).ravel())

    labels = None
    distortions = []
    it = 0
    for it in range(1, max_iter + 1):
        d = _sqdist(X, centers)
        new = np.argmin(d, axis=1)
        distortions.append(float(((X - centers[new]) ** 2).sum()))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        counts = np.bincount(labels, minlength=k)
        for c in range(k):
            if counts[c]:
                centers[c] = X[labels == c].mean(axis=0)
        for c in np.flatnonzero(counts == 0):
            # reseed at the point farthest from its own centroid
            far = np.argmax(((X - centers[labels]) ** 2).sum(1))
            centers[c] = X[far]
            labels = labels.copy()
            labels[far] = c
    return KMeansResult(labels, centers, distortions, it)


def clustering_accuracy(predicted, truth):
    """Best fraction of agreements over all one-to-one cluster -> class relabelings."""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise ValueError("length mismatch")
    if predicted.size == 0:
        return 1.0
    _, p = np.unique(predicted, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    size = max(p.max(), t.max()) + 1
    table = np.zeros((size, size), dtype=np.int64)
    np.add.at(table, (p, t), 1)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum()) / predicted.size


def project_2d(X):
    """PCA onto the top two components; each component's largest |loading| is positive.

    Returns (coords, flags) where flags lists degeneracies such as zero variance.
    """
    X = X.input_vectors if hasattr(X, "input_vectors") else np.asarray(X, dtype=np.float64)
    if X.shape[1] < 2:
        raise ValueError("need at least 2 dimensions")
    Xc = X - X.mean(axis=0)
    flags = []
    if not np.any(Xc):
        return np.zeros((X.shape[0], 2)), ["zero-variance"]
    _, s, vt = np.linalg.svd(Xc, full_matrices=False)
    comps = vt[:2].copy()
    for i in range(2):
        j = np.argmax(np.abs(comps[i]))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    coords = Xc @ comps.T
    if s.size < 2 or s[1] <= s[0] * 1e-12:
        coords[:, 1] = 0.0
        flags.append("rank-deficient")
    return coords, flags


def write_projection(coords, path, labels=None, label_names=None):
    with open(path, "w", encoding="utf-8") as fh:
        for i, (x, y) in enumerate(coords.tolist()):
            extra = ""
            if labels is not None and labels[i] >= 0:
                extra = " " + (label_names[labels[i]] if label_names else str(labels[i]))
            fh.write(f"{i} {x:.6g} {y:.6g}{extra}\n")
