"""A small numpy MLP classifier with the training controls used in the experiments.

Hidden layers use ReLU, the single output unit a sigmoid, and dropout sits in
front of the output layer. Inputs are standardized with per-feature
statistics frozen into the model the first time it is trained.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .augment import AugmentConfig, augment_batch
from .core import Dataset, confusion_from_arrays
from .errors import ConfigError, InputError, TrainingDiverged
from .metrics import MetricReport, metric_report
from .mitigate import ClassWeights

PROB_EPS = 1e-7
_P_MIN = np.finfo(np.float64).tiny
_P_MAX = np.nextafter(1.0, 0.0)


@dataclass
class MlpModel:
    weights: list  # each (fan_in, fan_out)
    biases: list
    frozen: list
    dropout_rate: float = 0.2
    input_mean: Optional[np.ndarray] = None
    input_scale: Optional[np.ndarray] = None

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def copy(self) -> "MlpModel":
        return copy.deepcopy(self)

    def params(self):
        """Flat list of (layer, name, array) in layer order."""
        out = []
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            out += [(i, "W", w), (i, "b", b)]
        return out

    def freeze_all_but_last(self, k: int) -> None:
        if not 1 <= k <= self.n_layers:
            raise ConfigError(f"freeze_last_k must be in [1, {self.n_layers}], got {k}")
        self.frozen = [i < self.n_layers - k for i in range(self.n_layers)]

    def standardize(self, x: np.ndarray) -> np.ndarray:
        if self.input_mean is None:
            return x
        return (x - self.input_mean) / self.input_scale

    def fit_standardization(self, x: np.ndarray) -> None:
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        self.input_mean = mean
        self.input_scale = np.where(std > 0, std, 1.0)


def init_model(layer_sizes, seed: int = 0, dropout_rate: float = 0.2) -> MlpModel:
    """Glorot-uniform weights (variance 2 / (fan_in + fan_out)), zero biases."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2 or sizes[-1] != 1 or any(s < 1 for s in sizes):
        raise ConfigError(f"layer sizes must be >= 2 positive counts ending in 1, got {layer_sizes!r}")
    if not 0 <= dropout_rate < 1:
        raise ConfigError("dropout rate must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights, biases, [False] * len(weights), dropout_rate)


def _sigmoid(z):
    # split on sign to avoid overflow in exp
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _as_matrix(model: MlpModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    x = x.reshape(x.shape[0], -1) if x.ndim > 1 else x.reshape(1, -1)
    if x.shape[1] != model.layer_sizes[0]:
        raise InputError(f"input has {x.shape[1]} features, model expects {model.layer_sizes[0]}")
    return x


def _forward(model: MlpModel, x: np.ndarray, dropout_mask=None, rowwise=False):
    """Returns (logits, cache). ``x`` must already be standardized.

    ``rowwise`` swaps BLAS for einsum, whose per-row reduction order does not
    depend on the batch size, so batched and single predictions agree bit
    for bit.
    """
    acts = [x]
    pre = []
    a = x
    last = model.n_layers - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        if i == last and dropout_mask is not None:
            a = a * dropout_mask
            acts[-1] = a
        z = (np.einsum("ij,jk->ik", a, w) if rowwise else a @ w) + b
        pre.append(z)
        a = np.maximum(z, 0.0) if i < last else z
        if i < last:
            acts.append(a)
    return pre[-1][:, 0], (acts, pre)


def predict(model: MlpModel, x) -> np.ndarray | float:
    """Male-probability for one input vector (float) or a batch (array)."""
    single = np.asarray(x).ndim == 1
    xm = model.standardize(_as_matrix(model, x))
    logits, _ = _forward(model, xm, rowwise=True)
    p = np.clip(_sigmoid(logits), _P_MIN, _P_MAX)
    return float(p[0]) if single else p


def weighted_bce(labels, probs, weights: Optional[ClassWeights] = None) -> float:
    """Mean of w(label) * binary cross-entropy; probs are clipped to [1e-7, 1-1e-7]."""
    y = np.asarray(labels, dtype=np.float64)
    p = np.asarray(probs, dtype=np.float64)
    if y.shape != p.shape:
        raise InputError(f"labels and probs differ in length: {y.shape} vs {p.shape}")
    if y.size == 0:
        raise InputError("empty input")
    p = np.clip(p, PROB_EPS, 1 - PROB_EPS)
    w = weights.for_labels(y) if weights is not None else 1.0
    return float(np.mean(w * -(y * np.log(p) + (1 - y) * np.log(1 - p))))


def _loss_and_grads(model: MlpModel, xs: np.ndarray, y: np.ndarray,
                    weights: Optional[ClassWeights], dropout_mask=None):
    logits, (acts, pre) = _forward(model, xs, dropout_mask)
    p = _sigmoid(logits)
    loss = weighted_bce(y, p, weights)
    sw = weights.for_labels(y) if weights is not None else np.ones_like(p)
    delta = (sw * (p - y) / y.size)[:, None]
    grads = [None] * model.n_layers
    for i in range(model.n_layers - 1, -1, -1):
        grads[i] = (acts[i].T @ delta, delta.sum(axis=0))
        if i > 0:
            delta = delta @ model.weights[i].T
            if i == model.n_layers - 1 and dropout_mask is not None:
                delta = delta * dropout_mask
            delta = delta * (pre[i - 1] > 0)
    return loss, grads


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 20
    patience: int = 3
    lr0: float = 0.05
    decay_rate: float = 0.9
    batch_size: int = 32
    seed: int = 0
    class_weights: Optional[ClassWeights] = None
    augment: Optional[AugmentConfig] = None
    freeze_last_k: Optional[int] = None

    def __post_init__(self):
        if self.max_epochs < 1 or self.patience < 1 or self.batch_size < 1:
            raise ConfigError("max_epochs, patience and batch_size must be positive")
        if self.lr0 <= 0:
            raise ConfigError("lr0 must be positive")
        if not 0 < self.decay_rate <= 1:
            raise ConfigError("decay_rate must lie in (0, 1]")

    def learning_rate(self, epoch: int) -> float:
        return self.lr0 * self.decay_rate ** epoch


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    lr: float
    train_loss: float
    val_loss: float
    val_report: MetricReport


@dataclass
class TrainHistory:
    epochs: list = field(default_factory=list)
    best_epoch: int = -1
    stopped_epoch: int = -1
    stop_reason: str = ""

    @property
    def val_losses(self):
        return [e.val_loss for e in self.epochs]


class EarlyStopping:
    """Stop once validation loss has not improved for ``patience`` epochs."""

    def __init__(self, patience: int = 3):
        self.patience = patience
        self.best = math.inf
        self.best_epoch = -1
        self.wait = 0

    def update(self, epoch: int, val_loss: float) -> bool:
        """Record an epoch; returns True if it is a new best."""
        if val_loss < self.best:
            self.best, self.best_epoch, self.wait = val_loss, epoch, 0
            return True
        self.wait += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.wait >= self.patience


def _check_classes(ds: Dataset, what: str) -> None:
    if len(ds) == 0:
        raise InputError(f"{what} set is empty")
    n_male, n_female = ds.class_counts()
    if what == "training" and (n_male == 0 or n_female == 0):
        raise InputError("training set must contain both classes")


def evaluate(model: MlpModel, ds: Dataset, threshold: float = 0.5):
    """(unweighted loss, MetricReport, probabilities) on a dataset."""
    p = predict(model, ds.x.reshape(len(ds), -1))
    report = metric_report(confusion_from_arrays(ds.y, p, threshold))
    return weighted_bce(ds.y, p), report, p


def train(model: MlpModel, train_ds: Dataset, val_ds: Dataset, cfg: TrainConfig = TrainConfig()):
    """Mini-batch gradient descent with decay and early stopping.

    Returns a fresh model holding the parameters from the epoch with the
    lowest validation loss, and the per-epoch history.
    """
    _check_classes(train_ds, "training")
    _check_classes(val_ds, "validation")
    if cfg.augment is not None and not train_ds.is_image:
        raise ConfigError("augmentation needs image-shaped training data")
    model = model.copy()
    if cfg.freeze_last_k is not None:
        model.freeze_all_but_last(cfg.freeze_last_k)
    n = len(train_ds)
    flat = _as_matrix(model, train_ds.x.reshape(n, -1))
    if model.input_mean is None:
        model.fit_standardization(flat)
    xs_plain = model.standardize(flat)
    y = train_ds.y.astype(np.float64)

    history = TrainHistory()
    stopper = EarlyStopping(cfg.patience)
    best_model = model.copy()
    trainable = [i for i in range(model.n_layers) if not model.frozen[i]]
    hidden_width = model.layer_sizes[-2]
    keep = 1.0 - model.dropout_rate

    for epoch in range(cfg.max_epochs):
        lr = cfg.learning_rate(epoch)
        if cfg.augment is not None:
            aug = augment_batch(train_ds.x, train_ds.ids, cfg.augment, epoch)
            xs = model.standardize(aug.reshape(n, -1))
        else:
            xs = xs_plain
        order = np.random.default_rng([cfg.seed, epoch]).permutation(n)
        batch_losses = []
        for b, start in enumerate(range(0, n, cfg.batch_size)):
            idx = order[start:start + cfg.batch_size]
            mask = None
            if model.dropout_rate > 0:
                drng = np.random.default_rng([cfg.seed, epoch, b, 1])
                mask = (drng.random((idx.size, hidden_width)) < keep) / keep
            loss, grads = _loss_and_grads(model, xs[idx], y[idx], cfg.class_weights, mask)
            if not np.isfinite(loss):
                raise TrainingDiverged(f"training diverged (epoch {epoch}, batch {b})")
            batch_losses.append(loss * idx.size)
            for i in trainable:
                dw, db = grads[i]
                model.weights[i] = model.weights[i] - lr * dw
                model.biases[i] = model.biases[i] - lr * db
        train_loss = float(np.sum(batch_losses) / n)
        val_loss, val_report, _ = evaluate(model, val_ds)
        if not (np.isfinite(train_loss) and np.isfinite(val_loss)):
            raise TrainingDiverged("training diverged")
        history.epochs.append(EpochRecord(epoch, lr, train_loss, val_loss, val_report))
        if stopper.update(epoch, val_loss):
            best_model = model.copy()
        if stopper.should_stop:
            history.stop_reason = "early_stop"
            break
    else:
        history.stop_reason = "max_epochs"
    history.best_epoch = stopper.best_epoch
    history.stopped_epoch = history.epochs[-1].epoch
    return best_model, history


def transfer(pretrained: MlpModel, freeze_last_k: int, target_train: Dataset,
             target_val: Dataset, cfg: TrainConfig = TrainConfig()):
    """Freeze all but the last ``freeze_last_k`` layers and train on the target."""
    model = pretrained.copy()
    model.freeze_all_but_last(freeze_last_k)
    n_features = int(np.prod(target_train.x.shape[1:]))
    if n_features != model.layer_sizes[0]:
        raise InputError(f"target data has {n_features} features, model expects {model.layer_sizes[0]}")
    return train(model, target_train, target_val, cfg)


def gradient_check(model: MlpModel, batch: Dataset, eps: float = 1e-5,
                   weights: Optional[ClassWeights] = None) -> float:
    """Max relative error between backprop and central differences.

    Dropout is off. Frozen layers are skipped. Relative error is
    ``|a - n| / max(|a| + |n|, 1e-8)``.
    """
    if not 1e-7 <= eps <= 1e-3:
        raise ConfigError("eps must lie in [1e-7, 1e-3]")
    model = model.copy()
    xs = model.standardize(_as_matrix(model, batch.x.reshape(len(batch), -1)))
    y = batch.y.astype(np.float64)
    _, grads = _loss_and_grads(model, xs, y, weights)

    def loss_now():
        logits, _ = _forward(model, xs)
        return weighted_bce(y, _sigmoid(logits), weights)

    worst = 0.0
    for layer, name, arr in model.params():
        if model.frozen[layer]:
            continue
        analytic = grads[layer][0 if name == "W" else 1]
        for ix in np.ndindex(arr.shape):
            orig = arr[ix]
            arr[ix] = orig + eps
            up = loss_now()
            arr[ix] = orig - eps
            down = loss_now()
            arr[ix] = orig
            numeric = (up - down) / (2 * eps)
            a = analytic[ix]
            worst = max(worst, abs(a - numeric) / max(abs(a) + abs(numeric), 1e-8))
    return worst


def save_model(model: MlpModel, path) -> None:
    """Write an ``.npz`` archive; reloading is bit-exact."""
    arrays = {
        "layer_sizes": np.asarray(model.layer_sizes, dtype=np.int64),
        "frozen": np.asarray(model.frozen, dtype=bool),
        "dropout_rate": np.float64(model.dropout_rate),
    }
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        arrays[f"W{i}"] = w
        arrays[f"b{i}"] = b
    if model.input_mean is not None:
        arrays["input_mean"] = model.input_mean
        arrays["input_scale"] = model.input_scale
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_model(path) -> MlpModel:
    with np.load(path) as z:
        sizes = z["layer_sizes"]
        n = len(sizes) - 1
        return MlpModel(
            weights=[z[f"W{i}"].copy() for i in range(n)],
            biases=[z[f"b{i}"].copy() for i in range(n)],
            frozen=[bool(f) for f in z["frozen"]],
            dropout_rate=float(z["dropout_rate"]),
            input_mean=z["input_mean"].copy() if "input_mean" in z else None,
            input_scale=z["input_scale"].copy() if "input_scale" in z else None,
        )
