"""Run one cell of the mitigation matrix and summarise it as a result row.

Rows without threshold change are 5-fold cross-validated on the target
(mean and sample std per metric). Thresholded rows use a single 80/10/10
split: the threshold is fitted on the validation part and the metrics are
reported there, so they carry no spread.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, fields, replace
from typing import Optional

import numpy as np

from ..augment import AugmentConfig
from ..core import Dataset, aggregate_folds, confusion_from_arrays, kfold, split_dataset
from ..errors import ConfigError, FairmitError
from ..metrics import metric_report
from ..mitigate import ThresholdStrategy, class_weights, optimize_threshold, threshold_objective
from ..trainer import TrainConfig, TrainHistory, evaluate, init_model, train, transfer
from .config import as_bool, as_float, as_int, as_list
from .io import load_dataset
from .synthetic import SyntheticSpec, generate_synthetic

log = logging.getLogger(__name__)

METRICS = ("accuracy", "dpd", "ppd", "eood", "prpd")
TOGGLES = ("transfer", "threshold", "reweight", "augment")


@dataclass(frozen=True)
class ExperimentConfig:
    model_tag: str = "MLP"
    use_transfer: bool = False
    threshold_strategy: Optional[ThresholdStrategy] = None
    use_reweighting: bool = False
    use_augmentation: bool = False
    split_seed: int = 0
    train_seed: int = 0
    folds: int = 5
    hidden: tuple = (64, 32)
    dropout: float = 0.2
    freeze_last_k: int = 1
    train: TrainConfig = TrainConfig()
    augment: AugmentConfig = AugmentConfig()
    synthetic: SyntheticSpec = SyntheticSpec()
    source_dir: Optional[str] = None
    target_dir: Optional[str] = None

    def layer_sizes(self, n_features: int) -> list[int]:
        return [n_features, *self.hidden, 1]


@dataclass
class ResultRow:
    model_tag: str
    transfer: bool
    threshold: Optional[ThresholdStrategy]
    reweighting: bool
    augmentation: bool
    # metric -> (value or mean, std or None)
    metrics: dict
    n_eval: float
    t_star: Optional[float] = None
    objective_at_t_star: Optional[float] = None
    objective_at_default: Optional[float] = None
    histories: list = field(default_factory=list, repr=False, compare=False)

    @property
    def is_thresholded(self) -> bool:
        return self.threshold is not None


# ---------------------------------------------------------------- config

_SECTIONS = {
    "train": ("max_epochs", "patience", "lr0", "decay_rate", "batch_size"),
    "augment": ("flip", "rotation_factor", "translation_factor", "contrast_factor", "fill_mode"),
    "synthetic": tuple(f.name for f in fields(SyntheticSpec)),
}
_TOP = {"mode", "model_tag", "split_seed", "train_seed", "folds", *TOGGLES,
        "model.hidden", "model.dropout", "transfer.freeze_last_k", "data.source", "data.target"}


def _parse_threshold(value: str) -> Optional[ThresholdStrategy]:
    if value.strip().lower() in ("no", "none", "off", "false"):
        return None
    try:
        return ThresholdStrategy.parse(value)
    except FairmitError as exc:
        raise ConfigError(f"threshold: {exc}") from None


def _section_values(conf: dict, section: str, target) -> dict:
    out = {}
    kinds = {f.name: f.type for f in fields(target)}
    for name in _SECTIONS[section]:
        key = f"{section}.{name}"
        if key not in conf:
            continue
        raw, kind = conf[key], str(kinds[name])
        if kind == "bool":
            out[name] = as_bool(raw, key)
        elif kind == "int":
            out[name] = as_int(raw, key)
        elif kind == "float":
            out[name] = as_float(raw, key)
        else:
            out[name] = raw
    return out


def configs_from_mapping(conf: dict) -> list[ExperimentConfig]:
    """Build one config, or the expanded toggle matrix when ``mode = matrix``."""
    known = set(_TOP) | {f"{s}.{k}" for s, ks in _SECTIONS.items() for k in ks}
    unknown = sorted(set(conf) - known)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    mode = conf.get("mode", "single").strip().lower()
    if mode not in ("single", "matrix"):
        raise ConfigError(f"mode: expected single or matrix, got {conf['mode']!r}")

    try:
        base = ExperimentConfig(
            model_tag=conf.get("model_tag", "MLP"),
            split_seed=as_int(conf.get("split_seed", "0"), "split_seed"),
            train_seed=as_int(conf.get("train_seed", "0"), "train_seed"),
            folds=as_int(conf.get("folds", "5"), "folds"),
            hidden=tuple(as_int(h, "model.hidden") for h in as_list(conf.get("model.hidden", "64,32"))),
            dropout=as_float(conf.get("model.dropout", "0.2"), "model.dropout"),
            freeze_last_k=as_int(conf.get("transfer.freeze_last_k", "1"), "transfer.freeze_last_k"),
            train=replace(TrainConfig(), **_section_values(conf, "train", TrainConfig)),
            augment=replace(AugmentConfig(), **_section_values(conf, "augment", AugmentConfig)),
            synthetic=replace(SyntheticSpec(), **_section_values(conf, "synthetic", SyntheticSpec)),
            source_dir=conf.get("data.source"),
            target_dir=conf.get("data.target"),
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    if base.folds < 2:
        raise ConfigError("folds must be at least 2")

    choices = {}
    for key in TOGGLES:
        values = as_list(conf.get(key, "no"))
        if not values:
            raise ConfigError(f"{key}: empty value")
        if len(values) > 1 and mode != "matrix":
            raise ConfigError(f"{key}: lists are only allowed with mode = matrix")
        if key == "threshold":
            choices[key] = [_parse_threshold(v) for v in values]
        else:
            choices[key] = [as_bool(v, key) for v in values]

    configs = []
    for tr, th, rw, au in itertools.product(*(choices[k] for k in TOGGLES)):
        configs.append(replace(base, use_transfer=tr, threshold_strategy=th,
                               use_reweighting=rw, use_augmentation=au))
    return configs


# ---------------------------------------------------------------- running

class DataCache:
    """Loads/generates the datasets and pretrained models once per process."""

    def __init__(self):
        self._data = {}
        self._pretrained = {}

    def datasets(self, cfg: ExperimentConfig) -> tuple[Optional[Dataset], Dataset]:
        key = (cfg.source_dir, cfg.target_dir, cfg.synthetic)
        if key not in self._data:
            if cfg.target_dir:
                source = load_dataset(cfg.source_dir) if cfg.source_dir else None
                self._data[key] = (source, load_dataset(cfg.target_dir))
            else:
                self._data[key] = generate_synthetic(cfg.synthetic)
        return self._data[key]

    def pretrained(self, cfg: ExperimentConfig, source: Dataset):
        key = (cfg.source_dir, cfg.synthetic, cfg.hidden, cfg.dropout,
               cfg.split_seed, cfg.train_seed, cfg.train)
        if key not in self._pretrained:
            log.info("pretraining on %d source samples", len(source))
            sp = split_dataset(len(source), seed=cfg.split_seed)
            n_features = int(np.prod(source.x.shape[1:]))
            model = init_model(cfg.layer_sizes(n_features), cfg.train_seed, cfg.dropout)
            # source model is plain: no reweighting, no augmentation
            self._pretrained[key] = train(model, source.subset(sp.train), source.subset(sp.val),
                                          replace(cfg.train, seed=cfg.train_seed))
        return self._pretrained[key]


def _fit(cfg: ExperimentConfig, cache: DataCache, source, train_ds: Dataset, val_ds: Dataset):
    tcfg = replace(
        cfg.train,
        seed=cfg.train_seed,
        class_weights=class_weights(*train_ds.class_counts()) if cfg.use_reweighting else None,
        augment=replace(cfg.augment, seed=cfg.train_seed) if cfg.use_augmentation else None,
    )
    if cfg.use_transfer:
        if source is None:
            raise ConfigError("transfer learning needs a source dataset (data.source)")
        pretrained, _ = cache.pretrained(cfg, source)
        return transfer(pretrained, cfg.freeze_last_k, train_ds, val_ds, tcfg)
    n_features = int(np.prod(train_ds.x.shape[1:]))
    model = init_model(cfg.layer_sizes(n_features), cfg.train_seed, cfg.dropout)
    return train(model, train_ds, val_ds, tcfg)


def run_experiment(cfg: ExperimentConfig, cache: Optional[DataCache] = None) -> ResultRow:
    cache = cache or DataCache()
    source, target = cache.datasets(cfg)
    row = dict(model_tag=cfg.model_tag, transfer=cfg.use_transfer, threshold=cfg.threshold_strategy,
               reweighting=cfg.use_reweighting, augmentation=cfg.use_augmentation)

    if cfg.threshold_strategy is not None:
        sp = split_dataset(len(target), seed=cfg.split_seed)
        val = target.subset(sp.val)
        model, hist = _fit(cfg, cache, source, target.subset(sp.train), val)
        _, _, probs = evaluate(model, val)
        result = optimize_threshold((val.y, probs), cfg.threshold_strategy)
        default_obj = threshold_objective(confusion_from_arrays(val.y, probs, 0.5), cfg.threshold_strategy)
        rep = result.report
        return ResultRow(
            **row,
            metrics={m: (getattr(rep, m), None) for m in METRICS},
            n_eval=len(val),
            t_star=result.t_star,
            objective_at_t_star=result.objective_value,
            objective_at_default=default_obj,
            histories=[hist],
        )

    per_fold = {m: [] for m in METRICS}
    sizes, histories = [], []
    for i, (tr_idx, va_idx) in enumerate(kfold(len(target), cfg.folds, cfg.split_seed)):
        val = target.subset(va_idx)
        try:
            model, hist = _fit(cfg, cache, source, target.subset(tr_idx), val)
        except FairmitError as exc:
            raise type(exc)(f"fold {i}: {exc}") from exc
        _, _, probs = evaluate(model, val)
        rep = metric_report(confusion_from_arrays(val.y, probs, 0.5))
        for m in METRICS:
            per_fold[m].append(getattr(rep, m))
        sizes.append(len(val))
        histories.append(hist)
    metrics = {}
    for m in METRICS:
        st = aggregate_folds(per_fold[m])
        metrics[m] = (st.mean, st.std)
    return ResultRow(**row, metrics=metrics, n_eval=float(np.mean(sizes)), histories=histories)


def run_all(configs, cache: Optional[DataCache] = None) -> list[ResultRow]:
    cache = cache or DataCache()
    rows = []
    for cfg in configs:
        log.info("running %s transfer=%s threshold=%s reweight=%s augment=%s", cfg.model_tag,
                 cfg.use_transfer, cfg.threshold_strategy and cfg.threshold_strategy.value,
                 cfg.use_reweighting, cfg.use_augmentation)
        rows.append(run_experiment(cfg, cache))
    return rows
