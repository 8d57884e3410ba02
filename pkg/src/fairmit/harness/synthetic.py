"""Synthetic stand-ins for a balanced source set and a small skewed target set.

Both domains share the two class templates, so features learned on the
source transfer. The target is noisier and, optionally, Female images are
brighter: a nuisance correlated with the label that a classifier can
latch onto.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from ..core import FEMALE, MALE, Dataset
from ..errors import ConfigError

# CHDS-sized target: 2061 female out of 3128 images
DEFAULT_FEMALE_FRACTION = 2061 / 3128


@dataclass(frozen=True)
class SyntheticSpec:
    image_height: int = 16
    image_width: int = 16
    channels: int = 1
    source_count: int = 20000
    target_count: int = 3128
    female_fraction: float = DEFAULT_FEMALE_FRACTION
    class_signal_strength: float = 0.02
    group_nuisance_strength: float = 0.05
    noise_level: float = 0.12
    target_noise_level: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if min(self.image_height, self.image_width, self.channels) < 1:
            raise ConfigError("image dimensions must be positive")
        if self.source_count < 1 or self.target_count < 1:
            raise ConfigError("dataset counts must be positive")
        if not 0 < self.female_fraction < 1:
            raise ConfigError("female_fraction must lie in (0, 1)")
        if self.noise_level < 0 or self.target_noise_level < 0:
            raise ConfigError("noise levels must be >= 0")

    @property
    def image_shape(self):
        return (self.image_height, self.image_width, self.channels)

    @property
    def target_female_count(self) -> int:
        return int(round(self.target_count * self.female_fraction))


def class_templates(spec: SyntheticSpec) -> dict[int, np.ndarray]:
    """Smooth zero-mean, unit-std patterns, one per class."""
    rng = np.random.default_rng([spec.seed, 0])
    out = {}
    for label in (FEMALE, MALE):
        t = gaussian_filter(rng.normal(size=spec.image_shape), sigma=(2.0, 2.0, 0.0), mode="wrap")
        out[label] = (t - t.mean()) / t.std()
    return out


def _render(labels, templates, spec, noise, nuisance, rng) -> np.ndarray:
    n = labels.size
    base = np.stack([templates[int(lab)] for lab in labels])
    x = 0.5 + spec.class_signal_strength * base
    x = x + rng.normal(scale=noise, size=x.shape)
    x = x + rng.normal(scale=0.03, size=(n, 1, 1, 1))  # per-image exposure
    if nuisance:
        x = x + nuisance * (labels == FEMALE)[:, None, None, None]
    # 8-bit quantization, like real photographs
    return np.round(np.clip(x, 0.0, 1.0) * 255.0) / 255.0


def _labels(n_female: int, n_male: int, rng) -> np.ndarray:
    labels = np.array([FEMALE] * n_female + [MALE] * n_male, dtype=np.int64)
    return labels[rng.permutation(labels.size)]


def generate_synthetic(spec: SyntheticSpec = SyntheticSpec()) -> tuple[Dataset, Dataset]:
    """Return (source, target) image datasets; deterministic per ``spec.seed``."""
    templates = class_templates(spec)
    rng_src = np.random.default_rng([spec.seed, 1])
    n_sf = spec.source_count // 2
    src_labels = _labels(n_sf, spec.source_count - n_sf, rng_src)
    src_x = _render(src_labels, templates, spec, spec.noise_level, 0.0, rng_src)
    source = Dataset(src_x, src_labels, [f"src-{i:06d}" for i in range(spec.source_count)])

    rng_tgt = np.random.default_rng([spec.seed, 2])
    n_tf = spec.target_female_count
    tgt_labels = _labels(n_tf, spec.target_count - n_tf, rng_tgt)
    tgt_x = _render(tgt_labels, templates, spec, spec.target_noise_level,
                    spec.group_nuisance_strength, rng_tgt)
    target = Dataset(tgt_x, tgt_labels, [f"tgt-{i:06d}" for i in range(spec.target_count)])
    return source, target
