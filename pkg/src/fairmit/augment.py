"""Random flip / rotation / translation / contrast for small images.

Images are float arrays of shape ``(H, W, C)`` with values in [0, 1]. Each
``random_*`` function draws its parameter from the supplied generator and
delegates to a deterministic transform of the same name without the prefix.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputError

FILL_MODES = ("reflect", "constant")

# sample coordinates this close to an integer are treated as exact grid hits
_SNAP = 1e-9


@dataclass(frozen=True)
class AugmentConfig:
    flip: bool = True
    rotation_factor: float = 0.1
    translation_factor: float = 0.1
    contrast_factor: float = 0.2
    fill_mode: str = "reflect"
    seed: int = 0

    def __post_init__(self):
        if self.rotation_factor < 0:
            raise ConfigError("augment.rotation_factor must be >= 0")
        if not 0 <= self.translation_factor < 1:
            raise ConfigError("augment.translation_factor must lie in [0, 1)")
        if not 0 <= self.contrast_factor < 1:
            raise ConfigError("augment.contrast_factor must lie in [0, 1)")
        if self.fill_mode not in FILL_MODES:
            raise ConfigError(f"augment.fill_mode must be one of {FILL_MODES}")

    @classmethod
    def identity(cls, seed: int = 0) -> "AugmentConfig":
        return cls(flip=False, rotation_factor=0.0, translation_factor=0.0,
                   contrast_factor=0.0, seed=seed)


def as_image(img) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    if img.ndim != 3 or 0 in img.shape:
        raise InputError(f"expected an (H, W, C) image, got shape {img.shape}")
    return img


def sample_rng(seed: int, sample_id, epoch: int) -> np.random.Generator:
    """Independent stream per (seed, sample, epoch), so order does not matter.

    String ids are keyed by their CRC-32, which (unlike ``hash``) is stable
    across interpreter runs.
    """
    if isinstance(sample_id, str):
        sample_id = zlib.crc32(sample_id.encode("utf-8"))
    return np.random.default_rng([int(seed), int(sample_id), int(epoch)])


def _reflect(idx: np.ndarray, n: int) -> np.ndarray:
    # mirror about the outer pixel edges: ... c b a | a b c | c b a ...
    period = 2 * n
    idx = np.mod(idx, period)
    return np.where(idx >= n, period - 1 - idx, idx)


def _snap(c: np.ndarray) -> np.ndarray:
    r = np.round(c)
    return np.where(np.abs(c - r) < _SNAP, r, c)


def _bilinear(img: np.ndarray, ys: np.ndarray, xs: np.ndarray, fill_mode: str) -> np.ndarray:
    """Sample ``img`` at real coordinates (ys, xs), each shaped (H, W)."""
    h, w, _ = img.shape
    ys, xs = _snap(ys), _snap(xs)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    fy = (ys - y0)[..., None]
    fx = (xs - x0)[..., None]

    def tap(yi, xi):
        if fill_mode == "reflect":
            return img[_reflect(yi, h), _reflect(xi, w)]
        inside = (yi >= 0) & (yi < h) & (xi >= 0) & (xi < w)
        vals = img[np.clip(yi, 0, h - 1), np.clip(xi, 0, w - 1)]
        return np.where(inside[..., None], vals, 0.0)

    out = tap(y0, x0)
    # skip taps whose weight is exactly zero so grid-aligned sampling is a pure gather
    if np.any(fx):
        out = out * (1 - fx) + tap(y0, x0 + 1) * fx
        if np.any(fy):
            bottom = tap(y0 + 1, x0) * (1 - fx) + tap(y0 + 1, x0 + 1) * fx
            out = out * (1 - fy) + bottom * fy
    elif np.any(fy):
        out = out * (1 - fy) + tap(y0 + 1, x0) * fy
    return out


def flip_horizontal(img) -> np.ndarray:
    return as_image(img)[:, ::-1, :].copy()


def rotate(img, angle: float, fill_mode: str = "reflect") -> np.ndarray:
    """Rotate counter-clockwise by ``angle`` radians about the image centre."""
    img = as_image(img)
    if angle == 0:
        return img.copy()
    h, w, _ = img.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    c, s = math.cos(angle), math.sin(angle)
    # inverse map: output pixel -> source location (y axis points down)
    dy, dx = yy - cy, xx - cx
    src_x = c * dx - s * dy + cx
    src_y = s * dx + c * dy + cy
    return np.clip(_bilinear(img, src_y, src_x, fill_mode), 0.0, 1.0)


def translate(img, dy: float, dx: float, fill_mode: str = "reflect") -> np.ndarray:
    """Move content by (dy, dx) pixels; positive dy moves it down."""
    img = as_image(img)
    if dy == 0 and dx == 0:
        return img.copy()
    h, w, _ = img.shape
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    return np.clip(_bilinear(img, yy - dy, xx - dx, fill_mode), 0.0, 1.0)


def adjust_contrast(img, factor: float) -> np.ndarray:
    img = as_image(img)
    if factor == 1:
        return img.copy()
    mean = img.mean(axis=(0, 1), keepdims=True)
    return np.clip((img - mean) * factor + mean, 0.0, 1.0)


def random_flip(img, rng: np.random.Generator) -> np.ndarray:
    if rng.random() < 0.5:
        return flip_horizontal(img)
    return as_image(img).copy()


def random_rotation(img, factor: float, rng: np.random.Generator,
                    fill_mode: str = "reflect", trace: dict | None = None) -> np.ndarray:
    if factor < 0:
        raise ConfigError("rotation factor must be >= 0")
    if factor == 0:
        return as_image(img).copy()
    bound = factor * 2 * math.pi
    angle = rng.uniform(-bound, bound)
    if trace is not None:
        trace["angle"] = angle
    return rotate(img, angle, fill_mode)


def random_translation(img, factor: float, rng: np.random.Generator,
                       fill_mode: str = "reflect", trace: dict | None = None) -> np.ndarray:
    if not 0 <= factor < 1:
        raise ConfigError("translation factor must lie in [0, 1)")
    img = as_image(img)
    if factor == 0:
        return img.copy()
    h, w, _ = img.shape
    dy = rng.uniform(-factor * h, factor * h)
    dx = rng.uniform(-factor * w, factor * w)
    if trace is not None:
        trace["shift"] = (dy, dx)
    return translate(img, dy, dx, fill_mode)


def random_contrast(img, factor: float, rng: np.random.Generator,
                    trace: dict | None = None) -> np.ndarray:
    if not 0 <= factor < 1:
        raise ConfigError("contrast factor must lie in [0, 1)")
    if factor == 0:
        return as_image(img).copy()
    c = rng.uniform(1 - factor, 1 + factor)
    if trace is not None:
        trace["contrast"] = c
    return adjust_contrast(img, c)


def augment_pipeline(img, cfg: AugmentConfig, rng: np.random.Generator,
                     trace: dict | None = None) -> np.ndarray:
    """Flip, rotate, translate, then change contrast.

    ``trace``, if given, receives the parameters drawn at each stage.
    """
    out = as_image(img)
    if cfg.flip:
        flipped = rng.random() < 0.5
        if trace is not None:
            trace["flip"] = flipped
        out = flip_horizontal(out) if flipped else out.copy()
    out = random_rotation(out, cfg.rotation_factor, rng, cfg.fill_mode, trace)
    out = random_translation(out, cfg.translation_factor, rng, cfg.fill_mode, trace)
    out = random_contrast(out, cfg.contrast_factor, rng, trace)
    return out


def augment_batch(images: np.ndarray, ids, cfg: AugmentConfig, epoch: int) -> np.ndarray:
    """Augment each image with its own (seed, id, epoch) stream."""
    out = np.empty_like(images, dtype=np.float64)
    for i, (img, sid) in enumerate(zip(images, ids)):
        out[i] = augment_pipeline(img, cfg, sample_rng(cfg.seed, sid, epoch))
    return out
