"""Score files and dataset directories.

Score files are CSV (header ``id,label,score``) or JSONL with the same keys.
Labels may be 0/1 or female/male in any case.

A dataset directory holds ``index.csv`` with columns ``id,label,pixels`` plus
``meta.json`` giving the image shape. ``pixels`` is either inline 8-bit
values separated by spaces, or a path (relative to the directory) to a
``.npy`` file holding one image with values in [0, 1].
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from ..core import FEMALE, MALE, Dataset, ScoreRecord
from ..errors import InputError

_LABELS = {"0": FEMALE, "1": MALE, "female": FEMALE, "male": MALE}
SCORE_FIELDS = ("id", "label", "score")


def parse_label(raw, where: str) -> int:
    key = str(raw).strip().lower()
    if key in _LABELS:
        return _LABELS[key]
    raise InputError(f"{where}: field 'label': expected 0/1 or female/male, got {raw!r}")


def parse_score(raw, where: str) -> float:
    try:
        score = float(raw)
    except (TypeError, ValueError):
        raise InputError(f"{where}: field 'score': not a number: {raw!r}") from None
    if not (0.0 <= score <= 1.0) or math.isnan(score):
        raise InputError(f"{where}: field 'score': {raw!r} is outside [0, 1]")
    return score


def _record(row: dict, where: str) -> ScoreRecord:
    missing = [k for k in SCORE_FIELDS if k not in row or row[k] is None]
    if missing:
        raise InputError(f"{where}: missing field '{missing[0]}'")
    return ScoreRecord(str(row["id"]), parse_label(row["label"], where), parse_score(row["score"], where))


def load_scores(path) -> list[ScoreRecord]:
    """Read a score file; the format follows the extension (.jsonl/.json or CSV)."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: no such file")
    records = []
    if path.suffix.lower() in (".jsonl", ".json", ".ndjson"):
        with path.open() as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                where = f"{path}:{lineno}"
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise InputError(f"{where}: invalid JSON ({exc.msg})") from None
                if not isinstance(row, dict):
                    raise InputError(f"{where}: expected a JSON object")
                records.append(_record(row, where))
    else:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            header = [h.strip() for h in (reader.fieldnames or [])]
            if not set(SCORE_FIELDS) <= set(header):
                raise InputError(f"{path}:1: header must contain id,label,score, got {header}")
            reader.fieldnames = header
            for row in reader:
                records.append(_record(row, f"{path}:{reader.line_num}"))
    if not records:
        raise InputError(f"{path}: empty input")
    return records


def write_scores(records, path) -> None:
    path = Path(path)
    if path.suffix.lower() in (".jsonl", ".ndjson", ".json"):
        with path.open("w") as fh:
            for r in records:
                fh.write(json.dumps({"id": r.id, "label": r.label, "score": r.score}) + "\n")
        return
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SCORE_FIELDS)
        for r in records:
            w.writerow([r.id, r.label, repr(r.score)])


def write_dataset(ds: Dataset, directory) -> Path:
    """Write a dataset directory with inline 8-bit pixels."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    shape = list(ds.x.shape[1:])
    (d / "meta.json").write_text(json.dumps({"shape": shape, "encoding": "uint8", "count": len(ds)}, indent=2) + "\n")
    levels = np.round(ds.x.reshape(len(ds), -1) * 255).astype(np.int64)
    with (d / "index.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "label", "pixels"])
        for sid, lab, row in zip(ds.ids, ds.y, levels):
            w.writerow([sid, int(lab), " ".join(map(str, row))])
    return d


def load_dataset(directory) -> Dataset:
    d = Path(directory)
    index = d / "index.csv"
    if not index.exists():
        raise InputError(f"{index}: no such file")
    meta_path = d / "meta.json"
    shape = tuple(json.loads(meta_path.read_text())["shape"]) if meta_path.exists() else None
    ids, labels, images = [], [], []
    with index.open(newline="") as fh:
        reader = csv.DictReader(fh)
        field = next((f for f in ("pixels", "path", "path-or-inline-pixels") if f in (reader.fieldnames or [])), None)
        if field is None or "id" not in reader.fieldnames or "label" not in reader.fieldnames:
            raise InputError(f"{index}:1: header must be id,label,pixels")
        for row in reader:
            where = f"{index}:{reader.line_num}"
            ids.append(row["id"])
            labels.append(parse_label(row["label"], where))
            images.append(_load_pixels(row[field], d, shape, where))
    if not ids:
        raise InputError(f"{index}: empty input")
    return Dataset(np.stack(images), np.asarray(labels), ids)


def _load_pixels(value: str, base: Path, shape, where: str) -> np.ndarray:
    value = value.strip()
    if value.endswith(".npy"):
        arr = np.load(base / value).astype(np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
    else:
        try:
            arr = np.array([int(v) for v in value.split()], dtype=np.float64) / 255.0
        except ValueError:
            raise InputError(f"{where}: field 'pixels': expected space-separated 8-bit integers") from None
        if shape is None:
            raise InputError(f"{where}: inline pixels need meta.json with the image shape")
        if arr.size != int(np.prod(shape)):
            raise InputError(f"{where}: field 'pixels': expected {int(np.prod(shape))} values, got {arr.size}")
        arr = arr.reshape(shape)
    if shape is not None and tuple(arr.shape) != tuple(shape):
        raise InputError(f"{where}: image shape {arr.shape} does not match {tuple(shape)}")
    if arr.min() < 0 or arr.max() > 1:
        raise InputError(f"{where}: pixel values must lie in [0, 1]")
    return arr
