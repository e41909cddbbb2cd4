"""Dataset ingestion, rescaling and synthetic generators."""

from __future__ import annotations

import csv
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidInputError

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
GENERATORS = ("gaussian_blobs", "two_moons")


def minmax_scale(X) -> np.ndarray:
    """Per-feature rescale to [0, 1]; constant features become 0."""
    X = np.asarray(X, dtype=np.float64)
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    out = np.zeros_like(X)
    ok = span > 0
    out[:, ok] = (X[:, ok] - lo[ok]) / span[ok]
    return out


def _is_number(tok):
    try:
        float(tok)
    except ValueError:
        return False
    return True


def read_csv_matrix(path) -> np.ndarray:
    """Comma-separated numeric matrix; a single non-numeric first line is treated as a header."""
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not t.strip() for t in rec):
                continue
            if lineno == 1 and not all(_is_number(t) for t in rec):
                continue
            try:
                vals = [float(t) for t in rec]
            except ValueError as exc:
                raise InvalidInputError(f"{path}:{lineno}: cannot parse number ({exc})") from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise InvalidInputError(f"{path}:{lineno}: expected {width} columns, found {len(vals)}")
            rows.append(vals)
    if not rows:
        raise InvalidInputError(f"{path}: no data rows")
    X = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise InvalidInputError(f"{path}: non-finite values")
    return X


def read_idx(path) -> np.ndarray:
    """Unsigned-byte IDX file (big-endian header) as an array of its declared shape."""
    raw = Path(path).read_bytes()
    if len(raw) < 4:
        raise InvalidInputError(f"{path}: truncated IDX header")
    magic = struct.unpack(">I", raw[:4])[0]
    if magic >> 8 != 0x08:
        raise InvalidInputError(f"{path}: unsupported IDX magic 0x{magic:08x}")
    ndim = magic & 0xFF
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise InvalidInputError(f"{path}: truncated IDX header")
    shape = struct.unpack(f">{ndim}I", raw[4:header])
    body = np.frombuffer(raw, dtype=np.uint8, offset=header)
    if body.size != int(np.prod(shape)):
        raise InvalidInputError(f"{path}: payload has {body.size} bytes, header declares {shape}")
    return body.reshape(shape)


def write_idx_images(path, images):
    images = np.asarray(images, dtype=np.uint8)
    header = struct.pack(">I", IDX_IMAGES_MAGIC) + struct.pack(">3I", *images.shape)
    Path(path).write_bytes(header + images.tobytes())


def read_labels(path, n=None) -> np.ndarray:
    """One integer label per line."""
    labels = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError:
                if lineno == 1 and not labels:
                    continue
                raise InvalidInputError(f"{path}:{lineno}: not an integer label: {line!r}") from None
    y = np.array(labels, dtype=np.int64)
    if n is not None and y.size != n:
        raise InvalidInputError(f"{path}: {y.size} labels for {n} samples")
    return y


def load_dataset(path, fmt="csv_dense", labels_path=None):
    """Load and rescale a dataset. Returns ``(X, labels_or_None)``."""
    if fmt == "csv_dense":
        X = read_csv_matrix(path)
    elif fmt == "idx_images":
        arr = read_idx(path)
        if arr.ndim < 2:
            raise InvalidInputError(f"{path}: image file needs at least 2 dimensions")
        X = arr.reshape(arr.shape[0], -1).astype(np.float64) / 255.0
    else:
        raise ConfigError(f"unknown dataset format {fmt!r}")
    if X.shape[0] < 2:
        raise InvalidInputError(f"{path}: need at least 2 samples")
    X = minmax_scale(X)
    y = read_labels(labels_path, X.shape[0]) if labels_path else None
    return X, y


@dataclass
class SyntheticSpec:
    generator: str = "gaussian_blobs"
    n: int = 300
    d: int = 2
    c: int = 3
    noise: float = 0.05
    seed: int = 0

    def validate(self):
        if self.generator not in GENERATORS:
            raise ConfigError(f"generator must be one of {GENERATORS}")
        if self.generator == "two_moons":
            if self.c != 2 or self.d != 2:
                raise ConfigError("two_moons is fixed at c=2, d=2")
            if self.n < 4:
                raise ConfigError("two_moons needs n >= 4")
        elif self.n < 2 * self.c or self.c < 1 or self.d < 1:
            raise ConfigError("gaussian_blobs needs n >= 2c, c >= 1, d >= 1")
        if self.noise < 0:
            raise ConfigError("noise must be >= 0")
        return self


def blob_centers(c, d, spacing=1.5):
    """Fixed centers with pairwise distances >= spacing."""
    if d == 1:
        return (np.arange(c) * spacing)[:, None]
    if c <= 2 * d:
        # +/- scaled basis vectors: pairwise distances are spacing or spacing * sqrt(2).
        C = np.zeros((c, d))
        for j in range(c):
            C[j, j // 2] = spacing / np.sqrt(2) * (1 if j % 2 == 0 else -1)
        return C
    # Grid layout in the first two coordinates.
    side = int(np.ceil(np.sqrt(c)))
    C = np.zeros((c, d))
    for j in range(c):
        C[j, 0], C[j, 1] = spacing * (j % side), spacing * (j // side)
    return C


def generate_synthetic(spec: SyntheticSpec):
    """Seeded synthetic data in raw coordinates. Returns ``(X, labels)``."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    if spec.generator == "gaussian_blobs":
        sizes = np.full(spec.c, spec.n // spec.c)
        sizes[: spec.n % spec.c] += 1
        y = np.repeat(np.arange(spec.c), sizes)
        X = blob_centers(spec.c, spec.d)[y] + spec.noise * rng.standard_normal((spec.n, spec.d))
        return X, y
    n_out = spec.n // 2
    n_in = spec.n - n_out
    t_out = np.linspace(0, np.pi, n_out)
    t_in = np.linspace(0, np.pi, n_in)
    outer = np.column_stack([np.cos(t_out), np.sin(t_out)])
    inner = np.column_stack([1 - np.cos(t_in), 0.5 - np.sin(t_in)])
    X = np.vstack([outer, inner]) + spec.noise * rng.standard_normal((spec.n, 2))
    y = np.repeat([0, 1], [n_out, n_in])
    return X, y


def atomic_write_text(path, text):
    """Write via a temporary file in the same directory, then rename into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def matrix_to_csv(X, header=None, fmt="%.17g"):
    lines = [",".join(header)] if header else []
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[:, None]
    for row in X:
        lines.append(",".join(fmt % v for v in row))
    return "\n".join(lines) + "\n"
