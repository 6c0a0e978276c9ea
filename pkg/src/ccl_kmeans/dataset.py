"""Dataset loading, writing and the synthetic generators.

A dataset is a C-contiguous float64 array of shape (n, d) with finite values.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .rng import Rng


class ParseError(ValueError):
    """Raised when a dataset file cannot be parsed."""


def as_dataset(values) -> np.ndarray:
    """Validate ``values`` and return it as an (n, d) float64 C array."""
    X = np.ascontiguousarray(values, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"dataset must be a non-empty 2-D matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("dataset contains non-finite values")
    return X


def load_matrix(path: str | os.PathLike, delimiter: str = "auto") -> np.ndarray:
    """Read one point per line; '#' lines are comments.

    ``delimiter`` is ``"auto"``, ``"comma"`` or ``"whitespace"``. In auto mode
    a line containing a comma is split on commas, otherwise on whitespace.
    """
    if delimiter not in ("auto", "comma", "whitespace"):
        raise ValueError(f"unknown delimiter {delimiter!r}")
    rows = []
    width = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            use_comma = delimiter == "comma" or (delimiter == "auto" and "," in text)
            fields = [f.strip() for f in text.split(",")] if use_comma else text.split()
            try:
                row = [float(f) for f in fields]
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric field") from None
            if not all(math.isfinite(v) for v in row):
                raise ParseError(f"{path}:{lineno}: non-finite value")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ParseError(
                    f"{path}:{lineno}: expected {width} fields, found {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return as_dataset(rows)


def write_matrix(path: str | os.PathLike, X, delimiter: str = ",") -> None:
    # 17 significant digits round-trip every double exactly
    X = as_dataset(X)
    np.savetxt(path, X, fmt="%.17g", delimiter=delimiter)


def gen_uniform(n: int, d: int, lo: float, hi: float, rng: Rng) -> np.ndarray:
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    if not lo < hi:
        raise ValueError("lo must be < hi")
    X = lo + (hi - lo) * rng.floats(n * d).reshape(n, d)
    # rounding can land exactly on hi
    np.minimum(X, np.nextafter(hi, lo), out=X)
    return as_dataset(X)


def gen_grid_gaussians(
    n: int, grid: int, spacing: float, sigma: float, rng: Rng
) -> np.ndarray:
    """g*g isotropic Gaussians centred on a square lattice (the Birch layout).

    Point ``i`` belongs to center ``i % g**2``; center ``c`` sits at
    ``((c // g) * spacing, (c % g) * spacing)``.
    """
    if grid < 1:
        raise ValueError("grid must be >= 1")
    if n < grid * grid:
        raise ValueError(f"n={n} is smaller than the number of centers {grid * grid}")
    if sigma <= 0 or spacing <= 0:
        raise ValueError("sigma and spacing must be positive")
    labels = np.arange(n) % (grid * grid)
    centers = np.stack([labels // grid, labels % grid], axis=1) * float(spacing)
    return as_dataset(centers + sigma * rng.normals(2 * n).reshape(n, 2))


def circle_centers(k: int, r: float) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(k) / k
    return np.stack([r * np.cos(angles), r * np.sin(angles)], axis=1)


def gen_circle_gaussians(
    n: int, k: int, r: float, variance: float, rng: Rng
) -> np.ndarray:
    """k Gaussians at equal angles on a circle of radius ``r``.

    ``variance`` is per coordinate. Point ``i`` belongs to center ``i % k`` so
    any remainder of ``n / k`` goes to the first centers.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    if variance < 0:
        raise ValueError("variance must be >= 0")
    centers = circle_centers(k, r)[np.arange(n) % k]
    noise = math.sqrt(variance) * rng.normals(2 * n).reshape(n, 2)
    return as_dataset(centers + noise)
