"""2D gradient (Perlin) noise.

Classic lattice-gradient construction: a seed-shuffled permutation table hashes
each integer lattice point to one of eight unit-ish gradients, corner
contributions are the dot products with the offset vectors, and a quintic fade
blends them. Values land in roughly [-1, 1] and are exactly zero-mean over the
gradient ensemble, so thresholding at 0 splits space about evenly.
"""

from __future__ import annotations

import numpy as np

from ..rng import RngKey

# Eight gradient directions: axis-aligned and diagonal (diagonals normalized).
_SQ2 = 1.0 / np.sqrt(2.0)
GRADIENTS = np.array(
    [
        (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0),
        (_SQ2, _SQ2), (-_SQ2, _SQ2), (_SQ2, -_SQ2), (-_SQ2, -_SQ2),
    ],
    dtype=np.float64,
)


def permutation_table(key: RngKey) -> np.ndarray:
    """Seed-derived permutation of 0..255, doubled to avoid index wrapping."""
    perm = key.generator().permutation(256)
    return np.concatenate([perm, perm]).astype(np.int64)


def _fade(t: np.ndarray) -> np.ndarray:
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def _corner_gradient(perm: np.ndarray, xi: np.ndarray, yi: np.ndarray) -> np.ndarray:
    h = perm[perm[xi & 255] + (yi & 255)] & 7
    return GRADIENTS[h]


def perlin(perm: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Noise values at (x, y) sample points (arrays broadcast together)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    fx = x - x0
    fy = y - y0

    g00 = _corner_gradient(perm, x0, y0)
    g10 = _corner_gradient(perm, x0 + 1, y0)
    g01 = _corner_gradient(perm, x0, y0 + 1)
    g11 = _corner_gradient(perm, x0 + 1, y0 + 1)

    d00 = g00[..., 0] * fx + g00[..., 1] * fy
    d10 = g10[..., 0] * (fx - 1.0) + g10[..., 1] * fy
    d01 = g01[..., 0] * fx + g01[..., 1] * (fy - 1.0)
    d11 = g11[..., 0] * (fx - 1.0) + g11[..., 1] * (fy - 1.0)

    u = _fade(fx)
    v = _fade(fy)
    nx0 = d00 + u * (d10 - d00)
    nx1 = d01 + u * (d11 - d01)
    return nx0 + v * (nx1 - nx0)


def perlin_grid(key: RngKey, height: int, width: int, scale: float) -> np.ndarray:
    """Noise sampled at cell centers of an H×W grid; `scale` is cells per
    lattice period."""
    perm = permutation_table(key)
    ys, xs = np.meshgrid(
        (np.arange(height) + 0.5) / scale,
        (np.arange(width) + 0.5) / scale,
        indexing="ij",
    )
    return perlin(perm, xs, ys)
