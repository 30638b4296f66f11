"""Equivariant pointwise layers acting on SteerableField."""

from __future__ import annotations

import numpy as np

from . import cg
from .fields import SteerableField

NORM_EPS = 1e-12


def cg_nonlinearity(f: SteerableField, eta: dict, n_a: int | None = None, cg_blocks=None) -> SteerableField:
    """Quadratic Clebsch-Gordan product, truncated at the input degrees.

    2D: out(k) = sum_k' eta[k, k'] f(k') f(k - k'), with k - k' reduced mod
    n_a when n_a is given.  3D: out(l) = sum eta[l, l1, l2] C^H (f(l1) (x) f(l2)).
    Products act channel-wise; missing eta entries count as zero.
    """
    degs = f.degrees
    out = {}
    if f.dim == 2:
        for k in degs:
            acc = np.zeros_like(f.blocks[k])
            for k1 in degs:
                k2 = k - k1 if n_a is None else (k - k1) % n_a
                if (k, k1) in eta and k2 in f.blocks:
                    acc = acc + eta[(k, k1)] * f.blocks[k1] * f.blocks[k2]
            out[k] = acc
    elif f.dim == 3:
        for l in degs:
            acc = np.zeros_like(f.blocks[l])
            for l1 in degs:
                for l2 in degs:
                    key = (l, l1, l2)
                    if key not in eta or not cg.triangle(*key):
                        continue
                    C = cg_blocks[key] if cg_blocks is not None else cg.cg_so3(*key)
                    a, b = f.blocks[l1], f.blocks[l2]
                    prod = (a[..., :, None, :] * b[..., None, :, :]).reshape(a.shape[:-2] + (-1, a.shape[-1]))
                    acc = acc + eta[key] * np.einsum("nm,...nc->...mc", C.conj(), prod)
            out[l] = acc
    else:
        raise NotImplementedError("the nonlinearity is defined for d=2 and d=3")
    return SteerableField(f.dim, f.origin, out)


def site_norm(f: SteerableField) -> np.ndarray:
    """sqrt(sum_rho |f(x, rho)|^2) per site and channel: (*shape, channels)."""
    sq = sum((np.abs(b) ** 2).sum(axis=-2) for b in f.blocks.values())
    return np.sqrt(sq)


def normalize(f: SteerableField, eps: float = NORM_EPS) -> SteerableField:
    """Divide each site and channel by its total norm; sites below eps pass through."""
    n = site_norm(f)
    scale = np.where(n < eps, 1.0, 1.0 / np.where(n < eps, 1.0, n))[..., None, :]
    return SteerableField(f.dim, f.origin, {l: b * scale for l, b in f.blocks.items()})


def avg_pool(f: SteerableField, window: int) -> SteerableField:
    """Mean over non-overlapping window^d blocks; window must divide the shape."""
    if window < 1:
        raise ValueError("window must be positive")
    d = f.dim
    if any(n % window for n in f.shape):
        raise ValueError(f"window {window} does not divide shape {f.shape}")
    out_shape = tuple(n // window for n in f.shape)
    blocks = {}
    for l, b in f.blocks.items():
        split = []
        for n in out_shape:
            split += [n, window]
        b = b.reshape(tuple(split) + b.shape[d:])
        blocks[l] = b.mean(axis=tuple(range(1, 2 * d, 2)))
    origin = tuple(int(np.floor_divide(o, window)) for o in f.origin)
    return SteerableField(d, origin, blocks)


def flatten_invariant(f: SteerableField) -> np.ndarray:
    """Per-channel invariant sqrt(sum_rho |mean_x f(x, rho)|^2)."""
    d = f.dim
    total = None
    for b in f.blocks.values():
        mean = b.mean(axis=tuple(range(d)))               # (d_rho, channels)
        sq = (np.abs(mean) ** 2).sum(axis=0)
        total = sq if total is None else total + sq
    return np.sqrt(total)
