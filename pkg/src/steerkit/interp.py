"""Interpolation kernels on Z^d, resampling and the kernel defect Delta."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .fields import ScalarGridField
from .group_core import RigidMotion

KINDS = ("nearest", "linear")


@dataclass(frozen=True)
class InterpSpec:
    kind: str = "linear"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown interpolation kind {self.kind!r}")


def _spec(spec) -> InterpSpec:
    return spec if isinstance(spec, InterpSpec) else InterpSpec(spec)


def footprint(spec, x) -> tuple[np.ndarray, np.ndarray]:
    """Lattice points and weights with I(x, y) != 0 possibly.

    x has shape (..., d); returns integer points (..., K, d) and weights (..., K).
    Nearest rounds half up on every axis.
    """
    spec = _spec(spec)
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    if spec.kind == "nearest":
        return np.floor(x + 0.5).astype(np.int64)[..., None, :], np.ones(x.shape[:-1] + (1,))
    base = np.floor(x)
    corners = np.array(list(itertools.product((0, 1), repeat=d)))
    y = base[..., None, :] + corners
    w = np.prod(np.clip(1 - np.abs(x[..., None, :] - y), 0.0, None), axis=-1)
    return y.astype(np.int64), w


def kernel_weight(spec, x, y) -> float:
    spec = _spec(spec)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if spec.kind == "nearest":
        return float(np.all(np.floor(x + 0.5) == y))
    return float(np.prod(np.clip(1 - np.abs(x - y), 0.0, None)))


def gather(field: ScalarGridField, points) -> np.ndarray:
    """Field values at integer points (..., d); zero outside the stored box."""
    points = np.asarray(points)
    idx = points - np.asarray(field.origin)
    inside = np.all((idx >= 0) & (idx < np.asarray(field.shape)), axis=-1)
    idx = np.where(inside[..., None], idx, 0)
    vals = field.values[tuple(np.moveaxis(idx, -1, 0))]
    mask = inside.reshape(inside.shape + (1,) * (vals.ndim - inside.ndim))
    return np.where(mask, vals, 0)


def interp_eval(field: ScalarGridField, spec, x) -> np.ndarray:
    """I[f](x) = sum_y I(x, y) f(y) at points x (..., d)."""
    y, w = footprint(spec, x)
    vals = gather(field, y)
    axis = w.ndim - 1
    w = w.reshape(w.shape + (1,) * (vals.ndim - w.ndim))
    return (w * vals).sum(axis=axis)


def resample(field: ScalarGridField, spec, motion: RigidMotion, origin=None, shape=None) -> ScalarGridField:
    """g(x) = I[f](R x + t) on a lattice box.

    Without an explicit box the output covers every x whose image lands
    within one lattice step of the input support.
    """
    d = field.dim
    if motion.dim != d:
        raise ValueError("motion and field dimensions differ")
    if origin is None or shape is None:
        lo = np.asarray(field.origin, dtype=float) - 1
        hi = lo + np.asarray(field.shape) + 1
        corners = np.array(list(itertools.product(*zip(lo, hi))))
        pre = (corners - motion.translation) @ motion.matrix  # R^T (p - t)
        origin = np.floor(pre.min(axis=0) + 1e-9).astype(int)
        shape = (np.ceil(pre.max(axis=0) - 1e-9).astype(int) - origin + 1)
    box = ScalarGridField(origin, np.zeros(tuple(int(s) for s in shape)))
    x = box.lattice_points()
    vals = interp_eval(field, spec, motion.apply(x))
    return ScalarGridField(box.origin, vals.reshape(tuple(box.shape) + field.values.shape[d:]))


def delta(spec, motion: RigidMotion, box_radius: int = 1, refinement: int = 32, chunk: int = 65536) -> float:
    """Estimate sup_x sup_y |I(g x, y) - sum_z I(x, z) I(g z, y)|.

    x runs over the refinement^d points j/refinement of every unit cell whose
    corner lies in [-box_radius, box_radius]^d.  Cells matter separately
    because R z is not a lattice point for general rotations.  The sample
    sets are nested under doubling of the refinement.
    """
    spec = _spec(spec)
    d = motion.dim
    if box_radius < 0 or refinement < 1:
        raise ValueError("box_radius must be >= 0 and refinement >= 1")
    cells = np.array(list(itertools.product(range(-box_radius, box_radius + 1), repeat=d)), dtype=float)
    u = np.array(list(itertools.product(range(refinement), repeat=d)), dtype=float) / refinement
    xs = (cells[:, None, :] + u[None, :, :]).reshape(-1, d)
    reach = int(math.ceil(math.sqrt(d))) + 1
    lo, width = -reach, 2 * reach + 2
    strides = width ** np.arange(d)[::-1]
    best = 0.0
    for start in range(0, xs.shape[0], chunk):
        x = xs[start:start + chunk]
        gx = motion.apply(x)
        ref = np.floor(gx).astype(np.int64)
        acc = np.zeros((x.shape[0], width ** d))
        rows = np.arange(x.shape[0])

        ya, wa = footprint(spec, gx)
        ka = ((ya - ref[:, None, :] - lo) * strides).sum(-1)
        np.add.at(acc, (np.repeat(rows, ka.shape[1]), ka.ravel()), wa.ravel())

        z, wz = footprint(spec, x)
        yb, wb = footprint(spec, motion.apply(z.astype(float)))
        kb = ((yb - ref[:, None, None, :] - lo) * strides).sum(-1)
        np.add.at(acc, (np.repeat(rows, kb.shape[1] * kb.shape[2]), kb.ravel()), -(wz[..., None] * wb).ravel())
        best = max(best, float(np.abs(acc).max()))
    return best
