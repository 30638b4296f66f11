"""Finitely supported fields on the lattice Z^d.

A field stores values on the box origin + [0, shape); it is zero elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import sphere


@dataclass
class ScalarGridField:
    origin: tuple
    values: np.ndarray  # spatial axes first, optional trailing axes

    def __post_init__(self):
        self.origin = tuple(int(v) for v in self.origin)
        self.values = np.asarray(self.values)

    @property
    def dim(self) -> int:
        return len(self.origin)

    @property
    def shape(self) -> tuple:
        return self.values.shape[:self.dim]

    def center(self) -> np.ndarray:
        return np.asarray(self.origin, dtype=float) + (np.asarray(self.shape) - 1) / 2

    def lattice_points(self) -> np.ndarray:
        grids = np.meshgrid(*[o + np.arange(n) for o, n in zip(self.origin, self.shape)], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)


@dataclass
class SteerableField:
    """Features f(x, rho) for each degree, stored as (*shape, d_rho, channels)."""
    dim: int
    origin: tuple
    blocks: dict = field(default_factory=dict)

    def __post_init__(self):
        self.origin = tuple(int(v) for v in self.origin)
        if len(self.origin) != self.dim:
            raise ValueError("origin does not match dim")
        shapes = {b.shape[:self.dim] for b in self.blocks.values()}
        if len(shapes) > 1:
            raise ValueError("blocks disagree on the spatial shape")
        for l, b in self.blocks.items():
            if b.ndim != self.dim + 2 or b.shape[self.dim] != sphere.irrep_dim(max(self.dim, 2), l):
                raise ValueError(f"block of degree {l} has shape {b.shape}")

    @property
    def shape(self) -> tuple:
        return next(iter(self.blocks.values())).shape[:self.dim]

    @property
    def degrees(self) -> list:
        return list(self.blocks)

    def channels(self, l=None) -> int:
        b = self.blocks[l] if l is not None else next(iter(self.blocks.values()))
        return b.shape[-1]

    def copy(self) -> "SteerableField":
        return SteerableField(self.dim, self.origin, {l: b.copy() for l, b in self.blocks.items()})

    @classmethod
    def from_scalar(cls, f: ScalarGridField) -> "SteerableField":
        v = f.values
        if v.ndim == f.dim:
            v = v[..., None]
        if v.ndim != f.dim + 1:
            raise ValueError("scalar field may have at most one channel axis")
        return cls(f.dim, f.origin, {0: v[..., None, :].astype(complex)})
