"""Steerable convolution (valid cross-correlation) and its quadrature oracle."""

from __future__ import annotations

import math
import warnings

import numpy as np

from . import filters, interp, sphere
from .fields import ScalarGridField, SteerableField


def _as_steerable(f) -> SteerableField:
    if isinstance(f, ScalarGridField):
        return SteerableField.from_scalar(f)
    return f


def _valid_box(f: SteerableField, R: int):
    shape = tuple(n - 2 * R for n in f.shape)
    if min(shape) < 1:
        raise ValueError(f"input of shape {f.shape} is smaller than the filter support (radius {R})")
    return tuple(o + R for o in f.origin), shape


def _patches(block: np.ndarray, offs: np.ndarray, R: int, out_shape) -> np.ndarray:
    """Stack f(x + y) over offsets y: (n_offsets, *out_shape, d, c)."""
    sl = []
    for y in offs:
        sl.append(block[tuple(slice(R + int(v), R + int(v) + n) for v, n in zip(y, out_shape))])
    return np.stack(sl)


def correlate(f: SteerableField, kernels: dict, offs: np.ndarray) -> SteerableField:
    """f_pre(x, l) = sum_y sum_l1 K^(l, l1)(y) f(x + y, l1) on the valid region.

    Sums run over offsets in lexicographic order, then l1, then channels.
    """
    R = int(np.abs(offs).max())
    origin, shape = _valid_box(f, R)
    patches = {}
    out = {}
    for (l, l1), K in kernels.items():
        if l1 not in f.blocks:
            raise KeyError(f"input has no degree {l1}")
        if K.shape[3] != f.channels(l1):
            raise ValueError(f"kernel expects {K.shape[3]} input channels, field has {f.channels(l1)}")
        if l1 not in patches:
            patches[l1] = _patches(f.blocks[l1], offs, R, shape)
        term = np.einsum("o...na,omnab->...mb", patches[l1], K)
        out[l] = term if l not in out else out[l] + term
    return SteerableField(f.dim, origin, dict(sorted(out.items())))


def conv_first(f_in, bank: filters.FilterBank, weights: dict) -> SteerableField:
    if bank.layer != "first":
        raise ValueError("conv_first needs a first-layer bank")
    f = _as_steerable(f_in)
    if set(f.blocks) != {0}:
        raise ValueError("first layer input must be scalar")
    return correlate(f, filters.assemble_kernel(bank, weights), bank.offsets)


def conv_higher(f_in: SteerableField, bank: filters.FilterBank, weights: dict) -> SteerableField:
    if bank.layer != "higher":
        raise ValueError("conv_higher needs a higher-layer bank")
    kernels = {k: v for k, v in filters.assemble_kernel(bank, weights).items() if k[1] in f_in.blocks}
    return correlate(f_in, kernels, bank.offsets)


def oracle_rescale(dim: int, h: float) -> float:
    """Constant relating the shell weights w_r to the radial quadrature form."""
    return sphere.sphere_area(dim) / (2 * math.pi ** (dim - 1) * h ** dim)


def conv_oracle_first(f_in, weights: dict, cutoff: int, n_r: int, n_a: int, h: float,
                      kind: str = "linear", quadrature: str = "uniform") -> SteerableField:
    """First layer by per-site interpolation and a discrete transform per shell.

    Each shell contributes w_r * (h/n_r) * (r h/n_r)^(d-1) * c_r(l), where
    c_r(l) is the transform of the interpolated patch on that shell; the sum is
    scaled by oracle_rescale.
    """
    if kind == "cartesian":
        raise ValueError("the oracle covers interpolation filters only")
    f = _as_steerable(f_in)
    dim = f.dim
    R = filters.offset_radius(h)
    origin, shape = _valid_box(f, R)
    grid = sphere.angular_grid(dim, n_a, quadrature)
    scalar = ScalarGridField(f.origin, f.blocks[0][..., 0, :])
    box = ScalarGridField(origin, np.zeros(shape))
    xs = box.lattice_points().astype(float)
    kappa = oracle_rescale(dim, h)
    out = {}
    for r in range(1, n_r + 1):
        rad = r * h / n_r
        pts = xs[:, None, :] + rad * grid.points[None, :, :]          # (X, N, d)
        samples = interp.interp_eval(scalar, kind, pts)              # (X, N, c_in)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sphere.AliasingWarning)
            coeffs = sphere.sht(np.moveaxis(samples, 1, 0), grid, cutoff)
        radial = (h / n_r) * rad ** (dim - 1) * kappa
        for l in sphere.degrees(dim, cutoff):
            if l not in weights:
                continue
            w = np.asarray(weights[l])[r - 1]                        # (c_in, c_out)
            term = radial * np.einsum("mxa,ab->xmb", coeffs[l], w)
            out[l] = term if l not in out else out[l] + term
    blocks = {l: v.reshape(tuple(shape) + v.shape[1:]) for l, v in sorted(out.items())}
    return SteerableField(dim, origin, blocks)
