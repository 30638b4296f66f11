"""Precomputed steerable filter bases.

A FilterBank holds, for every shell r = 1..n_r and every key, a stack of
matrices indexed by lattice offsets y with |y|_inf <= ceil(h) + 1.  First
layer keys are degrees l (matrices d_l x 1); higher layer keys are triples
(l, l1, l2) (matrices d_l x d_l1).  In 2D the third entry of a higher-layer
key is l - l1, which may be negative; on the angular grid its basis equals
the one of the residue [l - l1] mod n_a.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import cg, interp, sphere

INTERP_KINDS = ("nearest", "linear", "cartesian")
LAYER_KINDS = ("first", "higher")


def offset_radius(h: float) -> int:
    return int(math.ceil(h)) + 1


def offsets(dim: int, h: float) -> np.ndarray:
    R = offset_radius(h)
    out = np.array(list(itertools.product(range(-R, R + 1), repeat=dim)), dtype=np.int64)
    out.setflags(write=False)
    return out


def _offset_index(y: np.ndarray, R: int) -> np.ndarray:
    d = y.shape[-1]
    strides = (2 * R + 1) ** np.arange(d)[::-1]
    if np.abs(y).max(initial=0) > R:
        raise AssertionError("interpolation footprint leaves the offset box")
    return ((y + R) * strides).sum(-1)


@dataclass
class FilterBank:
    dim: int
    cutoff: int
    n_r: int
    n_a: int
    h: float
    interp: str
    layer: str
    quadrature: str
    offsets: np.ndarray
    table: dict = field(default_factory=dict)  # key -> (n_r, n_offsets, d_l, d_l1)

    @property
    def keys(self) -> list:
        return list(self.table)

    @property
    def n_degrees(self) -> int:
        return self.cutoff + 1


def _validate(dim, cutoff, n_r, n_a, h, kind, quadrature):
    if dim < 2:
        raise ValueError("dim must be at least 2")
    if dim > 3:
        raise NotImplementedError("filter banks are built for d=2 and d=3")
    if cutoff < 0 or n_r < 1 or n_a < 1 or not h > 0:
        raise ValueError("need cutoff >= 0, n_r >= 1, n_a >= 1 and h > 0")
    if kind not in INTERP_KINDS:
        raise ValueError(f"unknown interpolation kind {kind!r}")
    if quadrature not in ("uniform", "dh"):
        raise ValueError(f"unknown quadrature {quadrature!r}")
    if dim == 2 and kind != "cartesian" and cutoff >= n_a:
        warnings.warn(f"cutoff {cutoff} aliases with n_a={n_a}", sphere.AliasingWarning, stacklevel=3)


def _degree_dim(dim, l):
    return sphere.irrep_dim(dim, l)


def _interp_shells(dim, n_r, n_a, h, kind, quadrature, degs) -> dict:
    """M_r^(l)(y) for the listed degrees; arrays (n_r, n_offsets, d_l)."""
    grid = sphere.angular_grid(dim, n_a, quadrature)
    R = offset_radius(h)
    n_off = (2 * R + 1) ** dim
    Yw = {l: sphere.harmonic(dim, l, grid.theta) * grid.weights[:, None] for l in degs}
    out = {l: np.zeros((n_r, n_off, _degree_dim(dim, l)), dtype=complex) for l in degs}
    for r in range(1, n_r + 1):
        y, w = interp.footprint(kind, (r * h / n_r) * grid.points)
        k = _offset_index(y, R)                       # (N, K)
        scale = r ** (dim - 1) / (n_r ** dim * n_a ** (dim - 1))
        for l in degs:
            contrib = (w[..., None] * Yw[l][:, None, :]).reshape(-1, Yw[l].shape[1])
            np.add.at(out[l][r - 1], k.ravel(), contrib)
            out[l][r - 1] *= scale
    return out


def cartesian_tau(dim: int, n_r: int) -> list[float]:
    taus = [0.6] * n_r
    if dim == 2 and n_r > 1:
        taus[-1] = 0.4
    return taus


def _cartesian_shells(dim, n_r, h, degs, taus=None) -> dict:
    ys = offsets(dim, h).astype(float)
    norm = np.linalg.norm(ys, axis=1)
    nz = norm > 0
    taus = cartesian_tau(dim, n_r) if taus is None else taus
    out = {}
    for l in degs:
        Y = np.zeros((ys.shape[0], _degree_dim(dim, l)), dtype=complex)
        Y[nz] = sphere.harmonic_at(dim, l, ys[nz])
        shells = []
        for r in range(1, n_r + 1):
            radial = np.where(nz, np.exp(-(norm - r * h / n_r) ** 2 / (2 * taus[r - 1] ** 2)), 0.0)
            shells.append(radial[:, None] * Y)
        out[l] = np.stack(shells)
    return out


def _shells(dim, n_r, n_a, h, kind, quadrature, degs):
    if kind == "cartesian":
        return _cartesian_shells(dim, n_r, h, degs)
    return _interp_shells(dim, n_r, n_a, h, kind, quadrature, degs)


def basis_first(dim: int, cutoff: int, n_r: int, n_a: int, h: float, kind: str = "linear",
                quadrature: str = "uniform") -> FilterBank:
    """First-layer basis; the Cartesian kind ignores n_a and quadrature."""
    _validate(dim, cutoff, n_r, n_a, h, kind, quadrature)
    degs = sphere.degrees(dim, cutoff)
    shells = _shells(dim, n_r, n_a, h, kind, quadrature, degs)
    table = {l: shells[l][..., None] for l in degs}
    for v in table.values():
        v.setflags(write=False)
    return FilterBank(dim, cutoff, n_r, n_a, h, kind, "first", quadrature, offsets(dim, h), table)


def higher_keys(dim: int, cutoff: int) -> list[tuple[int, int, int]]:
    degs = sphere.degrees(dim, cutoff)
    if dim == 2:
        return [(k, k1, k - k1) for k in degs for k1 in degs]
    return [(l, l1, l2) for l in degs for l1 in degs for l2 in degs if cg.triangle(l, l1, l2)]


def basis_higher(dim: int, cutoff: int, n_r: int, n_a: int, h: float, kind: str = "linear",
                 quadrature: str = "uniform", cg_blocks=None) -> FilterBank:
    """Higher-layer basis; row m of a matrix is M^(l2)(y)^T Ctilde_m / |F|.

    The 1/|F| factor is dropped for Cartesian filters.
    """
    _validate(dim, cutoff, n_r, n_a, h, kind, quadrature)
    keys = higher_keys(dim, cutoff)
    shells = _shells(dim, n_r, n_a, h, kind, quadrature, sorted({k[2] for k in keys}))
    scale = 1.0 if kind == "cartesian" else 1.0 / (cutoff + 1)
    table = {}
    for key in keys:
        l, l1, l2 = key
        M = shells[l2]                                   # (n_r, n_off, d2)
        if dim == 2:
            T = scale * M[..., None]
        else:
            C = cg_blocks[key] if cg_blocks is not None else cg.cg_so3(*key)
            d1, d2 = _degree_dim(dim, l1), _degree_dim(dim, l2)
            Ct = np.stack([cg.cg_tilde(C, m, d1, d2) for m in range(C.shape[1])])  # (d, d2, d1)
            T = scale * np.einsum("roj,mjn->romn", M, Ct)
        T.setflags(write=False)
        table[key] = T
    return FilterBank(dim, cutoff, n_r, n_a, h, kind, "higher", quadrature, offsets(dim, h), table)


def precompute(dim, cutoff, n_r, n_a, h, kind="linear", layer="first", quadrature="uniform") -> FilterBank:
    if layer not in LAYER_KINDS:
        raise ValueError(f"unknown layer kind {layer!r}")
    fn = basis_first if layer == "first" else basis_higher
    return fn(dim, cutoff, n_r, n_a, h, kind, quadrature)


def basis_cartesian(dim: int, cutoff: int, n_r: int, h: float, layer: str = "first") -> FilterBank:
    return precompute(dim, cutoff, n_r, 1, h, "cartesian", layer)


def assemble_kernel(bank: FilterBank, weights: dict) -> dict:
    """K^(l, l1)(y) = sum_{l2, r} w_r M_r(y) with channels.

    weights[key] has shape (n_r, c_in, c_out); first-layer keys are degrees.
    Returns {(l, l1): array (n_offsets, d_l, d_l1, c_in, c_out)}.
    """
    kernels = {}
    for key, T in bank.table.items():
        if key not in weights:
            continue
        w = np.asarray(weights[key])
        if w.ndim != 3 or w.shape[0] != bank.n_r:
            raise ValueError(f"weights for {key} need shape (n_r, c_in, c_out)")
        out_key = (key, 0) if bank.layer == "first" else key[:2]
        K = np.einsum("romn,rab->omnab", T, w)
        kernels[out_key] = K if out_key not in kernels else kernels[out_key] + K
    return kernels


def rotate_kernel(kernel: np.ndarray, offs: np.ndarray, R: np.ndarray, kind: str = "linear") -> np.ndarray:
    """(R^-1 . K)(y) = sum_z K(z) I(R^-1 z, y) over the offset box.

    kernel has the offsets on its first axis; mass leaving the box is dropped.
    """
    Rr = int(np.abs(offs).max())
    d = offs.shape[1]
    strides = (2 * Rr + 1) ** np.arange(d)[::-1]
    y, w = interp.footprint(kind, offs.astype(float) @ np.asarray(R))   # rows are R^-1 z
    inside = np.all(np.abs(y) <= Rr, axis=-1)
    k = ((np.clip(y, -Rr, Rr) + Rr) * strides).sum(-1)
    out = np.zeros_like(kernel)
    src = np.repeat(np.arange(offs.shape[0]), y.shape[1])
    wf = (w * inside).ravel()
    np.add.at(out, k.ravel(), wf.reshape((-1,) + (1,) * (kernel.ndim - 1)) * kernel[src])
    return out


def steer_residual(kernels: dict, offs: np.ndarray, dim: int, rot, kind: str = "linear") -> float:
    """max |R^-1 . K^(l,l1) - rho(R) K^(l,l1) rho1(R)^H| over all kernel pairs."""
    from . import group_core
    R = group_core.RigidMotion(np.zeros(dim), rot).matrix
    worst = 0.0
    for (l, l1), K in kernels.items():
        D, D1 = group_core.irrep(dim, l, rot), group_core.irrep(dim, l1, rot)
        lhs = rotate_kernel(K, offs, R, kind)
        rhs = np.einsum("mn,onpab,qp->omqab", D, K, D1.conj())
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst
