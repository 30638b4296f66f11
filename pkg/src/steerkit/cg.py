"""Clebsch-Gordan blocks for SO(2) and SO(3).

A block C for (rho, rho1, rho2) is a (d1*d2) x d_rho isometry with
(rho1 (x) rho2)(R) C = C rho(R); the Kronecker index is i1*d2 + i2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import sphere

_F = math.factorial


def cg_so2(k: int, k1: int, k2: int) -> np.ndarray:
    """1x1 block: one iff k = k1 + k2."""
    return np.array([[1.0 if k == k1 + k2 else 0.0]])


def triangle(l: int, l1: int, l2: int) -> bool:
    return abs(l1 - l2) <= l <= l1 + l2 and min(l, l1, l2) >= 0


def _racah(j1: int, m1: int, j2: int, m2: int, J: int) -> float:
    M = m1 + m2
    if abs(M) > J:
        return 0.0
    pref = Fraction((2 * J + 1) * _F(J + j1 - j2) * _F(J - j1 + j2) * _F(j1 + j2 - J), _F(j1 + j2 + J + 1))
    pref *= _F(J + M) * _F(J - M) * _F(j1 - m1) * _F(j1 + m1) * _F(j2 - m2) * _F(j2 + m2)
    total = Fraction(0)
    for k in range(0, j1 + j2 - J + 1):
        dens = (j1 + j2 - J - k, j1 - m1 - k, j2 + m2 - k, J - j2 + m1 + k, J - j1 - m2 + k)
        if min(dens) < 0:
            continue
        den = _F(k)
        for v in dens:
            den *= _F(v)
        total += Fraction((-1) ** k, den)
    if total == 0:
        return 0.0
    sign = 1.0 if total > 0 else -1.0
    return sign * math.sqrt(pref * total * total)


@lru_cache(maxsize=None)
def cg_so3(l: int, l1: int, l2: int) -> np.ndarray:
    """Block for rho^(l) inside rho^(l1) (x) rho^(l2), phase-fixed.

    The phase makes the first nonzero entry (row-major) real and positive.
    """
    if not triangle(l, l1, l2):
        raise ValueError(f"({l}, {l1}, {l2}) violates the triangle rule")
    d1, d2, d = 2 * l1 + 1, 2 * l2 + 1, 2 * l + 1
    C = np.zeros((d1 * d2, d))
    for m1 in range(-l1, l1 + 1):
        for m2 in range(-l2, l2 + 1):
            M = m1 + m2
            if abs(M) <= l:
                C[(m1 + l1) * d2 + (m2 + l2), M + l] = _racah(l1, m1, l2, m2, l)
    flat = C.ravel()
    first = flat[np.flatnonzero(np.abs(flat) > 1e-12)[0]]
    if first < 0:
        C = -C
    C = C.astype(complex)
    C.setflags(write=False)
    return C


def cg_block(d: int, l: int, l1: int, l2: int) -> np.ndarray:
    if d == 2:
        return cg_so2(l, l1, l2)
    if d == 3:
        return cg_so3(l, l1, l2)
    raise NotImplementedError("Clebsch-Gordan blocks are available for d=2 and d=3")


def cg_tilde(C: np.ndarray, m: int, d1: int, d2: int) -> np.ndarray:
    """d2 x d1 matrix with column-major vec equal to conj(C[:, m])."""
    return np.conj(C[:, m]).reshape((d1, d2)).T


def cg_decompose(A: np.ndarray, C: np.ndarray) -> np.ndarray:
    """(d1 d2 / d_rho) C^H A C: the rho-block of a tensor-product coefficient."""
    n, drho = C.shape
    return n / drho * (C.conj().T @ A @ C)


@dataclass
class CGTable:
    """All blocks with degrees up to `cutoff`, keyed by (l, l1, l2)."""
    dim: int
    cutoff: int
    blocks: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.blocks[key]

    def __contains__(self, key):
        return key in self.blocks

    def triples(self):
        return list(self.blocks)


def cg_table(dim: int, cutoff: int) -> CGTable:
    table = CGTable(dim, cutoff)
    ls = sphere.degrees(dim, cutoff)
    for l in ls:
        for l1 in ls:
            for l2 in ls:
                if dim == 2 and l == l1 + l2:
                    table.blocks[(l, l1, l2)] = cg_so2(l, l1, l2)
                elif dim == 3 and triangle(l, l1, l2):
                    table.blocks[(l, l1, l2)] = cg_so3(l, l1, l2)
    return table
