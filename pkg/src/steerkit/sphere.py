"""Hyperspherical coordinates, harmonics and quadrature on S^{d-1}.

Harmonics are stored in the unit-norm convention: the vector Y^(l)(s) has
Euclidean norm one at every point (degree 0 gives the constant 1).  The
L2-normalized harmonics differ by the factor sqrt(dim / area).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln


class AliasingWarning(UserWarning):
    pass


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere S^{d-1} in R^d."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def irrep_dim(d: int, l: int) -> int:
    """Dimension of the degree-l harmonic space on S^{d-1} (one for d=2)."""
    if d == 2:
        return 1
    if d < 2 or l < 0:
        raise ValueError("need d >= 2 and l >= 0")
    return (2 * l + d - 2) * math.factorial(l + d - 3) // (math.factorial(l) * math.factorial(d - 2))


def harmonic_dims(d: int, l: int) -> tuple[int, float]:
    """(dim H_d^(l), A(S^{d-1}))."""
    return irrep_dim(d, l), sphere_area(d)


def degrees(d: int, cutoff: int) -> list[int]:
    return list(range(cutoff + 1))


# ---------------------------------------------------------------------------
# coordinates

def sphere_point(theta, d: int) -> np.ndarray:
    """Map angles (..., d-1) to unit vectors (..., d).

    The last angle is the azimuth in the plane of the first two output axes.
    For d >= 3 the first polar angle is measured from the last output axis, so
    d=3 gives (sin t1 cos t2, sin t1 sin t2, cos t1).
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != d - 1:
        raise ValueError(f"expected {d - 1} angles, got {theta.shape[-1]}")
    if d == 2:
        return np.stack([np.cos(theta[..., 0]), np.sin(theta[..., 0])], axis=-1)
    g = np.empty(theta.shape[:-1] + (d,))
    prod = np.ones(theta.shape[:-1])
    for i in range(d - 1):
        g[..., i] = prod * np.cos(theta[..., i])
        prod = prod * np.sin(theta[..., i])
    g[..., d - 1] = prod
    return np.concatenate([g[..., 1:], g[..., :1]], axis=-1)


def sphere_angles(s, d: int | None = None) -> np.ndarray:
    """Inverse of sphere_point; s need not be normalized (must be nonzero)."""
    s = np.asarray(s, dtype=float)
    d = s.shape[-1] if d is None else d
    if d == 2:
        return np.mod(np.arctan2(s[..., 1], s[..., 0]), 2 * np.pi)[..., None]
    g = np.concatenate([s[..., -1:], s[..., :-1]], axis=-1)
    theta = np.empty(s.shape[:-1] + (d - 1,))
    tail = np.sqrt(np.cumsum(g[..., ::-1] ** 2, axis=-1)[..., ::-1])  # tail[i] = |g[i:]|
    for i in range(d - 2):
        theta[..., i] = np.arctan2(tail[..., i + 1], g[..., i])
    theta[..., d - 2] = np.mod(np.arctan2(g[..., d - 1], g[..., d - 2]), 2 * np.pi)
    return theta


# ---------------------------------------------------------------------------
# special functions

def gegenbauer(n: int, alpha: float, z) -> np.ndarray:
    """Gegenbauer polynomial C_n^(alpha)(z), alpha > 0.

    Explicit sum for n <= 8, three-term recurrence above that.
    """
    z = np.asarray(z, dtype=float)
    if n < 0:
        raise ValueError("n must be non-negative")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if n <= 8:
        out = np.zeros_like(z)
        for k in range(n // 2 + 1):
            c = (-1) ** k * math.exp(gammaln(n - k + alpha) - gammaln(alpha)
                                     - gammaln(k + 1) - gammaln(n - 2 * k + 1))
            out = out + c * (2 * z) ** (n - 2 * k)
        return out
    c_prev = np.ones_like(z)
    c_cur = 2 * alpha * z
    for m in range(2, n + 1):
        c_prev, c_cur = c_cur, (2 * z * (m + alpha - 1) * c_cur - (m + 2 * alpha - 2) * c_prev) / m
    return c_cur


def assoc_legendre(l: int, m: int, x) -> np.ndarray:
    """Ferrers function P_l^m(x) for 0 <= m <= l, Condon-Shortley phase included."""
    x = np.asarray(x, dtype=float)
    if not 0 <= m <= l:
        raise ValueError("need 0 <= m <= l")
    somx2 = np.sqrt(np.clip(1 - x * x, 0.0, None))
    pmm = np.ones_like(x)
    fact = 1.0
    for _ in range(m):
        pmm = -pmm * fact * somx2
        fact += 2.0
    if l == m:
        return pmm
    pmmp1 = x * (2 * m + 1) * pmm
    if l == m + 1:
        return pmmp1
    for ll in range(m + 2, l + 1):
        pmm, pmmp1 = pmmp1, (x * (2 * ll - 1) * pmmp1 - (ll + m - 1) * pmm) / (ll - m)
    return pmmp1


# ---------------------------------------------------------------------------
# harmonics

@lru_cache(maxsize=None)
def harmonic_index(d: int, l: int) -> tuple[tuple[int, ...], ...]:
    """Index chains (m_1=l >= m_2 >= ... >= |m_{d-1}|) in lexicographic order."""
    if d == 2:
        return ((l,),)

    def chains(prefix, depth):
        if depth == d - 1:
            yield prefix
            return
        top = prefix[-1]
        lo = -top if depth == d - 2 else 0
        for m in range(lo, top + 1):
            yield from chains(prefix + (m,), depth + 1)

    out = tuple(chains((l,), 1))
    assert len(out) == irrep_dim(d, l)
    return out


def _harmonic_l2_legendre(l: int, theta) -> np.ndarray:
    t, phi = theta[..., 0], theta[..., 1]
    x = np.cos(t)
    out = np.empty(theta.shape[:-1] + (2 * l + 1,), dtype=complex)
    for m in range(-l, l + 1):
        p = assoc_legendre(l, abs(m), x)
        if m > 0:  # P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m
            p = (-1) ** m * math.exp(gammaln(l - m + 1) - gammaln(l + m + 1)) * p
        lognorm = 0.5 * (gammaln(l + m + 1) - gammaln(l - m + 1))
        c = math.sqrt((2 * l + 1) / (4 * math.pi)) * math.exp(lognorm)
        out[..., m + l] = c * np.exp(1j * m * phi) * p
    return out


def _log_norm_const(d: int, chain: tuple[int, ...]) -> float:
    total = 0.0
    for j in range(1, d - 1):
        mj, mj1 = chain[j - 1], abs(chain[j])
        a = mj1 + (d - j - 1) / 2
        total += gammaln(a) + 0.5 * ((2 * mj1 + d - j - 3) * math.log(2) + math.log(2 * mj + d - j - 1)
                                     + gammaln(mj - mj1 + 1) - math.log(math.pi)
                                     - gammaln(mj + mj1 + d - j - 1))
    return total


def harmonic_l2_general(d: int, l: int, theta) -> np.ndarray:
    """L2-normalized harmonics through the Gegenbauer product formula (d >= 3)."""
    theta = np.asarray(theta, dtype=float)
    chains = harmonic_index(d, l)
    out = np.empty(theta.shape[:-1] + (len(chains),), dtype=complex)
    for idx, chain in enumerate(chains):
        val = np.exp(1j * chain[-1] * theta[..., d - 2]) / math.sqrt(2 * math.pi)
        for j in range(1, d - 1):
            mj, mj1 = chain[j - 1], abs(chain[j])
            t = theta[..., j - 1]
            val = val * np.sin(t) ** mj1 * gegenbauer(mj - mj1, mj1 + (d - j - 1) / 2, np.cos(t))
        out[..., idx] = math.exp(_log_norm_const(d, chain)) * val
    return out


def harmonic_l2(d: int, l: int, theta) -> np.ndarray:
    """L2-normalized harmonic vector at angles theta (..., d-1)."""
    theta = np.asarray(theta, dtype=float)
    if d == 2:
        return (np.exp(1j * l * theta[..., 0]) / math.sqrt(2 * math.pi))[..., None]
    if d == 3:
        return _harmonic_l2_legendre(l, theta)
    return harmonic_l2_general(d, l, theta)


def harmonic(d: int, l: int, theta) -> np.ndarray:
    """Unit-norm harmonic vector Y^(l) at angles theta (..., d-1)."""
    return harmonic_l2(d, l, theta) * math.sqrt(sphere_area(d) / irrep_dim(d, l))


def harmonic_at(d: int, l: int, s) -> np.ndarray:
    """Unit-norm harmonic vector at points s (..., d) on the sphere."""
    return harmonic(d, l, sphere_angles(s, d))


# ---------------------------------------------------------------------------
# quadrature

@dataclass(frozen=True)
class AngularGrid:
    d: int
    n_a: int
    scheme: str
    theta: np.ndarray    # (N, d-1)
    points: np.ndarray   # (N, d)
    weights: np.ndarray  # (N,) angular weight omega(theta)

    @property
    def size(self) -> int:
        return self.theta.shape[0]

    def integration_weights(self) -> np.ndarray:
        """Weights approximating the normalized surface measure."""
        return 2 * math.pi ** (self.d - 1) / (self.n_a ** (self.d - 1) * sphere_area(self.d)) * self.weights


def dh_weight(theta1, n_a: int) -> np.ndarray:
    theta1 = np.asarray(theta1, dtype=float)
    k = np.arange(n_a // 2)
    series = (np.sin(np.multiply.outer(theta1, 2 * k + 1)) / (2 * k + 1)).sum(axis=-1)
    return 4 / math.pi * np.sin(theta1) * series


@lru_cache(maxsize=None)
def angular_grid(d: int, n_a: int, scheme: str = "uniform") -> AngularGrid:
    """Tensor grid: polar angles pi(a+1/2)/n_a, azimuth 2 pi a/n_a, lexicographic."""
    if n_a < 1:
        raise ValueError("n_a must be positive")
    if scheme not in ("uniform", "dh"):
        raise ValueError(f"unknown quadrature scheme {scheme!r}")
    if scheme == "dh" and (d != 3 or n_a % 2):
        raise ValueError("Driscoll-Healy weights need d=3 and even n_a")
    polar = np.pi / n_a * (np.arange(n_a) + 0.5)
    azim = 2 * np.pi / n_a * np.arange(n_a)
    axes = [polar] * (d - 2) + [azim]
    mesh = np.meshgrid(*axes, indexing="ij")
    theta = np.stack([m.ravel() for m in mesh], axis=-1)
    if scheme == "dh":
        w = dh_weight(theta[:, 0], n_a)
    else:
        w = np.ones(theta.shape[0])
        for i in range(d - 2):
            w = w * np.sin(theta[:, i]) ** (d - 2 - i)
    for arr in (theta, w):
        arr.setflags(write=False)
    pts = sphere_point(theta, d)
    pts.setflags(write=False)
    return AngularGrid(d, n_a, scheme, theta, pts, w)


def sht(samples, grid: AngularGrid, lmax: int) -> dict[int, np.ndarray]:
    """Discrete transform c_l = int f Y^(l) dsigma on the grid.

    samples has shape (N, ...) matching grid nodes; the returned vectors have
    shape (dim_l, ...).  For d=2 the negative frequencies are included.
    """
    samples = np.asarray(samples)
    if samples.shape[0] != grid.size:
        raise ValueError("samples do not match the grid")
    if 2 * lmax + 2 > grid.n_a:
        warnings.warn(f"lmax={lmax} aliases on a grid with n_a={grid.n_a}", AliasingWarning, stacklevel=2)
    w = grid.integration_weights()
    ls = range(-lmax, lmax + 1) if grid.d == 2 else range(lmax + 1)
    out = {}
    for l in ls:
        Y = harmonic(grid.d, l, grid.theta) * w[:, None]
        out[l] = np.tensordot(Y, samples, axes=([0], [0]))
    return out


def isht(coeffs: dict[int, np.ndarray], d: int, theta) -> np.ndarray:
    """f(s) = sum_l dim_l Y^(l)(s)^H c_l, the inverse of sht."""
    theta = np.asarray(theta, dtype=float)
    total = None
    for l, c in coeffs.items():
        Y = harmonic(d, l, theta)
        term = irrep_dim(d, l) * np.tensordot(Y.conj(), c, axes=([-1], [0]))
        total = term if total is None else total + term
    return total


def so3_sht_check(f, l: int, e, n: int, rule: str = "dh", ref_n_a: int = 64) -> float:
    """max |sum_R w f(R e) rho(R) - c_l Y(e)^H| on S^2 with n^3 SO(3) nodes.

    f maps points (N, 3) to values (N,); c_l is its transform on a
    Driscoll-Healy grid of ref_n_a points per axis.
    """
    from . import group_core
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    ref = angular_grid(3, ref_n_a, "dh")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AliasingWarning)
        coef = sht(f(ref.points), ref, l)[l]
    q = group_core.so3_quadrature(n, rule)
    Re = np.stack([group_core.euler_to_matrix(a, b, g) @ e for a, b, g in zip(q.alpha, q.beta, q.gamma)])
    lhs = np.einsum("n,n,nij->ij", q.weights, f(Re), group_core.wigner_d(l, q.alpha, q.beta, q.gamma))
    return float(np.abs(lhs - np.outer(coef, harmonic_at(3, l, e).conj())).max())
