"""Rigid motions SE(d) and the unitary irreps of SO(d).

Irreps follow the steerability convention Y^(l)(R s) = rho^(l)(R) Y^(l)(s)
for the unit-norm harmonics of steerkit.sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import sphere

TWO_PI = 2 * math.pi
_POLE_TOL = 1e-12


# ---------------------------------------------------------------------------
# rotations

def _cs(phi: float) -> tuple[float, float]:
    # snap so quarter turns map lattice points to lattice points exactly
    c, s = math.cos(phi), math.sin(phi)
    return tuple(float(round(v)) if abs(v - round(v)) < 1e-15 else v for v in (c, s))


def rot2(phi: float) -> np.ndarray:
    c, s = _cs(phi)
    return np.array([[c, -s], [s, c]])


def rot_z(a: float) -> np.ndarray:
    c, s = _cs(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(b: float) -> np.ndarray:
    c, s = _cs(b)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def euler_to_matrix(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """z-y-z Euler angles: R = Rz(alpha) Ry(beta) Rz(gamma)."""
    return rot_z(alpha) @ rot_y(beta) @ rot_z(gamma)


euler_zyz = euler_to_matrix


def normalize_euler(alpha: float, beta: float, gamma: float) -> tuple[float, float, float]:
    return matrix_to_euler(euler_to_matrix(alpha, beta, gamma))


def matrix_to_euler(R) -> tuple[float, float, float]:
    """Canonical z-y-z angles; beta in [0, pi], gamma = 0 at the poles."""
    R = np.asarray(R, dtype=float)
    sb = math.hypot(R[0, 2], R[1, 2])
    beta = math.atan2(sb, R[2, 2])
    if sb < _POLE_TOL:
        if R[2, 2] > 0:
            beta, alpha = 0.0, math.atan2(R[1, 0], R[0, 0])
        else:
            beta, alpha = math.pi, math.atan2(-R[0, 1], R[1, 1])
        gamma = 0.0
    else:
        alpha = math.atan2(R[1, 2], R[0, 2])
        gamma = math.atan2(R[2, 1], -R[2, 0])
    return alpha % TWO_PI, beta, gamma % TWO_PI


def is_rotation(R, tol: float = 1e-9) -> bool:
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        return False
    return bool(np.abs(R.T @ R - np.eye(R.shape[0])).max() < tol and abs(np.linalg.det(R) - 1) < tol)


# ---------------------------------------------------------------------------
# rigid motions

@dataclass(frozen=True, eq=False)
class RigidMotion:
    """x -> R x + t.

    The rotation is kept as an angle for d=2, canonical z-y-z Euler angles for
    d=3 and a raw matrix for d >= 4.
    """
    translation: np.ndarray
    rotation: object

    def __post_init__(self):
        t = np.array(self.translation, dtype=float).reshape(-1)
        t.setflags(write=False)
        object.__setattr__(self, "translation", t)
        d = t.shape[0]
        if d == 2:
            object.__setattr__(self, "rotation", float(self.rotation) % TWO_PI)
        elif d == 3:
            rot = self.rotation
            if np.shape(rot) == (3, 3):
                if not is_rotation(rot):
                    raise ValueError("not a rotation matrix")
                angles = matrix_to_euler(rot)
            else:
                angles = normalize_euler(*[float(v) for v in rot])
            object.__setattr__(self, "rotation", angles)
        elif d >= 4:
            R = np.array(self.rotation, dtype=float)
            if R.shape != (d, d) or not is_rotation(R):
                raise ValueError("not a rotation matrix of matching dimension")
            R.setflags(write=False)
            object.__setattr__(self, "rotation", R)
        else:
            raise ValueError("dimension must be at least 2")

    @property
    def dim(self) -> int:
        return self.translation.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        if self.dim == 2:
            return rot2(self.rotation)
        if self.dim == 3:
            return euler_to_matrix(*self.rotation)
        return np.array(self.rotation)

    def apply(self, x) -> np.ndarray:
        """Act on points x (..., d)."""
        return np.asarray(x, dtype=float) @ self.matrix.T + self.translation

    def __repr__(self):
        return f"RigidMotion(t={self.translation.tolist()}, rot={np.round(self.rotation, 6).tolist()})"


def identity(d: int) -> RigidMotion:
    return RigidMotion(np.zeros(d), 0.0 if d == 2 else (0.0, 0.0, 0.0) if d == 3 else np.eye(d))


def rotation(d: int, rot, center=None) -> RigidMotion:
    """Pure rotation about `center` (origin by default)."""
    g = RigidMotion(np.zeros(d), rot)
    if center is None:
        return g
    c = np.asarray(center, dtype=float)
    return RigidMotion(c - g.matrix @ c, g.rotation)


def translation(t) -> RigidMotion:
    t = np.asarray(t, dtype=float).reshape(-1)
    return RigidMotion(t, identity(t.size).rotation)


def _same_dim(g1: RigidMotion, g2: RigidMotion):
    if g1.dim != g2.dim:
        raise ValueError(f"dimension mismatch: {g1.dim} vs {g2.dim}")


def compose(g1: RigidMotion, g2: RigidMotion) -> RigidMotion:
    """(t1, R1)(t2, R2) = (t1 + R1 t2, R1 R2)."""
    _same_dim(g1, g2)
    R1 = g1.matrix
    t = g1.translation + R1 @ g2.translation
    if g1.dim == 2:
        return RigidMotion(t, g1.rotation + g2.rotation)
    return RigidMotion(t, R1 @ g2.matrix)


def inverse(g: RigidMotion) -> RigidMotion:
    Rinv = g.matrix.T
    t = -Rinv @ g.translation
    if g.dim == 2:
        return RigidMotion(t, -g.rotation)
    return RigidMotion(t, Rinv)


se_compose = compose
se_inverse = inverse


def motions_close(g1: RigidMotion, g2: RigidMotion, tol: float = 1e-9) -> bool:
    _same_dim(g1, g2)
    return bool(np.abs(g1.translation - g2.translation).max() <= tol
                and np.abs(g1.matrix - g2.matrix).max() <= tol)


# ---------------------------------------------------------------------------
# irreps

def irrep_so2(k: int, phi: float) -> complex:
    return complex(np.exp(1j * k * phi))


@lru_cache(maxsize=None)
def _small_d_terms(l: int):
    terms = []
    for mp in range(-l, l + 1):
        for m in range(-l, l + 1):
            pref = math.sqrt(math.factorial(l + mp) * math.factorial(l - mp)
                             * math.factorial(l + m) * math.factorial(l - m))
            for s in range(max(0, m - mp), min(l + m, l - mp) + 1):
                den = (math.factorial(l + m - s) * math.factorial(s)
                       * math.factorial(mp - m + s) * math.factorial(l - mp - s))
                terms.append((mp + l, m + l, (-1) ** (mp - m + s) * pref / den,
                              2 * l + m - mp - 2 * s, mp - m + 2 * s))
    return terms


def wigner_small_d(l: int, beta) -> np.ndarray:
    """Wigner d^l_{m'm}(beta), indices m', m = -l..l; shape (..., 2l+1, 2l+1)."""
    beta = np.asarray(beta, dtype=float)
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    out = np.zeros(beta.shape + (2 * l + 1, 2 * l + 1))
    for i, j, coef, pc, ps in _small_d_terms(l):
        out[..., i, j] += coef * c ** pc * s ** ps
    return out


def wigner_d(l: int, alpha, beta, gamma) -> np.ndarray:
    """rho^(l) for R = Rz(alpha) Ry(beta) Rz(gamma); broadcasts over angles."""
    alpha, beta, gamma = (np.asarray(v, dtype=float) for v in (alpha, beta, gamma))
    m = np.arange(-l, l + 1)
    ea = np.exp(1j * np.multiply.outer(alpha, m))
    eg = np.exp(1j * np.multiply.outer(gamma, m))
    d = np.swapaxes(wigner_small_d(l, beta), -1, -2)  # rho(Ry(b)) = d(-b) = d(b)^T
    return ea[..., :, None] * d * eg[..., None, :]


def irrep_general(d: int, l: int, R, n_samples: int | None = None, seed: int = 0, samples=None) -> np.ndarray:
    """rho^(l)(R) by least squares on Y(R s_i) = rho Y(s_i).

    The s_i are `samples` when given, else at least 2 dim random unit vectors.
    """
    R = np.asarray(R, dtype=float)
    dim = sphere.irrep_dim(d, l)
    if samples is None:
        n = max(n_samples or 0, 2 * dim, 8)
        s = np.random.default_rng(seed).normal(size=(n, d))
    else:
        s = np.asarray(samples, dtype=float)
    s = s / np.linalg.norm(s, axis=1, keepdims=True)
    A = sphere.harmonic_at(d, l, s)            # rows Y(s_i)^T
    B = sphere.harmonic_at(d, l, s @ R.T)      # rows Y(R s_i)^T
    X, _, rank, _ = np.linalg.lstsq(A, B, rcond=None)
    if rank < dim:
        raise np.linalg.LinAlgError(f"harmonic samples are rank deficient ({rank} < {dim})")
    return X.T


def irrep(d: int, l: int, rot) -> np.ndarray:
    """Irrep matrix of degree l for a rotation (angle, Euler triple, matrix or RigidMotion)."""
    if isinstance(rot, RigidMotion):
        rot = rot.rotation
    if d == 2:
        if np.shape(rot) == (2, 2):
            rot = math.atan2(rot[1][0], rot[0][0])
        return np.array([[irrep_so2(l, float(rot))]])
    if d == 3:
        angles = matrix_to_euler(rot) if np.shape(rot) == (3, 3) else rot
        return wigner_d(l, *angles)
    return irrep_general(d, l, rot)


# ---------------------------------------------------------------------------
# quadrature on SO(3)

@dataclass(frozen=True)
class SO3Quadrature:
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    weights: np.ndarray  # sums to one

    def __len__(self):
        return self.weights.shape[0]


@lru_cache(maxsize=None)
def so3_quadrature(n: int, rule: str = "dh") -> SO3Quadrature:
    """n^3 nodes in z-y-z angles approximating the normalized Haar measure.

    alpha and gamma are uniform; beta sits at pi(i+1/2)/n for the equiangular
    rules.  "dh" weights beta by sin(beta) times the Driscoll-Healy series
    (even n, exact for band limits below n/2); "midpoint" uses plain
    sin(beta), which only converges at O(n^-2); "gauss" takes Gauss-Legendre
    nodes in cos(beta), exact for band limits below n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if rule in ("dh", "midpoint"):
        beta = np.pi / n * (np.arange(n) + 0.5)
        if rule == "dh":
            if n % 2:
                raise ValueError("the dh rule needs an even n")
            wb = sphere.dh_weight(beta, n)
        else:
            wb = np.sin(beta)
    elif rule == "gauss":
        x, wb = np.polynomial.legendre.leggauss(n)
        beta = np.arccos(x)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    ag = TWO_PI / n * np.arange(n)
    A, B, G = np.meshgrid(ag, beta, ag, indexing="ij")
    W = np.broadcast_to(wb[None, :, None], A.shape).ravel()
    W = W / W.sum()
    arrays = [A.ravel(), B.ravel(), G.ravel(), W]
    for arr in arrays:
        arr.setflags(write=False)
    return SO3Quadrature(*arrays)
