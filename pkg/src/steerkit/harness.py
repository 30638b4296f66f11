"""Equivariance experiments: rotation scans, n_a rate studies, self-checks."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import conv, filters, group_core, interp, layers
from .fields import ScalarGridField

SCAN_COLUMNS = ("angle_deg", "axis", "filter", "seed", "error")
RATE_COLUMNS = ("n_a", "filter", "seed", "error")


@dataclass
class ScanConfig:
    dim: int = 2
    cutoff: int = 4
    n_r: int = 2
    n_a: int = 16
    h: float = 2.0
    interp: list = field(default_factory=lambda: ["linear"])
    input_size: int = 16
    angle_count: int = 72
    seed: int = 0
    n_seeds: int = 1
    channels: int = 1
    quadrature: str = "uniform"
    mask: bool = True
    rate_angle_deg: float = 30.0
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.interp, str):
            self.interp = [k.strip() for k in self.interp.split(",")]
        for k in self.interp:
            if k not in filters.INTERP_KINDS:
                raise ValueError(f"unknown filter kind {k!r}")
        if self.dim not in (2, 3):
            raise ValueError("experiments run in 2 or 3 dimensions")
        if self.angle_count < 1 or self.n_seeds < 1 or self.input_size < 1:
            raise ValueError("angle_count, n_seeds and input_size must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "ScanConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ScanConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @property
    def seeds(self) -> list[int]:
        return list(range(self.seed, self.seed + self.n_seeds))


# ---------------------------------------------------------------------------
# model

@lru_cache(maxsize=32)
def _bank(dim, cutoff, n_r, n_a, h, kind, layer, quadrature):
    return filters.precompute(dim, cutoff, n_r, n_a, h, kind, layer, quadrature)


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


@dataclass
class Model:
    """conv_first -> normalize -> conv_higher -> flatten_invariant."""
    first: filters.FilterBank
    higher: filters.FilterBank
    w_first: dict
    w_higher: dict

    @property
    def reach(self) -> int:
        return filters.offset_radius(self.first.h) + filters.offset_radius(self.higher.h)

    def features(self, f: ScalarGridField):
        a = layers.normalize(conv.conv_first(f, self.first, self.w_first))
        return conv.conv_higher(a, self.higher, self.w_higher)

    def __call__(self, f: ScalarGridField) -> np.ndarray:
        return layers.flatten_invariant(self.features(f))


def build_model(cfg: ScanConfig, kind: str, seed: int) -> Model:
    """Weights depend only on the seed, so every filter kind shares them."""
    b1 = _bank(cfg.dim, cfg.cutoff, cfg.n_r, cfg.n_a, cfg.h, kind, "first", cfg.quadrature)
    b2 = _bank(cfg.dim, cfg.cutoff, cfg.n_r, cfg.n_a, cfg.h, kind, "higher", cfg.quadrature)
    rng = np.random.default_rng([seed, 1])
    c = cfg.channels
    w1 = {k: complex_gaussian(rng, (cfg.n_r, 1, c)) for k in b1.keys}
    w2 = {k: complex_gaussian(rng, (cfg.n_r, c, c)) for k in b2.keys}
    return Model(b1, b2, w1, w2)


def make_input(cfg: ScanConfig, seed: int, pad: int) -> ScalarGridField:
    """Gaussian image on [0, n)^d, optionally cut to the inscribed ball, zero padded."""
    n, d = cfg.input_size, cfg.dim
    rng = np.random.default_rng([seed, 0])
    core = rng.standard_normal((n,) * d)
    if cfg.mask:
        c = (n - 1) / 2
        grids = np.meshgrid(*[np.arange(n)] * d, indexing="ij")
        core = core * (sum((g - c) ** 2 for g in grids) <= c * c + 1e-9)
    values = np.zeros((n + 2 * pad,) * d)
    values[(slice(pad, pad + n),) * d] = core
    return ScalarGridField((-pad,) * d, values)


def axis_rotation(dim: int, axis: str, angle: float):
    if dim == 2:
        return angle
    return {"z": (angle, 0.0, 0.0), "y": (0.0, angle, 0.0)}[axis]


def rotate_field(f: ScalarGridField, dim: int, axis: str, angle: float, kind: str = "linear") -> ScalarGridField:
    """(R f)(x) = I[f](R^-1 (x - c) + c) on the same box, c the box center."""
    g = group_core.rotation(dim, axis_rotation(dim, axis, angle), f.center())
    return interp.resample(f, kind if kind != "cartesian" else "linear", group_core.inverse(g), f.origin, f.shape)


def equivariance_error(model: Model, f: ScalarGridField, f_rot: ScalarGridField) -> float:
    """|M(R f) - M(f)|_inf / |f|_1."""
    return float(np.abs(model(f_rot) - model(f)).max() / np.abs(f.values).sum())


# ---------------------------------------------------------------------------
# scans

def scan_axes(dim: int) -> list[str]:
    return ["z"] if dim == 2 else ["y", "z"]


def _scan_seed(args):
    cfg, seed = args
    rows = []
    models = {k: build_model(cfg, k, seed) for k in cfg.interp}
    pad = max(m.reach for m in models.values())
    f = make_input(cfg, seed, pad)
    base = {k: m(f) for k, m in models.items()}
    norm1 = np.abs(f.values).sum()
    for axis in scan_axes(cfg.dim):
        for i in range(cfg.angle_count):
            deg = 360.0 * i / cfg.angle_count
            f_rot = rotate_field(f, cfg.dim, axis, math.radians(deg))
            for k, m in models.items():
                err = float(np.abs(m(f_rot) - base[k]).max() / norm1)
                rows.append((deg, axis, k, seed, err))
    return rows


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def scan(cfg: ScanConfig, workers: int | None = None) -> list[tuple]:
    """Rows (angle_deg, axis, filter, seed, error); order independent of workers."""
    parts = _map(_scan_seed, [(cfg, s) for s in cfg.seeds], cfg.workers if workers is None else workers)
    rows = [r for p in parts for r in p]
    rows.sort(key=lambda r: (r[1], cfg.interp.index(r[2]), r[3], r[0]))
    return rows


def rows_to_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# rate study

def _rate_one(args):
    cfg, n_a, kind, seed = args
    bank = _bank(cfg.dim, cfg.cutoff, cfg.n_r, n_a, cfg.h, kind, "first", cfg.quadrature)
    rng = np.random.default_rng([seed, 1])
    w = {k: complex_gaussian(rng, (cfg.n_r, 1, 1)) for k in bank.keys}
    R = filters.offset_radius(cfg.h)
    f = make_input(cfg, seed, 0)
    c = f.center()
    rot = axis_rotation(cfg.dim, "z", math.radians(cfg.rate_angle_deg))
    g = group_core.rotation(cfg.dim, rot, c)
    kernel = kind if kind != "cartesian" else "linear"
    out = conv.conv_first(f, bank, w)
    out_moved = conv.conv_first(interp.resample(f, kernel, g, f.origin, f.shape), bank, w)
    radius = (cfg.input_size - 1) / 2 - R - 2
    if radius < 0:
        raise ValueError("input too small for the filter radius")
    pts = ScalarGridField(out.origin, np.zeros(out.shape)).lattice_points()
    pts = pts[np.linalg.norm(pts - c, axis=1) <= radius + 1e-9]
    back_pts = group_core.inverse(g).apply(pts)
    err = 0.0
    for l, block in out.blocks.items():
        D = group_core.irrep(cfg.dim, l, rot)
        moved = interp.interp_eval(ScalarGridField(out_moved.origin, out_moved.blocks[l]), kernel, back_pts)
        ref = block[tuple((pts - np.asarray(out.origin)).T)]
        diff = np.einsum("mn,pnc->pmc", D, moved) - ref
        err = max(err, float(np.abs(diff).max()))
    return (n_a, kind, seed, err / np.abs(f.values).sum())


def rate_study(cfg: ScanConfig, n_as, workers: int | None = None) -> list[tuple]:
    """Equivariance error of one first-layer conv for a fixed rotation about the center.

    The error is sup_x |(t,R).[K * (t,R)^-1.f](x) - [K * f](x)| / |f|_1 over
    sites within the interior ball, with both resamplings done by the filter's
    own kernel (linear for Cartesian filters).
    """
    items = [(cfg, int(n), k, s) for k in cfg.interp for n in n_as for s in cfg.seeds]
    return _map(_rate_one, items, cfg.workers if workers is None else workers)


def rate_summary(rows) -> dict:
    """Mean error per (filter, n_a) and the log-log slope per filter."""
    out = {}
    for kind in dict.fromkeys(r[1] for r in rows):
        ns = sorted({r[0] for r in rows if r[1] == kind})
        means = [float(np.mean([r[3] for r in rows if r[1] == kind and r[0] == n])) for n in ns]
        slope = float(np.polyfit(np.log(ns), np.log(means), 1)[0]) if len(ns) > 1 else float("nan")
        out[kind] = {"n_a": ns, "mean_error": means, "slope": slope}
    return out


# ---------------------------------------------------------------------------
# self-checks

SUITES = ("cg", "sht", "steer", "delta", "oracle")


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    bound: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.value:.3e} ({self.bound})"


def _random_euler(rng, n):
    out = []
    for _ in range(n):
        q = rng.standard_normal(4)
        q /= np.linalg.norm(q)
        w, x, y, z = q
        R = np.array([[1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
                      [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
                      [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)]])
        out.append(group_core.matrix_to_euler(R))
    return out


def _check_cg(cg_provider, lmax=3, n_rot=20):
    from . import cg
    rng = np.random.default_rng(7)
    rots = _random_euler(rng, n_rot)
    inter, iso = 0.0, 0.0
    for l1 in range(lmax + 1):
        for l2 in range(lmax + 1):
            for l in range(abs(l1 - l2), l1 + l2 + 1):
                C = cg_provider(l, l1, l2)
                iso = max(iso, float(np.abs(C.conj().T @ C - np.eye(2 * l + 1)).max()))
                for a in rots:
                    lhs = np.kron(group_core.wigner_d(l1, *a), group_core.wigner_d(l2, *a)) @ C
                    inter = max(inter, float(np.abs(lhs - C @ group_core.wigner_d(l, *a)).max()))
    sel = all((cg.cg_so2(k, k1, k2)[0, 0] == 1.0) == (k == k1 + k2)
              for k in range(-3, 4) for k1 in range(-3, 4) for k2 in range(-3, 4))
    return [CheckResult("cg.so3_intertwiner", inter <= 1e-9, inter, "<= 1e-9"),
            CheckResult("cg.so3_isometry", iso <= 1e-9, iso, "<= 1e-9"),
            CheckResult("cg.so2_selection", sel, 0.0 if sel else 1.0, "exact")]


def _check_sht():
    import warnings
    from . import sphere
    rng = np.random.default_rng(3)
    grid = sphere.angular_grid(3, 10, "dh")
    coeffs = {l: complex_gaussian(rng, 2 * l + 1) for l in range(5)}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sphere.AliasingWarning)
        back = sphere.sht(sphere.isht(coeffs, 3, grid.theta), grid, 4)
    rt = max(float(np.abs(back[l] - coeffs[l]).max()) for l in coeffs)
    ident = so3_sht_residuals((24,))[0]
    return [CheckResult("sht.dh_roundtrip", rt < 1e-8, rt, "< 1e-8"),
            CheckResult("sht.so3_identity", ident < 1e-3, ident, "< 1e-3 at n=24")]


def sht_test_function(s: np.ndarray) -> np.ndarray:
    """exp(2 s.v): smooth on S^2 and not band limited."""
    v = np.array([0.3, -0.5, 0.81])
    return np.exp(2 * s @ (v / np.linalg.norm(v)))


def so3_sht_residuals(ns, lmax: int = 2) -> list[float]:
    """Worst so3_sht_check residual over 1 <= l <= lmax for each n."""
    from . import sphere
    e = (0.0, 0.0, 1.0)
    return [max(sphere.so3_sht_check(sht_test_function, l, e, n) for l in range(1, lmax + 1)) for n in ns]


def diagonal_restriction_residual(cutoff: int = 8, n_grid: int = 256, seed: int = 0) -> float:
    """Fourier transform of g -> f(g, g) on SO(2): brute-force DFT against the CG route.

    f on SO(2) x SO(2) has random coefficients a[k1, k2] for |k1|, |k2| <= cutoff.
    The CG route sums cg_decompose(a[k1, k2], C^(k, k1, k2)) over all (k1, k2).
    """
    from . import cg
    rng = np.random.default_rng(seed)
    ks = np.arange(-cutoff, cutoff + 1)
    a = complex_gaussian(rng, (ks.size, ks.size))
    t = 2 * np.pi * np.arange(n_grid) / n_grid
    f_diag = np.einsum("ij,ni,nj->n", a, np.exp(1j * np.outer(t, ks)), np.exp(1j * np.outer(t, ks)))
    worst = 0.0
    for k in range(-2 * cutoff, 2 * cutoff + 1):
        brute = np.mean(f_diag * np.exp(-1j * k * t))
        via_cg = sum(cg.cg_decompose(np.array([[a[i, j]]]), cg.cg_so2(k, k1, k2))[0, 0]
                     for i, k1 in enumerate(ks) for j, k2 in enumerate(ks))
        worst = max(worst, abs(brute - via_cg))
    return float(worst)


def _check_steer(cg_provider):
    results = []
    rng = np.random.default_rng(11)
    worst2 = 0.0
    for layer in ("first", "higher"):
        bank = filters.precompute(2, 4, 2, 16, 2.0, "linear", layer)
        w = {k: complex_gaussian(rng, (2, 1, 1)) for k in bank.keys}
        K = filters.assemble_kernel(bank, w)
        for q in (1, 2, 3):
            worst2 = max(worst2, filters.steer_residual(K, bank.offsets, 2, q * math.pi / 2))
    results.append(CheckResult("steer.2d_quarter_turns", worst2 <= 1e-9, worst2, "<= 1e-9"))
    blocks = {k: cg_provider(*k) for k in filters.higher_keys(3, 2)}
    bank = filters.basis_higher(3, 2, 2, 8, 2.0, "linear", cg_blocks=blocks)
    w = {k: complex_gaussian(rng, (2, 1, 1)) for k in bank.keys}
    K = filters.assemble_kernel(bank, w)
    worst3 = max(filters.steer_residual(K, bank.offsets, 3, (q * math.pi / 2, 0.0, 0.0)) for q in (1, 2, 3))
    results.append(CheckResult("steer.3d_z_quarter_turns", worst3 <= 1e-9, worst3, "<= 1e-9"))
    return results


def _check_delta():
    d_id = interp.delta("linear", group_core.identity(2))
    d_q = interp.delta("linear", group_core.rotation(2, math.pi / 2))
    d_h = interp.delta("linear", group_core.translation([0.5, 0.0]))
    return [CheckResult("delta.identity", d_id == 0.0, d_id, "== 0"),
            CheckResult("delta.quarter_turn", d_q < 1e-14, d_q, "< 1e-14"),
            CheckResult("delta.half_shift", d_h > 0.0, d_h, "> 0")]


def _check_oracle():
    rng = np.random.default_rng(5)
    bank = filters.basis_first(2, 2, 2, 16, 2.0, "linear")
    worst = 0.0
    for _ in range(3):
        f = ScalarGridField((0, 0), rng.standard_normal((8, 8)))
        w = {k: complex_gaussian(rng, (2, 1, 1)) for k in bank.keys}
        a = conv.conv_first(f, bank, w)
        b = conv.conv_oracle_first(f, w, 2, 2, 16, 2.0, "linear")
        for l in a.blocks:
            worst = max(worst, float(np.abs(a.blocks[l] - b.blocks[l]).max() / np.abs(b.blocks[l]).max()))
    return [CheckResult("oracle.first_layer", worst <= 1e-6, worst, "<= 1e-6 relative")]


def verify(suite: str = "all", cg_provider=None) -> list[CheckResult]:
    """Run named self-checks; cg_provider(l, l1, l2) replaces the CG blocks."""
    from . import cg
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    cg_provider = cg_provider or cg.cg_so3
    runners = {"cg": lambda: _check_cg(cg_provider), "sht": _check_sht,
               "steer": lambda: _check_steer(cg_provider), "delta": _check_delta, "oracle": _check_oracle}
    names = SUITES if suite == "all" else (suite,)
    return [r for name in names for r in runners[name]()]


# ---------------------------------------------------------------------------
# layer pipeline

def pipeline_descriptor(f: ScalarGridField, first, higher, w1, w2, eta, window: int) -> np.ndarray:
    """conv_first -> cg_nonlinearity -> normalize -> conv_higher -> avg_pool -> flatten_invariant."""
    a = layers.normalize(layers.cg_nonlinearity(conv.conv_first(f, first, w1), eta))
    return layers.flatten_invariant(layers.avg_pool(conv.conv_higher(a, higher, w2), window))


def pipeline_invariance_error(seed: int, size: int = 18, cutoff: int = 3, n_a: int = 16,
                              h: float = 2.0, channels: int = 2, window: int = 2) -> float:
    """max over quarter turns of |descriptor(R f) - descriptor(f)| in 2D."""
    first = _bank(2, cutoff, 2, n_a, h, "linear", "first", "uniform")
    higher = _bank(2, cutoff, 2, n_a, h, "linear", "higher", "uniform")
    rng = np.random.default_rng([seed, 2])
    w1 = {k: complex_gaussian(rng, (2, 1, channels)) for k in first.keys}
    w2 = {k: complex_gaussian(rng, (2, channels, channels)) for k in higher.keys}
    eta = {(k, k1): complex_gaussian(rng, ()) for k in range(cutoff + 1) for k1 in range(cutoff + 1)}
    f = ScalarGridField((0, 0), rng.standard_normal((size, size)))
    base = pipeline_descriptor(f, first, higher, w1, w2, eta, window)
    worst = 0.0
    for q in (1, 2, 3):
        moved = rotate_field(f, 2, "z", q * math.pi / 2)
        worst = max(worst, float(np.abs(pipeline_descriptor(moved, first, higher, w1, w2, eta, window) - base).max()))
    return worst
