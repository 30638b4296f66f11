import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steerkit import group_core as gc
from steerkit import interp
from steerkit.fields import ScalarGridField

coord = st.floats(-5, 5, allow_nan=False)


def test_kernel_examples():
    assert interp.kernel_weight("linear", [2.0, 3.0], [2, 3]) == 1
    assert interp.kernel_weight("linear", [0.25], [0]) == 0.75
    assert interp.kernel_weight("linear", [0.25], [1]) == 0.25
    assert interp.kernel_weight("nearest", [0.5], [1]) == 1
    assert interp.kernel_weight("nearest", [0.5], [0]) == 0
    assert interp.kernel_weight("nearest", [-0.5], [0]) == 1


def test_unknown_kind():
    with pytest.raises(ValueError):
        interp.InterpSpec("cubic")


@pytest.mark.parametrize("kind", interp.KINDS)
@given(x=st.lists(coord, min_size=2, max_size=2), z=st.lists(st.integers(-4, 4), min_size=2, max_size=2))
def test_kernel_axioms(kind, x, z):
    x, z = np.array(x), np.array(z)
    y, w = interp.footprint(kind, x)
    assert abs(w.sum() - 1) < 1e-12 and np.all(w >= 0)
    y2, w2 = interp.footprint(kind, x + z)
    shifted = dict(zip(map(tuple, (y + z).tolist()), w))
    moved = dict(zip(map(tuple, y2.tolist()), w2))
    assert all(abs(shifted.get(k, 0) - moved.get(k, 0)) < 1e-9 for k in shifted.keys() | moved.keys())
    yl, wl = interp.footprint(kind, z.astype(float))
    assert wl[np.all(yl == z, axis=-1)].sum() == 1


@given(st.lists(st.tuples(coord, coord, st.integers(-6, 6), st.integers(-6, 6)), min_size=2, max_size=2))
def test_linear_holder(pairs):
    (a, b, _, _), (c, e, y0, y1) = pairs
    y = np.array([y0, y1])
    diff = abs(interp.kernel_weight("linear", [a, b], y) - interp.kernel_weight("linear", [c, e], y))
    assert diff <= 2 * np.abs(np.array([a - c, b - e])).max() + 1e-12


def test_interp_eval_examples(rng):
    f = ScalarGridField((0,), np.array([0.0, 1.0]))
    assert interp.interp_eval(f, "linear", np.array([[0.5]]))[0] == 0.5
    g = ScalarGridField((-3, 2), rng.standard_normal((6, 5)))
    pts = g.lattice_points()
    for kind in interp.KINDS:
        assert np.array_equal(interp.interp_eval(g, kind, pts), g.values.ravel())


def test_linear_reproduces_affine(rng):
    n = 12
    grid = np.stack(np.meshgrid(np.arange(n), np.arange(n), indexing="ij"), -1)
    a, b = 0.7, np.array([1.3, -2.1])
    f = ScalarGridField((0, 0), a + grid @ b)
    x = rng.uniform(0, n - 1, (1000, 2))
    assert np.abs(interp.interp_eval(f, "linear", x) - (a + x @ b)).max() < 1e-12


def test_interp_eval_trailing_axes(rng):
    f = ScalarGridField((0, 0), rng.standard_normal((5, 5, 3)))
    x = rng.uniform(0, 4, (7, 2))
    out = interp.interp_eval(f, "linear", x)
    assert out.shape == (7, 3)
    for c in range(3):
        assert np.allclose(out[:, c], interp.interp_eval(ScalarGridField((0, 0), f.values[..., c]), "linear", x))


def test_resample_examples(rng):
    f = ScalarGridField((0, 0), rng.standard_normal((6, 7)))
    same = interp.resample(f, "linear", gc.identity(2), f.origin, f.shape)
    assert np.array_equal(same.values, f.values)
    shifted = interp.resample(f, "linear", gc.translation([2.0, -1.0]))
    back = interp.interp_eval(shifted, "linear", f.lattice_points() - [2, -1])
    assert np.array_equal(back, f.values.ravel())
    rot = interp.resample(f, "linear", gc.rotation(2, math.pi / 2))
    assert sorted(rot.values[rot.values != 0]) == sorted(f.values[f.values != 0])
    x = rot.lattice_points()
    R = gc.rot2(math.pi / 2)
    assert np.array_equal(rot.values.ravel(), interp.interp_eval(f, "linear", x @ R.T))


@pytest.mark.parametrize("kind", interp.KINDS)
def test_delta_identity_and_integer_shift(kind):
    assert interp.delta(kind, gc.identity(2)) == 0
    assert interp.delta(kind, gc.translation([3.0, -1.0])) == 0


def test_delta_linear_quarter_turns():
    for q in (1, 2, 3):
        assert interp.delta("linear", gc.rotation(2, q * math.pi / 2)) < 1e-14
    assert interp.delta("linear", gc.rotation(3, (math.pi / 2, 0, 0))) < 1e-14


def test_delta_nearest_quarter_turn_hits_ties():
    # round-half-up is not symmetric under a quarter turn, so ties at
    # half-integer coordinates send mass to different lattice points
    assert interp.delta("nearest", gc.rotation(2, math.pi / 2)) == 1.0
    assert interp.delta("nearest", gc.rotation(2, math.pi)) == 1.0


def test_delta_regression_values():
    assert interp.delta("linear", gc.translation([0.5, 0.0])) == pytest.approx(0.5, abs=1e-12)
    d30 = interp.delta("linear", gc.rotation(2, math.pi / 6))
    assert d30 == pytest.approx(0.6837, abs=5e-4)


@pytest.mark.parametrize("motion", [gc.translation([0.5, 0.0]), gc.rotation(2, math.pi / 6),
                                    gc.RigidMotion([0.3, -0.2], 1.0)])
def test_delta_refinement_stable_and_monotone(motion):
    coarse = interp.delta("linear", motion, refinement=16)
    fine = interp.delta("linear", motion, refinement=32)
    assert fine >= coarse
    assert abs(fine - coarse) < 0.05 * fine


def test_resample_roundtrip_bound(rng):
    n = 16
    xs = np.stack(np.meshgrid(np.arange(n), np.arange(n), indexing="ij"), -1) - (n - 1) / 2
    f = ScalarGridField((0, 0), np.exp(-(xs ** 2).sum(-1) / 10))
    m = gc.rotation(2, 0.4, f.center())
    there = interp.resample(f, "linear", m)
    back = interp.resample(there, "linear", gc.inverse(m), f.origin, f.shape)
    err = np.abs(back.values - f.values).max()
    bound = 2 * (interp.delta("linear", m) + interp.delta("linear", gc.inverse(m))) * np.abs(f.values).sum()
    assert err <= bound
