import math

import numpy as np
import pytest

from steerkit import harness
from steerkit.fields import ScalarGridField

SMALL = dict(dim=2, cutoff=2, n_r=2, n_a=8, h=2.0, input_size=10, angle_count=8, n_seeds=2)


def test_config_parsing(tmp_path):
    cfg = harness.ScanConfig(interp="linear, cartesian")
    assert cfg.interp == ["linear", "cartesian"]
    with pytest.raises(ValueError):
        harness.ScanConfig.from_dict({"dimension": 2})
    with pytest.raises(ValueError):
        harness.ScanConfig(interp=["cubic"])
    with pytest.raises(ValueError):
        harness.ScanConfig(angle_count=0)
    path = tmp_path / "c.json"
    path.write_text('{"dim": 3, "cutoff": 0, "seed": 5, "n_seeds": 3}')
    cfg = harness.ScanConfig.from_json(path)
    assert cfg.dim == 3 and cfg.seeds == [5, 6, 7]


def test_build_model():
    cfg = harness.ScanConfig(**SMALL)
    a, b = harness.build_model(cfg, "linear", 3), harness.build_model(cfg, "linear", 3)
    assert all(np.array_equal(a.w_first[k], b.w_first[k]) for k in a.w_first)
    c = harness.build_model(cfg, "cartesian", 3)
    assert all(np.array_equal(a.w_higher[k], c.w_higher[k]) for k in a.w_higher)
    zero = ScalarGridField((0, 0), np.zeros((14, 14)))
    assert np.all(a(zero) == 0)


def test_3d_cutoff0_model():
    cfg = harness.ScanConfig(dim=3, cutoff=0, n_r=1, n_a=4, h=1.0, input_size=6)
    m = harness.build_model(cfg, "linear", 0)
    f = harness.make_input(cfg, 0, m.reach)
    assert m(f).shape == (1,)


def test_equivariance_error_identity_and_quarter_turn():
    cfg = harness.ScanConfig(**SMALL)
    m = harness.build_model(cfg, "linear", 0)
    f = harness.make_input(cfg, 0, m.reach)
    assert harness.equivariance_error(m, f, f) == 0
    rot = harness.rotate_field(f, 2, "z", math.pi / 2)
    assert harness.equivariance_error(m, f, rot) < 1e-6


def test_scan_rows_and_determinism():
    cfg = harness.ScanConfig(**SMALL, interp=["linear", "cartesian"])
    rows = harness.scan(cfg)
    assert len(rows) == 2 * 2 * 8
    assert [r[0] for r in rows[:8]] == [45.0 * i for i in range(8)]
    assert all(r[4] >= 0 for r in rows)
    assert all(r[4] == 0 for r in rows if r[0] == 0)
    assert all(r[4] < 1e-6 for r in rows if r[2] == "linear" and r[0] % 90 == 0)
    assert harness.rows_to_csv(rows, harness.SCAN_COLUMNS) == harness.rows_to_csv(harness.scan(cfg, 2), harness.SCAN_COLUMNS)


def test_scan_3d_axes():
    cfg = harness.ScanConfig(dim=3, cutoff=0, n_r=1, n_a=4, h=1.0, input_size=6, angle_count=4)
    rows = harness.scan(cfg)
    assert {r[1] for r in rows} == {"y", "z"}
    assert all(r[4] < 1e-6 for r in rows if r[1] == "z" and r[0] % 90 == 0)


def test_scan_is_continuous_in_angle():
    cfg = harness.ScanConfig(**dict(SMALL, angle_count=72, n_seeds=1))
    err = np.array([r[4] for r in harness.scan(cfg)])
    inner = [i for i in range(1, 71) if i % 18 not in (0, 1, 17)]
    for i in inner:
        assert err[i] <= 10 * np.median([err[i - 1], err[i + 1]]) + 1e-12


def test_rate_study_shape_and_summary():
    cfg = harness.ScanConfig(dim=2, cutoff=2, n_r=2, h=1.0, input_size=15, n_seeds=2,
                             interp=["linear", "nearest"], mask=False)
    rows = harness.rate_study(cfg, [8, 16])
    assert len(rows) == 2 * 2 * 2 and all(r[3] > 0 for r in rows)
    summary = harness.rate_summary(rows)
    assert set(summary) == {"linear", "nearest"}
    assert summary["linear"]["n_a"] == [8, 16] and math.isfinite(summary["linear"]["slope"])


def test_rate_doubling_envelope():
    cfg = harness.ScanConfig(dim=2, cutoff=2, n_r=2, h=1.0, input_size=21, n_seeds=5, interp=["linear"], mask=False)
    means = harness.rate_summary(harness.rate_study(cfg, [8, 16, 32, 64]))["linear"]["mean_error"]
    assert all(b <= 1.1 * a for a, b in zip(means, means[1:]))


def test_verify_all_passes():
    results = harness.verify()
    assert {r.name.split(".")[0] for r in results} == set(harness.SUITES)
    assert all(r.passed for r in results), [r.line() for r in results if not r.passed]
    with pytest.raises(ValueError):
        harness.verify("bogus")
