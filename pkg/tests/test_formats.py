import struct

import numpy as np
import pytest

from steerkit import filters, formats, harness
from steerkit.fields import SteerableField


def _field(rng):
    return SteerableField(3, (1, -2, 0), {0: harness.complex_gaussian(rng, (2, 3, 4, 1, 2)),
                                          2: harness.complex_gaussian(rng, (2, 3, 4, 5, 2))})


def test_field_roundtrip_and_layout(rng, tmp_path):
    f = _field(rng)
    path = tmp_path / "f.stfd"
    formats.write_field(path, f)
    g = formats.read_field(path)
    assert g.origin == f.origin and list(g.blocks) == [0, 2]
    assert all(np.array_equal(g.blocks[l], f.blocks[l]) for l in f.blocks)
    data = path.read_bytes()
    assert data[:5] == b"STFD1"
    assert struct.unpack_from("<I3q3QI", data, 5) == (3, 1, -2, 0, 2, 3, 4, 2)
    header = 5 + struct.calcsize("<I3q3QI") + 2 * 12
    assert len(data) == header + 16 * (24 * 2 + 24 * 10)
    first = np.frombuffer(data, "<c16", 1, header)[0]
    assert first == f.blocks[0][0, 0, 0, 0, 0]


def test_field_errors(rng):
    data = formats.field_bytes(_field(rng))
    with pytest.raises(formats.FormatError):
        formats.field_from_bytes(b"XXXXX" + data[5:])
    with pytest.raises(formats.FormatError):
        formats.field_from_bytes(data[:-3])
    with pytest.raises(formats.FormatError):
        formats.field_from_bytes(data + b"\0")


@pytest.mark.parametrize("dim,layer,kind,quad", [(2, "first", "linear", "uniform"), (2, "higher", "cartesian", "uniform"),
                                                 (3, "higher", "nearest", "dh"), (3, "first", "linear", "dh")])
def test_bank_roundtrip(tmp_path, dim, layer, kind, quad):
    bank = filters.precompute(dim, 2, 2, 8, 1.5, kind, layer, quad)
    path = tmp_path / "b.stfb"
    formats.write_bank(path, bank)
    back = formats.read_bank(path)
    for attr in ("dim", "cutoff", "n_r", "n_a", "h", "interp", "layer", "quadrature"):
        assert getattr(back, attr) == getattr(bank, attr)
    assert np.array_equal(back.offsets, bank.offsets)
    assert back.keys == bank.keys
    assert all(np.array_equal(back.table[k], bank.table[k]) for k in bank.keys)
    assert formats.bank_bytes(back) == path.read_bytes()


def test_bank_hash_detects_corruption():
    data = bytearray(formats.bank_bytes(filters.precompute(2, 1, 1, 8, 1.0)))
    data[60] ^= 1
    with pytest.raises(formats.FormatError, match="hash"):
        formats.bank_from_bytes(bytes(data))


def test_weights_roundtrip(rng, tmp_path):
    for layer, keys in (("first", [0, 1, 2]), ("higher", [(0, 1, -1), (2, 2, 0)])):
        w = {k: harness.complex_gaussian(rng, (2, 3, 4)) for k in keys}
        path = tmp_path / "w.stwt"
        formats.write_weights(path, w, 2, layer)
        back, dim, lay = formats.read_weights(path)
        assert dim == 2 and lay == layer and list(back) == keys
        assert all(np.array_equal(back[k], w[k]) for k in keys)
    data = bytearray(path.read_bytes())
    data[-40] ^= 4
    with pytest.raises(formats.FormatError):
        formats.weights_from_bytes(bytes(data))
    with pytest.raises(ValueError):
        formats.weights_bytes({0: np.zeros((1, 1, 1)), 1: np.zeros((2, 1, 1))}, 2, "first")
