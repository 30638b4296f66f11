"""Little-endian binary formats.

STFD1  steerable field: u32 dim, i64 origin[dim], u64 shape[dim], u32 irrep
       count, per irrep (u32 degree, u32 irrep_dim, u32 channels), then the
       complex128 values ordered (irrep, spatial row-major, m, channel).
STFB1  filter bank: u32 dim, u32 cutoff, u32 n_r, u32 n_a, f64 h, u8 interp,
       u8 layer, u8 quadrature, u32 n_offsets, i64 offsets[n][dim], u32 n_keys,
       per key (u32 len, i32 entries[len], u32 rows, u32 cols), then complex128
       entries ordered (r, key, offset, row, col), then a sha256 of all
       preceding bytes.
STWT1  weights: u32 dim, u8 layer, u32 n_r, u32 c_in, u32 c_out, u32 n_keys,
       per key (u32 len, i32 entries[len]), complex128 values ordered
       (key, r, c_in, c_out), then a sha256 trailer.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from .fields import SteerableField
from .filters import INTERP_KINDS, LAYER_KINDS, FilterBank

FIELD_MAGIC = b"STFD1"
BANK_MAGIC = b"STFB1"
WEIGHTS_MAGIC = b"STWT1"
QUADRATURES = ("uniform", "dh")
C16 = np.dtype("<c16")


class FormatError(ValueError):
    pass


class _Reader:
    def __init__(self, data: bytes):
        self.data, self.pos = data, 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise FormatError("truncated file")
        out = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return out

    def array(self, count: int) -> np.ndarray:
        size = count * 16
        if self.pos + size > len(self.data):
            raise FormatError("truncated file")
        out = np.frombuffer(self.data, dtype=C16, count=count, offset=self.pos).astype(complex)
        self.pos += size
        return out


def _signed(data: bytes) -> bytes:
    return data + hashlib.sha256(data).digest()


def _check_signed(data: bytes) -> bytes:
    if len(data) < 32 or hashlib.sha256(data[:-32]).digest() != data[-32:]:
        raise FormatError("content hash mismatch")
    return data[:-32]


def _magic(r: _Reader, magic: bytes):
    if r.data[:len(magic)] != magic:
        raise FormatError(f"bad magic, expected {magic!r}")
    r.pos = len(magic)


def _key_tuple(key) -> tuple:
    return (key,) if isinstance(key, (int, np.integer)) else tuple(key)


def _key_back(entries: tuple, layer: str):
    return entries[0] if layer == "first" else tuple(entries)


# ---------------------------------------------------------------------------
# fields

def field_bytes(f: SteerableField) -> bytes:
    parts = [FIELD_MAGIC, struct.pack("<I", f.dim),
             struct.pack(f"<{f.dim}q", *f.origin), struct.pack(f"<{f.dim}Q", *f.shape),
             struct.pack("<I", len(f.blocks))]
    for l, b in f.blocks.items():
        parts.append(struct.pack("<III", l, b.shape[f.dim], b.shape[f.dim + 1]))
    for b in f.blocks.values():
        parts.append(np.ascontiguousarray(b, dtype=C16).tobytes())
    return b"".join(parts)


def field_from_bytes(data: bytes) -> SteerableField:
    r = _Reader(data)
    _magic(r, FIELD_MAGIC)
    (dim,) = r.take("<I")
    origin = r.take(f"<{dim}q")
    shape = r.take(f"<{dim}Q")
    (count,) = r.take("<I")
    heads = [r.take("<III") for _ in range(count)]
    blocks = {}
    n_sites = int(np.prod(shape))
    for l, d_l, ch in heads:
        blocks[l] = r.array(n_sites * d_l * ch).reshape(tuple(shape) + (d_l, ch))
    if r.pos != len(data):
        raise FormatError("trailing bytes")
    return SteerableField(dim, origin, blocks)


def write_field(path, f: SteerableField):
    with open(path, "wb") as fh:
        fh.write(field_bytes(f))


def read_field(path) -> SteerableField:
    with open(path, "rb") as fh:
        return field_from_bytes(fh.read())


# ---------------------------------------------------------------------------
# filter banks

def bank_bytes(bank: FilterBank) -> bytes:
    parts = [BANK_MAGIC,
             struct.pack("<IIIId", bank.dim, bank.cutoff, bank.n_r, bank.n_a, float(bank.h)),
             struct.pack("<BBB", INTERP_KINDS.index(bank.interp), LAYER_KINDS.index(bank.layer),
                         QUADRATURES.index(bank.quadrature)),
             struct.pack("<I", bank.offsets.shape[0]),
             np.ascontiguousarray(bank.offsets, dtype="<i8").tobytes(),
             struct.pack("<I", len(bank.table))]
    for key, T in bank.table.items():
        k = _key_tuple(key)
        parts.append(struct.pack(f"<I{len(k)}i", len(k), *k))
        parts.append(struct.pack("<II", T.shape[2], T.shape[3]))
    for r in range(bank.n_r):
        for T in bank.table.values():
            parts.append(np.ascontiguousarray(T[r], dtype=C16).tobytes())
    return _signed(b"".join(parts))


def bank_from_bytes(data: bytes) -> FilterBank:
    r = _Reader(_check_signed(data))
    _magic(r, BANK_MAGIC)
    dim, cutoff, n_r, n_a, h = r.take("<IIIId")
    ik, lk, qk = r.take("<BBB")
    try:
        kind, layer, quad = INTERP_KINDS[ik], LAYER_KINDS[lk], QUADRATURES[qk]
    except IndexError:
        raise FormatError("unknown enum code") from None
    (n_off,) = r.take("<I")
    offs = np.array(r.take(f"<{n_off * dim}q"), dtype=np.int64).reshape(n_off, dim)
    (n_keys,) = r.take("<I")
    heads = []
    for _ in range(n_keys):
        (klen,) = r.take("<I")
        entries = r.take(f"<{klen}i")
        rows, cols = r.take("<II")
        heads.append((_key_back(entries, layer), rows, cols))
    chunks = {key: [] for key, _, _ in heads}
    for _ in range(n_r):
        for key, rows, cols in heads:
            chunks[key].append(r.array(n_off * rows * cols).reshape(n_off, rows, cols))
    if r.pos != len(r.data):
        raise FormatError("trailing bytes")
    table = {key: np.stack(v) for key, v in chunks.items()}
    offs.setflags(write=False)
    for v in table.values():
        v.setflags(write=False)
    return FilterBank(dim, cutoff, n_r, n_a, h, kind, layer, quad, offs, table)


def write_bank(path, bank: FilterBank):
    with open(path, "wb") as fh:
        fh.write(bank_bytes(bank))


def read_bank(path) -> FilterBank:
    with open(path, "rb") as fh:
        return bank_from_bytes(fh.read())


# ---------------------------------------------------------------------------
# weights

def weights_bytes(weights: dict, dim: int, layer: str) -> bytes:
    first = next(iter(weights.values()))
    n_r, c_in, c_out = first.shape
    parts = [WEIGHTS_MAGIC, struct.pack("<IBIIII", dim, LAYER_KINDS.index(layer), n_r, c_in, c_out, len(weights))]
    for key in weights:
        k = _key_tuple(key)
        parts.append(struct.pack(f"<I{len(k)}i", len(k), *k))
    for w in weights.values():
        if w.shape != (n_r, c_in, c_out):
            raise ValueError("all weight tensors must share one shape")
        parts.append(np.ascontiguousarray(w, dtype=C16).tobytes())
    return _signed(b"".join(parts))


def weights_from_bytes(data: bytes) -> tuple[dict, int, str]:
    r = _Reader(_check_signed(data))
    _magic(r, WEIGHTS_MAGIC)
    dim, lk, n_r, c_in, c_out, n_keys = r.take("<IBIIII")
    layer = LAYER_KINDS[lk]
    keys = []
    for _ in range(n_keys):
        (klen,) = r.take("<I")
        keys.append(_key_back(r.take(f"<{klen}i"), layer))
    weights = {k: r.array(n_r * c_in * c_out).reshape(n_r, c_in, c_out) for k in keys}
    if r.pos != len(r.data):
        raise FormatError("trailing bytes")
    return weights, dim, layer


def write_weights(path, weights: dict, dim: int, layer: str):
    with open(path, "wb") as fh:
        fh.write(weights_bytes(weights, dim, layer))


def read_weights(path) -> tuple[dict, int, str]:
    with open(path, "rb") as fh:
        return weights_from_bytes(fh.read())
