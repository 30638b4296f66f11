"""Command line entry point `steerkit`."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import conv, filters, formats, harness
from .fields import SteerableField


def _write_text(path, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def cmd_precompute(a) -> int:
    bank = filters.precompute(a.dim, a.cutoff, a.radial, a.angular, a.radius, a.interp, a.layer, a.quadrature)
    formats.write_bank(a.out, bank)
    return 0


def cmd_convolve(a) -> int:
    bank = formats.read_bank(a.filters)
    weights, dim, layer = formats.read_weights(a.weights)
    if dim != bank.dim or layer != bank.layer:
        raise SystemExit(f"weights are for dim={dim} layer={layer}, bank is dim={bank.dim} layer={bank.layer}")
    f = formats.read_field(a.input)
    out = (conv.conv_first if bank.layer == "first" else conv.conv_higher)(f, bank, weights)
    formats.write_field(a.out, out)
    return 0


def cmd_init_weights(a) -> int:
    bank = formats.read_bank(a.filters)
    rng = np.random.default_rng(a.seed)
    c_in = 1 if bank.layer == "first" else a.channels
    w = {k: harness.complex_gaussian(rng, (bank.n_r, c_in, a.channels)) for k in bank.keys}
    formats.write_weights(a.out, w, bank.dim, bank.layer)
    return 0


def cmd_random_field(a) -> int:
    rng = np.random.default_rng(a.seed)
    shape = tuple(_int_list(a.shape))
    values = rng.standard_normal(shape + (1, a.channels)).astype(complex)
    formats.write_field(a.out, SteerableField(len(shape), (0,) * len(shape), {0: values}))
    return 0


def _config(a) -> harness.ScanConfig:
    cfg = harness.ScanConfig.from_json(a.config)
    if a.workers is not None:
        cfg.workers = a.workers
    return cfg


def cmd_scan(a) -> int:
    cfg = _config(a)
    _write_text(a.out, harness.rows_to_csv(harness.scan(cfg), harness.SCAN_COLUMNS))
    return 0


def cmd_rate(a) -> int:
    cfg = _config(a)
    rows = harness.rate_study(cfg, _int_list(a.na))
    _write_text(a.out, harness.rows_to_csv(rows, harness.RATE_COLUMNS))
    if a.summary:
        print(json.dumps(harness.rate_summary(rows), indent=2))
    return 0


def cmd_check(a) -> int:
    results = harness.verify(a.suite)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steerkit", description="Steerable convolution toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("precompute", help="build a filter bank (STFB1)")
    s.add_argument("--dim", type=int, choices=(2, 3), required=True)
    s.add_argument("--cutoff", type=int, required=True)
    s.add_argument("--radial", type=int, required=True)
    s.add_argument("--angular", type=int, required=True)
    s.add_argument("--radius", type=float, required=True)
    s.add_argument("--interp", choices=filters.INTERP_KINDS, required=True)
    s.add_argument("--quadrature", choices=formats.QUADRATURES, default="uniform")
    s.add_argument("--layer", choices=filters.LAYER_KINDS, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_precompute)

    s = sub.add_parser("convolve", help="apply a bank and weights to a field (STFD1)")
    s.add_argument("--filters", required=True)
    s.add_argument("--weights", required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_convolve)

    s = sub.add_parser("init-weights", help="complex Gaussian weights for a bank (STWT1)")
    s.add_argument("--filters", required=True)
    s.add_argument("--channels", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_init_weights)

    s = sub.add_parser("random-field", help="Gaussian scalar field (STFD1)")
    s.add_argument("--shape", required=True, help="comma separated, e.g. 16,16")
    s.add_argument("--channels", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_random_field)

    for name, fn, help_ in (("scan", cmd_scan, "equivariance error over rotation angles"),
                            ("rate", cmd_rate, "single-layer error against n_a")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", required=True)
        s.add_argument("--out", required=True, help="CSV path or - for stdout")
        s.add_argument("--workers", type=int, default=None)
        if name == "rate":
            s.add_argument("--na", default="8,16,32,64")
            s.add_argument("--summary", action="store_true", help="print mean error and slope per filter")
        s.set_defaults(fn=fn)

    s = sub.add_parser("check", help="run the self-check suites")
    s.add_argument("--suite", choices=("all",) + harness.SUITES, default="all")
    s.set_defaults(fn=cmd_check)
    return p


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        return a.fn(a)
    except (ValueError, OSError, NotImplementedError) as e:
        print(f"steerkit: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
