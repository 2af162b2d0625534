"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 data error (bad or missing files,
shape mismatches).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .imagecore import FormatError, encode_pattern, load_pattern, load_pgm, save_pattern, save_pgm
from .jsde import JsdeParams
from .metrics import DEFAULT_MTF_FREQUENCIES, mtf_sweep, psnr, ssim
from .pipeline import reconstruct_any
from .sensorsim import Layout, NoiseParams, acquire, apply_noise, generate_pattern

EXIT_USAGE = 2
EXIT_DATA = 3

LAYOUT_NAMES = [layout.value for layout in Layout]
METRICS = {"psnr": psnr, "ssim": ssim}

log = logging.getLogger("nrsensor")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like WIDTHxHEIGHT, got {text!r}")
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError(f"size must be positive, got {text!r}")
    return w, h


def parse_layout(text: str) -> Layout:
    try:
        return Layout.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def parse_freqs(text: str) -> list[float]:
    try:
        freqs = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad frequency list {text!r}")
    if not freqs or any(not 0 < f <= 100 for f in freqs):
        raise argparse.ArgumentTypeError("frequencies must lie in (0, 100]")
    return freqs


def add_jsde_flags(p: argparse.ArgumentParser) -> None:
    d = JsdeParams()
    p.add_argument("--block", type=int, default=d.block_size, help="block size B (default %(default)s)")
    p.add_argument("--border", type=int, default=d.border, help="border width W (default %(default)s)")
    p.add_argument("--iters", type=int, default=d.iterations, help="iterations I (default %(default)s)")
    p.add_argument("--rho", type=float, default=d.rho, help="weight decay (default %(default)s)")
    p.add_argument("--gamma", type=float, default=d.gamma,
                   help="orthogonality deficiency compensation (default %(default)s)")
    p.add_argument("--workers", type=int, default=1, help="threads for block processing")


def jsde_params(args) -> JsdeParams:
    try:
        return JsdeParams(args.block, args.border, args.iters, args.rho, args.gamma)
    except ValueError as exc:
        raise UsageError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nrsensor",
        description="Simulate non-regular three-quarter sampling sensors and reconstruct with JSDE.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", help="write an NSP1 sampling pattern")
    p.add_argument("--layout", type=parse_layout, required=True, help=", ".join(LAYOUT_NAMES))
    p.add_argument("--size", type=parse_size, required=True, help="sensor size WxH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("simulate", help="simulate sensor output for a fine-grid image")
    p.add_argument("input", help="fine-grid PGM")
    p.add_argument("--layout", type=parse_layout, required=True, help=", ".join(LAYOUT_NAMES))
    p.add_argument("--pattern", help="NSP1 pattern (generated from --seed if omitted)")
    p.add_argument("--seed", type=int, default=0, help="pattern and noise seed")
    p.add_argument("--noise", action="store_true", help="add shot and readout noise")
    p.add_argument("--full-well", type=float, default=NoiseParams.full_well)
    p.add_argument("--readout-sigma", type=float, default=NoiseParams.readout_sigma)
    p.add_argument("--maxval", type=int, choices=(255, 65535), default=65535)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("reconstruct", help="reconstruct a fine-grid image from sensor output")
    p.add_argument("input", help="sensor PGM")
    p.add_argument("--algo", choices=("jsde", "mp", "pe", "bicubic"), default="jsde")
    p.add_argument("--pattern", help="NSP1 pattern (required for jsde and mp)")
    add_jsde_flags(p)
    p.add_argument("--maxval", type=int, choices=(255, 65535), default=65535)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("evaluate", help="print metrics as CSV")
    p.add_argument("reference")
    p.add_argument("test")
    p.add_argument("--metrics", default="psnr,ssim")

    p = sub.add_parser("mtf", help="contrast sweep over line-pattern frequencies")
    p.add_argument("--layout", type=parse_layout, required=True, help=", ".join(LAYOUT_NAMES))
    p.add_argument("--algo", choices=("jsde", "mp", "pe", "bicubic"), default="jsde")
    p.add_argument("--freqs", type=parse_freqs, default=list(DEFAULT_MTF_FREQUENCIES),
                   help="comma separated percentages (default %s)"
                        % ",".join(str(f) for f in DEFAULT_MTF_FREQUENCIES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=parse_size, default=(512, 512), help="fine-grid size WxH")
    add_jsde_flags(p)
    p.add_argument("-o", "--output", help="CSV path (stdout if omitted)")
    return parser


def _load_pgm(path):
    try:
        return load_pgm(path)
    except (OSError, FormatError) as exc:
        raise DataError(f"{path}: {exc}")


def _load_pattern(path):
    try:
        return load_pattern(path)
    except (OSError, FormatError) as exc:
        raise DataError(f"{path}: {exc}")


def cmd_pattern(args) -> None:
    w, h = args.size
    save_pattern(generate_pattern(args.layout, w, h, args.seed), args.output)


def cmd_simulate(args) -> None:
    img = _load_pgm(args.input)
    Y, X = img.shape
    if X % 2 or Y % 2:
        raise DataError(f"{args.input}: image dimensions {X}x{Y} must be even")
    if args.pattern:
        pattern = _load_pattern(args.pattern)
    else:
        pattern = generate_pattern(args.layout, X // 2, Y // 2, args.seed)
    try:
        sensor = acquire(img, pattern, args.layout)
    except ValueError as exc:
        raise DataError(str(exc))
    noise = None
    if args.noise:
        try:
            noise = NoiseParams(args.full_well, args.readout_sigma, True)
        except ValueError as exc:
            raise UsageError(str(exc))
        sensor = apply_noise(sensor, args.layout, noise, args.seed)
    save_pgm(sensor, args.output, args.maxval)
    sidecar = {
        "format": "nrsensor-sim/1",
        "input": str(args.input),
        "layout": args.layout.value,
        "pattern_file": str(args.pattern) if args.pattern else None,
        "pattern_sha256": hashlib.sha256(encode_pattern(pattern)).hexdigest(),
        "seed": args.seed,
        "noise": {
            "enabled": noise is not None,
            "full_well": args.full_well,
            "readout_sigma": args.readout_sigma,
        },
        "maxval": args.maxval,
    }
    Path(f"{args.output}.json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def cmd_reconstruct(args) -> None:
    params = jsde_params(args)
    if args.algo in ("jsde", "mp") and not args.pattern:
        raise UsageError(f"--pattern is required for --algo {args.algo}")
    sensor = _load_pgm(args.input)
    pattern = _load_pattern(args.pattern) if args.pattern else None
    try:
        out = reconstruct_any(sensor, args.algo, pattern, params, args.workers)
    except ValueError as exc:
        raise DataError(str(exc))
    save_pgm(out, args.output, args.maxval)


def format_value(v: float) -> str:
    return repr(float(v))


def cmd_evaluate(args) -> None:
    names = [m.strip().lower() for m in args.metrics.split(",") if m.strip()]
    unknown = [m for m in names if m not in METRICS]
    if unknown or not names:
        raise UsageError(f"unknown metric(s): {', '.join(unknown) or '(none)'}")
    ref = _load_pgm(args.reference)
    test = _load_pgm(args.test)
    if ref.shape != test.shape:
        raise DataError(f"image shapes differ: {ref.shape} vs {test.shape}")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["metric", "value"])
    for name in names:
        try:
            value = METRICS[name](ref, test)
        except ValueError as exc:
            raise DataError(str(exc))
        writer.writerow([name, format_value(value)])


def cmd_mtf(args) -> None:
    params = jsde_params(args)
    w, h = args.size
    if w % 2 or h % 2:
        raise UsageError("--size must be even in both directions")
    margin = params.block_size + params.border
    if min(w, h) <= 2 * margin:
        raise UsageError(f"--size must exceed twice the evaluation margin ({margin}) in both directions")
    points = mtf_sweep(args.layout, args.algo, args.freqs, args.seed, (w, h), params,
                       workers=args.workers)
    fh = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rel_freq", "contrast", "imax", "imin"])
        for pt in points:
            writer.writerow([format_value(pt.rel_freq), format_value(pt.contrast),
                             format_value(pt.imax), format_value(pt.imin)])
    finally:
        if args.output:
            fh.close()


COMMANDS = {
    "pattern": cmd_pattern,
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "evaluate": cmd_evaluate,
    "mtf": cmd_mtf,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"nrsensor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"nrsensor: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"nrsensor: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
