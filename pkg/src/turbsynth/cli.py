"""Command-line interface.

Subcommands cover single-image degradation, video degradation, dataset
generation, MTF curve export, PSF export, and config statistics. Machine
output is one JSON object per line on stdout (mtf-curve without --out
streams CSV instead); diagnostics go to stderr. Exit codes: 0 success,
1 runtime failure, 2 bad usage or invalid config, 3 stats-invariant
violation (validate-stats only).

Units on the command line follow camera conventions: exposures in
milliseconds, lengths in meters, widths and displacements in pixels.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import fields, optics, pngio
from .config import ValidationError, load_config, require_valid
from .dataset import (DEFAULT_SPLIT_RATIO, DatasetError, generate_dataset)
from .degrade import build_psf_bank, degrade_video
from .grids import GridKind, SampledGrid, write_raster
from .sampler import apply_overrides, parse_override, sample_config

log = logging.getLogger("turbsynth")


def _add_config_opts(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("optical config (either --config or --seed)")
    g.add_argument("--config", metavar="JSON",
                   help="config file; exposure under exposure_ms (milliseconds)")
    g.add_argument("--seed", type=int,
                   help="sample a config from the built-in table with this seed")
    g.add_argument("--row", type=int, default=None,
                   help="pin the table row (0-11) when sampling")
    g.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE",
                   help="override a config field after loading/sampling; "
                        "repeatable (e.g. --set exposure_ms=40)")


def _resolve_config(args):
    overrides = dict(parse_override(s) for s in args.overrides)
    if args.config and args.seed is not None:
        raise ValidationError("give --config or --seed, not both")
    if args.config:
        cfg = load_config(args.config)
        if overrides:
            cfg = require_valid(apply_overrides(cfg, overrides))
        return cfg
    if args.seed is not None:
        cfg, row = sample_config(args.seed, row_index=args.row,
                                 overrides=overrides or None)
        log.info("sampled config from table row %d", row)
        return cfg
    raise ValidationError("an optical config is required: pass --config or --seed")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _add_degrade_opts(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("degradation")
    g.add_argument("--degrade-seed", type=int, default=0,
                   help="seed for the degradation fields (default 0)")
    g.add_argument("--noise-k", type=float, default=0.0,
                   help="exposure-noise scale; sigma = k/sqrt(exposure_ms). "
                        "0 disables noise (default)")
    g.add_argument("--k-bins", type=int, default=16,
                   help="PSF bank size (default 16)")
    g.add_argument("--blur-corr", type=float, default=32.0,
                   help="blur-width field correlation length, px (default 32)")
    g.add_argument("--tilt-sigma", type=float, default=None,
                   help="tilt displacement std, px (default: derived from config)")
    g.add_argument("--tilt-corr", type=float, default=None,
                   help="tilt correlation length, px (default: derived)")


def _degrade_kwargs(args) -> dict:
    return dict(noise_k=args.noise_k, k_bins=args.k_bins,
                blur_correlation_length=args.blur_corr,
                tilt_sigma=args.tilt_sigma,
                tilt_correlation_length=args.tilt_corr)


def cmd_synth_image(args) -> int:
    cfg = _resolve_config(args)
    img = pngio.read_image(args.image)
    results = degrade_video([img], cfg, args.degrade_seed, **_degrade_kwargs(args))
    out = {}
    prefix = args.out_prefix
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    pngio.write_image(f"{prefix}_gt.png", img)
    out["gt"] = f"{prefix}_gt.png"
    for kind, data in results[0].items():
        path = f"{prefix}_{kind}.png"
        pngio.write_image(path, data)
        out[kind] = path
    _emit({"command": "synth-image", "outputs": out,
           "stats": optics.turbulence_stats(cfg).to_dict()})
    return 0


def cmd_synth_video(args) -> int:
    cfg = _resolve_config(args)
    src = Path(args.input)
    if src.is_dir():
        paths = sorted(src.glob("*.png"))
        if not paths:
            raise ValidationError(f"no PNG frames under {src}")
        frames = [pngio.read_image(p) for p in paths]
        if args.frames is not None:
            frames = frames[:args.frames]
    else:
        n = args.frames if args.frames is not None else 16
        frames = [pngio.read_image(src)] * n
    prefix = args.out_prefix
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    results, views = degrade_video(frames, cfg, args.degrade_seed,
                                   return_fields=True, **_degrade_kwargs(args))
    for i, (clean, res) in enumerate(zip(frames, results)):
        pngio.write_image(f"{prefix}_gt_{i:06d}.png", clean)
        for kind, data in res.items():
            pngio.write_image(f"{prefix}_{kind}_{i:06d}.png", data)
        if args.dump_fields:
            v = views[i]
            write_raster(SampledGrid(v["width"], kind=GridKind.BLUR_WIDTH),
                         f"{prefix}_width_{i:06d}.ettf")
            write_raster(SampledGrid(v["tilt_dx"], kind=GridKind.DISPLACEMENT_X),
                         f"{prefix}_tiltx_{i:06d}.ettf")
            write_raster(SampledGrid(v["tilt_dy"], kind=GridKind.DISPLACEMENT_Y),
                         f"{prefix}_tilty_{i:06d}.ettf")
    _emit({"command": "synth-video", "n_frames": len(frames), "prefix": prefix,
           "dumped_fields": bool(args.dump_fields),
           "stats": optics.turbulence_stats(cfg).to_dict()})
    return 0


def cmd_gen_dataset(args) -> int:
    overrides = dict(parse_override(s) for s in args.overrides)
    manifest = generate_dataset(
        args.source, args.out, args.seed, split_ratio=args.split_ratio,
        workers=args.workers, resume=args.resume, noise_k=args.noise_k,
        config_row=args.row, overrides=overrides or None)
    _emit({"command": "gen-dataset", "out": str(args.out),
           "n_sequences": manifest["n_sequences"],
           "n_train": manifest["n_train"], "n_test": manifest["n_test"],
           "n_failed": manifest["n_failed"]})
    if manifest["n_failed"]:
        for rec in manifest["sequences"]:
            if rec["status"] != "ok":
                log.error("sequence %s failed: %s", rec["id"], rec["error"])
        return 1
    return 0


def cmd_mtf_curve(args) -> int:
    cfg = _resolve_config(args)
    xi_px = np.linspace(0.0, 0.5, args.samples)
    # cycles/px * (px per radian of field angle) = cycles/radian
    xi_ang = xi_px * cfg.focal_length / cfg.pixel_pitch
    taus_ms = args.exposures_ms if args.exposures_ms else [cfg.exposure_ms]
    header = ["xi_cycles_per_px", "mtf_short", "mtf_long"]
    cols = [xi_px,
            optics.mtf_short_exposure(cfg, xi_ang).data[0],
            optics.mtf_long_exposure(cfg, xi_ang).data[0]]
    for ms in taus_ms:
        tau = ms * 1e-3
        w = optics.mean_blur_width(cfg, tau=tau).px
        header.append(f"mtf_finite_{ms:g}ms")
        cols.append(optics.mtf_finite_exposure_profile(cfg, w, xi_px, tau=tau))
    rows = zip(*cols)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(header)
            wr.writerows([f"{v:.9g}" for v in row] for row in rows)
        _emit({"command": "mtf-curve", "out": args.out,
               "samples": args.samples, "exposures_ms": list(taus_ms)})
    else:
        wr = csv.writer(sys.stdout)
        wr.writerow(header)
        wr.writerows([f"{v:.9g}" for v in row] for row in rows)
    return 0


def cmd_psf_dump(args) -> int:
    cfg = _resolve_config(args)
    tau = args.tau_ms * 1e-3 if args.tau_ms is not None else None
    width = args.width_px
    if width is None:
        width = optics.mean_blur_width(cfg, tau=tau).px
    if args.size % 2 == 0:
        raise ValidationError(f"--size must be odd, got {args.size}")
    mtf = optics.mtf_finite_exposure(cfg, width, (args.size, args.size), tau=tau)
    psf = optics.psf_from_mtf(mtf)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_raster(psf, args.out)
    info = {"command": "psf-dump", "out": args.out, "support": args.size,
            "width_px": width, "fwhm_px": optics.psf_fwhm(psf),
            "short_exposure_gain": optics.short_exposure_gain_from_width(
                cfg, width * cfg.pixel_pitch, tau)}
    if args.mtf_out:
        write_raster(mtf, args.mtf_out)
        info["mtf_out"] = args.mtf_out
    if args.png:
        data = psf.data
        pngio.write_image(args.png, data / data.max())
        info["png"] = args.png
    _emit(info)
    return 0


def cmd_validate_stats(args) -> int:
    cfg = _resolve_config(args)
    stats = optics.turbulence_stats(cfg)
    d = stats.to_dict()
    violations = []
    if not (math.isfinite(stats.fried_r0) and stats.fried_r0 > 0):
        violations.append("coherence diameter must be positive and finite")
    if stats.short_exposure_gain < 1.0:
        violations.append("short-exposure gain must be >= 1")
    if not (stats.mean_blur_width_px > 0):
        violations.append("mean blur width must be positive")
    if stats.std_blur_width_px <= 0:
        violations.append("blur-width spread is degenerate (std <= 0)")
    elif stats.std_blur_width_px >= stats.mean_blur_width_px:
        violations.append("blur-width std must stay below the mean")
    d["violations"] = violations
    d["valid"] = not violations
    _emit(d)
    if violations:
        for v in violations:
            log.error("%s", v)
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="turbsynth",
        description="Physics-based atmospheric turbulence synthesis. "
                    "Exposures are given in milliseconds, lengths in meters, "
                    "widths and displacements in pixels.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-image", help="degrade one image",
                       description="Degrade a single PNG; writes "
                                   "<prefix>_{gt,tilt,blur,turb}.png.")
    p.add_argument("image", help="input PNG")
    p.add_argument("--out-prefix", required=True)
    _add_config_opts(p)
    _add_degrade_opts(p)
    p.set_defaults(func=cmd_synth_image)

    p = sub.add_parser("synth-video", help="degrade a frame sequence",
                       description="Degrade a directory of PNG frames (or "
                                   "replicate one still); writes "
                                   "<prefix>_<kind>_<frame>.png with "
                                   "temporally coherent fields.")
    p.add_argument("input", help="frame directory or a single PNG")
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--frames", type=int, default=None,
                   help="frame count (defaults to all, or 16 for a still)")
    p.add_argument("--dump-fields", action="store_true",
                   help="also write per-frame width/tilt fields as .ettf rasters")
    _add_config_opts(p)
    _add_degrade_opts(p)
    p.set_defaults(func=cmd_synth_video)

    p = sub.add_parser("gen-dataset", help="batch-degrade a sequence corpus",
                       description="Degrade every sequence under SOURCE into "
                                   "OUT/{train,test}/<seq>/{gt,tilt,blur,turb}/, "
                                   "with a manifest and per-sequence configs.")
    p.add_argument("source", help="root of clean sequences (subdirs of PNGs)")
    p.add_argument("out", help="output root")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--split-ratio", type=float, default=DEFAULT_SPLIT_RATIO,
                   help="train fraction (default %(default).6f)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--resume", action="store_true",
                   help="finish an interrupted run (parameters must match)")
    p.add_argument("--noise-k", type=float, default=0.0,
                   help="exposure-noise scale (0 = off)")
    p.add_argument("--row", type=int, default=None,
                   help="pin every sequence's config to one table row")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="per-sequence config override")
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("mtf-curve", help="export MTF curves as CSV",
                       description="Short-, long-, and finite-exposure MTF "
                                   "against frequency (cycles/pixel, 0 to "
                                   "Nyquist). CSV to stdout, or to --out with "
                                   "a JSON status line on stdout.")
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--exposures-ms", type=float, nargs="+", default=None,
                   help="finite-exposure columns (default: config exposure)")
    p.add_argument("--out", default=None, help="CSV path")
    _add_config_opts(p)
    p.set_defaults(func=cmd_mtf_curve)

    p = sub.add_parser("psf-dump", help="export a PSF raster",
                       description="Synthesize the finite-exposure PSF and "
                                   "write it as an .ettf raster.")
    p.add_argument("--out", required=True, help=".ettf output path")
    p.add_argument("--size", type=int, default=129, help="odd support, px")
    p.add_argument("--width-px", type=float, default=None,
                   help="blur width (default: config mean width)")
    p.add_argument("--tau-ms", type=float, default=None,
                   help="exposure override, ms")
    p.add_argument("--mtf-out", default=None, help="also dump the MTF raster")
    p.add_argument("--png", default=None, help="also write a peak-normalized PNG")
    _add_config_opts(p)
    p.set_defaults(func=cmd_psf_dump)

    p = sub.add_parser("validate-stats", help="check a config's derived stats",
                       description="Print the derived turbulence statistics "
                                   "and verify their invariants; exits 3 on "
                                   "violation.")
    _add_config_opts(p)
    p.set_defaults(func=cmd_validate_stats)

    return ap


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        log.error("%s", exc)
        return 2
    except DatasetError as exc:
        log.error("%s", exc)
        return 1
    except OSError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
