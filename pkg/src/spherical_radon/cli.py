"""Command line front end: every subcommand reads and writes grid files.

Exit codes: 0 success, 2 usage error, 3 I/O or file-format error,
4 numerical validation failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import io as gio
from .backprojection import divergence_probe
from .core import (AxisSpec, Phantom, PhantomComponent, Sinogram, bump_phantom,
                   gaussian_phantom, make_dimension_config, sample_field, symmetric_axis)
from .forward import AngularQuadrature, forward_project
from .reconstruct import ReconConfig, compare_fields, reconstruct
from .spectral import field_to_spectrum, norm_window_scan, sinogram_to_data_spectrum

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

RESIDUE_LIMIT = 1e-8

# numeric parameters with defaults; argparse leaves them None so the
# manifest can tell defaulted values from user-set ones
DEFAULTS = {
    "sigma": 0.7,
    "half_width": 8.0,
    "count": 257,
    "x_half_width": 64.0,
    "r_max": 64.0,
    "spacing": None,
    "M": 4096,
    "Z": 48.0,
    "roi_margin": 0.1,
    "point": "0,0.5",
    "Z_list": "8,16,32,64,128,256",
    "p": 1,
    "windows": "1,2,4,8,16",
}


class UsageError(Exception):
    pass


class NumericalValidationError(Exception):
    pass


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of numbers, got {text!r}")


def _param(args, man: gio.RunManifest, name: str, default=None):
    v = getattr(args, name)
    if default is None:
        default = DEFAULTS[name]
    man.set_param(name, default if v is None else v, v is not None)
    return default if v is None else v


def _check_finite(values, what: str):
    if not np.all(np.isfinite(values)):
        raise NumericalValidationError(f"{what} contains non-finite values")


def _phantom_to_meta(p: Phantom) -> list:
    return [[c.kind, c.center_x, c.center_y, c.width, c.amplitude] for c in p.components]


def _phantom_from_meta(rows) -> Phantom:
    return Phantom(tuple(PhantomComponent(str(k), float(cx), float(cy), float(w), float(a))
                         for k, cx, cy, w, a in rows))


def _field_axes(args, man):
    hw = float(_param(args, man, "half_width"))
    count = int(_param(args, man, "count"))
    if count < 3 or count % 2 == 0 or hw <= 0:
        raise UsageError("field grid needs an odd count >= 3 and a positive half-width")
    ax = symmetric_axis(hw, 2.0 * hw / (count - 1))
    return ax, ax


# ---------------------------------------------------------------------------
# subcommands

def cmd_phantom(args, man):
    if args.component:
        comps = []
        for text in args.component:
            parts = text.split(",")
            if len(parts) != 5:
                raise UsageError("--component takes kind,cx,cy,width,amplitude")
            kind = parts[0].strip()
            try:
                comps.append(PhantomComponent(kind, *map(float, parts[1:])))
            except ValueError as exc:
                raise UsageError(str(exc))
        p = Phantom.from_components(comps)
        man.set_param("preset", "custom", True)
    elif args.preset == "gaussian" or (args.preset is None and args.sigma is not None):
        p = gaussian_phantom(float(_param(args, man, "sigma")))
        man.set_param("preset", "gaussian", args.preset is not None)
    else:
        p = bump_phantom()
        man.set_param("preset", "bump", args.preset is not None)
    x_axis, y_axis = _field_axes(args, man)
    u = sample_field(p, x_axis, y_axis)
    gio.write_grid(args.output, u, meta={"phantom": _phantom_to_meta(p)})
    man.add_output("field", args.output)
    man.metrics["components"] = len(p.components)
    man.metrics["max_value"] = float(np.max(u.values))


def cmd_forward(args, man):
    head = gio.read_header(args.input)
    if head["kind"] != "field":
        raise gio.KindMismatchError(f"forward needs a field file, got {head['kind']}")
    rows = head["meta"].get("phantom")
    if rows is None:
        raise UsageError("field file carries no phantom description; create it with 'phantom'")
    p = _phantom_from_meta(rows)
    man.add_input("phantom", args.input)
    field_x = head["axes"][0]
    h = float(_param(args, man, "spacing", default=field_x.spacing))
    xw = float(_param(args, man, "x_half_width"))
    rmax = float(_param(args, man, "r_max"))
    M = int(_param(args, man, "M"))
    if h <= 0 or xw <= 0 or rmax <= 0:
        raise UsageError("grid extents and spacing must be positive")
    try:
        q = AngularQuadrature(M)
    except ValueError as exc:
        raise UsageError(str(exc))
    x_axis = symmetric_axis(round(xw / h) * h, h)
    r_axis = AxisSpec(int(round(rmax / h)) + 1, 0.0, h)
    g = forward_project(p, x_axis, r_axis, q)
    _check_finite(g.values, "sinogram")
    gio.write_grid(args.output, g, meta={"phantom": rows})
    man.add_output("sinogram", args.output)
    man.metrics["shape"] = list(g.values.shape)
    man.metrics["max_value"] = float(np.max(g.values)) if g.values.size else 0.0


def cmd_spectrum(args, man):
    grid = gio.read_grid(args.input, expect=("field", "sino"))
    man.add_input("grid", args.input)
    man.set_param("tail_correction", not args.no_tail_correction, args.no_tail_correction)
    if isinstance(grid, Sinogram):
        S = sinogram_to_data_spectrum(grid, make_dimension_config(1),
                                      tail_correction=not args.no_tail_correction)
        role = "data_spectrum"
    else:
        S = field_to_spectrum(grid)
        role = "field_spectrum"
    _check_finite(S.values, "spectrum")
    gio.write_grid(args.output, S)
    man.add_output(role, args.output)
    man.metrics["shape"] = list(S.values.shape)
    man.metrics["max_abs"] = float(np.max(np.abs(S.values))) if S.values.size else 0.0


def cmd_recon(args, man):
    g = gio.read_grid(args.input, expect="sino")
    man.add_input("sinogram", args.input)
    method = args.method.replace("-", "_")
    man.set_param("method", args.method, True)
    Z = float(_param(args, man, "Z"))
    margin = float(_param(args, man, "roi_margin"))
    man.set_param("tail_correction", not args.no_tail_correction, args.no_tail_correction)
    try:
        cfg = ReconConfig(method=method, Z=Z, roi_margin=margin,
                          tail_correction=not args.no_tail_correction)
    except ValueError as exc:
        raise UsageError(str(exc))
    truth = None
    if args.truth:
        truth = gio.read_grid(args.truth, expect="field")
        man.add_input("truth", args.truth)
        axes = (truth.x_axis, truth.y_axis)
    else:
        axes = _field_axes(args, man)
    try:
        rec, report = reconstruct(g, axes, cfg, truth)
    except ValueError as exc:
        raise UsageError(str(exc))
    _check_finite(rec.values, "reconstruction")
    metrics = report.as_dict()
    runtime = metrics.pop("runtime_seconds")
    if args.timing:
        metrics["runtime_seconds"] = runtime
    man.metrics.update(metrics)
    gio.write_grid(args.output, rec)
    man.add_output("field", args.output)
    residue = report.meta.get("imag_residue", 0.0)
    if residue > RESIDUE_LIMIT:
        raise NumericalValidationError(f"imaginary residue {residue:.3g} above {RESIDUE_LIMIT}")


def cmd_probe(args, man):
    g = gio.read_grid(args.input, expect="sino")
    man.add_input("sinogram", args.input)
    pt = _floats(_param(args, man, "point"), "--point")
    if len(pt) != 2:
        raise UsageError("--point takes x,y")
    Zs = _floats(_param(args, man, "Z_list"), "--Z-list")
    man.set_param("operator", args.operator, args.operator != "classical")
    try:
        table = divergence_probe(g, pt[0], pt[1], Zs, args.operator)
    except ValueError as exc:
        raise UsageError(str(exc))
    _check_finite(table.values, "probe values")
    man.metrics.update({
        "Z": list(table.Z), "values": list(table.values), "slope_b": table.slope_b,
        "intercept_a": table.intercept_a, "r_squared": table.r_squared,
        "last_increment": table.last_increment(), "clipped_fraction": table.clipped_fraction,
    })


def cmd_norm_scan(args, man):
    G = gio.read_grid(args.input, expect="dspec")
    man.add_input("data_spectrum", args.input)
    p = int(_param(args, man, "p"))
    windows = _floats(_param(args, man, "windows"), "--windows")
    try:
        table = norm_window_scan(G, p, windows)
    except ValueError as exc:
        raise UsageError(str(exc))
    norms = list(table.norms)
    man.metrics.update({"p": p, "windows": list(table.window_halfwidths), "norms": norms})
    if len(norms) >= 2 and norms[-2] > 0:
        man.metrics["last_doubling_change"] = abs(norms[-1] - norms[-2]) / norms[-2]


def cmd_compare(args, man):
    a = gio.read_grid(args.a, expect="field")
    b = gio.read_grid(args.b, expect="field")
    man.add_input("a", args.a)
    man.add_input("b", args.b)
    margin = float(_param(args, man, "roi_margin"))
    if not 0.0 <= margin < 0.5:
        raise UsageError("roi margin must lie in [0, 0.5)")
    try:
        c = compare_fields(a, b, margin)
    except ValueError as exc:
        raise UsageError(str(exc))
    man.metrics.update({"rel_l2_error": c.rel_l2_error, "linf_error": c.linf_error,
                        "roi_shape": list(c.roi_shape)})


def cmd_export(args, man):
    u = gio.read_grid(args.input, expect="field")
    man.add_input("field", args.input)
    gio.export_image(u, args.output)
    man.add_output("image", args.output)
    man.metrics.update({"min": float(np.min(u.values)), "max": float(np.max(u.values)),
                        "constant": bool(np.min(u.values) == np.max(u.values))})


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spherical-radon",
                                 description="Spherical mean transform toolkit (n = 1).")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", help="write the run manifest here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def grid_opts(p):
        p.add_argument("--half-width", type=float, help="field half-width (default 8)")
        p.add_argument("--count", type=int, help="samples per field axis, odd (default 257)")

    p = sub.add_parser("phantom", parents=[common], help="sample an analytic phantom")
    p.add_argument("--preset", choices=("bump", "gaussian"))
    p.add_argument("--sigma", type=float, help="width of the gaussian preset (default 0.7)")
    p.add_argument("--component", action="append",
                   help="kind,cx,cy,width,amplitude (repeatable; kind gaussian or smooth_bump)")
    grid_opts(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("forward", parents=[common], help="circular means of a phantom")
    p.add_argument("input", help="field file written by 'phantom'")
    p.add_argument("--x-half-width", type=float, help="centre track half-width (default 64)")
    p.add_argument("--r-max", type=float, help="largest radius (default 64)")
    p.add_argument("--spacing", type=float, help="x and r spacing (default: field spacing)")
    p.add_argument("--M", type=int, help="angular nodes (default 4096)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("spectrum", parents=[common], help="spectrum of a field or sinogram")
    p.add_argument("input")
    p.add_argument("--no-tail-correction", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("recon", parents=[common], help="reconstruct a field from a sinogram")
    p.add_argument("input")
    p.add_argument("--method", choices=("fourier", "mfbp", "rstar-k"), default="mfbp")
    p.add_argument("--Z", type=float, help="backprojection truncation half-width (default 48)")
    p.add_argument("--roi-margin", type=float, help="ROI border fraction (default 0.1)")
    p.add_argument("--truth", help="field file to score against (also fixes the output grid)")
    p.add_argument("--no-tail-correction", action="store_true")
    p.add_argument("--timing", action="store_true", help="record runtime in the manifest")
    grid_opts(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_recon)

    p = sub.add_parser("probe-divergence", parents=[common],
                       help="truncated backprojection at one point for growing Z")
    p.add_argument("input")
    p.add_argument("--point", help="x,y (default 0,0.5)")
    p.add_argument("--Z-list", help="comma-separated half-widths (default 8,16,...,256)")
    p.add_argument("--operator", choices=("classical", "modified"), default="classical")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("norm-scan", parents=[common], help="windowed L^p norms of g^")
    p.add_argument("input")
    p.add_argument("--p", type=int, choices=(1, 2))
    p.add_argument("--windows", help="comma-separated half-widths (default 1,2,4,8,16)")
    p.set_defaults(func=cmd_norm_scan)

    p = sub.add_parser("compare", parents=[common], help="error of field A against field B")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--roi-margin", type=float)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export", parents=[common], help="16-bit PGM of a field")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_export)
    return ap


def cli_main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    man = gio.RunManifest(args.command)
    code = EXIT_OK
    try:
        args.func(args, man)
    except UsageError as exc:
        print(f"{ap.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except gio.GridFileError as exc:
        print(f"{ap.prog}: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"{ap.prog}: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalValidationError as exc:
        print(f"{ap.prog}: numerical validation failed: {exc}", file=sys.stderr)
        man.status = "numerical-validation-failure"
        code = EXIT_NUMERIC
    text = man.to_text()
    try:
        if args.manifest:
            gio.atomic_write(args.manifest, text.encode("utf-8"))
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"{ap.prog}: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


def main():
    sys.exit(cli_main())
