"""Command-line entry point: ``semifluxon <command> [options]``.

Every command writes one self-describing file.  CSV files start with ``#``
comment lines holding the run configuration as JSON; JSON files carry it
under ``"config"``.  Floats are written with 9 significant digits, and the
worker count is left out of the metadata so that outputs do not depend on
it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import boundary as geo
from .boundary import FluxPosition, ShapeParams
from .errors import ArgumentError, SemifluxonError

log = logging.getLogger("semifluxon")

SHAPES = {
    "circle": geo.CIRCLE,
    "reference": geo.REFERENCE_SHAPE,
    "table": geo.TABLE_SHAPE,
    "africa": geo.AFRICA_SHAPE,
}

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_NONCONVERGENCE = 0, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    shape: dict = field(default_factory=dict)
    flux: dict | None = None
    k_range: list | None = None
    N: int | None = None
    grid_step: float | None = None
    tolerances: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    out: str = "-"
    workers: int = 1

    def metadata(self) -> dict:
        meta = asdict(self)
        meta.pop("workers")
        meta.pop("out")
        meta["version"] = __version__
        return _round(meta)


# ------------------------------------------------------------------ formatting


def fmt(x) -> str:
    return format(float(x), ".9g")


def _round(obj):
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if not math.isfinite(x) else float(fmt(x))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline=""), True


def write_csv(path: str, config: RunConfig, header: list[str], rows, extra: dict | None = None) -> None:
    buf = io.StringIO()
    buf.write("# semifluxon " + config.command + "\n")
    buf.write("# config: " + json.dumps(config.metadata(), sort_keys=True) + "\n")
    if extra:
        buf.write("# results: " + json.dumps(_round(extra), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    fh, close = _open_out(path)
    fh.write(buf.getvalue())
    if close:
        fh.close()


def write_json(path: str, config: RunConfig, payload: dict) -> None:
    doc = {"config": config.metadata(), **_round(payload)}
    fh, close = _open_out(path)
    fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if close:
        fh.close()


# --------------------------------------------------------------- arguments


def _shape_from(ns) -> ShapeParams:
    base = SHAPES[ns.shape] if ns.shape else geo.CIRCLE
    a2 = base.a2 if ns.a2 is None else ns.a2
    a3 = base.a3 if ns.a3 is None else ns.a3
    sigma = base.sigma if ns.sigma is None else geo.parse_angle(ns.sigma)
    return ShapeParams(float(a2), float(a3), float(sigma))


def _flux_from(ns) -> FluxPosition:
    return FluxPosition(float(ns.X if ns.X is not None else 0.0), float(ns.Y if ns.Y is not None else 0.0))


def _k_range(ns, default) -> tuple[float, float]:
    lo = default[0] if ns.k_min is None else ns.k_min
    hi = default[1] if ns.k_max is None else ns.k_max
    if not (0 < lo < hi):
        raise ArgumentError(f"empty or invalid k range [{lo}, {hi}]")
    return float(lo), float(hi)


def _add_shape(p):
    g = p.add_argument_group("boundary")
    g.add_argument("--shape", choices=sorted(SHAPES), help="named shape (individual parameters override)")
    g.add_argument("--a2", type=float)
    g.add_argument("--a3", type=float)
    g.add_argument("--sigma", help="angle, e.g. 1.047 or pi/3")


def _add_flux(p):
    p.add_argument("--X", type=float, help="flux x position (default 0)")
    p.add_argument("--Y", type=float, help="flux y position (default 0)")


def _add_common(p):
    p.add_argument("--config", help="JSON file of option defaults; command-line flags override it")
    p.add_argument("--out", help="output path ('-' for stdout)")
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semifluxon", description="Semifluxon billiard spectra, degeneracies and forces")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("circle-spectrum", help="circle levels against flux displacement R (CSV)")
    _add_common(p)
    p.add_argument("--R-min", dest="R_min", type=float)
    p.add_argument("--R-max", dest="R_max", type=float)
    p.add_argument("--R-step", dest="R_step", type=float)
    p.add_argument("--parity", choices=["even", "odd", "both"])
    p.add_argument("--S", type=int, help="addition-theorem truncation")
    p.add_argument("--k-min", dest="k_min", type=float)
    p.add_argument("--k-max", dest="k_max", type=float)

    p = sub.add_parser("levels", help="levels of a shape at one flux position (CSV)")
    _add_common(p)
    _add_shape(p)
    _add_flux(p)
    p.add_argument("--k-min", dest="k_min", type=float)
    p.add_argument("--k-max", dest="k_max", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--grid-step", dest="grid_step", type=float)
    p.add_argument("--points", choices=["arc", "phi"])

    p = sub.add_parser("degeneracies", help="catalog of degeneracies of consecutive levels (JSON)")
    _add_common(p)
    _add_shape(p)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--grid-step", dest="grid_step", type=float)
    p.add_argument("--zoom-step", dest="zoom_step", type=float)
    p.add_argument("--gap-threshold", dest="gap_threshold", type=float)
    p.add_argument("--tol", type=float, help="degeneracy tolerance on the gap")
    p.add_argument("--N", type=int, help="truncation used for refinement")

    p = sub.add_parser("collide", help="locate a collision of degeneracies under a parameter sweep (JSON)")
    _add_common(p)
    p.add_argument("--backend", choices=["billiard", "toy"])
    p.add_argument("--a3", type=float)
    p.add_argument("--sigma")
    p.add_argument("--range", dest="range", type=float, nargs=2, metavar=("LO", "HI"),
                   help="a2 range (billiard) or Z range (toy)")
    p.add_argument("--pair", type=int, nargs=2, metavar=("N", "N1"))
    p.add_argument("--width", type=float, help="bisection width")

    p = sub.add_parser("nodal", help="nodal line (CSV) and force estimate (JSON)")
    _add_common(p)
    _add_shape(p)
    _add_flux(p)
    p.add_argument("--level", type=int)
    p.add_argument("--fd-step", dest="fd_step", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--force-out", dest="force_out", help="JSON path (default: output path with .json suffix)")

    p = sub.add_parser("staircase", help="level staircase against the smoothed Weyl law (CSV)")
    _add_common(p)
    _add_shape(p)
    _add_flux(p)
    p.add_argument("--E-max", dest="E_max", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--points", type=int, dest="n_points", help="energy grid points")

    p = sub.add_parser("codim", help="codimension of an n-fold level coincidence (JSON)")
    _add_common(p)
    p.add_argument("--n-levels", dest="n_levels", type=int, nargs="+")
    return parser


DEFAULTS = {
    "circle-spectrum": {"R_min": 0.0, "R_max": 0.9, "R_step": 0.01, "parity": "both", "S": 12,
                        "k_min": 2.0, "k_max": 8.0},
    "levels": {"k_min": None, "k_max": 8.0, "N": 10, "grid_step": 0.01, "points": "arc"},
    "degeneracies": {"n_max": 4, "grid_step": 0.05, "zoom_step": 0.02, "gap_threshold": 0.05,
                     "tol": 1e-4, "N": 14},
    "collide": {"backend": "billiard", "a3": 0.08, "sigma": "pi/3", "range": [0.0, 0.015],
                "pair": [3, 4], "width": None},
    "nodal": {"level": 1, "fd_step": 1e-3, "N": 14, "force_out": None},
    "staircase": {"E_max": 60.0, "N": 20, "n_points": 200},
    "codim": {"n_levels": [2, 3, 4]},
}
COMMON_DEFAULTS = {"out": "-", "workers": 1, "shape": None, "a2": None, "a3": None, "sigma": None,
                   "X": None, "Y": None, "verbose": False}


def parse_args(argv=None) -> argparse.Namespace:
    """Parse flags; values come from flags, then the config file, then defaults."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    file_opts: dict = {}
    if getattr(ns, "config", None):
        try:
            file_opts = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config file {ns.config}: {exc}")
        if not isinstance(file_opts, dict):
            parser.error("config file must hold a JSON object")
    defaults = {**COMMON_DEFAULTS, **DEFAULTS[ns.command]}
    unknown = set(file_opts) - set(defaults)
    if unknown:
        parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key, value in defaults.items():
        if getattr(ns, key, None) is None:
            setattr(ns, key, file_opts.get(key, value))
    if ns.workers < 1:
        parser.error("--workers must be >= 1")
    return ns


# ---------------------------------------------------------------- commands


def _circle_rows(args):
    from .circle import circle_spectrum

    R, parities, k_range, S = args
    return circle_spectrum([R], parities, k_range, S)


def cmd_circle_spectrum(ns) -> int:
    if ns.R_step <= 0 or ns.R_max < ns.R_min:
        raise ArgumentError("R range must satisfy R_min <= R_max with R_step > 0")
    count = int(math.floor((ns.R_max - ns.R_min) / ns.R_step + 1e-9)) + 1
    Rs = [ns.R_min + i * ns.R_step for i in range(count)]
    parities = ("even", "odd") if ns.parity == "both" else (ns.parity,)
    k_range = _k_range(ns, (2.0, 8.0))
    jobs = [(R, parities, k_range, ns.S) for R in Rs]
    if ns.workers > 1:
        with ProcessPoolExecutor(max_workers=ns.workers) as pool:
            chunks = list(pool.map(_circle_rows, jobs))
    else:
        chunks = [_circle_rows(j) for j in jobs]
    rows = [r for chunk in chunks for r in chunk]
    cfg = RunConfig("circle-spectrum", k_range=list(k_range), workers=ns.workers, out=ns.out,
                    params={"R_min": ns.R_min, "R_max": ns.R_max, "R_step": ns.R_step,
                            "parity": ns.parity, "S": ns.S})
    write_csv(ns.out, cfg, ["R", "parity", "level_index", "k"], rows)
    return EXIT_OK


def cmd_levels(ns) -> int:
    from .degeneracy import k_floor
    from .spectral import find_levels

    shape, flux = _shape_from(ns), _flux_from(ns)
    k_range = _k_range(ns, (k_floor(shape) if ns.k_min is None else ns.k_min, ns.k_max))
    levels = find_levels(shape, flux, k_range, ns.N, ns.grid_step, points=ns.points)
    sig = np.repeat(levels.residuals, levels.multiplicity)
    rows = [(i, float(k), float(k * k), float(s)) for i, (k, s) in enumerate(zip(levels.ks, sig), start=1)]
    cfg = RunConfig("levels", asdict(shape), asdict(flux), list(k_range), ns.N, ns.grid_step,
                    params={"points": ns.points}, out=ns.out, workers=ns.workers)
    write_csv(ns.out, cfg, ["index", "k", "E", "sigma_min"], rows)
    return EXIT_OK


def cmd_degeneracies(ns) -> int:
    from .degeneracy import catalog_detailed

    if ns.n_max < 2:
        raise ArgumentError("n_max must be >= 2 (the lowest pair is (1, 2))")
    shape = _shape_from(ns)
    res = catalog_detailed(shape, ns.n_max, grid_step=ns.grid_step, gap_threshold=ns.gap_threshold,
                           zoom_step=ns.zoom_step, refine_N=ns.N, tol=ns.tol, workers=ns.workers)
    cfg = RunConfig("degeneracies", asdict(shape), N=ns.N, grid_step=ns.grid_step,
                    tolerances={"gap": ns.tol, "gap_threshold": ns.gap_threshold},
                    params={"n_max": ns.n_max, "zoom_step": ns.zoom_step}, out=ns.out, workers=ns.workers)
    near = [{"pair": list(m.pair), "X": m.flux.X, "Y": m.flux.Y, "k": m.k, "gap": m.gap}
            for m in res.near_misses]
    write_json(ns.out, cfg, {"degeneracies": [d.record() for d in res.degeneracies], "near_misses": near})
    return EXIT_OK


def cmd_collide(ns) -> int:
    from .degeneracy import billiard_counter, toy_counter, track_collision

    lo, hi = ns.range
    pair = tuple(ns.pair)
    if ns.backend == "toy":
        width = 1e-6 if ns.width is None else ns.width
        event = track_collision(toy_counter(pair), (lo, hi), pair, "Z", width)
        shape_meta = {}
    else:
        width = 1e-4 if ns.width is None else ns.width
        sigma = geo.parse_angle(ns.sigma)
        counter = billiard_counter(ns.a3, sigma, pair, workers=ns.workers)
        event = track_collision(counter, (lo, hi), pair, "a2", width)
        shape_meta = {"a3": ns.a3, "sigma": sigma}
    cfg = RunConfig("collide", shape_meta, tolerances={"width": width}, out=ns.out, workers=ns.workers,
                    params={"backend": ns.backend, "range": [lo, hi], "pair": list(pair)})
    write_json(ns.out, cfg, {"event": event.record() if hasattr(event, "critical_value") else None,
                             "report": event.record()})
    return EXIT_OK


def cmd_nodal(ns) -> int:
    from .degeneracy import GapSettings, levels_at
    from .nodal_force import force, trace_nodal
    from .spectral import mode_coefficients

    shape, flux = _shape_from(ns), _flux_from(ns)
    est = force(shape, flux, ns.level, ns.fd_step, ns.N, workers=ns.workers)
    ks = levels_at(shape, flux, ns.level, GapSettings(N=ns.N))
    k = float(ks[ns.level - 1])
    info = trace_nodal(mode_coefficients(shape, flux, k, ns.N), flux, k, shape)
    cfg = RunConfig("nodal", asdict(shape), asdict(flux), N=ns.N, tolerances={"fd_step": ns.fd_step},
                    params={"level": ns.level}, out=ns.out, workers=ns.workers)
    write_csv(ns.out, cfg, ["x", "y"], [(float(z.real), float(z.imag)) for z in info.polyline],
              extra={"k": k, "chi0": info.chi0, "mu_nodal": info.mu_nodal, "e0": info.e0})
    force_out = ns.force_out
    if force_out is None:
        force_out = "-" if ns.out == "-" else str(Path(ns.out).with_suffix(".json"))
    write_json(force_out, cfg, {"force": est.record()})
    return EXIT_OK


def cmd_staircase(ns) -> int:
    from .degeneracy import k_floor
    from .spectral import find_levels
    from .weyl import compare

    if ns.E_max <= 0:
        raise ArgumentError("E_max must be positive")
    shape, flux = _shape_from(ns), _flux_from(ns)
    A, L = geo.area_perimeter(shape)
    k_range = (0.5 * k_floor(shape), math.sqrt(ns.E_max) + 0.05)
    levels = find_levels(shape, flux, k_range, ns.N)
    report = compare(levels, A, L, ns.E_max, ns.n_points)
    cfg = RunConfig("staircase", asdict(shape), asdict(flux), list(k_range), ns.N,
                    params={"E_max": ns.E_max, "points": ns.n_points}, out=ns.out, workers=ns.workers)
    write_csv(ns.out, cfg, ["E", "counted", "smoothed", "residual"],
              [(float(e), int(c), float(s), float(r)) for e, c, s, r in report.rows()],
              extra={"area": A, "perimeter": L, "levels": len(levels),
                     "max_abs_residual": report.max_abs_residual})
    return EXIT_OK


def cmd_codim(ns) -> int:
    from .degeneracy import codimension

    records = []
    for n in ns.n_levels:
        c, m = codimension(n)
        records.append({"n_levels": n, "codimension": c, "min_semifluxons": m})
    write_json(ns.out, RunConfig("codim", params={"n_levels": list(ns.n_levels)}, out=ns.out),
               {"records": records})
    return EXIT_OK


COMMANDS = {
    "circle-spectrum": cmd_circle_spectrum,
    "levels": cmd_levels,
    "degeneracies": cmd_degeneracies,
    "collide": cmd_collide,
    "nodal": cmd_nodal,
    "staircase": cmd_staircase,
    "codim": cmd_codim,
}


def main(argv=None) -> int:
    try:
        ns = parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[ns.command](ns)
    except SemifluxonError as exc:
        print(f"semifluxon {ns.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"semifluxon {ns.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
