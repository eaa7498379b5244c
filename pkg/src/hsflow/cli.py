"""Command line interface.

Datum files are JSON documents::

    {"u_left": 0, "pieces": [[0, 1, -1]], "atoms": [[0.5, 2.0]]}

``pieces`` lists ``[x_start, x_end, slope]`` over a contiguous window, outside
of which ``u_bar`` is constant; ``atoms`` lists ``[location, mass]``.  Every
``--input`` also accepts ``demo:intro``, ``demo:atom[:mass]`` or
``demo:cantor[:depth]``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from ._validation import check_tolerances
from .datasets import make_atom_datum, make_fat_cantor_datum, make_intro_datum
from .evolution import SingularTimeError, evolve, predict_singular_times, semigroup_deviations
from .lagrangian import InitialDatum, build
from .measure import TOL_SLOPE
from .pwfun import TOL_X
from .verify import SUITES, alpha_grid, run_suites


class DatumFormatError(ValueError):
    pass


def _number(value, where: str) -> float:
    if isinstance(value, bool):
        raise DatumFormatError(f"malformed number at {where}: {value!r}")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        try:
            out = float(value)
        except ValueError:
            raise DatumFormatError(f"malformed number at {where}: {value!r}") from None
    else:
        raise DatumFormatError(f"malformed number at {where}: {value!r}")
    if not math.isfinite(out):
        raise DatumFormatError(f"non-finite number at {where}: {value!r}")
    return out


def datum_from_dict(doc: dict) -> InitialDatum:
    if not isinstance(doc, dict):
        raise DatumFormatError("datum must be a JSON object")
    unknown = set(doc) - {"u_left", "pieces", "atoms"}
    if unknown:
        raise DatumFormatError(f"unknown fields: {sorted(unknown)}")
    u_left = _number(doc.get("u_left", 0.0), "u_left")
    pieces = []
    for i, row in enumerate(doc.get("pieces", [])):
        if not isinstance(row, (list, tuple)) or len(row) != 3:
            raise DatumFormatError(f"pieces[{i}] must be [x_start, x_end, slope]")
        a, b, c = (_number(v, f"pieces[{i}][{j}]") for j, v in enumerate(row))
        if pieces and a != pieces[-1][1]:
            raise DatumFormatError(f"pieces are not contiguous: pieces[{i}] starts at {a!r}, previous ends at {pieces[-1][1]!r}")
        if not b > a:
            raise DatumFormatError(f"pieces[{i}] must have x_start < x_end")
        pieces.append((a, b, c))
    atoms = []
    for i, row in enumerate(doc.get("atoms", [])):
        if not isinstance(row, (list, tuple)) or len(row) != 2:
            raise DatumFormatError(f"atoms[{i}] must be [location, mass]")
        x, m = (_number(v, f"atoms[{i}][{j}]") for j, v in enumerate(row))
        if not m > 0:
            raise DatumFormatError(f"atom mass must be positive (atoms[{i}] has mass {m!r})")
        atoms.append((x, m))
    if len({x for x, _ in atoms}) != len(atoms):
        raise DatumFormatError("atom locations must be distinct")
    return InitialDatum.from_pieces(u_left, pieces, atoms)


def datum_to_dict(datum: InitialDatum) -> dict:
    return {
        "u_left": datum.u_left,
        "pieces": [list(p) for p in datum.piece_table()],
        "atoms": [[float(x), float(m)] for x, m in zip(datum.atom_locations, datum.atom_masses)],
    }


def demo(name: str, **params) -> InitialDatum:
    if name == "intro":
        return make_intro_datum()
    if name == "atom":
        return make_atom_datum(float(params.get("mass", 1.0)))
    if name == "cantor":
        depth = int(params.get("depth", 4))
        return make_fat_cantor_datum(depth)
    raise ValueError(f"unknown demo {name!r}; choose intro, atom or cantor")


def parse_datum(path: str) -> InitialDatum:
    """Read a datum file, or a ``demo:<name>[:<param>]`` shortcut."""
    if path.startswith("demo:"):
        parts = path.split(":")
        name = parts[1]
        params = {}
        if len(parts) > 2:
            params = {"mass": parts[2]} if name == "atom" else {"depth": parts[2]}
        return demo(name, **params)
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DatumFormatError(f"{path}: not valid JSON ({exc})") from None
    return datum_from_dict(doc)


def _write_atomically(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hsflow-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(text: str, output: str | None) -> None:
    if output:
        _write_atomically(output, text)
    else:
        sys.stdout.write(text)


def _config(args) -> dict:
    cfg = {"tol_slope": args.tol_slope, "tol_x": args.tol_x}
    for key in ("time", "samples", "s", "t", "suite", "seed", "input"):
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    return cfg


def _tols(args) -> dict:
    return {"tol_slope": args.tol_slope, "tol_x": args.tol_x}


def snapshot_record(param, t: float, samples: int, tols: dict) -> dict:
    snap = evolve(param, t, **tols)
    u, mu = snap.u, snap.mu
    ends = [u.breakpoints[0], u.breakpoints[-1], *mu.locations, *mu.density.breakpoints]
    lo, hi = min(ends) - 1.0, max(ends) + 1.0
    xs = np.linspace(lo, hi, samples)
    bp = mu.density.breakpoints
    density = [
        {"start": float(a), "end": float(b), "density": float(d)}
        for a, b, d in zip(bp[:-1], bp[1:], mu.density.interior_values)
    ]
    atoms = []
    for x, m, (a1, a2) in zip(mu.locations, mu.masses, mu.labels):
        atoms.append({
            "x": float(x),
            "mass": float(m),
            "source": [float(param.x_bar(a1)), float(param.x_bar(a2))],
            "alpha_span": [a1, a2],
        })
    return {
        "t": t,
        "energy": param.energy,
        "samples": [{"x": float(x), "u": float(v)} for x, v in zip(xs, u(xs))],
        "density_pieces": density,
        "atoms": atoms,
    }


def cmd_demo(args) -> int:
    params = {}
    if args.mass is not None:
        params["mass"] = args.mass
    if args.depth is not None:
        params["depth"] = args.depth
    datum = demo(args.name, **params)
    _emit(json.dumps(datum_to_dict(datum), indent=2) + "\n", args.output)
    print(f"energy {datum.energy!r}", file=sys.stderr)
    return 0


def cmd_evolve(args) -> int:
    param = build(parse_datum(args.input))
    rec = snapshot_record(param, args.time, args.samples, _tols(args))
    if args.format == "json":
        rec = {"version": __version__, "config": _config(args), **rec}
        _emit(json.dumps(rec, indent=2) + "\n", args.output)
        return 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "u"])
    for row in rec["samples"]:
        w.writerow([repr(row["x"]), repr(row["u"])])
    atoms = io.StringIO()
    aw = csv.writer(atoms, lineterminator="\n")
    aw.writerow(["x", "mass", "source_start", "source_end"])
    for a in rec["atoms"]:
        aw.writerow([repr(a["x"]), repr(a["mass"]), repr(a["source"][0]), repr(a["source"][1])])
    if args.output:
        _write_atomically(args.output, buf.getvalue())
        root, _ = os.path.splitext(args.output)
        _write_atomically(root + "_atoms.csv", atoms.getvalue())
    else:
        sys.stdout.write(buf.getvalue() + "\n" + atoms.getvalue())
    return 0


def event_record(event) -> dict:
    return {
        "t": event.t_star,
        "slope": event.slope,
        "atoms": [
            {"x": a.location, "mass": a.mass, "source": list(a.source), "alpha_span": list(a.alpha_span)}
            for a in event.atoms
        ],
    }


def cmd_singular(args) -> int:
    param = build(parse_datum(args.input))
    events = predict_singular_times(param, **_tols(args))
    rec = {"version": __version__, "config": _config(args), "energy": param.energy,
           "events": [event_record(e) for e in events]}
    if args.json:
        _emit(json.dumps(rec, indent=2) + "\n", args.output)
        return 0
    if args.output:
        _write_atomically(args.output, json.dumps(rec, indent=2) + "\n")
    print(f"{'t':>22} {'slope':>22} {'atoms':>6} {'mass':>22}")
    for e in events:
        print(f"{e.t_star:>22.17g} {e.slope:>22.17g} {len(e.atoms):>6d} {e.total_mass:>22.17g}")
    if not events:
        print("no singular times")
    return 0


SEMIGROUP_TOL = 1e-9


def cmd_semigroup(args) -> int:
    param = build(parse_datum(args.input))
    grid = alpha_grid(param, args.seed)
    try:
        dev = semigroup_deviations(param, args.s, args.t, grid, **_tols(args))
    except SingularTimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    worst = max(dev.values())
    passed = worst <= SEMIGROUP_TOL
    rec = {"version": __version__, "config": _config(args), "deviations": dev,
           "max_deviation": worst, "tolerance": SEMIGROUP_TOL, "passed": passed}
    if args.json:
        _emit(json.dumps(rec, indent=2) + "\n", args.output)
    else:
        if args.output:
            _write_atomically(args.output, json.dumps(rec, indent=2) + "\n")
        for key, val in dev.items():
            print(f"{key:<16} {val:.3e}")
        print(f"{'max':<16} {worst:.3e}  {'PASS' if passed else 'FAIL'}")
    if not passed:
        print(f"failed check: semigroup (max deviation {worst:.3e})", file=sys.stderr)
    return 0 if passed else 1


def cmd_verify(args) -> int:
    param = build(parse_datum(args.input))
    reports = run_suites(param, args.suite, random_state=args.seed, **_tols(args))
    rec = {"version": __version__, "config": _config(args), "reports": [r.to_dict() for r in reports]}
    if args.json:
        _emit(json.dumps(rec, indent=2, default=float) + "\n", args.output)
    else:
        if args.output:
            _write_atomically(args.output, json.dumps(rec, indent=2, default=float) + "\n")
        for r in reports:
            print(f"{r.name:<20} {r.max_error:.3e} <= {r.tolerance:.0e}  {'PASS' if r.passed else 'FAIL'}")
    failed = [r.name for r in reports if not r.passed]
    for name in failed:
        print(f"failed check: {name}", file=sys.stderr)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hsflow", description="Conservative Hunter-Saxton solutions")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-slope", type=float, default=TOL_SLOPE, dest="tol_slope")
    common.add_argument("--tol-x", type=float, default=TOL_X, dest="tol_x")
    common.add_argument("--output", "-o")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo", parents=[common], help="write a demo datum file")
    p.add_argument("name", choices=["intro", "atom", "cantor"])
    p.add_argument("--mass", type=float)
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("evolve", parents=[common], help="solution at one time")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--time", "-t", type=float, required=True)
    p.add_argument("--samples", "-n", type=int, default=201)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("singular", parents=[common], help="predicted singular times")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_singular)

    p = sub.add_parser("semigroup", parents=[common], help="restart check between two times")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_semigroup)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--suite", choices=["all", *SUITES], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "samples", 2) < 2:
        parser.error("--samples must be at least 2")
    try:
        check_tolerances(args.tol_x, args.tol_slope)
        return args.func(args)
    except (DatumFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
