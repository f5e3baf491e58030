"""Parameter sweeps, oracle cross-checks and state dumps from the command line.

    pauliphoton sweep --profile lorentzian --widths 2,4,6 --d-range 0:10:101 --output curves.csv
    pauliphoton oracle-check --width 2 --d 2 --grid-points 1001 --grid-span 40
    pauliphoton dump-state --width 2 --d 2

Every flag can also be given in a ``--config`` file of ``key = value`` lines
(keys are flag names without the leading dashes); flags on the command line
win. Exit codes: 0 success, 2 usage error, 3 numerical failure.
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
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .entanglement_measures import concurrence, negativity
from .fock_oracle import MomentumGrid, oracle_density_matrix
from .momentum_overlaps import QuadratureError, overlap_quad, parse_profile
from .photon_state import (
    TwoQubitDM,
    assemble_density_matrix,
    map_to_polarization,
    as_dict,
    normalize,
)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

CSV_HEADER = (
    "family",
    "width_e",
    "width_h",
    "d",
    "L",
    "M",
    "Ltilde",
    "Mtilde",
    "concurrence",
    "negativity",
)
MAX_ORACLE_POINTS = 2001
ORACLE_TOL = 1e-3
ZERO_ENTRY_TOL = 1e-12


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    profile: str = "lorentzian"
    widths: Tuple[float, ...] = (2.0, 4.0, 6.0)
    d_range: Tuple[float, float, int] = (0.0, 10.0, 101)
    hole_widths: Optional[Tuple[float, ...]] = None
    method: str = "auto"
    output: Optional[str] = None

    def __post_init__(self):
        start, stop, steps = self.d_range
        if steps < 2:
            raise UsageError("d-range needs at least 2 steps")
        if start < 0 or stop < start:
            raise UsageError("d-range needs 0 <= start <= stop")
        if any(not (w > 0) for w in self.widths):
            raise UsageError("widths must be > 0")
        if self.hole_widths is not None:
            if len(self.hole_widths) != len(self.widths):
                raise UsageError("give one hole width per electron width")
            if any(not (w > 0) for w in self.hole_widths):
                raise UsageError("hole widths must be > 0")
        if self.method not in ("auto", "quad"):
            raise UsageError("method must be auto or quad")

    @property
    def d_values(self):
        start, stop, steps = self.d_range
        return np.linspace(start, stop, int(steps))

    def points(self):
        """(width_e, width_h, d) triples in output order."""
        hw = self.hole_widths or self.widths
        pairs = sorted(zip(self.widths, hw))
        return [(we, wh, float(d)) for we, wh in pairs for d in self.d_values]


def _profiles(profile, width_e, width_h, d):
    """Electron profiles at -d/2 and +d/2 and their mirrored hole partners."""
    base_e = parse_profile(profile, width=width_e)
    base_h = parse_profile(profile, width=width_h)
    pk, pkp = base_e.shifted(-d / 2), base_e.shifted(d / 2)
    hk, hkp = base_h.shifted(-d / 2).mirrored(), base_h.shifted(d / 2).mirrored()
    return pk, pkp, hk, hkp


def evaluate_point(profile, width_e, width_h, d, method="auto"):
    """One sweep row as a dict; raises QuadratureError on numerical failure."""
    pk, pkp, hk, hkp = _profiles(profile, width_e, width_h, d)
    q = overlap_quad(pk, pkp, hk, hkp, method=method)
    photon = map_to_polarization(normalize(assemble_density_matrix(q)))
    return {
        "family": pk.family,
        "width_e": width_e if pk.family != "tabulated" else math.nan,
        "width_h": width_h if pk.family != "tabulated" else math.nan,
        "d": d,
        "L": q.L,
        "M": q.M,
        "Ltilde": q.Ltilde,
        "Mtilde": q.Mtilde,
        "concurrence": concurrence(photon),
        "negativity": negativity(photon),
    }


def _evaluate_safe(args):
    profile, we, wh, d, method = args
    try:
        return evaluate_point(profile, we, wh, d, method), None
    except QuadratureError as exc:
        row = {key: math.nan for key in CSV_HEADER}
        row.update(family=profile.split(":")[0], width_e=we, width_h=wh, d=d)
        return row, str(exc)


def run_sweep(spec: SweepSpec, jobs=1):
    """Evaluate every (width, d) point. Returns (rows, failures)."""
    tasks = [(spec.profile, we, wh, d, spec.method) for we, wh, d in spec.points()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_safe, tasks, chunksize=8))
    else:
        results = [_evaluate_safe(t) for t in tasks]
    rows = [r for r, _ in results]
    failures = [(t, err) for t, (_, err) in zip(tasks, results) if err]
    return rows, failures


def _fmt(value):
    if isinstance(value, str):
        return value
    return format(float(value), ".9g")


def format_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(row[key]) for key in CSV_HEADER])
    return buf.getvalue()


def _analytic_and_oracle(profile, width, d, grid, hole_width=None):
    pk, pkp, hk, hkp = _profiles(profile, width, hole_width or width, d)
    q = overlap_quad(pk, pkp, hk, hkp)
    analytic = normalize(assemble_density_matrix(q)).entries
    raw = oracle_density_matrix(pk, pkp, grid, hk, hkp)
    oracle = normalize(TwoQubitDM(raw)).entries
    return analytic, oracle


def max_relative_deviation(analytic, oracle):
    """Largest entrywise relative deviation; structurally zero entries count absolutely."""
    scale = np.max(np.abs(analytic))
    nonzero = np.abs(analytic) > ZERO_ENTRY_TOL * scale
    rel = np.abs(oracle - analytic)[nonzero] / np.abs(analytic[nonzero])
    zero_dev = np.abs(oracle[~nonzero]) / scale
    return float(max(rel.max(initial=0.0), zero_dev.max(initial=0.0)))


def run_oracle_check(width, d, grid_points=1001, grid_span=40.0, profile="lorentzian",
                     hole_width=None, tol=ORACLE_TOL):
    """Compare analytic and Fock-oracle normalized matrices on one grid."""
    if grid_points > MAX_ORACLE_POINTS:
        raise UsageError(
            f"{grid_points} grid points is too many for the brute-force oracle "
            f"(memory and time grow as points^2); use at most {MAX_ORACLE_POINTS}"
        )
    if grid_points < 2 or grid_span <= 0:
        raise UsageError("grid needs at least 2 points and a positive span")
    grid = MomentumGrid.symmetric(grid_span, grid_points)
    analytic, oracle = _analytic_and_oracle(profile, width, d, grid, hole_width)
    dev = max_relative_deviation(analytic, oracle)
    return {
        "width": width,
        "d": d,
        "grid_points": grid_points,
        "grid_span": grid_span,
        "max_relative_deviation": dev,
        "tolerance": tol,
        "passed": bool(dev <= tol),
    }


def dump_state(width, d, profile="lorentzian", hole_width=None):
    pk, pkp, hk, hkp = _profiles(profile, width, hole_width or width, d)
    q = overlap_quad(pk, pkp, hk, hkp)
    spin = normalize(assemble_density_matrix(q))
    photon = map_to_polarization(spin)
    return {
        "overlaps": {"L": q.L, "M": q.M, "Ltilde": q.Ltilde, "Mtilde": q.Mtilde},
        "spin": as_dict(spin),
        "photon": as_dict(photon),
    }


# -- argument handling --------------------------------------------------------

def _float_list(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _d_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("d-range must be start:stop:steps")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad d-range {text!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser():
    parser = _Parser(prog="pauliphoton", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key = value file mirroring the flags")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="concurrence and negativity over (width, d)")
    sw.add_argument("--profile", default="lorentzian",
                    help="lorentzian, gaussian or table:path=<file>")
    sw.add_argument("--widths", type=_float_list, default=(2.0, 4.0, 6.0))
    sw.add_argument("--hole-widths", type=_float_list, default=None)
    sw.add_argument("--d-range", type=_d_range, default=(0.0, 10.0, 101))
    sw.add_argument("--method", choices=("auto", "quad"), default="auto")
    sw.add_argument("--output", "-o", default="-")
    sw.add_argument("--jobs", "-j", type=int, default=1)

    oc = sub.add_parser("oracle-check", help="analytic vs Fock-space oracle")
    oc.add_argument("--profile", default="lorentzian")
    oc.add_argument("--width", type=float, default=2.0)
    oc.add_argument("--hole-width", type=float, default=None)
    oc.add_argument("--d", type=float, default=0.0)
    oc.add_argument("--grid-points", type=int, default=1001)
    oc.add_argument("--grid-span", type=float, default=40.0)
    oc.add_argument("--tolerance", type=float, default=ORACLE_TOL)

    ds = sub.add_parser("dump-state", help="print spin and photon density matrices")
    ds.add_argument("--profile", default="lorentzian")
    ds.add_argument("--width", type=float, default=2.0)
    ds.add_argument("--hole-width", type=float, default=None)
    ds.add_argument("--d", type=float, default=0.0)
    return parser


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            out[key.strip().lstrip("-")] = value.strip()
    return out


def _config_argv(config, command, parser):
    """Turn config entries into flags placed before the command-line flags."""
    sub = parser._subparsers._group_actions[0].choices[command]
    known = {opt.lstrip("-") for a in sub._actions for opt in a.option_strings}
    argv = []
    for key, value in config.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r} for {command}")
        argv += [f"--{key}", value]
    return argv


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        config = read_config(args.config)
        i = argv.index(args.command)
        # argparse keeps the last occurrence, so command-line flags win
        merged = list(argv[: i + 1]) + _config_argv(config, args.command, parser) + list(argv[i + 1:])
        args = parser.parse_args(merged)
    return args


def _write(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except (UsageError, OSError) as exc:
        print(f"pauliphoton: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "oracle-check":
            return _cmd_oracle(args)
        return _cmd_dump(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"pauliphoton: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"pauliphoton: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def _cmd_sweep(args):
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    parse_profile(args.profile, width=1.0)
    spec = SweepSpec(args.profile, tuple(args.widths), tuple(args.d_range),
                     None if args.hole_widths is None else tuple(args.hole_widths),
                     args.method, args.output)
    rows, failures = run_sweep(spec, jobs=args.jobs)
    _write(format_csv(rows), args.output)
    for (_, we, wh, d, _), err in failures:
        log.error("quadrature failed at width=%g hole=%g d=%g: %s", we, wh, d, err)
    return EXIT_NUMERICAL if failures else EXIT_OK


def _cmd_oracle(args):
    report = run_oracle_check(args.width, args.d, args.grid_points, args.grid_span,
                              args.profile, args.hole_width, args.tolerance)
    status = "PASS" if report["passed"] else "FAIL"
    print(f"oracle-check width={report['width']:g} d={report['d']:g} "
          f"grid={report['grid_points']} span={report['grid_span']:g}: "
          f"max relative deviation {report['max_relative_deviation']:.3e} "
          f"(tolerance {report['tolerance']:.0e}) {status}")
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


def _cmd_dump(args):
    print(json.dumps(dump_state(args.width, args.d, args.profile, args.hole_width), indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
