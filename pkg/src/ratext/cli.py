"""``ratext`` command line: extend | spectrum | eigenstate | verify.

Exit codes
----------
0  success
1  a positive verification check failed (or a negative one unexpectedly passed)
2  invalid arguments or unsupported parameter combination
3  the requested extension is singular in the domain
4  the extra level does not exist for this case
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

from . import dbt, oracle, verify
from .errors import (
    NoExtraStateError,
    NoSuchStateError,
    ParameterError,
    RatextError,
    RegularityError,
)
from .families import FamilySpec, potential_value

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_SINGULAR, EXIT_NO_STATE = 0, 1, 2, 3, 4
GRID_ENV = "RATEXT_GRID_POINTS"


class UsageError(Exception):
    pass


def fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------
def _render(meta: dict, columns: list, rows: list, fmt_name: str) -> str:
    if fmt_name == "tree":
        body = {"meta": meta, "columns": columns, "rows": [dict(zip(columns, r)) for r in rows]}
        return json.dumps(body, indent=2, default=_json_default) + "\n"
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={fmt(v)}" for k, v in meta.items()) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o).__name__)


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    folder = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".ratext-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# config
# --------------------------------------------------------------------------
def family_from_args(args) -> FamilySpec:
    need = {"ho": ("omega",), "morse": ("a", "b"), "erkc": ("a", "gamma")}[args.family]
    missing = [p for p in need if getattr(args, p) is None]
    if missing:
        raise UsageError(f"--family {args.family} needs " + ", ".join("--" + m for m in missing))
    if args.family == "ho":
        return FamilySpec.ho(args.omega)
    if args.family == "morse":
        return FamilySpec.morse(args.a, args.b, args.alpha)
    return FamilySpec.erkc(args.a, args.gamma)


def grid_points(args, default: int) -> int:
    if args.grid_points is not None:
        return args.grid_points
    env = os.environ.get(GRID_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"{GRID_ENV}={env!r} is not an integer") from None
        return value
    return default


def curve_grid(args, ext) -> oracle.GridSpec:
    points = grid_points(args, verify.RESIDUAL_POINTS)
    auto = verify.residual_grid(ext, max(points, oracle.MIN_POINTS))
    lo = auto.lo if args.grid_lo is None else args.grid_lo
    hi = auto.hi if args.grid_hi is None else args.grid_hi
    if ext.domain[0] == 0.0 and lo <= 0:
        raise UsageError("grid must stay inside x > 0 for this family")
    return oracle.GridSpec(lo, hi, points)


def _meta(f: FamilySpec, n: int, ext=None) -> dict:
    meta = {"family": f.kind, **f.params, "n": n}
    if ext is not None:
        meta["strict"] = str(ext.spectrum.strict).lower()
        if ext.spectrum.extra_level is not None:
            meta["extra_level"] = ext.spectrum.extra_level
    return meta


def _build(args, k_max=None):
    f = family_from_args(args)
    return f, dbt.extend(f, args.n, non_conforming=args.non_conforming, k_max=k_max)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------
def cmd_extend(args) -> int:
    f, ext = _build(args, args.kmax)
    g = curve_grid(args, ext)
    x = g.nodes
    rows = list(zip(x, potential_value(f, x), ext(x)))
    meta = _meta(f, args.n, ext)
    meta["levels"] = ";".join(fmt(e) for e in ext.spectrum.energies)
    _emit(_render(meta, ["x", "V", "V_ext"], rows, args.format), args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    f, ext = _build(args, args.kmax)
    levels = ext.spectrum.levels
    points = grid_points(args, verify.SPECTRUM_POINTS)
    numeric = verify.spectrum_solver(ext, len(levels), points).energies
    rows = [(lab, e, num, abs(num - e)) for (lab, e), num in zip(levels, numeric)]
    _emit(
        _render(_meta(f, args.n, ext), ["label", "analytic_energy", "numerov_energy", "abs_diff"],
                rows, args.format),
        args.out,
    )
    return EXIT_OK


def _parse_level(text: str):
    if text in (dbt.EXTRA, "minus", "m"):
        return dbt.EXTRA
    try:
        k = int(text)
    except ValueError:
        raise UsageError(f"--level must be a non-negative integer or '-', got {text!r}") from None
    if k < 0:
        raise UsageError("--level must be non-negative")
    return k


def cmd_eigenstate(args) -> int:
    level = _parse_level(args.level)
    f, ext = _build(args, args.kmax)
    psi = dbt.extended_eigenstate(ext, level)
    g = curve_grid(args, ext)
    x = g.nodes
    raw = psi(x)
    norm = psi.norm()
    meta = _meta(f, args.n, ext)
    meta.update(level=level, energy=psi.energy, norm=norm)
    rows = list(zip(x, raw, raw / norm))
    _emit(_render(meta, ["x", "psi_unnormalized", "psi_normalized"], rows, args.format), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.matrix:
        if args.matrix != "default":
            raise UsageError(f"unknown matrix {args.matrix!r} (only 'default')")
        points = grid_points(args, verify.SPECTRUM_POINTS)
        reports = verify.verify_matrix(spectrum_points=points)
    else:
        if args.family is None or args.n is None:
            raise UsageError("verify needs --matrix default or --family/--n")
        f = family_from_args(args)
        points = grid_points(args, verify.SPECTRUM_POINTS)
        reports = [
            verify.verify_case(
                f, args.n, args.kmax if args.kmax is not None else 3,
                non_conforming=args.non_conforming, spectrum_points=points,
            )
        ]
    ok = all(r.as_expected for r in reports)
    if args.format == "tree":
        body = {"overall": "pass" if ok else "fail", "cases": [r.tree() for r in reports]}
        text = json.dumps(body, indent=2, default=_json_default) + "\n"
    else:
        rows = [row for r in reports for row in r.rows()]
        meta = {"report": "verify", "cases": len(reports), "overall": "pass" if ok else "fail"}
        text = _render(meta, ["case_id", "check", "status", "measured", "tolerance", "detail"],
                       rows, "csv")
    _emit(text, args.out)
    for r in reports:
        tag = "expected-fail" if r.negative else "positive"
        state = "ok" if r.as_expected else "UNEXPECTED"
        print(f"{r.case_id:<40} {tag:<14} {state}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------
def _positive_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=("ho", "morse", "erkc"))
    common.add_argument("--omega", type=float)
    common.add_argument("--a", type=float)
    common.add_argument("--b", type=float)
    common.add_argument("--alpha", type=float, default=1.0, help="Morse scale (default 1)")
    common.add_argument("--gamma", type=float)
    common.add_argument("--n", type=_positive_int)
    common.add_argument("--kmax", type=_positive_int, help="highest physical level reported")
    common.add_argument("--grid-lo", type=float)
    common.add_argument("--grid-hi", type=float)
    common.add_argument("--grid-points", type=int, help=f"overrides ${GRID_ENV}")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "tree"), default="csv")
    common.add_argument(
        "--non-conforming", action="store_true",
        help="build singular extensions anyway; in verify, marks an expected failure",
    )

    p = argparse.ArgumentParser(prog="ratext", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("extend", parents=[common], help="tabulate V and V^(n)")
    sub.add_parser("spectrum", parents=[common], help="analytic vs grid eigenvalues")
    e = sub.add_parser("eigenstate", parents=[common], help="tabulate one eigenstate")
    e.add_argument("--level", required=True, help="physical index k or '-' for the extra level")
    v = sub.add_parser("verify", parents=[common], help="run the verification checks")
    v.add_argument("--matrix", help="'default' runs the standard matrix")
    return p


COMMANDS = {
    "extend": cmd_extend,
    "spectrum": cmd_spectrum,
    "eigenstate": cmd_eigenstate,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "verify":
        if args.family is None or args.n is None:
            parser.error(f"{args.command} needs --family and --n")
    if args.grid_points is not None and args.grid_points < oracle.MIN_POINTS:
        parser.error(f"--grid-points must be >= {oracle.MIN_POINTS}")
    try:
        return COMMANDS[args.command](args)
    except RegularityError as exc:
        print(f"ratext: singular extension: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except NoExtraStateError as exc:
        print(f"ratext: {exc}", file=sys.stderr)
        return EXIT_NO_STATE
    except (UsageError, ParameterError, NoSuchStateError, ValueError) as exc:
        print(f"ratext: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RatextError as exc:
        print(f"ratext: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
