"""Command-line interface: ``thsplines <subcommand> ...``.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from .approx import FitProblem, builtin_target, convergence_study, least_squares_fit, make_fit_knots
from .basis import tabulate_basis
from .curves import CircleSpec, eval_curve, insert_knot, make_circle, make_circle_segment, make_curve
from .knots import BasisSpec, Family, SpacingWarning, eval_scalar, format_knots, is_uniform, parse_knots, validate
from .svg import Plot
from .weights import (
    N_MAX_Q,
    N_MAX_QHAT,
    cardinalities,
    compute_weights,
    weight_bruteforce_Q,
    weight_integral_check,
    weight_pruned_Qhat,
    weight_signvector,
    weight_uniform,
)

DESK_MAX_ORDER = 11
DESK_MAX_LEVEL = 5


class DomainFailure(Exception):
    pass


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _json_value(v):
    if v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def _threads() -> int:
    raw = os.environ.get("THSPLINES_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _as_file(arg: str) -> Path | None:
    # long inline lists can exceed the OS name limit; those are not files
    try:
        path = Path(arg)
        return path if path.is_file() else None
    except (OSError, ValueError):
        return None


def _load_knots(arg: str):
    path = _as_file(arg)
    return parse_knots(path.read_text() if path else arg)


def _load_points(arg: str) -> np.ndarray:
    path = _as_file(arg)
    if path:
        text = path.read_text()
        rows = [r for r in text.splitlines() if r.strip() and not r.lstrip().startswith("#")]
    else:
        rows = [r for r in arg.split(";") if r.strip()]
    pts = []
    for r in rows:
        try:
            pts.append([eval_scalar(t) for t in r.replace(",", " ").split()])
        except ValueError:
            continue  # header line
    if not pts or len({len(p) for p in pts}) != 1:
        raise DomainFailure("control points must be rows of equal dimension")
    return np.array(pts, dtype=float)


def _open_output(path: str | None, force: bool):
    if path is None or path == "-":
        return None
    p = Path(path)
    if p.exists() and not force:
        raise DomainFailure(f"refusing to overwrite existing file {path} (use --force)")
    return p


def _emit(args, header: Sequence[str], rows: Sequence[Sequence], out) -> None:
    if getattr(args, "json", False):
        text = json.dumps([dict(zip(header, map(_json_value, r))) for r in rows], indent=1) + "\n"
    else:
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for r in rows:
            buf.write(",".join(_fmt(v) for v in r) + "\n")
        text = buf.getvalue()
    target = _open_output(getattr(args, "output", None), getattr(args, "force", False))
    if target is None:
        out.write(text)
    else:
        target.write_text(text)


def _save_svg(args, plot: Plot) -> None:
    if args.svg:
        target = _open_output(args.svg, args.force)
        plot.save(target)


# --- subcommands -----------------------------------------------------------


def _spec_from(args) -> BasisSpec:
    return BasisSpec(Family.parse(args.family), args.order, _load_knots(args.knots))


def cmd_weights(args, out, err) -> None:
    spec = _spec_from(args)
    validate(spec).enforce(args.level)
    ws = compute_weights(spec, args.strategy)
    rows = [[j, w] for j, w in enumerate(ws.weights)]
    header = ["j", "w"]
    if args.check:
        n = spec.half_degree
        worst = 0.0
        used = {"s"}
        for j, row in enumerate(rows):
            ref = weight_signvector(spec, j)
            vals = [ws.weights[j]]
            if n <= N_MAX_Q:
                vals.append(weight_bruteforce_Q(spec, j)); used.add("q")
            if n <= N_MAX_QHAT:
                vals.append(weight_pruned_Qhat(spec, j)); used.add("qhat")
            if n >= 1 and is_uniform(spec.knots, j, spec.order) is not None:
                vals.append(weight_uniform(spec, j)); used.add("uniform")
            if spec.family is Family.TRIGONOMETRIC:
                vals.append(weight_integral_check(spec, j)); used.add("integral")
            dev = max(abs(v - ref) / max(1.0, abs(ref)) for v in vals)
            row.append(dev)
            worst = max(worst, dev)
        header.append("max_dev")
        err.write(f"check: max cross-strategy deviation {worst:.6g} ({','.join(sorted(used))})\n")
    _emit(args, header, rows, out)


def cmd_cardinalities(args, out, err) -> None:
    rows = []
    for n in range(1, args.n_max + 1):
        c = cardinalities(n)
        rows.append([n, c["Q"], c["Qhat"], c["S"]])
    _emit(args, ["n", "Q", "Qhat", "S"], rows, out)


def cmd_basis(args, out, err) -> None:
    spec = _spec_from(args)
    validate(spec).enforce(args.level)
    a, b = spec.domain
    x = np.linspace(a, b, args.samples)
    N = tabulate_basis(spec, x, method=args.method)
    header = ["x"] + [f"N_{j}" for j in range(spec.dimension)]
    _emit(args, header, [[xi, *row] for xi, row in zip(x, N)], out)
    if args.svg:
        plot = Plot(title=f"{spec.family.value} B-splines, m={spec.order}")
        for j in range(spec.dimension):
            plot.line(x, N[:, j])
        _save_svg(args, plot)


def _circle_plot(curve, samples: np.ndarray, pts: np.ndarray, polygon: np.ndarray | None) -> Plot:
    plot = Plot(420, 420, equal_aspect=True, title=f"order {curve.spec.order} circle")
    if polygon is not None:
        plot.line(polygon[:, 0], polygon[:, 1], color="#999999", width=1.0, dash="4,3")
    plot.line(pts[:, 0], pts[:, 1], color="#1f77b4", width=2.0)
    plot.stars(curve.control_points[:, 0], curve.control_points[:, 1])
    return plot


def cmd_circle(args, out, err) -> None:
    theta = None if args.theta is None else eval_scalar(args.theta)
    seg = tuple(args.segment) if args.segment else None
    cs = CircleSpec(args.order, args.sides, theta, seg)
    curve = make_circle_segment(cs) if seg else make_circle(cs)
    a, b = curve.spec.domain
    x = np.linspace(a, b, args.samples)
    pts = eval_curve(curve, x)
    radius = np.linalg.norm(pts, axis=1)
    err.write(f"radius: min {radius.min():.6f} max {radius.max():.6f}; control points: {len(curve.control_points)}\n")
    if args.emit == "points":
        _emit(args, ["j", "x", "y"], [[j + 1, *p] for j, p in enumerate(curve.control_points)], out)
    elif args.emit == "curve":
        _emit(args, ["t", "x", "y"], [[t, *p] for t, p in zip(x, pts)], out)
    else:
        out.write(format_knots(curve.spec.knots) + "\n")
    if args.svg:
        p = args.sides
        k = np.arange(p + 1)
        ang = cs.phase + 2 * k * math.pi / p
        polygon = np.column_stack([np.cos(ang), np.sin(ang)]) / math.cos(math.pi / p)
        _save_svg(args, _circle_plot(curve, x, pts, polygon))


def cmd_insert(args, out, err) -> None:
    spec = _spec_from(args)
    curve = make_curve(spec, _load_points(args.points), level=args.level)
    for v in args.at:
        curve = insert_knot(curve, eval_scalar(v), method=args.method)
    if args.emit == "knots":
        out.write(format_knots(curve.spec.knots) + "\n")
        return
    d = curve.dim
    _emit(args, ["j"] + [f"c{i}" for i in range(d)], [[j, *p] for j, p in enumerate(curve.control_points)], out)


def _load_target(arg: str):
    if arg == "builtin":
        return builtin_target, None
    data = np.loadtxt(arg, delimiter=",", ndmin=2, comments="#")
    if data.shape[1] != 2:
        raise DomainFailure("target file must have two columns: x, f")
    return None, data


def cmd_approx(args, out, err) -> None:
    family = Family.parse(args.family)
    orders = [int(eval_scalar(o)) for o in args.orders.split(",") if o.strip()]
    max_order = 15 if args.full else DESK_MAX_ORDER
    if any(m > max_order for m in orders):
        raise DomainFailure(f"orders above {max_order} need --full")
    if args.levels > DESK_MAX_LEVEL and not args.full:
        raise DomainFailure(f"more than {DESK_MAX_LEVEL} levels needs --full")
    f, data = _load_target(args.target)
    if data is None:
        rows = convergence_study(family, orders, args.levels, samples=args.samples, workers=_threads())
        table = [[r.family.value, r.m, r.p, r.ndof, r.linf_error, r.rate] for r in rows]
    else:
        x, y = data[:, 0], data[:, 1]
        table, prev = [], None
        for m in orders:
            prev = None
            for lev in range(1, args.levels + 1):
                p = 2 ** (lev + 1)
                rep = least_squares_fit(FitProblem(BasisSpec(family, m, make_fit_knots(m, p)), x, y, args.target))
                rate = None
                if prev is not None and rep.linf_error >= 1e-13 and prev[1] >= 1e-13:
                    rate = math.log2(prev[1] / rep.linf_error) / math.log2(p / prev[0])
                table.append([family.value, m, p, rep.ndof, rep.linf_error, rate])
                prev = (p, rep.linf_error)
    _emit(args, ["family", "m", "p", "ndof", "linf_error", "rate"], table, out)
    for row in table:
        err.write(f"m={row[1]} p={row[2]} ndof={row[3]} error={row[4]:.6g}"
                  + (f" rate={row[5]:.6g}" if row[5] is not None else "") + "\n")
    if args.svg:
        plot = Plot(logx=True, logy=True, title=f"{family.value} L-inf error vs NDOF")
        for m in orders:
            sel = [r for r in table if r[1] == m and r[4] > 0]
            plot.line([r[3] for r in sel], [r[4] for r in sel], label=f"m={m}")
        _save_svg(args, plot)


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thsplines", description="Normalized trigonometric and hyperbolic B-splines.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{weights,cardinalities,basis,circle,insert,approx}")

    def common(p, svg=False):
        p.add_argument("-o", "--output", help="write CSV/JSON here instead of stdout")
        p.add_argument("--force", action="store_true", help="overwrite existing output files")
        p.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
        if svg:
            p.add_argument("--svg", help="also write an SVG plot")

    def spline(p):
        p.add_argument("--family", choices=["trig", "hyp"], default="trig")
        p.add_argument("--order", type=int, required=True, help="odd order m = 2n+1")
        p.add_argument("--knots", required=True, help="file or inline list, open(m; ...) or uniform(start, step, count)")
        p.add_argument("--level", choices=["strict", "relaxed", "none"], default="relaxed",
                       help="trigonometric spacing enforcement")

    p = sub.add_parser("weights", help="normalization weights w_{j,m} as CSV")
    spline(p)
    p.add_argument("--strategy", choices=["auto", "q", "qhat", "s", "uniform"], default="auto")
    p.add_argument("--check", action="store_true", help="cross-check all applicable strategies")
    common(p)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("cardinalities", help="sizes of the Q, Q-hat and S index sets")
    p.add_argument("--n-max", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_cardinalities)

    p = sub.add_parser("basis", help="tabulate normalized B-splines")
    spline(p)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--method", choices=["definition", "recurrence"], default="definition")
    common(p, svg=True)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("circle", help="exact circle or circle segment")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--sides", type=int, required=True)
    p.add_argument("--theta", help="phase (default pi/p); accepts pi expressions")
    p.add_argument("--segment", type=int, nargs=2, metavar=("A", "B"))
    p.add_argument("--samples", type=int, default=401)
    p.add_argument("--emit", choices=["points", "curve", "knots"], default="points")
    common(p, svg=True)
    p.set_defaults(func=cmd_circle)

    p = sub.add_parser("insert", help="insert knots into a curve")
    spline(p)
    p.add_argument("--points", required=True, help="file or inline 'x,y;x,y;...'")
    p.add_argument("--at", action="append", required=True, help="knot value to insert (repeatable)")
    p.add_argument("--method", choices=["blossom", "collocation"], default="blossom")
    p.add_argument("--emit", choices=["points", "knots"], default="points")
    common(p)
    p.set_defaults(func=cmd_insert)

    p = sub.add_parser("approx", help="least-squares convergence study")
    p.add_argument("--family", choices=["trig", "hyp"], default="trig")
    p.add_argument("--orders", default="3,5,7")
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--target", default="builtin", help="'builtin' or a two-column CSV file (x, f)")
    p.add_argument("--samples", type=int, default=10001)
    p.add_argument("--full", action="store_true", help="allow orders 13, 15 and more levels")
    common(p, svg=True)
    p.set_defaults(func=cmd_approx)
    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def run(args: argparse.Namespace, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        # refuse before any work so a run never leaves partial outputs behind
        for name in ("output", "svg"):
            _open_output(getattr(args, name, None), getattr(args, "force", False))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", SpacingWarning)
            args.func(args, out, err)
        for w in caught:
            err.write(f"warning: {w.message}\n")
    except (DomainFailure, ValueError, IndexError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return 1
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
