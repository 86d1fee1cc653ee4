"""Batch command-line front-end.

Subcommands: validate, roundtrip, minimize, spectrum, orbit.  Structured
reports are JSON, traces and spectra are CSV.  Diagnostics go to stderr;
stdout carries data only when no --output path is given.

Exit codes: 0 success, 1 generic failure, 2 input parse failure,
3 non-embedding input, 4 curve outside the chart tube, 5 iteration
budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import shapes
from .ambient import AmbientSpace
from .charts import chart_apply, chart_invert, make_chart, reach_estimate
from .curve import Embedding, image_distance, is_embedding, separation, speeds
from .errors import (
    CurveChartsError,
    LineSearchFailedError,
    NotEmbeddingError,
    OutsideTubeError,
)
from .files import curve_to_dict, load_curve, save_curve
from .functionals import parse_functional
from .solver import SolveOptions, minimize, spectrum
from .symmetry import orbit_rank, orbit_singular_values, standard_killing_basis

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_NOT_EMBEDDING = 3
EXIT_OUTSIDE_TUBE = 4
EXIT_MAX_ITER = 5

_GENERATORS = {
    "circle": shapes.circle,
    "ellipse": shapes.ellipse,
    "lemniscate": shapes.lemniscate,
    "torus-geodesic": shapes.torus_geodesic,
    "great-circle": shapes.great_circle,
    "perturbed-circle": shapes.perturbed_circle,
}


class _InputError(Exception):
    """Bad user input; maps to exit code 2."""


def _parse_make(text: str, grid: int | None, seed: int | None) -> Embedding:
    name, _, rest = text.partition(":")
    if name not in _GENERATORS:
        raise _InputError(f"unknown generator {name!r}; choose from {sorted(_GENERATORS)}")
    kwargs: dict = {}
    winding: list[int] = []
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise _InputError(f"generator parameter {item!r} is not key=value")
            try:
                num = float(val)
            except ValueError as exc:
                raise _InputError(f"generator parameter {item!r} is not numeric") from exc
            if key in ("wx", "wy"):
                winding = winding or [0, 0]
                winding[0 if key == "wx" else 1] = int(num)
            elif key in ("p", "seed", "kmax"):
                kwargs["P" if key == "p" else key] = int(num)
            else:
                kwargs[key] = num
    if winding:
        kwargs["winding"] = tuple(winding)
    if grid is not None:
        kwargs["P"] = grid
    if seed is not None and name in ("torus-geodesic", "perturbed-circle"):
        kwargs["seed"] = seed
    try:
        return _GENERATORS[name](**kwargs)
    except (TypeError, ValueError) as exc:
        raise _InputError(f"generator {name!r}: {exc}") from exc


def _load_file(path: str) -> Embedding:
    try:
        return load_curve(path)
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        raise _InputError(f"cannot read curve file {path!r}: {exc}") from exc


def _get_curve(args, flag: str = "curve") -> Embedding:
    path = getattr(args, flag, None)
    if path is not None:
        x = _load_file(path)
    elif flag == "curve" and getattr(args, "make", None):
        x = _parse_make(args.make, args.grid, getattr(args, "seed", None))
    else:
        raise _InputError(f"no input curve: pass --{flag}" +
                          (" or --make" if flag == "curve" else ""))
    if getattr(args, "ambient", None):
        try:
            want = AmbientSpace.from_spec(json.loads(args.ambient))
        except (json.JSONDecodeError, ValueError, KeyError) as exc:
            raise _InputError(f"bad --ambient spec: {exc}") from exc
        if want != x.space:
            raise _InputError(
                f"curve ambient {x.space.to_spec()} does not match --ambient {want.to_spec()}")
    return x


def _emit(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w") as fh:
            fh.write(text)


def _json_report(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_validate(args) -> int:
    x = _get_curve(args)
    sp = float(np.min(speeds(x)))
    sep = float(separation(x))
    ok = is_embedding(x)
    report = {
        "embedding": ok,
        "min_speed": sp,
        # null separation: no admissible distinct-strand pair (convex curves)
        "separation": sep if np.isfinite(sep) else None,
        "reach": float(reach_estimate(x)) if ok else 0.0,
    }
    _emit(_json_report(report), args.output)
    if not ok:
        print("curve is not an embedding", file=sys.stderr)
        return EXIT_NOT_EMBEDDING
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    if args.center is None:
        raise _InputError("roundtrip needs --center")
    center = _get_curve(args, "center")
    target = _get_curve(args)
    if not is_embedding(center):
        print("chart center is not an embedding", file=sys.stderr)
        return EXIT_NOT_EMBEDDING
    c = make_chart(center)
    u, h = chart_invert(c, target)
    rebuilt = chart_apply(c, u)
    dist = image_distance(target, rebuilt)
    slopes = h.slope(c.center.grid.nodes)
    report = {
        "section_sup_norm": float(u.sup_norm),
        "rho": float(c.rho),
        "reparam_slope_min": float(np.min(slopes)),
        "reparam_slope_max": float(np.max(slopes)),
        "image_distance": float(dist),
    }
    _emit(_json_report(report), args.output)
    return EXIT_OK if dist <= args.tol else EXIT_FAIL


def cmd_minimize(args) -> int:
    x0 = _get_curve(args)
    F = parse_functional(args.functional)
    opts = SolveOptions(max_iter=args.max_iter, grad_tol=args.tol, newton=args.newton,
                        newton_threshold=args.newton_threshold)
    c, u, trace = minimize(F, x0, opts)
    final = chart_apply(c, u)
    last = trace.records[-1]
    report = {
        "converged": trace.converged,
        "iterations": last.iter,
        "f": last.f,
        "grad_norm": last.grad_norm,
    }
    if args.output is None:
        report["curve"] = curve_to_dict(final)
        report["trace"] = trace.to_csv()
        _emit(_json_report(report), None)
    else:
        save_curve(final, args.output)
        with open(args.output + ".trace.csv", "w") as fh:
            fh.write(trace.to_csv())
        print(_json_report(report), end="", file=sys.stderr)
    if not trace.converged:
        print("iteration budget exhausted before reaching the gradient tolerance",
              file=sys.stderr)
        return EXIT_MAX_ITER
    return EXIT_OK


def cmd_spectrum(args) -> int:
    x = _get_curve(args)
    if not is_embedding(x):
        print("curve is not an embedding", file=sys.stderr)
        return EXIT_NOT_EMBEDDING
    F = parse_functional(args.functional)
    vals = spectrum(F, make_chart(x), args.count)
    lines = ["index,eigenvalue"]
    lines += [f"{i},{float(v)!r}" for i, v in enumerate(vals)]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_orbit(args) -> int:
    x = _get_curve(args)
    if not is_embedding(x):
        print("curve is not an embedding", file=sys.stderr)
        return EXIT_NOT_EMBEDDING
    c = make_chart(x)
    basis = standard_killing_basis(x.space)
    rank, stab = orbit_rank(c, basis)
    report = {
        "dim_G": basis.dim,
        "rank": rank,
        "stabilizer_dim": stab,
        "singular_values": [float(s) for s in orbit_singular_values(c, basis)],
    }
    _emit(_json_report(report), args.output)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvecharts",
        description="Quotient-chart analysis of closed embedded curves.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, functional=False, solver=False, count=False, center=False):
        p.add_argument("--curve", help="input curve file (JSON)")
        p.add_argument("--make", help="built-in generator NAME[:k=v,...]")
        p.add_argument("--ambient", help="required ambient spec as JSON, for validation")
        p.add_argument("--grid", type=int, help="grid size for --make generators")
        p.add_argument("--seed", type=int, help="seed for --make generators")
        p.add_argument("--output", help="write data here instead of stdout")
        if center:
            p.add_argument("--center", help="chart-center curve file (JSON)")
        if functional:
            p.add_argument("--functional", default="length",
                           help="functional string, e.g. 'length-1.0*area'")
        if solver:
            p.add_argument("--tol", type=float, default=1e-8, help="gradient tolerance")
            p.add_argument("--max-iter", type=int, default=500)
            p.add_argument("--newton", action="store_true",
                           help="finish with Newton refinement")
            p.add_argument("--newton-threshold", type=float, default=1e-3,
                           help="gradient norm at which Newton refinement starts")
        if count:
            p.add_argument("--count", type=int, default=5,
                           help="number of lowest eigenvalues")

    p = sub.add_parser("validate", help="embedding and reach report")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("roundtrip", help="chart round-trip report")
    common(p, center=True)
    p.add_argument("--tol", type=float, default=1e-6,
                   help="acceptable image reconstruction distance")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("minimize", help="descend a functional to a critical point")
    common(p, functional=True, solver=True)
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("spectrum", help="lowest second-variation eigenvalues")
    common(p, functional=True, count=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("orbit", help="isometry-orbit rank report")
    common(p)
    p.set_defaults(func=cmd_orbit)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE
    except NotEmbeddingError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NOT_EMBEDDING
    except OutsideTubeError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_OUTSIDE_TUBE
    except LineSearchFailedError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MAX_ITER
    except CurveChartsError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
