"""Command-line interface: solves, sweeps, bound curves, and the verdict.

Commands
--------
eig       grid eigensolve of one domain (raw / extrapolated / normalized)
sweep     family sweeps onto the (lambda1, lambda2) plane, CSV
lemma1    cone-corrected upper bound for lambda1 over an eps grid
lemma2    cutoff upper bound for lambda2 over an eps grid
ratio     horizontal-tangent ratio curve (bound path, optional grid path)
verify    full default pipeline and the three-check verdict (exit 0 = PASS)
plotdata  attainable-cloud CSV plus the region boundary curves

JSON is the default format for single solves and verdicts, CSV for sweeps
and curves; floats are printed with 12 significant digits and outputs are
byte-identical across runs for a fixed config and seed.
"""

import argparse
import json
import math
import os
import sys

from . import asymptotics, attainable, testfn
from .analytic import ball_spectrum, theta_spectrum
from .eigensolve import DEFAULT_SEED
from .geometry import (
    Ball, Dumbbell, HalfDumbbell, Rectangle, TwoBalls,
    domain_from_dict, domain_to_dict, measure,
)
from .pipeline import solve_domain

__all__ = ["main", "cmd_eig", "cmd_sweep", "cmd_lemma", "cmd_ratio", "cmd_verify",
           "cmd_plotdata"]

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    return f"{x:.12g}"


def _jsonable(obj):
    """Round floats to 12 significant digits for reproducible output; numpy
    scalars are converted to their Python equivalents."""
    if isinstance(obj, bool):
        return obj
    if hasattr(obj, "item") and not isinstance(obj, (dict, list, tuple, str)):
        obj = obj.item()
    if isinstance(obj, float):
        return float(_fmt(obj)) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _dump_json(doc) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _parse_h_list(spec: str):
    hs = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if "/" in token:
            num, den = token.split("/")
            hs.append(float(num) / float(den))
        else:
            hs.append(float(token))
    if not hs:
        raise ConfigError("empty grid list")
    hs = sorted(hs, reverse=True)
    for a, b in zip(hs, hs[1:]):
        if abs(a / b - 2.0) > 1e-12:
            raise ConfigError(f"grid levels must be in halving ratio, got {spec!r}")
    return tuple(hs)


def _parse_eps_grid(spec: str, eps_max: float):
    if not 0.0 < eps_max <= testfn.EPS_MAX:
        raise ConfigError(
            f"eps-max {eps_max} outside the validated regime (0, {testfn.EPS_MAX}]"
        )
    if spec == "default":
        grid = [e for e in attainable.DEFAULT_EPS_GRID if e <= eps_max + 1e-15]
    else:
        grid = [float(t) for t in spec.split(",") if t.strip()]
    if not grid:
        raise ConfigError("empty eps grid")
    for e in grid:
        if not 0.0 < e <= eps_max + 1e-15:
            raise ConfigError(f"eps {e} outside (0, {eps_max}]")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("eps grid must be strictly increasing")
    return tuple(grid)


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("SPECTRALGAP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"SPECTRALGAP_SEED must be an integer, got {env!r}") from exc
    return DEFAULT_SEED


def _parse_domain(args):
    name = args.domain
    if name is None:
        raise ConfigError("--domain is required")
    if name.lstrip().startswith("{"):
        return domain_from_dict(json.loads(name))
    if name.endswith(".json") or os.path.exists(name):
        with open(name) as fh:
            return domain_from_dict(json.load(fh))
    eps = getattr(args, "eps", None)
    named = {
        "ball": lambda: Ball(),
        "disc": lambda: Ball(),
        "theta": lambda: TwoBalls(),
        "two_balls": lambda: TwoBalls(),
        "square": lambda: Rectangle(width=1.0, height=1.0),
        "dumbbell": lambda: Dumbbell(epsilon=_require_eps(eps)),
        "half_dumbbell": lambda: HalfDumbbell(epsilon=_require_eps(eps)),
    }
    if name not in named:
        raise ConfigError(f"unknown domain {name!r} (use a name, a JSON file, or inline JSON)")
    return named[name]()


def _require_eps(eps):
    if eps is None:
        raise ConfigError("this domain needs --eps")
    if not 0.0 < eps <= testfn.EPS_MAX:
        raise ConfigError(f"--eps must lie in (0, {testfn.EPS_MAX}], got {eps}")
    return eps


def _require_planar(args, command: str):
    if args.dim != 2:
        raise ConfigError(
            f"{command!r} uses the grid solver, which is planar only; "
            f"--dim {args.dim} supports the analytic and quadrature commands "
            f"(lemma1, lemma2, ratio, verify)"
        )


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_eig(args) -> int:
    _require_planar(args, "eig")
    domain = _parse_domain(args)
    h_list = _parse_h_list(args.h)
    seed = _resolve_seed(args)
    if args.tol <= 0:
        raise ConfigError("--tol must be > 0")
    solve = solve_domain(domain, h_list, tol=args.tol, seed=seed)
    doc = {
        "domain": domain_to_dict(domain),
        "h": list(solve.h_list),
        "tol": args.tol,
        "seed": seed,
        "measure": solve.measure,
        "t_factor": solve.t_factor,
        "lambda1": {
            "raw": solve.raw(0),
            "extrapolated": float(solve.lambda_x[0]),
            "order": solve.orders[0],
            "normalized": float(solve.lambda_norm[0]),
            "error_est": float(solve.error_est[0]),
        },
        "lambda2": {
            "raw": solve.raw(1),
            "extrapolated": float(solve.lambda_x[1]),
            "order": solve.orders[1],
            "normalized": float(solve.lambda_norm[1]),
            "error_est": float(solve.error_est[1]),
        },
        "residuals": [float(r) for r in solve.levels[-1].residuals],
        "iterations": list(solve.levels[-1].iterations),
    }
    _emit(_dump_json(doc), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    _require_planar(args, "sweep")
    families = [f.strip() for f in args.families.split(",") if f.strip()]
    unknown = [f for f in families if f not in attainable.DEFAULT_FAMILIES]
    if unknown:
        raise ConfigError(f"unknown families {unknown}; "
                          f"known: {sorted(attainable.DEFAULT_FAMILIES)}")
    if args.tol <= 0:
        raise ConfigError("--tol must be > 0")
    config = attainable.SweepConfig(
        h_list=_parse_h_list(args.h),
        tol=args.tol,
        seed=_resolve_seed(args),
        jobs=args.jobs,
    )
    records = attainable.default_sweep(config, families=families)
    if args.format == "json":
        doc = [
            {k: getattr(r, k) for k in (
                "family", "param", "h_list", "lambda1_raw", "lambda2_raw",
                "lambda1_x", "lambda2_x", "measure", "t_factor",
                "lambda1_norm", "lambda2_norm", "bound1", "bound2",
                "error_est", "failure")}
            for r in records
        ]
        _emit(_dump_json(doc), args.out)
    else:
        _emit(attainable.records_to_csv(records), args.out)
    return EXIT_OK


def _bound_rows(eps_grid, dim, which):
    rows = []
    for e in eps_grid:
        if which == "lemma1":
            b = testfn.lemma1_rayleigh(e, dim=dim)
            rows.append({"eps": e, "quotient": b.quotient, "deficit": b.deficit,
                         "error_est": b.error_est})
        else:
            b = testfn.lemma2_rayleigh(e, dim=dim)
            rows.append({"eps": e, "quotient": b.quotient, "excess": b.excess,
                         "error_est": b.error_est})
    return rows


def cmd_lemma(args, which: str) -> int:
    if args.dim not in (2, 3):
        raise ConfigError("--dim must be 2 or 3")
    if args.eps is not None:
        eps_grid = ( _require_eps(args.eps), )
    else:
        eps_grid = _parse_eps_grid(args.eps_grid, args.eps_max)
    rows = _bound_rows(eps_grid, args.dim, which)
    if args.format == "csv":
        key = "deficit" if which == "lemma1" else "excess"
        lines = [f"eps,quotient,{key},err"]
        lines += [
            ",".join(_fmt(r[c]) for c in ("eps", "quotient", key, "error_est"))
            for r in rows
        ]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_dump_json(rows), args.out)
    return EXIT_OK


def cmd_ratio(args) -> int:
    if args.dim not in (2, 3):
        raise ConfigError("--dim must be 2 or 3")
    eps_grid = _parse_eps_grid(args.eps_grid, args.eps_max)
    if args.dim == 2 and args.with_grid:
        config = attainable.SweepConfig(h_list=_parse_h_list(args.h),
                                        tol=args.tol, seed=_resolve_seed(args),
                                        grid_eps_min=args.grid_eps_min, jobs=args.jobs)
    else:
        config = attainable.SweepConfig(grid_eps_min=math.inf, jobs=args.jobs)
    if args.dim == 3:
        rows = []
        lam_p = theta_spectrum(3)[0]
        m_factor = lambda e: (measure(Dumbbell(epsilon=e, dim=3))
                              / (4.0 * math.pi / 3.0)) ** (2.0 / 3.0)
        for e in eps_grid:
            f = m_factor(e)
            num = f * testfn.lemma2_rayleigh(e, dim=3).quotient - lam_p
            den = lam_p - f * testfn.lemma1_rayleigh(e, dim=3).quotient
            rows.append((e, num / den if den > 0 else float("nan"), None))
    else:
        records = attainable.sweep("dumbbell", eps_grid, config)
        curves = asymptotics.ratio_curve(records)
        grid_map = dict(curves.grid)
        rows = [(e, r, grid_map.get(e)) for e, r in curves.bound]
    if args.format == "json":
        doc = [{"eps": e, "bound_ratio": rb, "grid_ratio": rg} for e, rb, rg in rows]
        _emit(_dump_json(doc), args.out)
    else:
        lines = ["eps,bound_ratio,grid_ratio"]
        for e, rb, rg in rows:
            lines.append(f"{_fmt(e)},{_fmt(rb)},{'' if rg is None else _fmt(rg)}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.dim not in (2, 3):
        raise ConfigError("--dim must be 2 or 3")
    eps_grid = _parse_eps_grid(args.eps_grid, args.eps_max)
    grid_check = args.dim == 2 and not args.no_grid_check
    config = attainable.SweepConfig(
        h_list=_parse_h_list(args.h),
        tol=args.tol,
        seed=_resolve_seed(args),
        grid_eps_min=(args.grid_check_eps if grid_check else math.inf),
        jobs=args.jobs,
    )
    if args.dim == 3:
        raise ConfigError("the verdict pipeline is planar (the grid cross-checks "
                          "and sweep records are N = 2); use lemma1/lemma2/ratio for N = 3")
    records = attainable.sweep("dumbbell", eps_grid, config)
    verdict = asymptotics.verify_theorem(records)

    crosscheck = []
    if grid_check:
        for rec in records:
            if rec.lambda1_norm is None or rec.bound1 is None:
                continue
            crosscheck.append({
                "eps": rec.param,
                "bound1": rec.bound1,
                "lambda1_norm": rec.lambda1_norm,
                "bound2": rec.bound2,
                "lambda2_norm": rec.lambda2_norm,
                "budget": rec.error_est,
                "bound1_above_grid": rec.bound1 >= rec.lambda1_norm - rec.error_est,
                "bound2_above_grid": rec.bound2 >= rec.lambda2_norm - rec.error_est,
            })

    data_csv = args.data_out
    if data_csv is None and args.out:
        root, _ = os.path.splitext(args.out)
        data_csv = root + "_data.csv"
    if data_csv is None:
        data_csv = "ratio_curve.csv"
    grid_map = dict(verdict.ratio_grid)
    lines = ["eps,bound_ratio,grid_ratio"]
    for e, rb in verdict.ratio_bound:
        rg = grid_map.get(e)
        lines.append(f"{_fmt(e)},{_fmt(rb)},{'' if rg is None else _fmt(rg)}")
    with open(data_csv, "w") as fh:
        fh.write("\n".join(lines) + "\n")

    doc = verdict.to_dict()
    doc["data_csv_path"] = data_csv
    doc["grid_crosscheck"] = crosscheck
    _emit(_dump_json(doc), args.out)
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_plotdata(args) -> int:
    _require_planar(args, "plotdata")
    config = attainable.SweepConfig(
        h_list=_parse_h_list(args.h),
        tol=args.tol,
        seed=_resolve_seed(args),
        jobs=args.jobs,
    )
    records = attainable.default_sweep(config)
    prefix = args.out or "plotdata"
    cloud_path = f"{prefix}_cloud.csv"
    boundary_path = f"{prefix}_boundary.csv"
    with open(cloud_path, "w") as fh:
        fh.write(attainable.records_to_csv(records))

    spec = ball_spectrum(2)
    lam_p = theta_spectrum(2)[0]
    slope = spec.lambda2 / spec.lambda1
    t_max = 3.0 * lam_p
    lines = ["kind,x,y"]
    lines.append(f"P,{_fmt(lam_p)},{_fmt(lam_p)}")
    lines.append(f"Q,{_fmt(spec.lambda1)},{_fmt(spec.lambda2)}")
    samples = 50
    for i in range(samples + 1):
        t = lam_p + (t_max - lam_p) * i / samples
        lines.append(f"diag,{_fmt(t)},{_fmt(t)}")
    for i in range(samples + 1):
        t = spec.lambda1 + (t_max - spec.lambda1) * i / samples
        lines.append(f"ab_line,{_fmt(t)},{_fmt(slope * t)}")
    with open(boundary_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    sys.stdout.write(f"{cloud_path}\n{boundary_path}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectralgap",
        description="first two Dirichlet-Laplacian eigenvalues of planar domains: "
                    "grid solves, certified trial-field bounds, attainable-set data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=True):
        p.add_argument("--dim", type=int, default=2, help="ambient dimension (2 or 3)")
        p.add_argument("--seed", type=int, default=None,
                       help=f"RNG seed (default {DEFAULT_SEED}; env SPECTRALGAP_SEED overrides)")
        p.add_argument("--tol", type=float, default=1e-6, help="eigenvalue tolerance")
        p.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
        p.add_argument("--format", choices=("json", "csv"), default=None)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if grid:
            p.add_argument("--h", default="1/32,1/64,1/128",
                           help="comma list of grid spacings in halving ratio")

    p = sub.add_parser("eig", help="grid eigensolve of one domain")
    common(p)
    p.add_argument("--domain", required=True,
                   help="ball|theta|square|dumbbell|half_dumbbell, a JSON file, or inline JSON")
    p.add_argument("--eps", type=float, default=None, help="dumbbell junction parameter")
    p.set_defaults(func=cmd_eig, default_format="json")

    p = sub.add_parser("sweep", help="family sweeps, CSV by default")
    common(p)
    p.add_argument("--families", default=",".join(attainable.DEFAULT_FAMILIES),
                   help="comma list of sweep families")
    p.set_defaults(func=cmd_sweep, default_format="csv")

    for name in ("lemma1", "lemma2"):
        p = sub.add_parser(name, help=f"{name} bound over an eps grid")
        common(p, grid=False)
        p.add_argument("--eps", type=float, default=None, help="single eps")
        p.add_argument("--eps-grid", default="default", help="comma list or 'default'")
        p.add_argument("--eps-max", type=float, default=0.2)
        p.set_defaults(func=lambda a, w=name: cmd_lemma(a, w), default_format="json")

    p = sub.add_parser("ratio", help="horizontal-tangent ratio curve")
    common(p)
    p.add_argument("--eps-grid", default="default")
    p.add_argument("--eps-max", type=float, default=0.2)
    p.add_argument("--with-grid", action="store_true",
                   help="add grid-path ratios for eps >= --grid-eps-min")
    p.add_argument("--grid-eps-min", type=float, default=0.1)
    p.set_defaults(func=cmd_ratio, default_format="csv")

    p = sub.add_parser("verify", help="run the default pipeline and verdict")
    common(p)
    p.add_argument("--eps-grid", default="default")
    p.add_argument("--eps-max", type=float, default=0.2)
    p.add_argument("--no-grid-check", action="store_true",
                   help="skip the grid cross-check of the bounds")
    p.add_argument("--grid-check-eps", type=float, default=0.2,
                   help="grid-solve dumbbells with eps >= this for the cross-check")
    p.add_argument("--data-out", default=None, help="ratio-curve CSV path")
    p.set_defaults(func=cmd_verify, default_format="json")

    p = sub.add_parser("plotdata", help="attainable cloud and region boundary CSVs")
    common(p)
    p.set_defaults(func=cmd_plotdata, default_format="csv")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except (ConfigError,) as exc:
        sys.stderr.write(_dump_json({"error": str(exc), "kind": "config"}) + "\n")
        return EXIT_CONFIG if args.command == "verify" else EXIT_FAIL
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(_dump_json({"error": str(exc), "kind": type(exc).__name__}) + "\n")
        return EXIT_FAIL if args.command != "verify" else EXIT_CONFIG
    except RuntimeError as exc:
        sys.stderr.write(_dump_json({"error": str(exc), "kind": type(exc).__name__}) + "\n")
        return EXIT_CONFIG if args.command == "verify" else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
