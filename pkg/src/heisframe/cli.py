"""Command-line drivers writing plot-ready CSV and JSON tables.

Exit codes: 0 on success, 1 for I/O or parse errors, 2 for domain errors.
Options resolve as command-line flag, then ``--config`` file, then default.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from heisframe import crofton_mc as cm
from heisframe import curve_lab as cl
from heisframe import surface_lab as sl
from heisframe.errors import HeisError
from heisframe.heis_core import HeisPoint
from heisframe.rigid_motion import OrientedFrame

log = logging.getLogger("heisframe")

DEFAULTS = {
    "seed": 0,
    "samples": 1_000_000,
    "step": None,
    "tol": 1e-6,
    "fd_order": cl.FD_ORDER,
    "n_out": None,
    "workers": 1,
    "t0": 0.0,
    "t1": 2 * math.pi,
    "c3": 1.0,
    "a1": 1.0,
    "a2": 0.0,
    "d1": 0.0,
    "d2": 0.0,
    "d3": 0.0,
    "c1": 1.0,
    "c2": 0.0,
    "order": "vu",
    "normalize": False,
    "oracle": 0,
}


class InputError(Exception):
    """Unreadable or malformed input (exit code 1)."""


# -- tables ----------------------------------------------------------------


def _fmt(x):
    return format(float(x), ".17g")


def write_csv(path, header, columns):
    rows = zip(*[np.asarray(c).ravel() for c in columns])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def read_csv(path, names):
    """Columns ``names`` of a CSV file; a header row is optional."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: empty table")
    head = [h.strip() for h in rows[0]]
    try:
        float(head[0])
        index = {n: i for i, n in enumerate(names)}
    except ValueError:
        missing = [n for n in names if n not in head]
        if missing:
            raise InputError(f"{path}: missing columns {missing}") from None
        index = {n: head.index(n) for n in names}
        rows = rows[1:]
    if not rows:
        raise InputError(f"{path}: no data rows")
    try:
        data = np.array([[float(r[index[n]]) for n in names] for r in rows])
    except (ValueError, IndexError) as exc:
        raise InputError(f"{path}: malformed row ({exc})") from exc
    return {n: data[:, i] for i, n in enumerate(names)}


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, allow_nan=True)
        fh.write("\n")


def _sibling(path, suffix):
    p = Path(path)
    return p.with_name(p.stem + suffix)


def _require(cfg, key):
    if cfg.get(key) is None:
        raise InputError(f"--{key.replace('_', '-')} is required")
    return cfg[key]


def read_grid(path):
    d = read_json(path)
    try:
        return sl.SurfaceGrid.from_json(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed grid ({exc})") from exc


def read_frame(path):
    if path is None:
        return OrientedFrame.standard()
    d = read_json(path)
    try:
        return OrientedFrame.from_angle(HeisPoint(*map(float, d["p"])), float(d["angle"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: frame needs 'p' and 'angle' ({exc})") from exc


# -- subcommands -----------------------------------------------------------


def cmd_curve_invariants(cfg):
    cols = read_csv(_require(cfg, "input"), ["t", "x", "y", "z"])
    try:
        trace = cl.CurveTrace(cols["t"], np.stack([cols["x"], cols["y"], cols["z"]], -1))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    sig = cl.invariants(trace, n_out=cfg["n_out"], order=cfg["fd_order"])
    write_csv(_require(cfg, "output"), ["s", "k", "tau"], [sig.arc_grid, sig.k, sig.tau])
    print(json.dumps({"nodes": int(sig.arc_grid.size), "length": float(sig.arc_grid[-1])}))
    return 0


def cmd_curve_reconstruct(cfg):
    cols = read_csv(_require(cfg, "input"), ["s", "k", "tau"])
    try:
        sig = cl.InvariantSignature(cols["s"], cols["k"], cols["tau"])
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    f0 = read_frame(cfg.get("frame"))
    trace, frames = cl.reconstruct(sig, f0)
    out = _require(cfg, "output")
    pts = trace.points
    write_csv(out, ["s", "x", "y", "z"], [trace.params, pts[:, 0], pts[:, 1], pts[:, 2]])
    write_json(cfg.get("frames") or _sibling(out, ".frames.json"), frames.to_json())
    back = cl.invariants(trace, n_out=sig.arc_grid.size, order=cfg["fd_order"])
    residual = float(max(np.max(np.abs(back.k - sig.k)), np.max(np.abs(back.tau - sig.tau))))
    print(json.dumps({"roundtrip_residual": residual, "tol": cfg["tol"], "ok": residual <= cfg["tol"]}))
    return 0


def cmd_geodesic(cfg):
    g = cl.GeodesicParams(**{k: float(cfg[k]) for k in ("c3", "a1", "a2", "d1", "d2", "d3", "c1", "c2")})
    step = cfg["step"] or 1e-3
    n = int(round((cfg["t1"] - cfg["t0"]) / step)) + 1
    if n < 2:
        raise InputError("need t1 > t0 with at least two samples")
    t = np.linspace(cfg["t0"], cfg["t1"], n)
    trace = cl.geodesic(g, t)
    pts = trace.points
    write_csv(_require(cfg, "output"), ["t", "x", "y", "z"], [t, pts[:, 0], pts[:, 1], pts[:, 2]])
    k, tau, _ = cl.pointwise_invariants(trace)
    print(json.dumps({"k": float(np.mean(k)), "k_spread": float(np.ptp(k)), "tau_max": float(np.max(np.abs(tau)))}))
    return 0


def cmd_surface_report(cfg):
    g = read_grid(_require(cfg, "input"))
    if cfg["normalize"]:
        g = sl.normal_parametrize(g)
    c = sl.coefficients(g, tol=cfg["tol"])
    out = _require(cfg, "output")
    I, J = np.meshgrid(np.arange(c.shape[0]), np.arange(c.shape[1]), indexing="ij")
    U, V = np.meshgrid(c.u_grid, c.v_grid, indexing="ij")
    write_csv(out, ["i", "j", "u", "v", "a", "b", "c", "l", "m"], [I, J, U, V, c.a, c.b, c.c, c.l, c.m])
    integ = sl.max_residual(sl.integrability_residual(c))
    pmin = sl.max_residual(sl.pminimal_residual(c))
    summary = {
        "shape": list(c.shape),
        "masked_count": int(c.mask.sum()),
        "integrability_residual": integ,
        "pminimal_residual": pmin,
        "pminimal": bool(pmin <= cfg["tol"]),
        "compatibility_residual": None,
        "metadata": g.metadata,
    }
    try:
        inv = sl.invariants(g, c)
    except HeisError as exc:
        summary["invariants_error"] = str(exc)
    else:
        write_csv(
            _sibling(out, ".invariants.csv"),
            ["i", "j", "u", "v", "alpha", "l", "K"],
            [I, J, U, V, inv.alpha, inv.pmean, inv.gauss],
        )
        summary["compatibility_residual"] = sl.max_residual(sl.surface_integrability_residual(inv, c))
    write_json(_sibling(out, ".summary.json"), summary)
    print(json.dumps(summary))
    return 0


def read_coefficients(path):
    cols = read_csv(path, ["i", "j", "u", "v", "a", "b", "c", "l", "m"])
    i, j = cols["i"].astype(int), cols["j"].astype(int)
    nu, nv = i.max() + 1, j.max() + 1
    if i.size != nu * nv:
        raise InputError(f"{path}: expected {nu * nv} rows for a {nu}x{nv} grid, got {i.size}")
    grid = {}
    for name in ("u", "v", "a", "b", "c", "l", "m"):
        arr = np.full((nu, nv), np.nan)
        arr[i, j] = cols[name]
        grid[name] = arr
    try:
        return sl.SurfaceCoefficients(
            grid["u"][:, 0], grid["v"][0], grid["a"], grid["b"], grid["c"], grid["l"], grid["m"]
        )
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_surface_reconstruct(cfg):
    c = read_coefficients(_require(cfg, "input"))
    f0 = read_frame(cfg.get("frame"))
    g = sl.reconstruct_surface(c, f0, order=cfg["order"], tol_int=cfg["tol"])
    write_json(_require(cfg, "output"), g.to_json())
    print(json.dumps({"shape": list(g.shape), "integrability_residual": sl.max_residual(sl.integrability_residual(c))}))
    return 0


def cmd_crofton(cfg):
    path = _require(cfg, "input")
    n = int(cfg["samples"])
    if n < 1:
        raise HeisError(f"need at least one sample, got {n}")
    if str(path).lower().endswith(".obj"):
        try:
            mesh = cm.read_obj(path)
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        area = cm.mesh_p_area(mesh)
    else:
        g = read_grid(path)
        mesh = cm.mesh_from_grid(g)
        area = cm.p_area(g)
    est = cm.crofton_estimate(mesh, n, int(cfg["seed"]), workers=int(cfg["workers"]))
    extra = {"mesh_p_area": cm.mesh_p_area(mesh)}
    if cfg["oracle"]:
        extra["tensor_oracle"] = cm.tensor_quadrature(mesh, int(cfg["oracle"]))
    out = est.to_json(p_area=area, **extra)
    text = json.dumps(out, indent=2)
    if cfg.get("output"):
        write_json(cfg["output"], out)
    print(text)
    return 0


COMMANDS = {
    "curve-invariants": cmd_curve_invariants,
    "curve-reconstruct": cmd_curve_reconstruct,
    "geodesic": cmd_geodesic,
    "surface-report": cmd_surface_report,
    "surface-reconstruct": cmd_surface_reconstruct,
    "crofton": cmd_crofton,
}


# -- argument handling -----------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--input", "-i")
    common.add_argument("--output", "-o")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--step", type=float)
    common.add_argument("--tol", type=float)
    common.add_argument("--fd-order", type=int, choices=(2, 4))
    common.add_argument("--config", help="JSON file of option values")
    common.add_argument("--emit-config", metavar="PATH", help="write the resolved options as JSON ('-' for stdout)")

    parser = argparse.ArgumentParser(prog="heisframe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    add = lambda name, **kw: sub.add_parser(name, parents=[common], argument_default=argparse.SUPPRESS, **kw)  # noqa: E731
    p = add("curve-invariants", help="curve CSV (t,x,y,z) to signature CSV (s,k,tau)")
    p.add_argument("--n-out", type=int)
    p = add("curve-reconstruct", help="signature CSV to curve CSV and frame JSON")
    p.add_argument("--frame", help="initial frame JSON {p, angle}")
    p.add_argument("--frames", help="frame JSON output path")
    p = add("geodesic", help="closed-form geodesic sampled to CSV")
    for name in ("t0", "t1", "c3", "a1", "a2", "d1", "d2", "d3", "c1", "c2"):
        p.add_argument(f"--{name}", type=float)
    p = add("surface-report", help="grid JSON to coefficient and invariant tables")
    p.add_argument("--normalize", action="store_true", help="resample along the foliation first")
    p = add("surface-reconstruct", help="coefficient CSV to grid JSON")
    p.add_argument("--frame")
    p.add_argument("--order", choices=("vu", "uv"))
    p = add("crofton", help="Monte Carlo line integral over a mesh")
    p.add_argument("--workers", type=int)
    p.add_argument("--oracle", type=int, metavar="RES", help="also run the tensor quadrature at RES^3")
    return parser


def resolve(args):
    given = vars(args).copy()
    command = given.pop("command")
    cfg = dict(DEFAULTS)
    if given.get("config"):
        loaded = read_json(given["config"])
        if not isinstance(loaded, dict):
            raise InputError("config file must hold a JSON object")
        cfg.update({k.replace("-", "_"): v for k, v in loaded.items()})
    cfg.update(given)
    cfg["command"] = command
    return cfg


def _setup_logging():
    level = os.environ.get("HEIS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        if cfg.get("emit_config"):
            dump = {k: v for k, v in cfg.items() if k not in ("emit_config", "config")}
            if cfg["emit_config"] == "-":
                print(json.dumps(dump, indent=2, sort_keys=True))
            else:
                write_json(cfg["emit_config"], dump)
        log.info("running %s", cfg["command"])
        return COMMANDS[cfg["command"]](cfg)
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except HeisError as exc:
        detail = ""
        for attr in ("param", "node"):
            if getattr(exc, attr, None) is not None:
                detail = f" ({attr}={getattr(exc, attr)})"
        print(f"domain error: {type(exc).__name__}: {exc}{detail}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
