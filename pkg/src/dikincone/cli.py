"""``conectl``: run constructions, spectra, certificates and meshes from a JSON config.

Usage::

    conectl construct --config cone.json
    conectl spectrum --config cone.json --out report.json
    conectl certify --config cone.json --scan
    conectl falsify --config cone.json --seed 7 --samples 20000
    conectl simulate --config cone.json --step 1e-3 --horizon 10
    conectl standardize --config cone.json
    conectl mesh --config cone.json --out figs/axis --resolution 8

Exit codes: 0 success (or feasible), 2 usage/config error, 3 negative
analysis result (infeasible, counterexample found, trajectory exited),
4 numerical failure.
"""
from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import cone as cone_mod
from . import invariance, mesh, spectral
from .errors import ConeError
from .geometry import DikinEllipsoid, Hyperplane

SCHEMA_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("conectl")

_vector = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_matrix = {"type": "array", "items": _vector, "minItems": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "dimension", "cone"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "dimension": {"type": "integer", "minimum": 2},
        "center": _vector,
        "cone": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["axis", "ones", "normal", "sphere", "matrix"]},
                "index": {"type": "integer", "minimum": 0},
                "normal": _vector,
                "Q": _matrix,
                "axis_hint": _vector,
            },
            "additionalProperties": False,
        },
        "system": {
            "type": "object",
            "required": ["A"],
            "properties": {"A": _matrix},
            "additionalProperties": False,
        },
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "seed": {"type": "integer"},
                "samples": {"type": "integer", "minimum": 1},
                "step": {"type": "number", "exclusiveMinimum": 0},
                "horizon": {"type": "number", "exclusiveMinimum": 0},
                "tol": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "scan": {"type": "boolean"},
                "scan_grid": {
                    "type": "object",
                    "required": ["start", "stop", "num"],
                    "properties": {"start": {"type": "number"}, "stop": {"type": "number"},
                                   "num": {"type": "integer", "minimum": 1}},
                    "additionalProperties": False,
                },
                "initial_points": _matrix,
                "resolution": {"type": "integer", "minimum": 1},
                "method": {"enum": ["rk4", "expm"]},
            },
        },
    },
}

DEFAULT_OPTIONS = {
    "seed": 0,
    "samples": 10_000,
    "step": 1e-3,
    "horizon": 10.0,
    "tol": None,
    "scan": False,
    "resolution": 4,
    "method": "rk4",
}


class ConfigError(Exception):
    """Config is malformed or inconsistent."""


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return validate_config(cfg)


def validate_config(cfg) -> dict:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"schema violation at {where}: {exc.message}") from exc
    n = cfg["dimension"]
    kind = cfg["cone"]["kind"]
    if kind == "matrix":
        Q = cfg["cone"].get("Q")
        if Q is None:
            raise ConfigError("cone.kind 'matrix' needs cone.Q")
        if len(Q) != n or any(len(row) != n for row in Q):
            raise ConfigError(f"cone.Q must be {n}x{n}")
    else:
        c = cfg.get("center")
        if c is None:
            raise ConfigError(f"cone.kind '{kind}' needs a center")
        if len(c) != n:
            raise ConfigError(f"center has length {len(c)}, dimension is {n}")
        if kind != "sphere" and any(v <= 0 for v in c):
            raise ConfigError("Dikin center must be strictly positive")
    if kind == "axis" and cfg["cone"].get("index", 0) >= n:
        raise ConfigError("cone.index out of range")
    if kind == "normal":
        a = cfg["cone"].get("normal")
        if a is None or len(a) != n:
            raise ConfigError("cone.normal must be given with length equal to dimension")
    hint = cfg["cone"].get("axis_hint")
    if hint is not None and len(hint) != n:
        raise ConfigError("cone.axis_hint has the wrong length")
    if "system" in cfg:
        A = cfg["system"]["A"]
        if len(A) != n or any(len(row) != n for row in A):
            raise ConfigError(f"system.A must be {n}x{n}")
    for x in cfg.get("options", {}).get("initial_points", []):
        if len(x) != n:
            raise ConfigError("initial point has the wrong length")
    return cfg


def build(cfg: dict):
    """Construction (or plain cone) described by ``cfg``."""
    cone_cfg = cfg["cone"]
    kind = cone_cfg["kind"]
    if kind == "matrix":
        return cone_mod.LorenzCone(np.array(cone_cfg["Q"], dtype=float), axis_hint=cone_cfg.get("axis_hint"))
    c = np.array(cfg["center"], dtype=float)
    if kind == "axis":
        return cone_mod.construct_axis(c, cone_cfg.get("index", 0))
    if kind == "ones":
        return cone_mod.construct_ones(c)
    if kind == "normal":
        ed = DikinEllipsoid(c)
        return cone_mod.construct_general(ed, Hyperplane.through(cone_cfg["normal"], c))
    return cone_mod.construct_tangent_sphere(c)


def _mat(M):
    return [[float(v) for v in row] for row in np.asarray(M)]


def _vec(v):
    return [float(x) for x in np.asarray(v).ravel()]


def construction_fragment(obj) -> dict:
    if isinstance(obj, cone_mod.LorenzCone):
        return {"kind": "matrix", "Q": _mat(obj.Q), "vertex": _vec(obj.vertex),
                "axis": _vec(obj.axis) if obj.axis_hint is not None else None}
    res = obj.residuals
    return {
        "kind": obj.kind,
        "Q": _mat(obj.Q),
        "gamma": obj.gamma,
        "beta": obj.beta,
        "plane": {"normal": _vec(obj.plane.normal), "offset": obj.plane.offset},
        "base": {"anchor": _vec(obj.base.anchor), "basis": _mat(obj.base.basis),
                 "gram": _mat(obj.base.gram)},
        "residuals": {"subspace": res.subspace, "cross": res.cross, "offset": res.offset},
        "conditions_ok": bool(res.ok(1e-9 * max(1.0, float(np.abs(obj.Q).max())))),
        "vertex": [0.0] * obj.dim,
        "axis": _vec(obj.cone.axis),
    }


def spectrum_fragment(obj) -> dict:
    Q = obj.Q
    det_cf = bounds = None
    extra = {}
    if isinstance(obj, cone_mod.ConeConstruction):
        c = obj.center
        if obj.kind == "axis":
            i = int(np.flatnonzero(obj.plane.normal)[0])
            det_cf = spectral.det_axis_cone(c)
            bounds = spectral.lambda1_bounds_axis_cone(c, i)
            arrow = spectral.axis_cone_arrowhead(c, i)
            extra["arrowhead_eigenvalues"] = _vec(spectral.arrowhead_eigenvalues(arrow))
        elif obj.kind == "ones" and np.all(c == c[0]):
            extra["closed_form_eigenvalues"] = _vec(spectral.equal_c_spectrum(c[0], c.size))
    rep = spectral.spectral_report(Q, det_cf, bounds)
    out = rep.to_dict()
    out["inertia"] = list(rep.inertia)
    out.update(extra)
    return out


def _system(cfg):
    if "system" not in cfg:
        raise ConfigError("this command needs system.A in the config")
    return invariance.LinearSystem(np.array(cfg["system"]["A"], dtype=float))


def _default_initial_points(obj):
    if isinstance(obj, cone_mod.ConeConstruction):
        return [obj.base.anchor]
    return [obj.vertex + obj.axis] if obj.axis_hint is not None else [obj.vertex]


def run(command: str, cfg: dict, out_path=None) -> tuple:
    """Execute ``command``; returns ``(report, negative)``."""
    opts = {**DEFAULT_OPTIONS, **cfg.get("options", {})}
    cfg = {**cfg, "options": opts}
    report = {"schema_version": SCHEMA_VERSION, "command": command, "config": cfg}
    obj = build(cfg)
    negative = False
    report["construction"] = construction_fragment(obj)

    if command == "construct":
        pass
    elif command == "spectrum":
        report["spectrum"] = spectrum_fragment(obj)
    elif command == "certify":
        system = _system(cfg)
        cert = invariance.certify_cone(system, obj, opts["tol"])
        report["certificate"] = cert.to_dict()
        if opts["scan"]:
            grid = opts.get("scan_grid") or {"start": cert.a_star - 5.0, "stop": cert.a_star + 5.0,
                                             "num": 21}
            table = invariance.certificate_scan(
                system, obj, np.linspace(grid["start"], grid["stop"], grid["num"]))
            report["scan"] = [{"a": float(a), "lambda_max": float(f)} for a, f in table]
        negative = not cert.feasible
    elif command == "falsify":
        system = _system(cfg)
        tol = 1e-8 if opts["tol"] is None else opts["tol"]
        ce = invariance.nagumo_falsify(system, obj, opts["samples"], opts["seed"], tol)
        report["falsifier"] = {"samples": opts["samples"], "seed": opts["seed"], "tol": tol,
                               "counterexample": None if ce is None else ce.to_dict()}
        negative = ce is not None
    elif command == "simulate":
        system = _system(cfg)
        pts = opts.get("initial_points") or [_vec(p) for p in _default_initial_points(obj)]
        recs = invariance.simulate_many(system, obj, np.array(pts, dtype=float), opts["step"],
                                        opts["horizon"], opts["method"])
        report["trajectories"] = [r.to_dict() for r in recs]
        negative = any(r.exited for r in recs)
    elif command == "standardize":
        tr = cone_mod.standardize(obj)
        target = np.eye(obj.dim)
        target[-1, -1] = -1.0
        report["standardize"] = {"P": _mat(tr.P), "shift": _vec(tr.shift),
                                 "residual": float(np.abs(tr.P.T @ obj.Q @ tr.P - target).max())}
    elif command == "mesh":
        if not isinstance(obj, cone_mod.ConeConstruction):
            raise ConfigError("mesh needs a constructed cone (not kind 'matrix')")
        if obj.dim != 3:
            raise ConfigError("mesh export supports dimension 3 only")
        meshes = [mesh.cone_mesh(obj, opts["resolution"]), mesh.ellipsoid_mesh(obj, opts["resolution"])]
        stem = Path(out_path) if out_path else Path("mesh")
        obj_path = mesh.write_obj(stem.with_suffix(".obj"), meshes)
        csv_path = mesh.write_csv(stem.with_suffix(".csv"), meshes)
        report["mesh"] = {
            "obj": str(obj_path), "csv": str(csv_path),
            "surfaces": [{"name": m.name, "vertices": len(m.vertices), "faces": len(m.faces),
                          "grid": list(m.grid)} for m in meshes],
        }
    else:  # argparse restricts choices
        raise ConfigError(f"unknown command {command}")
    return report, negative


def _setup_logging():
    level = os.environ.get("CONECTL_LOG", "warn").lower()
    levels = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO,
              "debug": logging.DEBUG}
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(levels.get(level, logging.WARNING))


COMMANDS = ("construct", "spectrum", "certify", "falsify", "simulate", "standardize", "mesh")


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conectl", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="path to the JSON problem config")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--step", type=float)
    p.add_argument("--horizon", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--resolution", type=int)
    p.add_argument("--method", choices=("rk4", "expm"))
    p.add_argument("--scan", action="store_true", help="add a table of lambda_max(S(a)) to certify")
    p.add_argument("--timings", action="store_true", help="add wall-clock timings (breaks byte-identity)")
    p.add_argument("--out", help="report path (mesh: output stem for .obj/.csv)")
    return p


def main(argv=None) -> int:
    _setup_logging()
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    t0 = time.perf_counter()
    try:
        cfg = copy.deepcopy(load_config(args.config))
        overrides = {k: getattr(args, k) for k in ("seed", "samples", "step", "horizon", "tol",
                                                   "resolution", "method")
                     if getattr(args, k) is not None}
        if args.scan:
            overrides["scan"] = True
        if overrides:
            cfg["options"] = {**cfg.get("options", {}), **overrides}
            validate_config(cfg)
        report, negative = run(args.command, cfg, args.out)
    except (ConfigError, ConeError) as exc:
        print(f"conectl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        print(f"conectl: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if args.timings:
        report["timings"] = {"total_seconds": time.perf_counter() - t0}
    try:
        text = json.dumps(report, indent=2, sort_keys=True, allow_nan=False)
    except ValueError as exc:
        print(f"conectl: numeric failure: report has non-finite values ({exc})", file=sys.stderr)
        return EXIT_NUMERIC

    if args.out and args.command != "mesh":
        Path(args.out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    log.info("%s finished in %.3fs", args.command, time.perf_counter() - t0)
    return EXIT_NEGATIVE if negative else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
