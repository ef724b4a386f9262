"""Batch front-end: ``hilmod run | compare | validate CONFIG [--out PATH]``.

Every task is parsed and checked before anything runs, and the report is
written only after all tasks succeed, so a failing job leaves no output.
Errors go to stderr as one JSON object carrying the failing task id.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    COMPARE_SCHEMA,
    RUN_SCHEMA,
    load_json,
    module_from_config,
    parse_complex,
    parse_point,
    tolerances,
    validate,
)
from .curvature import (
    NonCanonicalWarning,
    compare_curvature,
    curvature_at,
    nk_curvature_closed,
    nk_curvature_numeric,
    nk_curvature_tensor,
    nk_module,
    section_limit,
    DEFAULT_STEP,
    _check_nk,
)
from .errors import ArgumentError, ConfigError, HilmodError, NumericalAnomaly, TruncationError
from .frame import frame_annihilation_residual, frame_series, polar_parts, projected_kernel_dim
from .linop import joint_kernel
from .privilege import Domain, PolyMatrix, privilege_verdict
from .report import SCHEMA_VERSION, complex_array, dumps, provenance, write_atomic
from .stalk import characteristic_space, gleason_report, minimal_generators, tilde_space

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ANOMALY = 3
EXIT_TRUNCATION = 4


class TaskFailure(Exception):
    def __init__(self, task_id, error: Exception):
        super().__init__(str(error))
        self.task_id = task_id
        self.error = error


def exit_code(error: Exception) -> int:
    # TruncationTooSmallError is also an ArgumentError; truncation wins
    if isinstance(error, TruncationError):
        return EXIT_TRUNCATION
    if isinstance(error, NumericalAnomaly):
        return EXIT_ANOMALY
    return EXIT_CONFIG


# --- task preparation ----------------------------------------------------------------


def _points(raw, m: int, inside: bool = True) -> list[np.ndarray]:
    pts = [np.asarray(parse_point(p), dtype=complex) for p in raw]
    for p in pts:
        if p.shape != (m,):
            raise ConfigError(f"point {raw} does not have {m} coordinates")
        if inside and np.any(np.abs(p) >= 1):
            raise ConfigError(f"point {p.tolist()} lies outside the open polydisc")
    return pts


def _axis(extent: float, size: int) -> list[float]:
    if size == 1:
        return [0.0]
    # symmetric formula keeps the midpoint exactly 0
    return [extent * (2 * i / (size - 1) - 1) for i in range(size)]


def _prepare_task(task: dict, setup, tol: dict):
    """Check a task's parameters and return a zero-argument runner."""
    kind = task["type"]
    module = setup.module
    m = module.m
    eps = tol["rank"]
    starve = tol["starvation"]

    if kind == "joint_kernel_grid":
        if m != 2:
            raise ConfigError("joint_kernel_grid needs a two-variable module")
        axis = _axis(task["extent"], task["size"])

        def run():
            dims, gaps = [], []
            for x in axis:
                row_d, row_g = [], []
                for y in axis:
                    jk = joint_kernel(module, [x, y], eps, starve)
                    row_d.append(jk.dim)
                    row_g.append(list(jk.gap))
                dims.append(row_d)
                gaps.append(row_g)
            return {"axis": axis, "dimensions": dims, "singular_gaps": gaps,
                    "layout": "dimensions[i][j] is the value at (axis[i], axis[j])"}

        return run

    if kind == "joint_kernel":
        pts = _points(task["points"], m)

        def run():
            out = []
            for p in pts:
                jk = joint_kernel(module, p, eps, starve)
                out.append({"point": complex_array(p), "dimension": jk.dim, "singular_gap": list(jk.gap),
                            "top_degree_mass": jk.top_mass, "basis": complex_array(jk.basis.T)})
            return {"points": out}

        return run

    if kind == "curvature":
        (w0,) = _points([task["base_point"]], m)
        convention = task.get("convention", "jet")

        def run():
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", NonCanonicalWarning)
                T = curvature_at(module, w0, eps, convention, list(setup.generators), starve)
            blocks = {f"B{i + 1}{j + 1}": complex_array(T.B[i, j]) for i in range(m) for j in range(m)}
            return {
                "base_point": complex_array(w0),
                "convention": convention,
                "rank": T.d,
                "blocks": blocks,
                "canonical": T.canonical,
                "normal_frame": T.normal_frame,
                "hermitian_defect": T.hermitian_defect(),
                "warnings": [str(w.message) for w in caught if issubclass(w.category, NonCanonicalWarning)],
            }

        return run

    if kind == "gleason":
        pts = _points(task["points"], m)

        def run():
            out = []
            for p in pts:
                g = gleason_report(module, list(setup.generators), p, eps)
                out.append({"point": complex_array(p), "d_stalk": g.d_stalk, "d_kernel": g.d_kernel,
                            "equal": g.equal, "anomaly": g.anomaly,
                            "stalk_generators": [list(a) for a in g.stalk_generators],
                            "singular_gap": list(g.singular_gap)})
            return {"points": out}

        return run

    if kind == "stalk":
        pts = _points(task["points"], m)

        def run():
            out = []
            for p in pts:
                s = minimal_generators(list(setup.generators), p)
                out.append({"point": complex_array(p), "d": s.d, "unit": s.is_unit,
                            "generators": [list(a) for a in s.generators]})
            return {"points": out}

        return run

    if kind == "characteristic_space":
        cap = task["cap"]
        with_tilde = task.get("tilde", False)

        def run():
            V = characteristic_space(setup.ideal, None, cap)
            out = {"cap": cap, "basis": [list(b) for b in V.basis]}
            if with_tilde:
                Vt = tilde_space(V)
                out["tilde"] = {"cap": Vt.cap, "basis": [list(b) for b in Vt.basis]}
            return out

        return run

    if kind == "frame_identities":
        (w0,) = _points([task["base_point"]], m)
        pts = _points(task["points"], m)
        order = task.get("order", 2)

        def run():
            polar = polar_parts(module, w0, eps, starve)
            frame = frame_series(module, w0, order, eps, starve, polar)
            rows = []
            for p in pts:
                rows.append({
                    "point": complex_array(p),
                    "annihilation_residual": frame_annihilation_residual(module, w0, p, order, eps, frame),
                    "projected_kernel_dim": projected_kernel_dim(module, polar, p, eps),
                })
            return {
                "base_point": complex_array(w0),
                "order": order,
                "left_residual": polar.left_residual(),
                "right_residual": polar.right_residual(),
                "R_norm": polar.R_norm,
                "radius": polar.radius,
                "points": rows,
            }

        return run

    if kind == "privilege":
        try:
            A = PolyMatrix.from_nested(task["matrix"], m)
        except ArgumentError as exc:
            raise ConfigError(str(exc)) from exc
        domain = Domain(task["domain"], m)
        density = task.get("density", 16)

        def run():
            rep = privilege_verdict(A, domain, density, eps)
            return {
                "domain": domain.kind,
                "density": density,
                "sample_count": rep.sample_count,
                "verdict": rep.verdict,
                "ranks": {str(r): c for r, c in rep.ranks.items()},
                "witnesses": {str(r): complex_array(z) for r, z in rep.witnesses.items()},
                "ambiguous": rep.ambiguous,
                "min_nonzero_singular": rep.min_nonzero_singular,
                "rests_on_product_remark": domain.rests_on_remark,
                "note": rep.note,
            }

        return run

    if kind == "nk_curvature":
        n, k = task["n"], task["k"]
        try:
            _check_nk(n, k)
        except ArgumentError as exc:
            raise ConfigError(str(exc)) from exc
        thetas = [parse_complex(t) for t in task["thetas"]]
        h = task.get("step", DEFAULT_STEP)

        def run():
            cols = ["theta_re", "theta_im", "numeric", "closed", "abs_error"]
            rows = []
            for t in thetas:
                num = nk_curvature_numeric(n, k, t, h)
                closed = nk_curvature_closed(n, k, t)
                rows.append([t.real, t.imag, num, closed, abs(num - closed)])
            csv = ",".join(cols) + "\n" + "".join(",".join(repr(float(v)) for v in r) + "\n" for r in rows)
            return {"n": n, "k": k, "step": h, "columns": cols, "rows": rows, "csv": csv}

        return run

    if kind == "section_limit":
        n, k = task["n"], task["k"]
        try:
            _check_nk(n, k)
        except ArgumentError as exc:
            raise ConfigError(str(exc)) from exc
        theta = parse_complex(task["theta"])

        def run():
            nk_mod = nk_module(n, k)
            coeffs = section_limit(nk_mod, n, theta)
            scale = np.abs(coeffs).max()
            terms = [{"monomial": list(a), "coefficient": complex(c)}
                     for a, c in zip(nk_mod.basis, coeffs) if abs(c) > 1e-12 * scale]
            return {"n": n, "k": k, "theta": complex(theta), "truncation": nk_mod.N, "terms": terms}

        return run

    raise ConfigError(f"unknown task type {kind!r}")


# --- subcommands ------------------------------------------------------------------------


def _load(path, schema) -> dict:
    data = load_json(path)
    validate(data, schema)
    return data


def _is_compare(data) -> bool:
    return isinstance(data, dict) and ("modules" in data or "nk" in data)


def prepare_run(data: dict) -> tuple[list, dict, object]:
    tol = tolerances(data.get("tolerances"))
    try:
        setup = module_from_config(data)
    except HilmodError as exc:
        raise TaskFailure(None, exc) from exc
    ids = [t["id"] for t in data["tasks"]]
    if len(set(ids)) != len(ids):
        raise TaskFailure(None, ConfigError("task ids must be unique"))
    runners = []
    for task in data["tasks"]:
        try:
            runners.append((task, _prepare_task(task, setup, tol)))
        except HilmodError as exc:
            raise TaskFailure(task["id"], exc) from exc
    return runners, tol, setup


def execute_run(data: dict) -> str:
    runners, tol, setup = prepare_run(data)
    results = []
    for task, run in runners:
        try:
            res = run()
        except HilmodError as exc:
            raise TaskFailure(task["id"], exc) from exc
        results.append({"task": task, "result": res})
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "run",
        "provenance": provenance(__version__, tol, setup.module.N),
        "config": {"kernel": data["kernel"], "ideal": data["ideal"], "truncation": data["truncation"]},
        "tasks": results,
    }
    return dumps(doc)


def _compare_tensors(data: dict, tol: dict):
    if "nk" in data:
        spec = data["nk"]
        theta = parse_complex(spec["theta"])
        try:
            T1 = nk_curvature_tensor(*spec["first"], theta)
            T2 = nk_curvature_tensor(*spec["second"], theta)
        except ArgumentError as exc:
            raise ConfigError(str(exc)) from exc
        return T1, T2, None, {"mode": "nk", **spec}
    setups = []
    for block in data["modules"]:
        setups.append(module_from_config(block))
    ms = {s.module.m for s in setups}
    if len(ms) != 1:
        raise ConfigError("modules disagree on the number of variables")
    (w0,) = _points([data["base_point"]], ms.pop())
    Ts = []
    for s in setups:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonCanonicalWarning)
            Ts.append(curvature_at(s.module, w0, tol["rank"], "jet", list(s.generators), tol["starvation"]))
    if Ts[0].B.shape != Ts[1].B.shape:
        raise ArgumentError(f"curvature shapes differ: {Ts[0].B.shape} vs {Ts[1].B.shape}")
    return Ts[0], Ts[1], max(s.module.N for s in setups), {"mode": "modules", "base_point": complex_array(w0)}


def execute_compare(data: dict) -> str:
    tol = tolerances(data.get("tolerances"))
    try:
        T1, T2, N, echo = _compare_tensors(data, tol)
        cmp = compare_curvature(T1, T2, tol["compare"])
    except HilmodError as exc:
        raise TaskFailure("compare", exc) from exc
    result = {
        "verdict": cmp.verdict,
        "invariant": cmp.invariant,
        "values": to_values(cmp.values),
        "exact": cmp.exact,
        "unitary": None if cmp.unitary is None else complex_array(cmp.unitary),
        "first": {"blocks": complex_array(T1.B)},
        "second": {"blocks": complex_array(T2.B)},
    }
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "compare",
        "provenance": provenance(__version__, tol, N),
        "config": echo,
        "result": result,
    }
    return dumps(doc)


def to_values(values):
    if values is None:
        return None
    return [np.asarray(v, dtype=complex) for v in values]


def execute_validate(data: dict) -> str:
    if _is_compare(data):
        validate(data, COMPARE_SCHEMA)
        kind = "compare"
    else:
        validate(data, RUN_SCHEMA)
        prepare_run(data)
        kind = "run"
    return dumps({"schema_version": SCHEMA_VERSION, "command": "validate", "config_kind": kind, "valid": True})


def _default_out(config: Path, command: str) -> Path:
    return config.with_name(f"{config.stem}.{command}.report.json")


def _fail(task_id, error: Exception) -> int:
    code = exit_code(error)
    payload = {"error": type(error).__name__, "message": str(error), "task_id": task_id, "exit_code": code}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hilmod", description="Joint kernels, curvature and stalk reports for Hilbert modules.")
    parser.add_argument("--version", action="version", version=f"hilmod {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("run", "execute the tasks of a job config"),
        ("compare", "compare curvature of two modules"),
        ("validate", "check a config without running it"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", type=Path)
        p.add_argument("--out", type=Path, default=None, help="report path (default: next to the config)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_CONFIG
    try:
        data = load_json(args.config)
        if args.command == "run":
            validate(data, RUN_SCHEMA)
            text = execute_run(data)
        elif args.command == "compare":
            validate(data, COMPARE_SCHEMA)
            text = execute_compare(data)
        else:
            text = execute_validate(data)
    except TaskFailure as exc:
        return _fail(exc.task_id, exc.error)
    except HilmodError as exc:
        return _fail(None, exc)
    out = args.out if args.out is not None else _default_out(args.config, args.command)
    write_atomic(out, text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
