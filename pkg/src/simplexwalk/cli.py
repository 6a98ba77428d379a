"""Command-line front end.

Five subcommands drive the library from JSON configs:

    simulate     ensemble of simplex walks -> samples.csv + summary.json
    verify       fixed-point residual of a density candidate -> report.json
    assumptions  certify (eta, epsilon, c) for a model -> report.json
    geometry     round-trip / Jacobian / inclusion checks -> report.json
    urn          urn-walk trajectories, ensembles, couplings -> csv + json

Contract: exit 0 on success; 1 on any config problem (malformed JSON, schema
violation, invalid parameter values) with no files written; 2 on a runtime
failure; 3 when ``--assert`` is set and a threshold breach occurred (the
artifacts documenting the breach are still written).  Human-readable progress
goes to stderr only; artifacts are byte-stable functions of (config, seed)
and never depend on ``--threads``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import urn
from .assumptions import certify, verify_inclusions
from .chain import (
    ChainConfig,
    ChoiceFunction,
    ConstantChoice,
    LinearChoice,
    Piecewise1DChoice,
    run_ensemble,
)
from .distributions import (
    BetaJump,
    DirichletParams,
    JumpLaw,
    PointMassJump,
    UniformJump,
    arcsine_cdf,
    dirichlet_marginal,
    jump_cdf,
)
from .errors import ConfigError, SimplexWalkError
from .geometry import (
    apply_G,
    forward_T,
    inverse_T,
    invert_G,
    jacobian_det_Ginv,
    jacobian_det_Tinv,
    require_admissible,
    rotate_R,
    rotate_R_inv,
    sample_simplex,
)
from .io import read_config, write_csv, write_json
from .rng import make_stream
from .stats import ks_one_sample, ks_report
from .stationarity import (
    dirichlet_candidate,
    interior_grid_1d,
    interior_grid_2d,
    residual_grid,
    uniform_candidate,
)

__all__ = ["main"]

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_ASSERT = 0, 1, 2, 3

BAND_LO, BAND_HI = 1.0 / 13.0, 12.0 / 13.0


# ---------------------------------------------------------------------------
# Config schemas (draft 2020-12; unknown keys rejected everywhere)


def _num(**kw) -> dict:
    return {"type": "number", **kw}


def _int(**kw) -> dict:
    return {"type": "integer", **kw}


def _arr(items: dict, **kw) -> dict:
    return {"type": "array", "items": items, **kw}


def _obj(props: dict, required: list[str]) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": required,
        "additionalProperties": False,
    }


_CHOICE = {
    "oneOf": [
        _obj({"type": {"const": "constant"}, "p": _arr(_num(minimum=0), minItems=1)},
             ["type", "p"]),
        _obj({"type": {"const": "linear"}, "beta": _arr(_num(), minItems=2)},
             ["type", "beta"]),
        _obj({"type": {"const": "piecewise"},
              "breakpoints": _arr(_num(exclusiveMinimum=0, exclusiveMaximum=1)),
              "values": _arr(_num(minimum=0, maximum=1), minItems=1)},
             ["type", "values"]),
    ]
}

_JUMP = {
    "oneOf": [
        _obj({"type": {"const": "beta"}, "a": _num(exclusiveMinimum=0),
              "b": _num(exclusiveMinimum=0)}, ["type", "a", "b"]),
        _obj({"type": {"const": "uniform"}}, ["type"]),
        _obj({"type": {"const": "point_mass"}, "v": _num(minimum=0, maximum=1)},
             ["type", "v"]),
    ]
}

_DIRICHLET = _obj(
    {"type": {"const": "dirichlet"}, "alpha": _arr(_num(exclusiveMinimum=0), minItems=2)},
    ["type", "alpha"],
)

_TARGET = {"oneOf": [_DIRICHLET, _obj({"type": {"const": "arcsine"}}, ["type"])]}
_CANDIDATE = {"oneOf": [_DIRICHLET, _obj({"type": {"const": "uniform"}}, ["type"])]}


def _command_schema(props: dict, required: list[str]) -> dict:
    full = {"schema_version": {"const": SCHEMA_VERSION}, "seed": _int(minimum=0)}
    full.update(props)
    return _obj(full, ["schema_version"] + required)


def _urn_mode(mode: str, props: dict, required: list[str]) -> dict:
    full = {
        "schema_version": {"const": SCHEMA_VERSION},
        "seed": _int(minimum=0),
        "mode": {"const": mode},
    }
    full.update(props)
    return _obj(full, ["schema_version", "mode"] + required)


SCHEMAS: dict[str, dict] = {
    "simulate": _command_schema(
        {
            "d": _int(minimum=1),
            "choice": _CHOICE,
            "jump": _JUMP,
            "steps": _int(minimum=1),
            "ensemble": _int(minimum=1),
            "initial": _arr(_num(minimum=0)),
            "target": _TARGET,
            "alpha_level": {"enum": [0.01, 0.001]},
        },
        ["d", "choice", "jump", "steps", "ensemble"],
    ),
    "verify": _command_schema(
        {
            "d": {"enum": [1, 2]},
            "choice": _CHOICE,
            "jump": _JUMP,
            "candidate": _CANDIDATE,
            "tolerance": _num(exclusiveMinimum=0),
            "grid_points": _int(minimum=3),
            "margin": _num(exclusiveMinimum=0, exclusiveMaximum=0.5),
        },
        ["d", "choice", "jump", "candidate"],
    ),
    "assumptions": _command_schema(
        {
            "d": _int(minimum=1),
            "choice": _CHOICE,
            "jump": _JUMP,
            "delta": _num(exclusiveMinimum=0, exclusiveMaximum=1),
            "s": _num(exclusiveMinimum=0, exclusiveMaximum=1),
            "t": _num(exclusiveMinimum=0, exclusiveMaximum=1),
            "grid_resolution": _int(minimum=10),
        },
        ["d", "choice", "jump", "delta", "s", "t"],
    ),
    "geometry": _command_schema(
        {
            "d": _int(minimum=1),
            "delta": _num(exclusiveMinimum=0, exclusiveMaximum=1),
            "s": _num(exclusiveMinimum=0, exclusiveMaximum=1),
            "t": _num(exclusiveMinimum=0, exclusiveMaximum=1),
            "n_samples": _int(minimum=1),
            "n_checks": _int(minimum=1),
            "target_shrink": _num(minimum=0),
            "roundtrip_tol": _num(exclusiveMinimum=0),
            "jacobian_tol": _num(exclusiveMinimum=0),
        },
        ["d", "delta", "s", "t"],
    ),
    "urn": {
        "oneOf": [
            _urn_mode("single", {
                "n_steps": _int(minimum=1),
                "record_every": _int(minimum=1),
                "z_init": _num(minimum=0, maximum=1),
            }, ["n_steps"]),
            _urn_mode("ensemble", {
                "n_runs": _int(minimum=1),
                "n_steps": _int(minimum=1),
                "snapshots": _arr(_int(minimum=1)),
                "ks_threshold": _num(exclusiveMinimum=0),
            }, ["n_runs", "n_steps"]),
            _urn_mode("coupled", {
                "n_total": _int(minimum=2),
                "N0": _int(minimum=1),
                "eps_band": _num(exclusiveMinimum=0, exclusiveMaximum=0.5),
                "runs": _int(minimum=1),
                "record_every": _int(minimum=1),
            }, ["n_total", "N0", "eps_band"]),
            _urn_mode("frozen", {
                "eps_band": _num(minimum=0, exclusiveMaximum=0.5),
                "n_steps": _int(minimum=1),
                "n_chains": _int(minimum=1),
                "reference": _obj({"a": _num(exclusiveMinimum=0),
                                   "b": _num(exclusiveMinimum=0)}, ["a", "b"]),
            }, ["eps_band", "n_steps", "n_chains"]),
        ]
    },
}

_DEFAULTS: dict[str, dict] = {
    "simulate": {"seed": 0, "alpha_level": 0.01},
    "verify": {"seed": 0, "tolerance": 1e-6, "margin": 0.05},
    "assumptions": {"seed": 0, "grid_resolution": 200},
    "geometry": {"seed": 0, "n_samples": 100_000, "n_checks": 2_000,
                 "target_shrink": 0.0, "roundtrip_tol": 1e-12, "jacobian_tol": 1e-6},
}

_URN_DEFAULTS: dict[str, dict] = {
    "single": {"seed": 0, "record_every": 1, "z_init": 0.5},
    "ensemble": {"seed": 0, "snapshots": [], "ks_threshold": 0.05},
    "coupled": {"seed": 0, "runs": 1, "record_every": 1},
    "frozen": {"seed": 0},
}


def resolve_config(command: str, raw: dict, seed_override: int | None) -> dict:
    """Schema-validate, fill defaults, apply the ``--seed`` override.

    The returned dict is the provenance record embedded in every artifact.
    """
    try:
        jsonschema.validate(raw, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise ConfigError(f"schema violation at {path}: {exc.message}") from exc
    cfg = dict(raw)
    if command == "urn":
        defaults = _URN_DEFAULTS[cfg["mode"]]
    else:
        defaults = _DEFAULTS[command]
    for k, v in defaults.items():
        cfg.setdefault(k, v)
    if command == "verify":
        cfg.setdefault("grid_points", 99 if cfg["d"] == 1 else 50)
    if seed_override is not None:
        cfg["seed"] = seed_override
    return cfg


# ---------------------------------------------------------------------------
# Domain-object builders (run during the config phase: failures are exit 1)


def build_choice(spec: dict) -> ChoiceFunction:
    if spec["type"] == "constant":
        return ConstantChoice(tuple(spec["p"]))
    if spec["type"] == "linear":
        return LinearChoice(tuple(spec["beta"]))
    return Piecewise1DChoice(tuple(spec.get("breakpoints", ())), tuple(spec["values"]))


def build_jump(spec: dict) -> JumpLaw:
    if spec["type"] == "beta":
        return BetaJump(spec["a"], spec["b"])
    if spec["type"] == "uniform":
        return UniformJump()
    return PointMassJump(spec["v"])


def _check_choice_dim(cf: ChoiceFunction, d: int) -> None:
    if cf.d != d:
        raise ConfigError(f"choice function has dimension {cf.d}, config says d={d}")


# ---------------------------------------------------------------------------
# Command implementations.  Each prepare_* performs every validation that can
# fail from bad parameters and returns a runner; the runner only computes and
# returns (files, breaches, notes).  files entries are either
# ("name.csv", "csv", header, rows) or ("name.json", "json", body).


def prepare_simulate(cfg: dict, threads: int):
    cc = ChainConfig(
        d=cfg["d"],
        choice=build_choice(cfg["choice"]),
        jump=build_jump(cfg["jump"]),
        steps=cfg["steps"],
        ensemble=cfg["ensemble"],
        seed=cfg["seed"],
        initial=cfg.get("initial"),
    )
    target = cfg.get("target")
    marginals = None
    if target is not None and target["type"] == "dirichlet":
        alpha = target["alpha"]
        if len(alpha) != cfg["d"] + 1:
            raise ConfigError(
                f"target dirichlet needs {cfg['d'] + 1} alpha entries, got {len(alpha)}"
            )
        params = DirichletParams(tuple(alpha))
        marginals = [
            (f"z{i}", lambda x, i=i: jump_cdf(dirichlet_marginal(params, i), x))
            for i in range(1, cfg["d"] + 1)
        ]
    elif target is not None:
        if cfg["d"] != 1:
            raise ConfigError("arcsine target only applies to d=1")
        marginals = [("z1", arcsine_cdf)]

    def run():
        Z = run_ensemble(cc, n_threads=threads)
        header = [f"z{i + 1}" for i in range(cfg["d"])]
        body: dict = {
            "n": int(Z.shape[0]),
            "d": cfg["d"],
            "steps": cfg["steps"],
            "mean": Z.mean(axis=0).tolist(),
            "variance": Z.var(axis=0, ddof=1).tolist() if Z.shape[0] > 1
            else [0.0] * cfg["d"],
        }
        breaches: list[str] = []
        notes = [f"simulate: {cfg['ensemble']} chains x {cfg['steps']} steps (d={cfg['d']})"]
        if marginals is not None:
            reports = []
            for name, cdf in marginals:
                col = Z[:, int(name[1:]) - 1]
                rep = ks_report(col, cdf, alpha=cfg["alpha_level"])
                rd = rep.to_dict()
                rd["marginal"] = name
                reports.append(rd)
                notes.append(
                    f"  KS {name}: {rep.statistic:.5f} vs {rep.threshold:.5f} -> "
                    + ("pass" if rep.passed else "FAIL")
                )
                if not rep.passed:
                    breaches.append(f"KS breach on marginal {name}")
            body["target_reports"] = reports
        files = [
            ("samples.csv", "csv", header, Z),
            ("summary.json", "json", body),
        ]
        return files, breaches, notes

    return run


def prepare_verify(cfg: dict, threads: int):
    cf = build_choice(cfg["choice"])
    _check_choice_dim(cf, cfg["d"])
    g = build_jump(cfg["jump"])
    cand_spec = cfg["candidate"]
    if cand_spec["type"] == "dirichlet":
        alpha = cand_spec["alpha"]
        if len(alpha) != cfg["d"] + 1:
            raise ConfigError(
                f"candidate dirichlet needs {cfg['d'] + 1} alpha entries, got {len(alpha)}"
            )
        cand = dirichlet_candidate(DirichletParams(tuple(alpha)))
    else:
        cand = uniform_candidate(cfg["d"])
    if cfg["d"] == 1:
        points = interior_grid_1d(cfg["grid_points"], cfg["margin"])
    else:
        points = interior_grid_2d(cfg["grid_points"], cfg["margin"])

    def run():
        res = residual_grid(cand, cf, g, points)
        worst = int(np.argmax(res))
        body = {
            "n_points": int(res.shape[0]),
            "max_residual": float(res.max()),
            "mean_residual": float(res.mean()),
            "argmax": points[worst].tolist(),
            "tolerance": cfg["tolerance"],
            "passed": bool(res.max() < cfg["tolerance"]),
        }
        breaches = [] if body["passed"] else [
            f"max residual {body['max_residual']:.3e} exceeds {cfg['tolerance']:.1e}"
        ]
        notes = [
            f"verify: residual on {body['n_points']} grid points "
            f"max={body['max_residual']:.3e} -> "
            + ("pass" if body["passed"] else "FAIL")
        ]
        return [("report.json", "json", body)], breaches, notes

    return run


def prepare_assumptions(cfg: dict, threads: int):
    cf = build_choice(cfg["choice"])
    _check_choice_dim(cf, cfg["d"])
    g = build_jump(cfg["jump"])

    def run():
        rep = certify(
            g, cf, cfg["delta"], cfg["s"], cfg["t"],
            grid_resolution=cfg["grid_resolution"],
            rng=make_stream(cfg["seed"]),
        )
        body = {"report": rep.to_dict()}
        failing = ", ".join(sorted({w["check"] for w in rep.witnesses}))
        breaches = [] if rep.certified else [
            f"assumptions not certified (failing: {failing})"
        ]
        c_text = "n/a" if rep.c is None else f"{rep.c:.6g}"
        notes = [
            "assumptions: "
            + ("certified" if rep.certified else "NOT certified")
            + f" (eta={rep.eta:.6g}, epsilon={rep.epsilon:.6g}, c={c_text})"
        ]
        return [("report.json", "json", body)], breaches, notes

    return run


def _fd_jacobian_det(func, pts: np.ndarray, h: float = 1e-6) -> np.ndarray:
    n, d = pts.shape
    J = np.empty((n, d, d))
    for k in range(d):
        e = np.zeros(d)
        e[k] = h
        J[:, :, k] = (func(pts + e) - func(pts - e)) / (2.0 * h)
    return np.linalg.det(J)


def _interior_simplex(rng: np.random.Generator, d: int, n: int, floor: float = 0.1) -> np.ndarray:
    z = sample_simplex(rng, d, n)
    return floor / (d + 1.0) + (1.0 - 2.0 * floor) * z


def prepare_geometry(cfg: dict, threads: int):
    d = cfg["d"]
    require_admissible(d, cfg["delta"], cfg["s"], cfg["t"])

    def run():
        rng = make_stream(cfg["seed"])
        n = cfg["n_checks"]

        x = 0.05 + 0.9 * rng.random((n, d))
        rt_T = float(np.max(np.abs(inverse_T(forward_T(x)) - x)))
        z = _interior_simplex(rng, d, n)
        u = _interior_simplex(rng, d, n)
        rt_G = float(np.max(np.abs(invert_G(z, apply_G(z, u)) - u)))
        rt_R = 0.0
        for j in range(d + 1):
            w = rotate_R(j, u)
            rt_R = max(rt_R, float(np.max(np.abs(rotate_R_inv(j, w) - u))))

        fd_t = np.abs(_fd_jacobian_det(inverse_T, z))
        ana_t = np.asarray(jacobian_det_Tinv(z))
        jac_T = float(np.max(np.abs(fd_t - ana_t) / ana_t))
        fd_g = np.abs(_fd_jacobian_det(lambda v: invert_G(z, v), u))
        ana_g = np.asarray(jacobian_det_Ginv(z))
        jac_G = float(np.max(np.abs(fd_g - ana_g) / ana_g))

        incl = verify_inclusions(
            d, cfg["delta"], cfg["s"], cfg["t"], cfg["n_samples"],
            rng=rng, target_shrink=cfg["target_shrink"],
        )
        body = {
            "roundtrip_max_error": {"T": rt_T, "G": rt_G, "R": rt_R},
            "roundtrip_tol": cfg["roundtrip_tol"],
            "jacobian_max_rel_error": {"Tinv": jac_T, "Ginv": jac_G},
            "jacobian_tol": cfg["jacobian_tol"],
            "inclusions": incl.to_dict(),
        }
        breaches = []
        if max(rt_T, rt_G, rt_R) >= cfg["roundtrip_tol"]:
            breaches.append("round-trip error above tolerance")
        if max(jac_T, jac_G) >= cfg["jacobian_tol"]:
            breaches.append("Jacobian mismatch above tolerance")
        if incl.violations > 0:
            breaches.append(f"{incl.violations} inclusion violations")
        notes = [
            f"geometry: roundtrip max {max(rt_T, rt_G, rt_R):.2e}, "
            f"jacobian max rel {max(jac_T, jac_G):.2e}, "
            f"inclusion violations {incl.violations} "
            f"({cfg['n_samples']} samples, d={d})"
        ]
        return [("report.json", "json", body)], breaches, notes

    return run


def _urn_terminal_summary(term_z: np.ndarray, term_zeta: np.ndarray, ks_threshold: float) -> tuple[dict, list[str]]:
    stat = ks_one_sample(term_z, arcsine_cdf)
    inside = np.all((term_zeta >= BAND_LO) & (term_zeta <= BAND_HI))
    body = {
        "n_runs": int(term_z.shape[0]),
        "ks_arcsine": {
            "statistic": float(stat),
            "threshold": ks_threshold,
            "passed": bool(stat < ks_threshold),
        },
        "zeta_range": [float(term_zeta.min()), float(term_zeta.max())],
        "zeta_band": [BAND_LO, BAND_HI],
        "zeta_all_in_band": bool(inside),
    }
    breaches = []
    if not body["ks_arcsine"]["passed"]:
        breaches.append(f"terminal KS vs arcsine {stat:.4f} >= {ks_threshold}")
    if not inside:
        breaches.append("terminal zeta escaped the band")
    return body, breaches


def prepare_urn(cfg: dict, threads: int):
    mode = cfg["mode"]
    if mode == "single":
        def run_single():
            traj = urn.run_urn(
                cfg["n_steps"], cfg["seed"],
                record_every=cfg["record_every"], z_init=cfg["z_init"],
            )
            last = traj[-1]
            body = {"terminal": dict(zip(urn.TRAJECTORY_COLUMNS, last.tolist()))}
            notes = [f"urn single: {cfg['n_steps']} steps, terminal zeta {last[4]:.5f}"]
            files = [
                ("trajectory.csv", "csv", list(urn.TRAJECTORY_COLUMNS), traj),
                ("summary.json", "json", body),
            ]
            return files, [], notes
        return run_single

    if mode == "ensemble":
        snaps = tuple(int(s) for s in cfg["snapshots"])
        if any(s > cfg["n_steps"] for s in snaps):
            raise ConfigError("snapshots must not exceed n_steps")

        def run_ens():
            res = urn.run_urn_ensemble(
                cfg["n_runs"], cfg["n_steps"], cfg["seed"],
                snapshots=snaps, n_threads=threads,
            )
            zeta = res.zeta()
            body, breaches = _urn_terminal_summary(
                res.terminal[:, 0], zeta, cfg["ks_threshold"]
            )
            body["n_steps"] = cfg["n_steps"]
            body["median_abs_zeta_dev"] = {
                "terminal": float(np.median(np.abs(zeta - 0.5))),
                **{
                    str(s): float(np.median(np.abs(res.zeta(s) - 0.5)))
                    for s in snaps
                },
            }
            rows = np.column_stack([res.terminal, zeta])
            files = [
                ("samples.csv", "csv", ["z", "L", "R", "zeta"], rows),
                ("summary.json", "json", body),
            ]
            notes = [
                f"urn ensemble: {cfg['n_runs']} runs x {cfg['n_steps']} steps, "
                f"KS vs arcsine {body['ks_arcsine']['statistic']:.4f}"
            ]
            return files, breaches, notes
        return run_ens

    if mode == "coupled":
        ccfg = urn.CouplingConfig(
            n_total=cfg["n_total"], N0=cfg["N0"], eps_band=cfg["eps_band"],
            seed=cfg["seed"], record_every=cfg["record_every"],
        )

        def run_coupled():
            per_run = []
            total_violations = 0
            n_A = 0
            first = None
            for i in range(cfg["runs"]):
                res = urn.coupled_run(ccfg, stream=i)
                if i == 0:
                    first = res
                if res.event_A:
                    n_A += 1
                    total_violations += res.sandwich_violations
                per_run.append({
                    "stream": i,
                    "event_A": bool(res.event_A),
                    "sandwich_violations": int(res.sandwich_violations),
                })
            body = {
                "runs": cfg["runs"],
                "event_A_count": n_A,
                "violations_on_A_runs": total_violations,
                "per_run": per_run,
            }
            breaches = []
            if total_violations > 0:
                breaches.append(
                    f"{total_violations} sandwich violations on band-event runs"
                )
            files = [("report.json", "json", body)]
            if cfg["runs"] == 1:
                files.insert(0, (
                    "trajectory.csv", "csv",
                    list(urn.COUPLING_COLUMNS), first.records,
                ))
            notes = [
                f"urn coupled: {cfg['runs']} runs, band event on {n_A}, "
                f"violations {total_violations}"
            ]
            return files, breaches, notes
        return run_coupled

    # frozen
    ref = cfg.get("reference")
    if ref is None:
        a, b = 0.5 + cfg["eps_band"], 0.5 - cfg["eps_band"]
        if b <= 0.0:
            raise ConfigError("eps_band too large for the default Beta reference")
    else:
        a, b = ref["a"], ref["b"]
    law = BetaJump(a, b)

    def run_frozen():
        z = urn.run_frozen_walk(
            cfg["eps_band"], cfg["n_steps"], cfg["n_chains"], cfg["seed"]
        )
        rep = ks_report(z, lambda x: jump_cdf(law, x), alpha=0.01)
        body = {
            "reference_beta": [a, b],
            "ks": rep.to_dict(),
        }
        breaches = [] if rep.passed else [
            f"frozen-walk KS {rep.statistic:.4f} >= {rep.threshold:.4f}"
        ]
        notes = [
            f"urn frozen: {cfg['n_chains']} chains x {cfg['n_steps']} steps, "
            f"KS vs Beta({a:g},{b:g}) = {rep.statistic:.4f}"
        ]
        return [("samples.csv", "csv", ["z"], z[:, None]), ("report.json", "json", body)], breaches, notes

    return run_frozen


_PREPARE = {
    "simulate": prepare_simulate,
    "verify": prepare_verify,
    "assumptions": prepare_assumptions,
    "geometry": prepare_geometry,
    "urn": prepare_urn,
}


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplexwalk",
        description="Simplex random-walk simulation and verification toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("simulate", "run an ensemble of simplex walks"),
        ("verify", "check a stationary-density candidate on a grid"),
        ("assumptions", "certify the model constants (eta, epsilon, c)"),
        ("geometry", "round-trip, Jacobian and inclusion checks"),
        ("urn", "urn-walk trajectories, ensembles and couplings"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (never changes outputs)")
        p.add_argument("--out", default=".", help="artifact directory")
        p.add_argument("--assert", dest="assert_", action="store_true",
                       help="exit 3 on any threshold breach")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = read_config(args.config)
        cfg = resolve_config(args.command, raw, args.seed)
        runner = _PREPARE[args.command](cfg, max(1, args.threads))
    except SimplexWalkError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        files, breaches, notes = runner()
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        provenance = {"config": cfg, "seed": cfg["seed"]}
        written = []
        for spec in files:
            if spec[1] == "csv":
                name, _, header, rows = spec
                write_csv(outdir / name, header, rows, provenance=provenance)
            else:
                name, _, body = spec
                payload = dict(provenance)
                payload.update(body)
                write_json(outdir / name, payload)
            written.append(name)
    except Exception as exc:  # noqa: BLE001 - anything past config is runtime
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    for line in notes:
        print(line, file=sys.stderr)
    print("wrote: " + ", ".join(str(Path(args.out) / w) for w in written),
          file=sys.stderr)
    for b in breaches:
        print(f"breach: {b}", file=sys.stderr)
    if breaches and args.assert_:
        return EXIT_ASSERT
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
