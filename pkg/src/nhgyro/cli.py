"""Command-line front end: ``nhgyro simulate | verify | bracket | jacobi``.

Results go to standard output as JSON; diagnostics go to standard error.
``--system`` takes a built-in name or the path of a Python file defining
``make_system(params) -> ChartedSystem`` and optionally
``initial_state(params) -> PhasePoint`` and ``gauge_form(params) -> GaugeForm``.
Exit codes: 0 success, 1 configuration error, 2 chart exit or singular chart,
3 numerical failure (step rejection, singular linear solve), 4 failed
verification suite.
"""
from __future__ import annotations

import argparse
import configparser
import importlib.util
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import dynamics, routh, verification
from .bracket import assemble_pi, assemble_pi_gauge, bracket_field, conformal_scale, jacobiator_tensor, matrix_field, pushforward
from .chart import ChartedSystem, admit
from .errors import (
    ChartExit,
    DegenerateDenominator,
    InvalidParams,
    LinearSolveFailure,
    OffSphere,
    PoleSingular,
    SingularChart,
    StepRejectionLimit,
)
from .legendre import PhasePoint
from .systems import chaplygin as ch
from .systems import suslov as su

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CHART = 2
EXIT_NUMERIC = 3
EXIT_FAILED = 4

SYSTEMS = ("suslov", "chaplygin-sphere", "routh-toy")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    system: str = "suslov"
    params: dict = field(default_factory=dict)
    init: Optional[str] = None
    t0: float = 0.0
    t1: float = 10.0
    dt: float = dynamics.DEFAULT_DT
    adaptive: Optional[tuple] = None
    gauge: bool = False
    scale_conformal: bool = False
    reduced: bool = False
    suite: Optional[str] = None
    seed: Optional[int] = None
    out: Optional[str] = None


# ---------------------------------------------------------------------------
# parsing


def parse_assignments(text: str) -> dict:
    """``"a=1,b=2"`` into ``{"a": 1.0, "b": 2.0}``."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError as exc:
            raise ConfigError(f"non-numeric value for {k.strip()!r}: {v!r}") from exc
    return out


def parse_time(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--t expects t0:t1:dt, got {text!r}")
    try:
        t0, t1, dt = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"non-numeric time grid {text!r}") from exc
    if not dt > 0:
        raise ConfigError("dt must be positive")
    if not t1 > t0:
        raise ConfigError(f"empty time grid: t1={t1:g} is not after t0={t0:g}")
    return t0, t1, dt


def parse_tolerances(text: str):
    try:
        atol, rtol = (float(s) for s in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"--adaptive expects atol,rtol, got {text!r}") from exc
    if not (atol > 0 and rtol > 0):
        raise ConfigError("tolerances must be positive")
    return atol, rtol


def parse_init(text: str) -> dict:
    """``"q=0,1.2,0;p=1,0"`` into named float vectors."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(";"))):
        if "=" not in item:
            raise ConfigError(f"expected name=v1,v2,..., got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = np.array([float(x) for x in v.split(",")])
        except ValueError as exc:
            raise ConfigError(f"non-numeric initial value in {item!r}") from exc
    return out


# ---------------------------------------------------------------------------
# systems


def _suslov_params(over: dict) -> su.SuslovParams:
    base = su.SuslovParams()
    kw = {k: over.pop(k, getattr(base, k)) for k in ("I11", "I22", "I33", "I13", "I23")}
    B = [over.pop(f"B{i}", base.B[i - 1]) for i in (1, 2, 3)]
    return su.SuslovParams(B=tuple(B), **kw)


def _chaplygin_params(over: dict) -> ch.ChaplyginParams:
    base = ch.ChaplyginParams()
    if "r" in over:
        over["r_s"] = over.pop("r")
    kw = {k: over.pop(k, getattr(base, k)) for k in ("I1", "I3", "m", "r_s")}
    B = [over.pop(f"B{i}", base.B[i - 1]) for i in (1, 2, 3)]
    return ch.ChaplyginParams(B=tuple(B), **kw)


@dataclass
class UserSystem:
    """A system loaded from a user file, with the raw parameter overrides."""

    module: object
    params: dict


def _is_user_file(name: str) -> bool:
    return name not in SYSTEMS and (name.endswith(".py") or os.sep in name)


def system_label(name: str) -> str:
    return Path(name).stem if _is_user_file(name) else name


def load_user_module(path: str):
    if not os.path.isfile(path):
        raise ConfigError(f"system file {path!r} does not exist")
    spec = importlib.util.spec_from_file_location(f"nhgyro_user_{Path(path).stem}", path)
    if spec is None or spec.loader is None:
        raise ConfigError(f"cannot load system file {path!r}")
    module = importlib.util.module_from_spec(spec)
    try:
        spec.loader.exec_module(module)
    except Exception as exc:
        raise ConfigError(f"error while loading {path!r}: {exc}") from exc
    if not callable(getattr(module, "make_system", None)):
        raise ConfigError(f"{path!r} does not define make_system(params)")
    return module


def build_system(name: str, params: dict):
    """``(params_object, ChartedSystem)`` for a built-in name or a user system file."""
    over = dict(params)
    if _is_user_file(name):
        module = load_user_module(name)
        try:
            sys_ = module.make_system(dict(over))
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"make_system in {name!r} rejected the parameters: {exc}") from exc
        if not isinstance(sys_, ChartedSystem):
            raise ConfigError(f"make_system in {name!r} must return a ChartedSystem")
        return UserSystem(module, over), sys_
    if name == "suslov":
        p = _suslov_params(over)
        sys_ = su.suslov_system(p)
    elif name == "chaplygin-sphere":
        p = _chaplygin_params(over)
        sys_ = ch.chaplygin_system(p)
    elif name == "routh-toy":
        p = routh.toy_blocks(mu=over.pop("mu", 1.0), k=over.pop("k", 1.0))
        sys_ = routh.reduced_system(p, name="routh-toy")
    else:
        raise ConfigError(f"unknown system {name!r}; choose from {', '.join(SYSTEMS)}")
    if over:
        raise ConfigError(f"unknown parameters for {name}: {', '.join(sorted(over))}")
    return p, sys_


def _vec(init: dict, key: str, size: int):
    v = init.pop(key)
    if v.size != size:
        raise ConfigError(f"{key} needs {size} components, got {v.size}")
    return v


def initial_state(name: str, p, sys_, text: Optional[str]) -> PhasePoint:
    init = parse_init(text) if text else {}
    if name == "suslov":
        q = _vec(init, "q", 3) if "q" in init else np.array([0.0, np.pi / 2, 0.0])
        if "Omega" in init:
            mom = su.suslov_momenta_from_omega(p, _vec(init, "Omega", 2))
        elif "p" in init:
            mom = _vec(init, "p", 2)
        else:
            mom = su.suslov_momenta_from_omega(p, [1.0, 0.0])
        pp = PhasePoint(q, mom)
    elif name == "chaplygin-sphere":
        if "K" in init or "Gamma" in init:
            if not ("K" in init and "Gamma" in init):
                raise ConfigError("K and Gamma must be given together")
            phi = float(init.pop("phi", np.zeros(1))[0])
            kg = ch.KGammaPoint(_vec(init, "K", 3), _vec(init, "Gamma", 3))
            pp = ch.chart_from_kgamma(p, kg, phi)
        elif "q" in init or "p" in init:
            pp = PhasePoint(_vec(init, "q", 5), _vec(init, "p", 3))
        else:
            pp = ch.default_initial_state(p)
    elif isinstance(p, UserSystem):
        if "q" in init or "p" in init:
            pp = PhasePoint(_vec(init, "q", sys_.n), _vec(init, "p", sys_.r))
        elif callable(getattr(p.module, "initial_state", None)):
            pp = p.module.initial_state(dict(p.params))
        else:
            raise ConfigError("user systems need --init q=...;p=... or an initial_state(params) function")
    else:
        q = _vec(init, "q", 2) if "q" in init else np.array(verification.ROUTH_Q0)
        mom = _vec(init, "p", 2) if "p" in init else np.zeros(2)
        pp = PhasePoint(q, mom)
    if init:
        raise ConfigError(f"unrecognised initial-state fields: {', '.join(sorted(init))}")
    admit(sys_, pp.q)
    return pp


def _gauge_for(name: str, p):
    if name == "chaplygin-sphere":
        return ch.chaplygin_gauge(p)
    if isinstance(p, UserSystem) and callable(getattr(p.module, "gauge_form", None)):
        return p.module.gauge_form(dict(p.params))
    raise ConfigError(f"--gauge has no built-in 3-form for {name}")


# ---------------------------------------------------------------------------
# commands


def _emit(obj, out: Optional[str] = None):
    text = json.dumps(obj, indent=2, sort_keys=False)
    print(text)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg.scale_conformal:
        raise ConfigError("--scale-conformal applies to reduced brackets only (use it with 'bracket --reduced')")
    p, sys_ = build_system(cfg.system, cfg.params)
    pp = initial_state(cfg.system, p, sys_, cfg.init)
    gauge = _gauge_for(cfg.system, p) if cfg.gauge else None
    method, atol, rtol = "rk4", dynamics.DEFAULT_TOL, dynamics.DEFAULT_TOL
    if cfg.adaptive is not None:
        method, (atol, rtol) = "rk45", cfg.adaptive
    out = cfg.out or f"{system_label(cfg.system)}_trajectory.csv"
    traj = dynamics.integrate(
        dynamics.momentum_field(sys_, gauge=gauge),
        pp.flat(),
        cfg.t0,
        cfg.t1,
        cfg.dt,
        method=method,
        guard=dynamics.chart_guard(sys_),
        monitors=dynamics.system_monitors(sys_),
        atol=atol,
        rtol=rtol,
    )
    dynamics.write_csv(traj, sys_.n, out)
    drifts = dynamics.monitor_drifts(traj.monitors)
    H = traj.monitors["Hc"]
    n = sys_.n
    summary = {
        "system": cfg.system,
        "method": method,
        "gauge": bool(gauge),
        "t0": cfg.t0,
        "t1": cfg.t1,
        "dt": cfg.dt,
        "steps": len(traj.times) - 1,
        "csv": out,
        "terminated": traj.terminated,
        "final": {
            "t": float(traj.times[-1]),
            "q": traj.final[:n].tolist(),
            "p": traj.final[n:].tolist(),
        },
        "initial_monitors": {k: float(v[0]) for k, v in traj.monitors.items()},
        "max_drift": drifts,
        "relative_drift_Hc": float(drifts["Hc"] / abs(H[0])) if H[0] != 0 else None,
    }
    _emit(summary)
    if traj.terminated:
        print(f"nhgyro: {traj.terminated}", file=sys.stderr)
        return EXIT_CHART
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    if not cfg.suite:
        raise ConfigError("--suite is required")
    names = list(verification.SUITES) if cfg.suite == "all" else [s.strip() for s in cfg.suite.split(",")]
    unknown = [s for s in names if s not in verification.SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {', '.join(unknown)}; choose from {', '.join(verification.SUITES)} or all")
    reports = []
    for name in names:
        rep = verification.run_suite(name, cfg.seed)
        print(f"nhgyro: {name}: {'pass' if rep.passed else 'FAIL'} (max residual {rep.max_residual:.3e})", file=sys.stderr)
        reports.append(rep.as_dict())
    _emit(reports[0] if len(reports) == 1 else reports, cfg.out)
    return EXIT_OK if all(r["pass"] for r in reports) else EXIT_FAILED


def cmd_bracket(cfg: RunConfig) -> int:
    p, sys_ = build_system(cfg.system, cfg.params)
    pp = initial_state(cfg.system, p, sys_, cfg.init)
    gauge = _gauge_for(cfg.system, p) if cfg.gauge else None
    bm = assemble_pi_gauge(sys_, gauge, pp) if gauge else assemble_pi(sys_, pp)
    point = {"q": pp.q.tolist(), "p": pp.p.tolist()}
    factor = None
    if cfg.reduced or cfg.scale_conformal:
        if cfg.system == "suslov":
            if cfg.scale_conformal:
                raise ConfigError("--scale-conformal is defined for chaplygin-sphere only")
            bm = pushforward(bm, su.suslov_omega_jacobian(p), ("Omega1", "Omega2"))
            point["Omega"] = su.suslov_omega_map(p, pp).tolist()
        elif cfg.system == "chaplygin-sphere":
            kg = ch.kgamma_from_chart(p, pp)
            bm = pushforward(bm, ch.kgamma_jacobian(p, pp), ch.KGAMMA_LABELS)
            point.update(K=kg.K.tolist(), Gamma=kg.Gamma.tolist())
            if cfg.scale_conformal:
                factor = ch.conformal_factor(p, kg.Gamma)
                bm = type(bm)(factor * bm.pi, bm.labels)
        else:
            raise ConfigError(f"no reduced coordinates for {cfg.system}")
    _emit(
        {
            "system": cfg.system,
            "gauge": bool(gauge),
            "reduced": bool(cfg.reduced or cfg.scale_conformal),
            "conformal_factor": factor,
            "point": point,
            "labels": list(bm.labels),
            "matrix": (bm.pi + 0.0).tolist(),
        },
        cfg.out,
    )
    return EXIT_OK


def cmd_jacobi(cfg: RunConfig) -> int:
    """Largest Jacobiator component of the bracket at a point.

    Without ``--reduced`` the phase-space bracket (optionally gauged) is used;
    with it, the closed-form reduced Chaplygin bracket in ``(K, Gamma)``,
    optionally conformally rescaled.
    """
    p, sys_ = build_system(cfg.system, cfg.params)
    pp = initial_state(cfg.system, p, sys_, cfg.init)
    factor = None
    if cfg.reduced or cfg.scale_conformal:
        if cfg.system != "chaplygin-sphere":
            raise ConfigError("reduced Jacobiator is available for chaplygin-sphere only")
        bf = matrix_field(lambda x: ch.chaplygin_reference_bracket(p, ch.KGammaPoint.from_flat(x)), 6, ch.KGAMMA_LABELS)
        x = ch.kgamma_from_chart(p, pp).flat()
        if cfg.scale_conformal:
            bf = conformal_scale(bf, lambda y: ch.conformal_factor(p, y[3:]), samples=[x])
            factor = ch.conformal_factor(p, x[3:])
    else:
        gauge = _gauge_for(cfg.system, p) if cfg.gauge else None
        bf = bracket_field(sys_, gauge)
        x = pp.flat()
    J = jacobiator_tensor(bf, x)
    i, j, k = (int(v) for v in np.unravel_index(np.argmax(np.abs(J)), J.shape))
    _emit(
        {
            "system": cfg.system,
            "gauge": bool(cfg.gauge),
            "reduced": bool(cfg.reduced or cfg.scale_conformal),
            "conformal_factor": factor,
            "point": x.tolist(),
            "labels": list(bf.labels),
            "max_abs": float(np.abs(J).max()),
            "argmax": [bf.labels[i], bf.labels[j], bf.labels[k]],
        },
        cfg.out,
    )
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "verify": cmd_verify, "bracket": cmd_bracket, "jacobi": cmd_jacobi}


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nhgyro", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "integrate the nonholonomic field and write a CSV trajectory"),
        ("verify", "run a named verification suite"),
        ("bracket", "print the bracket matrix at a point"),
        ("jacobi", "print the largest Jacobiator component at a point"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="INI file; command-line flags override it")
        sp.add_argument("--system", metavar="NAME|FILE.py", help=f"one of {', '.join(SYSTEMS)}, or a user system file")
        sp.add_argument("--set", dest="set_", metavar="K=V[,K=V...]", help="parameter overrides")
        sp.add_argument("--init", help='initial state, e.g. "Omega=1,0" or "K=1,0,0;Gamma=0,1,0"')
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output path")
        sp.add_argument("--gauge", action="store_true", default=None)
        sp.add_argument("--scale-conformal", action="store_true", default=None)
        if name == "simulate":
            sp.add_argument("--t", dest="time", metavar="T0:T1:DT")
            sp.add_argument("--adaptive", metavar="ATOL,RTOL")
        if name == "verify":
            sp.add_argument("--suite", help=f"one of {', '.join(verification.SUITES)}, a comma list, or all")
        if name in ("bracket", "jacobi"):
            sp.add_argument("--reduced", action="store_true", default=None, help="push to reduced coordinates")
    return parser


def _truthy(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def load_config(path: str) -> dict:
    """Flat INI schema: ``[run]`` holds run options, ``[params]`` holds parameter overrides."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path!r}: {exc}") from exc
    unknown = set(cp.sections()) - {"run", "params"}
    if unknown:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")
    run = dict(cp["run"]) if cp.has_section("run") else {}
    params = dict(cp["params"]) if cp.has_section("params") else {}
    return {"run": run, "params": params}


RUN_KEYS = {"system", "init", "t", "adaptive", "gauge", "scale_conformal", "reduced", "suite", "seed", "out"}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    file_params: dict = {}
    if getattr(args, "config", None):
        loaded = load_config(args.config)
        bad = set(loaded["run"]) - RUN_KEYS
        if bad:
            raise ConfigError(f"unknown [run] keys: {', '.join(sorted(bad))}")
        run = loaded["run"]
        if "system" in run:
            cfg.system = run["system"]
        cfg.init = run.get("init", cfg.init)
        if "t" in run:
            cfg.t0, cfg.t1, cfg.dt = parse_time(run["t"])
        if "adaptive" in run:
            cfg.adaptive = parse_tolerances(run["adaptive"])
        for key in ("gauge", "scale_conformal", "reduced"):
            if key in run:
                setattr(cfg, key, _truthy(run[key]))
        cfg.suite = run.get("suite", cfg.suite)
        if "seed" in run:
            try:
                cfg.seed = int(run["seed"])
            except ValueError as exc:
                raise ConfigError(f"seed must be an integer, got {run['seed']!r}") from exc
        cfg.out = run.get("out", cfg.out)
        file_params = parse_assignments(",".join(f"{k}={v}" for k, v in loaded["params"].items()))

    if args.system:
        cfg.system = args.system
    if cfg.system not in SYSTEMS and not _is_user_file(cfg.system):
        raise ConfigError(f"unknown system {cfg.system!r}; choose from {', '.join(SYSTEMS)} or give a .py file")
    cfg.params = {**file_params, **(parse_assignments(args.set_) if args.set_ else {})}
    if args.init is not None:
        cfg.init = args.init
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.gauge:
        cfg.gauge = True
    if args.scale_conformal:
        cfg.scale_conformal = True
    if getattr(args, "time", None):
        cfg.t0, cfg.t1, cfg.dt = parse_time(args.time)
    if getattr(args, "adaptive", None):
        cfg.adaptive = parse_tolerances(args.adaptive)
    if getattr(args, "suite", None):
        cfg.suite = args.suite
    if getattr(args, "reduced", None):
        cfg.reduced = True
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (ConfigError, InvalidParams, OffSphere, PoleSingular) as exc:
        print(f"nhgyro: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ChartExit, SingularChart) as exc:
        print(f"nhgyro: chart error: {exc}", file=sys.stderr)
        return EXIT_CHART
    except (StepRejectionLimit, LinearSolveFailure, DegenerateDenominator) as exc:
        print(f"nhgyro: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
