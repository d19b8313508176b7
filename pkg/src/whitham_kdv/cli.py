"""Command-line scenario runner.

Each subcommand reads an optional JSON config, fills in defaults, validates
the result against a JSON schema and writes CSV field data plus a JSON
metadata file (tool version, resolved config and its SHA-256 hash) to the
output directory.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import copy
import hashlib
import json
import logging
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .errors import ConfigurationError, ParameterError
from .gpstep import StepProblem, envelopes, gp_edges, gp_solution
from .hodograph import (
    EpdPotential,
    _cubic_scale,
    dsw_solution,
    edge_curves,
    trace_zone,
    trailing_edge,
)
from .hopf import breaking_point, make_profile
from .kdvdirect import PeriodizedStep, SpectralGrid, compare, evolve
from .painleve import edge_expansion, edge_variable, hastings_mcleod
from .wave import RiemannTriple, WavePhase, cnoidal_u, theta_u

log = logging.getLogger("whitham_kdv")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SCENARIOS = ("cnoidal", "gp-step", "dsw", "edge", "kdv", "compare", "edges")

_HUMP = {"name": "negative_hump"}
_HUMP_GRID = {"Lx": 10.0, "N": 16384, "dt": 5e-5}

DEFAULTS: dict[str, dict] = {
    "cnoidal": {"triple": [1.0, 0.5, 0.0], "epsilon": 0.1, "phi0": 0.0, "t": 0.0,
                "x": {"min": -1.0, "max": 1.0, "n": 1001}},
    "gp-step": {"c": 1.0, "epsilon": 0.15, "t": 1.0, "phi0": 0.0, "width": None,
                "grid": {"Lx": 40.0, "N": 16384, "dt": 1e-4}, "x": {"min": -10.0, "max": 8.0}},
    "dsw": {"profile": _HUMP, "epsilon": 1e-2, "times": [0.3, 0.4], "x": {"n": 2001, "pad": 0.5}},
    "edge": {"profile": _HUMP, "epsilon": 1e-2, "t": 0.4, "grid": _HUMP_GRID,
             "window": 3.0, "hm": {"L": 10.0, "n": 160}},
    "kdv": {"profile": _HUMP, "epsilon": 1e-2, "times": [0.3, 0.4], "grid": _HUMP_GRID, "step_width": None},
    "compare": {"profile": _HUMP, "epsilon": 1e-2, "times": [0.3, 0.4], "grid": _HUMP_GRID,
                "buffer": 5.0},
    "edges": {"profile": _HUMP, "times": [0.25, 0.3, 0.35, 0.4]},
}

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_grid = {
    "type": "object",
    "properties": {"Lx": _pos, "N": {"type": "integer", "minimum": 8}, "dt": _pos},
    "required": ["Lx", "N", "dt"],
    "additionalProperties": False,
}
_profile = {
    "type": "object",
    "oneOf": [
        {"required": ["name"], "properties": {"name": {"enum": ["negative_hump", "sech2", "smooth_step", "step",
                                                                "linear"]}}},
        {"required": ["x", "u"], "properties": {"x": {"type": "array", "items": _num, "minItems": 4},
                                                 "u": {"type": "array", "items": _num, "minItems": 4}}},
    ],
}
_times = {"type": "array", "items": _pos, "minItems": 1}
_xrange = {"type": "object", "properties": {"min": _num, "max": _num, "n": {"type": "integer", "minimum": 2},
                                            "pad": {"type": "number", "minimum": 0}},
           "additionalProperties": False}

SCHEMAS: dict[str, dict] = {
    "cnoidal": {"properties": {"triple": {"type": "array", "items": _num, "minItems": 3, "maxItems": 3},
                               "epsilon": _pos, "phi0": _num, "t": _num, "x": _xrange}},
    "gp-step": {"properties": {"c": _pos, "epsilon": _pos, "t": _pos, "phi0": _num,
                               "width": {"type": ["number", "null"], "exclusiveMinimum": 0},
                               "grid": _grid, "x": _xrange}},
    "dsw": {"properties": {"profile": _profile, "epsilon": _pos, "times": _times, "x": _xrange}},
    "edge": {"properties": {"profile": _profile, "epsilon": _pos, "t": _pos, "grid": _grid, "window": _pos,
                            "hm": {"type": "object", "properties": {"L": {"type": "number", "minimum": 8},
                                                                    "n": {"type": "integer", "minimum": 16}}}}},
    "kdv": {"properties": {"profile": _profile, "epsilon": _pos, "times": _times, "grid": _grid,
                           "step_width": {"type": ["number", "null"], "exclusiveMinimum": 0}}},
    "compare": {"properties": {"profile": _profile, "epsilon": _pos, "times": _times, "grid": _grid,
                               "buffer": {"type": "number", "minimum": 0}}},
    "edges": {"properties": {"profile": _profile, "times": _times}},
}
for _name, _s in SCHEMAS.items():
    _s.update({"type": "object", "additionalProperties": False})
    _s["properties"]["scenario"] = {"enum": [_name]}


class UsageError(ConfigurationError):
    """Configuration rejected before any computation."""


# ---------------------------------------------------------------------------
# config handling


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "profile":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def resolve_config(scenario: str, user: dict | None) -> dict:
    """Defaults merged with ``user``, validated against the scenario schema."""
    if scenario not in SCENARIOS:
        raise UsageError(f"unknown scenario {scenario!r}")
    user = dict(user or {})
    named = user.pop("scenario", scenario)
    if named != scenario:
        raise UsageError(f"config is for scenario {named!r}, not {scenario!r}")
    cfg = _merge(DEFAULTS[scenario], user)
    try:
        jsonschema.validate(cfg, SCHEMAS[scenario])
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise UsageError(f"invalid config at {path}: {exc.message}") from None
    if "profile" in cfg:
        make_profile(cfg["profile"])
    return cfg


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def _write_csv(path: Path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    np.savetxt(path, data, delimiter=",", header=",".join(names), comments="", fmt="%.17g")


class _Output:
    def __init__(self, scenario: str, cfg: dict, out: Path):
        self.scenario = scenario
        self.cfg = cfg
        self.out = out
        self.files: list[str] = []
        self.meta: dict = {}
        out.mkdir(parents=True, exist_ok=True)

    def csv(self, name: str, columns: dict) -> None:
        _write_csv(self.out / name, columns)
        self.files.append(name)

    def finish(self) -> Path:
        meta = {
            "tool": "whitham_kdv",
            "version": __version__,
            "scenario": self.scenario,
            "config": self.cfg,
            "config_sha256": config_hash(self.cfg),
            "files": self.files,
            **self.meta,
        }
        path = self.out / f"{self.scenario}.json"
        path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_json_default) + "\n")
        return path


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _linspace(xr: dict, lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(xr.get("min", lo), xr.get("max", hi), xr.get("n", n))


def _grid(cfg: dict) -> SpectralGrid:
    g = cfg["grid"]
    return SpectralGrid(Lx=g["Lx"], N=g["N"], epsilon=cfg["epsilon"], dt=g["dt"])


def _step_width(cfg: dict, key: str) -> float:
    return cfg[key] if cfg.get(key) is not None else 0.5 * cfg["epsilon"]


def _map(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


# ---------------------------------------------------------------------------
# scenarios


def _run_cnoidal(cfg, out: _Output, threads: int):
    trip = RiemannTriple(*sorted(cfg["triple"], reverse=True))
    ph = WavePhase(cfg["phi0"], cfg["epsilon"])
    x = _linspace(cfg["x"], -1.0, 1.0, 1001)
    ucn = cnoidal_u(x, cfg["t"], trip, ph)
    uth = theta_u(x, cfg["t"], trip, ph)
    out.csv("cnoidal.csv", {"x": x, "u_cnoidal": ucn, "u_theta": uth})
    out.meta.update({"m": trip.m, "k": trip.k, "omega": trip.omega, "alpha": trip.alpha,
                     "max_form_difference": float(np.max(np.abs(ucn - uth)))})


def _gp_setup(cfg):
    w = _step_width(cfg, "width")
    return PeriodizedStep(c=cfg["c"], w=w, Lx=cfg["grid"]["Lx"]), _grid(cfg)


def _run_gp(cfg, out: _Output, threads: int):
    c, eps, t = cfg["c"], cfg["epsilon"], cfg["t"]
    prof, grid = _gp_setup(cfg)
    sol = evolve(prof, grid, t)
    lo, hi = cfg["x"].get("min", -10.0), cfg["x"].get("max", 8.0)
    sel = (sol.x >= lo) & (sol.x <= hi)
    x = sol.x[sel]
    prob = StepProblem(c, cfg["phi0"], eps)
    ugp = gp_solution(x, t, prob)
    e1, e2 = envelopes(x, t, c)
    out.csv("gp_step.csv", {"x": x, "u_direct": sol.at(t)[sel], "u_gp": ugp, "e1": e1, "e2": e2})
    zm, zp = gp_edges(c)
    out.meta.update({"x_minus": zm * t, "x_plus": zp * t, "step_width": prof.w,
                     "clean_region": prof.clean_region(t), "conservation_drift": sol.drift()})


def _run_dsw(cfg, out: _Output, threads: int):
    prof = make_profile(cfg["profile"])
    eps = cfg["epsilon"]
    pot = EpdPotential(prof)

    def one(t):
        tr = trace_zone(t, prof, pot=pot)
        pad = cfg["x"].get("pad", 0.5)
        x = _linspace(cfg["x"], tr.x_minus - pad, tr.x_plus + pad, 2001)
        u, beta = dsw_solution(x, t, prof, eps, trace=tr, return_beta=True)
        uh = np.full(x.size, np.nan)
        outside = (x <= tr.x_minus) | (x >= tr.x_plus)
        uh[outside] = u[outside]
        return t, tr, x, u, beta, uh

    rows = []
    for t, tr, x, u, beta, uh in _map(one, sorted(cfg["times"]), threads):
        out.csv(f"dsw_t{t:g}.csv", {"x": x, "beta1": beta[:, 0], "beta2": beta[:, 1], "beta3": beta[:, 2],
                                      "u_asymptotic": u, "u_hopf": uh})
        rows.append((t, tr.x_minus, tr.x_plus))
    r = np.array(rows)
    out.csv("dsw_edges.csv", {"t": r[:, 0], "x_minus": r[:, 1], "x_plus": r[:, 2]})


def _run_edge(cfg, out: _Output, threads: int):
    prof = make_profile(cfg["profile"])
    eps, t = cfg["epsilon"], cfg["t"]
    hm = hastings_mcleod(cfg["hm"]["L"], cfg["hm"]["n"])
    s = np.linspace(-hm.L, hm.L, 801)
    out.csv("hastings_mcleod.csv", {"s": s, "q": hm(s)})
    edge = trailing_edge(t, prof)
    sol = evolve(prof, _grid(cfg), t)
    scale = edge.c_e ** (1.0 / 3.0) * math.sqrt(edge.v - edge.xi) * eps ** (2.0 / 3.0)
    sel = np.abs(sol.x - edge.x_minus) <= cfg["window"] * scale
    x = sol.x[sel]
    ue = edge_expansion(x, t, eps, edge, hm)
    ud = sol.at(t)[sel]
    out.csv("edge_overlay.csv", {"x": x, "s": edge_variable(x, eps, edge), "u_edge": ue, "u_direct": ud})
    out.meta.update({"edge": {"v": edge.v, "xi": edge.xi, "x_minus": edge.x_minus, "c": edge.c_e},
                     "hm_residual": hm.residual, "sup_error": float(np.max(np.abs(ue - ud)))})


def _kdv_initial(cfg):
    prof = make_profile(cfg["profile"])
    if prof.kind.value == "smooth_step":
        w = cfg["step_width"] if cfg.get("step_width") is not None else prof.w
        return PeriodizedStep(c=prof.c, w=w, Lx=cfg["grid"]["Lx"])
    return prof


def _run_kdv(cfg, out: _Output, threads: int):
    init = _kdv_initial(cfg)
    times = sorted(cfg["times"])
    sol = evolve(init, _grid(cfg), times[-1], times)
    cols = {"x": sol.x}
    for t, u in zip(sol.times, sol.u):
        cols[f"u_t{t:g}"] = u
    out.csv("kdv.csv", cols)
    out.meta.update({"times": sol.times, "mass": sol.mass, "energy": sol.energy, "drift": sol.drift(),
                     "grid": sol.meta})


def _run_compare(cfg, out: _Output, threads: int):
    prof = make_profile(cfg["profile"])
    eps = cfg["epsilon"]
    times = sorted(cfg["times"])
    sol = evolve(prof, _grid(cfg), times[-1], times)
    buf = cfg["buffer"] * eps ** (2.0 / 3.0)
    reports = []
    for t in times:
        tr = trace_zone(t, prof)
        sel = (sol.x > tr.x_minus - 1.0) & (sol.x < tr.x_plus + 1.0)
        x = sol.x[sel]
        ua = dsw_solution(x, t, prof, eps, trace=tr)
        out.csv(f"compare_t{t:g}.csv", {"x": x, "u_direct": sol.at(t)[sel], "u_asymptotic": ua})
        ev = lambda xx, _x=x, _u=ua: np.interp(xx, _x, _u)
        lo, hi = tr.x_minus + buf, tr.x_plus - buf
        inner = compare(sol, ev, t, (lo, hi)) if hi > lo else None
        reports.append({
            "t": t, "x_minus": tr.x_minus, "x_plus": tr.x_plus, "buffer": buf,
            "interior_sup": None if inner is None or inner.n_points == 0 else inner.sup,
            "interior_l2": None if inner is None or inner.n_points == 0 else inner.l2,
        })
    out.meta.update({"reports": reports, "drift": sol.drift()})


def _run_edges(cfg, out: _Output, threads: int):
    prof = make_profile(cfg["profile"])
    bp = breaking_point(prof)
    times = np.array(sorted(cfg["times"]))
    xm, xp = edge_curves(times, prof)
    h3 = _cubic_scale(prof, bp)
    tau = times - bp.t_c
    # leading terms of x_-(t), x_+(t) for cubic data near the breaking point
    lin = bp.x_c + 6.0 * bp.u_c * tau
    x_lead = lin + 4.0 * math.sqrt(10.0) / 3.0 * tau**1.5 / math.sqrt(-h3)
    x_trail = lin - 36.0 * math.sqrt(2.0) * tau**1.5 / math.sqrt(-h3)
    out.csv("edges.csv", {"t": times, "x_minus": xm, "x_plus": xp, "x_minus_cubic": x_trail,
                          "x_plus_cubic": x_lead})
    out.meta.update({"breaking_point": {"x_c": bp.x_c, "t_c": bp.t_c, "u_c": bp.u_c, "zeta_c": bp.zeta_c}})


RUNNERS = {
    "cnoidal": _run_cnoidal,
    "gp-step": _run_gp,
    "dsw": _run_dsw,
    "edge": _run_edge,
    "kdv": _run_kdv,
    "compare": _run_compare,
    "edges": _run_edges,
}


def run(scenario: str, cfg: dict, out_dir: str | os.PathLike, threads: int = 1) -> Path:
    """Run a validated scenario and return the path of its metadata file."""
    out = _Output(scenario, cfg, Path(out_dir))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        RUNNERS[scenario](cfg, out, threads)
    out.meta["warnings"] = [str(w.message) for w in caught]
    for w in caught:
        log.warning("%s", w.message)
    return out.finish()


def validate(scenario: str, cfg: dict) -> dict:
    """Dry run: resolve the profile and grids and estimate the cost without computing fields."""
    report: dict = {"scenario": scenario, "config": cfg, "warnings": []}
    if "profile" in cfg:
        prof = make_profile(cfg["profile"])
        report["profile"] = prof.describe()
    if "grid" in cfg:
        grid = _grid(cfg)
        t_end = max(cfg.get("times", [cfg.get("t", 0.0)]))
        if scenario == "gp-step":
            umax = 2.0 * cfg["c"]
            step = PeriodizedStep(c=cfg["c"], w=_step_width(cfg, "width"), Lx=grid.Lx)
            lo, hi = step.clean_region(t_end)
            zm, zp = gp_edges(cfg["c"])
            if not (lo < zm * t_end - 1.0 and zp * t_end + 1.0 < hi):
                report["warnings"].append(
                    f"oscillation zone [{zm * t_end:g}, {zp * t_end:g}] is not inside the region "
                    f"[{lo:g}, {hi:g}] free of the return ramp; increase grid.Lx"
                )
            # linear waves at the step's wavenumber 1/w move left at 3 eps^2 / w^2
            reach = 3.0 * cfg["epsilon"] ** 2 / step.w**2 * t_end
            if reach > grid.Lx:
                report["warnings"].append(
                    f"dispersive radiation from the step travels {reach:.3g} > Lx = {grid.Lx:g} and wraps "
                    "around the periodic domain; widen the step or the domain"
                )
        else:
            umax = 2.0 * float(np.max(np.abs(make_profile(cfg["profile"]).f(grid.x))))
        h = grid.required_spacing(umax)
        if grid.dx > h:
            report["warnings"].append(f"grid spacing {grid.dx:.3g} exceeds eps/(8 sqrt(max|u|)) = {h:.3g}")
        cfl = grid.dt * 6.0 * umax * grid.k_max
        steps = math.ceil(t_end / grid.dt)
        report["estimate"] = {"steps": steps, "fft_calls": 8 * steps, "cfl": cfl,
                              "memory_mb": 40 * grid.N * 8 / 2**20}
    return report


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="whitham-kdv", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in (*SCENARIOS, "validate"):
        sp = sub.add_parser(name, help=f"run the {name} scenario" if name != "validate" else
                            "resolve a config without computing")
        sp.add_argument("--config", type=Path, help="JSON config file")
        sp.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        sp.add_argument("--threads", type=int, default=1, help="worker threads for independent time slices")
        sp.add_argument("--verbose", action="store_true")
        if name == "validate":
            sp.add_argument("--scenario", choices=SCENARIOS, help="scenario when the config does not name one")
    return p


def _load(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        user = _load(args.config)
        if args.command == "validate":
            scenario = user.get("scenario") or args.scenario
            if scenario is None:
                raise UsageError("config names no scenario; pass --scenario")
            cfg = resolve_config(scenario, user)
            print(json.dumps(validate(scenario, cfg), indent=2, sort_keys=True, default=_json_default))
            return EXIT_OK
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        cfg = resolve_config(args.command, user)
        meta = run(args.command, cfg, args.out, args.threads)
        log.info("wrote %s", meta)
        return EXIT_OK
    except (ConfigurationError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
