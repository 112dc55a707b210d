"""Batch driver.

Every subcommand reads an INI style config (sections of ``key = value``
lines), applies command-line overrides and writes its results to an output
directory together with ``config_echo.ini``, the effective configuration.
Rerunning with the echo reproduces every CSV and JSON byte for byte.

Exit codes: 0 success, 1 model or runtime error, 2 usage or config error.

Examples
--------
>>> main(["solve1d", "--left", "1,-0.2", "--right", "1,0.2", "--out", "/tmp/s1"])  # doctest: +SKIP
0
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .gas_model import GasLaw, ModelError, PrimitiveState

EXIT_OK, EXIT_MODEL, EXIT_USAGE = 0, 1, 2


class ConfigError(Exception):
    """Malformed or incomplete configuration."""


# --------------------------------------------------------------------------
# config handling


def load_config(path: Optional[str]) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            cp.read(p)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
    return cp


def _get(cp, section, key, conv=float, default=None, required=False):
    if cp.has_option(section, key):
        raw = cp.get(section, key)
        try:
            return conv(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc
    if required:
        raise ConfigError(f"missing [{section}] {key}")
    return default


def _set(cp, section, key, value) -> None:
    if not cp.has_section(section):
        cp.add_section(section)
    cp.set(section, key, str(value))


def _floats(raw: str) -> tuple:
    return tuple(float(x) for x in raw.replace(",", " ").split())


def _ints(raw: str) -> tuple:
    return tuple(int(x) for x in raw.replace(",", " ").split())


def _bool(raw: str) -> bool:
    s = raw.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def law_from(cp) -> GasLaw:
    return GasLaw(gamma=_get(cp, "gas", "gamma", default=2.0), k0=_get(cp, "gas", "k0", default=0.5))


def state_from(cp, side: str, required=True) -> Optional[PrimitiveState]:
    rho = _get(cp, "states", f"{side}_rho", required=required)
    if rho is None:
        return None
    v1 = _get(cp, "states", f"{side}_v1", required=True)
    v2 = _get(cp, "states", f"{side}_v2", default=0.0)
    return PrimitiveState(rho, v1, v2)


def perturbation_from(cp):
    from .solver2d import Perturbation

    return Perturbation(
        epsilon=_get(cp, "perturbation", "epsilon", default=0.0),
        sigma=_get(cp, "perturbation", "sigma", default=0.15),
        modes=_get(cp, "perturbation", "modes", _ints, default=(1, 2)),
        seed=_get(cp, "perturbation", "seed", int, default=0),
    )


def run_config_from(cp, threads: int = 1):
    from .solver2d import RunConfig

    kw = dict(
        law=law_from(cp),
        left=state_from(cp, "left"),
        right=state_from(cp, "right"),
        perturbation=perturbation_from(cp),
        cfl=_get(cp, "grid", "cfl", default=0.45),
        t_end=_get(cp, "run", "t_end", default=0.5),
        output_times=_get(cp, "run", "output_times", _floats),
        nx1=_get(cp, "grid", "nx1", int, default=400),
        nx2=_get(cp, "grid", "nx2", int, default=64),
        half_width=_get(cp, "grid", "half_width"),
        order=_get(cp, "grid", "order", int, default=1),
        threads=threads,
        allow_any_region=_get(cp, "run", "allow_any_region", _bool, default=False),
    )
    return RunConfig(**kw)


def write_echo(cp, out: Path) -> None:
    """Write the effective config with sections and keys sorted."""
    lines = []
    for sec in sorted(cp.sections()):
        lines.append(f"[{sec}]")
        for k in sorted(cp.options(sec)):
            lines.append(f"{k} = {cp.get(sec, k)}")
        lines.append("")
    (out / "config_echo.ini").write_text("\n".join(lines))


def output_dir(args, cp) -> Path:
    """``--out``, then ``OUTPUT_DIR``, then ``[output] dir``, then ``out``."""
    d = args.out or os.environ.get("OUTPUT_DIR") or _get(cp, "output", "dir", str) or "out"
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


# --------------------------------------------------------------------------
# serialization


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    rows = np.asarray(rows, dtype=float)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows.reshape(-1, len(header)):
            fh.write(",".join("%.17g" % v for v in r) + "\n")


def _state_json(s: PrimitiveState) -> dict:
    return {"rho": s.rho, "v1": s.v1, "v2": s.v2}


# --------------------------------------------------------------------------
# subcommands


def cmd_solve1d(args, cp) -> int:
    from .riemann1d import sample_array, solve

    if args.left is not None:
        rho, v1 = _floats(args.left)
        _set(cp, "states", "left_rho", rho)
        _set(cp, "states", "left_v1", v1)
    if args.right is not None:
        rho, v1 = _floats(args.right)
        _set(cp, "states", "right_rho", rho)
        _set(cp, "states", "right_v1", v1)
    if args.profile_t is not None:
        _set(cp, "solve1d", "profile_t", args.profile_t)
    law = law_from(cp)
    left, right = state_from(cp, "left"), state_from(cp, "right")
    fan = solve(law, left, right)
    out = output_dir(args, cp)
    waves = []
    for w, side in ((fan.wave1, fan.left), (fan.wave2, fan.right)):
        strength = abs(math.log(fan.middle.rho / side.rho))
        waves.append({"kind": w.kind.value, "speeds": list(w.speeds), "strength": strength})
    report = {
        "gamma": law.gamma,
        "k0": law.k0,
        "region": fan.region.value if fan.region.value.isupper() else fan.region.value.lower(),
        "left": _state_json(fan.left),
        "middle": _state_json(fan.middle),
        "right": _state_json(fan.right),
        "waves": waves,
    }
    write_json(out / "fan.json", report)
    t = _get(cp, "solve1d", "profile_t")
    if t is not None:
        if not t > 0:
            raise ConfigError("profile_t must be positive")
        n = _get(cp, "solve1d", "profile_n", int, default=401)
        xmin = _get(cp, "solve1d", "profile_xmin", default=-2.0)
        xmax = _get(cp, "solve1d", "profile_xmax", default=2.0)
        x = np.linspace(xmin, xmax, n)
        rho, v1, v2 = sample_array(fan, x / t)
        write_csv(out / "profile.csv", ("x1", "rho", "v1", "v2"), np.column_stack([x, rho, v1, v2]))
    write_echo(cp, out)
    print(json.dumps(_clean(report), sort_keys=True))
    return EXIT_OK


def _slice_rows(grid, U):
    X1, X2 = np.meshgrid(grid.x1, grid.x2, indexing="ij")
    rho = U[0]
    return np.column_stack([X1.ravel(), X2.ravel(), rho.ravel(), (U[1] / rho).ravel(), (U[2] / rho).ravel()])


GNUPLOT = """# gnuplot script: front loci and final density
set datafile separator ','
set terminal pngcairo size 900,600
set output 'fronts.png'
set xlabel 't'
set ylabel 'x1'
set key left top
plot 'fronts.csv' every ::1 using 1:3 title 'Cbar0' with points, \\
     '' every ::1 using 1:4 title 'Hbar' with points, \\
     '' every ::1 using 1:5 title 'H' with points, \\
     '' every ::1 using 1:6 title 'C0' with points
set output 'density.png'
set xlabel 'x1'
set ylabel 'x2'
set view map
splot '{last}' every ::1 using 1:2:3 with points palette pointtype 5 pointsize 0.5 notitle
"""


def _simulate(cp, threads):
    from .solver2d import run

    cfg = run_config_from(cp, threads)
    return cfg, run(cfg)


def cmd_simulate2d(args, cp) -> int:
    from .relative_entropy import weak_strong_compare
    from .solver2d import extract_fronts, FrontTable

    _apply_seed(args, cp)
    t_start = time.perf_counter()
    cfg, art = _simulate(cp, args.threads)
    t_run = time.perf_counter() - t_start
    out = output_dir(args, cp)
    grid = art.grid
    names = []
    for s in art.slices:
        name = f"slice_t{s.t:.4}.csv"
        write_csv(out / name, ("x1", "x2", "rho", "v1", "v2"), _slice_rows(grid, s.U))
        names.append(name)
    summary = {
        "config": {sec: dict(sorted(cp.items(sec))) for sec in sorted(cp.sections())},
        "steps": art.steps,
        "mass_drift": art.mass_drift,
        "failure": art.failure,
        "max_plane_asymmetry": max((d["plane_asymmetry"] for d in art.diagnostics), default=0.0),
        "max_vorticity": max((d["vorticity_max"] for d in art.diagnostics), default=0.0),
        "min_density": min((d["rho_min"] for d in art.diagnostics), default=math.nan),
        "slices": names,
    }
    if len(art.slices) >= 2:
        ft = extract_fronts(art.slices, cfg, grid)
        rows = []
        for k, t in enumerate(ft.times):
            for j, x2 in enumerate(ft.x2):
                rows.append([t, x2] + [ft.positions[n][k, j] for n in FrontTable.NAMES] + [float(ft.complete[k])])
        write_csv(out / "fronts.csv", ("t", "x2") + FrontTable.NAMES + ("complete",), rows)
        summary["fronts_final_mean"] = {n: float(np.nanmean(ft.positions[n][-1])) for n in FrontTable.NAMES}
        rep = weak_strong_compare(art, art)
        write_json(out / "entropy.json", rep.to_json())
    (out / "plot.gp").write_text(GNUPLOT.format(last=names[-1] if names else ""))
    write_json(out / "summary.json", summary)
    write_echo(cp, out)
    (out / "timings.txt").write_text(f"run_seconds {t_run:.3f}\ntotal_seconds {time.perf_counter() - t_start:.3f}\n")
    print(json.dumps(_clean({"steps": art.steps, "failure": art.failure, "out": str(out)}), sort_keys=True))
    return EXIT_MODEL if art.failure else EXIT_OK


def cmd_build_data(args, cp) -> int:
    from .data_construction import RightSolution, construct, verify_ansatz, write_slice_csv

    _apply_seed(args, cp)
    law = law_from(cp)
    base = state_from(cp, "right")
    pert = perturbation_from(cp)
    right = RightSolution(
        law,
        base,
        pert if pert.epsilon != 0 else None,
        n1=_get(cp, "data", "n1", int, default=128),
        n2=_get(cp, "data", "n2", int, default=48),
        half_length=_get(cp, "data", "half_length", default=1.5),
        order=_get(cp, "data", "time_order", int, default=16),
    )
    chart, td = construct(
        law,
        right,
        _get(cp, "data", "delta", default=0.05),
        N=_get(cp, "data", "N", int, default=4),
        u_star=_get(cp, "data", "u_star"),
        n_theta=_get(cp, "data", "n_theta", int, default=64),
        n_u=_get(cp, "data", "n_u", int, default=9),
    )
    rep = verify_ansatz(td, chart, pert.epsilon, C=_get(cp, "data", "C", default=100.0))
    out = output_dir(args, cp)
    write_slice_csv(out / "sigma_delta.csv", td, chart)
    (out / "ansatz.json").write_text(rep.to_json() + "\n")
    write_json(
        out / "matching.json",
        {"delta": td.delta, "order": td.order, "u_star": chart.u_star, "max_matching_residual": float(np.max(td.matching_residual))},
    )
    write_echo(cp, out)
    print(json.dumps({"passed": rep.passed, "out": str(out)}, sort_keys=True))
    return EXIT_OK


def cmd_trace_fronts(args, cp) -> int:
    from .acoustic_geometry import FrontGraph, SmoothChart, trace_front
    from .riemann1d import lambda2

    law = law_from(cp)
    right = state_from(cp, "right")
    u0 = _get(cp, "fronts", "u0", default=0.25)
    amp = _get(cp, "fronts", "amplitude", default=0.0)
    mode = _get(cp, "fronts", "mode", int, default=1)
    n_rays = _get(cp, "fronts", "n_rays", int, default=32)
    t_end = _get(cp, "fronts", "t_end", default=0.5)
    n_tau = _get(cp, "fronts", "n_tau", int, default=21)
    tol = _get(cp, "fronts", "tol", default=1e-11)
    if amp == 0.0:
        graph = FrontGraph.constant(u0)
    else:
        th = 2.0 * np.pi * np.arange(n_rays) / n_rays
        graph = FrontGraph.from_samples(u0 + amp * np.cos(mode * th))
    chart = SmoothChart.fan(law, right)
    surf = trace_front(chart, graph, n_rays, t_end, tol=tol)
    pts = surf.grid(n_tau)
    lam = lambda2(law, right)
    rows = []
    for i, a in enumerate(surf.alpha):
        for m in range(n_tau):
            t, u, th = pts[i, m]
            # the fan chart has kappa = t and That = (-1, 0): x1 = (lambda2_r - u) t
            rows.append([a, t, u, th, (lam - u) * t, th, u - graph.f(a)])
    out = output_dir(args, cp)
    write_csv(out / "front.csv", ("alpha", "t", "u", "theta", "x1", "x2", "u_residual"), rows)
    write_json(out / "front_status.json", {"status": surf.status})
    write_echo(cp, out)
    bad = [s for s in surf.status if s != "reached"]
    print(json.dumps({"rays": n_rays, "failed": len(bad), "out": str(out)}, sort_keys=True))
    return EXIT_MODEL if bad else EXIT_OK


def cmd_verify_entropy(args, cp) -> int:
    """Rerun the configured simulation and compare it against a refined reference.

    ``[entropy] refine = 1`` (default) is a self-comparison.
    """
    from dataclasses import replace

    from .relative_entropy import weak_strong_compare
    from .solver2d import run

    _apply_seed(args, cp)
    refine = _get(cp, "entropy", "refine", int, default=1)
    if refine < 1:
        raise ConfigError("refine must be a positive integer")
    cfg = run_config_from(cp, args.threads)
    art = run(cfg)
    if refine == 1:
        ref = art
    else:
        ref = run(replace(cfg, nx1=cfg.nx1 * refine, nx2=cfg.nx2 * refine, half_width=cfg.grid().half_width))
    if art.failure or ref.failure:
        raise ModelError(f"simulation failed: {art.failure or ref.failure}")
    rep = weak_strong_compare(art, ref)
    out = output_dir(args, cp)
    write_json(out / "entropy.json", rep.to_json())
    write_echo(cp, out)
    print(json.dumps({"integral_alpha_final": float(rep.integral_alpha[-1]), "out": str(out)}, sort_keys=True))
    return EXIT_OK


def _apply_seed(args, cp) -> None:
    if args.seed is not None:
        _set(cp, "perturbation", "seed", args.seed)


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads")
    common.add_argument("--seed", type=int, help="perturbation seed")
    p = argparse.ArgumentParser(prog="artifact", description="Rarefaction wave toolkit for 2D isentropic Euler.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve1d", parents=[common], help="exact 1D Riemann solution")
    s.add_argument("--left", help="left state 'rho,v1'")
    s.add_argument("--right", help="right state 'rho,v1'")
    s.add_argument("--profile-t", type=float, help="also sample the profile at this time")
    sub.add_parser("simulate2d", parents=[common], help="perturbed Riemann problem in 2D")
    sub.add_parser("build-data", parents=[common], help="Taylor data on the initial slice")
    sub.add_parser("trace-fronts", parents=[common], help="rule a front by null geodesics")
    sub.add_parser("verify-entropy", parents=[common], help="relative entropy report")
    return p


COMMANDS = {
    "solve1d": cmd_solve1d,
    "simulate2d": cmd_simulate2d,
    "build-data": cmd_build_data,
    "trace-fronts": cmd_trace_fronts,
    "verify-entropy": cmd_verify_entropy,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        cp = load_config(args.config)
        return COMMANDS[args.command](args, cp)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
