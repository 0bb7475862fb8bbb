"""Experiment runner: every pipeline as a subcommand with CSV + manifest output.

Commands
--------
simulate   sigma(t) series from one start (spread data)
sweep      all-initial-vertex exponent sweep and histogram
limiting   limiting distribution pi and its x-marginal
tvd        decay of ||p_bar(T) - pi|| over T
mixing     mixing times tau_eps over an epsilon grid (optionally several g)
verify     oracle and invariant suite for one generation

Identical configurations produce byte-identical CSV artifacts; each run also
writes a JSON manifest (config echo, versions, wall time) that can be fed
back through --config for exact replay.  Exit codes: 0 ok, 2 config error,
3 dimension/horizon cap exceeded, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, asdict, replace

import numpy as np
import scipy

from . import __version__, analysis, coinshift, evolution, observables, spectral
from .gasket import PERIODIC, REFLECTIVE, GasketSpec, build_gasket, contains, vertex_count

WORKERS_ENV = "GASKETWALK_WORKERS"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_VERIFY = 4

_DEFAULT_EPSILONS = (0.1, 0.05, 0.02, 0.01)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    generation: int = 2
    boundary: str = None  # type: ignore[assignment]  # command-dependent default
    start: str = None  # "x,y"; None means the bottom-center vertex (2^g, 0)
    steps: int = None
    horizon: int = None
    epsilons: tuple = _DEFAULT_EPSILONS
    window: tuple = None
    out: str = "out"
    dense: str = "auto"  # auto | always | never
    pi_horizon: int = 100_000
    workers: int = None
    generations: tuple = None  # mixing only; overrides generation

    def resolved_start(self):
        if self.start in (None, ""):
            return (2 ** self.generation, 0)
        parts = str(self.start).split(",")
        if len(parts) != 2:
            raise ConfigError(f"start: expected 'x,y', got {self.start!r}")
        try:
            return (int(parts[0]), int(parts[1]))
        except ValueError:
            raise ConfigError(f"start: expected integers 'x,y', got {self.start!r}") from None


_COMMAND_BOUNDARY = {
    "simulate": REFLECTIVE,
    "sweep": REFLECTIVE,
    "limiting": PERIODIC,
    "tvd": PERIODIC,
    "mixing": PERIODIC,
    "verify": PERIODIC,
}


def validate(config, command):
    errors = []
    if config.generation < 0:
        errors.append(f"generation: must be >= 0, got {config.generation}")
    if config.boundary not in (PERIODIC, REFLECTIVE):
        errors.append(f"boundary: must be periodic or reflective, got {config.boundary!r}")
    if command == "sweep" and config.boundary != REFLECTIVE:
        errors.append("boundary: exponent sweeps require reflective corners")
    if command == "mixing" and config.boundary != PERIODIC:
        errors.append("boundary: mixing analysis requires periodic corners")
    if command in ("simulate", "sweep"):
        if config.steps is None or config.steps < 1:
            errors.append(f"steps: must be >= 1, got {config.steps}")
    if command in ("tvd", "mixing"):
        if config.horizon is None or config.horizon < 1:
            errors.append(f"horizon: must be >= 1, got {config.horizon}")
    for eps in config.epsilons:
        if not (0.0 < eps < 1.0):
            errors.append(f"epsilons: each must lie in (0, 1), got {eps}")
    if config.window is not None:
        lo, hi = config.window
        if lo > hi or lo < 1:
            errors.append(f"window: need 1 <= lo <= hi, got {config.window}")
    if config.dense not in ("auto", "always", "never"):
        errors.append(f"dense: must be auto, always or never, got {config.dense!r}")
    if config.pi_horizon < 1:
        errors.append(f"pi_horizon: must be >= 1, got {config.pi_horizon}")
    if config.workers is not None and config.workers < 1:
        errors.append(f"workers: must be >= 1, got {config.workers}")
    gens = config.generations if config.generations else (config.generation,)
    for g in gens:
        if g < 0:
            errors.append(f"generations: must be >= 0, got {g}")
    if not errors and command != "sweep":
        try:
            x, y = config.resolved_start()
            for g in gens:
                start = (2 ** g, 0) if config.start in (None, "") else (x, y)
                if not contains(g, *start):
                    errors.append(f"start: vertex {start} is not on the generation-{g} gasket")
        except ConfigError as exc:
            errors.append(str(exc))
    return errors


def _resolve_pi(graph, state, config):
    """Limiting distribution by the configured route; returns (field, decomp or None)."""
    if config.dense == "never":
        return spectral.empirical_limiting(graph, state, horizon=config.pi_horizon), None
    if config.dense == "always" or graph.port_count <= spectral.DENSE_PORT_CAP:
        decomp = spectral.spectral_decomposition(graph)
        return spectral.limiting_distribution(decomp, state), decomp
    return spectral.empirical_limiting(graph, state, horizon=config.pi_horizon), None


# -- command bodies ----------------------------------------------------------


def _cmd_simulate(config, outdir):
    graph = build_gasket(GasketSpec(config.generation, config.boundary))
    shift = coinshift.build_shift(graph)
    state = evolution.initial_state(graph, config.resolved_start())
    samples = [observables.stddev(observables.probability(state), t=0)]

    def record(st):
        samples.append(observables.stddev(observables.probability(st), t=st.time))

    evolution.evolve(graph, shift, None, state, config.steps, observer=record)
    path = os.path.join(outdir, "sigma_series.csv")
    observables.write_sigma_csv(path, samples)
    return ["sigma_series.csv"], {"rows": len(samples)}


def _cmd_sweep(config, outdir):
    graph = build_gasket(GasketSpec(config.generation, config.boundary))
    steps = config.steps
    hist = analysis.sweep_exponents(graph, steps, window=config.window, workers=config.workers)
    analysis.write_exponents_csv(os.path.join(outdir, "exponents.csv"), hist)
    analysis.write_histogram_csv(os.path.join(outdir, "histogram.csv"), hist)
    analysis.write_mean_sigma_csv(os.path.join(outdir, "mean_sigma.csv"), hist)
    summary = {
        "mean_fit": asdict(hist.mean_fit),
        "dw_min": float(hist.dw.min()),
        "dw_max": float(hist.dw.max()),
    }
    return ["exponents.csv", "histogram.csv", "mean_sigma.csv"], summary


def _cmd_limiting(config, outdir):
    graph = build_gasket(GasketSpec(config.generation, config.boundary))
    state = evolution.initial_state(graph, config.resolved_start())
    pi, decomp = _resolve_pi(graph, state, config)
    observables.write_field_csv(os.path.join(outdir, "limiting_field.csv"), pi)
    observables.write_x_marginal_csv(os.path.join(outdir, "limiting_x_marginal.csv"), pi)
    artifacts = ["limiting_field.csv", "limiting_x_marginal.csv"]
    if decomp is not None:
        spectral.write_eigenvalue_csv(os.path.join(outdir, "eigenvalues.csv"), decomp)
        artifacts.append("eigenvalues.csv")
    return artifacts, {"pi_label": pi.label, "pi_total": pi.total()}


def _cmd_tvd(config, outdir):
    graph = build_gasket(GasketSpec(config.generation, config.boundary))
    state = evolution.initial_state(graph, config.resolved_start())
    pi, _ = _resolve_pi(graph, state, config)
    series = analysis.tvd_decay_series(graph, state, config.horizon, pi)
    observables.write_tvd_csv(os.path.join(outdir, "tvd_series.csv"), series)
    return ["tvd_series.csv"], {"pi_label": pi.label, "final_tvd": float(series[-1])}


def _cmd_mixing(config, outdir):
    gens = config.generations if config.generations else (config.generation,)
    rows = []
    for g in sorted(gens):
        cfg = replace(config, generation=g)
        graph = build_gasket(GasketSpec(g, config.boundary))
        state = evolution.initial_state(graph, cfg.resolved_start())
        pi, _ = _resolve_pi(graph, state, config)
        series = analysis.tvd_decay_series(graph, state, config.horizon, pi)
        for eps in config.epsilons:
            res = analysis.scan_mixing_time(series, eps, config.horizon)
            rows.append((graph.num_vertices, eps, res.tau))
    analysis.write_mixing_csv(os.path.join(outdir, "mixing.csv"), rows)
    return ["mixing.csv"], {"rows": len(rows)}


def _cmd_verify(config, outdir):
    graph_p = build_gasket(GasketSpec(config.generation, PERIODIC))
    graph_r = build_gasket(GasketSpec(config.generation, REFLECTIVE))
    checks = []

    def check(name, ok, detail=""):
        checks.append({"name": name, "pass": bool(ok), "detail": detail})
        print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f"  ({detail})" if detail else ""))

    n = vertex_count(config.generation)
    check("vertex count 3(3^g+1)/2", graph_p.num_vertices == n, f"N={n}")
    for graph in (graph_p, graph_r):
        shift = coinshift.build_shift(graph)
        bc = graph.boundary
        check(f"shift involution ({bc})", shift.is_involution())
        state = evolution.initial_state(graph, (2 ** config.generation, 0))
        drift = abs(evolution.evolve(graph, shift, None, state, 1000).norm() - 1.0)
        check(f"norm drift after 1000 steps ({bc})", drift < 1e-10, f"drift={drift:.2e}")
        if graph.port_count <= spectral.DENSE_PORT_CAP:
            u = spectral.build_dense_unitary(graph)
            uni = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
            check(f"dense unitarity ({bc})", uni <= 1e-12, f"err={uni:.2e}")
            vec = spectral.state_to_port_vector(graph, state)
            st = state
            worst = 0.0
            for _ in range(50):
                st = evolution.step(graph, shift, None, st)
                vec = u @ vec
                worst = max(worst, float(np.abs(spectral.state_to_port_vector(graph, st) - vec).max()))
            check(f"sparse vs dense over 50 steps ({bc})", worst <= 1e-12, f"err={worst:.2e}")
        else:
            check(f"dense checks ({bc})", True, "skipped: over dense cap")
    if graph_p.port_count <= spectral.DENSE_PORT_CAP:
        decomp = spectral.spectral_decomposition(graph_p)
        state = evolution.initial_state(graph_p, (2 ** config.generation, 0))
        shift = coinshift.build_shift(graph_p)
        acc = observables.TimeAverage(graph_p)
        st = state
        acc.add(observables.probability(st))
        for _ in range(199):
            st = evolution.step(graph_p, shift, None, st)
            acc.add(observables.probability(st))
        diff = float(np.abs(acc.mean().p - spectral.exact_time_average(decomp, state, 200).p).max())
        check("iterative vs spectral time average (T=200)", diff <= 1e-8, f"err={diff:.2e}")
    path = os.path.join(outdir, "verify.json")
    with open(path, "w") as fh:
        json.dump(checks, fh, indent=2)
        fh.write("\n")
    ok = all(c["pass"] for c in checks)
    return ["verify.json"], {"all_pass": ok}


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "limiting": _cmd_limiting,
    "tvd": _cmd_tvd,
    "mixing": _cmd_mixing,
    "verify": _cmd_verify,
}


def execute(config, command):
    """Run one command; returns the process exit status."""
    errors = validate(config, command)
    if errors:
        for e in errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    outdir = config.out
    os.makedirs(outdir, exist_ok=True)
    started = time.time()
    try:
        artifacts, summary = _COMMANDS[command](config, outdir)
    except spectral.DimensionCapError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        # precondition violations surfaced by the library (cutoff guard etc.)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    manifest = {
        "command": command,
        "config": asdict(config),
        "versions": {
            "gasketwalk": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
        "wall_time_s": round(time.time() - started, 3),
        "artifacts": artifacts,
        "summary": summary,
    }
    with open(os.path.join(outdir, f"{command}_manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    if command == "verify" and not summary.get("all_pass", False):
        return EXIT_VERIFY
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------


def _int_pair(text):
    lo, hi = text.split(",")
    return (int(lo), int(hi))


def _float_list(text):
    return tuple(float(x) for x in text.split(","))


def _int_list(text):
    return tuple(int(x) for x in text.split(","))


def build_parser():
    parser = argparse.ArgumentParser(prog="gasketwalk", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"{name} pipeline")
        p.add_argument("--config", help="JSON config or a previous run manifest; flags override")
        p.add_argument("--g", type=int, default=None, help="gasket generation")
        p.add_argument("--bc", choices=(PERIODIC, REFLECTIVE), default=None, help="boundary condition")
        p.add_argument("--start", default=None, help="initial vertex 'x,y' (default: bottom center 2^g,0)")
        p.add_argument("--steps", type=int, default=None, help="number of walk steps")
        p.add_argument("--horizon", type=int, default=None, help="scan horizon for tvd/mixing")
        p.add_argument("--epsilons", type=_float_list, default=None, help="comma list, e.g. 0.1,0.05,0.02")
        p.add_argument("--window", type=_int_pair, default=None, help="fit window 'tmin,tmax'")
        p.add_argument("--out", default=None, help="output directory (default: out)")
        p.add_argument("--dense", choices=("auto", "always", "never"), default=None,
                       help="dense spectral route for pi")
        p.add_argument("--pi-horizon", type=int, default=None, dest="pi_horizon",
                       help="steps for the empirical pi fallback")
        p.add_argument("--workers", type=int, default=None,
                       help=f"sweep worker processes (or set {WORKERS_ENV})")
        if name == "mixing":
            p.add_argument("--generations", type=_int_list, default=None,
                           help="comma list of generations for one mixing table")
    return parser


def config_from_args(args, command):
    base = ExperimentConfig()
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        if "config" in data and isinstance(data["config"], dict):
            data = data["config"]  # a manifest; replay its config
        known = set(ExperimentConfig.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        for key, val in data.items():
            if isinstance(val, list):
                val = tuple(val)
            setattr(base, key, val)
    overrides = {
        "generation": args.g,
        "boundary": args.bc,
        "start": args.start,
        "steps": args.steps,
        "horizon": args.horizon,
        "epsilons": args.epsilons,
        "window": args.window,
        "out": args.out,
        "dense": args.dense,
        "pi_horizon": args.pi_horizon,
        "workers": args.workers,
        "generations": getattr(args, "generations", None),
    }
    for key, val in overrides.items():
        if val is not None:
            setattr(base, key, val)
    if base.boundary is None:
        base.boundary = _COMMAND_BOUNDARY[command]
    if base.horizon is None:
        base.horizon = 10_000
    if base.workers is None and os.environ.get(WORKERS_ENV):
        try:
            base.workers = int(os.environ[WORKERS_ENV])
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {os.environ[WORKERS_ENV]!r}")
    if base.window is not None:
        base.window = tuple(base.window)
    base.epsilons = tuple(base.epsilons)
    if base.generations is not None:
        base.generations = tuple(base.generations)
    return base


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args, args.command)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return execute(config, args.command)


if __name__ == "__main__":
    sys.exit(main())
