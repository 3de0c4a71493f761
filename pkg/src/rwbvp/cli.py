"""Command-line front end: ``rwbvp <subcommand> [--config FILE] [--set key=value ...]``.

Exit codes: 0 success, 2 configuration error, 3 numerical divergence,
4 walk truncated by the step cap.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import oracles
from .config import ConfigError, load_config, parse_value
from .errors import BracketError, SingularFitError, WalkTruncatedError
from .geometry import Boundary, CircularAnnulus, Interval1D, make_domain
from .hitting import aggregate_hitting, estimate_hitting
from .linear import estimate_profile
from .nonlinear import (Status, StopRule, cubic_problem, solve_nonlinear,
                        validation_problem, zero_problem)
from .regression import fit as fit_model
from .tables import ResultTable, read_table, write_plot_data, write_table
from .walk import StepScheme, WalkParams

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_TRUNCATED = 0, 2, 3, 4
GROWTH_WINDOW = 10


class Diverged(Exception):
    """Raised by a command after writing its output, to set exit code 3."""


# ---------------------------------------------------------------- helpers

def _set_threads(n: int) -> None:
    import numba

    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS) if n else
                          numba.config.NUMBA_NUM_THREADS)


def _meta(cfg, command: str, **extra) -> dict:
    meta = {"command": command, "seed": cfg.seed, "version": __version__}
    meta.update(extra)
    return meta


def _finish(table: ResultTable, path: str, started: float) -> None:
    table.meta["wall_time"] = round(time.perf_counter() - started, 3)
    write_table(table, path)


def _sibling(path: str, suffix: str):
    """Companion file next to a CSV output, or None when writing to stdout."""
    if path in ("", "-"):
        return None
    return Path(path).with_suffix(suffix)


def _walk_setup(cfg):
    try:
        domain = make_domain(cfg.domain, cfg.domain_params)
        params = WalkParams(cfg.h, StepScheme(cfg.scheme), cfg.diffusion, cfg.max_steps)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    return domain, params


def _starts(cfg, dim: int) -> list:
    if cfg.segment:
        if len(cfg.segment) != 2 * dim:
            raise ConfigError(f"segment needs {2 * dim} values for a {dim}-d domain")
        a, b = np.array(cfg.segment[:dim]), np.array(cfg.segment[dim:])
        n = cfg.segment_count
        ts = np.linspace(0, 1, n + 2)[1:-1] if cfg.segment_interior else np.linspace(0, 1, n)
        return [tuple((a + t * (b - a)).tolist()) for t in ts]
    if not cfg.points or len(cfg.points) % dim:
        raise ConfigError(f"points must hold a multiple of {dim} coordinates")
    return [tuple(cfg.points[i:i + dim]) for i in range(0, len(cfg.points), dim)]


def _coord_names(dim: int) -> list:
    return ["x", "y"][:dim]


SOURCES = {
    "zero": lambda v: None,
    "constant": lambda v: (lambda *c: np.full(np.shape(c[0]), v)),
    "sin-pi-x": lambda v: (lambda x, *rest: np.sin(np.pi * x)),
}


def _boundary_values(cfg):
    values = {Boundary.LEFT: cfg.g_left, Boundary.RIGHT: cfg.g_right,
              Boundary.INNER: cfg.g_inner, Boundary.OUTER: cfg.g_outer,
              Boundary.SPHERE: cfg.g_sphere}
    table = np.array([values[b] for b in sorted(values)])

    def g(label, *coords):
        return table[np.asarray(label, dtype=np.int64)]

    return g


def _exact_linear(cfg, domain):
    """Closed form for source-free problems on annuli and intervals, else None."""
    if cfg.source != "zero":
        return None
    if isinstance(domain, CircularAnnulus):
        lo, hi = domain.r_in, domain.r_out
        return lambda r: cfg.g_inner + (cfg.g_outer - cfg.g_inner) * math.log(r / lo) / math.log(hi / lo)
    if isinstance(domain, Interval1D):
        return lambda x: cfg.g_left + (cfg.g_right - cfg.g_left) * x / domain.L
    return None


def _growing(snapshots, window: int = GROWTH_WINDOW) -> bool:
    peaks = [float(np.max(np.abs(u))) for _, u in snapshots[-window:]]
    return len(peaks) == window and all(b > a for a, b in zip(peaks, peaks[1:]))


def _stop_rule(cfg) -> StopRule:
    return StopRule(cfg.stop, cfg.tol, cfg.slack, cfg.miter)


def _problem(cfg):
    if cfg.problem == "cubic":
        return cubic_problem(cfg.a)
    if cfg.problem == "validation-exp":
        return validation_problem()
    return zero_problem()


def _reference(cfg, x):
    """Deterministic reference on the same nodes, or None."""
    if cfg.problem == "validation-exp":
        return oracles.validation_exact(x)
    if cfg.problem == "zero":
        return x.copy()
    sol = oracles.fd_branch(cfg.a, len(x) - 1)
    return sol.u if sol.converged else None


def _load_initial(path: str):
    try:
        table = read_table(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read initial profile {path}: {exc}") from None
    if "u" not in table.columns:
        raise ConfigError(f"{path} has no 'u' column")
    return np.array(table.column("u"), dtype=float)


def _nonlinear_table(report, reference=None) -> ResultTable:
    st = report.state
    cols = ["node", "x", "u", "weight"]
    if reference is not None:
        cols += ["u_ref", "rel_err"]
    table = ResultTable(cols)
    for k, (x, u, w) in enumerate(zip(st.x, st.values, st.weights)):
        row = [k, float(x), float(u), int(w)]
        if reference is not None:
            ref = float(reference[k])
            row += [ref, abs(u - ref) / abs(ref) if ref != 0 else None]
        table.add(*row)
    return table


def _report_meta(report) -> dict:
    st = report.state
    meta = {"status": st.status.value, "iterations": st.iteration, "updates": st.updates,
            "stop_rule": report.stop_rule, "monotone": report.monotone}
    if report.envelope_ok is not None:
        meta["envelope_ok"] = report.envelope_ok
    return meta


def _max_rel_err(x, u, reference, x_min: float = 0.0):
    mask = (x >= x_min) & (reference != 0)
    mask[0] = mask[-1] = False
    if not mask.any():
        return None
    return float(np.max(np.abs(u[mask] - reference[mask]) / np.abs(reference[mask])))


def _snapshot_table(snapshots) -> ResultTable:
    table = ResultTable(["iteration", "node", "u"])
    for it, u in snapshots:
        for k, v in enumerate(u):
            table.add(int(it), k, float(v))
    return table


# ---------------------------------------------------------------- commands

def cmd_solve_linear(cfg, started):
    domain, params = _walk_setup(cfg)
    starts = _starts(cfg, domain.dim)
    f = SOURCES[cfg.source](cfg.source_value)
    try:
        ests = estimate_profile(domain, f, _boundary_values(cfg), starts, cfg.nt, params,
                                cfg.seed, cfg.laplacian_form)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    exact = _exact_linear(cfg, domain)
    cols = _coord_names(domain.dim) + ["r", "mean", "std_error", "nt", "mean_steps"]
    if exact:
        cols.append("exact")
    table = ResultTable(cols, meta=_meta(cfg, "solve-linear", h=cfg.h, scheme=cfg.scheme,
                                         laplacian_form=cfg.laplacian_form))
    for e in ests:
        r = math.hypot(*e.point)
        row = list(e.point) + [r, e.mean, e.std_error, e.nt, e.mean_steps]
        if exact:
            row.append(exact(r))
        table.add(*row)
    table.meta["status"] = "ok"
    _finish(table, cfg.output, started)

    dat = _sibling(cfg.output, ".dat")
    if dat is not None:
        write_plot_data(dat, ["r", "mean", "lower", "upper"],
                        [(math.hypot(*e.point), e.mean, e.mean - e.std_error,
                          e.mean + e.std_error) for e in ests])
    png = _sibling(cfg.output, ".png")
    if cfg.plot and png is not None:
        from .plotting import profile_figure

        rs = [math.hypot(*e.point) for e in ests]
        profile_figure(rs, [e.mean for e in ests], [e.std_error for e in ests], png,
                       exact=exact, xlabel="r" if domain.dim == 2 else "x")


def cmd_hitting_times(cfg, started):
    domain, params = _walk_setup(cfg)
    stats = estimate_hitting(domain, _starts(cfg, domain.dim), cfg.nt, params, cfg.seed)
    agg = aggregate_hitting(stats)
    coords = _coord_names(domain.dim)
    cols = ["kind"] + coords + ["r", "nt", "mean_time", "inner_fraction",
                                "inner_mean_time", "outer_mean_time"]
    table = ResultTable(cols, meta=_meta(cfg, "hitting-times", h=cfg.h, scheme=cfg.scheme))
    for s in stats:
        table.add("start", *s.start, s.radius, s.nt, s.mean_time, s.inner_fraction,
                  s.inner_mean_time, s.outer_mean_time)
    blank = [None] * (len(coords) + 1)
    table.add("pooled", *blank, agg.n_walks, agg.E, agg.f1, agg.T1, agg.T2)
    table.add("per-start-mean", *blank, agg.n_starts, None, None, agg.E1, agg.E2)
    table.meta["decomposition_rhs"] = agg.decomposition()

    fitted = None
    if cfg.fit and len(stats) >= 3:
        try:
            fitted = fit_model("quadratic", [s.radius for s in stats],
                               [s.mean_time for s in stats])
            for name, c in zip(fitted.names, fitted.coefficients):
                table.meta[f"fit_{name}"] = float(c)
        except SingularFitError as exc:
            table.meta["fit_error"] = str(exc)
    table.meta["status"] = "ok"
    _finish(table, cfg.output, started)

    png = _sibling(cfg.output, ".png")
    if cfg.plot and png is not None:
        from .plotting import hitting_figure

        hitting_figure(stats, png, fitted)


def _run_nonlinear(cfg, problem, initial, snapshot_every):
    return solve_nonlinear(problem, cfg.maxpt, cfg.nt, cfg.mode, _stop_rule(cfg), cfg.seed,
                           initial, cfg.m_div, snapshot_every)


def _diverged(report) -> bool:
    st = report.state
    if st.status is Status.DIVERGED:
        return True
    return st.status is Status.ITERATION_CAP and _growing(report.snapshots)


def cmd_solve_nonlinear(cfg, started):
    problem = _problem(cfg)
    initial = _load_initial(cfg.initial_file) if cfg.initial_file else None
    try:
        report = _run_nonlinear(cfg, problem, initial, cfg.snapshot_every)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    st = report.state
    reference = _reference(cfg, st.x) if cfg.compare_fd else None
    table = _nonlinear_table(report, reference)
    table.meta.update(_meta(cfg, "solve-nonlinear", problem=cfg.problem, a=cfg.a,
                            maxpt=cfg.maxpt, nt=cfg.nt, mode=cfg.mode))
    table.meta.update(_report_meta(report))
    if reference is not None:
        table.meta["max_rel_err"] = _max_rel_err(st.x, st.values, reference)
        table.meta["max_rel_err_x_ge_0.1"] = _max_rel_err(st.x, st.values, reference, 0.1)
    _finish(table, cfg.output, started)

    snap = _sibling(cfg.output, ".snapshots.csv")
    if report.snapshots and snap is not None:
        write_table(_snapshot_table(report.snapshots), snap)
    png = _sibling(cfg.output, ".png")
    if cfg.plot and png is not None:
        from .plotting import grid_solution_figure

        env = None
        if problem.bounds is not None:
            env = problem.bounds
        grid_solution_figure(st.x, st.values, png, reference, env, title=problem.name)
    if _diverged(report):
        raise Diverged(st.status.value)


def cmd_sweep_a(cfg, started):
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    summary = ResultTable(["a", "status", "iterations", "u_mid", "max_rel_err", "file"],
                          meta=_meta(cfg, "sweep-a", maxpt=cfg.maxpt, nt=cfg.nt, mode=cfg.mode))
    curves = {}
    for i, a in enumerate(cfg.a_values):
        cfg_a = _replace(cfg, a=a, problem="cubic")
        report = solve_nonlinear(cubic_problem(a), cfg.maxpt, cfg.nt, cfg.mode,
                                 _stop_rule(cfg), cfg.seed + i, None, cfg.m_div)
        st = report.state
        reference = _reference(cfg_a, st.x) if cfg.compare_fd else None
        table = _nonlinear_table(report, reference)
        table.meta.update(_meta(cfg, "sweep-a", a=a, seed_used=cfg.seed + i))
        table.meta.update(_report_meta(report))
        name = f"a_{a:+g}.csv"
        write_table(table, out / name)
        err = _max_rel_err(st.x, st.values, reference) if reference is not None else None
        summary.add(float(a), st.status.value, st.iteration,
                    float(np.interp(0.5, st.x, st.values)), err, name)
        curves[f"a = {a:g}"] = (st.x, st.values)
    summary.meta["status"] = "ok"
    _finish(summary, str(out / "summary.csv"), started)
    if cfg.plot:
        from .plotting import fan_figure

        fan_figure(curves, out / "fan.png")


def _replace(cfg, **changes):
    import dataclasses

    return dataclasses.replace(cfg, **changes)


def cmd_stability_probe(cfg, started):
    if cfg.initial_file:
        initial = _load_initial(cfg.initial_file)
        source = cfg.initial_file
    else:
        try:
            guess = oracles.initial_guess(cfg.fd_guess)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        fd = oracles.fd_solve_cubic(cfg.a, cfg.fd_n, guess)
        if not fd.converged:
            raise ConfigError(f"finite differences from guess {cfg.fd_guess!r} did not "
                              f"converge at a = {cfg.a}; give initial_file instead")
        initial = fd.u
        source = f"fd:{cfg.fd_guess}"
    report = _run_nonlinear(cfg, cubic_problem(cfg.a), initial, max(cfg.snapshot_every, 1))
    table = ResultTable(["iteration", "max_abs_u"],
                        meta=_meta(cfg, "stability-probe", a=cfg.a, maxpt=cfg.maxpt,
                                   nt=cfg.nt, mode=cfg.mode, initial=source))
    for it, u in report.snapshots:
        table.add(int(it), float(np.max(np.abs(u))))
    table.meta.update(_report_meta(report))
    table.meta["growing"] = _growing(report.snapshots)
    diverged = _diverged(report)
    table.meta["diverged"] = diverged
    _finish(table, cfg.output, started)
    if diverged:
        raise Diverged(report.state.status.value)


def cmd_fit(cfg, started):
    try:
        src = read_table(cfg.input)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read {cfg.input}: {exc}") from None
    y_col = cfg.y_column or next((c for c in ("mean", "mean_time", "u") if c in src.columns), "")
    x_col = cfg.x_column if cfg.x_column in src.columns else ("x" if "x" in src.columns else "")
    if not y_col or y_col not in src.columns or not x_col:
        raise ConfigError(f"{cfg.input}: need columns {cfg.x_column!r} and a y column; "
                          f"found {src.columns}")
    xi, yi = src.columns.index(x_col), src.columns.index(y_col)
    ki = src.columns.index("kind") if "kind" in src.columns else None
    pairs = [(r[xi], r[yi]) for r in src.rows
             if r[xi] is not None and r[yi] is not None and (ki is None or r[ki] == "start")]
    xs, ys = zip(*pairs) if pairs else ((), ())
    try:
        res = fit_model(cfg.model, xs, ys)
    except SingularFitError as exc:
        raise ConfigError(f"fit failed: {exc}") from None
    table = ResultTable(["name", "value", "ci95_low", "ci95_high"],
                        meta=_meta(cfg, "fit", model=cfg.model, input=cfg.input,
                                   x_column=x_col, y_column=y_col, n_points=res.n_points,
                                   rss=res.rss))
    for i, name in enumerate(res.names):
        lo, hi = res.interval(i)
        table.add(name, float(res.coefficients[i]), lo, hi)
    table.meta["status"] = "ok"
    _finish(table, cfg.output, started)
    png = _sibling(cfg.output, ".png")
    if cfg.plot and png is not None:
        from .plotting import profile_figure

        profile_figure(list(xs), list(ys), None, png, fit=res, xlabel=x_col)


def cmd_oracle(cfg, started):
    kind = cfg.kind
    meta = _meta(cfg, "oracle", kind=kind)
    try:
        if kind == "annulus":
            pts = _pairs(cfg.points, 2)
            table = ResultTable(["x", "y", "r", "u"], meta=meta)
            for p in pts:
                table.add(*p, math.hypot(*p), oracles.annulus_exact(p))
        elif kind == "validation":
            table = ResultTable(["x", "u"], meta=meta)
            for x in cfg.points:
                table.add(x, float(oracles.validation_exact(x)))
        elif kind == "ball-hitting":
            pts = _pairs(cfg.points, cfg.d)
            table = ResultTable(_coord_names(cfg.d) if cfg.d <= 2 else
                                [f"x{i}" for i in range(cfg.d)], meta=meta)
            table.columns.append("mean_time")
            for p in pts:
                table.add(*p, oracles.ball_hitting_exact(p, cfg.r, cfg.d, cfg.diffusion))
        elif kind == "discrete-linear":
            u = oracles.discrete_linear_oracle(cfg.maxpt, cfg.f_value, cfg.g_left,
                                               cfg.g_right, cfg.dt)
            table = ResultTable(["node", "x", "u"], meta=meta)
            for k, v in enumerate(u):
                table.add(k, k / cfg.maxpt, float(v))
        elif kind == "fd-cubic":
            if cfg.init == "branch":
                sol = oracles.fd_branch(cfg.a, cfg.n)
            else:
                sol = oracles.fd_solve_cubic(cfg.a, cfg.n, oracles.initial_guess(cfg.init))
            table = ResultTable(["node", "x", "u", "weight"], meta=meta)
            for k, (x, v) in enumerate(zip(sol.x, sol.u)):
                table.add(k, float(x), float(v), 0)
            meta.update(a=cfg.a, n=cfg.n, init=cfg.init, converged=sol.converged,
                        newton_iterations=sol.newton_iterations, residual=sol.residual,
                        slope_left=sol.slope_left, slope_right=sol.slope_right)
            if not sol.converged:
                meta["status"] = "not-converged"
                _finish(table, cfg.output, started)
                raise Diverged("finite differences did not converge")
        else:  # slope-root
            a = oracles.find_a_for_slope(cfg.target, tuple(cfg.bracket), cfg.n)
            table = ResultTable(["target", "bracket_low", "bracket_high", "a"], meta=meta)
            table.add(cfg.target, cfg.bracket[0], cfg.bracket[1], a)
    except (ValueError, BracketError) as exc:
        raise ConfigError(str(exc)) from None
    table.meta.setdefault("status", "ok")
    _finish(table, cfg.output, started)


def _pairs(values, dim):
    if not values or len(values) % dim:
        raise ConfigError(f"points must hold a multiple of {dim} coordinates")
    return [tuple(values[i:i + dim]) for i in range(0, len(values), dim)]


COMMANDS = {
    "solve-linear": cmd_solve_linear,
    "hitting-times": cmd_hitting_times,
    "solve-nonlinear": cmd_solve_nonlinear,
    "fit": cmd_fit,
    "oracle": cmd_oracle,
    "sweep-a": cmd_sweep_a,
    "stability-probe": cmd_stability_probe,
}

HELP = {
    "solve-linear": "Monte Carlo estimates of a linear Dirichlet problem at given points",
    "hitting-times": "mean exit times and their inner/outer split",
    "solve-nonlinear": "fixed-point random-walk solver on [0, 1]",
    "fit": "least-squares fit of a profile CSV",
    "oracle": "deterministic reference values",
    "sweep-a": "nonlinear solves over a list of a values",
    "stability-probe": "nonlinear solve seeded with a finite-difference profile",
}


# ---------------------------------------------------------------- entry point

def _key_value(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    return key.strip().replace("-", "_"), parse_value(value.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rwbvp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name], description=HELP[name])
        p.add_argument("--config", "-c", help="TOML file with parameters")
        p.add_argument("--set", "-s", dest="overrides", action="append", default=[],
                       type=_key_value, metavar="KEY=VALUE",
                       help="override one parameter (repeatable)")
        p.add_argument("--seed", type=int)
        p.add_argument("--output", "-o", help="CSV path, '-' for stdout")
        p.add_argument("--threads", type=int, help="worker threads, 0 for all")
        p.add_argument("--plot", action="store_true", default=None,
                       help="also write PNG figures next to the CSV")
        if name in ("solve-linear", "hitting-times", "solve-nonlinear", "sweep-a",
                    "stability-probe"):
            p.add_argument("--nt", type=int, help="walks per estimate")
        if name in ("solve-linear", "hitting-times"):
            p.add_argument("--h", type=float, help="lattice step")
        if name in ("solve-nonlinear", "stability-probe", "oracle"):
            p.add_argument("--a", type=float, help="cubic coefficient")
        if name == "fit":
            p.add_argument("input", nargs="?", help="CSV produced by another subcommand")
            p.add_argument("--model", choices=("log-annulus", "quadratic"))
        if name == "oracle":
            p.add_argument("--kind")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = dict(args.overrides)
    for key in ("seed", "output", "threads", "plot", "nt", "h", "a", "input", "model", "kind"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    started = time.perf_counter()
    try:
        cfg = load_config(args.command, args.config, overrides)
        _set_threads(cfg.threads)
        COMMANDS[args.command](cfg, started)
    except ConfigError as exc:
        print(f"rwbvp: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Diverged as exc:
        print(f"rwbvp: numerical divergence ({exc})", file=sys.stderr)
        return EXIT_DIVERGED
    except WalkTruncatedError as exc:
        print(f"rwbvp: {exc}", file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
