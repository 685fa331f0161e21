"""Command-line driver: ``hjfilter run|convergence|compare <experiment> [...]``.

Exit status is 0 on success, 1 when a run blows up and 2 for usage or
configuration errors. Output files go to ``--out`` (default ``.``).
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import analysis
from .core import ConfigurationError, NumericalBlowup, SolverConfig
from .experiments import Experiment, REGISTRY, get_experiment, parse_selector
from .filters import get_filter

EXIT_OK = 0
EXIT_BLOWUP = 1
EXIT_USAGE = 2

TABLE_HEADER = "N_x,N_t,scheme,linf_err,linf_ord,l1_err,l1_ord,cpu_s"

# keys accepted in a --config file, mapped to argparse destinations
CONFIG_KEYS = {
    "scheme": "scheme",
    "filter": "filter",
    "K": "K",
    "sigma": "sigma",
    "M": "M",
    "N_x": "nx",
    "nx": "nx",
    "lambda": "lam",
    "eps_fixed": "eps_fixed",
    "out": "out",
}


class UsageError(Exception):
    pass


def fmt(value: float) -> str:
    """Six significant digits in scientific notation, locale independent."""
    return "{:.5e}".format(float(value))


def _fmt_order(value: Optional[float]) -> str:
    return "" if value is None else fmt(value)


def read_config(path: str) -> Dict[str, str]:
    """Flat ``key=value`` file. Blank lines and ``#`` comments are skipped."""
    values: Dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[CONFIG_KEYS[key]] = value
    return values


def worker_count(n_jobs: int) -> int:
    """Threads for a refinement ladder: ``HJFILTER_THREADS`` caps it, default 1."""
    raw = os.environ.get("HJFILTER_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"HJFILTER_THREADS must be an integer, got {raw!r}") from None
    if cap < 1:
        raise UsageError("HJFILTER_THREADS must be at least 1")
    return max(1, min(cap, n_jobs))


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("experiment", help="experiment id: " + ", ".join(REGISTRY))
    common.add_argument("--scheme", action="append",
                        help="selector such as AF-HC, F-LWR, F-HC@5, LW4 or MONO; "
                             "compare accepts several (repeat or comma-separate)")
    common.add_argument("--filter", help="f1, f2, f3 or f4 (default f1)")
    common.add_argument("--K", type=float, help="threshold constant (> 1/2)")
    common.add_argument("--sigma", type=float, help="indicator regularization")
    common.add_argument("--M", type=float, help="regularity threshold in (0, 1/2)")
    common.add_argument("--nx", help="grid size; a comma list sets the ladder")
    common.add_argument("--eps-fixed", dest="eps_fixed", type=float,
                        help="eps = value*dx for F- selectors")
    common.add_argument("--lambda", dest="lam", type=float, help="override dt/dx")
    common.add_argument("--out", help="output directory (default .)")
    common.add_argument("--config", help="key=value file; flags take precedence")
    common.add_argument("--plot", action="store_true", help="also write PNG figures")

    parser = argparse.ArgumentParser(prog="hjfilter",
                                     description="Adaptive filtered schemes for HJ equations")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="single run with diagnostics")
    sub.add_parser("convergence", parents=[common], help="error table over a refinement ladder")
    sub.add_parser("compare", parents=[common], help="tables for several schemes")
    return parser


@dataclasses.dataclass
class Options:
    experiment: Experiment
    selectors: List[str]
    filter_name: str
    config: SolverConfig
    ladder: Optional[List[int]]
    eps_fixed: Optional[float]
    out: Path
    plot: bool


def _merge(args: argparse.Namespace) -> Dict[str, object]:
    merged: Dict[str, object] = {}
    if args.config:
        merged.update(read_config(args.config))
    for key in ("filter", "K", "sigma", "M", "nx", "eps_fixed", "lam", "out"):
        value = getattr(args, key)
        if value is not None:
            merged[key] = value
    if args.scheme is not None:
        merged["scheme"] = ",".join(args.scheme)
    return merged


def _number(merged, key, cast=float):
    if key not in merged:
        return None
    try:
        return cast(merged[key])
    except (TypeError, ValueError):
        raise UsageError(f"bad value for {key}: {merged[key]!r}") from None


def resolve(args: argparse.Namespace) -> Options:
    exp = get_experiment(args.experiment)
    merged = _merge(args)

    lam = _number(merged, "lam")
    if lam is not None:
        exp = dataclasses.replace(exp, lam=lam)

    selectors: List[str] = []
    if "scheme" in merged:
        selectors = [s.strip() for s in str(merged["scheme"]).split(",") if s.strip()]
        if not selectors:
            raise UsageError("empty scheme list")
    for s in selectors:
        parse_selector(s)

    eps_fixed = _number(merged, "eps_fixed")
    if eps_fixed is not None:
        if eps_fixed <= 0:
            raise UsageError("--eps-fixed must be positive")
        # without --scheme the defaults are adaptive, so the value would be ignored
        if not selectors or any(parse_selector(s)[0] != "F" for s in selectors):
            raise UsageError("--eps-fixed only applies to F- selectors")

    overrides = {}
    for key, field in (("K", "K"), ("sigma", "sigma"), ("M", "M_threshold")):
        value = _number(merged, key)
        if value is not None:
            overrides[field] = value
    config = SolverConfig(**overrides)

    filter_name = str(merged.get("filter", "f1"))
    try:
        get_filter(filter_name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    ladder = None
    if "nx" in merged:
        try:
            ladder = [int(v) for v in str(merged["nx"]).split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"bad --nx value {merged['nx']!r}") from None
        if not ladder:
            raise UsageError("empty --nx list")

    return Options(exp, selectors, filter_name, config, ladder, eps_fixed,
                   Path(str(merged.get("out", "."))), args.plot)


# writers


def _write_lines(path: Path, lines: Sequence[str]) -> Path:
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def table_lines(reports: Sequence[analysis.ErrorReport], header: bool = True) -> List[str]:
    lines = [TABLE_HEADER] if header else []
    for rep in reports:
        for r in rep.rows:
            lines.append(",".join([str(r.n_x), str(r.n_t), rep.scheme, fmt(r.linf),
                                   _fmt_order(r.linf_order), fmt(r.l1),
                                   _fmt_order(r.l1_order), fmt(r.cpu_seconds)]))
    return lines


def _write_meta(path: Path, opts: Options, selectors: Sequence[str]) -> Path:
    exp, cfg = opts.experiment, opts.config
    lines = [f"experiment={exp.id}", f"scheme={','.join(selectors)}",
             f"filter={opts.filter_name}", f"K={cfg.K!r}", f"sigma={cfg.sigma!r}",
             f"M={cfg.M_threshold!r}", f"lambda={exp.lam!r}"]
    if opts.eps_fixed is not None:
        lines.append(f"eps_fixed={opts.eps_fixed!r}")
    return _write_lines(path, lines)


def cmd_run(opts: Options) -> List[Path]:
    exp = opts.experiment
    if len(opts.selectors) > 1:
        raise UsageError("run takes a single scheme")
    selector = opts.selectors[0] if opts.selectors else exp.default_scheme
    if opts.ladder and len(opts.ladder) > 1:
        raise UsageError("run takes a single --nx")
    n_x = opts.ladder[0] if opts.ladder else exp.ladder[0]
    solved = exp.solve(n_x, selector, opts.config, get_filter(opts.filter_name), opts.eps_fixed)

    out = opts.out
    written = []
    if solved.y is None:
        rows = [f"{fmt(x)},{fmt(u)},{fmt(v)}" for x, u, v in zip(solved.x, solved.u,
                                                                 solved.reference)]
        written.append(_write_lines(out / "solution.csv", ["x,u_final,reference"] + rows))
    else:
        X, Y = np.meshgrid(solved.x, solved.y, indexing="ij")
        rows = [f"{fmt(x)},{fmt(y)},{fmt(u)},{fmt(v)}" for x, y, u, v in
                zip(X.ravel(), Y.ravel(), solved.u.ravel(), solved.reference.ravel())]
        written.append(_write_lines(out / "solution.csv", ["x,y,u_final,reference"] + rows))

    diags = solved.result.diagnostics
    rows = [f"{n},{fmt(d.eps_n)},{d.n_phi_zero},{fmt(d.lipschitz_estimate)}"
            for n, d in enumerate(diags, 1)]
    written.append(_write_lines(out / "diagnostics.csv",
                                ["step,eps_n,n_phi_zero,lipschitz"] + rows))

    n_nodes = solved.u.size
    header = "step," + ",".join(f"node_{j}" for j in range(n_nodes))
    rows = [f"{n}," + ",".join(str(int(v)) for v in d.activity_mask.ravel())
            for n, d in enumerate(diags, 1)]
    written.append(_write_lines(out / "activity.csv", [header] + rows))
    written.append(_write_meta(out / "run_info.txt", opts, [selector]))

    if opts.plot:
        from . import plotting

        title = f"{exp.id} {selector} N_x={n_x}"
        written.append(plotting.plot_solution(solved.x, solved.u, solved.reference,
                                              out / "solution.png", title, solved.y))
        if solved.y is None:
            times = np.cumsum(exp.time_grid(n_x).step_sizes())
            act = np.array([d.activity_mask for d in diags])
            written.append(plotting.plot_activity(solved.x, act, times, out / "activity.png",
                                                  title))
    return written


def _ladder_report(exp: Experiment, selector: str, ladder: Sequence[int], opts: Options,
                   local: bool = False):
    """One ErrorReport per selector; rungs may run in parallel, rows are
    merged in ladder order."""
    filt = get_filter(opts.filter_name)

    def one(n):
        s = exp.solve(n, selector, opts.config, filt, opts.eps_fixed, record_masks=False)
        glob = s.errors
        loc = None
        if local:
            loc = analysis.local_errors_excluding(s.u, s.reference, s.x, s.dx,
                                                  exp.singular_points, exp.exclusion_radius)
        return n, s.n_t, glob, loc, s.result.wall_time

    workers = worker_count(len(ladder))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, ladder))
    else:
        results = [one(n) for n in ladder]
    results.sort(key=lambda r: r[0])

    label = exp.choice(selector, filt, opts.eps_fixed).label
    glob_rep = analysis.ErrorReport(label)
    loc_rep = analysis.ErrorReport(label)
    for n, n_t, glob, loc, wall in results:
        glob_rep.add(n, n_t, glob[0], glob[1], wall)
        if loc is not None:
            loc_rep.add(n, n_t, loc[0], loc[1], wall)
    return glob_rep, (loc_rep if local else None)


def _tables(opts: Options, selectors: Sequence[str], stem: str) -> List[Path]:
    exp = opts.experiment
    ladder = opts.ladder or list(exp.ladder)
    local = bool(exp.singular_points)
    if exp.reference_kind == "fine_grid":
        # build the cached reference once before any worker threads need it
        exp.reference(exp.grid(ladder[0]).x)
    glob, loc = [], []
    for sel in selectors:
        g, l_ = _ladder_report(exp, sel, ladder, opts, local)
        glob.append(g)
        if l_ is not None:
            loc.append(l_)

    out = opts.out
    written = [_write_lines(out / f"{stem}.csv", table_lines(glob))]
    if loc:
        written.append(_write_lines(out / f"{stem}_local.csv", table_lines(loc)))
    written.append(_write_meta(out / "run_info.txt", opts, selectors))
    if opts.plot:
        from . import plotting

        written.append(plotting.plot_convergence(glob, out / f"{stem}.png", exp.id))
        if loc:
            written.append(plotting.plot_convergence(loc, out / f"{stem}_local.png",
                                                     f"{exp.id} (away from kinks)"))
    return written


def cmd_convergence(opts: Options) -> List[Path]:
    if len(opts.selectors) > 1:
        raise UsageError("convergence takes a single scheme; use compare for several")
    return _tables(opts, opts.selectors or [opts.experiment.default_scheme], "convergence")


def cmd_compare(opts: Options) -> List[Path]:
    """Without ``--scheme`` the default scheme is compared with its unfiltered
    high-order part and the monotone scheme alone."""
    selectors = list(opts.selectors)
    if not selectors:
        default = opts.experiment.default_scheme
        _, ho, _ = parse_selector(default)
        selectors = [default, ho, "MONO"]
    return _tables(opts, selectors, "compare")


COMMANDS = {"run": cmd_run, "convergence": cmd_convergence, "compare": cmd_compare}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        opts = resolve(args)
        opts.out.mkdir(parents=True, exist_ok=True)
        written = COMMANDS[args.command](opts)
    except (UsageError, ConfigurationError, ValueError) as exc:
        print(f"hjfilter: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalBlowup as exc:
        print(f"hjfilter: blowup: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
