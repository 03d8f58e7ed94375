"""Sweep and reporting command line for the diffusion estimators.

Subcommands
-----------
sweep        evaluate estimators on an h-grid; CSV + JSON manifest
compare      error statistics of each estimator against the exact series
plot-script  emit a gnuplot script overlaying sweep curves on the exact one
mc-check     Monte Carlo consistency suite against the exact reference

Exit codes: 0 success, 1 usage error, 2 numerical failure recorded,
3 I/O failure.  All numbers are printed with shortest round-trip decimals
('.' separator), so parsing a CSV back reproduces the values exactly.
"""

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, linalg
from .correlated_walk import d_crw, d_exact
from .map_core import DiffusionEstimate, MapParams
from .markov_decay import d_markov
from .mc_sim import SimConfig, d_mc
from .persistent_walk import d_prw0, d_prw1, d_prw2

VALID_METHODS = ("crw", "prw", "markov", "exact", "mc")

SWEEP_HEADER = ("h", "method", "order", "value", "error_bound", "exact", "wall_time_ms")
COMPARE_HEADER = (
    "method",
    "order",
    "n_points",
    "max_abs_error",
    "mean_abs_error",
    "bound_violations",
)


@dataclass
class SweepConfig:
    """Grid, estimator selection, tolerances, and output paths."""

    h_min: float = 0.0
    h_max: float = 1.0
    n_points: int = 401
    methods: tuple = (("exact", 0),)
    L_list: tuple = (8, 16, 32, 64)
    exact_tol: float = 1e-14
    prw_tol: float = 1e-14
    solver_tol: float = 1e-12
    mc_particles: int = 100_000
    mc_steps: int = 1_000
    seed: int = 0
    output: str | None = None
    manifest: str | None = None
    figure: str | None = None

    def __post_init__(self):
        if not (0 <= self.h_min < self.h_max <= 1):
            raise ValueError(
                f"need 0 <= h_min < h_max <= 1, got [{self.h_min}, {self.h_max}]"
            )
        if self.n_points < 2:
            raise ValueError("need at least 2 grid points")
        for method, order in self.methods:
            if method not in VALID_METHODS:
                raise ValueError(f"unknown method {method!r}")
            if order < 0 or (method == "prw" and order > 2):
                raise ValueError(f"unsupported order {order} for {method}")

    def grid(self):
        step = (self.h_max - self.h_min) / (self.n_points - 1)
        return [
            self.h_max if i == self.n_points - 1 else self.h_min + i * step
            for i in range(self.n_points)
        ]


@dataclass
class OutputRow:
    """One (h, method, order) evaluation; value is NaN on solver failure."""

    h: float
    method: str
    order: int
    value: float
    error_bound: float | None
    exact: bool
    wall_time_ms: float


@dataclass
class CompareRow:
    """Error statistics of one estimator series against the exact reference."""

    method: str
    order: int
    n_points: int
    max_abs_error: float
    mean_abs_error: float
    bound_violations: int


@dataclass
class CompareReport:
    rows: list = field(default_factory=list)
    summary: str = ""


def _evaluate(method: str, order: int, p: MapParams, cfg: SweepConfig, index: int):
    if method == "crw":
        return d_crw(p, order)
    if method == "prw":
        return (d_prw0, d_prw1)[order](p) if order < 2 else d_prw2(p, tol=cfg.prw_tol)
    if method == "markov":
        return d_markov(p, order, L_list=cfg.L_list, solver_tol=cfg.solver_tol)
    if method == "exact":
        return d_exact(p, tol=cfg.exact_tol)
    if method == "mc":
        sim = SimConfig(
            n_particles=cfg.mc_particles,
            n_steps=cfg.mc_steps,
            seed=cfg.seed + index,
        )
        return d_mc(p, sim)
    raise ValueError(f"unknown method {method!r}")


def compute_rows(cfg: SweepConfig):
    """Evaluate every requested estimator on the grid, in grid order.

    Per-point solver failures become NaN rows instead of aborting; the
    second return value counts them.
    """
    rows = []
    failures = 0
    for index, h in enumerate(cfg.grid()):
        p = MapParams(h)
        for method, order in cfg.methods:
            t0 = time.perf_counter()
            try:
                est = _evaluate(method, order, p, cfg, index)
            except (ValueError, ArithmeticError, RuntimeError):
                failures += 1
                est = DiffusionEstimate(
                    method=method, order=order, h=h, value=math.nan
                )
            elapsed = (time.perf_counter() - t0) * 1000.0
            rows.append(
                OutputRow(
                    h=h,
                    method=method,
                    order=order if method not in ("exact", "mc") else order,
                    value=est.value,
                    error_bound=est.error_bound,
                    exact=est.exact,
                    wall_time_ms=elapsed,
                )
            )
    return rows, failures


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_rows(rows, path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            writer.writerow(
                [
                    _fmt(row.h),
                    row.method,
                    str(row.order),
                    _fmt(row.value),
                    _fmt(row.error_bound),
                    _fmt(row.exact),
                    _fmt(row.wall_time_ms),
                ]
            )


def read_rows(path):
    """Parse a sweep CSV back into OutputRow records."""
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = tuple(next(reader))
        if header != SWEEP_HEADER:
            raise ValueError(f"unexpected CSV header in {path}: {header}")
        for rec in reader:
            rows.append(
                OutputRow(
                    h=float(rec[0]),
                    method=rec[1],
                    order=int(rec[2]),
                    value=float(rec[3]),
                    error_bound=float(rec[4]) if rec[4] else None,
                    exact=rec[5] == "true",
                    wall_time_ms=float(rec[6]),
                )
            )
    return rows


def _write_manifest(cfg: SweepConfig, path, command, total_s, n_rows, failures):
    payload = {
        "command": command,
        "config": asdict(cfg),
        "versions": {
            "shiftdiff": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
        "total_time_s": total_s,
        "rows": n_rows,
        "failures": failures,
    }
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def run_sweep(cfg: SweepConfig):
    """Evaluate the sweep, write CSV/manifest/figure, return the rows."""
    t0 = time.perf_counter()
    rows, failures = compute_rows(cfg)
    total = time.perf_counter() - t0
    if cfg.output:
        write_rows(rows, cfg.output)
        manifest = cfg.manifest or f"{cfg.output}.manifest.json"
        _write_manifest(cfg, manifest, "sweep", total, len(rows), failures)
    if cfg.figure:
        from . import plotting

        plotting.save_sweep_figure(rows, cfg.figure)
    return rows, failures


def run_compare(cfg: SweepConfig) -> CompareReport:
    """Per-estimator error statistics against the exact reference.

    The reference is the converged series at tolerance 1e-14.  For the
    correlated walk the certified bound h * 2**-(n-1) is also verified and
    violations are counted per series.
    """
    grid = cfg.grid()
    reference = {h: d_exact(MapParams(h), tol=1e-14).value for h in grid}
    methods = [(m, o) for m, o in cfg.methods if m != "exact"]
    work = SweepConfig(
        h_min=cfg.h_min,
        h_max=cfg.h_max,
        n_points=cfg.n_points,
        methods=tuple(methods),
        L_list=cfg.L_list,
        exact_tol=cfg.exact_tol,
        prw_tol=cfg.prw_tol,
        solver_tol=cfg.solver_tol,
        mc_particles=cfg.mc_particles,
        mc_steps=cfg.mc_steps,
        seed=cfg.seed,
    )
    rows, failures = compute_rows(work)
    report = CompareReport()
    lines = [f"comparison against exact reference on {len(grid)} points"]
    for method, order in methods:
        series = [r for r in rows if (r.method, r.order) == (method, order)]
        errors = [abs(r.value - reference[r.h]) for r in series]
        violations = 0
        if method == "crw" and order >= 1:
            for r in series:
                bound = r.h * 2.0 ** (-(order - 1))
                if abs(r.value - reference[r.h]) > bound + 1e-15:
                    violations += 1
        row = CompareRow(
            method=method,
            order=order,
            n_points=len(series),
            max_abs_error=max(errors) if errors else math.nan,
            mean_abs_error=sum(errors) / len(errors) if errors else math.nan,
            bound_violations=violations,
        )
        report.rows.append(row)
        lines.append(
            f"  {method} order {order}: max |err| = {row.max_abs_error:.3e}, "
            f"mean |err| = {row.mean_abs_error:.3e}"
            + (f", bound violations = {violations}" if method == "crw" else "")
        )
    report.summary = "\n".join(lines)
    if cfg.output:
        with open(cfg.output, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(COMPARE_HEADER)
            for row in report.rows:
                writer.writerow(
                    [
                        row.method,
                        str(row.order),
                        str(row.n_points),
                        _fmt(row.max_abs_error),
                        _fmt(row.mean_abs_error),
                        str(row.bound_violations),
                    ]
                )
        with open(f"{cfg.output}.txt", "w") as handle:
            handle.write(report.summary + "\n")
        manifest = cfg.manifest or f"{cfg.output}.manifest.json"
        _write_manifest(cfg, manifest, "compare", 0.0, len(report.rows), failures)
    if cfg.figure:
        from . import plotting

        ref_pairs = (list(reference.keys()), list(reference.values()))
        plotting.save_compare_figure(rows, ref_pairs, cfg.figure)
    return report


PLOT_STYLES = {
    "crw": [("crw", 0), ("crw", 1), ("crw", 2), ("crw", 3)],
    "prw": [("prw", 1), ("prw", 2)],
    "markov": [("markov", 1), ("markov", 2), ("markov", 3), ("markov", 3)],
}


def emit_plot_script(table_path: str, style: str, output: str | None = None) -> str:
    """Gnuplot script overlaying approximation curves on the exact one.

    Styles: 'crw' lays out orders 0-3 in four panels, 'prw' orders 1-2 in
    two panels, 'markov' orders 1-3 plus a zoom panel of order 3.  The
    script filters the sweep CSV by method/order columns.
    """
    if style not in PLOT_STYLES:
        raise ValueError(f"unknown style {style!r}; choose from {sorted(PLOT_STYLES)}")
    panels = PLOT_STYLES[style]
    ncols = 2
    nrows = (len(panels) + 1) // 2
    lines = [
        "# gnuplot script generated by shiftdiff plot-script",
        "set datafile separator ','",
        "set terminal pngcairo size 1200,{}".format(450 * nrows),
        f"set output '{style}_panels.png'",
        f"set multiplot layout {nrows},{ncols}",
        "set xlabel 'h'",
        "set ylabel 'D(h)'",
    ]
    for i, (method, order) in enumerate(panels):
        zoom = style == "markov" and i == len(panels) - 1
        if zoom:
            lines.append("set xrange [0.25:0.45]  # zoom panel")
        else:
            lines.append("set xrange [*:*]")
        lines.append(
            f"plot '{table_path}' "
            "using (strcol(2) eq 'exact' ? $1 : NaN):4 with lines "
            "lc rgb 'black' title 'exact', \\"
        )
        lines.append(
            f"     '' using (strcol(2) eq '{method}' && $3 == {order} "
            f"? $1 : NaN):4 with lines lc rgb 'red' lw 2 "
            f"title '{method} order {order}'"
        )
    lines.append("unset multiplot")
    script = "\n".join(lines) + "\n"
    if output:
        with open(output, "w") as handle:
            handle.write(script)
    return script


def run_mc_check(h_values, particles, steps, seed) -> tuple[str, bool]:
    """Monte Carlo consistency at the given h values; PASS needs 3 sigma."""
    lines = ["h       D_hat       D_exact     std_err    pull   verdict"]
    all_ok = True
    for i, h in enumerate(h_values):
        p = MapParams(h)
        est = d_mc(p, SimConfig(n_particles=particles, n_steps=steps, seed=seed + i))
        ref = d_exact(p, tol=1e-14).value
        sigma = est.error_bound / 3.0 if est.error_bound else 0.0
        pull = abs(est.value - ref) / sigma if sigma > 0 else math.inf
        ok = pull <= 3.0
        all_ok = all_ok and ok
        lines.append(
            f"{h:<7g} {est.value:<11.6f} {ref:<11.6f} {sigma:<10.2e} "
            f"{pull:<6.2f} {'PASS' if ok else 'FAIL'}"
        )
    return "\n".join(lines), all_ok


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_methods(text: str):
    methods = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            name, order = item.split(":", 1)
            methods.append((name.strip(), int(order)))
        else:
            methods.append((item, 0))
    if not methods:
        raise argparse.ArgumentTypeError("no methods given")
    return tuple(methods)


def _parse_int_list(text: str):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _parse_float_list(text: str):
    return tuple(float(v) for v in text.split(",") if v.strip())


_CONFIG_PARSERS = {
    "h_min": float,
    "h_max": float,
    "n_points": int,
    "methods": _parse_methods,
    "L_list": _parse_int_list,
    "exact_tol": float,
    "prw_tol": float,
    "solver_tol": float,
    "mc_particles": int,
    "mc_steps": int,
    "seed": int,
    "output": str,
    "manifest": str,
    "figure": str,
    "h_values": _parse_float_list,
    "particles": int,
    "steps": int,
    "style": str,
    "table": str,
}


def _load_config_file(path) -> dict:
    """key=value lines; '#' starts a comment; keys match flag names."""
    overrides = {}
    with open(path) as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONFIG_PARSERS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            overrides[key] = _CONFIG_PARSERS[key](value)
    return overrides


def _add_common(sub):
    sub.add_argument("--config", help="key=value config file; flags override it")
    sub.add_argument("--h-min", dest="h_min", type=float, default=0.0)
    sub.add_argument("--h-max", dest="h_max", type=float, default=1.0)
    sub.add_argument("--n-points", dest="n_points", type=int, default=401)
    sub.add_argument(
        "--methods",
        type=_parse_methods,
        default=(("exact", 0),),
        help="comma list like crw:0,crw:1,prw:1,markov:1,exact,mc",
    )
    sub.add_argument(
        "--L-list",
        dest="L_list",
        type=_parse_int_list,
        default=(8, 16, 32, 64),
        help="system sizes for the markov extrapolation",
    )
    sub.add_argument("--exact-tol", dest="exact_tol", type=float, default=1e-14)
    sub.add_argument("--prw-tol", dest="prw_tol", type=float, default=1e-14)
    sub.add_argument("--solver-tol", dest="solver_tol", type=float, default=1e-12)
    sub.add_argument("--mc-particles", dest="mc_particles", type=int, default=100_000)
    sub.add_argument("--mc-steps", dest="mc_steps", type=int, default=1_000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--output", "-o", help="CSV output path")
    sub.add_argument("--manifest", help="JSON manifest path (default: <output>.manifest.json)")
    sub.add_argument("--figure", help="render a PNG figure to this path")


def _config_from_args(args) -> SweepConfig:
    values = {
        name: getattr(args, name)
        for name in (
            "h_min",
            "h_max",
            "n_points",
            "methods",
            "L_list",
            "exact_tol",
            "prw_tol",
            "solver_tol",
            "mc_particles",
            "mc_steps",
            "seed",
            "output",
            "manifest",
            "figure",
        )
    }
    return SweepConfig(**values)


def _apply_config_file(parser, argv):
    """Pre-scan for --config and fold its values in as parser defaults."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if known.config:
        parser.set_defaults(**_load_config_file(known.config))


def build_parser() -> _Parser:
    parser = _Parser(prog="shiftdiff", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    sweep = commands.add_parser("sweep", help="evaluate estimators on an h-grid")
    _add_common(sweep)

    compare = commands.add_parser("compare", help="error report against the exact series")
    _add_common(compare)

    plot = commands.add_parser("plot-script", help="emit a gnuplot script for a sweep CSV")
    plot.add_argument("--config", help="key=value config file; flags override it")
    plot.add_argument("--table", required=True, help="sweep CSV path")
    plot.add_argument("--style", choices=sorted(PLOT_STYLES), required=True)
    plot.add_argument("--output", "-o", help="write the script here (default stdout)")

    mc = commands.add_parser("mc-check", help="Monte Carlo consistency suite")
    mc.add_argument("--config", help="key=value config file; flags override it")
    mc.add_argument(
        "--h-values",
        dest="h_values",
        type=_parse_float_list,
        default=(0.2, 0.5, 0.8, 1.0),
    )
    mc.add_argument("--particles", type=int, default=100_000)
    mc.add_argument("--steps", type=int, default=1_000)
    mc.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        _apply_config_file(parser, sys.argv[1:] if argv is None else argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, ValueError) as exc:
        print(f"shiftdiff: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "sweep":
            cfg = _config_from_args(args)
            _, failures = run_sweep(cfg)
            if failures:
                print(f"shiftdiff: {failures} grid points failed", file=sys.stderr)
                return 2
            return 0
        if args.command == "compare":
            cfg = _config_from_args(args)
            report = run_compare(cfg)
            print(report.summary)
            return 0
        if args.command == "plot-script":
            script = emit_plot_script(args.table, args.style, args.output)
            if not args.output:
                print(script, end="")
            return 0
        if args.command == "mc-check":
            table, ok = run_mc_check(
                args.h_values, args.particles, args.steps, args.seed
            )
            print(table)
            return 0 if ok else 2
    except ValueError as exc:
        print(f"shiftdiff: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"shiftdiff: I/O failure: {exc}", file=sys.stderr)
        return 3
    except (linalg.ConvergenceError, ArithmeticError) as exc:
        print(f"shiftdiff: numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
