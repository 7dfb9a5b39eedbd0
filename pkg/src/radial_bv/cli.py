"""Command-line front end.

    radial-bv solve --density phi-mu --mu 3 --rho1 1 --rho2 2 --m1 0 --m2 2 --out run
    radial-bv oracle-compare --config problem.json --cells 2048
    radial-bv reg-study --config problem.json --format json,svg
    radial-bv sweep --n 500 --seed 7
    radial-bv verify

Settings come from an optional JSON file (``--config``) and flags; flags
win. Exit status: 0 success, 1 numeric failure (diagnostics.json is
written), 2 failed checks in ``verify``, 64 malformed configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, solver
from .density import DomainError, FAMILIES, eval_g_prime, from_spec, to_spec
from .oracle import OracleConfig, regularization_study
from .quadrature import DIVERGENCE_RATIO, DIVERGENCE_RUN, SHELLS

EXIT_OK, EXIT_NUMERIC, EXIT_CHECKS, EXIT_CONFIG = 0, 1, 2, 64
COMMANDS = ("solve", "sweep", "verify", "oracle-compare", "reg-study")
FORMATS = ("csv", "json", "svg")
NEEDS_PROBLEM = ("solve", "oracle-compare", "reg-study")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    density: dict | None = None
    rho1: float | None = None
    rho2: float | None = None
    m1: float | None = None
    m2: float | None = None
    cells: int | None = None  # None: 511 solver cells, 2048 oracle cells
    tol: float = OracleConfig.tol
    out: str = "radial_bv_out"
    formats: tuple = ("csv", "json")
    seed: int = analysis.DEFAULT_SEED
    workers: int | None = None
    n: int | None = None
    deltas: list = field(default_factory=lambda: [1e-1, 1e-2, 1e-3, 1e-4])
    kinds: tuple = ("quadratic", "density")

    def problem(self) -> solver.RadialProblem:
        missing = [k for k in ("density", "rho1", "rho2", "m1", "m2") if getattr(self, k) is None]
        if missing:
            raise ConfigError(f"{self.command} needs {', '.join(missing)}")
        try:
            return solver.RadialProblem(self.rho1, self.rho2, self.m1, self.m2, from_spec(self.density))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"incomplete density spec {self.density}: missing {exc}") from exc
        except (DomainError, SyntaxError, NameError) as exc:
            raise ConfigError(str(exc)) from exc

    def oracle(self) -> OracleConfig:
        try:
            return OracleConfig(cells=self.cells or OracleConfig.cells, tol=self.tol)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def solver_nodes(self) -> int:
        return solver.DEFAULT_NODES if self.cells is None else self.cells + 1


# -- argument handling ---------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _csv_list(text):
    return [s.strip() for s in str(text).split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with any of the settings below")
    common.add_argument("--density", choices=FAMILIES)
    common.add_argument("--mu", type=float)
    common.add_argument("--mu-bar", type=float, help="upper exponent (custom density)")
    common.add_argument("--k", type=float)
    common.add_argument("--psi", help="python expression in t for the custom density's g''")
    for name in ("rho1", "rho2", "m1", "m2"):
        common.add_argument(f"--{name}", type=float)
    common.add_argument("--cells", type=int, help="grid cells (solver and oracle)")
    common.add_argument("--tol", type=float, help="oracle gradient tolerance")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", help="comma list from csv,json,svg")
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int, help="process pool size for sweeps")
    common.add_argument("--n", type=int, help="number of random problems (sweep, verify)")
    common.add_argument("--deltas", help="comma list of regularization strengths")
    common.add_argument("--kind", help="quadratic, density or both (reg-study)")

    parser = _Parser(prog="radial-bv", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd in COMMANDS:
        sub.add_parser(cmd, parents=[common])
    return parser


_FILE_KEYS = {"density", "rho1", "rho2", "m1", "m2", "cells", "tol", "out", "format", "seed",
              "workers", "n", "deltas", "kind"}


def _load_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _FILE_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def _number(value, kind, name):
    try:
        out = kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a {kind.__name__}, got {value!r}") from exc
    if kind is float and not math.isfinite(out):
        raise ConfigError(f"{name} must be finite")
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge the JSON file and the flags into a validated RunConfig."""
    data = _load_file(args.config) if args.config else {}
    density = data.get("density")
    if density is not None and not isinstance(density, dict):
        raise ConfigError("density must be an object such as {\"family\": \"phi-mu\", \"mu\": 3}")
    density = dict(density) if density else None
    if args.density:
        if density is None or density.get("family") != args.density:
            density = {}
        density["family"] = args.density
    for flag, key in (("mu", "mu"), ("mu_bar", "mu_bar"), ("k", "k"), ("psi", "psi")):
        val = getattr(args, flag)
        if val is not None:
            if density is None:
                raise ConfigError(f"--{flag.replace('_', '-')} given without a density family")
            density[key] = val

    def pick(name, kind):
        val = getattr(args, name)
        if val is None:
            val = data.get(name)
        return None if val is None else _number(val, kind, name)

    cfg = RunConfig(command=args.command, density=density)
    for name in ("rho1", "rho2", "m1", "m2"):
        setattr(cfg, name, pick(name, float))
    cfg.cells = pick("cells", int)
    if cfg.cells is not None and cfg.cells < 1:
        raise ConfigError("cells must be positive")
    tol = pick("tol", float)
    if tol is not None:
        if tol <= 0:
            raise ConfigError("tol must be positive")
        cfg.tol = tol
    cfg.out = args.out or data.get("out") or cfg.out
    fmt = args.format if args.format is not None else data.get("format")
    if fmt is not None:
        fmts = fmt if isinstance(fmt, list) else _csv_list(fmt)
        bad = [f for f in fmts if f not in FORMATS]
        if bad or not fmts:
            raise ConfigError(f"unknown output format(s) {bad}; choose from {','.join(FORMATS)}")
        cfg.formats = tuple(dict.fromkeys(fmts))
    seed = pick("seed", int)
    cfg.seed = cfg.seed if seed is None else seed
    cfg.workers = pick("workers", int)
    if cfg.workers is not None and cfg.workers < 1:
        raise ConfigError("workers must be positive")
    cfg.n = pick("n", int)
    if cfg.n is not None and cfg.n < 1:
        raise ConfigError("n must be positive")
    deltas = args.deltas if args.deltas is not None else data.get("deltas")
    if deltas is not None:
        items = deltas if isinstance(deltas, list) else _csv_list(deltas)
        cfg.deltas = [_number(d, float, "deltas") for d in items]
        if not cfg.deltas or any(d <= 0 for d in cfg.deltas) or any(
                a <= b for a, b in zip(cfg.deltas, cfg.deltas[1:])):
            raise ConfigError("deltas must be positive and strictly decreasing")
    kind = args.kind or data.get("kind")
    if kind is not None:
        if kind not in ("quadratic", "density", "both"):
            raise ConfigError("kind must be quadratic, density or both")
        cfg.kinds = ("quadratic", "density") if kind == "both" else (kind,)
    if cfg.command in NEEDS_PROBLEM:
        cfg.problem()  # validate before any computation
    cfg.oracle()
    return cfg


# -- serialization ---------------------------------------------------------------

def _jsonable(x):
    """Replace non-finite floats by the strings "inf", "-inf", "nan"; numpy scalars by floats."""
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n")


def write_csv(path: Path, header, columns) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(format(float(v), ".17g") for v in row))
    path.write_text("\n".join(lines) + "\n")


def svg_plot(series, xlabel: str, ylabel: str, logx=False, logy=False, title="") -> str:
    """A small line chart as an SVG string. ``series`` is [(label, xs, ys), ...]."""
    width, height, pad = 640, 420, 60
    tx = np.log10 if logx else (lambda v: np.asarray(v, dtype=float))
    ty = np.log10 if logy else (lambda v: np.asarray(v, dtype=float))
    pts = [(lab, tx(np.asarray(xs, float)), ty(np.asarray(ys, float))) for lab, xs, ys in series]
    allx = np.concatenate([p[1] for p in pts])
    ally = np.concatenate([p[2] for p in pts])
    finite = np.isfinite(allx) & np.isfinite(ally)
    x0, x1 = float(allx[finite].min()), float(allx[finite].max())
    y0, y1 = float(ally[finite].min()), float(ally[finite].max())
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1

    def sx(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
           'fill="none" stroke="black"/>']
    fmt_x = (lambda v: f"1e{v:.1f}") if logx else (lambda v: f"{v:.4g}")
    fmt_y = (lambda v: f"1e{v:.1f}") if logy else (lambda v: f"{v:.4g}")
    for frac in (0.0, 0.5, 1.0):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        out.append(f'<text x="{sx(xv):.2f}" y="{height - pad + 18}" font-size="12" '
                   f'text-anchor="middle">{fmt_x(xv)}</text>')
        out.append(f'<text x="{pad - 6}" y="{sy(yv) + 4:.2f}" font-size="12" '
                   f'text-anchor="end">{fmt_y(yv)}</text>')
    out.append(f'<text x="{width / 2}" y="{height - 15}" font-size="14" text-anchor="middle">'
               f'{xlabel}</text>')
    out.append(f'<text x="18" y="{height / 2}" font-size="14" text-anchor="middle" '
               f'transform="rotate(-90 18 {height / 2})">{ylabel}</text>')
    if title:
        out.append(f'<text x="{width / 2}" y="30" font-size="15" text-anchor="middle">{title}</text>')
    for i, (lab, xs, ys) in enumerate(pts):
        ok = np.isfinite(xs) & np.isfinite(ys)
        path = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs[ok], ys[ok]))
        col = colors[i % len(colors)]
        out.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" points="{path}"/>')
        out.append(f'<text x="{width - pad - 8}" y="{pad + 18 + 16 * i}" font-size="12" '
                   f'text-anchor="end" fill="{col}">{lab}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _problem_dict(p: solver.RadialProblem) -> dict:
    return {"density": to_spec(p.density), "rho1": p.rho1, "rho2": p.rho2, "m1": p.m1, "m2": p.m2}


def _solver_tolerances() -> dict:
    return {"quadrature_rtol": solver.QUAD_RTOL, "bisection_rtol": solver.BISECTION_RTOL,
            "du_cap": solver.DU_CAP, "divergence_shells": SHELLS,
            "divergence_ratio": DIVERGENCE_RATIO, "divergence_run": DIVERGENCE_RUN}


def _oracle_settings(oc: OracleConfig) -> dict:
    return {"cells": oc.cells, "penalty_smoothing": oc.penalty_smoothing, "tol": oc.tol,
            "max_iters": oc.max_iters}


def solution_summary(p: solver.RadialProblem, sol: solver.RadialSolution) -> dict:
    cls = analysis.classify_boundary_behavior(p, sol)
    return {
        "lambda": sol.lam,
        "lambda_deficit": sol.lam_deficit,
        "sign": sol.sign,
        "attained_inner": sol.attained_inner,
        "classification": "attained" if isinstance(cls, analysis.Attained) else "not_attained",
        "gap_paid": 0.0 if isinstance(cls, analysis.Attained) else cls.gap_paid,
        "trace_inner": sol.trace_inner,
        "trace_outer": sol.trace_outer,
        "delta_m_inf": sol.delta_m_inf,
        "delta_m_infinite": sol.delta_m_infinite,
        "energy": sol.energy.as_dict(),
        "g_prime_inf": p.density.g_prime_inf,
        "g_prime_inf_estimated": bool(p.density.g_prime_inf_estimated),
        "grid": {"nodes": int(sol.r.size), "stretch": solver.GRID_STRETCH,
                 "singular_nodes": int(np.count_nonzero(sol.singular))},
    }


# -- commands ----------------------------------------------------------------------

def cmd_solve(cfg: RunConfig, out: Path) -> int:
    p = cfg.problem()
    sol = solver.solve(p, n_nodes=cfg.solver_nodes())
    if "csv" in cfg.formats:
        flux = sol.r * eval_g_prime(p.density, np.abs(sol.du))
        write_csv(out / "solution.csv", ("r", "u", "du", "flux"), (sol.r, sol.u, sol.du, flux))
    if "json" in cfg.formats:
        write_json(out / "summary.json", {"command": "solve", "problem": _problem_dict(p),
                                          **solution_summary(p, sol),
                                          "tolerances": _solver_tolerances()})
    if "svg" in cfg.formats:
        (out / "profile.svg").write_text(svg_plot([("u", sol.r, sol.u)], "r", "u",
                                                  title="radial profile"))
    return EXIT_OK


def cmd_oracle_compare(cfg: RunConfig, out: Path) -> int:
    p = cfg.problem()
    oc = cfg.oracle()
    rep, sol, res = analysis.compare_with_oracle(p, oc)
    if "csv" in cfg.formats:
        write_csv(out / "comparison.csv", ("r", "u_solver", "u_oracle"),
                  (sol.r, sol.u, res.function.values))
    if "json" in cfg.formats:
        write_json(out / "summary.json", {
            "command": "oracle-compare", "problem": _problem_dict(p),
            "solver": solution_summary(p, sol), "oracle": {
                "energy": res.energy, "iterations": res.iterations, "grad_norm": res.grad_norm,
                "trace_inner": float(res.function.values[0])},
            "agreement": rep.as_dict(), "tolerances": {**_solver_tolerances(),
                                                       "oracle": _oracle_settings(oc)}})
    if "svg" in cfg.formats:
        (out / "profile.svg").write_text(svg_plot(
            [("flux law", sol.r, sol.u), ("discrete oracle", res.function.nodes, res.function.values)],
            "r", "u", title="solver and oracle"))
    return EXIT_OK


def cmd_reg_study(cfg: RunConfig, out: Path) -> int:
    p = cfg.problem()
    oc = cfg.oracle()
    results = {kind: regularization_study(p, cfg.deltas, oc, kind=kind) for kind in cfg.kinds}
    if "csv" in cfg.formats:
        rows = [(k, pt) for k, pts in results.items() for pt in pts]
        lines = ["kind,delta,l1_distance,energy"]
        for k, pt in rows:
            l1 = "nan" if pt.l1_distance_to_limit is None else format(pt.l1_distance_to_limit, ".17g")
            en = "nan" if pt.energy is None else format(pt.energy, ".17g")
            lines.append(f"{k},{pt.delta:.17g},{l1},{en}")
        (out / "reg_study.csv").write_text("\n".join(lines) + "\n")
    if "json" in cfg.formats:
        write_json(out / "summary.json", {
            "command": "reg-study", "problem": _problem_dict(p), "deltas": cfg.deltas,
            "studies": {k: [{"delta": pt.delta, "l1_distance": pt.l1_distance_to_limit,
                             "energy": pt.energy, "error": pt.error} for pt in pts]
                        for k, pts in results.items()},
            "tolerances": {**_solver_tolerances(), "oracle": _oracle_settings(oc)}})
    if "svg" in cfg.formats:
        series = []
        for k, pts in results.items():
            good = [pt for pt in pts if pt.l1_distance_to_limit]
            if good:
                series.append((k, [pt.delta for pt in good], [pt.l1_distance_to_limit for pt in good]))
        if series:
            (out / "convergence.svg").write_text(svg_plot(series, "delta", "L1 distance", True, True,
                                                          title="regularized to relaxed"))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    n = cfg.n or 100
    recs = analysis.run_sweep(analysis.random_problems(n, cfg.seed), cfg.workers)
    fields = ("rho1", "rho2", "m1", "m2", "mu", "lam", "attained", "delta_m_inf", "energy_total")
    if "csv" in cfg.formats:
        lines = [",".join(fields + ("passed",))]
        for r in recs:
            vals = [format(float(getattr(r, f)), ".17g") for f in fields]
            lines.append(",".join(vals + [str(int(r.passed))]))
        (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    if "json" in cfg.formats:
        write_json(out / "summary.json", {
            "command": "sweep", "seed": cfg.seed, "problems": n,
            "attained": sum(r.attained for r in recs),
            "failures": sum(not r.passed for r in recs),
            "max_principle_violations": sum(not r.max_principle for r in recs),
            "lower_bound_violations": sum(not r.lower_bound for r in recs),
            "classification_mismatches": sum(not r.classification_consistent for r in recs),
            "grid": {"nodes": solver.DEFAULT_NODES}, "tolerances": _solver_tolerances()})
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: Path) -> int:
    oc = cfg.oracle()
    n_agree = cfg.n or 20
    report = analysis.verify_suite(cfg.seed, oc, agreement_problems=n_agree,
                                   sweep_problems=10 * n_agree, workers=cfg.workers)
    report = {"command": "verify", **report, "tolerances": {
        **_solver_tolerances(), "oracle": _oracle_settings(oc),
        "agreement_linf_attained": analysis.LINF_ATTAINED,
        "agreement_linf_not_attained": analysis.LINF_NOT_ATTAINED,
        "agreement_energy_gap": analysis.ENERGY_GAP, "check_tol": analysis.CHECK_TOL,
        "saturation_tol": analysis.SATURATION_TOL},
        "grid": {"solver_nodes": solver.DEFAULT_NODES, "oracle_cells": oc.cells,
                 "agreement_problems": n_agree, "sweep_problems": 10 * n_agree}}
    write_json(out / "summary.json", report)
    for name, chk in report["checks"].items():
        print(f"{'PASS' if chk['passed'] else 'FAIL'} {name}")
    return EXIT_OK if report["passed"] else EXIT_CHECKS


HANDLERS = {"solve": cmd_solve, "sweep": cmd_sweep, "verify": cmd_verify,
            "oracle-compare": cmd_oracle_compare, "reg-study": cmd_reg_study}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"radial-bv: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return HANDLERS[cfg.command](cfg, out)
    except Exception as exc:  # numeric failure: leave a machine-readable trace
        diag = {"command": cfg.command, "error": type(exc).__name__, "message": str(exc),
                "diagnostics": getattr(exc, "diagnostics", None) or {}}
        result = getattr(exc, "result", None)
        if result is not None:
            diag["diagnostics"].update({"grad_norm": result.grad_norm, "energy": result.energy,
                                        "iterations": result.iterations})
        write_json(out / "diagnostics.json", diag)
        print(json.dumps(_jsonable(diag)), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
