"""Command-line interface.

Commands:

* ``check <cfg>``: evaluate the certificate requested by the config's
  mode and print the certificate table.
* ``solve <cfg> -o <csv>``: run the Picard iteration and write the
  solution as CSV plus a sidecar text report.
* ``green <cfg> -o <csv> --resolution N``: tabulate the kernel on a
  uniform N x N grid.
* ``verify-paper [--json]``: recompute the six reference constants of
  the two bundled example problems and compare them with their
  published approximations.

Exit codes: 0 success, 1 configuration error, 2 certificate failure,
3 non-convergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .calculus import GridFunction
from .config import Config, Problem, build_problem, load_config
from .errors import FracBvpError
from .green import beta_bound, check_kernel_properties, green_values
from .solver import (
    DEFAULT_SAMPLE_SEED,
    SEED_ENV_VAR,
    Certificate,
    SolveReport,
    build_certificate,
    operator_matrix,
    picard_solve,
)

__all__ = ["main", "entrypoint", "REFERENCE_CONSTANTS", "REFERENCE_TOLERANCE",
           "bundled_config_path", "reference_table"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CERTIFICATE = 2
EXIT_NO_CONVERGENCE = 3

# published approximations of the derived constants for the two bundled
# example problems, compared by verify-paper at absolute tolerance 1e-4
REFERENCE_TOLERANCE = 1e-4
REFERENCE_CONSTANTS = (
    ("example41", "beta_bound", 2.95903),
    ("example41", "mu", 0.22703),
    ("example42", "beta_bound", 5.60946),
    ("example42", "mu", 0.0346236),
    ("example42", "g_sup", 0.895984),
    ("example42", "uniqueness_threshold", 1.95333),
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are configuration errors
        raise FracBvpError(message)


def _fmt(x: float) -> str:
    """Shortest round-trip decimal representation."""
    return repr(float(x))


def _resolve_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return DEFAULT_SAMPLE_SEED
    try:
        return int(raw)
    except ValueError:
        raise FracBvpError(f"environment variable {SEED_ENV_VAR} must be an integer") from None


def bundled_config_path(name: str) -> Path:
    """Filesystem path of a bundled configuration file."""
    return Path(resources.files("fracbvp").joinpath("configs", f"{name}.cfg"))


def _apply_overrides(config: Config, args) -> Config:
    updates = {}
    if getattr(args, "grid", None) is not None:
        updates["grid_size"] = args.grid
    if getattr(args, "tol", None) is not None:
        updates["tol"] = args.tol
    if getattr(args, "max_iter", None) is not None:
        updates["max_iter"] = args.max_iter
    if not updates:
        return config
    merged = dataclasses.replace(config, **updates)
    if merged.grid_size < 64 or merged.grid_size % 2:
        raise FracBvpError(f"--grid must be even and at least 64, got {merged.grid_size}")
    if not merged.tol > 0.0:
        raise FracBvpError(f"--tol must be positive, got {merged.tol}")
    if merged.max_iter < 1:
        raise FracBvpError(f"--max-iter must be at least 1, got {merged.max_iter}")
    return merged


def _provenance_lines(problem: Problem, command: str, seed: int) -> list[str]:
    cfg = problem.config
    lines = [f"fracbvp {__version__}", f"command: {command}"]
    for key, value in cfg.echo():
        lines.append(f"config: {key} = {value}")
    lines.append(
        "effective: "
        f"grid_size = {cfg.grid_size} | tol = {_fmt(cfg.tol)} | "
        f"max_iter = {cfg.max_iter} | mode = {cfg.mode}")
    lines.append(
        f"grid: panels = {cfg.grid_size} | scheme = graded-gauss2 | "
        f"nodes = {2 * cfg.grid_size}")
    lines.append(f"seed: {seed}")
    return lines


def _certificate_lines(cert: Certificate) -> list[str]:
    lines = [
        f"mode                  {cert.mode}",
        f"mu                    {_fmt(cert.mu)}",
        f"beta_bound            {_fmt(cert.beta_bound)}",
        f"uniqueness_threshold  {_fmt(cert.uniqueness_threshold)}",
    ]
    if cert.g_sup is not None:
        lines.append(f"g_sup                 {_fmt(cert.g_sup)}")
    if cert.lam is not None:
        lines.append(f"lambda                {_fmt(cert.lam)}")
    for hyp in cert.hypotheses:
        status = "recorded" if hyp.ok is None else ("pass" if hyp.ok else "FAIL")
        lines.append(f"  [{status:8s}] {hyp.name}: {hyp.note}")
    lines.append(f"verdict               {cert.verdict}")
    return lines


def _certificate_json(cert: Certificate) -> dict:
    return {
        "mode": cert.mode,
        "mu": cert.mu,
        "beta_bound": cert.beta_bound,
        "uniqueness_threshold": cert.uniqueness_threshold,
        "g_sup": cert.g_sup,
        "lambda": cert.lam,
        "hypotheses": [
            {"name": h.name, "ok": h.ok, "note": h.note, "required": h.required}
            for h in cert.hypotheses
        ],
        "verdict": cert.verdict,
    }


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _cmd_check(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    problem = build_problem(config)
    if config.mode == "solve-only":
        raise FracBvpError("key 'mode': must be uniqueness or positive-existence for check")
    seed = _resolve_seed()
    grid = problem.grid()
    cert = build_certificate(problem.spec, problem.kernel, config.mode,
                             grid=grid, seed=seed)
    kernel_report = check_kernel_properties(problem.kernel)
    if args.json:
        payload = {
            "certificate": _certificate_json(cert),
            "kernel": dataclasses.asdict(kernel_report),
            "provenance": _provenance_lines(problem, "check", seed),
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for line in _provenance_lines(problem, "check", seed):
            print(f"# {line}")
        for line in _certificate_lines(cert):
            print(line)
        print(f"kernel checks         "
              f"hypothesis={'ok' if kernel_report.hypothesis_ok else 'VIOLATED'} "
              f"positivity={'ok' if kernel_report.positivity_ok else 'FAIL'} "
              f"seams={'ok' if kernel_report.seam_ok else 'FAIL'} "
              f"bound={'ok' if kernel_report.bound_ok else 'FAIL'}")
    return EXIT_OK if cert.passed else EXIT_CERTIFICATE


def _solve_csv(problem: Problem, report: SolveReport, seed: int) -> str:
    lines = [f"# {line}" for line in _provenance_lines(problem, "solve", seed)]
    lines.append(f"# converged: {report.converged} | iterations: {report.iterations}")
    lines.append("t,u")
    nodes = report.solution.grid.nodes
    values = report.solution.values
    for t, u in zip(nodes, values):
        lines.append(f"{_fmt(t)},{_fmt(u)}")
    return "\n".join(lines) + "\n"


def _solve_report_text(problem: Problem, report: SolveReport,
                       cert: Certificate | None, seed: int) -> str:
    lines = [f"# {line}" for line in _provenance_lines(problem, "solve", seed)]
    if cert is not None:
        lines.extend(_certificate_lines(cert))
    lines.append(f"label                 {report.label}")
    lines.append(f"converged             {report.converged}")
    lines.append(f"iterations            {report.iterations}")
    lines.append(f"final_step_distance   {_fmt(report.final_step_distance)} (squared scale, tol {_fmt(report.tol)})")
    lines.append(f"fixed_point_residual  {_fmt(report.fixed_point_residual)}")
    b0, b1, b2 = report.boundary_residuals
    lines.append(f"boundary_residuals    |u(0)| = {_fmt(b0)} | |u'(0)| = {_fmt(b1)} | "
                 f"|u'(1) - beta*u(eta)| = {_fmt(b2)}")
    lines.append(f"solution_min          {_fmt(report.solution_min)} "
                 f"(strictly positive: {report.solution_min > 0.0})")
    ratios = " ".join(_fmt(r) for r in report.observed_ratios)
    lines.append(f"observed_ratios       {ratios}")
    return "\n".join(lines) + "\n"


def _cmd_solve(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    problem = build_problem(config)
    seed = _resolve_seed()
    grid = problem.grid()
    matrix = operator_matrix(problem.kernel, grid)
    cert = None
    if config.mode != "solve-only":
        cert = build_certificate(problem.spec, problem.kernel, config.mode,
                                 grid=grid, seed=seed, matrix=matrix)
    u0 = GridFunction.constant(grid, 0.0)
    report = picard_solve(problem.spec, problem.kernel, u0,
                          tol=config.tol, max_iter=config.max_iter,
                          certificate=cert, matrix=matrix)
    out = Path(args.output)
    _atomic_write(out, _solve_csv(problem, report, seed))
    sidecar = out.with_name(out.stem + ".report.txt")
    _atomic_write(sidecar, _solve_report_text(problem, report, cert, seed))
    if args.json:
        payload = {
            "converged": report.converged,
            "iterations": report.iterations,
            "label": report.label,
            "final_step_distance": report.final_step_distance,
            "fixed_point_residual": report.fixed_point_residual,
            "boundary_residuals": list(report.boundary_residuals),
            "solution_min": report.solution_min,
            "csv": str(out),
            "report": str(sidecar),
        }
        if cert is not None:
            payload["certificate"] = _certificate_json(cert)
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(f"wrote {out} and {sidecar} "
              f"(converged={report.converged}, iterations={report.iterations}, label={report.label})")
    return EXIT_OK if report.converged else EXIT_NO_CONVERGENCE


def _cmd_green(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    problem = build_problem(config)
    if args.resolution < 2:
        raise FracBvpError(f"--resolution must be at least 2, got {args.resolution}")
    seed = _resolve_seed()
    kernel = problem.kernel
    pts = np.linspace(0.0, 1.0, args.resolution)
    gmat = green_values(kernel, pts[:, None], pts[None, :])
    lines = [f"# {line}" for line in _provenance_lines(problem, "green", seed)]
    lines.append(f"# mu: {_fmt(kernel.mu)}")
    lines.append(f"# beta_bound: {_fmt(beta_bound(config.alpha, config.eta, problem.params.phi))}")
    lines.append("t,s,G")
    for i, t in enumerate(pts):
        for j, s in enumerate(pts):
            lines.append(f"{_fmt(t)},{_fmt(s)},{_fmt(gmat[i, j])}")
    _atomic_write(Path(args.output), "\n".join(lines) + "\n")
    if args.json:
        payload = {
            "csv": str(args.output),
            "resolution": args.resolution,
            "mu": kernel.mu,
            "beta_bound": beta_bound(config.alpha, config.eta, problem.params.phi),
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(f"wrote {args.output} ({args.resolution}x{args.resolution} points)")
    return EXIT_OK


def reference_table() -> list[dict]:
    """Computed-versus-published rows for the bundled examples."""
    problems = {}
    for name in ("example41", "example42"):
        problems[name] = build_problem(load_config(bundled_config_path(name)))
    values = {}
    for name, problem in problems.items():
        kernel = problem.kernel
        values[(name, "mu")] = kernel.mu
        values[(name, "beta_bound")] = beta_bound(
            problem.params.alpha, problem.params.eta, problem.params.phi)
    p42 = problems["example42"]
    cert = build_certificate(p42.spec, p42.kernel, "uniqueness", grid=p42.grid())
    values[("example42", "g_sup")] = cert.g_sup
    values[("example42", "uniqueness_threshold")] = cert.uniqueness_threshold
    rows = []
    for name, constant, reference in REFERENCE_CONSTANTS:
        computed = float(values[(name, constant)])
        rows.append({
            "problem": name,
            "constant": constant,
            "computed": computed,
            "reference": reference,
            "abs_diff": abs(computed - reference),
        })
    return rows


def _cmd_verify_paper(args) -> int:
    rows = reference_table()
    ok = all(row["abs_diff"] <= REFERENCE_TOLERANCE for row in rows)
    if args.json:
        payload = {
            "tolerance": REFERENCE_TOLERANCE,
            "all_within_tolerance": ok,
            "rows": rows,
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        header = f"{'problem':<10} {'constant':<22} {'computed':<22} {'reference':<12} {'abs diff':<12}"
        print(header)
        for row in rows:
            print(f"{row['problem']:<10} {row['constant']:<22} "
                  f"{row['computed']:<22.12g} {row['reference']:<12g} "
                  f"{row['abs_diff']:<12.3g}")
        print(f"all within {REFERENCE_TOLERANCE:g}: {ok}")
    return EXIT_OK if ok else EXIT_CERTIFICATE


def _build_parser() -> _Parser:
    parser = _Parser(prog="fracbvp",
                     description="Kernel construction, certificates and certified "
                                 "Picard solves for a three-point fractional "
                                 "boundary value problem.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add_common(p, needs_output=False):
        p.add_argument("config", help="path to a key = value configuration file")
        if needs_output:
            p.add_argument("-o", "--output", required=True, help="output CSV path")
        p.add_argument("--grid", type=int, default=None, help="override grid_size")
        p.add_argument("--tol", type=float, default=None, help="override tol")
        p.add_argument("--max-iter", type=int, default=None, help="override max_iter")
        p.add_argument("--json", action="store_true", help="structured report on stdout")

    add_common(sub.add_parser("check", help="evaluate the certificate for a config"))
    add_common(sub.add_parser("solve", help="run the Picard iteration"), needs_output=True)
    green_p = sub.add_parser("green", help="tabulate the kernel on a uniform grid")
    add_common(green_p, needs_output=True)
    green_p.add_argument("--resolution", type=int, default=100,
                         help="points per axis (default 100)")
    verify = sub.add_parser("verify-paper",
                            help="recompute the reference constants of the bundled "
                                 "examples and compare with their published values")
    verify.add_argument("--json", action="store_true", help="structured report on stdout")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.cmd == "check":
            return _cmd_check(args)
        if args.cmd == "solve":
            return _cmd_solve(args)
        if args.cmd == "green":
            return _cmd_green(args)
        return _cmd_verify_paper(args)
    except FracBvpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entrypoint() -> None:
    sys.exit(main())
