"""Command-line surface tying the modules together.

Subcommands: series, puiseux, painleve, integrate, invariants, flat,
metric, verify. All outputs are deterministic (fixed ordering, floats at
17 significant digits, schema version embedded). TYPEN_FORGE_THREADS caps
grid parallelism. Usage errors exit with code 2, runtime failures with 1.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .serialize import complex_pair, float_str, frac_from_str, to_json


@dataclass
class RunConfig:
    """Validated subcommand arguments; defaults are the argparse defaults
    shown by --help."""

    subcommand: str
    options: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.options[name]
        except KeyError:
            raise AttributeError(name)


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="typen-forge",
        description="Series, Painleve, numeric and CR-invariant tools for the reduced type N equations.",
    )
    sub = top.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("series", help="exact rational power series of the w-equation")
    p.add_argument("--u0", type=frac_from_str, default=Fraction(-2), help="g(0), exact rational (default -2)")
    p.add_argument("--kmax", type=int, default=30, help="highest series index 2k (default 30)")
    p.add_argument("--symbolic", action="store_true", help="emit u_{2k} as rational functions of u0")
    p.add_argument("--C", type=int, choices=(0, 1), default=1, help="constant C of the w-equation")
    p.add_argument("--out", help="write JSON here instead of stdout")

    p = sub.add_parser("puiseux", help="Puiseux expansion about a movable point J0")
    p.add_argument("--u0", type=complex, default=1.0 + 0j)
    p.add_argument("--J0", type=complex, default=1.0 + 0j)
    p.add_argument("--lam", type=float, default=-1.0, help="cosmological constant Lambda")
    p.add_argument("--C1", type=float, default=0.0)
    p.add_argument("-n", type=int, default=12, help="number of coefficients")
    p.add_argument("--branch", type=int, choices=(0, 1, 2), default=0, help="cube-root branch of the leading term")
    p.add_argument("--out")

    p = sub.add_parser("painleve", help="weak Painleve test of a term-language ODE")
    p.add_argument("--ode", help="named equation: PEQ, JEQ or ABEL")
    p.add_argument("--text", help="explicit term-language form (overrides --ode)")
    p.add_argument("--out")

    p = sub.add_parser("integrate", help="adaptive integration of the w-equation")
    p.add_argument("--u0", type=float, required=True)
    p.add_argument("--C", type=int, choices=(0, 1), default=1)
    p.add_argument("--wmax", type=float, default=50.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--csv", help="trajectory CSV path")
    p.add_argument("--sandwich", action="store_true", help="also report parabola margins")
    p.add_argument("--fit", nargs=2, type=float, metavar=("W_LO", "W_HI"), help="asymptotic remainder fit window")
    p.add_argument("--out")

    p = sub.add_parser("invariants", help="Cartan invariant profile along z")
    p.add_argument("--solution", choices=("ln", "flat-s", "flat-ss", "series"), default="ln")
    p.add_argument("--lam", type=float, default=-1.0)
    p.add_argument("--C0", type=float, default=0.0)
    p.add_argument("--C1", type=float, default=0.0)
    p.add_argument("--u0", type=float, default=1.0, help="J'(0) for --solution=series")
    p.add_argument("--z-lo", type=float, default=0.5)
    p.add_argument("--z-hi", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--order", type=int, default=10)
    p.add_argument("--csv", help="profile CSV path")
    p.add_argument("--out")

    p = sub.add_parser("flat", help="conformally flat family J(z)")
    p.add_argument("--case", required=True, help="1|2|3 or JFlatS|JFlatSS|JTN|JTNS")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--C0", type=float, default=0.0)
    p.add_argument("--C1", type=float, default=0.0)
    p.add_argument("--C2", type=float, default=0.0)
    p.add_argument("--z-lo", type=float, required=True)
    p.add_argument("--z-hi", type=float, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--csv")
    p.add_argument("--out")

    p = sub.add_parser("metric", help="metric samples on a coordinate grid")
    p.add_argument("--solution", choices=("ln", "flat-s", "flat-ss", "series"), default="ln")
    p.add_argument("--lam", type=float, default=-1.0)
    p.add_argument("--C0", type=float, default=0.0)
    p.add_argument("--C1", type=float, default=0.0)
    p.add_argument("--u0", type=float, default=1.0)
    p.add_argument("--grid", required=True, help="file of x z u r tuples, one per line, # comments")
    p.add_argument("--c-inner", type=float, default=0.0, help="constant of the inner quadrature in lambda")
    p.add_argument("--c-outer", type=float, default=0.0, help="constant of the outer quadrature in lambda")
    p.add_argument("--csv")

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--ids", type=int, nargs="*", help="restrict to these criterion numbers")
    p.add_argument("--out", help="JSON report path")

    return top


def _solution_spec(cfg):
    from .cr_invariants import flat_tag_solution, leroy_nurowski_solution, series_solution

    kind = cfg.solution
    if kind == "ln":
        return leroy_nurowski_solution(cfg.lam, cfg.C0, cfg.C1)
    if kind == "flat-s":
        return flat_tag_solution("JFlatS", cfg.lam, C0=cfg.C0, C1=cfg.C1)
    if kind == "flat-ss":
        return flat_tag_solution("JFlatSS", cfg.lam, C0=cfg.C0)
    return series_solution(cfg.u0, cfg.lam, C1=cfg.C1)


def _emit(payload: dict, out_path):
    text = to_json(payload, out_path)
    if out_path is None:
        print(text)


def _cmd_series(cfg) -> int:
    from .exact_series import g_coefficients, g_coefficients_symbolic

    if cfg.symbolic:
        polys = g_coefficients_symbolic(cfg.kmax // 2)
        payload = {"kind": "series-symbolic", "coefficients": [p.to_jsonable() for p in polys]}
    else:
        series = g_coefficients(cfg.u0, cfg.kmax // 2, C=cfg.C)
        payload = {"kind": "series", "solution": series.to_jsonable()}
    _emit(payload, cfg.out)
    return 0


def _cmd_puiseux(cfg) -> int:
    from .puiseux import puiseux_expand

    series = puiseux_expand(cfg.u0, cfg.J0, cfg.lam, cfg.C1, cfg.n, branch=cfg.branch)
    _emit({"kind": "puiseux", "series": series.to_jsonable()}, cfg.out)
    return 0


def _cmd_painleve(cfg) -> int:
    from .odeform import NAMED_ODES, parse_ode
    from .painleve import weak_painleve_verdict

    if cfg.text:
        text = cfg.text
    elif cfg.ode:
        try:
            text = NAMED_ODES[cfg.ode.upper()]
        except KeyError:
            print(f"unknown named ODE {cfg.ode!r}; choose from {sorted(NAMED_ODES)}", file=sys.stderr)
            return 2
    else:
        print("painleve needs --ode or --text", file=sys.stderr)
        return 2
    verdict = weak_painleve_verdict(parse_ode(text))
    _emit({"kind": "painleve", "ode": text, "verdict": verdict.to_jsonable()}, cfg.out)
    return 0


def _cmd_integrate(cfg) -> int:
    from .numeric_ode import asymptotic_fit, integrate_g, sandwich_report

    traj = integrate_g(cfg.u0, cfg.C, cfg.wmax, cfg.tol)
    if cfg.csv:
        traj.to_csv(cfg.csv)
    payload = {"kind": "trajectory", "summary": traj.to_jsonable()}
    if cfg.sandwich:
        payload["sandwich"] = sandwich_report(cfg.u0, cfg.wmax, cfg.tol).to_jsonable()
    if cfg.fit:
        fit = asymptotic_fit(traj, cfg.fit[0], cfg.fit[1])
        payload["fit"] = {
            "exponent": float_str(fit.exponent),
            "amplitude": float_str(fit.amplitude),
            "fit_residual": float_str(fit.fit_residual),
            "degenerate": bool(fit.degenerate),
            "non_asymptotic": bool(fit.non_asymptotic),
            "split_retry": bool(fit.split_retry),
        }
    _emit(payload, cfg.out)
    return 0


def _cmd_invariants(cfg) -> int:
    from .cr_invariants import invariant_profile

    spec = _solution_spec(cfg)
    prof = invariant_profile(spec, cfg.z_lo, cfg.z_hi, samples=cfg.samples, order=cfg.order)
    if cfg.csv:
        lines = ["z,alpha_re,alpha_im,alpha_sq_re,alpha_sq_im,beta_re,beta_im,gamma_re,gamma_im,theta_re,theta_im"]
        for s in prof.sets:
            row = [float_str(s.z)]
            for v in (s.alpha, s.alpha_sq, s.beta, s.gamma, s.theta):
                row += complex_pair(v)
            lines.append(",".join(row))
        with open(cfg.csv, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    _emit({"kind": "invariant-profile", "solution": spec.name, "profile": prof.to_jsonable()}, cfg.out)
    return 0


def _cmd_flat(cfg) -> int:
    import numpy as np

    from .numeric_ode import FlatFamilyParams, K_of_solution, flat_family

    case = int(cfg.case) if cfg.case in ("1", "2", "3") else cfg.case
    params = FlatFamilyParams(case, cfg.lam, C0=cfg.C0, C1=cfg.C1, C2=cfg.C2)
    rows = []
    for z in np.linspace(cfg.z_lo, cfg.z_hi, cfg.samples):
        J, Jp = flat_family(params, float(z))
        rows.append((float(z), J, Jp))
    if cfg.csv:
        lines = ["z,J,Jp"] + [",".join(float_str(v) for v in row) for row in rows]
        with open(cfg.csv, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    payload = {
        "kind": "flat-family",
        "case": str(cfg.case),
        "samples": len(rows),
        "z_range": [float_str(cfg.z_lo), float_str(cfg.z_hi)],
        "J_range": [float_str(rows[0][1]), float_str(rows[-1][1])],
    }
    _emit(payload, cfg.out)
    return 0


def _cmd_metric(cfg) -> int:
    from .metric import metric_csv, parse_grid, reconstruct_metric

    with open(cfg.grid) as fh:
        grid = parse_grid(fh.read())
    spec = _solution_spec(cfg)
    samples = reconstruct_metric(spec, grid, c_inner=cfg.c_inner, c_outer=cfg.c_outer)
    text = metric_csv(samples, spec, cfg.csv)
    if not cfg.csv:
        print(text, end="")
    return 0


def _cmd_verify(cfg) -> int:
    from .acceptance import run_acceptance

    report = run_acceptance(set(cfg.ids) if cfg.ids else None)
    _emit({"kind": "acceptance", "report": report}, cfg.out)
    for row in report["criteria"]:
        print(f"[{row['status']:5s}] {row['id']:2d} {row['title']} ({row['seconds']}s)", file=sys.stderr)
    return 0 if report["ok"] else 1


_COMMANDS = {
    "series": _cmd_series,
    "puiseux": _cmd_puiseux,
    "painleve": _cmd_painleve,
    "integrate": _cmd_integrate,
    "invariants": _cmd_invariants,
    "flat": _cmd_flat,
    "metric": _cmd_metric,
    "verify": _cmd_verify,
}


def cli_dispatch(argv) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    cfg = RunConfig(ns.subcommand, {k.replace("-", "_"): v for k, v in vars(ns).items() if k != "subcommand"})
    try:
        return _COMMANDS[cfg.subcommand](cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))
