"""Batch front end: parse a problem file, run a solver, stream a CSV trace.

Exit codes: 0 converged, 3 iteration budget exhausted, 2 input error.
"""

import argparse
import sys

import numpy as np

from . import __version__
from .admm import ProblemSpec, SubproblemError, classical_admm, run_iadmm
from .config import ConfigError, parse_config_file
from .consensus import boyd_consensus, run_sum1, run_sum2
from .dr import ResolventOp, run_idr
from .duality import duality_report
from .params import (
    InertialParams,
    InfeasibleParameters,
    constant_schedule,
    delta_lower_bound,
    max_relaxation,
    validate,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="inadmm",
        description="Inertial ADMM / Douglas-Rachford solver runner.",
    )
    parser.add_argument("config", help="problem file path")
    parser.add_argument("--output", help="trace CSV path (overrides config)")
    parser.add_argument("--max-iters", type=int, help="iteration budget override")
    parser.add_argument("--tol", type=float, help="stopping tolerance override")
    parser.add_argument("--solver", help="solver override")
    parser.add_argument(
        "--sweep",
        help="parameter grid, e.g. 'alpha=0,0.1,0.2;lambda=0.9,1.4'",
    )
    parser.add_argument(
        "--compare",
        action="store_true",
        help="run the inertial ADMM and its Douglas-Rachford twin and "
        "report the max per-iterate deviation",
    )
    parser.add_argument("--version", action="version", version=__version__)
    return parser


def _dr_operators(problem, out=None):
    A = ResolventOp.composed_conjugate(problem.f, problem.L)
    B = ResolventOp.conjugate_subdifferential(problem.g)
    return A, B


def _run_solver(cfg, solver, params, max_iters, tol):
    problem = cfg.problem
    if solver == "iadmm":
        return run_iadmm(problem, params, max_iters=max_iters, tol=tol)
    if solver == "classical_admm":
        return classical_admm(problem, params.gamma, lam=cfg.lambda_value,
                              max_iters=max_iters, tol=tol)
    if solver == "idr":
        A, B = _dr_operators(problem)
        zeros = np.zeros(problem.g.dim)
        return run_idr(A, B, params.gamma, params, zeros, zeros,
                       max_iters=max_iters, tol=tol)
    if solver == "consensus_sum1":
        return run_sum1(problem, params, max_iters=max_iters, tol=tol)
    if solver == "consensus_sum2":
        return run_sum2(problem, params, max_iters=max_iters, tol=tol)
    if solver == "boyd_consensus":
        return boyd_consensus(problem, params.gamma, max_iters=max_iters, tol=tol)
    raise ConfigError("unknown solver %r" % solver)


def _summary(cfg, solver, trace, out):
    last = trace.rows[-1]
    print("solver: %s" % solver, file=out)
    print("iterations: %d" % trace.iterations, file=out)
    print("converged: %s" % ("yes" if trace.converged else "no"), file=out)
    print(
        "final residuals: feas=%.3g zbar=%.3g dw=%.3g"
        % (_nan0(last.feas_residual), _nan0(last.zbar_norm), _nan0(last.dw_norm)),
        file=out,
    )
    if np.isfinite(last.primal) or np.isfinite(last.dual):
        print(
            "objective: primal=%.12g dual=%.12g gap=%.3g"
            % (last.primal, last.dual, last.gap),
            file=out,
        )
    if isinstance(cfg.problem, ProblemSpec) and solver in ("iadmm", "classical_admm"):
        x = trace.final["x"]
        v = trace.final.get("v", trace.final["y"])
        rng = np.random.default_rng(cfg.seed)
        print("diagnostics: %s" % duality_report(cfg.problem, x, v, rng=rng),
              file=out)
    report = validate(cfg.params)
    print("parameters: %s" % report, file=out)


def _nan0(v):
    return 0.0 if v is None or (isinstance(v, float) and np.isnan(v)) else v


def _run_compare(cfg, max_iters, tol, out):
    problem = cfg.problem
    if not isinstance(problem, ProblemSpec):
        raise ConfigError("--compare needs a composite (f/g/L) problem")
    trace_admm = run_iadmm(problem, cfg.params, max_iters=max_iters, tol=tol)
    gamma = cfg.params.gamma
    A, B = _dr_operators(problem)
    zeros = np.zeros(problem.g.dim)
    trace_dr = run_idr(A, B, gamma, cfg.params, zeros, zeros,
                       max_iters=max_iters, tol=tol)
    n = min(len(trace_admm), len(trace_dr))
    worst = 0.0
    for k in range(1, n):  # compare from the second iteration on
        ra, rd = trace_admm[k], trace_dr[k]
        for admm_key, dr_key in (("y", "y"), ("v", "v"), ("w", "w")):
            dev = float(np.abs(ra.vectors[admm_key] - rd.vectors[dr_key]).max())
            worst = max(worst, dev)
    print("compared iterations: %d" % (n - 1), file=out)
    print("max deviation (y, v, w): %.3g" % worst, file=out)
    return EXIT_OK


def _parse_sweep(spec):
    grids = {}
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError("sweep entries look like name=v1,v2,...")
        name, values = part.split("=", 1)
        name = name.strip()
        if name not in ("alpha", "lambda"):
            raise ConfigError("sweep supports only alpha and lambda")
        try:
            grids[name] = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise ConfigError("malformed numeral in sweep %r" % name)
    if not grids:
        raise ConfigError("empty sweep specification")
    return grids


def _sweep_params(cfg, alpha, lam):
    sigma = cfg.params.sigma
    lb = delta_lower_bound(alpha, sigma)
    delta = 1.5 * lb if lb > 0.0 else 1.0
    lam_max = max_relaxation(alpha, sigma, delta)
    if lam is None:
        lam = 0.9 * lam_max if alpha > 0.0 else 1.0
    if not 0.0 < lam <= lam_max:
        raise InfeasibleParameters(
            "lambda=%g outside (0, %g]" % (lam, lam_max)
        )
    return InertialParams(
        gamma=cfg.params.gamma,
        alpha=alpha,
        sigma=sigma,
        delta=delta,
        lambda_lo=min(lam, 1e-6),
        alpha_schedule=constant_schedule(alpha),
        lambda_schedule=constant_schedule(lam),
        init_mode="lambda1_alpha1_zero" if alpha > 0.0 else "alpha2_zero",
    ), lam


def _run_sweep(cfg, solver, sweep_spec, max_iters, tol, output, out):
    grids = _parse_sweep(sweep_spec)
    alphas = grids.get("alpha", [cfg.params.alpha])
    lams = grids.get("lambda", [None])
    print("alpha lambda iterations converged final_dw", file=out)
    all_ok = True
    for alpha in alphas:
        for lam in lams:
            try:
                params, lam_eff = _sweep_params(cfg, alpha, lam)
                cfg_lam = cfg.lambda_value
                cfg.lambda_value = lam_eff
                trace = _run_solver(cfg, solver, params, max_iters, tol)
                cfg.lambda_value = cfg_lam
            except (InfeasibleParameters, ValueError) as err:
                print("%g %s infeasible (%s)" % (alpha, lam, err), file=out)
                all_ok = False
                continue
            print(
                "%g %g %d %s %.3g"
                % (alpha, lam_eff, trace.iterations,
                   "yes" if trace.converged else "no",
                   _nan0(trace.rows[-1].dw_norm)),
                file=out,
            )
            all_ok = all_ok and trace.converged
            if output:
                trace.write_csv("%s.alpha%g_lambda%g.csv" % (output, alpha, lam_eff))
    return EXIT_OK if all_ok else EXIT_BUDGET


def main(argv=None, out=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if out is None:
        out = sys.stdout

    try:
        cfg = parse_config_file(args.config)
    except ConfigError as err:
        print("config error: %s" % err, file=sys.stderr)
        return EXIT_INPUT
    except OSError as err:
        print("cannot read config: %s" % err, file=sys.stderr)
        return EXIT_INPUT

    solver = args.solver or cfg.solver
    max_iters = args.max_iters or cfg.max_iters
    tol = args.tol if args.tol is not None else cfg.tol
    output = args.output or cfg.output

    try:
        if args.compare:
            return _run_compare(cfg, max_iters, tol, out)
        if args.sweep:
            return _run_sweep(cfg, solver, args.sweep, max_iters, tol, output, out)
        trace = _run_solver(cfg, solver, cfg.params, max_iters, tol)
    except (ConfigError, InfeasibleParameters, ValueError) as err:
        print("input error: %s" % err, file=sys.stderr)
        return EXIT_INPUT
    except SubproblemError as err:
        print("solver error: %s" % err, file=sys.stderr)
        return EXIT_BUDGET

    if output:
        trace.write_csv(output)
    _summary(cfg, solver, trace, out)
    if not trace.converged:
        print("budget exhausted after %d iterations" % trace.iterations, file=out)
        return EXIT_BUDGET
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
