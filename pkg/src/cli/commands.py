"""
The analyze, solve, sweep, verify and pfss-dump commands.

Each command takes a RunConfig, writes its files under config.out and returns
the process exit code.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.auxiliary.otelbaev import OtelbaevProfile
from src.auxiliary.width import compute_s
from src.cli.verify_suite import run_verify_suite
from src.coefficients.integrals import classify
from src.coefficients.pair import PowerLaw, load_problem, power_law
from src.green.kernel import (
    GreenKernel, RightHandSide, apply_green, equation_residual, gaussian_rhs, green_matrix,
    indicator_rhs
)
from src.pfss.construction import PfssOptions, construct_pfss
from src.pfss.verification import verify_pfss
from src.solvability.analyzer import AnalysisOptions, analyze
from src.solvability.criteria import model_rho_asymptote
from src.solvability.report import CORRECTLY_SOLVABLE, NOT_CORRECTLY_SOLVABLE
from src.utils.constants import (
    EXIT_SOLVABLE, EXIT_NOT_SOLVABLE, EXIT_INCONCLUSIVE, EXIT_INPUT_ERROR, EXIT_NUMERIC_ERROR
)
from src.utils.errors import ProblemFormatError, SolvabilityError
from src.utils.io_utils import write_csv, write_json
from src.utils.numerics import lp_norm
from src.utils.trend import FINITE, DIVERGING

VERDICT_EXIT = {
    CORRECTLY_SOLVABLE: EXIT_SOLVABLE,
    NOT_CORRECTLY_SOLVABLE: EXIT_NOT_SOLVABLE,
}
RESIDUAL_STRIDE = 10


def _require_p(config):
    if not (config.p > 1.0 and math.isfinite(config.p)):
        raise ValueError(f"--p must lie in (1, inf), got {config.p}")


def _grid(config):
    lo, hi, n = config.grid
    if not (hi > lo and n >= 2):
        raise ValueError(f"invalid grid {config.grid}")
    return np.linspace(lo, hi, int(n))


def _analysis_options(config, **overrides):
    return AnalysisOptions(tol=config.tol, seed=config.seed, **overrides)


def norm_table_rows(report):
    rows = []
    for name in ('G',):
        for source in (report.norm_bounds, report.probe):
            if name in source:
                rows.append(source[name].table_row())
    return rows


def cmd_analyze(config):
    """Write report.json (and norms.csv when norms were estimated); exit code by verdict."""
    _require_p(config)
    pair = load_problem(config.problem)
    report = analyze(pair, config.p, _analysis_options(config, probe_count=config.probes,
                                                       hardy=config.hardy))
    write_json(config.out / 'report.json', report.to_dict())
    rows = norm_table_rows(report)
    if rows:
        write_csv(config.out / 'norms.csv', ('p', 'lower', 'upper', 'method'), rows)
    print(f"{pair.label}: {report.verdict}")
    return VERDICT_EXIT.get(report.verdict, EXIT_INCONCLUSIVE)


def load_rhs_file(path):
    """Right-hand side from an x,f CSV, linear between samples and zero outside."""
    try:
        table = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    except (OSError, ValueError) as e:
        raise ProblemFormatError(f"cannot read right-hand side {path}: {e}") from e
    if table.shape[1] != 2 or table.shape[0] < 2 or np.any(np.diff(table[:, 0]) <= 0.0):
        raise ProblemFormatError(f"{path}: expected x,f rows with increasing x")
    xs, fs = table[:, 0], table[:, 1]
    support = (float(xs[0]), float(xs[-1])) if np.any(fs != 0.0) else (0.0, 0.0)
    return RightHandSide(lambda x: np.interp(x, xs, fs, left=0.0, right=0.0), support, str(path))


def _rhs(config):
    if config.rhs == 'gaussian':
        return gaussian_rhs()
    if config.rhs == 'indicator':
        return indicator_rhs(-1.0, 1.0)
    if config.rhs == 'file':
        if config.rhs_file is None:
            raise ProblemFormatError("--rhs file needs --rhs-file")
        return load_rhs_file(config.rhs_file)
    raise ProblemFormatError(f"unknown right-hand side {config.rhs!r}")


def cmd_solve(config):
    """
    Sample y = G f on the grid into solution.csv and write summary.json.

    The equation is analyzed first unless --no-check; a NotCorrectlySolvable
    verdict stops the solve unless --force.
    """
    _require_p(config)
    pair = load_problem(config.problem)
    f = _rhs(config)
    grid = _grid(config)

    summary = {'pair': pair.describe(), 'rhs': f.label, 'p': config.p}
    D = None
    if config.check:
        report = analyze(pair, config.p, _analysis_options(config))
        summary['verdict'] = report.verdict
        if report.D is not None and report.D.status == FINITE:
            D = report.D.value
        if report.verdict == NOT_CORRECTLY_SOLVABLE:
            if not config.force:
                logging.warning(f"{pair.label} is not correctly solvable in L_{config.p}; use --force")
                return EXIT_NOT_SOLVABLE
            logging.warning(f"{pair.label} is not correctly solvable; solving anyway")

    sys = construct_pfss(pair, PfssOptions(tol=config.tol))
    kernel = GreenKernel(sys)
    ys = np.array([apply_green(kernel, f, x, config.tol) for x in grid])
    write_csv(config.out / 'solution.csv', ('x', 'y'), zip(grid, ys))

    interior = grid[1:-1][::RESIDUAL_STRIDE]
    residual = equation_residual(kernel, f, interior, config.tol) if interior.size else np.zeros(0)
    norm_y = lp_norm(ys, grid, config.p)
    norm_f = lp_norm(f(grid), grid, config.p)
    ratio = norm_y / norm_f if norm_f > 0.0 else float('nan')
    summary.update(
        method=sys.method,
        norm_y=norm_y,
        norm_f=norm_f,
        ratio=ratio,
        residual_max=float(np.max(residual)) if residual.size else 0.0,
        D=D,
        bracket_constant=ratio / D if D else None,
    )
    write_json(config.out / 'summary.json', summary)
    print(f"||y||_p={norm_y:.6g} ||f||_p={norm_f:.6g} ratio={ratio:.6g}")
    return EXIT_SOLVABLE


def sweep_row(alpha, beta, p, opts):
    """One sweep row (alpha, beta, verdict label, D or divergence exponent)."""
    try:
        report = analyze(power_law(alpha, beta), p, opts)
    except ProblemFormatError as e:
        logging.error(f"Sweep point ({alpha}, {beta}) rejected: {e}")
        return (alpha, beta, f"error:{EXIT_INPUT_ERROR}", '')
    except (SolvabilityError, ArithmeticError) as e:
        logging.error(f"Sweep point ({alpha}, {beta}) failed: {e}", exc_info=True)
        return (alpha, beta, f"error:{EXIT_NUMERIC_ERROR}", '')
    value = float('nan')
    if report.D is not None:
        if report.D.status == FINITE:
            value = report.D.value
        elif report.D.status == DIVERGING and report.D.exponent is not None:
            value = report.D.exponent
    return (alpha, beta, report.short_label, value)


def cmd_sweep(config):
    """Analyze the power-law grid into sweep.csv; rows keep input order."""
    _require_p(config)
    opts = _analysis_options(config)
    points = [(float(a), float(b)) for a in config.alphas for b in config.betas]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        rows = list(pool.map(lambda ab: sweep_row(ab[0], ab[1], config.p, opts), points))
    write_csv(config.out / 'sweep.csv', ('alpha', 'beta', 'verdict', 'D_or_exponent'), rows)
    return EXIT_SOLVABLE


def cmd_verify(config):
    """Write verify.json; exit 1 when any check fails."""
    pair = load_problem(config.problem)
    result = run_verify_suite(pair, config.seed, config.corrupt_u, config.tol)
    write_json(config.out / 'verify.json', result)
    failed = [name for name, check in result['checks'].items() if not check['passed']]
    if failed:
        logging.warning(f"Failed checks: {', '.join(failed)}")
    print(f"{pair.label}: {'pass' if result['passed'] else 'FAIL'}")
    return EXIT_SOLVABLE if result['passed'] else EXIT_NOT_SOLVABLE


def cmd_pfss_dump(config):
    """Write pfss.csv, width.csv, kernel_slice.csv and, under the limit condition, otelbaev.csv."""
    pair = load_problem(config.problem)
    profile = classify(pair, config.tol)
    sys = construct_pfss(pair, PfssOptions(tol=config.tol), profile)
    grid = _grid(config)
    sys = sys.with_quality(verify_pfss(sys, grid, config.seed))

    write_csv(config.out / 'pfss.csv', ('x', 'u', 'v', 'rho'),
              zip(grid, sys.u(grid), sys.v(grid), sys.rho(grid)))
    write_csv(config.out / 'width.csv', ('x', 's'), ((x, compute_s(sys, x)) for x in grid))
    kernel = GreenKernel(sys)
    write_csv(config.out / 'kernel_slice.csv', ('t', 'G(x0,t)'),
              zip(grid, green_matrix(kernel, [sys.x0], grid)[0]))
    if profile.condition_1_3 is True:
        write_csv(config.out / 'otelbaev.csv', ('x', 'h', 'd'),
                  OtelbaevProfile(pair, profile=profile).samples(grid))

    summary = {'pair': pair.describe(), 'system': sys.describe(), 'regime': profile.to_dict()}
    if isinstance(pair.family, PowerLaw):
        x_far = np.array([1e2, 1e3, 1e4])
        summary['model_rho_asymptote'] = dict(zip(('1e2', '1e3', '1e4'),
                                                  model_rho_asymptote(pair.family.alpha, x_far)))
        print(f"model rho asymptote at 1e3: {summary['model_rho_asymptote']['1e3']:.6g}")
    write_json(config.out / 'pfss_summary.json', summary)
    return EXIT_SOLVABLE


COMMANDS = {
    'analyze': cmd_analyze,
    'solve': cmd_solve,
    'sweep': cmd_sweep,
    'verify': cmd_verify,
    'pfss-dump': cmd_pfss_dump,
}
