"""
Logging setup and run configuration for the sl-solvability command line.
"""
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from src.utils.constants import (
    LOG_FORMAT, DEFAULT_P, DEFAULT_SEED, QUAD_TOL_FINITE, THREADS_ENV_VAR
)

DEFAULT_GRID = (-10.0, 10.0, 201)


def setup_logging(level='WARNING'):
    """Configure logging"""
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.WARNING)
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


@dataclass(frozen=True)
class RunConfig:
    """
    Everything one CLI run needs.

    Attributes:
        command: analyze, solve, sweep, verify or pfss-dump
        problem: Path of the coefficient JSON, None for sweep
        p: Exponent of L_p
        tol: Quadrature tolerance on finite intervals
        grid: (lo, hi, n) sample grid for solve and pfss-dump
        out: Output directory
        seed: Probe and sampling seed
        alphas, betas: Sweep exponents
        rhs: gaussian, indicator or file
        rhs_file: CSV of x,f samples when rhs is file
        threads: Worker cap for sweep rows
        probes: Number of random norm probes
        corrupt_u: Scale u by this factor without touching v (verify fault injection)
        check: Run the solvability analysis before solve
        force: Solve even when the analysis finds the equation not correctly solvable
        hardy: Estimate the Hardy brackets of the Green operator in analyze
    """
    command: str
    problem: Path = None
    p: float = DEFAULT_P
    tol: float = QUAD_TOL_FINITE
    grid: tuple = DEFAULT_GRID
    out: Path = Path('.')
    seed: int = DEFAULT_SEED
    alphas: tuple = field(default_factory=tuple)
    betas: tuple = field(default_factory=tuple)
    rhs: str = 'gaussian'
    rhs_file: Path = None
    threads: int = 1
    probes: int = 0
    corrupt_u: float = None
    check: bool = True
    force: bool = False
    hardy: bool = False


def read_thread_cap(environ=None):
    """Worker cap from SL_SOLV_THREADS; invalid values are logged and ignored."""
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV_VAR)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        logging.warning(f"Ignoring {THREADS_ENV_VAR}={raw!r}: not an integer")
        return 1
    if value < 1:
        logging.warning(f"Ignoring {THREADS_ENV_VAR}={raw!r}: must be at least 1")
        return 1
    return value


def build_run_config(args, environ=None):
    """Build a RunConfig from parsed arguments and the environment."""
    def opt(name, default=None):
        return getattr(args, name, default)

    grid = opt('grid') or DEFAULT_GRID
    return RunConfig(
        command=args.command,
        problem=Path(args.problem) if opt('problem') else None,
        p=float(opt('p', DEFAULT_P)),
        tol=float(opt('tol', QUAD_TOL_FINITE)),
        grid=(float(grid[0]), float(grid[1]), int(grid[2])),
        out=Path(opt('out') or '.'),
        seed=int(opt('seed', DEFAULT_SEED)),
        alphas=tuple(opt('alpha_list') or ()),
        betas=tuple(opt('beta_list') or ()),
        rhs=opt('rhs', 'gaussian'),
        rhs_file=Path(args.rhs_file) if opt('rhs_file') else None,
        threads=read_thread_cap(environ),
        probes=int(opt('probes', 0) or 0),
        corrupt_u=opt('corrupt_u'),
        check=not opt('no_check', False),
        force=bool(opt('force', False)),
        hardy=bool(opt('hardy', False)),
    )
