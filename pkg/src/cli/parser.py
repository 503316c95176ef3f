"""
Argument parser of the sl-solvability command line.
"""
import argparse

from src.utils.constants import DEFAULT_P, DEFAULT_SEED, QUAD_TOL_FINITE


def _common(parser, problem_required=True):
    parser.add_argument('--problem', required=problem_required, metavar='JSON',
                        help='Coefficient specification file')
    parser.add_argument('--out', default='.', metavar='DIR', help='Output directory')
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED)
    parser.add_argument('--tol', type=float, default=QUAD_TOL_FINITE,
                        help='Quadrature tolerance on finite intervals')
    parser.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    parser.add_argument('-v', '--verbose', action='store_true', help='Shortcut for --log-level INFO')


def _grid(parser, default):
    parser.add_argument('--grid', type=float, nargs=3, default=default, metavar=('LO', 'HI', 'N'),
                        help='Uniform sample grid')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='sl-solvability',
        description='Correct solvability of -(r y\')\' + q y = f in L_p on the real line.',
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    analyze = subparsers.add_parser('analyze', help='Decide correct solvability and write report.json.')
    _common(analyze)
    analyze.add_argument('--p', type=float, default=DEFAULT_P)
    analyze.add_argument('--probes', type=int, default=20, help='Random norm probes (0 disables)')
    analyze.add_argument('--hardy', action='store_true', help='Also estimate the Hardy norm brackets')

    solve = subparsers.add_parser('solve', help='Sample y = G f and write solution.csv.')
    _common(solve)
    solve.add_argument('--p', type=float, default=DEFAULT_P)
    solve.add_argument('--rhs', choices=['gaussian', 'indicator', 'file'], default='gaussian')
    solve.add_argument('--rhs-file', default=None, metavar='CSV', help='x,f samples for --rhs file')
    solve.add_argument('--no-check', action='store_true', help='Skip the solvability analysis')
    solve.add_argument('--force', action='store_true',
                       help='Solve even when the equation is not correctly solvable')
    _grid(solve, [-10.0, 10.0, 201])

    sweep = subparsers.add_parser('sweep', help='Analyze the power-law grid and write sweep.csv.')
    _common(sweep, problem_required=False)
    sweep.add_argument('--p', type=float, default=DEFAULT_P)
    sweep.add_argument('--alpha-list', type=float, nargs='*', default=[])
    sweep.add_argument('--beta-list', type=float, nargs='*', default=[])

    verify = subparsers.add_parser('verify', help='Run the invariant suite and write verify.json.')
    _common(verify)
    verify.add_argument('--corrupt-u', type=float, default=None, metavar='FACTOR',
                        help='Scale u without v before verifying')

    dump = subparsers.add_parser('pfss-dump', help='Write PFSS, width, Otelbaev and kernel tables.')
    _common(dump)
    _grid(dump, [-10.0, 10.0, 201])

    return parser
