import csv
import json
import math

import pytest

from app import main
from src.app_config import build_run_config, read_thread_cap
from src.cli.parser import build_parser
from src.utils.constants import (
    EXIT_INPUT_ERROR, EXIT_NOT_SOLVABLE, EXIT_SOLVABLE, THREADS_ENV_VAR
)


def _problem(tmp_path, doc, name='problem.json'):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding='utf-8')
    return str(path)


def _rows(path):
    with open(path, newline='', encoding='utf-8') as handle:
        return list(csv.reader(handle))


@pytest.fixture
def constant_problem(tmp_path):
    return _problem(tmp_path, {'family': 'constant', 'r0': 1.0, 'q0': 1.0})


def test_missing_problem_file(tmp_path):
    code = main(['analyze', '--problem', str(tmp_path / 'missing.json'), '--out', str(tmp_path)])
    assert code == EXIT_INPUT_ERROR


def test_invalid_problem_document(tmp_path):
    problem = _problem(tmp_path, {'family': 'power_law', 'alpha': 0.4, 'beta': 1.0})
    assert main(['analyze', '--problem', problem, '--out', str(tmp_path)]) == EXIT_INPUT_ERROR


def test_invalid_p(tmp_path, constant_problem):
    code = main(['analyze', '--problem', constant_problem, '--p', '1', '--out', str(tmp_path)])
    assert code == EXIT_INPUT_ERROR


def test_analyze_solvable(tmp_path):
    problem = _problem(tmp_path, {'family': 'power_law', 'alpha': 1.5, 'beta': 1.0})
    out = tmp_path / 'out'
    assert main(['analyze', '--problem', problem, '--probes', '0', '--out', str(out)]) == EXIT_SOLVABLE
    report = json.loads((out / 'report.json').read_text(encoding='utf-8'))
    assert report['verdict'] == 'CorrectlySolvable'
    assert report['D']['status'] == 'finite'
    assert not (out / 'norms.csv').exists()


def test_analyze_not_solvable(tmp_path):
    problem = _problem(tmp_path, {'family': 'power_law', 'alpha': 0.75, 'beta': 1.0})
    code = main(['analyze', '--problem', problem, '--probes', '0', '--out', str(tmp_path)])
    assert code == EXIT_NOT_SOLVABLE


def test_analyze_with_probes_writes_norms(tmp_path):
    problem = _problem(tmp_path, {'family': 'power_law', 'alpha': 2.0, 'beta': 2.0})
    assert main(['analyze', '--problem', problem, '--probes', '5', '--out', str(tmp_path)]) == 0
    rows = _rows(tmp_path / 'norms.csv')
    assert rows[0] == ['p', 'lower', 'upper', 'method']
    assert rows[1][3] == 'EmpiricalProbe'
    assert rows[1][2] == 'inf'


def test_solve_indicator(tmp_path, constant_problem):
    code = main(['solve', '--problem', constant_problem, '--rhs', 'indicator', '--no-check',
                 '--grid', '-2', '2', '5', '--out', str(tmp_path)])
    assert code == EXIT_SOLVABLE
    rows = _rows(tmp_path / 'solution.csv')
    assert rows[0] == ['x', 'y']
    assert float(rows[3][0]) == 0.0
    assert float(rows[3][1]) == pytest.approx(0.6321205588285577, abs=1e-8)
    summary = json.loads((tmp_path / 'summary.json').read_text(encoding='utf-8'))
    assert summary['method'] == 'ConstantClosedForm'
    assert summary['residual_max'] < 1e-4


def test_solve_from_rhs_file(tmp_path, constant_problem):
    rhs = tmp_path / 'rhs.csv'
    rhs.write_text('x,f\n-1,0\n0,1\n1,0\n', encoding='utf-8')
    code = main(['solve', '--problem', constant_problem, '--rhs', 'file', '--rhs-file', str(rhs),
                 '--no-check', '--grid', '-1', '1', '3', '--out', str(tmp_path)])
    assert code == EXIT_SOLVABLE
    assert len(_rows(tmp_path / 'solution.csv')) == 4


def test_solve_rhs_file_required(tmp_path, constant_problem):
    code = main(['solve', '--problem', constant_problem, '--rhs', 'file', '--no-check',
                 '--out', str(tmp_path)])
    assert code == EXIT_INPUT_ERROR


def test_solve_refuses_unsolvable(tmp_path):
    problem = _problem(tmp_path, {'family': 'power_law', 'alpha': 0.75, 'beta': 1.0})
    code = main(['solve', '--problem', problem, '--out', str(tmp_path)])
    assert code == EXIT_NOT_SOLVABLE
    assert not (tmp_path / 'solution.csv').exists()


def test_empty_sweep(tmp_path):
    assert main(['sweep', '--out', str(tmp_path)]) == EXIT_SOLVABLE
    assert (tmp_path / 'sweep.csv').read_text(encoding='utf-8') == 'alpha,beta,verdict,D_or_exponent\n'


def test_sweep_rejects_bad_exponent(tmp_path):
    assert main(['sweep', '--alpha-list', '0.4', '--beta-list', '1', '--out', str(tmp_path)]) == 0
    rows = _rows(tmp_path / 'sweep.csv')
    assert rows[1][2] == f'error:{EXIT_INPUT_ERROR}'


@pytest.mark.slow
def test_sweep_rows_keep_order(tmp_path, monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, '3')
    code = main(['sweep', '--alpha-list', '0.6', '1', '1.5', '--beta-list', '1', '--out', str(tmp_path)])
    assert code == EXIT_SOLVABLE
    rows = _rows(tmp_path / 'sweep.csv')
    assert [row[2] for row in rows[1:]] == ['not', 'solvable', 'solvable']
    assert [float(row[0]) for row in rows[1:]] == [0.6, 1.0, 1.5]


def test_verify_passes(tmp_path, constant_problem):
    assert main(['verify', '--problem', constant_problem, '--out', str(tmp_path)]) == EXIT_SOLVABLE
    result = json.loads((tmp_path / 'verify.json').read_text(encoding='utf-8'))
    assert result['passed'] is True
    assert result['checks']['otelbaev_lower']['passed'] is True
    assert result['checks']['integral_representation']['passed'] is True


def test_verify_detects_corrupted_u(tmp_path, constant_problem):
    code = main(['verify', '--problem', constant_problem, '--corrupt-u', '2.0', '--out', str(tmp_path)])
    assert code == EXIT_NOT_SOLVABLE
    result = json.loads((tmp_path / 'verify.json').read_text(encoding='utf-8'))
    assert result['checks']['wronskian']['passed'] is False


def test_pfss_dump_is_deterministic(tmp_path):
    problem = _problem(tmp_path, {'family': 'power_law', 'alpha': 1.0, 'beta': 1.0})
    first, second = tmp_path / 'first', tmp_path / 'second'
    for out in (first, second):
        args = ['pfss-dump', '--problem', problem, '--grid', '-5', '5', '11', '--out', str(out)]
        assert main(args) == EXIT_SOLVABLE
    for name in ('pfss.csv', 'width.csv', 'kernel_slice.csv', 'pfss_summary.json'):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    assert _rows(first / 'kernel_slice.csv')[0] == ['t', 'G(x0,t)']
    assert not (first / 'otelbaev.csv').exists()
    summary = json.loads((first / 'pfss_summary.json').read_text(encoding='utf-8'))
    assert summary['system']['method'] == 'AsymptoticMatching'
    assert summary['system']['quality']['passed'] is True


def test_pfss_dump_writes_otelbaev_table(tmp_path, constant_problem):
    args = ['pfss-dump', '--problem', constant_problem, '--grid', '-1', '1', '3', '--out', str(tmp_path)]
    assert main(args) == EXIT_SOLVABLE
    rows = _rows(tmp_path / 'otelbaev.csv')
    assert rows[0] == ['x', 'h', 'd']
    assert float(rows[1][1]) == pytest.approx(0.5, abs=1e-8)
    slice_rows = _rows(tmp_path / 'kernel_slice.csv')[1:]
    edge = 0.5 * math.exp(-1.0)
    assert [float(g) for _, g in slice_rows] == pytest.approx([edge, 0.5, edge])


def test_thread_cap():
    assert read_thread_cap({}) == 1
    assert read_thread_cap({THREADS_ENV_VAR: '4'}) == 4
    assert read_thread_cap({THREADS_ENV_VAR: 'many'}) == 1
    assert read_thread_cap({THREADS_ENV_VAR: '0'}) == 1


def test_run_config_from_arguments(tmp_path):
    args = build_parser().parse_args(['solve', '--problem', 'p.json', '--no-check', '--force',
                                      '--grid', '0', '1', '3', '--out', str(tmp_path)])
    config = build_run_config(args, {THREADS_ENV_VAR: '2'})
    assert config.command == 'solve'
    assert config.check is False and config.force is True
    assert config.grid == (0.0, 1.0, 3)
    assert config.threads == 2
    assert config.p == 2.0
