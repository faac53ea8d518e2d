"""
Unit tests for apps.experiments.sweeps: cell specs, single cells and the
cell runner. Sizes are kept tiny; the process-pool test is tagged slow.
"""
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase, tag

from apps.experiments.config import parse_config
from apps.experiments.reports import sweep_frame
from apps.experiments.sweeps import CSV_COLUMNS, build_template, cell_specs, resolve_sigma, run_cell, run_cells
from apps.noise.rng import SeededRng
from apps.problems.sampling import ProblemSampler


def _config(**overrides):
    data = {
        'name': 'tiny',
        'kind': 'stability_sweep',
        'seed': 4,
        'problem': {'family': 'quad_plus_sine', 'dim': 2, 'noise': {'family': 'gaussian'}},
        'algorithms': ['nsgd_m', 'clipped_sgd'],
        'n_grid': [32, 64],
        'p': 1.5,
        'reps': 10,
        'probe_count': 4,
        'resamples': 100,
    }
    data.update(overrides)
    return parse_config(data)


class CellSpecTests(SimpleTestCase):

    def test_one_spec_per_cell_in_config_order(self):
        specs = cell_specs(_config(), 1.0)
        self.assertEqual([(s['algorithm'], s['n']) for s in specs],
                         [('nsgd_m', 32), ('nsgd_m', 64), ('clipped_sgd', 32), ('clipped_sgd', 64)])

    def test_algorithms_share_streams_per_n(self):
        specs = cell_specs(_config(), 1.0)
        by_cell = {(s['algorithm'], s['n']): (s['run_seed'], s['run_stream']) for s in specs}
        self.assertEqual(by_cell[('nsgd_m', 32)], by_cell[('clipped_sgd', 32)])
        self.assertNotEqual(by_cell[('nsgd_m', 32)], by_cell[('nsgd_m', 64)])

    def test_gap_follows_problem_support(self):
        self.assertTrue(cell_specs(_config(), 1.0)[0]['include_gap'])
        meanless = _config(
            problem={'family': 'quad_plus_sine', 'dim': 2,
                     'noise': {'family': 'symmetric_alpha_stable', 'tail_index': 1.0}},
            sigma_p=1.0,
        )
        self.assertFalse(cell_specs(meanless, 1.0)[0]['include_gap'])

    def test_robust_regression_template_covers_its_law(self):
        problem = {
            'family': 'robust_regression', 'dim': 4, 'holdout_size': 0,
            'noise': {'family': 'student_t', 'tail_index': 1.8, 'scale': 1.0},
        }
        sampler = ProblemSampler(build_template(problem, 9), 1024)
        rng = SeededRng(9).spawn('check')
        features = sampler.draw_samples(rng.spawn('probes'), 64)[:, :4]
        bound = sampler.L * (1 + 1e-12)
        self.assertLessEqual(sampler.draw(rng.spawn('train')).L, bound)
        self.assertLessEqual(2 * np.max(np.sum(features * features, axis=1)), bound)

    def test_sigma_from_config_or_estimated(self):
        self.assertEqual(resolve_sigma(_config(sigma_p=2.5)), 2.5)
        estimated = resolve_sigma(_config())
        self.assertGreater(estimated, 0.0)
        self.assertEqual(estimated, resolve_sigma(_config()))


class RunCellTests(SimpleTestCase):

    def setUp(self):
        self.specs = cell_specs(_config(), 1.0)

    def test_ok_cell(self):
        cell = run_cell(self.specs[0])
        row = cell['row']
        self.assertEqual(list(row), CSV_COLUMNS)
        self.assertEqual(row['status'], 'ok')
        self.assertEqual(row['reps'], 10)
        self.assertGreaterEqual(row['epsilon_hat'], 0.0)
        self.assertIsNotNone(row['gen_gap_hat'])
        self.assertGreater(row['G_hat'], 0.0)
        self.assertGreaterEqual(row['G_hat_stderr'], 0.0)
        self.assertEqual(cell['report']['G_hat']['value'], row['G_hat'])

    def test_failure_is_recorded(self):
        with patch('apps.experiments.sweeps.stability_report', side_effect=RuntimeError('boom')), \
                self.assertLogs('apps.experiments.sweeps', level='ERROR'):
            cell = run_cell(self.specs[0])
        self.assertIsNone(cell['report'])
        self.assertEqual(cell['row']['status'], 'failed')
        self.assertEqual(cell['row']['error'], 'RuntimeError: boom')
        self.assertEqual(cell['row']['n'], 32)

    def test_sequential_runs_repeat(self):
        a = sweep_frame(cell['row'] for cell in run_cells(self.specs))
        b = sweep_frame(cell['row'] for cell in run_cells(self.specs))
        self.assertTrue(a.equals(b))

    @tag('slow')
    def test_process_pool_matches_sequential(self):
        sequential = sweep_frame(cell['row'] for cell in run_cells(self.specs, parallelism=1))
        pooled = sweep_frame(cell['row'] for cell in run_cells(self.specs, parallelism=2))
        self.assertTrue(sequential.equals(pooled))
