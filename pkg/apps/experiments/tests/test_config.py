"""
Unit tests for apps.experiments.config and the config serializers.

Covers defaults from settings, dotted error paths, kind-specific rules,
YAML/file errors, the config hash and the example configs shipped in configs/.
"""
import tempfile
from pathlib import Path

import yaml
from django.conf import settings
from django.test import SimpleTestCase, override_settings

from apps.core_math.errors import ConfigError, InvalidArgument
from apps.core_math.params import Algorithm
from apps.experiments.config import load_config, parse_config
from apps.experiments.kinds import ExperimentKind
from apps.experiments.serializers import flatten_errors
from apps.noise.samplers import NoiseFamily
from apps.problems.families import ProblemFamily


def _sweep(**overrides):
    data = {
        'name': 'quad-test',
        'kind': 'stability_sweep',
        'problem': {
            'family': 'quad_plus_sine',
            'dim': 3,
            'noise': {'family': 'gaussian', 'scale': 1.0},
        },
        'algorithms': ['nsgd_m', 'clipped_sgd'],
        'n_grid': [64, 128],
    }
    data.update(overrides)
    return data


def _paths(exc):
    return [path for path, _ in exc.errors]


class ParseConfigTests(SimpleTestCase):

    def test_valid_sweep(self):
        config = parse_config(_sweep())
        self.assertEqual(config.kind, ExperimentKind.STABILITY_SWEEP)
        self.assertEqual(config.algorithms, (Algorithm.NSGD_M, Algorithm.CLIPPED_SGD))
        self.assertEqual(config.n_grid, (64, 128))
        self.assertEqual(config.problem.family, ProblemFamily.QUAD_PLUS_SINE)
        self.assertEqual(config.problem.noise.family, NoiseFamily.GAUSSIAN)
        self.assertEqual(config.problem.c, 0.5)
        self.assertEqual(config.x0_vector(), [1.0, 1.0, 1.0])
        self.assertTrue(config.is_sweep)

    @override_settings(HTSTAB_DEFAULT_SEED=11, HTSTAB_SCHEDULE_SCALE=2.5, HTSTAB_PROBE_COUNT=8,
                       HTSTAB_BOOTSTRAP_RESAMPLES=300)
    def test_defaults_come_from_settings(self):
        config = parse_config(_sweep())
        self.assertEqual(config.seed, 11)
        self.assertEqual(config.schedule_scale, 2.5)
        self.assertEqual(config.probe_count, 8)
        self.assertEqual(config.resamples, 300)

    def test_file_values_override_settings(self):
        config = parse_config(_sweep(seed=3, schedule_scale=0.5, probe_count=4))
        self.assertEqual((config.seed, config.schedule_scale, config.probe_count), (3, 0.5, 4))

    def test_x0_list(self):
        config = parse_config(_sweep(x0=[1.0, 2.0, 3.0]))
        self.assertEqual(config.x0_vector(), [1.0, 2.0, 3.0])

    def test_lemma_suite_needs_no_problem(self):
        config = parse_config({'name': 'lemmas', 'kind': 'lemma_suite', 'lemmas': {'instances': 50}})
        self.assertFalse(config.is_sweep)
        self.assertEqual(config.lemmas.instances, 50)
        self.assertEqual(config.lemmas.trials, 100_000)

    def test_random_walk_defaults(self):
        config = parse_config({'name': 'walk', 'kind': 'random_walk_demo'})
        self.assertEqual(config.random_walk.eta, 0.1)
        self.assertEqual(config.random_walk.horizon, 400)

    def test_config_error_is_invalid_argument(self):
        with self.assertRaises(InvalidArgument):
            parse_config({'name': 'x'})


class ConfigErrorPathTests(SimpleTestCase):

    def assertErrorAt(self, data, path):
        with self.assertRaises(ConfigError) as ctx:
            parse_config(data)
        self.assertIn(path, _paths(ctx.exception), msg=ctx.exception.errors)

    def test_unknown_algorithm_has_index_path(self):
        self.assertErrorAt(_sweep(algorithms=['nsgd_m', 'adam']), 'algorithms.1')

    def test_n_grid_must_increase(self):
        self.assertErrorAt(_sweep(n_grid=[128, 64]), 'n_grid')
        self.assertErrorAt(_sweep(n_grid=[64, 64]), 'n_grid')

    def test_n_grid_needs_two_points(self):
        self.assertErrorAt(_sweep(n_grid=[64]), 'n_grid')

    def test_reps_floor(self):
        self.assertErrorAt(_sweep(reps=9), 'reps')

    def test_p_range(self):
        self.assertErrorAt(_sweep(p=2.5), 'p')
        self.assertErrorAt(_sweep(p=1.0), 'p')

    def test_nested_noise_path(self):
        data = _sweep()
        data['problem']['noise'] = {'family': 'symmetric_alpha_stable', 'tail_index': 2.5}
        self.assertErrorAt(data, 'problem.noise.tail_index')

    def test_unknown_key_is_reported(self):
        self.assertErrorAt(_sweep(repz=100), 'repz')
        data = _sweep()
        data['problem']['dimension'] = 3
        self.assertErrorAt(data, 'problem.dimension')

    def test_sweep_fields_required(self):
        data = _sweep()
        del data['problem']
        self.assertErrorAt(data, 'problem')

    def test_rate_comparison_needs_two_algorithms(self):
        data = _sweep(kind='rate_comparison', algorithms=['nsgd_m'])
        self.assertErrorAt(data, 'algorithms')

    def test_duplicate_algorithms(self):
        self.assertErrorAt(_sweep(algorithms=['nsgd_m', 'nsgd_m']), 'algorithms')

    def test_gap_sweep_needs_a_noise_mean(self):
        data = _sweep(kind='gen_gap_sweep', sigma_p=1.0)
        data['problem']['noise'] = {'family': 'symmetric_alpha_stable', 'tail_index': 1.0}
        self.assertErrorAt(data, 'problem.noise.tail_index')

    def test_sigma_needed_without_pth_moment(self):
        data = _sweep(p=2.0)
        data['problem']['noise'] = {'family': 'symmetric_alpha_stable', 'tail_index': 1.8}
        self.assertErrorAt(data, 'sigma_p')
        data['sigma_p'] = 2.0
        parse_config(data)

    def test_x0_dimension(self):
        self.assertErrorAt(_sweep(x0=[1.0, 2.0]), 'x0')

    def test_logistic_pair_is_one_dimensional(self):
        self.assertErrorAt(_sweep(problem={'family': 'logistic_pair', 'dim': 2}), 'problem.dim')

    def test_c_only_for_quad(self):
        self.assertErrorAt(_sweep(problem={'family': 'logistic_pair', 'c': 1.0}), 'problem.c')

    def test_bad_name(self):
        self.assertErrorAt(_sweep(name='has spaces'), 'name')

    def test_non_mapping_root(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config(['not', 'a', 'mapping'])
        self.assertEqual(_paths(ctx.exception), ['<root>'])


class FlattenErrorsTests(SimpleTestCase):

    def test_nested_and_indexed(self):
        detail = {
            'problem': {'noise': {'tail_index': ['bad']}},
            'algorithms': {1: ['unknown']},
            'non_field_errors': ['root problem'],
        }
        self.assertEqual(
            sorted(flatten_errors(detail)),
            [('<root>', 'root problem'), ('algorithms.1', 'unknown'), ('problem.noise.tail_index', 'bad')],
        )


class LoadConfigTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def _write(self, text, name='config.yaml'):
        path = self.dir / name
        path.write_text(text, encoding='utf-8')
        return path

    def test_round_trip_from_yaml(self):
        path = self._write(yaml.safe_dump(_sweep(seed=5)))
        config = load_config(path)
        self.assertEqual(config.seed, 5)
        self.assertEqual(config.name, 'quad-test')

    def test_missing_file(self):
        with self.assertRaises(ConfigError) as ctx:
            load_config(self.dir / 'absent.yaml')
        self.assertIn('absent.yaml', ctx.exception.errors[0][0])

    def test_invalid_yaml_reports_line(self):
        path = self._write('name: x\nkind: [unclosed\n')
        with self.assertRaises(ConfigError) as ctx:
            load_config(path)
        self.assertTrue(ctx.exception.errors[0][0].startswith('line '))

    def test_hash_is_stable_and_sensitive(self):
        first = load_config(self._write(yaml.safe_dump(_sweep(seed=5)), 'a.yaml'))
        same = load_config(self._write(yaml.safe_dump(_sweep(seed=5)), 'b.yaml'))
        other = load_config(self._write(yaml.safe_dump(_sweep(seed=6)), 'c.yaml'))
        self.assertEqual(first.config_hash, same.config_hash)
        self.assertNotEqual(first.config_hash, other.config_hash)
        self.assertRegex(first.config_hash, r'^[0-9a-f]{64}$')

    def test_hash_includes_resolved_defaults(self):
        path = self._write(yaml.safe_dump(_sweep()))
        with override_settings(HTSTAB_DEFAULT_SEED=1):
            a = load_config(path)
        with override_settings(HTSTAB_DEFAULT_SEED=2):
            b = load_config(path)
        self.assertNotEqual(a.config_hash, b.config_hash)


class ExampleConfigTests(SimpleTestCase):

    def test_shipped_configs_validate(self):
        paths = sorted((Path(settings.BASE_DIR) / 'configs').glob('*.yaml'))
        self.assertGreaterEqual(len(paths), 5)
        kinds = {load_config(path).kind for path in paths}
        self.assertEqual(kinds, set(ExperimentKind))
