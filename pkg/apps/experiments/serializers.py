"""
Schemas for experiment config files and for the JSON report.

Config files are validated with the serializers below; their nested error
dicts are flattened to dotted paths (`problem.noise.tail_index`,
`algorithms.1`) by `flatten_errors`. Every report is checked against
`ReportSerializer` before it is written.
"""
import math
from collections.abc import Mapping

from rest_framework import serializers

from apps.core_math.errors import InvalidArgument
from apps.core_math.params import Algorithm, check_tail_exponent
from apps.noise.samplers import NoiseFamily, NoiseSpec, moment_exists
from apps.problems.families import ProblemFamily

from .kinds import POPULATION_KINDS, SWEEP_KINDS, ExperimentKind

SCHEMA_VERSION = '1'


def flatten_errors(detail, prefix=''):
    """[(dotted path, message)] from a DRF error structure."""
    flat = []
    if isinstance(detail, Mapping):
        for key, value in detail.items():
            if key == 'non_field_errors':
                path = prefix or '<root>'
            else:
                path = f'{prefix}.{key}' if prefix else str(key)
            flat.extend(flatten_errors(value, path))
    elif isinstance(detail, (list, tuple)):
        for index, item in enumerate(detail):
            if isinstance(item, (Mapping, list, tuple)):
                flat.extend(flatten_errors(item, f'{prefix}.{index}' if prefix else str(index)))
            else:
                flat.append((prefix or '<root>', str(item)))
    else:
        flat.append((prefix or '<root>', str(detail)))
    return flat


class StrictSerializer(serializers.Serializer):
    """Rejects keys the schema does not know, so typos are not silently ignored."""

    def to_internal_value(self, data):
        if isinstance(data, Mapping):
            unknown = sorted(str(key) for key in data if key not in self.fields)
            if unknown:
                raise serializers.ValidationError({key: ['Unknown field.'] for key in unknown})
        return super().to_internal_value(data)


class VectorField(serializers.Field):
    """A number (filled to the problem dimension) or a list of numbers."""

    default_error_messages = {
        'invalid': 'Expected a number or a non-empty list of numbers.',
        'non_finite': 'All components must be finite.',
    }

    @staticmethod
    def _is_number(value):
        return isinstance(value, (int, float)) and not isinstance(value, bool)

    def to_internal_value(self, data):
        if self._is_number(data):
            values = [float(data)]
        elif isinstance(data, list) and data and all(self._is_number(v) for v in data):
            values = [float(v) for v in data]
        else:
            self.fail('invalid')
        if not all(math.isfinite(v) for v in values):
            self.fail('non_finite')
        return values

    def to_representation(self, value):
        return [float(v) for v in value]


class NoiseSerializer(StrictSerializer):
    family = serializers.ChoiceField(choices=NoiseFamily.choices)
    tail_index = serializers.FloatField(default=2.0)
    scale = serializers.FloatField(default=1.0)

    def validate(self, attrs):
        try:
            NoiseSpec(attrs['family'], attrs['tail_index'], attrs['scale'])
        except InvalidArgument as exc:
            field = 'scale' if 'scale' in str(exc) else 'tail_index'
            raise serializers.ValidationError({field: [str(exc)]})
        return attrs


class ProblemSerializer(StrictSerializer):
    family = serializers.ChoiceField(choices=ProblemFamily.choices)
    dim = serializers.IntegerField(min_value=1, default=1)
    c = serializers.FloatField(required=False)
    noise = NoiseSerializer(required=False, allow_null=True)
    holdout_size = serializers.IntegerField(min_value=2, required=False)

    def validate(self, attrs):
        family = attrs['family']
        if family == ProblemFamily.LOGISTIC_PAIR:
            if attrs['dim'] != 1:
                raise serializers.ValidationError({'dim': ['logistic_pair is one-dimensional.']})
            if attrs.get('noise') is not None:
                raise serializers.ValidationError({'noise': ['logistic_pair has a fixed two-point law.']})
        if family != ProblemFamily.QUAD_PLUS_SINE and 'c' in attrs:
            raise serializers.ValidationError({'c': [f'c only applies to {ProblemFamily.QUAD_PLUS_SINE}.']})
        if family != ProblemFamily.ROBUST_REGRESSION and 'holdout_size' in attrs:
            raise serializers.ValidationError(
                {'holdout_size': [f'holdout_size only applies to {ProblemFamily.ROBUST_REGRESSION}.']}
            )
        return attrs


class RandomWalkSerializer(StrictSerializer):
    eta = serializers.FloatField(default=0.1)
    horizon = serializers.IntegerField(min_value=1, default=400)
    seeds = serializers.IntegerField(min_value=2, default=1000)
    every = serializers.IntegerField(min_value=1, default=50)

    def validate_eta(self, value):
        if not (math.isfinite(value) and value > 0):
            raise serializers.ValidationError('eta must be finite and > 0.')
        return value


class LemmaSuiteSerializer(StrictSerializer):
    instances = serializers.IntegerField(min_value=1, default=10_000)
    trials = serializers.IntegerField(min_value=100, default=100_000)


class ExperimentConfigSerializer(StrictSerializer):
    name = serializers.RegexField(r'^[A-Za-z0-9_.-]+$', max_length=64)
    kind = serializers.ChoiceField(choices=ExperimentKind.choices)
    seed = serializers.IntegerField(min_value=0, max_value=2 ** 64 - 1, required=False)
    problem = ProblemSerializer(required=False)
    algorithms = serializers.ListField(
        child=serializers.ChoiceField(choices=Algorithm.choices), required=False, allow_empty=False
    )
    n_grid = serializers.ListField(child=serializers.IntegerField(min_value=2), required=False, min_length=2)
    p = serializers.FloatField(default=2.0)
    sigma_p = serializers.FloatField(min_value=0.0, required=False, allow_null=True)
    schedule_scale = serializers.FloatField(required=False)
    reps = serializers.IntegerField(min_value=10, default=100)
    probe_count = serializers.IntegerField(min_value=1, required=False)
    resamples = serializers.IntegerField(min_value=100, required=False)
    x0 = VectorField(required=False)
    charts = serializers.BooleanField(default=True)
    random_walk = RandomWalkSerializer(required=False)
    lemmas = LemmaSuiteSerializer(required=False)

    def validate_p(self, value):
        try:
            return check_tail_exponent(value)
        except InvalidArgument as exc:
            raise serializers.ValidationError(str(exc))

    def validate_n_grid(self, value):
        if any(b <= a for a, b in zip(value, value[1:])):
            raise serializers.ValidationError('n_grid must be strictly increasing.')
        return value

    def validate_algorithms(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError('algorithms must not repeat.')
        return value

    def validate_schedule_scale(self, value):
        if not (math.isfinite(value) and value > 0):
            raise serializers.ValidationError('schedule_scale must be finite and > 0.')
        return value

    def validate(self, attrs):
        kind = attrs['kind']
        if kind not in SWEEP_KINDS:
            return attrs

        errors = {}
        for field in ('problem', 'algorithms', 'n_grid'):
            if field not in attrs:
                errors[field] = [f'This field is required for {kind}.']
        if kind == ExperimentKind.RATE_COMPARISON and len(attrs.get('algorithms', ())) < 2:
            errors.setdefault('algorithms', ['rate_comparison needs at least two algorithms.'])

        problem = attrs.get('problem')
        if problem is not None:
            x0 = attrs.get('x0')
            if x0 is not None and len(x0) not in (1, problem['dim']):
                errors['x0'] = [f'x0 needs 1 or {problem["dim"]} components, got {len(x0)}.']
            noise = problem.get('noise')
            if problem['family'] == ProblemFamily.QUAD_PLUS_SINE and noise is not None:
                spec = NoiseSpec(noise['family'], noise['tail_index'], noise['scale'])
                if kind in POPULATION_KINDS and not moment_exists(spec, 1.0):
                    errors['problem'] = {'noise': {'tail_index': [
                        f'{kind} needs a population gradient; this noise has no mean.'
                    ]}}
                if attrs.get('sigma_p') is None and not moment_exists(spec, attrs['p']):
                    errors['sigma_p'] = [
                        'the noise has no finite p-th moment to estimate; give sigma_p explicitly.'
                    ]
        if errors:
            raise serializers.ValidationError(errors)
        return attrs


class EstimateSerializer(serializers.Serializer):
    value = serializers.FloatField()
    stderr = serializers.FloatField(min_value=0.0)
    ci = serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2)
    count = serializers.IntegerField(min_value=1)


class CellSerializer(serializers.Serializer):
    algorithm = serializers.ChoiceField(choices=Algorithm.choices)
    n = serializers.IntegerField(min_value=2)
    status = serializers.ChoiceField(choices=['ok', 'failed'])
    error = serializers.CharField(allow_null=True, allow_blank=True)
    report = serializers.DictField(allow_null=True)

    def validate(self, attrs):
        if attrs['status'] == 'ok' and attrs['report'] is None:
            raise serializers.ValidationError({'report': ['an ok cell carries its report.']})
        report = attrs['report']
        if report is not None:
            estimate = EstimateSerializer(data=report.get('epsilon'))
            if not estimate.is_valid():
                raise serializers.ValidationError({'report': {'epsilon': estimate.errors}})
        return attrs


class RateFitSerializer(serializers.Serializer):
    algorithm = serializers.ChoiceField(choices=Algorithm.choices)
    metric = serializers.CharField()
    slope = serializers.FloatField()
    intercept = serializers.FloatField()
    r_squared = serializers.FloatField(min_value=0.0, max_value=1.0)
    slope_stderr = serializers.FloatField(min_value=0.0)
    predicted_slope = serializers.FloatField(max_value=0.0)
    points = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2),
        min_length=2,
    )


class ComparisonRowSerializer(serializers.Serializer):
    algorithm = serializers.ChoiceField(choices=Algorithm.choices)
    predicted_exponent = serializers.FloatField(max_value=0.0)
    predicted_rank = serializers.IntegerField(min_value=1)
    fitted_slope = serializers.FloatField(allow_null=True)
    slope_stderr = serializers.FloatField(allow_null=True)
    slope_ci = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    mean_metric = serializers.FloatField(allow_null=True)
    cells = serializers.IntegerField(min_value=0)


class ComparisonSerializer(serializers.Serializer):
    metric = serializers.CharField()
    p = serializers.FloatField()
    caveat = serializers.CharField()
    rows = ComparisonRowSerializer(many=True)


class LemmaCheckSerializer(serializers.Serializer):
    name = serializers.CharField()
    description = serializers.CharField()
    passed = serializers.BooleanField()
    instances = serializers.IntegerField(min_value=1)
    worst_margin = serializers.FloatField()
    detail = serializers.DictField(required=False)


class MetadataSerializer(serializers.Serializer):
    generated_at = serializers.DateTimeField()


class ReportSerializer(serializers.Serializer):
    schema_version = serializers.ChoiceField(choices=[SCHEMA_VERSION])
    name = serializers.CharField()
    kind = serializers.ChoiceField(choices=ExperimentKind.choices)
    config_hash = serializers.RegexField(r'^[0-9a-f]{64}$')
    config = serializers.DictField()
    environment = serializers.DictField(child=serializers.CharField())
    metadata = MetadataSerializer()
    cells = CellSerializer(many=True)
    fits = RateFitSerializer(many=True)
    comparison = ComparisonSerializer(allow_null=True)
    lemmas = LemmaCheckSerializer(many=True)
    random_walk = serializers.DictField(allow_null=True)
