"""
Config validation of the experiment commands.
"""
import numpy as np
from rest_framework import serializers

from apps.embedding.search import GRID_FAMILIES
from apps.membership.serializers import SURJECTION_PREFIXES, VerificationConfigSerializer, default_runs
from apps.schemes.channel import symmetric_channel
from apps.schemes.exceptions import SchemeError
from apps.schemes.models import SourceModel
from apps.schemes.utils import SURJECTION_FAMILIES

# Correlation presets, ordered from the easiest dataset to the hardest
PRESETS = {
    'easy': {'c': 0.83, 'd': 128},
    'medium': {'c': 0.78, 'd': 256},
    'hard': {'c': 0.68, 'd': 512},
}

# Surjections defined for any alphabet size
NON_BINARY_PREFIXES = ('identity', 'greedy', 'file')


def _check_surjection(value):
    if value.split(':')[0] not in SURJECTION_PREFIXES:
        raise serializers.ValidationError(
            f"Unknown surjection '{value}'; expected one of {', '.join(SURJECTION_FAMILIES)}"
        )
    return value


def _check_increasing(values, name):
    if any(a >= b for a, b in zip(values, values[1:])):
        raise serializers.ValidationError(f"{name} must be strictly increasing")


class SchemeFieldsMixin(serializers.Serializer):
    n = serializers.IntegerField(min_value=1, default=16)
    eta0 = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.0)
    eta1 = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.0)


def _check_source(alphabet_size, p):
    try:
        SourceModel(alphabet_size, p)
    except SchemeError as e:
        raise serializers.ValidationError(str(e))


def _check_channel(data):
    try:
        symmetric_channel(data['alphabet_size'], data['eta0'], data['eta1'], data['eta2'])
    except SchemeError as e:
        raise serializers.ValidationError(str(e))


class TradeoffConfigSerializer(SchemeFieldsMixin):
    """
    ``alpha`` spells the grid as p = alpha/n and fills ``p``. Without either,
    the grid is 50 points up to the uniform source p = 1/|X|.
    """
    alphabet_size = serializers.IntegerField(min_value=2, default=2)
    eta2 = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.0)
    p = serializers.ListField(child=serializers.FloatField(), allow_empty=False, required=False)
    alpha = serializers.ListField(child=serializers.FloatField(), allow_empty=False, required=False)
    surjections = serializers.ListField(
        child=serializers.CharField(validators=[_check_surjection]),
        allow_empty=False,
        required=False,
    )
    with_optimum = serializers.BooleanField(default=False)

    def validate_p(self, value):
        _check_increasing(value, 'p')
        return value

    def validate_alpha(self, value):
        if any(alpha <= 0.0 for alpha in value):
            raise serializers.ValidationError("alpha must be positive")
        _check_increasing(value, 'alpha')
        return value

    def validate(self, data):
        n, alphabet_size = data['n'], data['alphabet_size']
        binary = alphabet_size == 2

        if 'alpha' in data:
            derived = [alpha / n for alpha in data['alpha']]
            if 'p' in data and data['p'] != derived:
                raise serializers.ValidationError("give either p or alpha, not both")
            data['p'] = derived
        elif 'p' not in data:
            upper = 1.0 / alphabet_size
            data['p'] = np.minimum(np.round(np.linspace(upper / 50, upper, 50), 6), upper).tolist()
        for p in data['p']:
            _check_source(alphabet_size, p)

        if 'surjections' not in data:
            data['surjections'] = ['identity', 'all1', 'majority'] if binary else ['identity']
        if not binary:
            binary_only = [s for s in data['surjections'] if s.split(':')[0] not in NON_BINARY_PREFIXES]
            if binary_only:
                raise serializers.ValidationError(
                    f"{', '.join(binary_only)} need a binary alphabet; use identity, greedy:<k> or file:<path>"
                )
            if data['with_optimum']:
                raise serializers.ValidationError("optimum rows are defined for binary sources")
        _check_channel(data)
        return data


class CorrelationSweepConfigSerializer(serializers.Serializer):
    d = serializers.IntegerField(min_value=2, default=256)
    n = serializers.IntegerField(min_value=1, default=15)
    c = serializers.ListField(
        child=serializers.FloatField(min_value=-1.0, max_value=1.0),
        allow_empty=False,
        default=lambda: [0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95, 0.99, 0.999],
    )
    families = serializers.ListField(
        child=serializers.ChoiceField(choices=GRID_FAMILIES),
        allow_empty=False,
        default=lambda: list(GRID_FAMILIES),
    )
    bound = serializers.FloatField(min_value=0.0, default=2.0)
    step = serializers.FloatField(min_value=0.0, default=0.1)

    def validate(self, data):
        if data['step'] <= 0.0:
            raise serializers.ValidationError("step must be positive")
        _check_increasing(data['c'], 'c')
        return data


class SimulateConfigSerializer(VerificationConfigSerializer):
    """Verification config, optionally filled from a correlation preset."""
    preset = serializers.ChoiceField(choices=list(PRESETS), required=False)
    n = serializers.IntegerField(min_value=1, default=16)

    def validate(self, data):
        if 'preset' in data:
            data['mode'] = 'vector'
            for key, value in PRESETS[data['preset']].items():
                data.setdefault(key, value)
        return super().validate(data)


class ReduceConfigSerializer(SchemeFieldsMixin):
    """Length reduction against surjection coarsening at matched budgets m C."""
    p = serializers.FloatField(min_value=0.0, max_value=0.5, default=0.5)
    eta0 = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.1)
    eta1 = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.1)
    m = serializers.IntegerField(min_value=1, default=256)
    lengths = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False)
    targets = serializers.ListField(
        child=serializers.IntegerField(min_value=2),
        allow_empty=False,
        default=lambda: [3, 4, 8],
    )
    groups = serializers.IntegerField(min_value=1, default=10)
    negatives_per_group = serializers.IntegerField(min_value=1, default=100)
    runs = serializers.IntegerField(min_value=1, default=default_runs)
    seed = serializers.IntegerField(min_value=0, default=0)

    def validate_p(self, value):
        _check_source(2, value)
        return value

    def validate(self, data):
        if 'lengths' not in data:
            data['lengths'] = [max(1, data['m'] * k // 4) for k in (1, 2, 3, 4)]
        data['lengths'] = sorted(set(data['lengths']))
        if data['lengths'][-1] > data['m']:
            raise serializers.ValidationError("lengths cannot exceed the base length m")
        type_count = data['n'] + 1
        if any(target > type_count for target in data['targets']):
            raise serializers.ValidationError(f"targets cannot exceed the {type_count} types of n={data['n']}")
        data['targets'] = sorted(set(data['targets']), reverse=True)
        return data


class BloomCompareConfigSerializer(serializers.Serializer):
    n = serializers.ListField(
        child=serializers.IntegerField(min_value=1),
        allow_empty=False,
        default=lambda: [16, 64, 256],
    )
    epsilon = serializers.ListField(
        child=serializers.FloatField(),
        allow_empty=False,
        default=lambda: [0.1, 0.05, 0.01, 0.001],
    )
    probes = serializers.IntegerField(min_value=0, default=10_000)
    seed = serializers.IntegerField(min_value=0, default=0)

    def validate_epsilon(self, value):
        if any(not 0.0 < eps <= 1.0 for eps in value):
            raise serializers.ValidationError("epsilon must lie in (0, 1]")
        return value


class OptimizeSurjectionConfigSerializer(SchemeFieldsMixin):
    alphabet_size = serializers.IntegerField(min_value=2, default=2)
    p = serializers.FloatField(default=0.5)
    eta2 = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.0)
    start = serializers.CharField(default='identity', validators=[_check_surjection])
    targets = serializers.ListField(
        child=serializers.IntegerField(min_value=2),
        allow_empty=False,
        default=lambda: [3, 4, 8],
    )
    epsilon = serializers.FloatField(default=0.05)
    gradient = serializers.BooleanField(default=False)

    def validate(self, data):
        try:
            SourceModel(data['alphabet_size'], data['p'])
        except SchemeError as e:
            raise serializers.ValidationError(str(e))
        if not 0.0 < data['epsilon'] < 1.0:
            raise serializers.ValidationError("epsilon must lie in (0, 1)")
        if data['gradient'] and data['alphabet_size'] != 2:
            raise serializers.ValidationError("the surjection gradient is defined for binary schemes")
        data['targets'] = sorted(set(data['targets']), reverse=True)
        return data
