"""
Validation of Monte-Carlo verification configs.
"""
from django.conf import settings
from rest_framework import serializers

from apps.schemes.exceptions import SchemeError
from apps.schemes.models import SourceModel
from apps.schemes.utils import SURJECTION_FAMILIES

SURJECTION_PREFIXES = tuple(family.split(':')[0] for family in SURJECTION_FAMILIES)


def default_runs():
    return settings.GROUPSKETCH['DEFAULT_RUNS']


def default_operating_pfp():
    return settings.GROUPSKETCH['OPERATING_PFP']


class VerificationConfigSerializer(serializers.Serializer):
    """Config of run_verification, in sequence or vector mode."""
    mode = serializers.ChoiceField(choices=['sequence', 'vector'], default='sequence')
    n = serializers.IntegerField(min_value=1)
    m = serializers.IntegerField(min_value=1, required=False)
    alphabet_size = serializers.IntegerField(min_value=2, default=2)
    surjection = serializers.CharField(default='identity')

    # sequence mode
    p = serializers.FloatField(required=False)
    eta0 = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.0)
    eta1 = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.0)
    eta2 = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.0)

    # vector mode
    c = serializers.FloatField(min_value=-1.0, max_value=1.0, required=False)
    d = serializers.IntegerField(min_value=2, required=False)
    lambda_x = serializers.FloatField(default=0.0)
    lambda_q = serializers.FloatField(default=0.0)

    groups = serializers.IntegerField(min_value=1, default=10)
    positives_per_group = serializers.IntegerField(min_value=1, required=False)
    negatives_per_group = serializers.IntegerField(min_value=1, default=100)
    runs = serializers.IntegerField(min_value=1, default=default_runs)
    seed = serializers.IntegerField(min_value=0, default=0)
    operating_pfp = serializers.FloatField(min_value=0.0, max_value=1.0, default=default_operating_pfp)

    def validate_surjection(self, value):
        """Check the family name; arguments are checked against the type space later"""
        if value.split(':')[0] not in SURJECTION_PREFIXES:
            raise serializers.ValidationError(
                f"Unknown surjection '{value}'; expected one of {', '.join(SURJECTION_FAMILIES)}"
            )
        return value

    def validate(self, data):
        if data['mode'] == 'vector':
            missing = [key for key in ('c', 'd') if key not in data]
            if missing:
                raise serializers.ValidationError(f"Vector mode requires {', '.join(missing)}")
            if data['alphabet_size'] != 2:
                raise serializers.ValidationError("Vector mode embeds into a binary alphabet")
            # p = 1 - Phi(lambda_x) must stay <= 1/2
            if data['lambda_x'] < 0.0:
                raise serializers.ValidationError("Vector mode requires lambda_x >= 0")
            data.setdefault('m', 8 * data['d'])
        else:
            if 'p' not in data:
                raise serializers.ValidationError("Sequence mode requires p")
            if 'm' not in data:
                raise serializers.ValidationError("Sequence mode requires m")
            try:
                SourceModel(data['alphabet_size'], data['p'])
            except SchemeError as e:
                raise serializers.ValidationError(str(e))

        if data.get('positives_per_group', 0) > data['n']:
            raise serializers.ValidationError("positives_per_group cannot exceed n")
        if not 0.0 < data['operating_pfp'] < 1.0:
            raise serializers.ValidationError("operating_pfp must lie in (0, 1)")
        return data
