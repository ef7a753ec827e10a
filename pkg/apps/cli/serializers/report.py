# Libs
from rest_framework import serializers as srz

# Global
from common.serializers import FloatListField, FloatMatrixField, Serializer


class DiagnosticsInfoSerializer(Serializer):
    """A pipeline diagnostics output serializer."""

    wcor_before = FloatMatrixField(
        allow_null=True,
        help_text="w-correlations of the Basic SSA groups.",
    )
    wcor_after = FloatMatrixField(
        help_text="w-correlations of the output components.",
    )
    lr_wcor = FloatMatrixField(
        allow_null=True,
        help_text="(L,R) w-correlations of the refined groups.",
    )
    tau_before = FloatListField(
        allow_null=True,
        help_text="Rank-closeness τ of the Basic SSA groups.",
    )
    tau = FloatListField(
        help_text="Rank-closeness τ of the output components.",
    )
    iterations = srz.IntegerField(
        allow_null=True,
        help_text="Iterations run by Iterative O-SSA.",
    )
    converged = srz.BooleanField(
        allow_null=True,
        help_text="Did Iterative O-SSA meet its tolerance?",
    )
    history = FloatListField(
        allow_null=True,
        help_text="Convergence measure per iteration.",
    )
    frequencies = srz.ListField(
        child=srz.FloatField(allow_null=True),
        allow_null=True,
        help_text="LS-ESPRIT frequency per output group.",
    )


class SummaryInfoSerializer(Serializer):
    """A decomposition summary output serializer."""

    schema_version = srz.IntegerField()
    method = srz.CharField()
    params = srz.DictField(
        help_text="Pipeline parameters the run used.",
    )
    diagnostics = DiagnosticsInfoSerializer()


class ExpectationInfoSerializer(Serializer):
    """An expected value output serializer."""

    value = srz.FloatField()
    mode = srz.CharField()
    tolerance = srz.FloatField()


class CheckInfoSerializer(Serializer):
    """A scenario check output serializer."""

    metric = srz.CharField()
    computed = srz.FloatField(allow_null=True)
    expected = ExpectationInfoSerializer()
    passed = srz.BooleanField()


class ScenarioReportSerializer(Serializer):
    """A scenario report output serializer."""

    schema_version = srz.IntegerField()
    scenario = srz.CharField(source="scenario.name")
    description = srz.CharField(source="scenario.description")
    method = srz.CharField(source="scenario.method")
    params = srz.DictField()
    metrics = srz.DictField(child=srz.FloatField())
    checks = CheckInfoSerializer(many=True)
    passed = srz.BooleanField()


class ScenarioInfoSerializer(Serializer):
    """A registry entry output serializer."""

    name = srz.CharField()
    description = srz.CharField()
    method = srz.CharField()
    groups = srz.CharField()
    partition = srz.CharField(allow_null=True)
    params = srz.DictField()
    expected = srz.DictField(child=ExpectationInfoSerializer())
