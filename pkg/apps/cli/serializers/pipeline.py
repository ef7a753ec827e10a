# Libs
from rest_framework import serializers as srz

# Global
from common.serializers import Serializer
from constants import METHODS


class PipelineConfigSerializer(Serializer):
    """A decomposition pipeline input serializer."""

    input = srz.CharField(
        help_text="Path of the input series CSV.",
    )
    window = srz.IntegerField(
        help_text="Window length L.",
    )
    method = srz.ChoiceField(
        choices=METHODS,
        default="basic",
        help_text="Decomposition method.",
    )
    groups = srz.CharField(
        help_text='Basic SSA groups, e.g. "1,2;3,4".',
    )
    partition = srz.CharField(
        required=False,
        allow_null=True,
        help_text="Partition of the refined components (nested methods).",
    )
    epsilon = srz.FloatField(
        default=1e-5,
        help_text="Iterative O-SSA convergence tolerance.",
    )
    max_iter = srz.IntegerField(
        default=200,
        min_value=1,
        help_text="Iterative O-SSA iteration cap.",
    )
    kappa = srz.FloatField(
        required=False,
        allow_null=True,
        help_text="Sigma-correction separation factor (iossa).",
    )
    gamma = srz.FloatField(
        required=False,
        allow_null=True,
        help_text="Derivative weight (deriv).",
    )
    output = srz.CharField(
        default=".",
        help_text="Directory the artifacts are written to.",
    )
    heatmap = srz.BooleanField(
        default=False,
        help_text="Print the w-correlation heat map.",
    )
    frequencies = srz.BooleanField(
        default=False,
        help_text="Estimate a frequency per output group.",
    )

    def validate_epsilon(self, value: float) -> float:
        if not value > 0:
            raise srz.ValidationError("Must be positive.")
        return value

    def validate_kappa(self, value: float | None) -> float | None:
        if value is not None and not value > 1:
            raise srz.ValidationError("Must exceed 1.")
        return value

    def validate_gamma(self, value: float | None) -> float | None:
        if value is not None and not value > 0:
            raise srz.ValidationError("Must be positive.")
        return value

    def validate(self, attrs: dict) -> dict:
        method = attrs.get("method", "basic")
        if method == "deriv" and attrs.get("gamma") is None:
            raise srz.ValidationError({"gamma": "Required by the deriv method."})
        if method != "deriv" and attrs.get("gamma") is not None:
            raise srz.ValidationError({"gamma": "Only applies to the deriv method."})
        if method != "iossa" and attrs.get("kappa") is not None:
            raise srz.ValidationError({"kappa": "Only applies to the iossa method."})
        if method == "basic" and attrs.get("partition"):
            raise srz.ValidationError(
                {"partition": "Only applies to the nested methods."}
            )
        return attrs
