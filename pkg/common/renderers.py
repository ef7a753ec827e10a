# Core
import json
import math

# Libs
from rest_framework.renderers import JSONRenderer
from rest_framework.utils.encoders import JSONEncoder

# Global
from common.functions import format_float


def float_literal(value: float) -> str:
    """Return the JSON literal of a float with the artifact precision."""
    literal = format_float(value)
    if literal.lstrip("-").isdigit():
        literal += ".0"
    return literal


class ArtifactJSONEncoder(JSONEncoder):
    """DRF encoder writing floats with 17 significant digits."""

    def iterencode(self, o, _one_shot=False):
        markers = {} if self.check_circular else None
        encode_string = (
            json.encoder.encode_basestring_ascii
            if self.ensure_ascii
            else json.encoder.encode_basestring
        )

        def floatstr(value):
            if math.isfinite(value):
                return float_literal(value)
            if not self.allow_nan:
                raise ValueError(f"Float {value!r} is not JSON compliant.")
            if math.isnan(value):
                return "NaN"
            return "Infinity" if value > 0 else "-Infinity"

        return json.encoder._make_iterencode(
            markers,
            self.default,
            encode_string,
            self.indent,
            floatstr,
            self.key_separator,
            self.item_separator,
            self.sort_keys,
            self.skipkeys,
            _one_shot,
        )(o, 0)


class ArtifactJSONRenderer(JSONRenderer):
    encoder_class = ArtifactJSONEncoder
