"""Python access to the haptic pattern engine and wire codec."""

import json

from ._core import (
    MAX_DATAGRAM,
    MAX_SAMPLES_PER_CHANNEL,
    PWM_MAX,
    TooLongError,
    ValidationError,
    WireError,
    decode,
    encode_ack,
    encode_hello,
    encode_pattern,
    encode_stop,
    render_segment,
)
from . import _core


def render(spec):
    """Render a PatternSpec (dict) into the preview structure."""
    return json.loads(_core.render_json(json.dumps(spec)))


def validate(spec):
    _core.validate_json(json.dumps(spec))


def builtin_presets():
    return json.loads(_core.builtin_presets_json())


__all__ = [
    "MAX_DATAGRAM",
    "MAX_SAMPLES_PER_CHANNEL",
    "PWM_MAX",
    "TooLongError",
    "ValidationError",
    "WireError",
    "builtin_presets",
    "decode",
    "encode_ack",
    "encode_hello",
    "encode_pattern",
    "encode_stop",
    "render",
    "render_segment",
    "validate",
]
