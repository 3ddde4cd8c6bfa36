"""Randomized optical-config sampling from a table of capture regimes.

The built-in table spans twelve rows of imaging scenarios, ordered
roughly by distance: each row fixes a distance range, focal-length
range, F-number set, turbulence-strength range, camera-height set, wind
range, and exposure range. Sampling a config picks a row (or takes one
by index) and draws each parameter independently, so datasets cover the
whole operating envelope instead of clustering around one camera.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .config import OpticalConfig, ValidationError, require_valid, validate_config
from .rng import STREAM_CONFIG, make_generator

__all__ = ["ConfigRow", "builtin_table", "sample_config", "parse_override",
           "apply_overrides", "validate_config"]


@dataclass(frozen=True)
class ConfigRow:
    """One sampling regime. Ranges are closed intervals drawn uniformly;
    tuples are finite sets drawn uniformly. cn2 is in units of 1e-14 and
    exposure in milliseconds, matching how regimes are usually quoted."""
    distance_range: tuple[float, float]
    focal_range: tuple[float, float]
    f_numbers: tuple[float, ...]
    cn2_range_1e14: tuple[float, float]
    heights: tuple[float, ...]
    wind_range: tuple[float, float]
    exposure_range_ms: tuple[float, float]


_TABLE = (
    ConfigRow((30, 100), (0.1, 0.3), (2.8, 4), (50, 300), (4, 50), (1, 3), (0.5, 8)),
    ConfigRow((30, 100), (0.1, 0.3), (2.8, 4, 5.6), (200, 500), (100, 200), (3, 5), (0.5, 8)),
    ConfigRow((100, 200), (0.2, 0.5), (2.8, 4, 5.6), (5, 50), (200, 400), (1, 4), (1, 20)),
    ConfigRow((100, 200), (0.2, 0.5), (2.8, 4, 5.6, 8), (20, 100), (4, 50), (2, 6), (0.5, 10)),
    ConfigRow((200, 400), (0.3, 0.5), (2.8, 4, 5.6, 8), (2, 30), (50, 100), (2, 5), (1, 20)),
    ConfigRow((200, 400), (0.3, 0.5), (4, 5.6, 8, 11), (10, 40), (10, 50), (3, 6), (1, 20)),
    ConfigRow((400, 600), (0.4, 0.75), (4, 5.6, 8, 11), (1, 20), (50, 150), (3, 5), (2, 40)),
    ConfigRow((400, 600), (0.4, 0.75), (5.6, 8, 11, 16), (10, 30), (10, 100), (4, 7), (1, 20)),
    ConfigRow((600, 800), (0.6, 0.8), (5.6, 8, 11, 16), (1, 15), (100, 300), (3, 7), (2, 40)),
    ConfigRow((600, 800), (0.6, 0.8), (8, 11, 16, 18), (2, 20), (50, 200), (4, 8), (2, 40)),
    ConfigRow((800, 1000), (0.8, 1.0), (8, 11, 16, 18), (0.5, 10), (10, 100), (5, 9), (2, 40)),
    ConfigRow((800, 1000), (0.8, 1.0), (11, 16, 18, 24), (1, 20), (4, 50), (6, 10), (1, 20)),
)


def builtin_table() -> tuple[ConfigRow, ...]:
    """The built-in capture-regime table (immutable, 12 rows)."""
    return _TABLE


def sample_config(seed: int, row_index: int | None = None,
                  overrides: dict | None = None) -> tuple[OpticalConfig, int]:
    """Draw a validated config from the table.

    The draw order is fixed (row if unspecified, then distance, focal
    length, F-number, Cn2, height, wind speed, wind angle, exposure) so
    a seed fully determines the config. The wind direction is a uniform
    angle on the unit circle. Overrides are applied after sampling and
    the result re-validated; returns (config, row_index).
    """
    table = builtin_table()
    rng = make_generator(seed, STREAM_CONFIG)
    if row_index is None:
        row_index = int(rng.integers(len(table)))
    if not 0 <= row_index < len(table):
        raise ValidationError(
            f"row_index must be in [0, {len(table) - 1}], got {row_index}")
    row = table[row_index]
    distance = rng.uniform(*row.distance_range)
    focal = rng.uniform(*row.focal_range)
    f_number = row.f_numbers[rng.integers(len(row.f_numbers))]
    cn2 = rng.uniform(*row.cn2_range_1e14) * 1e-14
    height = row.heights[rng.integers(len(row.heights))]
    wind_speed = rng.uniform(*row.wind_range)
    angle = rng.uniform(0.0, 2.0 * math.pi)
    direction = (math.cos(angle), math.sin(angle))
    exposure_ms = rng.uniform(*row.exposure_range_ms)
    cfg = OpticalConfig(focal_length=focal, f_number=f_number,
                        distance=distance, cn2=cn2, wind_speed=wind_speed,
                        exposure_time=exposure_ms * 1e-3,
                        wind_direction=direction, height=height)
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return require_valid(cfg), row_index


_FLOAT_FIELDS = {"focal_length", "f_number", "distance", "cn2", "wind_speed",
                 "exposure_time", "wavelength", "height", "pixel_pitch",
                 "frame_rate"}


def apply_overrides(cfg: OpticalConfig, overrides: dict) -> OpticalConfig:
    """Replace config fields by name. exposure_ms is accepted as a
    convenience alias for exposure_time (milliseconds to seconds)."""
    changes = {}
    for key, value in overrides.items():
        if key == "exposure_ms":
            key, value = "exposure_time", float(value) * 1e-3
        if key in _FLOAT_FIELDS:
            value = float(value)
        elif key == "wind_direction":
            value = tuple(float(v) for v in value)
        elif key not in ("wave_shape", "field_regime"):
            raise ValidationError(f"unknown config field {key!r}")
        changes[key] = value
    return cfg.replace(**changes)


def parse_override(text: str) -> tuple[str, object]:
    """Parse a key=value override string. The value is read as JSON when
    possible (numbers, lists), otherwise kept as a string; a bare
    comma-separated pair becomes a tuple (for wind_direction)."""
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ValidationError(f"override must look like key=value, got {text!r}")
    raw = raw.strip()
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        if "," in raw:
            value = tuple(float(v) for v in raw.split(","))
        else:
            value = raw
    return key.strip(), value
