"""Scene and camera parameterization for turbulence synthesis.

All optical quantities are stored in SI units (meters, seconds). Config
files use milliseconds for exposure (key ``exposure_ms``) because that is
the natural unit at camera timescales; the loader converts.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

WAVE_SHAPES = ("spherical", "plane")
FIELD_REGIMES = ("far", "near")

# Validity window for exposure_time, seconds. Configurable per call in
# validate_config; these are the defaults.
EXPOSURE_WINDOW = (1e-4, 0.1)

#: spherical-wave constant used in the Fried parameter and the
#: short/long-exposure MTF exponents
WAVE_SHAPE_CONSTANTS = {"spherical": 3.0 / 8.0, "plane": 1.0}

#: high-frequency correction weight of the short-exposure MTF
FIELD_REGIME_MU = {"far": 0.5, "near": 1.0}


class ValidationError(ValueError):
    """Raised when an OpticalConfig (or derived input) violates its contract."""


@dataclass(frozen=True)
class OpticalConfig:
    """Physical description of one imaging scenario.

    Parameters
    ----------
    wavelength : float
        Center wavelength, meters.
    focal_length : float
        Lens focal length f, meters.
    f_number : float
        Aperture F-number; the aperture diameter is D = f / F#.
    distance : float
        Propagation distance L from scene to aperture, meters.
    cn2 : float
        Refractive-index structure parameter Cn^2, m^(-2/3).
    wind_speed : float
        Mean transverse wind speed, m/s.
    wind_direction : tuple(float, float)
        Unit vector (x, y) of the wind in image coordinates.
    height : float
        Altitude of the path, meters. Recorded for provenance only; it
        enters no computation here.
    exposure_time : float
        Sensor integration time tau, seconds.
    pixel_pitch : float
        Sensor pixel pitch, meters per pixel.
    frame_rate : float
        Frames per second; only used by video synthesis.
    wave_shape : str
        'spherical' or 'plane'; selects the wavefront constant a.
    field_regime : str
        'far' or 'near'; selects the short-exposure correction weight mu.
    """

    focal_length: float
    f_number: float
    distance: float
    cn2: float
    wind_speed: float
    exposure_time: float
    wavelength: float = 550e-9
    wind_direction: tuple[float, float] = (1.0, 0.0)
    height: float = 1.0
    pixel_pitch: float = 4e-6
    frame_rate: float = 30.0
    wave_shape: str = "spherical"
    field_regime: str = "far"

    @property
    def aperture(self) -> float:
        """Aperture diameter D = focal_length / f_number, meters."""
        return self.focal_length / self.f_number

    @property
    def exposure_ms(self) -> float:
        return self.exposure_time * 1e3

    @property
    def wave_shape_constant(self) -> float:
        return WAVE_SHAPE_CONSTANTS[self.wave_shape]

    @property
    def field_regime_mu(self) -> float:
        return FIELD_REGIME_MU[self.field_regime]

    def replace(self, **changes) -> "OpticalConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["wind_direction"] = list(self.wind_direction)
        return d


def validate_config(cfg: OpticalConfig,
                    exposure_window: tuple[float, float] = EXPOSURE_WINDOW) -> list[str]:
    """Check config invariants; returns a list of violations (empty = valid).

    Never raises for bad values: callers that need a hard failure use
    require_valid. Cross-checks cover the derived aperture, computability
    of the coherence diameter, and a sanity cap on the implied mean blur
    width (a kernel bank cannot realistically be built past ~128 px).
    """
    out = []
    for name in ("wavelength", "focal_length", "distance", "cn2",
                 "exposure_time", "pixel_pitch"):
        v = getattr(cfg, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            out.append(f"{name} must be a finite positive number, got {v!r}")
    if not (isinstance(cfg.f_number, (int, float)) and math.isfinite(cfg.f_number)
            and cfg.f_number > 0):
        out.append(f"f_number must be a finite positive number, got {cfg.f_number!r}")
    elif cfg.focal_length > 0 and cfg.aperture <= 0:
        out.append("derived aperture D = focal_length / f_number must be positive")
    if not (math.isfinite(cfg.wind_speed) and cfg.wind_speed >= 0):
        out.append(f"wind_speed must be finite and >= 0, got {cfg.wind_speed!r}")
    dx, dy = cfg.wind_direction
    norm = math.hypot(dx, dy)
    if abs(norm - 1.0) > 1e-9:
        out.append(f"wind_direction must be a unit vector (|v|={norm!r})")
    if not (math.isfinite(cfg.height) and cfg.height > 0):
        out.append(f"height must be finite and positive, got {cfg.height!r}")
    if not (math.isfinite(cfg.frame_rate) and cfg.frame_rate > 0):
        out.append(f"frame_rate must be finite and positive, got {cfg.frame_rate!r}")
    if cfg.wave_shape not in WAVE_SHAPES:
        out.append(f"wave_shape must be one of {WAVE_SHAPES}, got {cfg.wave_shape!r}")
    if cfg.field_regime not in FIELD_REGIMES:
        out.append(f"field_regime must be one of {FIELD_REGIMES}, got {cfg.field_regime!r}")
    lo, hi = exposure_window
    if isinstance(cfg.exposure_time, (int, float)) and math.isfinite(cfg.exposure_time):
        if not (lo <= cfg.exposure_time <= hi):
            out.append(
                f"exposure_time {cfg.exposure_time!r} s outside validity window "
                f"[{lo} s, {hi} s]")
    if out:
        return out

    # Cross-checks only run on structurally sound configs. The private
    # helpers skip validation; the public ones would recurse back here.
    from . import optics  # local import; optics depends on this module

    r0 = optics._fried(cfg)
    if not (math.isfinite(r0) and r0 > 0):
        out.append(f"Fried parameter not computable (r0={r0!r})")
        return out
    wbar_px = optics._mean_width_px(cfg)
    if not (math.isfinite(wbar_px) and 0 < wbar_px <= 128.0):
        out.append(
            f"mean blur width {wbar_px!r} px outside the bank-constructible "
            "range (0, 128]")
    return out


def require_valid(cfg: OpticalConfig,
                  exposure_window: tuple[float, float] = EXPOSURE_WINDOW) -> OpticalConfig:
    violations = validate_config(cfg, exposure_window)
    if violations:
        raise ValidationError("; ".join(violations))
    return cfg


def config_from_dict(raw: dict) -> OpticalConfig:
    """Build and validate an OpticalConfig from a decoded config mapping.

    Keys match OpticalConfig field names except that exposure is given in
    milliseconds under ``exposure_ms``. Unknown keys are rejected so typos
    fail loudly.
    """
    raw = dict(raw)
    if "exposure_ms" in raw:
        if "exposure_time" in raw:
            raise ValidationError("give exposure_ms or exposure_time, not both")
        raw["exposure_time"] = float(raw.pop("exposure_ms")) * 1e-3
    if "exposure_time" not in raw:
        raise ValidationError("config requires exposure_ms")
    known = {f.name for f in dataclasses.fields(OpticalConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    missing = [k for k in ("focal_length", "f_number", "distance", "cn2",
                           "wind_speed") if k not in raw]
    if missing:
        raise ValidationError(f"missing config keys: {missing}")
    if "wind_direction" in raw:
        raw["wind_direction"] = tuple(float(c) for c in raw["wind_direction"])
    return require_valid(OpticalConfig(**raw))


def load_config(path) -> OpticalConfig:
    """Read a JSON config file (see config_from_dict for the schema)."""
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))
