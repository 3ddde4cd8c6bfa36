"""Correlated random fields: per-pixel blur width and tilt displacement.

Both degradation fields are built from the same primitive: unit-variance
Gaussian white noise smoothed by an isotropic Gaussian kernel in the
frequency domain, then re-standardized to exactly zero mean and unit
standard deviation. The blur-width field is an affine map of one such
realization; the tilt field is a pair of them (one per displacement
axis) scaled by the tilt standard deviation.

Time evolution uses the frozen-flow approximation: a single oversized
realization is generated once and the camera's view drifts across it at
the wind velocity projected into sensor coordinates. Samples separated
by t seconds are views of the same frozen field offset by
f * v * t / (L * pitch) pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import optics
from .config import OpticalConfig, ValidationError
from .rng import AXIS_X, AXIS_Y, derive_seed, make_generator


@dataclass(frozen=True)
class RandomFieldSpec:
    """Shape, correlation length (pixels), and seed of one realization."""
    width: int
    height: int
    correlation_length: float
    seed: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValidationError(f"field shape must be positive, got "
                                  f"{self.width}x{self.height}")
        if not (self.correlation_length >= 0
                and math.isfinite(self.correlation_length)):
            raise ValidationError("correlation_length must be finite and >= 0, "
                                  f"got {self.correlation_length!r}")

    def replace(self, **changes) -> "RandomFieldSpec":
        from dataclasses import replace as _replace
        return _replace(self, **changes)


def gaussian_random_field(spec: RandomFieldSpec) -> np.ndarray:
    """Smooth standardized Gaussian field, shape (height, width).

    White noise is filtered with a Gaussian of standard deviation
    ``correlation_length`` pixels (applied spectrally, so the kernel is
    effectively unbounded and periodic) and the result re-standardized,
    so mean and std are exactly 0 and 1 regardless of the variance the
    smoothing removed. correlation_length=0 is plain white noise.

    Deterministic in spec: same spec, same field, bit for bit.
    """
    rng = make_generator(spec.seed)
    noise = rng.standard_normal((spec.height, spec.width))
    if spec.correlation_length > 0:
        fx = np.fft.fftfreq(spec.width)
        fy = np.fft.fftfreq(spec.height)
        # Fourier transform of a unit-integral Gaussian of std sigma:
        # exp(-2 pi^2 sigma^2 f^2) per axis.
        s2 = 2.0 * math.pi ** 2 * spec.correlation_length ** 2
        hx = np.exp(-s2 * fx ** 2)
        hy = np.exp(-s2 * fy ** 2)
        spec_noise = scipy.fft.fft2(noise) * hy[:, None] * hx[None, :]
        noise = scipy.fft.ifft2(spec_noise).real
    std = noise.std()
    if std == 0.0:
        raise ValidationError(
            "degenerate field realization (zero variance); the field is too "
            "small for the requested correlation length")
    return (noise - noise.mean()) / std


@dataclass(frozen=True)
class BlurWidthField:
    """Per-pixel blur width map W (pixels) plus its generation targets.

    W = max(epsilon, mean + std * R) for a standardized realization R;
    the clamp keeps widths physical, so the realized mean/std can sit
    slightly off target when the clamp engages (preclamp_* record the
    unclamped affine values, which hit the targets exactly up to the
    standardization of R).
    """
    grid: np.ndarray
    mean_target: float
    std_target: float
    epsilon: float
    preclamp_mean: float
    preclamp_std: float


def blur_width_field(cfg: OpticalConfig, spec: RandomFieldSpec,
                     epsilon: float = 0.1) -> BlurWidthField:
    """Spatially varying blur-width field at the config's exposure.

    Mean and std (pixels) come from the exposure-dependent moment
    formulas; the spatial correlation comes from spec.
    """
    r = gaussian_random_field(spec)
    return blur_width_field_from_noise(cfg, r, epsilon)


def blur_width_field_from_noise(cfg: OpticalConfig, r: np.ndarray,
                                epsilon: float = 0.1) -> BlurWidthField:
    """Affine map of an existing standardized realization onto widths.

    Split out from blur_width_field so a frozen-flow view (which is a
    crop of a larger standardized field, not itself exactly standardized)
    can be mapped and clamped after cropping.
    """
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise ValidationError(f"epsilon must be positive, got {epsilon!r}")
    mean = optics.mean_blur_width(cfg).px
    std = optics.std_blur_width(cfg).px
    w = mean + std * np.asarray(r, dtype=np.float64)
    return BlurWidthField(grid=np.maximum(w, epsilon), mean_target=mean,
                          std_target=std, epsilon=epsilon,
                          preclamp_mean=float(w.mean()),
                          preclamp_std=float(w.std()))


@dataclass(frozen=True)
class TiltField:
    """Per-pixel displacement (dx, dy), pixels, for geometric warping."""
    dx: np.ndarray
    dy: np.ndarray
    sigma_tilt: float
    correlation_length: float

    def __post_init__(self):
        if self.dx.shape != self.dy.shape:
            raise ValidationError("tilt components must share a shape, got "
                                  f"{self.dx.shape} vs {self.dy.shape}")

    @classmethod
    def from_arrays(cls, dx, dy, sigma_tilt=0.0, correlation_length=0.0):
        return cls(dx=np.asarray(dx, dtype=np.float64),
                   dy=np.asarray(dy, dtype=np.float64),
                   sigma_tilt=float(sigma_tilt),
                   correlation_length=float(correlation_length))


def tilt_field(sigma_tilt: float, spec: RandomFieldSpec) -> TiltField:
    """Random tilt displacement field with independent x and y components.

    Each component is sigma_tilt times a standardized smooth realization;
    the two axes use child seeds split from spec.seed so they are
    independent yet jointly reproducible. sigma_tilt=0 yields exact
    zeros (an identity warp).
    """
    if sigma_tilt < 0 or not math.isfinite(sigma_tilt):
        raise ValidationError(f"sigma_tilt must be >= 0, got {sigma_tilt!r}")
    if sigma_tilt == 0.0:
        zeros = np.zeros((spec.height, spec.width))
        return TiltField(dx=zeros, dy=zeros.copy(), sigma_tilt=0.0,
                         correlation_length=spec.correlation_length)
    dx = sigma_tilt * gaussian_random_field(
        spec.replace(seed=derive_seed(spec.seed, AXIS_X)))
    dy = sigma_tilt * gaussian_random_field(
        spec.replace(seed=derive_seed(spec.seed, AXIS_Y)))
    return TiltField(dx=dx, dy=dy, sigma_tilt=sigma_tilt,
                     correlation_length=spec.correlation_length)


def default_tilt_sigma(cfg: OpticalConfig) -> float:
    """Physically derived tilt standard deviation, pixels.

    The angular variance of the turbulence-induced image motion for an
    aperture-D system is 0.182 (lam/D)^2 (D/r0)^(5/3); the square root,
    projected to the sensor, gives the per-axis displacement scale.
    """
    r0 = optics.fried_parameter(cfg)
    D = cfg.aperture
    var = 0.182 * (cfg.wavelength / D) ** 2 * (D / r0) ** (5.0 / 3.0)
    return math.sqrt(var) * cfg.focal_length / cfg.pixel_pitch


def default_tilt_correlation_length(cfg: OpticalConfig) -> float:
    """Tilt decorrelates over roughly one coherence diameter at the
    scene: r0 at distance L subtends f*r0/L meters on the sensor."""
    r0 = optics.fried_parameter(cfg)
    return cfg.focal_length * r0 / (cfg.distance * cfg.pixel_pitch)


# ---------------------------------------------------------------------------
# Frozen flow

def wind_shift_px(cfg: OpticalConfig, t: float) -> tuple[float, float]:
    """Sensor-plane drift (shift_x, shift_y) in pixels after t seconds.

    A structure advecting at v meters/second at distance L subtends
    v*t/L radians, i.e. f*v*t/(L*pitch) pixels along the wind direction.
    """
    mag = cfg.focal_length * cfg.wind_speed * t / (cfg.distance * cfg.pixel_pitch)
    return (mag * cfg.wind_direction[0], mag * cfg.wind_direction[1])


def extend_for_wind(spec: RandomFieldSpec, cfg: OpticalConfig,
                    n_frames: int) -> RandomFieldSpec:
    """Grow a field spec so n_frames of frozen-flow views at the config's
    frame rate fit inside one realization.

    The total drift over (n_frames - 1)/frame_rate seconds is resolved
    per axis; each axis grows by the ceiling of its |drift| component.
    A one-frame request never grows the field.
    """
    if n_frames < 1:
        raise ValidationError(f"n_frames must be >= 1, got {n_frames}")
    t_total = (n_frames - 1) / cfg.frame_rate
    sx, sy = wind_shift_px(cfg, t_total)
    # tiny negative slack so an exactly integer drift does not round up
    ext_x = int(math.ceil(abs(sx) - 1e-9))
    ext_y = int(math.ceil(abs(sy) - 1e-9))
    return spec.replace(width=spec.width + ext_x, height=spec.height + ext_y)


def frozen_flow_view(field: np.ndarray, cfg: OpticalConfig, t: float,
                     out_shape: tuple[int, int]) -> np.ndarray:
    """View of a frozen field as seen t seconds after its first frame.

    The camera window starts at the corner of the field that the wind
    will carry content away from and slides with the drift; the window
    must stay inside the field (use extend_for_wind when generating).
    Integer drifts are exact array slices; fractional drifts are
    bilinearly interpolated, so a view at t and a view at t + 1/rate
    agree exactly on their overlap whenever the per-frame drift is an
    integer number of pixels.
    """
    out_h, out_w = out_shape
    fh, fw = field.shape
    sx, sy = wind_shift_px(cfg, t)
    # Base the window on the far side for a negative drift component so
    # motion in either direction has room to run.
    x0 = sx if cfg.wind_direction[0] >= 0 else (fw - out_w) + sx
    y0 = sy if cfg.wind_direction[1] >= 0 else (fh - out_h) + sy
    if x0 < -1e-9 or y0 < -1e-9 or x0 > fw - out_w + 1e-9 or y0 > fh - out_h + 1e-9:
        raise ValidationError(
            f"frozen-flow view at t={t} needs offsets ({x0:.3f}, {y0:.3f}) "
            f"outside a {fw}x{fh} field with a {out_w}x{out_h} window; "
            "extend the field for the full frame span")
    xi, yi = round(x0), round(y0)
    if abs(x0 - xi) <= 1e-9 and abs(y0 - yi) <= 1e-9:
        return field[yi:yi + out_h, xi:xi + out_w].copy()
    yy = y0 + np.arange(out_h)[:, None]
    xx = x0 + np.arange(out_w)[None, :]
    return bilinear_sample(field, yy, xx)


def bilinear_sample(data: np.ndarray, yy, xx) -> np.ndarray:
    """Bilinear interpolation of data at (yy, xx), coordinates clamped to
    the valid interior (replicate border)."""
    h, w = data.shape[:2]
    yy = np.clip(yy, 0.0, h - 1.0)
    xx = np.clip(xx, 0.0, w - 1.0)
    y0 = np.clip(np.floor(yy).astype(np.intp), 0, h - 2) if h > 1 else np.zeros_like(yy, dtype=np.intp)
    x0 = np.clip(np.floor(xx).astype(np.intp), 0, w - 2) if w > 1 else np.zeros_like(xx, dtype=np.intp)
    fy = yy - y0
    fx = xx - x0
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    if data.ndim == 3:
        fy = fy[..., None]
        fx = fx[..., None]
    top = data[y0, x0] * (1 - fx) + data[y0, x1] * fx
    bot = data[y1, x0] * (1 - fx) + data[y1, x1] * fx
    return top * (1 - fy) + bot * fy
