"""Image and video degradation: tilt warp, spatially varying blur, noise.

A degraded frame is blur(warp(clean)) plus optional exposure noise. The
warp applies a per-pixel displacement field; the blur applies, at each
pixel, a PSF whose width is read from a per-pixel width field. The
spatially varying blur is made tractable with a bank of K PSFs at
log-spaced widths: the image is convolved once per bank kernel (FFT,
replicate padding) and each output pixel linearly blends the two
convolutions bracketing its local width, with blend weights linear in
log-width to match the bank spacing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import fields, optics
from .config import OpticalConfig, ValidationError
from .fields import BlurWidthField, RandomFieldSpec, TiltField
from .rng import (STREAM_FIELD_BLUR, STREAM_NOISE, STREAM_TILT, derive_seed,
                  make_generator)

log = logging.getLogger(__name__)


def _as_image(img) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim not in (2, 3):
        raise ValidationError(f"image must be 2-D or HxWxC, got shape {img.shape}")
    return img


def warp(img: np.ndarray, tilt: TiltField) -> np.ndarray:
    """Geometric distortion by a displacement field (pull-back warp).

    out(x, y) = img(x - dx(x, y), y - dy(x, y)), bilinearly interpolated
    with replicate borders, so content shifts in the +d direction.
    A zero field returns an identical copy.
    """
    img = _as_image(img)
    if tilt.dx.shape != img.shape[:2]:
        raise ValidationError(
            f"tilt field shape {tilt.dx.shape} does not match image {img.shape[:2]}")
    if not tilt.dx.any() and not tilt.dy.any():
        return img.copy()
    h, w = img.shape[:2]
    yy = np.arange(h)[:, None] - tilt.dy
    xx = np.arange(w)[None, :] - tilt.dx
    return fields.bilinear_sample(img, yy, xx)


@dataclass(frozen=True)
class PsfBank:
    """K PSF kernels at log-spaced widths, shared support.

    kernels has shape (K, S, S) with S = support odd; widths is sorted
    ascending. tail_mass estimates the energy the largest-width kernel
    carries beyond the support (measured against a 4x reference grid):
    the heavy r^(-5/3)-law tails decay slowly, so a practical support
    keeps the clipped mass small but not spectrally negligible.
    """
    widths: np.ndarray
    kernels: np.ndarray
    support: int
    tail_mass: float


def build_psf_bank(cfg: OpticalConfig, width_range: tuple[float, float],
                   k_bins: int = 16, tau: float | None = None) -> PsfBank:
    """Bank of finite-exposure PSFs covering a width range, pixels.

    Widths are log-spaced over [min, max] (k_bins=1 uses the geometric
    midpoint). Support is the smallest odd integer >= 6*max_width, and
    every kernel is synthesized directly on that support so no mass is
    lost to cropping: energy beyond the window folds back periodically,
    which for these monotone-tail kernels perturbs the far tail only.
    """
    wmin, wmax = float(width_range[0]), float(width_range[1])
    if not (0 < wmin <= wmax) or not math.isfinite(wmax):
        raise ValidationError(f"width_range must be 0 < min <= max, got {width_range!r}")
    if k_bins < 1:
        raise ValidationError(f"k_bins must be >= 1, got {k_bins}")
    if k_bins == 1 or wmin == wmax:
        widths = np.array([math.sqrt(wmin * wmax)])
    else:
        widths = np.geomspace(wmin, wmax, k_bins)
    support = int(math.ceil(6.0 * widths[-1]))
    support += 1 - support % 2
    kernels = np.empty((len(widths), support, support))
    for i, w in enumerate(widths):
        mtf = optics.mtf_finite_exposure(cfg, w, (support, support), tau=tau)
        kernels[i] = optics.psf_from_mtf(mtf).data
    # Tail diagnostic: synthesize the widest kernel on a much larger
    # grid and measure the mass outside the bank support.
    ref_n = 1 << int(math.ceil(math.log2(4 * support)))
    ref = optics.psf_from_mtf(
        optics.mtf_finite_exposure(cfg, widths[-1], (ref_n, ref_n), tau=tau)).data
    c = ref_n // 2
    half = support // 2
    inside = ref[c - half:c + half + 1, c - half:c + half + 1].sum()
    return PsfBank(widths=widths, kernels=kernels, support=support,
                   tail_mass=float(1.0 - inside))


def _fft_convolve_same(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Replicate-padded FFT convolution, output size = input size.

    Padding by the kernel half-width makes the circular convolution of
    the padded image exact over the original window.
    """
    s = kernel.shape[0]
    p = s // 2
    pad = ((p, p), (p, p)) + (((0, 0),) if img.ndim == 3 else ())
    padded = np.pad(img, pad, mode="edge")
    ph, pw = padded.shape[:2]
    kpad = np.zeros((ph, pw))
    kpad[:s, :s] = kernel
    # center the kernel on (0, 0) of the padded grid
    kpad = np.roll(kpad, (-p, -p), axis=(0, 1))
    kf = scipy.fft.rfft2(kpad)
    if img.ndim == 3:
        out = np.empty_like(padded)
        for ch in range(img.shape[2]):
            out[:, :, ch] = scipy.fft.irfft2(
                scipy.fft.rfft2(padded[:, :, ch]) * kf, s=(ph, pw))
        return out[p:p + img.shape[0], p:p + img.shape[1]]
    out = scipy.fft.irfft2(scipy.fft.rfft2(padded) * kf, s=(ph, pw))
    return out[p:p + img.shape[0], p:p + img.shape[1]]


def blur_spatially_varying(img: np.ndarray, width_field, bank: PsfBank) -> np.ndarray:
    """Per-pixel blur by bank interpolation.

    Each pixel's width selects the two bracketing bank kernels; the
    outputs of the corresponding full-image convolutions are blended
    with weights linear in log-width. Widths outside the bank range are
    clamped to it (with a warning): the result is then the nearest bank
    kernel rather than an extrapolation.
    """
    img = _as_image(img)
    w = width_field.grid if isinstance(width_field, BlurWidthField) else np.asarray(width_field)
    if w.shape != img.shape[:2]:
        raise ValidationError(
            f"width field shape {w.shape} does not match image {img.shape[:2]}")
    bw = bank.widths
    if w.min() < bw[0] - 1e-12 or w.max() > bw[-1] + 1e-12:
        log.warning("blur widths [%.3g, %.3g] clamped to bank range [%.3g, %.3g]",
                    w.min(), w.max(), bw[0], bw[-1])
    w = np.clip(w, bw[0], bw[-1])
    if len(bw) == 1:
        return _fft_convolve_same(img, bank.kernels[0])
    blurred = np.stack([_fft_convolve_same(img, k) for k in bank.kernels])
    idx = np.clip(np.searchsorted(bw, w, side="right") - 1, 0, len(bw) - 2)
    logw = np.log(bw)
    t = (np.log(w) - logw[idx]) / (logw[idx + 1] - logw[idx])
    t = np.clip(t, 0.0, 1.0)
    if img.ndim == 3:
        t = t[..., None]
        lo = np.take_along_axis(
            blurred, idx[None, :, :, None].repeat(img.shape[2], axis=3), axis=0)[0]
        hi = np.take_along_axis(
            blurred, (idx + 1)[None, :, :, None].repeat(img.shape[2], axis=3), axis=0)[0]
    else:
        ii, jj = np.indices(w.shape, sparse=True)
        lo = blurred[idx, ii, jj]
        hi = blurred[idx + 1, ii, jj]
    return lo * (1.0 - t) + hi * t


def add_exposure_noise(img: np.ndarray, cfg: OpticalConfig,
                       k_noise: float = 0.001, seed: int = 0,
                       tau: float | None = None) -> np.ndarray:
    """Additive Gaussian sensor noise scaled for the exposure time.

    sigma = k_noise / sqrt(tau_ms): longer exposures gather more light,
    so the noise floor of the normalized image drops as sqrt(exposure).
    Output is clipped to [0, 1]. k_noise=0 returns a copy.
    """
    img = _as_image(img)
    if k_noise < 0 or not math.isfinite(k_noise):
        raise ValidationError(f"k_noise must be >= 0, got {k_noise!r}")
    if k_noise == 0.0:
        return img.copy()
    tau = cfg.exposure_time if tau is None else float(tau)
    if tau <= 0:
        raise ValidationError(f"noise requires a positive exposure, got {tau!r}")
    sigma = k_noise / math.sqrt(tau * 1e3)
    rng = make_generator(seed)
    return np.clip(img + sigma * rng.standard_normal(img.shape), 0.0, 1.0)


def degrade_frame(img: np.ndarray, tilt: TiltField, width_field, bank: PsfBank,
                  cfg: OpticalConfig | None = None, noise_k: float = 0.0,
                  noise_seed: int = 0) -> dict[str, np.ndarray]:
    """Single-frame degradation products.

    Returns {"tilt", "blur", "turb"}: the tilt-only warp, the blur-only
    result (blur applied to the clean image, so the pair isolates each
    operator), and the full chain blur(warp(img)) with optional noise.
    Channels of a color image share the same fields and kernels.
    """
    img = _as_image(img)
    tilted = warp(img, tilt)
    out = {
        "tilt": tilted,
        "blur": blur_spatially_varying(img, width_field, bank),
        "turb": blur_spatially_varying(tilted, width_field, bank),
    }
    if noise_k > 0:
        if cfg is None:
            raise ValidationError("noise requires the optical config")
        out["turb"] = add_exposure_noise(out["turb"], cfg, noise_k, noise_seed)
    return out


def degrade_video(frames, cfg: OpticalConfig, seed: int, *,
                  epsilon: float = 0.1, k_bins: int = 16,
                  blur_correlation_length: float = 32.0,
                  tilt_sigma: float | None = None,
                  tilt_correlation_length: float | None = None,
                  noise_k: float = 0.0, return_fields: bool = False):
    """Temporally coherent degradation of a frame sequence.

    One oversized blur-width realization and one tilt realization are
    generated up front (seeded independently from ``seed``) and each
    frame i views them at t = i / frame_rate under frozen flow, so the
    degradation pattern advects smoothly with the wind instead of
    re-rolling per frame. All frames share one PSF bank whose width
    range covers the whole realization.

    Correlation lengths are capped at a quarter of the shorter frame
    side: past that scale the field is constant over the frame anyway,
    and an uncapped kernel would smooth a small frame into numerical
    degeneracy. The cap uses the frame size, not the wind-extended
    field, so statistics do not shift with the frame count.

    Returns a list of per-frame {"tilt", "blur", "turb"} dicts; with
    return_fields=True, a (results, fields_by_frame) pair where each
    fields entry carries that frame's width map and tilt components.
    """
    frames = [_as_image(f) for f in frames]
    if not frames:
        raise ValidationError("degrade_video needs at least one frame")
    h, w = frames[0].shape[:2]
    for i, f in enumerate(frames):
        if f.shape[:2] != (h, w):
            raise ValidationError(
                f"frame {i} shape {f.shape[:2]} differs from frame 0 {(h, w)}")
    n = len(frames)
    corr_cap = min(h, w) / 4.0

    blur_spec = fields.extend_for_wind(
        RandomFieldSpec(width=w, height=h,
                        correlation_length=min(blur_correlation_length, corr_cap),
                        seed=derive_seed(seed, STREAM_FIELD_BLUR)),
        cfg, n)
    base_r = fields.gaussian_random_field(blur_spec)

    sigma = fields.default_tilt_sigma(cfg) if tilt_sigma is None else tilt_sigma
    corr = (fields.default_tilt_correlation_length(cfg)
            if tilt_correlation_length is None else tilt_correlation_length)
    tilt_spec = fields.extend_for_wind(
        RandomFieldSpec(width=w, height=h,
                        correlation_length=min(corr, corr_cap),
                        seed=derive_seed(seed, STREAM_TILT)),
        cfg, n)
    base_tilt = fields.tilt_field(sigma, tilt_spec)

    # Bank range from the full (pre-clamp) realization so every frame's
    # widths fall inside it.
    full = fields.blur_width_field_from_noise(cfg, base_r, epsilon)
    wmin, wmax = float(full.grid.min()), float(full.grid.max())
    bank = build_psf_bank(cfg, (wmin, wmax), k_bins=1 if wmin == wmax else k_bins)

    results = []
    field_views = []
    for i in range(n):
        t = i / cfg.frame_rate
        r_view = fields.frozen_flow_view(base_r, cfg, t, (h, w))
        wfield = fields.blur_width_field_from_noise(cfg, r_view, epsilon)
        tilt = TiltField(
            dx=fields.frozen_flow_view(base_tilt.dx, cfg, t, (h, w)),
            dy=fields.frozen_flow_view(base_tilt.dy, cfg, t, (h, w)),
            sigma_tilt=base_tilt.sigma_tilt,
            correlation_length=base_tilt.correlation_length)
        results.append(degrade_frame(frames[i], tilt, wfield, bank, cfg=cfg,
                                     noise_k=noise_k,
                                     noise_seed=derive_seed(seed, STREAM_NOISE, i)))
        if return_fields:
            field_views.append({"width": wfield.grid, "tilt_dx": tilt.dx,
                                "tilt_dy": tilt.dy})
    if return_fields:
        return results, field_views
    return results
