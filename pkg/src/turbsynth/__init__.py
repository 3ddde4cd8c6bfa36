"""Physics-based synthesis of atmospheric-turbulence image degradation.

The pipeline models an imaging path through turbulent air with closed
forms only: an exposure-dependent MTF gives the local blur kernel, a
correlated random field varies the kernel width across the frame,
a second field warps the geometry (tilt), and frozen-flow advection
makes everything evolve coherently across video frames.
"""

from .config import (EXPOSURE_WINDOW, OpticalConfig, ValidationError,
                     config_from_dict, load_config, require_valid,
                     validate_config)
from .dataset import (DEFAULT_SPLIT_RATIO, DatasetError, generate_dataset,
                      resume)
from .degrade import (PsfBank, add_exposure_noise, blur_spatially_varying,
                      build_psf_bank, degrade_frame, degrade_video, warp)
from .fields import (BlurWidthField, RandomFieldSpec, TiltField,
                     blur_width_field, default_tilt_correlation_length,
                     default_tilt_sigma, extend_for_wind, frozen_flow_view,
                     gaussian_random_field, tilt_field)
from .grids import GridKind, SampledGrid, read_raster, write_raster
from .optics import (BlurWidth, TurbulenceStats, blur_width_from_fried,
                     fried_from_blur_width, fried_parameter, mean_blur_width,
                     mtf_finite_exposure, mtf_finite_exposure_profile,
                     mtf_long_exposure, mtf_short_exposure, psf_from_mtf,
                     psf_fwhm, short_exposure_gain,
                     short_exposure_gain_from_width, std_blur_width,
                     turbulence_stats)
from .pngio import read_image, write_image
from .sampler import ConfigRow, builtin_table, parse_override, sample_config

__version__ = "0.1.0"

__all__ = [
    "BlurWidth", "BlurWidthField", "ConfigRow", "DEFAULT_SPLIT_RATIO",
    "DatasetError", "EXPOSURE_WINDOW", "GridKind", "OpticalConfig", "PsfBank",
    "RandomFieldSpec", "SampledGrid", "TiltField", "TurbulenceStats",
    "ValidationError", "add_exposure_noise", "blur_spatially_varying",
    "blur_width_field", "blur_width_from_fried", "build_psf_bank",
    "builtin_table", "config_from_dict", "default_tilt_correlation_length",
    "default_tilt_sigma", "degrade_frame", "degrade_video", "extend_for_wind",
    "fried_from_blur_width", "fried_parameter", "frozen_flow_view",
    "gaussian_random_field", "generate_dataset", "load_config",
    "mean_blur_width", "mtf_finite_exposure", "mtf_finite_exposure_profile",
    "mtf_long_exposure", "mtf_short_exposure", "parse_override",
    "psf_from_mtf", "psf_fwhm", "read_image", "read_raster", "require_valid",
    "resume", "sample_config", "short_exposure_gain",
    "short_exposure_gain_from_width", "std_blur_width", "tilt_field",
    "turbulence_stats", "validate_config", "warp", "write_image",
    "write_raster", "__version__",
]
