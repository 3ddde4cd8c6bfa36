"""PNG read/write with float [0, 1] pixel semantics.

Images move through the pipeline as float64 arrays in [0, 1]; files are
8-bit (or, on request, 16-bit grayscale) PNG. Round trips are exact at
the file bit depth: write then read recovers the quantized values.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

from .config import ValidationError


def read_image(path) -> np.ndarray:
    """Load a PNG as float64 in [0, 1].

    Grayscale files give (H, W); color gives (H, W, 3). 16-bit grayscale
    is scaled by 1/65535, everything else by 1/255; palette and alpha
    images are converted to RGB first.
    """
    with Image.open(path) as im:
        if im.mode in ("I;16", "I"):
            arr = np.asarray(im, dtype=np.float64)
            return arr / 65535.0
        if im.mode == "L":
            return np.asarray(im, dtype=np.float64) / 255.0
        if im.mode != "RGB":
            im = im.convert("RGB")
        return np.asarray(im, dtype=np.float64) / 255.0


def write_image(path, img: np.ndarray, bit_depth: int = 8) -> None:
    """Save a float [0, 1] array as PNG.

    Values are clipped then rounded half to even at the target depth.
    bit_depth=16 is grayscale only.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim not in (2, 3):
        raise ValidationError(f"image must be 2-D or HxWxC, got shape {img.shape}")
    if bit_depth == 8:
        q = np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
        if img.ndim == 3 and img.shape[2] != 3:
            raise ValidationError(f"color images need 3 channels, got {img.shape[2]}")
    elif bit_depth == 16:
        if img.ndim != 2:
            raise ValidationError("16-bit output is grayscale only")
        q = np.rint(np.clip(img, 0.0, 1.0) * 65535.0).astype(np.uint16)
    else:
        raise ValidationError(f"bit_depth must be 8 or 16, got {bit_depth}")
    # mode is inferred from dtype: uint8 -> L/RGB, uint16 -> I;16
    Image.fromarray(q).save(path, format="PNG")
