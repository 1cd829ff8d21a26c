"""Raster conventions.

Images are plain numpy arrays indexed ``[row, column]``:

* gray image   -- 2-D ``uint8`` array, values 0..255
* binary image -- 2-D ``bool`` array, ``True`` is foreground (yarn)
* label image  -- 2-D ``int32`` array, 0 is background, plus a count

Operations never modify their inputs.
"""
import numpy as np

from ..errors import ParameterError


def as_gray(img):
    a = np.asarray(img)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ParameterError(f"expected a non-empty 2-D image, got shape {a.shape}")
    if a.dtype == np.uint8:
        return a
    if a.dtype == bool:
        return a.astype(np.uint8) * 255
    if np.issubdtype(a.dtype, np.floating) and not np.all(np.isfinite(a)):
        raise ParameterError("image contains non-finite values")
    if a.min() < 0 or a.max() > 255:
        raise ParameterError("gray values must lie in [0, 255]")
    return a.astype(np.uint8)


def as_binary(img):
    a = np.asarray(img)
    if a.ndim != 2:
        raise ParameterError(f"expected a 2-D mask, got shape {a.shape}")
    if a.dtype == bool:
        return a
    return a != 0


def check_odd_window(window):
    if int(window) != window or window < 1 or window % 2 == 0:
        raise ParameterError(f"window must be an odd integer >= 1, got {window}")
    return int(window)
