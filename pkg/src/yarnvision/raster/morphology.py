"""Connected components, small-object removal, hole filling and thinning."""
import numpy as np
from scipy import ndimage

from .. import kernels
from ..errors import ParameterError
from ._types import as_binary


def connected_components(mask, connectivity=8):
    """Label foreground components.

    Labels are numbered 1..count in raster order of each component's first
    pixel.  Returns ``(labels, count)``.
    """
    if connectivity not in (4, 8):
        raise ParameterError(f"connectivity must be 4 or 8, got {connectivity}")
    mask = as_binary(mask)
    labels, count = kernels.label(np.ascontiguousarray(mask), connectivity)
    return labels, int(count)


def component_areas(labels, count):
    return np.bincount(labels.ravel(), minlength=count + 1)[1:]


def remove_small_objects(mask, min_area):
    """Drop 8-connected components with fewer than ``min_area`` pixels."""
    if min_area < 1:
        raise ParameterError(f"min_area must be >= 1, got {min_area}")
    mask = as_binary(mask)
    if min_area == 1:
        return mask.copy()
    labels, count = connected_components(mask, 8)
    keep = np.zeros(count + 1, dtype=bool)
    keep[1:] = component_areas(labels, count) >= min_area
    return keep[labels]


def keep_largest_component(mask):
    mask = as_binary(mask)
    labels, count = connected_components(mask, 8)
    if count == 0:
        return mask.copy()
    areas = component_areas(labels, count)
    return labels == (int(np.argmax(areas)) + 1)


def fill_holes(mask):
    """Fill background regions not 4-connected to the image border."""
    return ndimage.binary_fill_holes(as_binary(mask))


def skeletonize(mask):
    """Zhang-Suen thinning.

    Candidates of each sub-iteration are selected in parallel, as in the
    original algorithm, and then removed in raster order; a candidate is
    kept if an earlier removal in the same sub-iteration made it an
    endpoint or a cut pixel.  This keeps 2x2 blocks and two-pixel-thick
    diagonals from vanishing and preserves the 8-connected component count.
    """
    mask = as_binary(mask)
    return kernels.zhang_suen(np.ascontiguousarray(mask)).astype(bool)
