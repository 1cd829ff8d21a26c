"""Raster types, PGM I/O and the shared filtering/segmentation primitives."""
from ._types import as_binary, as_gray
from .filters import (
    band_threshold,
    binarize,
    box_mean,
    invert,
    low_pass,
    median_filter,
    otsu_from_histogram,
    otsu_threshold,
    scale_to_uint8,
    sobel_float,
    sobel_gradient,
    switched_median_filter,
)
from .measure import (
    column_projection,
    histogram,
    row_projection,
    series_to_csv,
    write_series_csv,
)
from .morphology import (
    component_areas,
    connected_components,
    fill_holes,
    keep_largest_component,
    remove_small_objects,
    skeletonize,
)
from .pgm import (
    decode_pgm,
    encode_pgm,
    load_pgm,
    load_pgm_with_meta,
    read_pgm_comments,
    save_pgm,
)

__all__ = [
    "as_binary", "as_gray", "band_threshold", "binarize", "box_mean",
    "column_projection", "component_areas", "connected_components",
    "decode_pgm", "encode_pgm", "fill_holes", "histogram", "invert",
    "keep_largest_component", "load_pgm", "load_pgm_with_meta", "low_pass",
    "median_filter", "otsu_from_histogram", "otsu_threshold",
    "read_pgm_comments", "remove_small_objects", "row_projection",
    "save_pgm", "scale_to_uint8", "series_to_csv", "skeletonize",
    "sobel_float", "sobel_gradient", "switched_median_filter",
    "write_series_csv",
]
