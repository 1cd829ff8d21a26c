import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from yarnvision import reference
from yarnvision.errors import AnalysisError, ParameterError, PGMHeaderError, PGMMaxvalError, PGMTruncatedError
from yarnvision.raster import (
    band_threshold, binarize, box_mean, column_projection, connected_components, decode_pgm,
    encode_pgm, fill_holes, histogram, keep_largest_component, load_pgm_with_meta, low_pass,
    median_filter, otsu_from_histogram, otsu_threshold, read_pgm_comments, remove_small_objects,
    row_projection, save_pgm, scale_to_uint8, series_to_csv, skeletonize, sobel_gradient,
    switched_median_filter,
)

images = arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12)))


def test_band_threshold_reference_matrix_all_but_one_cell():
    # The printed output zeroes the corner value 93 although it lies inside
    # [80, 180]; every other cell follows the rule.
    inp = reference.load_matrix("band_threshold_input").astype(np.uint8)
    expected = reference.load_matrix("band_threshold_output")
    out = band_threshold(inp, 80, 180)
    diff = np.argwhere(out != expected)
    assert diff.tolist() == [[7, 7]]
    assert inp[7, 7] == 93


@pytest.mark.parametrize("tmin", [94, 95, 96])
def test_band_threshold_printed_matrix_matches_raised_lower_bound(tmin):
    inp = reference.load_matrix("band_threshold_input").astype(np.uint8)
    expected = reference.load_matrix("band_threshold_output")
    np.testing.assert_array_equal(band_threshold(inp, tmin, 180), expected)


def test_band_threshold_identity_on_full_range():
    img = np.arange(256, dtype=np.uint8).reshape(16, 16)
    assert np.array_equal(band_threshold(img, 0, 255), img)


def test_band_threshold_keeps_bounds_inclusive():
    img = np.array([[79, 80, 180, 181]], dtype=np.uint8)
    np.testing.assert_array_equal(band_threshold(img, 80, 180), [[0, 80, 180, 0]])


def test_band_threshold_rejects_inverted_range():
    with pytest.raises(ParameterError):
        band_threshold(np.zeros((2, 2), np.uint8), 200, 100)


@given(images)
def test_pgm_round_trip_is_bit_exact(img):
    assert np.array_equal(decode_pgm(encode_pgm(img)), img)


def test_pgm_comments_and_file_round_trip(tmp_path):
    img = np.arange(12, dtype=np.uint8).reshape(3, 4)
    p = tmp_path / "a.pgm"
    save_pgm(img, p, comments=["px_per_mm=68.0", "hello"])
    back, meta = load_pgm_with_meta(p)
    assert np.array_equal(back, img)
    assert meta["px_per_mm"] == "68.0"
    assert read_pgm_comments(p) == {"px_per_mm": "68.0"}


@pytest.mark.parametrize("data, err", [
    (b"P2\n1 1\n255\n\x00", PGMHeaderError),
    (b"P5\n2 2\n255\n\x00", PGMTruncatedError),
    (b"P5\n1 1\n65535\n\x00\x00", PGMMaxvalError),
    (b"P5\n1", PGMHeaderError),
])
def test_pgm_errors(data, err):
    with pytest.raises(err):
        decode_pgm(data)


def test_pgm_header_comment_between_fields():
    img = decode_pgm(b"P5\n# c1\n2 # c2\n1\n255\n\x01\x02")
    assert img.tolist() == [[1, 2]]


def test_otsu_two_level_image_splits_between_levels():
    img = np.array([[10] * 5 + [200] * 5], dtype=np.uint8)
    t = otsu_threshold(img)
    assert 10 <= t < 200
    assert binarize(img).sum() == 5
    assert binarize(img, invert=True).sum() == 5


def test_otsu_plateau_midpoint():
    hist = np.zeros(256)
    hist[[10, 30]] = 50
    assert otsu_from_histogram(hist) == 19  # plateau 10..29


def test_otsu_single_level_is_degenerate():
    with pytest.raises(AnalysisError):
        otsu_threshold(np.full((4, 4), 7, np.uint8))


@given(images)
def test_histogram_and_projections(img):
    assert histogram(img).sum() == img.size
    assert row_projection(img).sum() == column_projection(img).sum() == int(img.astype(np.int64).sum())


def test_median_filter_removes_salt(rng):
    img = np.full((9, 9), 100, np.uint8)
    img[4, 4] = 255
    assert np.all(median_filter(img, 3) == 100)
    assert np.array_equal(median_filter(img, 1), img)
    with pytest.raises(ParameterError):
        median_filter(img, 4)


def test_switched_median_only_touches_outliers():
    img = np.tile(np.arange(0, 90, 10, dtype=np.uint8), (9, 1))
    img2 = img.copy()
    img2[4, 4] = 255
    out = switched_median_filter(img2, 3)
    assert out[4, 4] != 255
    mask = np.ones_like(img, bool)
    mask[4, 4] = False
    assert np.array_equal(out[mask], img[mask])


def test_box_mean_and_low_pass_on_constant():
    img = np.full((6, 7), 42, np.uint8)
    assert np.allclose(box_mean(img, 2), 42)
    assert np.all(low_pass(img, 1) == 42)


def test_sobel_on_vertical_edge():
    img = np.zeros((5, 6), np.uint8)
    img[:, 3:] = 50
    mag, ang = sobel_gradient(img)
    assert mag[2, 2] == 200 and mag[2, 3] == 200
    assert abs(ang[2, 2]) < 1e-12
    assert mag[2, 0] == 0


def test_scale_to_uint8():
    assert scale_to_uint8(np.array([0.0, 1.0, 2.0])).tolist() == [0, 128, 255]
    assert scale_to_uint8(np.zeros(3)).tolist() == [0, 0, 0]


def test_connected_components_connectivity():
    m = np.array([[1, 0], [0, 1]], bool)
    assert connected_components(m, 8)[1] == 1
    assert connected_components(m, 4)[1] == 2


def test_small_objects_largest_component_fill_holes():
    m = np.zeros((10, 10), bool)
    m[1:6, 1:6] = True
    m[3, 3] = False
    m[8, 8] = True
    assert remove_small_objects(m, 2)[8, 8] == False  # noqa: E712
    big = keep_largest_component(m)
    assert not big[8, 8] and big[1, 1]
    assert fill_holes(m)[3, 3]


def test_skeleton_of_bar_is_one_pixel_line():
    m = np.zeros((9, 30), bool)
    m[3:6, 2:28] = True
    sk = skeletonize(m)
    assert sk.sum() > 15
    assert np.all(sk.sum(axis=0) <= 1)


def test_series_to_csv():
    assert series_to_csv([1, 2.5], header=["i", "v"]) == "i,v\n0,1\n1,2.5\n"
