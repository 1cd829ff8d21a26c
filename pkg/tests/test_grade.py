import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from yarnvision import grade, synthgen
from yarnvision.errors import AnalysisError, ParameterError
from yarnvision.metrology import Calibration

images = arrays(np.uint8, st.tuples(st.integers(1, 20), st.integers(1, 20)))


@given(images, st.sampled_from(["haar", "53"]), st.integers(1, 3))
def test_lifting_round_trip_exact(img, wavelet, levels):
    dec = grade.wavelet_decompose(img, levels, wavelet)
    assert np.array_equal(grade.wavelet_synthesize(dec), img)


def test_haar_bands_of_constant_image():
    dec = grade.wavelet_decompose(np.full((8, 8), 10), 2)
    assert all(not np.any(v) for det in dec.details for v in det.values())
    assert np.all(dec.approx == 10)
    assert sum(grade.band_energy(dec).values()) == 0


def test_decompose_guards():
    with pytest.raises(ParameterError):
        grade.wavelet_decompose(np.zeros((4, 4)), 0)
    with pytest.raises(ParameterError):
        grade.wavelet_decompose(np.zeros((4, 4)), 1, "db4")


def test_separate_core_removes_hairs():
    img, truth, _ = synthgen.render_preset("hairy")
    core = grade.separate_core(img)
    from yarnvision.metrology import width_profile
    from yarnvision.raster import binarize
    w = width_profile(binarize(core))
    assert np.all(np.abs(w - 16) <= 1)


def test_saliency_and_defects():
    w = np.full(300, 10)
    w[100:120] = 25
    sal = grade.saliency_map(w)
    assert sal[0] == 0 and sal[110] == pytest.approx(1.5)
    assert grade.defect_regions(sal) == [(100, 119)]
    assert grade.defect_regions(np.array([0, 1, 0, 1, 0, 0, 0, 1]), 0.5, merge_gap=1) == [(1, 3), (7, 7)]
    with pytest.raises(ParameterError):
        grade.saliency_map(w, 4)


def test_nep_preset_features_and_grade():
    img, truth, ppm = synthgen.render_preset("grade-nep")
    f = grade.extract_grade_features(img, Calibration(ppm))
    assert f.defects and f.defects[0][0] == pytest.approx(285, abs=2)
    assert f.summary["defects_per_m"] == pytest.approx(1000 / 30)
    label, dists = grade.classify_grade(f, grade.default_reference())
    assert label in dists and dists[label] == min(dists.values())


def test_classifier_without_calibration_refuses():
    img, _, _ = synthgen.render_preset("grade-nep")
    f = grade.extract_grade_features(img)
    assert f.summary["defects_per_m"] is None
    with pytest.raises(ParameterError):
        grade.classify_grade(f, grade.default_reference())


def test_classifier_tie_and_reference_formats():
    ref = grade.ReferenceSet.from_dict({"references": [
        {"grade": "B", "cv_pct": 0, "defects_per_m": 0, "saliency_p95": 0},
        {"grade": "A", "cv_pct": 2, "defects_per_m": 2, "saliency_p95": 2},
    ]})
    assert grade.classify_grade([1, 1, 1], ref)[0] == "A"
    assert grade.classify_grade([0.1, 0, 0], ref)[0] == "B"
    with pytest.raises(AnalysisError):
        grade.ReferenceSet([]).centroids()


def test_flat_image_has_no_core():
    with pytest.raises(AnalysisError):
        grade.extract_grade_features(np.zeros((16, 16), np.uint8))
