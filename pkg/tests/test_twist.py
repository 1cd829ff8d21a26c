import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from yarnvision import reference, synthgen, twist
from yarnvision.errors import AnalysisError, ParameterError


def _core(angle, direction="Z", **kw):
    spec = synthgen.YarnRenderSpec(width=256, height=80, core_width=48, twist_angle=angle,
                                   twist_direction=direction, **kw)
    img, _ = synthgen.render_twist_stripes(spec)
    return twist.extract_core(img)[0]


def test_angle_tpm_round_trip():
    tpm = twist.angle_to_tpm(30.0, 0.2)
    assert tpm == pytest.approx(math.tan(math.radians(30)) / (math.pi * 0.2e-3))
    assert twist.tpm_to_angle(tpm, 0.2) == pytest.approx(30.0)


@given(st.floats(0.0, 89.0), st.floats(0.05, 2.0))
def test_angle_tpm_inverse_property(angle, d):
    assert twist.tpm_to_angle(twist.angle_to_tpm(angle, d), d) == pytest.approx(angle, abs=1e-9)


def test_formula_guards():
    with pytest.raises(ParameterError):
        twist.angle_to_tpm(90.0, 1.0)
    with pytest.raises(ParameterError):
        twist.angle_to_tpm(10.0, 0.0)
    with pytest.raises(ParameterError):
        twist.RingFrameParams(0, 1, 1)


def test_ring_and_neckar_twist():
    p = twist.RingFrameParams(n_bobbin=10000, v_f=12.5, d_bobbin=0.04)
    corr = 1 / (math.pi * 0.04)
    assert twist.ring_twist(p, "Z") == pytest.approx(800 + corr)
    assert twist.ring_twist(p, "S") == pytest.approx(800 - corr)
    assert twist.neckar_twist(100, 32) == pytest.approx(100 * 32 ** 0.6)


def test_accuracy_is_relative_error_against_tester():
    # the bundled published column is kept for reference only; it follows
    # no single formula of the two tpm columns
    for row in reference.load_table("twist_tester_comparison"):
        ref, est = row["tester_tpm"], row["image_tpm"]
        acc = twist.accuracy_pct(ref, est)
        assert acc == pytest.approx(100 * (1 - abs(ref - est) / ref))
        assert 80 < acc <= 100
    assert twist.accuracy_pct(400, 400) == 100.0


def test_extract_core_finds_band():
    spec = synthgen.YarnRenderSpec(width=64, height=60, core_width=20, stripe_amplitude=0)
    img, truth = synthgen.render_plain_yarn(spec)
    crop, band = twist.extract_core(img)
    assert list(band) == truth["core_rows"]
    assert crop.shape == (20, 64)


def test_extract_core_flat_image():
    with pytest.raises(AnalysisError):
        twist.extract_core(np.full((10, 10), 3, np.uint8))


@pytest.mark.parametrize("direction", ["S", "Z"])
@pytest.mark.parametrize("angle", [0.0, 12.5, 30.0, 45.0])
def test_fft_recovers_angle_and_direction(angle, direction):
    pk = twist.spectral_peak(_core(angle, direction))
    assert abs(pk.angle_deg - angle) < 0.5
    if angle > 1:
        assert pk.direction == direction
    assert pk.period_px == pytest.approx(12.0, rel=0.05)


@pytest.mark.parametrize("direction", ["S", "Z"])
@pytest.mark.parametrize("angle", [10.0, 25.0, 40.0])
def test_lines_recover_angle_and_direction(angle, direction):
    segs = twist.line_segments(_core(angle, direction))
    a, d, members = twist.dominant_direction(segs)
    assert abs(a - angle) < 1.0
    assert d == direction
    assert members


def test_fft_rejects_white_noise():
    noise = np.random.default_rng(1).integers(0, 256, (48, 256)).astype(np.uint8)
    with pytest.raises(AnalysisError):
        twist.spectral_peak(noise)


def test_methods_robust_to_flipped_pixels():
    spec = synthgen.YarnRenderSpec(width=256, height=80, core_width=48, twist_angle=25.0)
    img, _ = synthgen.render_twist_stripes(spec)
    img = synthgen.flip_pixels(img, 0.2, seed=3)
    assert abs(twist.estimate_twist(img, "fft").angle_deg - 25) < 2
    assert abs(twist.estimate_twist(img, "lines").angle_deg - 25) < 2


def test_mixed_families_report_the_majority():
    spec = synthgen.YarnRenderSpec(width=256, height=80, core_width=48)
    img, _ = synthgen.render_mixed_stripes(spec, [(25.0, 0.7), (70.0, 0.3)])
    assert abs(twist.estimate_twist(img, "fft").angle_deg - 25) < 2
    assert abs(twist.estimate_twist(img, "lines").angle_deg - 25) < 2


def test_estimate_twist_tpm_and_method_guard():
    spec = synthgen.YarnRenderSpec(width=256, height=80, core_width=48, twist_angle=30.0)
    img, _ = synthgen.render_twist_stripes(spec)
    r = twist.estimate_twist(img, "fft", diameter_mm=0.96)
    assert r.tpm == pytest.approx(twist.angle_to_tpm(r.angle_deg, 0.96))
    with pytest.raises(ParameterError):
        twist.estimate_twist(img, "hough")


def test_merge_segments_joins_collinear_pieces():
    pts_a = np.array([[10, c] for c in range(0, 10)], float)
    pts_b = np.array([[10, c] for c in range(11, 20)], float)
    segs = [twist._fit_segment(pts_a), twist._fit_segment(pts_b)]
    merged = twist.merge_segments(segs, 5.0, 3.0)
    assert len(merged) == 1
    assert merged[0].length > 18


def test_dominant_direction_empty():
    with pytest.raises(AnalysisError):
        twist.dominant_direction([])
