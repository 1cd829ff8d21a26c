import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from yarnvision import reference, synthgen, texture
from yarnvision.errors import AnalysisError, ParameterError


def _line(shape, pts):
    m = np.zeros(shape, bool)
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        synthgen.draw_segment(m, x0, y0, x1, y1)
    return m


def test_connectivity_numbers():
    m = _line((9, 9), [(1, 4), (7, 4)])
    cn = texture.connectivity_number(m)
    assert cn[4, 4] == 2 and cn[4, 1] == 1
    y = np.zeros((5, 5), bool)
    y[0:3, 2] = True  # stem
    y[3, 1] = y[3, 3] = True  # diagonal arms: three separate pieces
    assert texture.connectivity_number(y)[2, 2] == 3
    t = m.copy()
    t[1:5, 4] = True  # 4-connected T: the arms touch diagonally
    assert texture.connectivity_number(t)[4, 4] == 1
    assert texture.junction_mask(t)[3:5, 4].any()
    ends = texture.endpoint_mask(m)
    assert ends[4, 1] and ends[4, 7] and ends.sum() == 2


def test_thin_staircases_removes_corner_pixels():
    m = np.zeros((6, 6), bool)
    for i in range(4):
        m[i + 1, i + 1] = True
        m[i + 1, i + 2] = True  # 4-connected staircase
    out = texture.thin_staircases(m)
    assert out.sum() < m.sum()
    assert texture.neighbour_count(out)[out].max() <= 2


@given(arrays(np.bool_, (12, 12)))
def test_thin_staircases_keeps_component_count(m):
    from yarnvision.raster import connected_components
    out = texture.thin_staircases(m)
    assert not np.any(out & ~m)
    assert connected_components(out, 8)[1] == connected_components(m, 8)[1]


def test_corrective_procedure_prunes_short_spur():
    m = _line((20, 30), [(2, 10), (27, 10)])
    m[7:10, 14] = True  # 3-pixel spur
    out = texture.corrective_procedure(m, 5)
    assert not out[7:10, 14].any()
    assert out[10, 2:28].all()
    assert texture.corrective_procedure(m, 2)[7:10, 14].all()
    with pytest.raises(ParameterError):
        texture.corrective_procedure(m, 0)


@pytest.mark.parametrize("nb", [4, 8])
def test_crossing_diagonals_give_four_traces(nb):
    m = _line((41, 41), [(2, 2), (38, 38)]) | _line((41, 41), [(38, 2), (2, 38)])
    traces = texture.trace_fibers(m, nb, min_trace_len=5)
    assert len(traces) == 4
    assert all(abs(t.angle - 45) < 1 for t in traces)


def test_chord_segments():
    path = [(0, c) for c in range(23)]
    ang, ln = texture.chord_segments(path, 11)
    assert ang.tolist() == [0.0, 0.0] and ln.tolist() == [10.0, 10.0]
    ang, _ = texture.chord_segments([(r, 0) for r in range(11)], 11)
    assert ang.tolist() == [90.0]


def test_orientation_index_values():
    assert texture.orientation_index(0.0) == 1.0
    assert texture.orientation_index(1.0) == -0.5
    assert texture.orientation_index(2 / 3) == pytest.approx(0.0)


@pytest.mark.parametrize("angle", [0.0, 20.0, 45.0, 70.0, 90.0])
def test_planted_field_angle(angle):
    mask, _ = synthgen.render_fiber_field(angle)
    res, traces = texture.analyze_texture(synthgen.to_gray(mask))
    assert abs(res.mean_angle_deg - angle) <= 1.3
    assert res.n_traces == len(traces) > 3


def test_no_traces():
    with pytest.raises(AnalysisError):
        texture.orientation_stats([])


def test_accuracy_check_and_csv():
    samples = [(synthgen.to_gray(synthgen.render_fiber_field(a)[0]), a) for a in (30.0, 50.0)]
    rows = texture.angle_accuracy_check(samples)
    assert all(r["abs_diff_deg"] <= 1.3 for r in rows)
    _, traces = texture.analyze_texture(samples[0][0])
    assert texture.traces_to_csv(traces).startswith("trace,n_pixels,length_px,angle_deg\n")


def test_reference_angle_table_gaps():
    rows = reference.load_table("texture_angle_check")
    assert max(abs(r["manual_deg"] - r["algorithm_deg"]) for r in rows) <= 1.3
