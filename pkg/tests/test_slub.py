import numpy as np
import pytest

from yarnvision import slub, synthgen
from yarnvision.errors import AnalysisError, ParameterError
from yarnvision.metrology import Calibration, width_profile
from yarnvision.raster import binarize


def _report(img, ppm, **kw):
    return slub.detect_slubs(width_profile(binarize(img)), Calibration(ppm), **kw)


def test_table_pattern_recovered():
    img, truth, ppm = synthgen.render_preset("slub-pattern")
    rep = _report(img, ppm)
    assert rep.base_width_px == 20
    assert [s.length_mm for s in rep.segments] == [30, 50, 30, 50]
    assert all(abs(s.amplitude_pct - 250) <= 5 for s in rep.segments)
    assert rep.distances_mm == [40, 60, 40]
    assert rep.period == 2
    assert rep.lead_margin_mm == 10 and rep.tail_margin_mm == 10


def test_short_bumps_rejected():
    slubs, total = synthgen.slub_layout([(15.0, 250.0, 30.0), (30.0, 250.0, 30.0)], 4.0, 20)
    spec = synthgen.YarnRenderSpec(width=total, height=80, core_width=20, slubs=slubs)
    img, _ = synthgen.render_slub_yarn(spec)
    rep = _report(img, 4.0)
    assert [s.length_mm for s in rep.segments] == [30, 30]
    assert [round(r[1]) for r in rep.rejected] == [15, 15]


def test_period_one_and_aperiodic():
    slubs, total = synthgen.slub_layout([(25.0, 200.0, 30.0)], 4.0, 20, repeats=4)
    spec = synthgen.YarnRenderSpec(width=total, height=80, core_width=20, slubs=slubs)
    assert _report(synthgen.render_slub_yarn(spec)[0], 4.0).period == 1
    pattern = [(25.0, 200.0, 30.0), (40.0, 250.0, 50.0), (60.0, 180.0, 25.0)]
    slubs, total = synthgen.slub_layout(pattern, 4.0, 20, repeats=1)
    spec = synthgen.YarnRenderSpec(width=total, height=80, core_width=20, slubs=slubs)
    assert _report(synthgen.render_slub_yarn(spec)[0], 4.0).period == slub.APERIODIC


def test_period_needs_three_segments():
    rep = slub.detect_slubs(np.full(100, 10), Calibration(1.0))
    assert rep.segments == [] and rep.period == slub.APERIODIC
    with pytest.raises(AnalysisError):
        slub.slub_period(rep)


def test_base_width_tie_and_empty():
    assert slub.detect_base_width([3, 3, 5, 5, 0]) == 3
    with pytest.raises(AnalysisError):
        slub.detect_base_width([0, 0, 0, 4])


def test_threshold_validation():
    with pytest.raises(ParameterError):
        slub.detect_slubs([10] * 10, Calibration(1.0), amplitude_threshold_pct=90)


def test_split_lanes_and_histogram():
    m = np.zeros((30, 10), bool)
    m[2:6] = True
    m[15:25] = True
    assert slub.split_lanes(m) == [(2, 5), (15, 24)]
    assert slub.split_lanes(m, min_gap=20) == [(2, 24)]
    assert slub.width_histogram([0, 4, 4, 10]) == [(4, 2), (10, 1)]
