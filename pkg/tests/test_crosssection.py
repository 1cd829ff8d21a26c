import math

import numpy as np
import pytest
import sympy

from yarnvision import crosssection, reference, synthgen
from yarnvision.errors import AnalysisError, ParameterError


def test_ellipse_area_formula_symbolic():
    M, N = sympy.symbols("M N", positive=True)
    a, b = M / 2, N / 2
    x, y = sympy.symbols("x y", real=True)
    # area of {x^2/a^2 + y^2/b^2 <= 1} by integrating the vertical chord
    area = sympy.integrate(2 * b * sympy.sqrt(1 - x ** 2 / a ** 2), (x, -a, a))
    assert sympy.simplify(area - sympy.pi * M * N / 4) == 0
    assert crosssection.Ellipse(0, 0, 100, 60).area == pytest.approx(math.pi * 1500)


def _spec():
    spec = synthgen.CrossSectionSpec(M=100, N=60)
    spec.fibers = synthgen.scatter_fibers(spec, 3.0, 40, seed=0)
    return spec


def test_ellipse_fit_recovers_axes():
    fibers, yarn, truth = synthgen.render_cross_section(_spec())
    e = crosssection.fit_yarn_ellipse(yarn)
    assert e.M == pytest.approx(100, abs=1.5) and e.N == pytest.approx(60, abs=1.5)
    assert (e.cx, e.cy) == (pytest.approx(truth["center"][0], abs=0.6), pytest.approx(truth["center"][1], abs=0.6))
    b = crosssection.fit_yarn_ellipse(yarn, "bbox")
    assert b.orientation_deg == 0.0


@pytest.mark.parametrize("angle", [0.0, 30.0, -60.0])
def test_rotated_ellipse_fit(angle):
    spec = synthgen.CrossSectionSpec(M=100, N=60, orientation_deg=angle)
    _, yarn, _ = synthgen.render_cross_section(spec)
    e = crosssection.fit_yarn_ellipse(yarn)
    assert e.M == pytest.approx(100, abs=2.5) and e.N == pytest.approx(60, abs=2.5)
    gap = abs((e.orientation_deg - angle + 90) % 180 - 90)
    assert gap < 1.0


def test_packing_density_matches_analytic_ratio():
    spec = _spec()
    fibers, yarn, truth = synthgen.render_cross_section(spec)
    meas = crosssection.analyze_cross_section(fibers, yarn)
    expected = 100 * truth["fiber_area_analytic_px"] / truth["yarn_area_px"]
    assert meas.packing_density_pct == pytest.approx(expected, rel=0.02)


def test_fibers_outside_the_ellipse_are_ignored():
    spec = synthgen.CrossSectionSpec(M=40, N=30, fibers=[(24.0, 23.0, 3.0), (2.0, 2.0, 2.0)])
    fibers, yarn, truth = synthgen.render_cross_section(spec)
    meas = crosssection.analyze_cross_section(fibers, yarn)
    assert meas.fiber_area_px == truth["fiber_pixels_inside"]


def test_degenerate_masks():
    with pytest.raises(AnalysisError):
        crosssection.fit_yarn_ellipse(np.zeros((5, 5), bool))
    line = np.zeros((5, 9), bool)
    line[2] = True
    with pytest.raises(AnalysisError):
        crosssection.fit_yarn_ellipse(line)
    with pytest.raises(ParameterError):
        crosssection.fit_yarn_ellipse(np.ones((3, 3), bool), "circle")


def test_pretreat_fills_lumens():
    img = np.zeros((20, 20), np.uint8)
    img[5:15, 5:15] = 200
    img[9:11, 9:11] = 0
    m = crosssection.pretreat(img)
    assert m[10, 10]
    assert not crosssection.pretreat(img, fill_lumens=False)[10, 10]


def test_compare_systems_names_pairs():
    groups = {"Ring": [38, 40, 36, 39, 37], "Compact": [42, 41, 43, 40, 44], "Vortex": [24, 23, 25, 22, 26]}
    out = crosssection.compare_systems(groups)
    assert out["anova"]["between"]["df"] == 2
    pair = next(p for p in out["pairwise"] if p["i"] == "Ring" and p["j"] == "Vortex")
    assert pair["mean_diff"] == pytest.approx(14.0)


def test_reference_table_systems():
    names = [r["system"] for r in reference.load_table("packing_by_spinning_system")]
    assert names[:2] == ["Ring", "Compact"]
