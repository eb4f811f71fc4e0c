import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psmzi.errors import DegenerateStateError, NoFinitePointError, UndefinedSensitivityError
from psmzi.metrology import (homodyne_expectations, intensity_expectations, limits,
                             optimal_phase, phase_sensitivity, sensitivity_curve)
from psmzi.model import NA, NAMED_DETECTIONS, NB, NDIFF, XA, XB, Detection, SchemeConfig
from psmzi.moments import MomentTable

GRID = [SchemeConfig(alpha_mag=a, r=r, m=m, n=n, phi=phi, T=T)
        for (m, n) in [(0, 0), (2, 0), (0, 2), (1, 1)]
        for a, r in [(1, 1), (0.5, 0.5)]
        for phi in (0.1, 1.0, 1.6)
        for T in (1.0, 0.7)]


def test_coherent_output_statistics_at_zero_phase():
    tbl = MomentTable(SchemeConfig(alpha_mag=1.7, r=0, phi=0))
    s = intensity_expectations(tbl)
    assert s.var_a == pytest.approx(1.7 ** 2)
    assert s.cov == pytest.approx(0, abs=1e-14)
    assert s.mean_b == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize("phi", [0.0, 0.5, 1.6, 2.8])
def test_total_number_variance_is_phase_independent(phi):
    def total_var(p):
        s = intensity_expectations(MomentTable(SchemeConfig(alpha_mag=1, r=1, phi=p)))
        return s.var_a + s.var_b + 2 * s.cov
    assert total_var(phi) == pytest.approx(total_var(0.0), rel=1e-10)


def test_vacuum_quadrature():
    s = homodyne_expectations(MomentTable(SchemeConfig(alpha_mag=0, r=0)))
    assert s.mean_a == 0
    assert s.var_a == pytest.approx(0.5)
    assert s.var_b == pytest.approx(0.5)


def test_coherent_quadrature_mean():
    s = homodyne_expectations(MomentTable(SchemeConfig(alpha_mag=1.2, r=0.4, phi=0)))
    assert s.mean_a == pytest.approx(math.sqrt(2) * 1.2)
    # mode b carries the raw squeezed vacuum
    assert s.var_b == pytest.approx(math.exp(-2 * 0.4) / 2)


@pytest.mark.parametrize("cfg", GRID[::3])
def test_named_detections_equal_custom_forms(cfg):
    custom = {"na": Detection.custom_intensity(1, 0), "nb": Detection.custom_intensity(0, 1),
              "ndiff": Detection.custom_intensity(1, -1), "xa": Detection.custom_homodyne(1, 0),
              "xb": Detection.custom_homodyne(0, 1)}
    for name, det in NAMED_DETECTIONS.items():
        a, b = phase_sensitivity(cfg, det), phase_sensitivity(cfg, custom[name])
        assert (a.delta_phi, a.numerator, a.denominator) == (b.delta_phi, b.numerator, b.denominator)


@settings(max_examples=30, deadline=None)
@given(c=st.floats(-3, 3), d=st.floats(-3, 3), k=st.floats(0.01, 100),
       homodyne=st.booleans(), i=st.integers(0, len(GRID) - 1))
def test_scale_invariance(c, d, k, homodyne, i):
    make = Detection.custom_homodyne if homodyne else Detection.custom_intensity
    p, q = phase_sensitivity(GRID[i], make(c, d)), phase_sensitivity(GRID[i], make(k * c, k * d))
    if p.defined and q.defined:
        assert q.delta_phi == pytest.approx(p.delta_phi, rel=1e-12)


@pytest.mark.parametrize("cfg", GRID)
def test_analytic_denominator_matches_finite_difference(cfg):
    h = 1e-5
    for det in NAMED_DETECTIONS.values():
        tp = MomentTable(cfg.with_(phi=cfg.phi + h))
        tm = MomentTable(cfg.with_(phi=cfg.phi - h))
        stats = intensity_expectations if det.kind == "intensity" else homodyne_expectations
        sp, sm = stats(tp), stats(tm)
        fd = abs(det.c * (sp.mean_a - sm.mean_a) + det.d * (sp.mean_b - sm.mean_b)) / (2 * h)
        an = phase_sensitivity(cfg, det).denominator
        assert an == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_stationary_point_is_undefined():
    p = phase_sensitivity(SchemeConfig(alpha_mag=1, r=1, phi=0.0), NDIFF)
    assert not p.defined and math.isnan(p.delta_phi) and p.status == "undefined"
    with pytest.raises(UndefinedSensitivityError):
        p.require()
    assert phase_sensitivity(SchemeConfig(phi=1.0), NDIFF).require() > 0


def test_limits():
    lim = limits(SchemeConfig(alpha_mag=1, r=1))
    assert (lim.N, lim.sql, lim.hl) == pytest.approx((2.38109, 0.6481, 0.4200), abs=1e-4)
    lim = limits(SchemeConfig(alpha_mag=1, r=0))
    assert (lim.N, lim.sql, lim.hl) == pytest.approx((1, 1, 1))
    sub, ref = limits(SchemeConfig(m=3)), limits(SchemeConfig(m=3), "input")
    assert sub.N > ref.N
    assert ref.N == pytest.approx(1 + math.sinh(1) ** 2)
    assert sub.hl <= sub.sql
    with pytest.raises(ValueError):
        limits(SchemeConfig(), "bogus")
    with pytest.raises(DegenerateStateError):
        limits(SchemeConfig(alpha_mag=0, r=0))


def test_optimum_near_half_pi_for_difference_detection():
    opt = optimal_phase(SchemeConfig(alpha_mag=1, r=1, m=2), NDIFF, (0.1, 3.0, 200))
    assert abs(opt.phi - 1.6) < 0.15
    assert not opt.at_edge
    assert opt.delta_phi <= opt.grid_delta_phi


def test_quadrature_optimum_at_lower_edge():
    opt = optimal_phase(SchemeConfig(alpha_mag=1, r=1, m=1), XB, (0.01, 1.0, 100))
    assert opt.at_edge and opt.phi == 0.01


def test_symmetric_grid_recovers_interior_minimum():
    # the standard-scheme N_- curve is symmetric about pi/2
    opt = optimal_phase(SchemeConfig(alpha_mag=1, r=1), NDIFF,
                        (math.pi / 2 - 1, math.pi / 2 + 1, 21))
    assert opt.phi == pytest.approx(math.pi / 2, abs=1e-4)


def test_optimum_errors():
    with pytest.raises(NoFinitePointError):
        optimal_phase(SchemeConfig(alpha_mag=0, r=0), NDIFF, (0.1, 3.0, 10))
    with pytest.raises(ValueError):
        optimal_phase(SchemeConfig(), NDIFF, (0.1, 3.0, 2))


@pytest.mark.parametrize("m", range(4))
def test_loss_degrades_sensitivity_monotonically(m):
    Ts = np.round(np.arange(0.5, 1.0001, 0.1), 10)
    vals = [phase_sensitivity(SchemeConfig(alpha_mag=1, r=1, m=m, phi=1.0, T=T), NDIFF).delta_phi
            for T in Ts]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_sensitivity_curve():
    pts = sensitivity_curve(SchemeConfig(m=1), XB, [0.1, 0.2, 0.3])
    assert [p.phi for p in pts] == [0.1, 0.2, 0.3]
    assert all(p.detection == "xb" for p in pts)


@pytest.mark.parametrize("m,n", [(0, 0), (2, 0), (0, 2), (1, 1)])
def test_difference_detection_beats_single_port(m, n):
    cfg = SchemeConfig(alpha_mag=1, r=1, m=m, n=n)
    grid = (0.01, math.pi - 0.01, 120)
    best = {d.name: optimal_phase(cfg, d, grid).delta_phi for d in (NA, NB, NDIFF, XA, XB)}
    assert best["ndiff"] <= min(best["na"], best["nb"])
    if n == 0:
        assert best["xb"] <= best["xa"]


def test_optimum_refines_across_symmetric_tie():
    # the grid is symmetric about pi/2, so the two central points tie
    grid = (0.01, math.pi - 0.01, 300)
    a = optimal_phase(SchemeConfig(alpha_mag=1, r=1, m=2), NDIFF, grid)
    b = optimal_phase(SchemeConfig(alpha_mag=1, r=1, n=2), NDIFF, grid)
    assert a.delta_phi < a.grid_delta_phi
    assert abs(a.delta_phi - b.delta_phi) < 1e-10
    assert abs(a.phi - math.pi / 2) < 1e-6
