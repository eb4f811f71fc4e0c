import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psmzi.errors import DegenerateStateError, ZeroInformationError
from psmzi.fisher import (fisher, internal_photon_number_a, lossy_from_ideal, qcrb,
                          qcrb_from_fisher, qfi_ideal, qfi_lossy)
from psmzi.metrology import optimal_phase, phase_sensitivity
from psmzi.model import NAMED_DETECTIONS, SchemeConfig


def gaussian_qfi(a, r):
    return a * a * (1 + math.exp(2 * r)) + math.sinh(r) ** 2 + 0.5 * math.sinh(2 * r) ** 2


def test_coherent_qfi():
    assert qfi_ideal(SchemeConfig(alpha_mag=1, r=0)) == pytest.approx(2.0, rel=1e-9)


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("r", [0.0, 0.5, 1.0])
def test_gaussian_closed_form(a, r):
    F = qfi_ideal(SchemeConfig(alpha_mag=a, r=r))
    assert F == pytest.approx(gaussian_qfi(a, r), rel=1e-9, abs=1e-15)


def test_reference_values():
    cfg = SchemeConfig(alpha_mag=1, r=1)
    assert qfi_ideal(cfg) == pytest.approx(16.347212153476587, rel=1e-12)
    assert qcrb(cfg) == pytest.approx(0.247, abs=5e-4)
    assert internal_photon_number_a(cfg) == pytest.approx(1.19055, abs=1e-5)
    F0, na = qfi_ideal(cfg), internal_photon_number_a(cfg)
    want = 4 * 0.8 * na * F0 / (0.2 * F0 + 4 * 0.8 * na)
    assert qfi_lossy(cfg, 0.8) == pytest.approx(want, rel=1e-14)


def test_vacuum_has_no_information():
    cfg = SchemeConfig(alpha_mag=0, r=0)
    assert qfi_ideal(cfg) == 0
    with pytest.raises(ZeroInformationError):
        qcrb(cfg)
    res = fisher(cfg)
    assert math.isnan(res.qcrb_ideal) and math.isnan(res.qcrb_lossy)


def test_loss_endpoints_are_exact():
    for m, n in [(0, 0), (2, 0), (1, 1)]:
        cfg = SchemeConfig(alpha_mag=1, r=1, m=m, n=n)
        assert qfi_lossy(cfg, 1.0) == qfi_ideal(cfg)
        assert qfi_lossy(cfg, 0.0) == 0.0


@settings(max_examples=50, deadline=None)
@given(F=st.floats(1e-3, 1e3), n=st.floats(1e-3, 1e2), eta=st.floats(1e-6, 0.999))
def test_lossy_bound(F, n, eta):
    FL = lossy_from_ideal(F, n, eta)
    assert 0 <= FL <= F * (1 + 1e-12)
    assert FL <= 4 * eta * n / (1 - eta) * (1 + 1e-12)


@pytest.mark.parametrize("m,n", [(0, 0), (2, 0), (0, 2), (1, 1)])
def test_lossy_qfi_strictly_increasing_in_eta(m, n):
    cfg = SchemeConfig(alpha_mag=1, r=1, m=m, n=n)
    vals = [qfi_lossy(cfg, e) for e in np.linspace(0.05, 1.0, 20)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_qcrb_scaling():
    assert qcrb_from_fisher(4.0) == 0.5
    assert qcrb_from_fisher(1.0, v=4) == 0.5
    with pytest.raises(ValueError):
        qcrb_from_fisher(1.0, v=0)
    cfg = SchemeConfig(eta=0.7)
    assert qcrb(cfg, lossy=True) > qcrb(cfg)
    assert qcrb(cfg, v=9) == pytest.approx(qcrb(cfg) / 3)


def test_fisher_ignores_internal_loss():
    a, b = SchemeConfig(m=2, T=1.0), SchemeConfig(m=2, T=0.3, phi=2.0)
    assert qfi_ideal(a) == qfi_ideal(b)


def test_scheme_ordering():
    F = {mn: qfi_ideal(SchemeConfig(alpha_mag=1, r=1, m=mn[0], n=mn[1]))
         for mn in [(0, 0), (2, 0), (1, 1)]}
    assert F[(1, 1)] > F[(2, 0)] > F[(0, 0)]


def test_qcrb_decreases_with_subtraction():
    vals = [qcrb(SchemeConfig(alpha_mag=1, r=1, m=m)) for m in range(4)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("m,n", [(0, 0), (1, 0), (2, 0), (0, 2), (1, 1)])
@pytest.mark.parametrize("phi", [0.1, 0.8, 1.6, 2.5])
def test_qcrb_bounds_every_detection(m, n, phi):
    cfg = SchemeConfig(alpha_mag=1, r=1, m=m, n=n, phi=phi)
    bound = qcrb(cfg)
    for det in NAMED_DETECTIONS.values():
        p = phase_sensitivity(cfg, det)
        if p.defined:
            assert p.delta_phi >= bound - 1e-9


def test_fisher_result_fields():
    res = fisher(SchemeConfig(alpha_mag=1, r=1, m=1, eta=0.8), v=2)
    assert res.v == 2
    assert res.F_lossy < res.F_ideal
    assert res.qcrb_ideal == pytest.approx(1 / math.sqrt(2 * res.F_ideal))
    assert res.qcrb_lossy == pytest.approx(1 / math.sqrt(2 * res.F_lossy))


def test_degenerate():
    with pytest.raises(DegenerateStateError):
        qfi_ideal(SchemeConfig(alpha_mag=0, r=0, m=1))
