import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psmzi.errors import DegenerateStateError, OrderExceedsCapError
from psmzi.model import SchemeConfig
from psmzi.moments import (MomentTable, internal_mean, normalization, prefactor4_photon_number,
                           total_photon_number)

ORDERS = [(p1, p2, q1, q2) for p1 in range(3) for p2 in range(3) for q1 in range(3) for q2 in range(3)]

configs = st.builds(
    SchemeConfig,
    alpha_mag=st.sampled_from([0.3, 0.5, 1.0, 1.4]),
    r=st.sampled_from([0.0, 0.4, 1.0]),
    m=st.integers(0, 2), n=st.integers(0, 2),
    phi=st.floats(-3.0, 3.0), T=st.floats(0.2, 1.0),
)


@pytest.mark.parametrize("phi", [0.0, 0.7, 1.6, 3.0])
@pytest.mark.parametrize("T", [1.0, 0.6])
def test_unsubtracted_normalization_is_one(phi, T):
    assert normalization(SchemeConfig(alpha_mag=1, r=1, phi=phi, T=T)) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("m,n", [(1, 0), (2, 0), (0, 2), (1, 1), (3, 0)])
def test_normalization_independent_of_phase_and_loss(m, n):
    ref = normalization(SchemeConfig(alpha_mag=1, r=1, m=m, n=n))
    for phi, T in [(0.4, 1.0), (2.0, 0.7), (-1.0, 0.3), (1.6, 0.0)]:
        A2 = normalization(SchemeConfig(alpha_mag=1, r=1, m=m, n=n, phi=phi, T=T))
        assert A2 == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("phi", np.linspace(0, 2 * math.pi, 7))
@pytest.mark.parametrize("alpha,r", [(1, 1), (0.5, 0.3), (2, 0), (0, 1)])
def test_photon_number_conservation(phi, alpha, r):
    tbl = MomentTable(SchemeConfig(alpha_mag=alpha, r=r, phi=phi))
    total = tbl.universal_moment(1, 1, 0, 0) + tbl.universal_moment(0, 0, 1, 1)
    assert total.real == pytest.approx(alpha ** 2 + math.sinh(r) ** 2, rel=1e-10, abs=1e-12)


def test_reference_photon_number():
    N = total_photon_number(SchemeConfig(alpha_mag=1, r=1))
    assert N == pytest.approx(1 + math.sinh(1) ** 2, rel=1e-12)
    assert N == pytest.approx(2.38109, abs=1e-5)


def test_printed_closed_form_is_four_times_photon_number():
    for m, n in [(0, 0), (2, 0), (1, 1), (0, 2), (3, 0)]:
        cfg = SchemeConfig(alpha_mag=1, r=1, m=m, n=n, phi=0.7, T=0.8)
        assert prefactor4_photon_number(cfg) / total_photon_number(cfg) == pytest.approx(4.0, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(configs)
def test_hermitian_conjugate_pairs(cfg):
    tbl = MomentTable(cfg)
    for p1, p2, q1, q2 in ORDERS:
        a = tbl.universal_moment(p1, p2, q1, q2)
        b = tbl.universal_moment(p2, p1, q2, q1)
        assert a == pytest.approx(b.conjugate(), rel=1e-10, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(configs)
def test_loss_scales_normal_ordered_moments(cfg):
    # a_out -> sqrt(T) a_out + vacuum noise: normal-ordered moments pick up T^(order/2)
    lossless = MomentTable(cfg.with_(T=1.0))
    lossy = MomentTable(cfg)
    for o in ORDERS:
        want = cfg.T ** (sum(o) / 2) * lossless.universal_moment(*o)
        assert lossy.universal_moment(*o) == pytest.approx(want, rel=1e-10, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(configs)
def test_analytic_phase_derivative_matches_finite_difference(cfg):
    h = 1e-5
    tbl = MomentTable(cfg)
    plus, minus = MomentTable(cfg.with_(phi=cfg.phi + h)), MomentTable(cfg.with_(phi=cfg.phi - h))
    for o in [(1, 1, 0, 0), (0, 0, 1, 1), (0, 1, 0, 0), (0, 0, 0, 1), (2, 2, 0, 0), (1, 1, 1, 1),
              (0, 2, 0, 0), (1, 0, 1, 0)]:
        fd = (plus.universal_moment(*o) - minus.universal_moment(*o)) / (2 * h)
        scale = max(1.0, abs(tbl.universal_moment(*o)))
        assert abs(tbl.d_universal_moment(*o) - fd) <= 1e-6 * scale


def test_identity_interferometer_at_zero_phase():
    # B2 undoes B1 at phi = 0, so the output is the input state
    tbl = MomentTable(SchemeConfig(alpha_mag=1.3, r=0.5, phi=0.0))
    assert tbl.universal_moment(0, 1, 0, 0) == pytest.approx(1.3)
    assert tbl.universal_moment(0, 0, 1, 1).real == pytest.approx(math.sinh(0.5) ** 2)
    assert tbl.universal_moment(0, 0, 0, 2) == pytest.approx(-math.sinh(0.5) * math.cosh(0.5))


def test_coherent_phase_convention():
    tbl = MomentTable(SchemeConfig(alpha_mag=1.0, alpha_phase=0.6, r=0.0, phi=0.0))
    assert tbl.universal_moment(0, 1, 0, 0) == pytest.approx(complex(math.cos(0.6), math.sin(0.6)))


def test_internal_means():
    cfg = SchemeConfig(alpha_mag=1, r=1)
    # the 50:50 split puts half the photons in each arm
    assert internal_mean(cfg, 1, 0) == pytest.approx((1 + math.sinh(1) ** 2) / 2)
    assert internal_mean(cfg, 0, 1) == pytest.approx((1 + math.sinh(1) ** 2) / 2)
    assert internal_mean(cfg, 0, 0) == 1.0


def test_moment_table_caches_and_checks_order():
    tbl = MomentTable(SchemeConfig(m=1))
    assert tbl.universal_moment(1, 1, 0, 0) is tbl.universal_moment(1, 1, 0, 0)
    with pytest.raises(OrderExceedsCapError):
        tbl.universal_moment(3, 0, 0, 0)
    assert tbl.internal_mean(1, 0) == internal_mean(SchemeConfig(m=1), 1, 0)
    assert tbl.internal_moment(2, 2, 0, 0) / tbl.internal_moment(1, 1, 0, 0) == pytest.approx(
        internal_mean(SchemeConfig(m=1), 1, 0))


@pytest.mark.parametrize("m,n", [(1, 0), (0, 1), (2, 3)])
def test_vacuum_subtraction_is_degenerate(m, n):
    cfg = SchemeConfig(alpha_mag=0, r=0, m=m, n=n)
    with pytest.raises(DegenerateStateError):
        MomentTable(cfg)
    with pytest.raises(DegenerateStateError):
        normalization(cfg)
    with pytest.raises(DegenerateStateError):
        total_photon_number(cfg)


def test_subtraction_increases_photon_number():
    base = total_photon_number(SchemeConfig(alpha_mag=1, r=1))
    Ns = [total_photon_number(SchemeConfig(alpha_mag=1, r=1, m=m)) for m in range(4)]
    assert Ns[0] == pytest.approx(base)
    assert all(b > a for a, b in zip(Ns, Ns[1:]))
