import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nslg.constants import field_scales
from nslg.errors import DomainError
from nslg.free_space import BeamSpec
from nslg.validity import (FringeProfile, Verdict, effective_length, fringe_energy_change,
                           space_regime, transfer_time_check, verdict_for, vphi_estimate)

SCALES = field_scales(1.0)


@pytest.mark.parametrize("ratio, verdict", [(1e6, Verdict.VALID), (100.0, Verdict.VALID),
                                            (99.9, Verdict.MARGINAL), (10.0, Verdict.MARGINAL),
                                            (9.99, Verdict.VIOLATED), (0.5, Verdict.VIOLATED)])
def test_verdict_thresholds(ratio, verdict):
    assert verdict_for(ratio) is verdict


def test_scanning_microscope_transfer_times():
    check = transfer_time_check(BeamSpec(0, 3, 1e-6), SCALES, 1e-9, 0.06)
    assert check.tau_d == pytest.approx(8.638e-9, rel=1e-3)
    assert check.T_c == pytest.approx(35.72e-12, rel=1e-3)
    assert check.crossing_time == pytest.approx(55.6e-18, rel=1e-3)
    assert check.verdict is Verdict.VALID


def test_high_oam_narrow_packet_breaks_the_transfer_condition():
    check = transfer_time_check(BeamSpec(0, 99, 0.003e-6), SCALES, 30e-9, 0.001)
    assert check.tau_d == pytest.approx(77.7e-15, rel=1e-3)
    assert check.crossing_time == pytest.approx(100.07e-15, rel=1e-3)
    assert check.verdict is Verdict.VIOLATED


def test_point_like_packet_is_always_valid():
    check = transfer_time_check(BeamSpec(0, 0, 1e-9), SCALES, 0.0, 0.5)
    assert math.isinf(check.ratio_d) and check.verdict is Verdict.VALID


@given(st.floats(1e-12, 1e-3), st.floats(1e-12, 1e-3), st.floats(1e-3, 0.99))
def test_verdict_monotone_in_sigma_z(a, b, beta):
    beam = BeamSpec(0, 3, 1e-7)
    lo, hi = sorted((a, b))
    order = [Verdict.VALID, Verdict.MARGINAL, Verdict.VIOLATED]
    v_lo = transfer_time_check(beam, SCALES, lo, beta).verdict
    v_hi = transfer_time_check(beam, SCALES, hi, beta).verdict
    assert order.index(v_hi) >= order.index(v_lo)


@pytest.mark.parametrize("sigma_z, beta", [(-1e-9, 0.5), (1e-9, 0.0), (1e-9, 1.0)])
def test_transfer_check_rejects(sigma_z, beta):
    with pytest.raises(DomainError):
        transfer_time_check(BeamSpec(0, 0, 1e-6), SCALES, sigma_z, beta)


@pytest.mark.parametrize("zeta, tau, lam, regime, exponent", [
    (3.0, 1.0, 0.1, 1, -9.0),
    (10.0, 1e7, 1e-6, 4, -1e12),
    (10.0, 2.0, 0.9, 2, -(10.0 / 1.8) ** 2),
    (1.0, 5.0, 0.1, 3, -25.0),
])
def test_space_regimes(zeta, tau, lam, regime, exponent):
    result = space_regime(zeta, tau, lam)
    assert result.regime == regime
    assert result.log_density_exponent == pytest.approx(exponent)


def test_space_regime_tie_picks_smaller_exponent():
    # tau = zeta: regimes 1 and 3 coincide in value
    result = space_regime(4.0, 4.0, 0.1)
    assert result.regime == 1 and result.log_density_exponent == -16.0
    # tau * Lambda = 1: regimes 3 and 4 coincide
    result = space_regime(1.0, 10.0, 0.1)
    assert result.log_density_exponent == pytest.approx(-100.0)


def test_space_regime_uses_magnitudes_and_rejects():
    assert space_regime(-3.0, -1.0, 0.1) == space_regime(3.0, 1.0, 0.1)
    for lam in (0.0, 1.0, -0.1):
        with pytest.raises(DomainError):
            space_regime(1.0, 1.0, lam)


def _tanh_profile(width=4e-3, length=0.18, n=801):
    z = np.linspace(0.0, 0.24, n)
    hz = 0.25 * (1 + np.tanh((z - 0.02) / width)) * (1 - np.tanh((z - 0.02 - length) / width))
    return z, hz


def test_hard_edge_profile_has_its_own_length():
    z = np.linspace(0.0, 1.0, 1001)
    hz = np.where((z >= 0.2) & (z <= 0.7), 2.0, 0.0)
    profile = FringeProfile.from_samples(z, hz)
    assert effective_length(profile).d == pytest.approx(0.5, abs=2e-3)
    assert profile.d0 == pytest.approx(0.5, abs=2e-3)


def test_soft_edges_shorten_the_effective_length():
    z, hz = _tanh_profile()
    result = effective_length(FringeProfile.from_samples(z, hz, d0=0.18))
    # each tanh edge removes width/2 from the squared-field integral
    assert result.d == pytest.approx(0.18 - 4e-3, rel=1e-4)
    assert result.boundary_shift == pytest.approx(-2e-3, rel=1e-3)


def test_solenoid_entrance_only_profile():
    z = np.linspace(0.0, 0.1, 201)
    hz = 0.5 * (1 + np.tanh((z - 0.02) / 2e-3))
    profile = FringeProfile.from_samples(z, hz)
    assert effective_length(profile).d > 0.0


@pytest.mark.parametrize("z, hz, H", [
    ([0.0, 0.1, 0.3], [0.0, 1.0, 0.0], 1.0),      # non-uniform
    ([0.0, 0.1], [0.0, 1.0], 1.0),                # too short
    ([0.0, 0.1, 0.2], [0.0, 2.0, 0.0], 1.0),      # above plateau
    ([0.0, 0.1, 0.2], [0.0, -1.0, 0.0], 1.0),     # negative
    ([0.0, 0.1, 0.2], [1.0, 1.0, 0.0], 1.0),      # upstream end not field-free
    ([0.0, 0.1, 0.2], [0.0, 1.0, 0.0], 0.0),      # no plateau
])
def test_fringe_profile_rejects(z, hz, H):
    with pytest.raises(DomainError):
        FringeProfile(np.asarray(z), np.asarray(hz), H, 0.1)


def test_fringe_energy_branches():
    change = fringe_energy_change(2e-6, 1.0, 1e-3)
    assert change.focusing == pytest.approx(0.0879, rel=1e-3)
    assert change.dE_minus == pytest.approx(-0.212, rel=1e-2)
    assert change.dE_plus == pytest.approx(0.388, rel=1e-2)
    zero = fringe_energy_change(2e-6, 1.0, 0.0)
    assert zero.dE_minus == zero.dE_plus == zero.focusing
    with pytest.raises(DomainError):
        fringe_energy_change(0.0, 1.0, 0.0)


@given(st.floats(1e-9, 1e-4), st.floats(0.0, 10.0), st.floats(-0.1, 0.1))
def test_fringe_branches_straddle_focusing_term(rho, H, v):
    change = fringe_energy_change(rho, H, v)
    assert change.dE_minus <= change.focusing <= change.dE_plus
    assert change.dE_plus - change.focusing == pytest.approx(change.focusing - change.dE_minus)


def test_azimuthal_velocity_estimate():
    result = vphi_estimate(BeamSpec(0, 3, 1e-6), 1.42e-6, SCALES)
    assert result.estimate == pytest.approx(4.2e-4, rel=0.02)
    assert 1e-4 < result.bound < 1e-2
    landau = vphi_estimate(BeamSpec(0, 0, 1e-6), SCALES.sigma_L, SCALES)
    assert landau.bound == pytest.approx(math.sqrt(SCALES.hbar_omega_ev / 510998.95), rel=1e-9)
