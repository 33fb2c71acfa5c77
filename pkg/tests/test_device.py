import dataclasses
import math

import numpy as np
import pytest

from magnoncat import device
from magnoncat.device import (
    DegenerateSquidError,
    DeviceParams,
    ValidityWarning,
    coupling_J,
    coupling_grp,
    couplings,
    critical_distance,
    flux_per_quantum,
    modulated_grp,
    mu_zpf,
    squid_factor,
    thermal_occupation,
    transmon_frequency,
    zpf_amplitudes,
)

FIG2 = DeviceParams(EJ_max=50.0, EC=0.2, aJ=0.6, phi_b=math.pi / 2)


def at(phi_b, aJ=0.6, **kw):
    return dataclasses.replace(FIG2, phi_b=phi_b, aJ=aJ, **kw)


class TestSquidFactor:
    def test_zero_bias(self):
        assert squid_factor(0.0, 0.3) == 1.0

    def test_half_quantum(self):
        assert squid_factor(math.pi / 2, 0.6) == pytest.approx(0.6, abs=1e-12)

    def test_symmetric_quarter(self):
        assert squid_factor(math.pi / 4, 0.0) == pytest.approx(0.70711, abs=5e-6)

    def test_bounds(self):
        for aJ in (0.0, 0.3, 0.9, 1.0):
            for phi in np.linspace(-2 * math.pi, 2 * math.pi, 97):
                s = squid_factor(phi, aJ)
                assert aJ - 1e-12 <= s <= 1.0 + 1e-12

    def test_rejects_bad_asymmetry(self):
        with pytest.raises(ValueError):
            squid_factor(0.1, 1.5)


class TestTransmonFrequency:
    def test_zero_bias_value(self):
        # sqrt(8*0.2*50) - 0.2
        assert transmon_frequency(at(0.0)) == pytest.approx(8.744271909999159, rel=1e-12)

    def test_half_quantum_value(self):
        # sqrt(8*0.2*50*0.6) - 0.2
        assert transmon_frequency(FIG2) == pytest.approx(6.728203230275509, rel=1e-12)

    def test_degenerate_squid(self):
        with pytest.raises(DegenerateSquidError):
            transmon_frequency(at(math.pi / 2, aJ=0.0))

    def test_monotone_in_bias_deviation(self):
        freqs = [transmon_frequency(at(x)) for x in np.linspace(0, math.pi / 2, 25)]
        assert all(a > b for a, b in zip(freqs, freqs[1:]))

    def test_warns_outside_regime(self):
        with pytest.warns(ValidityWarning):
            transmon_frequency(at(math.pi / 2, aJ=0.05))


class TestZpfAmplitudes:
    def test_zero_bias_delta(self):
        _, d = zpf_amplitudes(at(0.0))
        assert d == pytest.approx(0.2990697562442441, rel=1e-12)

    def test_half_quantum_delta(self):
        _, d = zpf_amplitudes(FIG2)
        assert d == pytest.approx(0.33980884896942454, rel=1e-12)

    def test_product_is_half(self):
        for phi in np.linspace(0, math.pi, 31):
            for aJ in (0.1, 0.5, 0.9):
                n, d = zpf_amplitudes(at(phi, aJ=aJ))
                assert n * d == pytest.approx(0.5, abs=1e-14)


class TestMuZpf:
    def test_paper_spin_count(self):
        assert mu_zpf(FIG2) == pytest.approx(2.0323789297093183e-17, rel=1e-12)
        assert mu_zpf(FIG2) == pytest.approx(2.03e-17, rel=5e-3)

    def test_two_spins(self):
        p = dataclasses.replace(FIG2, Ns=2.0)
        from magnoncat.constants import CONSTANTS

        assert mu_zpf(p) == pytest.approx(CONSTANTS.hbar * CONSTANTS.gamma0, rel=1e-14)

    def test_sqrt_scaling(self):
        p4 = dataclasses.replace(FIG2, Ns=4 * FIG2.Ns)
        assert mu_zpf(p4) == pytest.approx(2 * mu_zpf(FIG2), rel=1e-14)


class TestFluxPerQuantum:
    def test_paper_geometry(self):
        val = flux_per_quantum(FIG2)
        assert val == pytest.approx(0.0007277842688224607, rel=1e-12)
        assert val == pytest.approx(7.3e-4, rel=0.02)

    def test_distance_scaling(self):
        p2 = dataclasses.replace(FIG2, d=2 * FIG2.d)
        r, d = FIG2.R_yig, FIG2.d
        expected = flux_per_quantum(FIG2) * math.hypot(r, d) / math.hypot(r, 2 * d)
        assert flux_per_quantum(p2) == pytest.approx(expected, rel=1e-12)

    def test_no_spins(self):
        assert flux_per_quantum(dataclasses.replace(FIG2, Ns=0.0)) == 0.0

    def test_warns_when_large(self):
        with pytest.warns(ValidityWarning):
            flux_per_quantum(dataclasses.replace(FIG2, Ns=1e19))


class TestCouplingJ:
    def test_fig2_magnitude(self):
        j = coupling_J(FIG2)
        assert j == pytest.approx(12.365376734330729, rel=1e-12)
        assert j == pytest.approx(12.4, rel=0.05)

    def test_symmetric_squid_vanishes(self):
        assert coupling_J(at(0.7, aJ=0.0)) == 0.0

    def test_capacitance_cancellation_at_zero_bias(self):
        p = at(0.0, aJ=0.6, cap_asym=0.6)
        assert coupling_J(p) == 0.0

    def test_correction_ratio(self):
        j = coupling_J(FIG2)
        jc = coupling_J(FIG2, include_correction=True)
        _, d_zpf = zpf_amplitudes(FIG2)
        assert (jc - j) / j == pytest.approx(-0.5 * d_zpf**2, rel=1e-12)

    def test_even_and_pi_periodic(self):
        for phi in (0.3, 0.8, 1.2):
            assert coupling_J(at(-phi)) == pytest.approx(coupling_J(at(phi)), rel=1e-12)
            assert coupling_J(at(phi + math.pi)) == pytest.approx(
                coupling_J(at(phi)), rel=1e-9
            )

    def test_degenerate(self):
        with pytest.raises(DegenerateSquidError):
            coupling_J(at(math.pi / 2, aJ=0.0))


class TestCouplingGrp:
    def test_zero_bias(self):
        assert coupling_grp(at(0.0)) == 0.0

    def test_half_quantum_exact_zero(self):
        assert coupling_grp(at(math.pi / 2)) == 0.0

    def test_fully_asymmetric_vanishes(self):
        assert coupling_grp(at(0.7, aJ=1.0)) == 0.0

    def test_sign_change_at_half_quantum(self):
        eps = 0.05
        left = coupling_grp(at(math.pi / 2 - eps))
        right = coupling_grp(at(math.pi / 2 + eps))
        assert left > 0 > right

    def test_pi_periodic_and_odd_about_half_quantum(self):
        for phi in (0.4, 1.0):
            assert coupling_grp(at(phi + math.pi)) == pytest.approx(
                coupling_grp(at(phi)), rel=1e-9
            )
            assert coupling_grp(at(math.pi - phi)) == pytest.approx(
                -coupling_grp(at(phi)), rel=1e-9
            )

    def test_correction_matches_exchange_ratio(self):
        p = at(0.9)
        g = coupling_grp(p)
        gc = coupling_grp(p, include_correction=True)
        j = coupling_J(p)
        jc = coupling_J(p, include_correction=True)
        assert (gc - g) / g == pytest.approx((jc - j) / j, rel=1e-12)


class TestModulatedGrp:
    def test_fig3_drive(self):
        g = modulated_grp(FIG2, math.pi / 10)
        assert g == pytest.approx(0.5112549652643726, rel=1e-12)
        assert g == pytest.approx(0.51, rel=0.05)

    def test_zero_drive(self):
        assert modulated_grp(FIG2, 0.0) == 0.0

    def test_linear(self):
        assert modulated_grp(FIG2, 0.2) == pytest.approx(
            2 * modulated_grp(FIG2, 0.1), rel=1e-12
        )

    def test_independent_of_dc_bias(self):
        assert modulated_grp(at(0.3), 0.1) == pytest.approx(
            modulated_grp(at(1.2), 0.1), rel=1e-12
        )

    def test_warns_on_strong_drive(self):
        with pytest.warns(ValidityWarning):
            modulated_grp(FIG2, 0.8)


class TestCriticalDistance:
    def test_reference_point(self):
        dc = critical_distance(0.12, 2e5, 3e-6, 100e-9)
        assert dc == pytest.approx(3.403078386439488e-6, rel=1e-12)
        assert dc == pytest.approx(3.40e-6, rel=0.01)

    def test_unit_cube_root(self):
        from magnoncat.constants import CONSTANTS

        bc = 2 * CONSTANTS.mu0 * 2e5 / 3
        assert critical_distance(bc, 2e5, 3e-6, 100e-9) == pytest.approx(
            50e-9 + 3e-6, rel=1e-12
        )

    def test_large_field_limit(self):
        assert critical_distance(1e12, 2e5, 3e-6, 100e-9) == pytest.approx(
            50e-9, rel=0.01
        )

    def test_monotone_in_field(self):
        vals = [critical_distance(b, 2e5, 3e-6, 100e-9) for b in np.linspace(0.05, 1, 20)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestThermalOccupation:
    def test_10mK(self):
        assert thermal_occupation(0.5, 0.010) == pytest.approx(0.10, abs=0.01)

    def test_20mK(self):
        assert thermal_occupation(0.5, 0.020) == pytest.approx(0.43, abs=0.02)

    def test_zero_temperature(self):
        assert thermal_occupation(0.5, 0.0) == 0.0
        assert thermal_occupation(7.0, 0.0) == 0.0


class TestFluxSweepShapes:
    """Qualitative coupling-vs-flux behavior over a quarter-period sweep."""

    phis = np.linspace(0.02, math.pi - 0.02, 301)

    def test_exchange_peaks_at_half_quantum(self):
        for aJ in (0.01, 0.3, 0.6, 0.9):
            js = [coupling_J(at(phi, aJ=aJ)) for phi in self.phis]
            peak = self.phis[int(np.argmax(js))]
            assert abs(peak - math.pi / 2) < 0.02

    def test_grp_interior_maximum_moves_with_asymmetry(self):
        # |g_rp| is symmetric about pi/2; scan the rising half only
        half = np.linspace(0.02, math.pi / 2 - 0.005, 301)
        locs = {}
        for aJ in (0.01, 0.3, 0.6, 0.9):
            gs = [abs(coupling_grp(at(phi, aJ=aJ))) for phi in half]
            locs[aJ] = half[int(np.argmax(gs))]
        # small asymmetry pushes the optimum toward pi/2
        assert locs[0.01] > locs[0.3] > locs[0.6] > locs[0.9]
        for loc in locs.values():
            assert 0 < loc < math.pi / 2

    def test_forced_zeros(self):
        assert coupling_J(at(0.4, aJ=0.0)) == 0.0
        assert coupling_grp(at(math.pi / 2, aJ=0.3)) == 0.0
        assert coupling_grp(at(0.0, aJ=0.3)) == 0.0


class TestCouplingSet:
    def test_aggregate_consistency(self):
        cs = couplings(FIG2, phi_ac=math.pi / 10)
        assert cs.J == pytest.approx(coupling_J(FIG2), rel=1e-12)
        assert cs.g_tilde == pytest.approx(modulated_grp(FIG2, math.pi / 10), rel=1e-12)
        assert cs.N_zpf * cs.delta_zpf == pytest.approx(0.5, abs=1e-14)
        assert cs.transmon_regime_ok

    def test_correction_shared_factor(self):
        p = at(1.1, aJ=0.8)
        cs = couplings(p)
        _, d_zpf = zpf_amplitudes(p)
        assert abs(cs.J_prime / cs.J) == pytest.approx(d_zpf**2 / 2, rel=1e-12)
        assert abs(cs.g_rp_prime / cs.g_rp) == pytest.approx(d_zpf**2 / 2, rel=1e-12)


class TestDeviceParams:
    def test_rejects_negative_distance(self):
        with pytest.raises(ValueError):
            DeviceParams(d=-1e-6)

    def test_rejects_bad_asymmetry(self):
        with pytest.raises(ValueError):
            DeviceParams(aJ=1.2)

    def test_regime_flag(self):
        assert device.transmon_regime_ok(FIG2)
        assert not device.transmon_regime_ok(at(math.pi / 2, aJ=0.05))

    def test_far_field_diagnostic(self):
        assert device.far_field_ok(FIG2) is None
        assert device.far_field_ok(dataclasses.replace(FIG2, R_squid=10e-6))
        assert not device.far_field_ok(dataclasses.replace(FIG2, R_squid=4e-6))
