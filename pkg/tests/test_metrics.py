"""Power accounting, gain chain, efficiency aggregation, and the two-route oracle."""

import math

import numpy as np
import pytest

from superdir import (BROADSIDE, END_FIRE, DipoleArray, Direction, Excitation,
                      NetworkMatrices, build_network, directivity, gain,
                      input_power, max_directivity_excitation,
                      mismatch_efficiency, quadrature_radiated_power,
                      radiated_power, realized_gain)

from conftest import WAVELENGTH, WIRE_RADIUS, random_valid_array, random_excitation


def lossless_half_wave(lam=1.0):
    arr = DipoleArray(lam, [0.0], [0.5 * lam], lam / 2000, conductivity=float("inf"))
    return arr, build_network(arr), Excitation(currents=[1.0])


class TestRadiatedPower:
    def test_zero_currents(self):
        _, net, _ = lossless_half_wave()
        assert radiated_power(net, np.zeros(1)) == 0.0

    def test_single_half_wave(self):
        _, net, exc = lossless_half_wave()
        assert radiated_power(net, exc) == pytest.approx(36.6, abs=0.8)

    def test_matches_quadrature_oracle(self):
        rng = np.random.default_rng(33)
        for _ in range(15):
            arr = random_valid_array(rng)
            exc = random_excitation(rng, arr.n_elements)
            net = build_network(arr)
            p_z = radiated_power(net, exc)
            p_q = quadrature_radiated_power(arr, exc)
            assert abs(p_z - p_q) / p_z < 0.01


class TestQuadratureOracle:
    def test_zero_currents(self, reference_array):
        assert quadrature_radiated_power(reference_array, np.zeros(4)) == 0.0

    def test_single_half_wave_self_resistance(self):
        arr, net, exc = lossless_half_wave()
        p = quadrature_radiated_power(arr, exc)
        assert p == pytest.approx(0.5 * net.z[0, 0].real, rel=0.01)

    def test_order_doubling_converged(self, reference_array, reference_excitation):
        p64 = quadrature_radiated_power(reference_array, reference_excitation, 64, 128)
        p128 = quadrature_radiated_power(reference_array, reference_excitation, 128, 256)
        assert abs(p64 - p128) / p128 < 1e-3


class TestInputPower:
    def test_lossless_equality(self):
        _, net, exc = lossless_half_wave()
        p_in, p_loss, p_rad = input_power(net, exc)
        assert p_loss == 0.0
        assert p_in == p_rad

    def test_quadratic_scaling(self, reference_array, reference_excitation):
        net = build_network(reference_array)
        base = input_power(net, reference_excitation)
        doubled = input_power(net, Excitation(currents=2 * reference_excitation.currents))
        for b, d in zip(base, doubled):
            assert d == pytest.approx(4 * b, rel=1e-12)

    def test_additivity_identity(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            arr = random_valid_array(rng)
            exc = random_excitation(rng, arr.n_elements)
            p_in, p_loss, p_rad = input_power(build_network(arr), exc)
            assert p_in == pytest.approx(p_loss + p_rad, rel=1e-12)


class TestGainAndDirectivity:
    def test_half_wave_directivity(self):
        arr, net, exc = lossless_half_wave()
        assert directivity(arr, net, exc, BROADSIDE) == pytest.approx(2.15, abs=0.05)
        assert gain(arr, net, exc, BROADSIDE) == pytest.approx(2.15, abs=0.05)

    def test_gain_invariant_under_current_scaling(self, reference_array,
                                                  reference_excitation):
        net = build_network(reference_array)
        g0 = gain(reference_array, net, reference_excitation, END_FIRE)
        scaled = Excitation(currents=(0.3 - 1.2j) * reference_excitation.currents)
        assert gain(reference_array, net, scaled, END_FIRE) == pytest.approx(g0, abs=1e-10)

    def test_ula_broadside_beats_single_dipole(self):
        lam = 1.0
        arr = DipoleArray(lam, (np.arange(4) - 1.5) * 0.5 * lam,
                          np.full(4, 0.5 * lam), lam / 2000,
                          conductivity=float("inf"))
        net = build_network(arr)
        d = directivity(arr, net, Excitation(currents=np.ones(4)), BROADSIDE)
        assert d > 2.15 + 5.0

    def test_degenerate_excitation_raises(self):
        arr, net, _ = lossless_half_wave()
        with pytest.raises(ValueError):
            gain(arr, net, np.zeros(1), BROADSIDE)


class TestMismatchEfficiency:
    def test_perfect_match(self):
        gamma = np.zeros(3, dtype=complex)
        assert mismatch_efficiency(gamma, Excitation(currents=[1, 1, 1])) == 1.0

    def test_total_reflection_single_port(self):
        assert mismatch_efficiency(np.array([1.0 + 0j]),
                                   Excitation(currents=[2.0])) == pytest.approx(0.0)

    def test_power_weighting(self):
        gamma = np.array([0.0, 0.8 + 0j])
        exc = Excitation(currents=[2.0, 1.0])
        expected = (4 * 1.0 + 1 * (1 - 0.64)) / 5
        assert mismatch_efficiency(gamma, exc) == pytest.approx(expected, rel=1e-12)

    def test_negative_not_clamped(self):
        gamma = np.array([1.5 + 0j])
        assert mismatch_efficiency(gamma, Excitation(currents=[1.0])) < 0


class TestRealizedGain:
    def test_matched_equals_gain(self, reference_array, reference_excitation):
        net = build_network(reference_array)
        matched = NetworkMatrices(z=net.z, r_loss=net.r_loss,
                                  s=np.zeros_like(net.s), z_ref=net.z_ref)
        report = realized_gain(reference_array, matched, reference_excitation, END_FIRE)
        assert report.realized_gain_dbi == pytest.approx(report.gain_dbi, abs=1e-12)
        assert report.mismatch_efficiency == pytest.approx(1.0)

    def test_reference_design_end_fire(self, reference_array, reference_excitation):
        net = build_network(reference_array)
        report = realized_gain(reference_array, net, reference_excitation, END_FIRE)
        assert report.realized_gain_dbi == pytest.approx(9.16, abs=0.5)

    def test_half_wave_ula_broadside(self):
        lam = WAVELENGTH
        arr = DipoleArray(lam, (np.arange(4) - 1.5) * 0.5 * lam,
                          np.full(4, 0.5 * lam), WIRE_RADIUS)
        net = build_network(arr)
        report = realized_gain(arr, net, Excitation(currents=np.ones(4)), BROADSIDE)
        assert report.realized_gain_dbi == pytest.approx(8.95, abs=0.7)

    def test_report_invariants(self):
        rng = np.random.default_rng(55)
        for _ in range(25):
            arr = random_valid_array(rng)
            exc = random_excitation(rng, arr.n_elements)
            net = build_network(arr)
            d = Direction(rng.uniform(0.2, math.pi - 0.2), rng.uniform(0, 2 * math.pi))
            report = realized_gain(arr, net, exc, d)
            assert report.p_in == pytest.approx(report.p_rad + report.p_loss, rel=1e-10)
            assert report.total_efficiency == pytest.approx(
                report.radiation_efficiency * report.mismatch_efficiency, abs=1e-12)
            if 0 < report.mismatch_efficiency <= 1:
                assert (report.realized_gain_dbi <= report.gain_dbi + 1e-12
                        <= report.directivity_dbi + 1e-12)

    def test_dbi_scaling_invariance(self):
        rng = np.random.default_rng(56)
        arr = random_valid_array(rng, n=3)
        exc = random_excitation(rng, 3)
        net = build_network(arr)
        base = realized_gain(arr, net, exc, END_FIRE)
        c = complex(rng.normal(), rng.normal())
        scaled = realized_gain(arr, net, Excitation(currents=c * exc.currents), END_FIRE)
        for attr in ("directivity_dbi", "gain_dbi", "realized_gain_dbi"):
            a, b = getattr(base, attr), getattr(scaled, attr)
            if math.isnan(a):
                assert math.isnan(b)
            else:
                assert b == pytest.approx(a, abs=1e-10)

    def test_negative_mismatch_surfaces_diagnostic(self):
        arr = DipoleArray(1.0, [0.0], [0.5], 5e-4)
        net = build_network(arr)
        hot = NetworkMatrices(z=net.z, r_loss=net.r_loss,
                              s=np.array([[1.4 + 0j]]), z_ref=50.0)
        report = realized_gain(arr, hot, Excitation(currents=[1.0]), BROADSIDE)
        assert math.isnan(report.realized_gain_dbi)
        assert any("realized gain undefined" in d for d in report.diagnostics)
        assert any("exceeds unity" in d for d in report.diagnostics)


class TestMaxDirectivityExcitation:
    def test_single_element(self):
        arr, net, _ = lossless_half_wave()
        exc = max_directivity_excitation(net, BROADSIDE, arr)
        np.testing.assert_allclose(np.abs(exc.currents), [1.0], atol=1e-12)

    def test_beats_uniform(self):
        lam = 1.0
        arr = DipoleArray(lam, (np.arange(4) - 1.5) * 0.35 * lam,
                          np.full(4, 0.5 * lam), lam / 2000)
        net = build_network(arr)
        opt = max_directivity_excitation(net, END_FIRE, arr)
        d_opt = directivity(arr, net, opt, END_FIRE)
        d_uni = directivity(arr, net, Excitation(currents=np.ones(4)), END_FIRE)
        assert d_opt >= d_uni

    def test_normalization(self, reference_array):
        net = build_network(reference_array)
        exc = max_directivity_excitation(net, END_FIRE, reference_array)
        assert np.max(np.abs(exc.currents)) == pytest.approx(1.0, rel=1e-12)

    def test_superdirective_trend_close_spacing(self):
        lam = 1.0
        arr = DipoleArray(lam, (np.arange(4) - 1.5) * 0.2 * lam,
                          np.full(4, 0.5 * lam), lam / 2000)
        net = build_network(arr)
        opt = max_directivity_excitation(net, END_FIRE, arr)
        d_opt = directivity(arr, net, opt, END_FIRE)
        d_uni = directivity(arr, net, Excitation(currents=np.ones(4)), END_FIRE)
        assert d_opt >= d_uni + 3.0


class TestPowerOracleProperty:
    def test_hundred_random_arrays(self):
        rng = np.random.default_rng(99)
        worst = 0.0
        for _ in range(100):
            arr = random_valid_array(rng)
            exc = random_excitation(rng, arr.n_elements)
            p_z = radiated_power(build_network(arr), exc)
            p_q = quadrature_radiated_power(arr, exc)
            worst = max(worst, abs(p_z - p_q) / p_z)
        assert worst < 0.01
