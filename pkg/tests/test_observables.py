import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from gcsdyn.algebra import su2_generators, su11_generators
from gcsdyn.exceptions import TruncationError
from gcsdyn.flow import ermakov_solve
from gcsdyn.observables import (ObservableReport, bose_occupation, magnetic_means, magnetic_s,
                                mean_value, quadrature_means, quadrature_means_matrix,
                                resolve_su2_J0_factor, resolve_uncertainty_exponent,
                                resolve_un1_prefactor, singular_q2_mean, su2_J0_printed,
                                su2_means_closed, su11_means_closed, thermal_average_check,
                                uncertainty_product, uncertainty_product_printed,
                                un1_means_closed, un1_means_matrix)
from gcsdyn.states import density, glauber_cs, singular_params, su2_cs, su11_cs
from gcsdyn.tracks import CoefficientTrack

disc = st.builds(lambda r, th: r * np.exp(1j * th), st.floats(0, 0.85), st.floats(-np.pi, np.pi))


class TestGroupMeans:
    @given(st.complex_numbers(max_magnitude=10), st.integers(1, 12))
    def test_su2(self, z, twoj):
        j = twoj / 2
        st_ = su2_cs(j, z)
        g = su2_generators(j)
        closed = su2_means_closed(j, z)
        for name in ("Jp", "Jm", "J0"):
            assert mean_value(st_, g[name]) == pytest.approx(closed[name], abs=1e-10)

    def test_printed_J0_lacks_weight(self):
        z = 0.4 + 0.3j
        assert su2_means_closed(2.5, z)["J0"].real == pytest.approx(2.5 * su2_J0_printed(z))

    @given(disc, st.sampled_from([0.25, 0.75, 1.0, 3.0]))
    @settings(max_examples=30)
    def test_su11(self, z, k):
        st_ = su11_cs(k, z, tail_tol=1e-15)
        g = su11_generators(k, st_.dim)
        closed = su11_means_closed(k, z)
        for name in ("Kp", "Km", "K0"):
            assert mean_value(st_, g[name]) == pytest.approx(closed[name], rel=1e-9, abs=1e-10)

    def test_mean_value_checks(self):
        st_ = glauber_cs(3.0, trunc=12, tail_tol=1.0)
        with pytest.raises(TruncationError):
            mean_value(st_, np.eye(12))
        with pytest.raises(ValueError):
            mean_value(glauber_cs(0.1), np.eye(3))


class TestQuadratures:
    @given(disc, st.sampled_from([0.25, 0.75]))
    @settings(max_examples=30)
    def test_closed_vs_matrix(self, z, k):
        closed = quadrature_means(k, z)
        mat = quadrature_means_matrix(k, z)
        for key in ("q2", "p2"):
            assert mat[key] == pytest.approx(closed[key], rel=1e-9)

    @given(disc, st.sampled_from([0.25, 0.75, 1.7]))
    def test_floor(self, z, k):
        assert uncertainty_product(k, z) >= 4 * k * k * (1 - 1e-12)

    @given(st.floats(0, 0.95), st.sampled_from([0.25, 0.75]))
    def test_equality_on_nonnegative_axis(self, r, k):
        assert uncertainty_product(k, r) == pytest.approx(4 * k * k, rel=1e-10)

    def test_equality_also_on_negative_axis(self):
        # |1 - z^2| = 1 - r^2 whenever z^2 is real and nonnegative
        assert uncertainty_product(0.25, -0.6) == pytest.approx(0.25, rel=1e-12)
        assert quadrature_means(0.25, -0.6)["q2"] != pytest.approx(quadrature_means(0.25, 0.6)["q2"])

    def test_printed_denominator_differs(self):
        z = 0.5j
        assert uncertainty_product_printed(0.25, z) == pytest.approx(
            uncertainty_product(0.25, z) * (1 - 0.25))

    def test_unsupported_weight(self):
        with pytest.raises(ValueError):
            quadrature_means_matrix(0.5, 0.1)


def plane_moments(N, a, L=None, n=321):
    """<x^2> and <p_x^2> of (x + iy)^N exp(-a r^2) on a 2D grid."""
    L = L or 9 / math.sqrt(a.real)
    x = np.linspace(-L, L, n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    w = X + 1j * Y
    g = np.exp(-a * (X**2 + Y**2))
    psi = w**N * g
    dpsi = (N * w ** max(N - 1, 0) - 2 * a * X * w**N) * g
    h = x[1] - x[0]
    norm = np.sum(np.abs(psi) ** 2) * h * h
    return (np.sum(X**2 * np.abs(psi) ** 2) * h * h / norm,
            np.sum(np.abs(dpsi) ** 2) * h * h / norm)


class TestMagnetic:
    @pytest.mark.parametrize("N", [0, 1, 2, 4])
    @pytest.mark.parametrize("s", [0.0, 0.3, 0.4 - 0.3j])
    def test_against_plane_quadrature(self, N, s):
        rho = 0.9
        m = magnetic_means(N, s, rho)
        a = (1 + s) / (2 * rho**2 * (1 - s))
        x2, px2 = plane_moments(N, complex(a))
        assert m["x2"] == pytest.approx(x2, rel=1e-9)
        assert m["px2"] == pytest.approx(px2, rel=1e-9)

    def test_width_scales_with_rho_squared(self):
        # <x^2> = rho^2 (N+1) / (2 lambda_s) singles out a = (1+s)/(2 rho^2 (1-s))
        N, s, rho = 2, 0.3 - 0.4j, 1.7
        m = magnetic_means(N, s, rho)
        assert m["x2"] == pytest.approx(rho**2 * (N + 1) / (2 * m["lambda_s"]), rel=1e-12)
        for width, ok in ((2 * rho**2, True), (2 * rho, False)):
            x2, _ = plane_moments(N, complex((1 + s) / (width * (1 - s))))
            assert bool(abs(x2 - m["x2"]) < 1e-9 * m["x2"]) is ok

    @pytest.mark.parametrize("N", [0, 1, 3])
    def test_radial_profile_form(self, N):
        # angular=False is the momentum of the phase-less profile r^N exp(-a r^2)
        a = 0.7 + 0.4j
        s = (2 * a - 1) / (2 * a + 1)
        f = lambda r: r**N * np.exp(-a * r * r)
        df = lambda r: (N * r ** (N - 1) if N else 0.0) * np.exp(-a * r * r) - 2 * a * r * f(r)
        norm = quad(lambda r: r * abs(f(r)) ** 2, 0, np.inf)[0]
        grad2 = quad(lambda r: r * abs(df(r)) ** 2, 0, np.inf)[0] / norm
        assert magnetic_means(N, s, 1.0, angular=False)["px2"] == pytest.approx(grad2 / 2, rel=1e-9)

    @pytest.mark.parametrize("N", [0, 1, 2, 4])
    def test_real_s_product(self, N):
        m = magnetic_means(N, 0.35)
        assert m["x2"] * m["px2"] == pytest.approx((N + 1) ** 2 / 4, rel=1e-12)
        p = magnetic_means(N, 0.35, angular=False)
        assert m["x2"] * p["px2"] == pytest.approx((N + 1) / 4, rel=1e-12)

    def test_s_mapping(self):
        assert magnetic_s(0.5, 0.0) == pytest.approx(-0.5j)
        assert magnetic_s(0.5j, np.pi / 4) == pytest.approx(-0.5j)


class TestSingular:
    def test_q2_against_density(self):
        d = 1.2
        k = (d + 1) / 2
        eps = 0.9 * np.exp(0.7j)
        z = 0.3 + 0.5j
        params = singular_params(d, z, abs(eps), np.angle(eps))
        val = quad(lambda x: x * x * density(params, x), 0, np.inf, epsabs=1e-13)[0]
        assert singular_q2_mean(k, z, eps) == pytest.approx(val, rel=1e-9)

    def test_period_for_constant_frequency(self):
        Omega = 1.3
        T = math.pi / Omega
        grid = np.linspace(0, 2 * T, 81)
        sol = ermakov_solve(CoefficientTrack.oscillator(Omega, T=2 * T), grid)
        q2 = np.array([singular_q2_mean(0.75, 0.4 - 0.2j, e) for e in sol.eps])
        np.testing.assert_allclose(q2[:41], q2[40:], rtol=1e-10)
        assert np.ptp(q2) > 0.1


class TestThermal:
    @pytest.mark.parametrize("bw", [0.5, 1.0, 2.0, 5.0])
    def test_occupation(self, bw):
        rep = thermal_average_check(bw, "number")
        assert rep.closed_form_value.real == pytest.approx(bose_occupation(bw), abs=1e-10)
        assert rep.abs_discrepancy < 1e-10
        assert rep.ok()

    def test_other_observables(self):
        bw = 1.3
        assert thermal_average_check(bw, "vacuum_projector").closed_form_value.real == \
            pytest.approx(-math.expm1(-bw), abs=1e-12)
        assert thermal_average_check(bw, "identity").closed_form_value.real == pytest.approx(1.0)
        rep = thermal_average_check(bw, lambda n: n**2)
        assert rep.abs_discrepancy < 1e-10

    def test_array_inputs(self):
        diag = np.arange(200.0) ** 1.5
        assert thermal_average_check(0.8, diag).abs_discrepancy < 1e-10
        assert thermal_average_check(0.8, np.diag(diag)).abs_discrepancy < 1e-10

    def test_rejects_off_diagonal(self):
        with pytest.raises(ValueError, match="diagonal"):
            thermal_average_check(1.0, np.ones((100, 100)))

    def test_rejects_short_operator(self):
        with pytest.raises(TruncationError):
            thermal_average_check(0.5, np.ones(5))

    def test_rejects_nonpositive_beta(self):
        with pytest.raises(ValueError):
            thermal_average_check(0.0)


class TestUN1:
    @given(st.lists(st.complex_numbers(max_magnitude=3), min_size=2, max_size=2), st.integers(1, 4))
    @settings(max_examples=30)
    def test_closed_vs_matrix(self, z, m):
        np.testing.assert_allclose(un1_means_matrix(2, m, z), un1_means_closed(m, z), atol=1e-10)

    def test_trace_is_m(self):
        assert np.trace(un1_means_closed(3, [0.2, 1 - 1j])).real == pytest.approx(3)


class TestResolutions:
    def test_uncertainty_exponent(self):
        r = resolve_uncertainty_exponent()
        assert r.value == 2 and r.printed_value == 1
        assert r.consistent and len(r.samples) >= 100

    def test_su2_factor(self):
        r = resolve_su2_J0_factor()
        assert r.consistent and r.value == 1.0

    def test_un1_prefactor(self):
        r = resolve_un1_prefactor()
        assert r.consistent and r.value == 1.0 and r.printed_value == 0.5

    def test_report_discrepancies(self):
        rep = ObservableReport("x", 1.0, 1.0 + 1e-9)
        assert rep.abs_discrepancy == pytest.approx(1e-9)
        assert rep.ok()
        assert not ObservableReport("x", 1.0, 1.1).ok()
