import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.linalg import expm
from scipy.special import eval_genlaguerre

from gcsdyn.algebra import fock_ladder, su2_generators, su11_generators
from gcsdyn.exceptions import TruncationError
from gcsdyn.flow import ermakov_solve
from gcsdyn.states import (WavefunctionParams, density, eval_wavefunction, glauber_cs, laguerre,
                           magnetic_params, parity_cs, parity_params, singular_eigenfunction,
                           singular_params, su2_cs, su11_cs, thermal_cs, un1_cs, un1_kernel,
                           wavepacket_identity_check)
from gcsdyn.tracks import CoefficientTrack, Sinusoid

disc = st.builds(lambda r, th: r * np.exp(1j * th), st.floats(0, 0.9), st.floats(-np.pi, np.pi))
plane = st.complex_numbers(max_magnitude=3)
unit_disc = st.builds(lambda r, th: r * np.exp(1j * th), st.floats(0, 1), st.floats(-np.pi, np.pi))


def fidelity(u, v):
    return abs(np.vdot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v))


class TestNormalization:
    @given(plane)
    def test_glauber(self, z):
        st_ = glauber_cs(z)
        assert st_.norm == pytest.approx(1.0, abs=1e-12)
        assert st_.missing_mass < 1e-12

    @given(disc, st.sampled_from([0.25, 0.5, 0.75, 1.5, 4.0]))
    def test_su11(self, z, k):
        assert su11_cs(k, z).norm == pytest.approx(1.0, abs=1e-12)

    @given(disc, st.sampled_from([1, -1]))
    def test_parity(self, z, sign):
        assert parity_cs(sign, z).norm == pytest.approx(1.0, abs=1e-12)

    @given(st.complex_numbers(max_magnitude=50), st.integers(1, 40))
    def test_su2(self, z, twoj):
        assert su2_cs(twoj / 2, z).norm == pytest.approx(1.0, abs=1e-12)

    @given(st.lists(st.complex_numbers(max_magnitude=3), min_size=2, max_size=2),
           st.integers(1, 5))
    def test_un1(self, z, m):
        assert un1_cs(2, m, z).norm == pytest.approx(1.0, abs=1e-12)

    def test_thermal(self):
        s = thermal_cs(0.6)
        assert s.norm == pytest.approx(1.0, abs=1e-12)
        assert s.dims[0] == s.dims[1]

    def test_large_truncation_does_not_overflow(self):
        s = su11_cs(0.25, 0.995, trunc=4096, tail_tol=1.0)
        assert np.all(np.isfinite(s.coeffs))
        assert 0 < s.missing_mass < 1


class TestTruncation:
    def test_explicit_trunc_too_small(self):
        with pytest.raises(TruncationError):
            su11_cs(0.75, 0.9, trunc=16)

    def test_auto_growth_meets_tolerance(self):
        s = su11_cs(0.75, 0.9, tail_tol=1e-14)
        assert s.missing_mass < 1e-14
        assert s.dim > 16

    def test_tail_mass_is_last_row(self):
        s = glauber_cs(2.0, trunc=8, tail_tol=1.0)
        assert s.tail_mass == pytest.approx(abs(s.coeffs[-1]) ** 2)

    def test_disc_bound(self):
        with pytest.raises(ValueError):
            su11_cs(0.5, 1.0)
        with pytest.raises(ValueError):
            parity_cs(1, 1.2j)


class TestGroupOrbits:
    """Closed-form expansions against exponentiated generators."""

    @given(st.complex_numbers(max_magnitude=2))
    @settings(max_examples=30)
    def test_glauber_displacement(self, z):
        d = 80
        a = fock_ladder(d)
        vac = np.zeros(d)
        vac[0] = 1
        ref = expm(z * a.conj().T - np.conj(z) * a) @ vac
        np.testing.assert_allclose(glauber_cs(z, d).coeffs[:40], ref[:40], atol=1e-10)

    @pytest.mark.parametrize("k", [0.25, 0.75, 2.0])
    @pytest.mark.parametrize("xi", [0.3, 0.8 - 0.4j])
    def test_su11_squeeze(self, k, xi):
        d = 300
        g = su11_generators(k, d)
        vac = np.zeros(d)
        vac[0] = 1
        ref = expm(xi * g["Kp"] - np.conj(xi) * g["Km"]) @ vac
        z = np.exp(1j * np.angle(xi)) * np.tanh(abs(xi))
        np.testing.assert_allclose(su11_cs(k, z, trunc=d, tail_tol=1.0).coeffs[:100], ref[:100],
                                   atol=1e-10)

    @given(st.floats(0, 1.5), st.floats(-np.pi, np.pi), st.integers(1, 12))
    @settings(max_examples=30)
    def test_su2_rotation(self, r, phi, twoj):
        j = twoj / 2
        g = su2_generators(j)
        xi = r * np.exp(1j * phi)
        low = np.zeros(twoj + 1)
        low[0] = 1
        ref = expm(xi * g["Jp"] - np.conj(xi) * g["Jm"]) @ low
        z = np.exp(1j * phi) * np.tan(r)
        np.testing.assert_allclose(su2_cs(j, z).coeffs, ref, atol=1e-10)

    @given(st.complex_numbers(min_magnitude=0.05, max_magnitude=20), st.integers(1, 12))
    def test_antipodal_chart_is_same_ray(self, z, twoj):
        a = su2_cs(twoj / 2, z)
        b = su2_cs(twoj / 2, -1 / z, antipodal=True)
        assert abs(a.overlap(b)) == pytest.approx(1.0, abs=1e-10)

    @given(disc)
    def test_parity_even_is_k_quarter(self, z):
        p = parity_cs(1, z, trunc=400, tail_tol=1.0)
        s = su11_cs(0.25, z, trunc=200, tail_tol=1.0)
        np.testing.assert_allclose(p.coeffs[0::2], s.coeffs, atol=1e-13)
        assert np.all(p.coeffs[1::2] == 0)

    @given(disc)
    def test_parity_odd_is_k_three_quarter(self, z):
        p = parity_cs(-1, z, trunc=400, tail_tol=1.0)
        s = su11_cs(0.75, z, trunc=200, tail_tol=1.0)
        np.testing.assert_allclose(p.coeffs[1::2], s.coeffs, atol=1e-13)


class TestKernel:
    @given(st.lists(plane, min_size=3, max_size=3), st.lists(plane, min_size=3, max_size=3),
           st.integers(1, 4))
    @settings(max_examples=40)
    def test_overlap(self, y, z, m):
        numeric = un1_cs(3, m, y).overlap(un1_cs(3, m, z))
        assert numeric == pytest.approx(un1_kernel(m, y, z), abs=1e-10)

    @given(st.lists(plane, min_size=2, max_size=2), st.lists(plane, min_size=2, max_size=2))
    def test_bounded_by_one(self, y, z):
        assert abs(un1_kernel(3, y, z)) <= 1 + 1e-12

    def test_spin_case(self):
        # N = 1 reduces to spin-m/2 states; y*z enters through the plain product
        y, z = 0.3 - 0.2j, -1.1 + 0.5j
        spin = su2_cs(1.5, y).overlap(su2_cs(1.5, z))
        assert spin == pytest.approx(un1_kernel(3, y, z), abs=1e-12)


class TestWavepacket:
    @given(unit_disc, unit_disc)
    @settings(max_examples=10, deadline=None)
    def test_identity(self, alpha, z):
        res = wavepacket_identity_check(alpha, z, 40)
        assert max(res.identity, res.product, res.eigen) < 1e-10


class TestLaguerre:
    @pytest.mark.parametrize("n", [0, 1, 2, 7, 30])
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 2.3])
    def test_against_scipy(self, n, alpha):
        x = np.linspace(0, 20, 41)
        np.testing.assert_allclose(laguerre(n, alpha, x), eval_genlaguerre(n, alpha, x),
                                   rtol=1e-10, atol=1e-10)


def hermite_functions(nmax, x):
    out = np.zeros((nmax, len(x)))
    out[0] = np.pi ** -0.25 * np.exp(-x**2 / 2)
    if nmax > 1:
        out[1] = np.sqrt(2) * x * out[0]
    for n in range(2, nmax):
        out[n] = np.sqrt(2 / n) * x * out[n - 1] - np.sqrt((n - 1) / n) * out[n - 2]
    return out


class TestWavefunctions:
    @pytest.mark.parametrize("params", [
        parity_params(1, 0.3 + 0.4j),
        parity_params(-1, -0.5j),
        singular_params(1.5, 0.2 - 0.3j, rho=1.3, gamma=0.4, rho_dot=0.2, b=0.1),
        magnetic_params(3, 0.4 + 0.2j, rho=0.8, gamma=0.3),
    ])
    def test_normalized(self, params):
        if params.family.value == "parity":
            val = quad(lambda x: density(params, x), -np.inf, np.inf)[0]
        elif params.family.value == "singular":
            val = quad(lambda x: density(params, x), 0, np.inf)[0]
        else:
            val = quad(lambda r: 2 * np.pi * r * density(params, r), 0, np.inf)[0]
        assert val == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("sign", [1, -1])
    @pytest.mark.parametrize("z", [0.3, 0.4 - 0.5j])
    def test_parity_matches_fock_expansion(self, sign, z):
        x = np.linspace(-5, 5, 101)
        c = parity_cs(sign, z, trunc=160, tail_tol=1e-14).coeffs
        phi = hermite_functions(len(c), x)
        # a^dagger = (p + i q)/sqrt(2) is i times the textbook creation operator
        psi = (c * 1j ** np.arange(len(c))) @ phi
        ref = eval_wavefunction(parity_params(sign, z), x)
        assert fidelity(psi, ref) == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(np.abs(psi), np.abs(ref), atol=1e-8)

    @pytest.mark.parametrize("sign,power", [(1, 0), (-1, 2)])
    def test_parity_density_shape(self, sign, power):
        # |psi|^2 is x^power exp(-lambda x^2) up to a constant
        p = parity_params(sign, 0.2 - 0.5j)
        x = np.linspace(0.1, 3, 30)
        ratio = density(p, x) / (x**power * np.exp(-p.lam * x * x))
        np.testing.assert_allclose(ratio, ratio[0], rtol=1e-12)

    def test_singular_coherent_state_is_eigenfunction_sum(self):
        d = 1.5
        k = (d + 1) / 2
        tr = CoefficientTrack.oscillator(Sinusoid(1.0, 0.3, 1.7), 0.3, T=2)
        sol = ermakov_solve(tr, np.linspace(0, 2, 21)).at(2.0)
        z = 0.3 - 0.4j
        x = np.linspace(0.01, 6, 300)
        c = su11_cs(k, z, trunc=200, tail_tol=1e-14).coeffs
        total = sum(cn * singular_eigenfunction(d, n, sol, x) for n, cn in enumerate(c))
        params = singular_params(d, z, sol.rho[0], sol.gamma[0], sol.rho_dot[0], sol.b[0])
        direct = eval_wavefunction(params, x)
        assert fidelity(total, direct) == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(np.abs(total), np.abs(direct), atol=1e-9)

    def test_singular_eigenfunctions_orthonormal(self):
        d = 0.7
        eps = (0.8 * np.exp(0.3j), 1j / 0.8 * np.exp(0.3j))
        funcs = [lambda x, n=n: singular_eigenfunction(d, n, eps, np.atleast_1d(x))[0] for n in range(4)]
        for m in range(4):
            for n in range(4):
                re = quad(lambda x: (np.conj(funcs[m](x)) * funcs[n](x)).real, 0, np.inf)[0]
                assert re == pytest.approx(float(m == n), abs=1e-9)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            eval_wavefunction(singular_params(1.0, 0.2), [-1.0, 1.0])
        with pytest.raises(ValueError):
            WavefunctionParams("parity", -1.0, 0)
