import numpy as np
import pytest

from gcsdyn.tracks import CoefficientTrack, Constant, PiecewiseConstant, Sampled, Sinusoid


def test_constant_and_sinusoid_values():
    assert Constant(2.0)(5.0) == 2.0
    s = Sinusoid(1.0, 0.2, 3.0, 0.1)
    assert s(0.7) == pytest.approx(1.0 + 0.2 * np.sin(2.2))
    assert s.derivative(0.7) == pytest.approx(0.6 * np.cos(2.2))


def test_piecewise_lookup_and_jump():
    p = PiecewiseConstant((0, 3, 7), (1.0, 1.4, 0.8))
    assert p(2.99) == 1.0 and p(3.0) == 1.4 and p(9) == 0.8
    assert p.joints == (3.0, 7.0)
    assert p.jump(7.0) == pytest.approx(-0.6)
    assert p.jump(5.0) == 0.0
    # the hint selects the segment, so values at a joint are unambiguous
    assert p(3.0, hint=2.5) == 1.0


@pytest.mark.parametrize("breaks,values", [((1, 2), (0, 1)), ((0, 2, 1), (0, 1, 2)), ((0,), ())])
def test_piecewise_validation(breaks, values):
    with pytest.raises(ValueError):
        PiecewiseConstant(breaks, values)


def test_sampled_with_derivatives_is_exact_for_cubics():
    t = np.linspace(0, 2, 7)
    ch = Sampled(t, t**3, 3 * t**2)
    assert ch(1.234) == pytest.approx(1.234**3, rel=1e-12)
    assert ch.derivative(1.234) == pytest.approx(3 * 1.234**2, rel=1e-12)


def test_sampled_without_derivatives_refuses_derivative():
    ch = Sampled([0, 1, 2], [0.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        ch.derivative(0.5)


def test_oscillator_coefficients_map():
    tr = CoefficientTrack.oscillator(2.0, 0.5, T=1)
    h0, h = tr.su_coefficients(0.3)
    assert h0 == 5.0 and h == complex(-1.5, -0.5)
    assert tr.omega_squared_eff(0.3) == pytest.approx(4 - 0.25)


def test_omega_squared_eff_includes_b_derivative():
    tr = CoefficientTrack.oscillator(1.0, Sinusoid(0.0, 0.2, 2.0), T=5)
    t = 0.4
    expected = 1 - (0.2 * np.sin(0.8)) ** 2 - 0.4 * np.cos(0.8)
    assert tr.omega_squared_eff(t) == pytest.approx(expected)


def test_families_and_joints():
    tr = CoefficientTrack({"omega": PiecewiseConstant((0, 2), (1, 2)),
                           "b": PiecewiseConstant((0, 1, 2), (0, 0.1, 0.2))}, T=4)
    assert tr.family == "oscillator"
    assert tr.joints == (1.0, 2.0)
    assert tr.segments() == [(0.0, 1.0), (1.0, 2.0), (2.0, 4.0)]
    assert CoefficientTrack({"h0": 1, "h": 0.2j}, 1).family == "linear"
    assert CoefficientTrack({"omega": 1, "F": 0.2j}, 1).family == "glauber"
    assert CoefficientTrack({"hmat": np.eye(2)}, 1).family == "matrix"


@pytest.mark.parametrize("channels", [{"h0": 1 + 1j}, {"omega": Sinusoid(1.0, 0.1j)},
                                      {"hmat": [[0, 1], [2, 0]]}, {"nonsense": 1.0}])
def test_rejects_invalid_channels(channels):
    with pytest.raises(ValueError):
        CoefficientTrack(channels, T=1)


def test_rejects_joint_beyond_T():
    with pytest.raises(ValueError, match="joint"):
        CoefficientTrack.oscillator(PiecewiseConstant((0, 2), (1, 2)), T=1)


def test_hamiltonian_kwargs():
    assert CoefficientTrack.glauber(2.0, 0.5j).hamiltonian_kwargs(0.0) == {"omega": 2.0, "F": 0.5j}
    kw = CoefficientTrack.linear(0.7, 0.3 + 0.1j).hamiltonian_kwargs(0.0)
    assert kw == {"h0": 0.7, "h": 0.3 + 0.1j}
