"""Classical equations of motion on the coherent-state phase spaces.

Phase spaces: the plane (Heisenberg-Weyl), the sphere in the stereographic
chart (SU(2)), the unit disc (SU(1,1)) and ``C^N`` (U(N+1)).  None of the
flow right-hand sides takes a representation weight: the classical motion is
shared by every representation of the group.

Integration uses a fixed-step classical RK4 scheme.  Each step is repeated
as two half steps and the difference gives a Richardson estimate of the
local error; the half-step result is kept.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .exceptions import (ChartSingularityError, DomainExitError, ErrorBudgetExceeded,
                         MobiusDegeneracyError)
from .tracks import CoefficientTrack

__all__ = [
    "Domain",
    "PhasePoint",
    "Trajectory",
    "integrate",
    "glauber_rhs",
    "glauber_flow",
    "glauber_closed_form",
    "su2_riccati_rhs",
    "su11_riccati_rhs",
    "su2_flow",
    "su11_flow",
    "un1_flow",
    "su2_classical_hamiltonian",
    "su11_classical_hamiltonian",
    "kahler_flow_check",
    "EpsilonSolution",
    "ermakov_solve",
    "MobiusElement",
    "mobius_from_epsilon",
    "mobius_apply",
    "disc_distance",
]

DISC_EDGE = 1.0 - 1e-12


class Domain(str, enum.Enum):
    PLANE = "plane"
    SPHERE = "sphere"
    DISC = "disc"
    CN = "CN"


@dataclass(frozen=True)
class PhasePoint:
    """A phase-space point tagged with its domain."""

    domain: Domain
    value: complex | np.ndarray
    antipodal: bool = False

    def __post_init__(self):
        dom = Domain(self.domain)
        object.__setattr__(self, "domain", dom)
        if dom is Domain.CN:
            object.__setattr__(self, "value", np.asarray(self.value, dtype=complex).ravel())
        else:
            object.__setattr__(self, "value", complex(self.value))
        if not np.all(np.isfinite(self.value)):
            raise ValueError("phase-space coordinates must be finite")
        if dom is Domain.DISC and abs(self.value) >= 1.0:
            raise ValueError(f"disc point must satisfy |z| < 1, got |z| = {abs(self.value)}")


@dataclass
class Trajectory:
    """Integrated trajectory sampled on the output grid.

    ``z`` is always expressed in the standard chart.  For sphere flows,
    ``chart[i]`` is true when the integrator was working in the antipodal
    chart ``w = -1/z`` at ``t[i]``.
    """

    t: np.ndarray
    z: np.ndarray
    domain: Domain
    max_local_error: float
    error_estimate: float
    chart: np.ndarray | None = None

    def __len__(self):
        return len(self.t)


# --------------------------------------------------------------------------
# integrator

def _rk4(rhs, t, y, h, k1=None):
    if k1 is None:
        k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _magnitude(v) -> float:
    if np.ndim(v) == 0:
        return abs(v)
    return float(np.sqrt(np.vdot(v, v).real))


def integrate(rhs: Callable, y0, grid, *, dt: float = 1e-3,
              check: Callable | None = None, error_budget: float | None = None,
              on_step: Callable | None = None) -> Trajectory:
    """Fixed-step RK4 with a half-step Richardson error estimate.

    Parameters
    ----------
    rhs : callable
        ``rhs(t, y) -> dy/dt`` for a complex scalar or complex array ``y``.
    y0 : complex or array_like
        Initial value at ``grid[0]``.
    grid : array_like
        Strictly increasing output times.  Each interval is split into
        ``ceil(interval / dt)`` equal steps.
    dt : float
        Maximum step.
    check : callable, optional
        ``check(t, y)`` called after every step; raise to abort.
    error_budget : float, optional
        Abort with :class:`ErrorBudgetExceeded` when a local error estimate
        exceeds this value.
    on_step : callable, optional
        ``on_step(t, y) -> y`` applied after every accepted step (used for
        chart changes).

    Returns
    -------
    Trajectory
        ``error_estimate`` is the accumulated local estimate, which scales
        like ``dt**4``; ``max_local_error`` scales like ``dt**5``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 1:
        raise ValueError("grid must be a non-empty 1-d array")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    if dt <= 0:
        raise ValueError("dt must be positive")
    scalar = np.ndim(y0) == 0
    y = complex(y0) if scalar else np.array(y0, dtype=complex)
    out = np.empty((len(grid),) + np.shape(y), dtype=complex)
    out[0] = y
    max_local = 0.0
    accumulated = 0.0
    for i in range(len(grid) - 1):
        t0, t1 = grid[i], grid[i + 1]
        n = max(1, math.ceil((t1 - t0) / dt - 1e-9))
        h = (t1 - t0) / n
        for s in range(n):
            t = t0 + s * h
            k1 = rhs(t, y)
            full = _rk4(rhs, t, y, h, k1)
            half = _rk4(rhs, t, y, 0.5 * h, k1)
            y_new = _rk4(rhs, t + 0.5 * h, half, 0.5 * h)
            t_new = t0 + (s + 1) * h
            if not np.all(np.isfinite(y_new)):
                raise DomainExitError("integration produced non-finite values", t_new)
            err = _magnitude(y_new - full) / 15.0
            if error_budget is not None and err > error_budget:
                raise ErrorBudgetExceeded(
                    f"local error estimate {err:.3e} exceeds budget {error_budget:.3e}", t_new)
            max_local = max(max_local, err)
            accumulated += err
            y = y_new
            if check is not None:
                check(t_new, y)
            if on_step is not None:
                y = on_step(t_new, y)
        out[i + 1] = y
    return Trajectory(grid, out, Domain.PLANE, max_local, accumulated)


def _segmented(make_rhs, y0, grid, track: CoefficientTrack, *, dt, check=None,
               on_step=None, at_joint=None) -> Trajectory:
    """Integrate across the smooth segments of ``track``.

    ``make_rhs(hint)`` returns the right-hand side for the segment containing
    ``hint``.  ``at_joint(t, y) -> y`` applies matching conditions at joints.
    Output values at a joint are right limits.
    """
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    tol = 1e-12 * max(1.0, abs(grid[-1]))
    joints = [tb for tb in track.joints if grid[0] + tol < tb < grid[-1] - tol]
    if not joints:
        hint = 0.5 * (grid[0] + grid[-1])
        return integrate(make_rhs(hint), y0, grid, dt=dt, check=check, on_step=on_step)

    stops = [grid[0], *joints, grid[-1]]
    out = np.empty((len(grid),) + np.shape(y0), dtype=complex)
    max_local = 0.0
    accumulated = 0.0
    y = y0
    for a, b in zip(stops[:-1], stops[1:]):
        inside = (grid > a + tol) & (grid < b - tol)
        sub = np.concatenate(([a], grid[inside], [b]))
        piece = integrate(make_rhs(0.5 * (a + b)), y, sub, dt=dt, check=check, on_step=on_step)
        max_local = max(max_local, piece.max_local_error)
        accumulated += piece.error_estimate
        y = piece.z[-1]
        y = y.item() if np.ndim(y) == 0 else y
        if at_joint is not None and b is not stops[-1]:
            y = at_joint(b, y)
        out[inside] = piece.z[1:-1]
        at_a = np.abs(grid - a) <= tol
        if np.any(at_a) and a == stops[0]:
            out[at_a] = y0
        at_b = np.abs(grid - b) <= tol
        out[at_b] = y
    return Trajectory(grid, out, Domain.PLANE, max_local, accumulated)


# --------------------------------------------------------------------------
# Heisenberg-Weyl

def glauber_rhs(z, omega, F):
    """``dz/dt`` for ``i dz/dt = omega z + F``."""
    return -1j * (omega * z + F)


def glauber_flow(z0: complex, track: CoefficientTrack, grid, *, dt: float = 1e-3) -> Trajectory:
    """Plane flow: rotation by ``omega(t)`` superposed with translation by ``F(t)``."""

    def make_rhs(hint):
        def rhs(t, z):
            omega, F = track.glauber_coefficients(t, hint)
            return -1j * (omega * z + F)
        return rhs

    traj = _segmented(make_rhs, complex(z0), grid, track, dt=dt)
    traj.domain = Domain.PLANE
    return traj


def _quad_complex(f, a, b, points):
    pts = [p for p in points if a < p < b] or None
    re = quad(lambda s: f(s).real, a, b, points=pts, epsabs=1e-13, epsrel=1e-12, limit=400)[0]
    im = quad(lambda s: f(s).imag, a, b, points=pts, epsabs=1e-13, epsrel=1e-12, limit=400)[0]
    return complex(re, im)


def glauber_closed_form(z0: complex, track: CoefficientTrack, t: float) -> complex:
    """Integrating-factor solution ``(z0 - i int F e^{i Phi}) e^{-i Phi(t)}``.

    ``Phi(t) = int_0^t omega``.  Integrals by adaptive quadrature.
    """
    joints = track.joints

    def omega(s):
        return track.glauber_coefficients(s)[0]

    def phi(s):
        if s == 0:
            return 0.0
        return quad(omega, 0.0, s, points=[p for p in joints if 0 < p < s] or None,
                    epsabs=1e-13, epsrel=1e-12, limit=400)[0]

    forcing = _quad_complex(lambda s: track.glauber_coefficients(s)[1] * np.exp(1j * phi(s)),
                            0.0, t, joints) if t > 0 else 0.0
    return (complex(z0) - 1j * forcing) * np.exp(-1j * phi(t))


# --------------------------------------------------------------------------
# SU(2) and SU(1,1)

def su2_riccati_rhs(z, h0, h):
    """``dz/dt`` from ``i dz/dt = h* + h0 z - h z^2`` (sphere, stereographic chart)."""
    return -1j * (np.conj(h) + h0 * z - h * z * z)


def su11_riccati_rhs(z, h0, h):
    """``dz/dt`` from ``i dz/dt = h* z^2 + h0 z + h`` (unit disc)."""
    return -1j * (np.conj(h) * z * z + h0 * z + h)


def su2_flow(z0: complex, track: CoefficientTrack, grid, *, dt: float = 1e-3,
             chart_threshold: float = 2.0) -> Trajectory:
    """Sphere flow with automatic switching to the antipodal chart.

    When ``|z|`` exceeds ``chart_threshold`` the integrator continues with
    ``w = -1/z``, which obeys the same Riccati family with
    ``(h0, h) -> (-h0, -h*)``; it switches back symmetrically.
    """
    state = {"flipped": False}
    flips: list[tuple[float, bool]] = []

    def on_step(t, y):
        if abs(y) > chart_threshold:
            state["flipped"] = not state["flipped"]
            flips.append((t, state["flipped"]))
            return -1.0 / y
        return y

    def make_rhs(hint):
        def rhs(t, y):
            h0, h = track.su_coefficients(t, hint)
            if state["flipped"]:
                h0, h = -h0, -np.conj(h)
            return -1j * (np.conj(h) + h0 * y - h * y * y)
        return rhs

    y0 = complex(z0)
    if abs(y0) > chart_threshold:
        state["flipped"] = True
        y0 = -1.0 / y0
    start_flipped = state["flipped"]
    traj = _segmented(make_rhs, y0, grid, track, dt=dt, on_step=on_step)

    chart = np.full(len(traj.t), start_flipped)
    for t_flip, value in flips:
        chart[traj.t >= t_flip - 1e-12] = value
    with np.errstate(divide="ignore"):
        z = np.where(chart, -1.0 / traj.z, traj.z)
    return Trajectory(traj.t, z, Domain.SPHERE, traj.max_local_error,
                      traj.error_estimate, chart)


def _disc_check(t, z):
    if abs(z) >= DISC_EDGE:
        raise DomainExitError(
            f"disc trajectory reached |z| = {abs(z):.15f}; reduce dt or check the "
            "coefficients are Hermitian", t)


def su11_flow(z0: complex, track: CoefficientTrack, grid, *, dt: float = 1e-3) -> Trajectory:
    """Disc flow ``i dz/dt = h* z^2 + h0 z + h``; raises :class:`DomainExitError`."""
    z0 = PhasePoint(Domain.DISC, z0).value

    def make_rhs(hint):
        def rhs(t, z):
            h0, h = track.su_coefficients(t, hint)
            return -1j * (np.conj(h) * z * z + h0 * z + h)
        return rhs

    traj = _segmented(make_rhs, z0, grid, track, dt=dt, check=_disc_check)
    traj.domain = Domain.DISC
    return traj


def un1_flow(z0, track: CoefficientTrack, grid, *, dt: float = 1e-3) -> Trajectory:
    """``C^N`` flow through the projective lift ``w = (1, z)``, ``i dw/dt = hmat w``.

    ``z_i = w_i / w_0``.  Raises :class:`ChartSingularityError` if ``w_0``
    vanishes relative to ``|w|``.
    """
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    w0 = np.concatenate(([1.0 + 0j], z0))
    if track.hmat(0.0).shape != (len(w0), len(w0)):
        raise ValueError(f"hmat must be {(len(w0), len(w0))} for a {len(z0)}-vector z0")

    def make_rhs(hint):
        def rhs(t, w):
            return -1j * (track.hmat(t, hint) @ w)
        return rhs

    def check(t, w):
        if abs(w[0]) < 1e-12 * np.linalg.norm(w):
            raise ChartSingularityError("projective chart coordinate w0 vanished", t)

    lifted = _segmented(make_rhs, w0, grid, track, dt=dt, check=check)
    z = lifted.z[:, 1:] / lifted.z[:, :1]
    return Trajectory(lifted.t, z, Domain.CN, lifted.max_local_error, lifted.error_estimate)


# --------------------------------------------------------------------------
# Kahler-form cross-check

def su2_classical_hamiltonian(j, z, h0, h):
    """Expectation-value Hamiltonian paired with the sphere Riccati right side."""
    u = abs(z) ** 2
    return j * (2 * (h * z + np.conj(h) * np.conj(z)) - h0 * (1 - u)).real / (1 + u)


def su11_classical_hamiltonian(k, z, h0, h):
    """``<k;z| h0 K0 + h K+ + h* K- |k;z>``."""
    u = abs(z) ** 2
    return k * (h0 * (1 + u) + 2 * h * np.conj(z) + 2 * np.conj(h) * z).real / (1 - u)


@dataclass(frozen=True)
class KahlerCheck:
    residual: float
    kahler_side: complex
    riccati_side: complex


def kahler_flow_check(group: str, weight: float, z: complex, h0: float, h: complex,
                      step: float = 1e-5) -> KahlerCheck:
    """Compare ``(2w)^-1 (1 +- |z|^2)^2 dH/dz*`` with the Riccati right side.

    ``dH/dz* = (dH/dx + i dH/dy)/2`` by central differences.  Both sides are
    returned in the ``i dz/dt`` form; ``residual`` is relative to the larger
    magnitude (absolute when both vanish).
    """
    z = complex(z)
    if group == "SU2":
        H = lambda x: su2_classical_hamiltonian(weight, x, h0, h)
        factor = (1 + abs(z) ** 2) ** 2 / (2 * weight)
        riccati = np.conj(h) + h0 * z - h * z * z
    elif group == "SU11":
        H = lambda x: su11_classical_hamiltonian(weight, x, h0, h)
        factor = (1 - abs(z) ** 2) ** 2 / (2 * weight)
        riccati = np.conj(h) * z * z + h0 * z + h
    else:
        raise ValueError("group must be 'SU2' or 'SU11'")
    dx = (H(z + step) - H(z - step)) / (2 * step)
    dy = (H(z + 1j * step) - H(z - 1j * step)) / (2 * step)
    kahler = factor * 0.5 * (dx + 1j * dy)
    scale = (abs(h0) + abs(h)) * (1 + abs(z) ** 2)
    residual = abs(kahler - riccati) / scale if scale > 0 else abs(kahler - riccati)
    return KahlerCheck(residual, complex(kahler), complex(riccati))


# --------------------------------------------------------------------------
# auxiliary oscillator and Mobius propagation

@dataclass
class EpsilonSolution:
    """Complex solution ``eps = rho e^{i gamma}`` of ``eps'' + Omega^2 eps = 0``.

    ``deps`` and ``b`` are right limits at joints of a piecewise ``b``.
    """

    t: np.ndarray
    eps: np.ndarray
    deps: np.ndarray
    b: np.ndarray

    @property
    def rho(self) -> np.ndarray:
        return np.abs(self.eps)

    @property
    def gamma(self) -> np.ndarray:
        return np.unwrap(np.angle(self.eps))

    @property
    def wronskian(self) -> np.ndarray:
        """``Im(eps* deps) = rho^2 dgamma/dt``."""
        return np.imag(np.conj(self.eps) * self.deps)

    @property
    def gamma_dot(self) -> np.ndarray:
        return self.wronskian / self.rho**2

    @property
    def rho_dot(self) -> np.ndarray:
        return np.real(np.conj(self.eps) * self.deps) / self.rho

    def index(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.t - t)))
        if abs(self.t[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"t = {t} is not on the solution grid")
        return i

    def at(self, t: float) -> "EpsilonSolution":
        i = self.index(t)
        s = slice(i, i + 1)
        return EpsilonSolution(self.t[s], self.eps[s], self.deps[s], self.b[s])


def ermakov_solve(track: CoefficientTrack, grid, *, eps0=None, deps0=None,
                  dt: float = 1e-3, wronskian_tol: float = 1e-8) -> EpsilonSolution:
    """Integrate the auxiliary oscillator with ``Omega^2 = omega^2 - b^2 - db/dt``.

    Default initial data are the stationary start ``rho(0) = Omega(0)^(-1/2)``,
    ``gamma(0) = 0``, ``drho/dt(0) = 0``.  Explicit ``eps0, deps0`` must satisfy
    ``Im(eps0* deps0) = 1``.  At a jump of ``b`` the derivative jumps by
    ``delta_b * eps`` (the delta term of ``-db/dt``), keeping ``deps - b eps``
    continuous.

    Raises
    ------
    ValueError
        On invalid initial data, on ``Omega(0)^2 <= 0`` without explicit
        initial data, or if the Wronskian drifts by more than ``wronskian_tol``.
    """
    grid = np.asarray(grid, dtype=float)
    if eps0 is None and deps0 is None:
        om2 = track.omega_squared_eff(grid[0], hint=grid[0])
        if om2 <= 0:
            raise ValueError("stationary start needs Omega(0)^2 > 0; pass eps0 and deps0")
        rho0 = om2 ** -0.25
        eps0, deps0 = complex(rho0), 1j / rho0
    elif eps0 is None or deps0 is None:
        raise ValueError("give both eps0 and deps0")
    eps0, deps0 = complex(eps0), complex(deps0)
    w = (np.conj(eps0) * deps0).imag
    if abs(w - 1.0) > 1e-12:
        raise ValueError(f"initial data must satisfy Im(eps* deps) = 1, got {w!r}")

    def make_rhs(hint):
        def rhs(t, y):
            return np.array([y[1], -track.omega_squared_eff(t, hint) * y[0]])
        return rhs

    def at_joint(t, y):
        db = float(np.real(track.jump("b", t)))
        return np.array([y[0], y[1] + db * y[0]]) if db else y

    traj = _segmented(make_rhs, np.array([eps0, deps0]), grid, track, dt=dt,
                      at_joint=at_joint)
    b = np.array([float(np.real(track.value("b", t))) for t in grid])
    sol = EpsilonSolution(grid, traj.z[:, 0], traj.z[:, 1], b)
    drift = float(np.max(np.abs(sol.wronskian - 1.0)))
    if drift > wronskian_tol:
        raise ValueError(f"Wronskian drift {drift:.3e} exceeds {wronskian_tol:.1e}; reduce dt")
    return sol


@dataclass(frozen=True)
class MobiusElement:
    """``z -> (a z + c)/(c* z + a*)``, matrix ``[[a, c], [c*, a*]]``."""

    a: complex
    c: complex

    @property
    def det(self) -> float:
        return abs(self.a) ** 2 - abs(self.c) ** 2

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.c], [np.conj(self.c), np.conj(self.a)]])

    def normalized(self) -> "MobiusElement":
        d = self.det
        if d <= 0:
            raise MobiusDegeneracyError("element is not proportional to an SU(1,1) matrix")
        s = math.sqrt(d)
        return MobiusElement(self.a / s, self.c / s)

    def inverse(self) -> "MobiusElement":
        return MobiusElement(np.conj(self.a), -self.c)

    def __matmul__(self, other: "MobiusElement") -> "MobiusElement":
        return MobiusElement(self.a * other.a + self.c * np.conj(other.c),
                             self.a * other.c + self.c * np.conj(other.a))

    def __call__(self, z):
        return mobius_apply(self, z)


def mobius_apply(M: MobiusElement, z):
    """Fractional-linear action; vectorized over ``z``."""
    z = np.asarray(z, dtype=complex)
    den = np.conj(M.c) * z + np.conj(M.a)
    if np.any(np.abs(den) < 1e-14):
        raise MobiusDegeneracyError("Mobius denominator below 1e-14")
    out = (M.a * z + M.c) / den
    return out.item() if out.ndim == 0 else out


MOBIUS_CONVENTIONS = ("full", "rotating", "counter_rotating")


def mobius_from_epsilon(eps: EpsilonSolution, t: float,
                        convention: str = "full") -> MobiusElement:
    """SU(1,1) element built from the auxiliary solution at time ``t``.

    ``full``
        ``a = (1 + rho^2 + i kappa) e^{-i gamma}``, ``c = (1 - rho^2 - i kappa) e^{i gamma}``
        with ``kappa = rho (drho/dt - b rho)``.  Composed with the inverse of the
        element at ``t = 0`` it propagates the Riccati disc flow exactly.
    ``rotating``
        The same with ``kappa`` dropped; exact when ``drho/dt = b rho``.
    ``counter_rotating``
        ``a = (rho^2 + 1) e^{i gamma}``, ``c = (rho^2 - 1) e^{-i gamma}``; rotates the
        disc in the opposite sense to the Riccati flow.

    In every convention ``|a|^2 - |c|^2 = 4 rho^2``.
    """
    i = eps.index(t)
    e, de, b = eps.eps[i], eps.deps[i], eps.b[i]
    rho = abs(e)
    phase = e / rho
    if convention == "full":
        kappa = (np.conj(e) * de).real - b * rho**2
        return MobiusElement((1 + rho**2 + 1j * kappa) / phase,
                             (1 - rho**2 - 1j * kappa) * phase)
    if convention == "rotating":
        return MobiusElement((1 + rho**2) / phase, (1 - rho**2) * phase)
    if convention == "counter_rotating":
        return MobiusElement((rho**2 + 1) * phase, (rho**2 - 1) / phase)
    raise ValueError(f"convention must be one of {MOBIUS_CONVENTIONS}")


def disc_distance(z1, z2):
    """Poincare-disc geodesic distance ``2 artanh(|z1 - z2| / |1 - z1* z2|)``."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    return 2.0 * np.arctanh(np.abs(z1 - z2) / np.abs(1.0 - np.conj(z1) * z2))
