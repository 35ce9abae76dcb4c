"""Coherent-state vectors in truncated canonical bases and wavefunctions.

Every constructor evaluates the closed-form expansion coefficients in log
space, so large truncations do not overflow.  Infinite families accept
``trunc=None`` to pick the basis size automatically (doubling from 16 until
the missing norm is below ``tail_tol``, capped at :data:`MAX_TRUNC`); an
explicit ``trunc`` that cannot meet the tolerance raises
:class:`~gcsdyn.exceptions.TruncationError`.

Coefficients are never renormalized: ``1 - ||c||^2`` is exactly the weight
the truncation dropped.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from math import comb, lgamma

import numpy as np
from scipy.sparse import identity, kron, diags
from scipy.sparse.linalg import expm_multiply

from .algebra import un1_basis
from .exceptions import TruncationError

__all__ = [
    "StateVector",
    "MAX_TRUNC",
    "glauber_cs",
    "su2_cs",
    "su11_cs",
    "parity_cs",
    "thermal_cs",
    "un1_cs",
    "un1_kernel",
    "schwinger_embed",
    "wavepacket_identity_check",
    "laguerre",
    "WavefunctionFamily",
    "WavefunctionParams",
    "parity_params",
    "singular_params",
    "magnetic_params",
    "eval_wavefunction",
    "density",
    "singular_eigenfunction",
]

MAX_TRUNC = 4096
START_TRUNC = 16


@dataclass(frozen=True)
class StateVector:
    """Coefficient vector of a state in a (possibly truncated) canonical basis.

    Attributes
    ----------
    basis : str
        ``"fock"``, ``"su2"``, ``"su11"``, ``"two_mode"`` or ``"un1"``.
    coeffs : numpy.ndarray
        Complex amplitudes.  Two-mode states are flattened with index
        ``n_a * dims[1] + n_b``.
    label : object
        Weight data (``j``, ``k``, ``(N, m)``) or mode dimensions.
    trust_dim : int
        Leading rows on which truncated ladder operators act exactly.
    """

    basis: str
    coeffs: np.ndarray
    label: object = None
    trust_dim: int | None = None
    dims: tuple = field(default=())

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.coeffs, self.coeffs).real))

    @property
    def missing_mass(self) -> float:
        """``1 - sum |c|^2``: weight lost to the truncation."""
        return max(0.0, 1.0 - float(np.vdot(self.coeffs, self.coeffs).real))

    @property
    def tail_mass(self) -> float:
        """Weight on the untrusted rows (zero for finite representations)."""
        if self.basis == "two_mode":
            da, db = self.dims
            p = np.abs(self.coeffs.reshape(da, db)) ** 2
            return float(p[-1, :].sum() + p[:-1, -1].sum())
        if self.trust_dim is None or self.trust_dim >= self.dim:
            return 0.0
        return float(np.sum(np.abs(self.coeffs[self.trust_dim:]) ** 2))

    def with_coeffs(self, coeffs) -> "StateVector":
        return StateVector(self.basis, coeffs, self.label, self.trust_dim, self.dims)

    def overlap(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return complex(np.vdot(self.coeffs, other.coeffs))


def _from_logs(logmag: np.ndarray, phase: np.ndarray) -> np.ndarray:
    out = np.zeros(len(logmag), dtype=complex)
    ok = np.isfinite(logmag)
    out[ok] = np.exp(logmag[ok] + 1j * phase[ok])
    return out


def _power_logs(z: complex, n: np.ndarray):
    """``log|z^n|`` and ``arg z^n`` with ``0^0 = 1``."""
    r = abs(z)
    if r == 0:
        logmag = np.where(n == 0, 0.0, -np.inf)
        return logmag, np.zeros(len(n))
    return n * math.log(r), n * np.angle(z)


def _ratio_series(log_c0: float, z: complex, ratios: np.ndarray) -> np.ndarray:
    """``c_0, c_1, ...`` with ``c_{m+1} = c_m * z * ratios[m]`` and ``log|c_0| = log_c0``.

    Products of the O(1) ratios keep the relative error near ``m * eps``;
    differences of large log-gamma values would lose several digits.  Falls
    back to summed logarithms when ``c_0`` itself underflows.
    """
    n = len(ratios) + 1
    r = abs(z)
    if r == 0:
        out = np.zeros(n, dtype=complex)
        out[0] = math.exp(log_c0)
        return out
    steps = r * np.asarray(ratios, dtype=float)
    phase = np.exp(1j * np.angle(z) * np.arange(n))
    if log_c0 > -600:
        mags = math.exp(log_c0) * np.concatenate(([1.0], np.cumprod(steps)))
    else:
        with np.errstate(divide="ignore"):
            logs = log_c0 + np.concatenate(([0.0], np.cumsum(np.log(steps))))
        mags = np.exp(logs)
    return mags * phase


def _rounding_floor(dim: int) -> float:
    """Smallest missing weight that ``1 - ||c||^2`` can resolve for ``dim`` coefficients."""
    return 4.0 * dim * np.finfo(float).eps


def _grow(build, trunc, tail_tol, what):
    """Call ``build(dim)`` with a fixed or auto-grown dimension.

    Tolerances below the rounding floor ``4 dim eps`` are clamped to it.
    """
    if trunc is not None:
        state = build(int(trunc))
        if state.missing_mass > max(tail_tol, _rounding_floor(state.dim)):
            raise TruncationError(
                f"{what}: truncation {trunc} misses weight {state.missing_mass:.3e} "
                f"> tail_tol {tail_tol:.1e}; increase trunc")
        return state
    dim = START_TRUNC
    while True:
        state = build(dim)
        if state.missing_mass <= max(tail_tol, _rounding_floor(state.dim)):
            return state
        if dim >= MAX_TRUNC:
            raise TruncationError(
                f"{what}: tail tolerance {tail_tol:.1e} unreachable at truncation {MAX_TRUNC}")
        dim = min(2 * dim, MAX_TRUNC)


# --------------------------------------------------------------------------
# coherent-state families

def glauber_cs(z: complex, trunc: int | None = None, tail_tol: float = 1e-12) -> StateVector:
    """Glauber state ``exp(z a^dagger - z* a)|0>``: ``c_n = e^{-|z|^2/2} z^n / sqrt(n!)``."""
    z = complex(z)

    def build(dim):
        ratios = 1.0 / np.sqrt(np.arange(1, dim, dtype=float))
        return StateVector("fock", _ratio_series(-0.5 * abs(z) ** 2, z, ratios), None, dim - 1)

    return _grow(build, trunc, tail_tol, "glauber_cs")


def su2_cs(j, z: complex, antipodal: bool = False) -> StateVector:
    """Spin coherent state ``(1 + |z|^2)^{-j} exp(z J+)|j, -j>``.

    With ``antipodal=True`` the argument is the antipodal-chart coordinate
    ``w = -1/z`` and the state is ``(1 + |w|^2)^{-j} exp(-w J-)|j, +j>``, equal
    to the standard one up to a global phase.
    """
    twoj = int(round(2 * float(j)))
    if twoj < 1 or abs(2 * float(j) - twoj) > 1e-12:
        raise ValueError(f"j must be a positive half-integer, got {j!r}")
    z = complex(z)
    m = np.arange(twoj + 1)
    logbinom = 0.5 * np.array([math.log(comb(twoj, k)) for k in m])
    if antipodal:
        logmag, phase = _power_logs(-z, twoj - m)
    else:
        logmag, phase = _power_logs(z, m)
    logmag = logmag + logbinom - 0.5 * twoj * math.log1p(abs(z) ** 2)
    return StateVector("su2", _from_logs(logmag, phase), twoj / 2, twoj + 1)


def su11_cs(k: float, z: complex, trunc: int | None = None,
            tail_tol: float = 1e-12) -> StateVector:
    """Discrete-series state ``(1 - |z|^2)^k exp(z K+)|k; 0>``.

    ``c_m = (1 - |z|^2)^k sqrt(Gamma(2k+m) / (m! Gamma(2k))) z^m``.
    """
    k = float(k)
    z = complex(z)
    if k <= 0:
        raise ValueError("k must be > 0")
    if abs(z) >= 1:
        raise ValueError(f"SU(1,1) coherent states need |z| < 1, got {abs(z)}")

    def build(dim):
        m = np.arange(dim - 1, dtype=float)
        ratios = np.sqrt((2 * k + m) / (m + 1))
        c = _ratio_series(k * math.log1p(-abs(z) ** 2), z, ratios)
        return StateVector("su11", c, k, dim - 1)

    return _grow(build, trunc, tail_tol, "su11_cs")


def parity_cs(sign: int, z: complex, trunc: int | None = None,
              tail_tol: float = 1e-12) -> StateVector:
    """Even (``sign=+1``) or odd (``-1``) oscillator state in the full Fock basis.

    ``(1 - |z|^2)^{1/4} exp(z a^dagger^2 / 2)|0>`` or
    ``(1 - |z|^2)^{3/4} exp(z a^dagger^2 / 2)|1>``, expanded directly:
    ``c_{2m+p} = (1-|z|^2)^{(2p+1)/4} (z/2)^m sqrt((2m+p)!) / m!``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    z = complex(z)
    if abs(z) >= 1:
        raise ValueError(f"parity states need |z| < 1, got {abs(z)}")
    p = 0 if sign == 1 else 1

    def build(dim):
        c = np.zeros(dim, dtype=complex)
        m = np.arange((dim - p + 1) // 2 - 1, dtype=float)
        ratios = np.sqrt((2 * m + p + 1) * (2 * m + p + 2)) / (2 * (m + 1))
        c[p::2] = _ratio_series(0.25 * (2 * p + 1) * math.log1p(-abs(z) ** 2), z, ratios)
        return StateVector("fock", c, sign, dim - 1)

    return _grow(build, trunc, tail_tol, "parity_cs")


def thermal_cs(z: float, trunc: int | None = None, tail_tol: float = 1e-12) -> StateVector:
    """Two-mode state ``(1 - z^2)^{1/2} sum_n z^n |n, n>`` for real ``0 <= z < 1``."""
    z = float(z)
    if not 0 <= z < 1:
        raise ValueError(f"thermal state needs 0 <= z < 1, got {z}")

    def build(dim):
        c = np.zeros((dim, dim), dtype=complex)
        n = np.arange(dim)
        c[n, n] = math.sqrt(1 - z * z) * z ** n
        return StateVector("two_mode", c.ravel(), (dim, dim), dims=(dim, dim))

    return _grow(build, trunc, tail_tol, "thermal_cs")


def un1_cs(N: int, m: int, z) -> StateVector:
    """U(N+1) state over the degree-``m`` sector (basis of :func:`un1_basis`).

    ``(1 + |z|^2)^{-m/2} z_1^{m_1} ... z_N^{m_N} sqrt(m! / (m_0! ... m_N!))``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if len(z) != N:
        raise ValueError(f"z must have {N} components")
    basis = un1_basis(N, m)
    pref = (1 + np.vdot(z, z).real) ** (-m / 2)
    logfact = lgamma(m + 1)
    c = np.empty(len(basis), dtype=complex)
    for idx, occ in enumerate(basis):
        mono = np.prod(z ** np.array(occ[1:]))
        c[idx] = pref * mono * math.exp(0.5 * (logfact - sum(lgamma(o + 1) for o in occ)))
    return StateVector("un1", c, (N, m), len(basis))


def un1_kernel(m: int, y, z) -> complex:
    """Closed-form overlap ``<m; y|m; z>``."""
    y = np.atleast_1d(np.asarray(y, dtype=complex))
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return complex((1 + np.vdot(y, y).real) ** (-m / 2) * (1 + np.vdot(z, z).real) ** (-m / 2)
                   * (1 + np.vdot(y, z)) ** m)


# --------------------------------------------------------------------------
# two-mode constructions

def schwinger_embed(state: StateVector, dims: tuple[int, int]) -> np.ndarray:
    """Place a spin-``j`` state into two-mode Fock space via ``|j,-j+n> -> |n>_a |2j-n>_b``.

    Components falling outside the ``dims`` box are dropped.
    """
    twoj = state.dim - 1
    out = np.zeros(dims, dtype=complex)
    for n, c in enumerate(state.coeffs):
        if n < dims[0] and twoj - n < dims[1]:
            out[n, twoj - n] = c
    return out.ravel()


@dataclass(frozen=True)
class WavepacketResidual:
    identity: float
    product: float
    eigen: float


def wavepacket_identity_check(alpha: complex, z: complex, trunc: int = 40) -> WavepacketResidual:
    """Check the spin wave-packet identity in a ``trunc x trunc`` two-mode box.

    Left side: ``sum_N (N!)^{-1/2} alpha^N |N; z>`` with ``|N; z>`` the spin-``N/2``
    coherent state mapped onto the ``n_a + n_b = N`` sector.  Right side:
    ``exp(alpha (z a^dagger + b^dagger)(1 + |z|^2)^{-1/2})|0, 0>`` by a sparse
    matrix exponential.  Also compares the right side with
    ``e^{|alpha|^2/2} |lambda>|mu>`` and returns the eigen-residual of
    ``A_z = (1 + |z|^2)^{-1/2}(z* a + b)``.  All residuals are relative to the
    norm of the right side.
    """
    alpha, z = complex(alpha), complex(z)
    d = int(trunc)
    dims = (d, d)
    lhs = np.zeros(d * d, dtype=complex)
    lhs[0] = 1.0
    for N in range(1, 2 * d - 1):
        weight = math.exp(N * math.log(abs(alpha)) - 0.5 * lgamma(N + 1)) if alpha else 0.0
        if weight == 0.0:
            break
        phase = np.exp(1j * N * np.angle(alpha))
        lhs += weight * phase * schwinger_embed(su2_cs(N / 2, z), dims)

    a1 = diags(np.sqrt(np.arange(1, d, dtype=float)), 1, format="csr")
    eye = identity(d, format="csr")
    a = kron(a1, eye, format="csr")
    b = kron(eye, a1, format="csr")
    scale = (1 + abs(z) ** 2) ** -0.5
    gen = (alpha * scale) * (z * a.T + b.T)
    vac = np.zeros(d * d, dtype=complex)
    vac[0] = 1.0
    rhs = expm_multiply(gen.tocsc(), vac)
    norm = np.linalg.norm(rhs)

    lam, mu = alpha * z * scale, alpha * scale
    prod = math.exp(0.5 * abs(alpha) ** 2) * np.kron(
        glauber_cs(lam, d, tail_tol=1.0).coeffs, glauber_cs(mu, d, tail_tol=1.0).coeffs)
    Az = scale * (np.conj(z) * a + b)
    eigen = np.linalg.norm(Az @ rhs - alpha * rhs)
    return WavepacketResidual(float(np.linalg.norm(lhs - rhs) / norm),
                              float(np.linalg.norm(prod - rhs) / norm),
                              float(eigen / norm))


# --------------------------------------------------------------------------
# wavefunctions

def laguerre(n: int, alpha: float, x):
    """Generalized Laguerre polynomial ``L_n^alpha(x)`` by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


class WavefunctionFamily(str, enum.Enum):
    PARITY = "parity"
    SINGULAR = "singular"
    MAGNETIC = "magnetic"


@dataclass(frozen=True)
class WavefunctionParams:
    """Gaussian-type wavefunction ``norm * x^power * exp(-a x^2 - i chi x^2)``.

    ``parity``: full line, ``power`` 0 or 1.  ``singular``: half line
    ``x > 0``, ``power = d + 1/2``.  ``magnetic``: radial coordinate ``r``,
    ``power = N``, normalized over the plane (density per unit area).
    """

    family: WavefunctionFamily
    a: complex
    power: float
    chi: float = 0.0
    label: object = None

    def __post_init__(self):
        object.__setattr__(self, "family", WavefunctionFamily(self.family))
        if complex(self.a).real <= 0:
            raise ValueError(f"width parameter needs Re a > 0, got a = {self.a}")

    @property
    def norm(self) -> float:
        beta = 2.0 * complex(self.a).real
        p = self.power
        if self.family is WavefunctionFamily.PARITY:
            integral = math.gamma(p + 0.5) / beta ** (p + 0.5)
        elif self.family is WavefunctionFamily.SINGULAR:
            integral = math.gamma(p + 0.5) / (2 * beta ** (p + 0.5))
        else:
            integral = math.pi * math.gamma(p + 1) / beta ** (p + 1)
        return 1.0 / math.sqrt(integral)

    @property
    def lam(self) -> float:
        """``2 Re a``, the decay rate of the density."""
        return 2.0 * complex(self.a).real


def parity_params(sign: int, z: complex) -> WavefunctionParams:
    """Position representation of :func:`parity_cs`: ``a = (1+z) / (2(1-z))``."""
    z = complex(z)
    if abs(z) >= 1:
        raise ValueError("need |z| < 1")
    return WavefunctionParams("parity", 0.5 * (1 + z) / (1 - z), 0 if sign == 1 else 1,
                              label=sign)


def singular_params(d: float, z: complex, rho: float = 1.0, gamma: float = 0.0,
                    rho_dot: float = 0.0, b: float = 0.0) -> WavefunctionParams:
    """Singular-oscillator coherent state at a time with auxiliary data ``rho, gamma``.

    ``s = z e^{-2 i gamma}``, ``a = (1+s) / (2 rho^2 (1-s))``.  The
    ``z``-independent chirp ``exp(i x^2 (drho/dt / rho - b) / 2)`` is carried in
    ``chi``.
    """
    if d <= 0:
        raise ValueError("d must be > 0")
    s = complex(z) * np.exp(-2j * gamma)
    a = (1 + s) / (2 * rho**2 * (1 - s))
    return WavefunctionParams("singular", a, d + 0.5, chi=0.5 * (b - rho_dot / rho), label=d)


def magnetic_params(N: int, z: complex, rho: float = 1.0, gamma: float = 0.0) -> WavefunctionParams:
    """Magnetic-field coherent state: ``s = -i z e^{-2 i gamma}``, ``a = (1+s)/(2 rho^2 (1-s))``."""
    s = -1j * complex(z) * np.exp(-2j * gamma)
    return magnetic_params_from_s(N, s, rho)


def magnetic_params_from_s(N: int, s: complex, rho: float = 1.0) -> WavefunctionParams:
    s = complex(s)
    if abs(s) >= 1:
        raise ValueError("need |s| < 1")
    return WavefunctionParams("magnetic", (1 + s) / (2 * rho**2 * (1 - s)), int(N), label=int(N))


def eval_wavefunction(params: WavefunctionParams, x):
    """Normalized wavefunction (radial part for the magnetic family)."""
    x = np.asarray(x, dtype=float)
    if params.family is WavefunctionFamily.SINGULAR and np.any(x <= 0):
        raise ValueError("singular family is defined for x > 0")
    if params.family is WavefunctionFamily.MAGNETIC and np.any(x < 0):
        raise ValueError("magnetic family takes r >= 0")
    return params.norm * x**params.power * np.exp(-(params.a + 1j * params.chi) * x**2)


def density(params: WavefunctionParams, x):
    """``|psi(x)|^2``; per unit area for the magnetic family."""
    return np.abs(eval_wavefunction(params, x)) ** 2


def singular_eigenfunction(d: float, n: int, eps, x, b: float | None = None):
    """Normalized Laguerre eigenfunction of the singular oscillator.

    ``x^{d+1/2} exp(-2 i n gamma + (i/2)(deps/eps - b) x^2) L_n^d(gamma' x^2)``
    with norm ``sqrt(2 n! gamma'^{d+1} / Gamma(n+d+1))`` on ``x > 0``.

    Parameters
    ----------
    eps : EpsilonSolution or tuple
        A one-point :class:`~gcsdyn.flow.EpsilonSolution` (see ``.at(t)``) or
        ``(eps, deps)`` values.
    b : float, optional
        Friction coefficient at that time; taken from ``eps`` when available.
    """
    if hasattr(eps, "eps"):
        e, de = complex(eps.eps[0]), complex(eps.deps[0])
        b = float(eps.b[0]) if b is None else b
    else:
        e, de = (complex(v) for v in eps)
    b = 0.0 if b is None else b
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("x must be > 0")
    gamma = np.angle(e)
    gdot = (np.conj(e) * de).imag / abs(e) ** 2
    lognorm = 0.5 * (math.log(2) + lgamma(n + 1) + (d + 1) * math.log(gdot) - lgamma(n + d + 1))
    return (math.exp(lognorm) * x ** (d + 0.5)
            * np.exp(-2j * n * gamma + 0.5j * (de / e - b) * x**2)
            * laguerre(n, d, gdot * x**2))
