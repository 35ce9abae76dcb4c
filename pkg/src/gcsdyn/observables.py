"""Mean values: closed forms checked against direct matrix contraction.

Closed forms whose printed versions in the literature carry typos are
implemented in their corrected form.  The ``resolve_*`` functions determine
the corrected constant numerically from matrix elements over random draws,
and :class:`ObservableReport` keeps the printed value next to the corrected
one where they differ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import oscillator_su11, su2_generators, un1_generators
from .exceptions import TruncationError
from .states import (StateVector, parity_cs, su2_cs, thermal_cs, un1_cs)

__all__ = [
    "ObservableReport",
    "Resolution",
    "mean_value",
    "two_mode_mean",
    "su2_means_closed",
    "su11_means_closed",
    "su2_J0_printed",
    "quadrature_means",
    "quadrature_means_matrix",
    "uncertainty_product",
    "uncertainty_product_printed",
    "magnetic_means",
    "magnetic_s",
    "singular_q2_mean",
    "bose_occupation",
    "thermal_average_check",
    "un1_means_closed",
    "un1_means_matrix",
    "resolve_uncertainty_exponent",
    "resolve_su2_J0_factor",
    "resolve_un1_prefactor",
    "REL_TOL",
]

REL_TOL = 1e-8


@dataclass(frozen=True)
class ObservableReport:
    """Closed-form versus matrix-element value of one mean.

    ``status`` is ``"verified"`` when the closed form is used as printed and
    ``"corrected"`` when a printed typo was fixed; ``printed_value`` then holds
    what the printed formula gives.
    """

    name: str
    closed_form_value: complex
    matrix_value: complex
    status: str = "verified"
    printed_value: complex | None = None

    @property
    def abs_discrepancy(self) -> float:
        return abs(self.closed_form_value - self.matrix_value)

    @property
    def rel_discrepancy(self) -> float:
        return self.abs_discrepancy / max(abs(self.matrix_value), 1e-300)

    def ok(self, rel_tol: float = REL_TOL, abs_tol: float = 1e-12) -> bool:
        return self.abs_discrepancy <= max(abs_tol, rel_tol * abs(self.matrix_value))


@dataclass(frozen=True)
class Resolution:
    """Outcome of a numerical typo resolution.

    ``samples`` holds the constant recovered from each random draw;
    ``value`` is their common value and ``spread`` the max deviation from it.
    """

    name: str
    printed: str
    resolved: str
    value: float
    printed_value: float
    samples: np.ndarray
    spread: float

    @property
    def consistent(self) -> bool:
        return self.spread < 1e-8


# --------------------------------------------------------------------------
# matrix contractions

def mean_value(state: StateVector, op, tail_tol: float = 1e-10) -> complex:
    """``<psi|A|psi>`` by direct contraction.

    Raises
    ------
    ValueError
        Dimension mismatch.
    TruncationError
        The state has more than ``tail_tol`` weight on untrusted rows.
    """
    op = np.asarray(op)
    c = state.coeffs
    if op.shape != (len(c), len(c)):
        raise ValueError(f"operator shape {op.shape} does not match state dimension {len(c)}")
    if state.tail_mass > tail_tol:
        raise TruncationError(f"tail mass {state.tail_mass:.3e} exceeds {tail_tol:.1e}")
    return complex(np.vdot(c, op @ c))


def two_mode_mean(state: StateVector, op_a=None, op_b=None) -> complex:
    """``<psi|A (x) B|psi>`` for a flattened two-mode state, without forming the product."""
    da, db = state.dims
    C = state.coeffs.reshape(da, db)
    if op_a is not None:
        C_a = np.asarray(op_a) @ C
    else:
        C_a = C
    if op_b is not None:
        C_a = C_a @ np.asarray(op_b).T
    return complex(np.vdot(C, C_a))


# --------------------------------------------------------------------------
# SU(2) and SU(1,1)

def su2_means_closed(j, z: complex) -> dict[str, complex]:
    """``<J+>, <J->, <J0>`` in the spin coherent state ``|j; z>``.

    ``<J0> = -j (1 - |z|^2)/(1 + |z|^2)``, with the factor ``j``.
    """
    z = complex(z)
    r2 = abs(z) ** 2
    return {"Jp": 2 * j * z.conjugate() / (1 + r2),
            "Jm": 2 * j * z / (1 + r2),
            "J0": complex(-j * (1 - r2) / (1 + r2))}


def su2_J0_printed(z: complex) -> float:
    """``<J0>`` as printed, without the factor ``j``."""
    r2 = abs(z) ** 2
    return -(1 - r2) / (1 + r2)


def su11_means_closed(k: float, z: complex) -> dict[str, complex]:
    """``<K+>, <K->, <K0>`` in ``|k; z>``, ``|z| < 1``."""
    z = complex(z)
    r2 = abs(z) ** 2
    if r2 >= 1:
        raise ValueError("need |z| < 1")
    return {"Kp": 2 * k * z.conjugate() / (1 - r2),
            "Km": 2 * k * z / (1 - r2),
            "K0": complex(k * (1 + r2) / (1 - r2))}


def quadrature_means(k: float, z: complex) -> dict[str, float]:
    """``<q^2>`` and ``<p^2>`` from ``q^2 = 2K0 - K+ - K-``, ``p^2 = 2K0 + K+ + K-``.

    ``<q^2> = 2k |1 - z|^2 / (1 - |z|^2)``, ``<p^2> = 2k |1 + z|^2 / (1 - |z|^2)``.
    Both first moments vanish, so their product is the uncertainty product.
    """
    z = complex(z)
    r2 = abs(z) ** 2
    if r2 >= 1:
        raise ValueError("need |z| < 1")
    return {"q2": 2 * k * abs(1 - z) ** 2 / (1 - r2),
            "p2": 2 * k * abs(1 + z) ** 2 / (1 - r2)}


def quadrature_means_matrix(k: float, z: complex, trunc: int | None = None) -> dict[str, float]:
    """``<q^2>``, ``<p^2>`` by contraction on a parity state (``k`` = 1/4 or 3/4)."""
    if np.isclose(k, 0.25):
        sign = 1
    elif np.isclose(k, 0.75):
        sign = -1
    else:
        raise ValueError("the oscillator realization only carries k = 1/4 and k = 3/4")
    state = parity_cs(sign, z, trunc)
    K = oscillator_su11(state.dim)
    c = state.coeffs
    K0 = np.vdot(c, K["K0"] @ c).real
    K1 = np.vdot(c, K["K1"] @ c).real
    return {"q2": 2 * K0 - 2 * K1, "p2": 2 * K0 + 2 * K1}


def uncertainty_product(k: float, z: complex, exponent: int = 2) -> float:
    """``<q^2><p^2> = 4k^2 (1 + r^4 - 2 r^2 cos 2 theta) / (1 - r^2)^exponent``.

    The default exponent 2 is the one fixed by :func:`resolve_uncertainty_exponent`.
    """
    z = complex(z)
    r2 = abs(z) ** 2
    return 4 * k * k * abs(1 - z * z) ** 2 / (1 - r2) ** exponent


def uncertainty_product_printed(k: float, z: complex) -> float:
    """The same product with the printed first-power denominator."""
    return uncertainty_product(k, z, exponent=1)


# --------------------------------------------------------------------------
# magnetic field and singular oscillator

def magnetic_s(z: complex, gamma: float) -> complex:
    """``s = -i z e^{-2 i gamma}``."""
    return -1j * complex(z) * np.exp(-2j * gamma)


def magnetic_means(N: int, s: complex, rho: float = 1.0, angular: bool = True) -> dict[str, float]:
    """``<x^2>`` and ``<p_x^2>`` for the magnetic coherent state.

    The state is ``(x + i y)^N exp(-a r^2)`` with ``a = (1+s)/(2 rho^2 (1-s))``,
    an eigenstate of ``L3`` with eigenvalue ``N``.  Then

    ``<x^2> = (N+1) / (4 Re a) = rho^2 (N+1) / (2 lambda_s)``,
    ``<p_x^2> = (N+1) |a|^2 / Re a``.

    With ``angular=False`` the momentum is that of the phase-less radial
    profile ``r^N exp(-a r^2)``, ``Re a + (N+1) Im^2 a / Re a``; this is the
    printed form and drops the ``N^2/r^2`` angular kinetic term, so it agrees
    with the true state only at ``N = 0``.
    """
    s = complex(s)
    if abs(s) >= 1:
        raise ValueError("need |s| < 1")
    if rho <= 0:
        raise ValueError("rho must be > 0")
    a = (1 + s) / (2 * rho**2 * (1 - s))
    x2 = (N + 1) / (4 * a.real)
    if angular:
        px2 = (N + 1) * abs(a) ** 2 / a.real
    else:
        px2 = a.real + (N + 1) * a.imag**2 / a.real
    return {"x2": x2, "px2": px2, "lambda_s": (1 - abs(s) ** 2) / abs(1 - s) ** 2}


def singular_q2_mean(k: float, z: complex, eps: complex) -> float:
    """``<q^2> = 2k (|eps|^2 (1 + |z|^2) - z* eps^2 - z eps*^2) / (1 - |z|^2)``."""
    z, eps = complex(z), complex(eps)
    r2 = abs(z) ** 2
    if r2 >= 1:
        raise ValueError("need |z| < 1")
    val = abs(eps) ** 2 * (1 + r2) - 2 * (z.conjugate() * eps * eps).real
    return 2 * k * val / (1 - r2)


# --------------------------------------------------------------------------
# thermal states

def bose_occupation(beta_omega: float) -> float:
    """``1 / (e^{beta omega} - 1)``."""
    return 1.0 / math.expm1(beta_omega)


_NAMED_DIAGONALS = {
    "number": lambda n: n.astype(float),
    "identity": lambda n: np.ones(len(n)),
    "vacuum_projector": lambda n: (n == 0).astype(float),
}


def _diagonal(op, dim):
    if isinstance(op, str):
        try:
            return _NAMED_DIAGONALS[op](np.arange(dim))
        except KeyError:
            raise ValueError(f"unknown diagonal observable {op!r}; "
                             f"choose from {sorted(_NAMED_DIAGONALS)}") from None
    if callable(op):
        return np.asarray(op(np.arange(dim)), dtype=complex)
    op = np.asarray(op, dtype=complex)
    if op.ndim == 1:
        diag = op
    else:
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise ValueError("operator must be square")
        diag = np.diag(op)
        if np.max(np.abs(op - np.diag(diag)), initial=0.0) > 0:
            raise ValueError("thermal identity applies to Fock-diagonal observables only")
    if len(diag) < dim:
        raise TruncationError(f"operator dimension {len(diag)} below required truncation {dim}")
    return diag[:dim]


def thermal_average_check(beta_omega: float, op="number", trunc: int | None = None,
                          tail_tol: float = 1e-15) -> ObservableReport:
    """Mean of ``A (x) I`` in the two-mode thermal coherent state versus the canonical average.

    Parameters
    ----------
    beta_omega : float
        ``beta * omega > 0``; the state parameter is ``z = exp(-beta omega / 2)``.
    op : str, callable, 1-d or 2-d array
        Fock-diagonal observable: a name (``"number"``, ``"identity"``,
        ``"vacuum_projector"``), a function of the level array, its diagonal or
        its matrix.
    trunc : int, optional
        Fock levels per mode; chosen automatically when omitted.

    Raises
    ------
    TruncationError
        ``trunc`` leaves more than ``tail_tol`` of the weight outside.
    """
    if not beta_omega > 0:
        raise ValueError("beta * omega must be > 0")
    z = math.exp(-beta_omega / 2)
    if trunc is None and not isinstance(op, str) and not callable(op):
        trunc = np.asarray(op).shape[0]
    state = thermal_cs(z, trunc, tail_tol=tail_tol)
    dim = state.dims[0]
    diag = _diagonal(op, dim)
    quantum = two_mode_mean(state, np.diag(diag))
    boltz = np.exp(-beta_omega * np.arange(dim))
    canonical = complex(np.sum(diag * boltz) / np.sum(boltz))
    name = op if isinstance(op, str) else "diagonal"
    return ObservableReport(f"thermal[{name}, beta_omega={beta_omega:g}]", quantum, canonical)


# --------------------------------------------------------------------------
# U(N+1)

def un1_means_closed(m: int, z, prefactor: float = 1.0) -> np.ndarray:
    """Matrix ``M[i, j] = <a_i^dagger a_j>`` in ``|m; z>``.

    ``M = prefactor * m * zeta_i* zeta_j / (1 + |z|^2)`` with ``zeta = (1, z_1, ..., z_N)``.
    The oracle fixes ``prefactor = 1``; the printed value is 1/2.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    zeta = np.concatenate([[1.0], z])
    return prefactor * m * np.outer(zeta.conj(), zeta) / (1 + np.vdot(z, z).real)


def un1_means_matrix(N: int, m: int, z) -> np.ndarray:
    state = un1_cs(N, m, z)
    E = un1_generators(N, m)
    c = state.coeffs
    return np.einsum("a,ijab,b->ij", c.conj(), E, c)


# --------------------------------------------------------------------------
# typo resolutions

def _rng(seed):
    return np.random.default_rng(seed)


def _disc_points(rng, n, rmax=0.9):
    r = rmax * np.sqrt(rng.uniform(0.01, 1.0, n))
    return r * np.exp(1j * rng.uniform(-np.pi, np.pi, n))


def resolve_uncertainty_exponent(draws: int = 100, seed: int = 0) -> Resolution:
    """Recover the denominator power ``D`` of the uncertainty product from parity states.

    For each random ``z`` and ``k`` in {1/4, 3/4} the product is computed by
    contraction and ``D = log(4k^2 |1 - z^2|^2 / P) / log(1 - r^2)`` is solved.
    """
    rng = _rng(seed)
    zs = _disc_points(rng, draws, 0.85)
    ks = rng.choice([0.25, 0.75], draws)
    samples = np.empty(draws)
    for i, (k, z) in enumerate(zip(ks, zs)):
        mm = quadrature_means_matrix(k, z)
        P = mm["q2"] * mm["p2"]
        samples[i] = math.log(4 * k * k * abs(1 - z * z) ** 2 / P) / math.log(1 - abs(z) ** 2)
    value = float(np.round(np.median(samples)))
    return Resolution("uncertainty denominator exponent", "(1 - r^2)^1", f"(1 - r^2)^{value:g}",
                      value, 1.0, samples, float(np.max(np.abs(samples - value))))


def resolve_su2_J0_factor(draws: int = 100, seed: int = 1) -> Resolution:
    """Ratio of the contracted ``<J0>`` to the printed ``-(1-|z|^2)/(1+|z|^2)``, divided by ``j``.

    A common value of 1 means the missing factor is exactly ``j``.
    """
    rng = _rng(seed)
    js = rng.integers(1, 11, draws) / 2
    zs = (rng.normal(size=draws) + 1j * rng.normal(size=draws)) * 1.5
    samples = np.empty(draws)
    for i, (j, z) in enumerate(zip(js, zs)):
        if abs(abs(z) - 1) < 1e-3:
            z *= 1.1
        st = su2_cs(j, z)
        J0 = mean_value(st, su2_generators(j)["J0"]).real
        samples[i] = J0 / su2_J0_printed(z) / j
    return Resolution("spin <J0> factor", "-(1-|z|^2)/(1+|z|^2)", "-j(1-|z|^2)/(1+|z|^2)",
                      1.0, float("nan"), samples, float(np.max(np.abs(samples - 1.0))))


def resolve_un1_prefactor(draws: int = 100, seed: int = 2) -> Resolution:
    """Prefactor ``c`` in ``<a_i^dagger a_j> = c m z_i* z_j / (1 + |z|^2)`` from contractions."""
    rng = _rng(seed)
    samples = np.empty(draws)
    sectors = [(1, 2), (2, 3), (3, 4), (2, 2)]
    for i in range(draws):
        N, m = sectors[i % len(sectors)]
        z = rng.normal(size=N) + 1j * rng.normal(size=N)
        M = un1_means_matrix(N, m, z)
        unit = un1_means_closed(m, z, prefactor=1.0)
        a, b = rng.integers(1, N + 1, 2)
        samples[i] = (M[a, b] / unit[a, b]).real
    value = float(np.round(np.median(samples) * 2) / 2)
    return Resolution("U(N+1) mean prefactor", "(m/2) z_i* z_j/(1+|z|^2)",
                      f"{'' if value == 1 else f'{value:g} '}m z_i* z_j/(1+|z|^2)", value, 0.5, samples,
                      float(np.max(np.abs(samples - value))))
