"""Matrix representations of the Lie algebras hw, su(2), su(1,1) and u(N+1).

All constructors return dense complex ``numpy`` arrays that are flagged
read-only, so cached results can be shared safely.  Basis conventions:

* Heisenberg-Weyl: Fock states ``|n>``, ``n = 0..trunc_dim-1``.
* SU(2): ``|j, -j+m>``, ``m = 0..2j`` (lowest weight first).
* SU(1,1) discrete series: ``|k; m>``, ``m = 0..trunc_dim-1``.
* U(N+1) symmetric sector ``(m, 0, ..., 0)``: occupation tuples
  ``(m_0, ..., m_N)`` with ``sum = m``, sorted in descending lexicographic
  order so that the fiducial ``(m, 0, ..., 0)`` comes first.

Truncated ladders are exact on every row except the last one; ``RepLabel``
reports the number of trusted rows.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

__all__ = [
    "Group",
    "RepLabel",
    "fock_ladder",
    "su2_generators",
    "su11_generators",
    "oscillator_su11",
    "oscillator_quadratures",
    "parity_block",
    "schwinger_su2",
    "un1_basis",
    "un1_generators",
    "su2_casimir",
    "su11_casimir",
    "oscillator_coefficients",
    "hamiltonian_matrix",
]


class Group(str, enum.Enum):
    HW = "HW"
    SU2 = "SU2"
    SU11 = "SU11"
    UN1 = "UN1"


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _check_half_integer(j) -> float:
    twoj = 2.0 * float(j)
    if twoj < 1 or abs(twoj - round(twoj)) > 1e-12:
        raise ValueError(f"j must be a positive half-integer, got {j!r}")
    return round(twoj) / 2.0


@dataclass(frozen=True)
class RepLabel:
    """Group kind, weight data and truncation size of a representation.

    ``weight`` is ``j`` for SU(2), ``k`` for SU(1,1), ``(N, m)`` for U(N+1)
    and ``None`` for the Heisenberg-Weyl group.  ``trunc_dim`` is only used by
    the infinite-dimensional cases.
    """

    group: Group
    weight: object = None
    trunc_dim: int | None = None

    def __post_init__(self):
        group = Group(self.group)
        object.__setattr__(self, "group", group)
        if group is Group.SU2:
            object.__setattr__(self, "weight", _check_half_integer(self.weight))
        elif group is Group.SU11:
            if self.weight is None or float(self.weight) <= 0:
                raise ValueError(f"SU(1,1) weight k must be > 0, got {self.weight!r}")
            object.__setattr__(self, "weight", float(self.weight))
            if self.trunc_dim is None or int(self.trunc_dim) < 2:
                raise ValueError("SU(1,1) representations need trunc_dim >= 2")
        elif group is Group.UN1:
            N, m = (int(v) for v in self.weight)
            if N < 1 or m < 1:
                raise ValueError(f"U(N+1) weight needs N >= 1 and m >= 1, got {self.weight!r}")
            object.__setattr__(self, "weight", (N, m))
        elif group is Group.HW:
            if self.trunc_dim is None or int(self.trunc_dim) < 2:
                raise ValueError("Heisenberg-Weyl representations need trunc_dim >= 2")

    @property
    def dim(self) -> int:
        if self.group is Group.SU2:
            return int(round(2 * self.weight)) + 1
        if self.group is Group.UN1:
            N, m = self.weight
            return comb(N + m, m)
        return int(self.trunc_dim)

    @property
    def trust_dim(self) -> int:
        """Number of leading basis rows on which the truncated algebra is exact."""
        if self.group in (Group.SU11, Group.HW):
            return self.dim - 1
        return self.dim

    @property
    def truncated(self) -> bool:
        return self.group in (Group.SU11, Group.HW)


@lru_cache(maxsize=64)
def fock_ladder(dim: int) -> np.ndarray:
    """Truncated annihilation operator ``a`` with ``a|n> = sqrt(n)|n-1>``."""
    if dim < 1:
        raise ValueError("dim must be positive")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    return _frozen(a)


@lru_cache(maxsize=64)
def su2_generators(j) -> dict[str, np.ndarray]:
    """Spin-``j`` ladder matrices ``Jp``, ``Jm`` and ``J0``.

    Examples
    --------
    >>> g = su2_generators(0.5)
    >>> g["J0"].real.diagonal()
    array([-0.5,  0.5])
    """
    j = _check_half_integer(j)
    dim = int(round(2 * j)) + 1
    m = np.arange(dim - 1, dtype=float)
    Jp = np.zeros((dim, dim), dtype=complex)
    Jp[np.arange(1, dim), np.arange(dim - 1)] = np.sqrt((m + 1) * (2 * j - m))
    J0 = np.diag(np.arange(dim) - j).astype(complex)
    return {"Jp": _frozen(Jp), "Jm": _frozen(Jp.conj().T.copy()), "J0": _frozen(J0)}


@lru_cache(maxsize=64)
def su11_generators(k: float, trunc_dim: int) -> dict[str, np.ndarray]:
    """Discrete-series ``D_k^(+)`` generators on ``|k; m>``, ``m < trunc_dim``.

    ``Kp|k;m> = sqrt((m+1)(2k+m)) |k;m+1>`` with a real positive phase.
    """
    k = float(k)
    if k <= 0:
        raise ValueError(f"k must be > 0, got {k}")
    if trunc_dim < 2:
        raise ValueError("trunc_dim must be >= 2")
    m = np.arange(trunc_dim - 1, dtype=float)
    Kp = np.zeros((trunc_dim, trunc_dim), dtype=complex)
    Kp[np.arange(1, trunc_dim), np.arange(trunc_dim - 1)] = np.sqrt((m + 1) * (2 * k + m))
    K0 = np.diag(k + np.arange(trunc_dim, dtype=float)).astype(complex)
    return {"Kp": _frozen(Kp), "Km": _frozen(Kp.conj().T.copy()), "K0": _frozen(K0)}


@lru_cache(maxsize=16)
def oscillator_quadratures(trunc_dim: int) -> dict[str, np.ndarray]:
    """Position and momentum matrices for ``a^dagger = (p + i q)/sqrt(2)``.

    Inverting that convention gives ``p = (a + a^dagger)/sqrt(2)`` and
    ``q = i (a - a^dagger)/sqrt(2)``, so that ``[q, p] = i``.
    """
    a = fock_ladder(trunc_dim)
    ad = a.conj().T
    return {
        "a": a,
        "ad": _frozen(ad.copy()),
        "q": _frozen(1j * (a - ad) / np.sqrt(2)),
        "p": _frozen((a + ad) / np.sqrt(2)),
    }


@lru_cache(maxsize=16)
def oscillator_su11(trunc_dim: int) -> dict[str, np.ndarray]:
    """Quadratic su(1,1) realization ``K1, K2, K3`` on the Fock space.

    ``K1 = (p^2 - q^2)/4``, ``K2 = (pq + qp)/4``, ``K3 = (p^2 + q^2)/4``.  In the
    convention of :func:`oscillator_quadratures` these are ``Kp = a^dagger^2 / 2``,
    ``Km = a^2 / 2`` and ``K0 = K3 = (2 a^dagger a + 1)/4``, filled in entrywise so
    that every entry is exact (no truncated matrix products).
    """
    if trunc_dim < 4:
        raise ValueError("trunc_dim must be >= 4")
    n = np.arange(trunc_dim - 2, dtype=float)
    Kp = np.zeros((trunc_dim, trunc_dim), dtype=complex)
    Kp[np.arange(2, trunc_dim), np.arange(trunc_dim - 2)] = 0.5 * np.sqrt((n + 1) * (n + 2))
    Km = Kp.T.copy()
    K0 = np.diag((2 * np.arange(trunc_dim) + 1) / 4).astype(complex)
    out = {"K1": (Kp + Km) / 2, "K2": (Kp - Km) / 2j, "K3": K0,
           "Kp": Kp, "Km": Km, "K0": K0.copy()}
    return {name: _frozen(np.ascontiguousarray(v)) for name, v in out.items()}


def parity_block(op: np.ndarray, parity: int) -> np.ndarray:
    """Restrict a Fock-space matrix to even (``parity=+1``) or odd (``-1``) levels."""
    if parity not in (1, -1):
        raise ValueError("parity must be +1 or -1")
    start = 0 if parity == 1 else 1
    return np.asarray(op)[start::2, start::2]


@lru_cache(maxsize=32)
def schwinger_su2(N: int) -> dict[str, np.ndarray]:
    """Two-boson su(2) generators restricted to the ``n_a + n_b = N`` sector.

    ``J+ = a^dagger b``, ``J- = b^dagger a``, ``J0 = (a^dagger a - b^dagger b)/2``;
    sector state ``n`` holds ``n`` quanta in mode ``a`` and ``N - n`` in ``b``,
    which maps onto ``|j = N/2, -j + n>``.  The operators are built on the full
    two-mode Fock space ``(N+1)^2`` and projected, the sector being invariant.
    """
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    d = N + 1
    a1 = fock_ladder(d)
    eye = np.eye(d)
    a = np.kron(a1, eye)
    b = np.kron(eye, a1)
    idx = [n * d + (N - n) for n in range(d)]
    sub = np.ix_(idx, idx)
    Jp = (a.conj().T @ b)[sub]
    Jm = (b.conj().T @ a)[sub]
    J0 = (0.5 * (a.conj().T @ a - b.conj().T @ b))[sub]
    return {"Jp": _frozen(Jp), "Jm": _frozen(Jm), "J0": _frozen(J0)}


@lru_cache(maxsize=32)
def un1_basis(N: int, m: int) -> tuple[tuple[int, ...], ...]:
    """Occupation tuples of the degree-``m`` sector of ``N + 1`` modes."""
    states = [c for c in itertools.product(range(m + 1), repeat=N + 1) if sum(c) == m]
    return tuple(sorted(states, reverse=True))


@lru_cache(maxsize=32)
def un1_generators(N: int, m: int) -> np.ndarray:
    """All ``a_i^dagger a_j`` restricted to the symmetric ``(m, 0, ..., 0)`` sector.

    Returns an array ``E`` of shape ``(N+1, N+1, D, D)`` with
    ``D = C(N+m, m)``; ``E[i, j]`` is the matrix of ``a_i^dagger a_j``.
    """
    N, m = int(N), int(m)
    if N < 1 or m < 1:
        raise ValueError("need N >= 1 and m >= 1")
    basis = un1_basis(N, m)
    index = {s: n for n, s in enumerate(basis)}
    D = len(basis)
    E = np.zeros((N + 1, N + 1, D, D), dtype=complex)
    for col, occ in enumerate(basis):
        for j in range(N + 1):
            if occ[j] == 0:
                continue
            for i in range(N + 1):
                new = list(occ)
                amp = np.sqrt(new[j])
                new[j] -= 1
                amp *= np.sqrt(new[i] + 1)
                new[i] += 1
                E[i, j, index[tuple(new)], col] += amp
    return _frozen(E)


def su2_casimir(gens: dict[str, np.ndarray]) -> np.ndarray:
    """``J1^2 + J2^2 + J3^2`` from a ladder triple."""
    Jp, Jm, J0 = gens["Jp"], gens["Jm"], gens["J0"]
    return J0 @ J0 + 0.5 * (Jp @ Jm + Jm @ Jp)


def su11_casimir(gens: dict[str, np.ndarray]) -> np.ndarray:
    """``K0^2 - K1^2 - K2^2``; only the trusted rows are meaningful when truncated."""
    Kp, Km, K0 = gens["Kp"], gens["Km"], gens["K0"]
    return K0 @ K0 - 0.5 * (Kp @ Km + Km @ Kp)


def oscillator_coefficients(omega, b=0.0) -> tuple[float, complex]:
    """Map frequency and friction ``(omega, b)`` to ``(h0, h)``.

    ``H = (p^2 + omega^2 q^2)/2 + b (qp + pq)/2 = h0 K0 + h K+ + h* K-`` with
    ``h0 = 1 + omega^2`` and ``h = (1 - omega^2)/2 - i b``.
    """
    omega = _real(omega, "omega")
    b = _real(b, "b")
    return 1.0 + omega**2, complex((1.0 - omega**2) / 2.0, -b)


def _real(value, name: str) -> float:
    c = complex(value)
    if abs(c.imag) > 1e-14 * max(1.0, abs(c.real)):
        raise ValueError(f"{name} must be real (Hermitian Hamiltonian), got {value!r}")
    return c.real


def _hermitian(hmat, name: str = "hmat") -> np.ndarray:
    hmat = np.asarray(hmat, dtype=complex)
    if hmat.ndim != 2 or hmat.shape[0] != hmat.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(hmat))))
    if np.max(np.abs(hmat - hmat.conj().T)) > 1e-12 * scale:
        raise ValueError(f"{name} must be Hermitian")
    return hmat


def hamiltonian_matrix(rep: RepLabel, *, h0=None, h=None, omega=None, b=None,
                       F=None, hmat=None) -> np.ndarray:
    """Hamiltonian linear in the generators of ``rep``.

    Parameters
    ----------
    rep : RepLabel
        Target representation.
    h0, h : real, complex
        SU(2): ``H = h J+ + h* J- + h0 J0``.  SU(1,1): ``H = h0 K0 + h K+ + h* K-``.
    omega, b : real
        SU(1,1) only, alternative to ``(h0, h)``: the oscillator-with-friction
        family, mapped through :func:`oscillator_coefficients`.
        Heisenberg-Weyl: ``omega`` is the rotation frequency.
    F : complex
        Heisenberg-Weyl force, ``H = omega a^dagger a + F a^dagger + F* a``.
    hmat : (N+1, N+1) array
        U(N+1): ``H = sum_ij hmat[i, j] a_i^dagger a_j``; must be Hermitian.

    Returns
    -------
    numpy.ndarray
        Hermitian ``rep.dim x rep.dim`` matrix.
    """
    g = rep.group
    if g is Group.SU2:
        gens = su2_generators(rep.weight)
        h0 = _real(0.0 if h0 is None else h0, "h0")
        h = complex(0.0 if h is None else h)
        H = h * gens["Jp"] + np.conj(h) * gens["Jm"] + h0 * gens["J0"]
    elif g is Group.SU11:
        gens = su11_generators(rep.weight, rep.dim)
        if omega is not None:
            if h0 is not None or h is not None:
                raise ValueError("give either (omega, b) or (h0, h), not both")
            h0, h = oscillator_coefficients(omega, 0.0 if b is None else b)
        h0 = _real(0.0 if h0 is None else h0, "h0")
        h = complex(0.0 if h is None else h)
        H = h0 * gens["K0"] + h * gens["Kp"] + np.conj(h) * gens["Km"]
    elif g is Group.UN1:
        N, m = rep.weight
        hmat = _hermitian(np.zeros((N + 1, N + 1)) if hmat is None else hmat)
        if hmat.shape != (N + 1, N + 1):
            raise ValueError(f"hmat must have shape {(N + 1, N + 1)}")
        H = np.einsum("ij,ijab->ab", hmat, un1_generators(N, m))
    else:
        a = fock_ladder(rep.dim)
        omega = _real(0.0 if omega is None else omega, "omega")
        F = complex(0.0 if F is None else F)
        ad = a.conj().T
        H = omega * (ad @ a) + F * ad + np.conj(F) * a
    return np.asarray(H)
