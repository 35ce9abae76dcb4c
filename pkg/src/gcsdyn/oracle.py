"""Exact quantum evolution in truncated bases, compared with classical flows.

The Schrodinger equation is solved with piecewise-constant Hamiltonians:
smooth tracks are sampled at segment midpoints, and every segment applies a
unitary ``exp(-i H dt)``.  Two propagators are used:

* full Hermitian eigendecomposition, cached per distinct Hamiltonian (small
  bases, or tracks with few distinct values);
* short-iterative Lanczos, which eigendecomposes the Krylov projection of
  ``H`` and is unitary to round-off, for large bases with smoothly varying
  coefficients where a fresh full eigendecomposition per segment is too slow.

Weight on untrusted rows is watched after every segment; above the guard
threshold the run aborts with :class:`~gcsdyn.exceptions.TruncationLeakError`.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.linalg import eigh, eigh_tridiagonal

from .algebra import Group, RepLabel, hamiltonian_matrix, su11_generators
from .exceptions import TruncationLeakError
from .flow import (EpsilonSolution, disc_distance, ermakov_solve, glauber_flow,
                   mobius_from_epsilon, su2_flow, su11_flow, un1_flow)
from .observables import su11_means_closed
from .states import StateVector, glauber_cs, su2_cs, su11_cs, un1_cs
from .tracks import CoefficientTrack

__all__ = [
    "EvolutionResult",
    "schrodinger_evolve",
    "StabilityReport",
    "stability_experiment",
    "MobiusReport",
    "mobius_vs_riccati_experiment",
    "coherent_state",
    "quantum_coefficients",
    "DEFAULT_SEGMENTS",
    "LEAK_THRESHOLD",
]

DEFAULT_SEGMENTS = 2048
LEAK_THRESHOLD = 1e-8
_EIG_MAX_DIM = 256
_EIG_MAX_DISTINCT = 32


@dataclass
class EvolutionResult:
    """Quantum trajectory on the output grid.

    Attributes
    ----------
    t : numpy.ndarray
        Output times.
    coeffs : numpy.ndarray
        ``(len(t), dim)`` state coefficients.
    norm_drift : float
        ``max_t | ||psi(t)|| - ||psi(0)|| |``.
    fidelity : numpy.ndarray or None
        ``|<reference(t)|psi(t)>|`` when a reference was supplied.
    tail_mass : numpy.ndarray
        Weight on untrusted rows at each output time.
    method : str
        ``"eig"`` or ``"lanczos"``.
    """

    t: np.ndarray
    coeffs: np.ndarray
    rep: RepLabel
    norm_drift: float
    fidelity: np.ndarray | None
    tail_mass: np.ndarray
    method: str
    segments: int

    @property
    def states(self) -> list[StateVector]:
        basis = {Group.SU2: "su2", Group.SU11: "su11", Group.HW: "fock", Group.UN1: "un1"}
        basis = basis[self.rep.group]
        return [StateVector(basis, c, self.rep.weight, self.rep.trust_dim) for c in self.coeffs]


# --------------------------------------------------------------------------
# propagators

def _is_tridiagonal(H: np.ndarray) -> bool:
    return not (np.any(np.triu(H, 2)) or np.any(np.tril(H, -2)))


class _EigPropagator:
    """``exp(-i H dt)`` from one Hermitian eigendecomposition."""

    def __init__(self, H: np.ndarray):
        n = H.shape[0]
        if n > 2 and _is_tridiagonal(H):
            # a diagonal phase gauge makes the matrix real symmetric
            sub = np.diag(H, -1)
            mag = np.abs(sub)
            phase = np.ones(n, dtype=complex)
            unit = np.where(mag > 0, sub / np.where(mag > 0, mag, 1.0), 1.0)
            phase[1:] = np.cumprod(unit)
            self.w, V = eigh_tridiagonal(np.diag(H).real, mag)
            self.V = phase[:, None] * V
        else:
            self.w, self.V = eigh(H)

    def apply(self, psi, dt):
        return self.V @ (np.exp(-1j * self.w * dt) * (self.V.conj().T @ psi))


def _lanczos_apply(H, psi, dt, tol=1e-15, kmax=80):
    """``exp(-i H dt) psi`` by Lanczos with full reorthogonalization."""
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        return psi
    n = len(psi)
    kmax = min(kmax, n)
    V = np.empty((kmax, n), dtype=complex)
    V[0] = psi / nrm
    alpha = np.empty(kmax)
    beta = np.empty(kmax)
    for k in range(kmax):
        w = H @ V[k]
        alpha[k] = np.vdot(V[k], w).real
        w = w - V[: k + 1].T @ (V[: k + 1].conj() @ w)
        w = w - V[: k + 1].T @ (V[: k + 1].conj() @ w)
        beta[k] = np.linalg.norm(w)
        if k >= 3 or beta[k] < 1e-300 or k == kmax - 1:
            if k == 0:
                ev, S = alpha[:1], np.ones((1, 1))
            else:
                ev, S = eigh_tridiagonal(alpha[: k + 1], beta[:k])
            c = S @ (np.exp(-1j * ev * dt) * S[0])
            if beta[k] * abs(c[-1]) < tol or beta[k] < 1e-300 or k == kmax - 1:
                if k == kmax - 1 and beta[k] * abs(c[-1]) >= tol:
                    raise RuntimeError("Lanczos propagator did not converge; use more segments")
                return nrm * (V[: k + 1].T @ c)
        V[k + 1] = w / beta[k]
    raise AssertionError("unreachable")


# --------------------------------------------------------------------------
# helpers linking tracks and representations

def quantum_coefficients(rep: RepLabel, track: CoefficientTrack, t: float, hint=None) -> dict:
    """Hamiltonian keyword arguments for the quantum side at time ``t``.

    For SU(2) the ladder coefficient is conjugated: the sphere Riccati flow
    ``i dz/dt = h* + h0 z - h z^2`` is generated by ``h* J+ + h J- + h0 J0``.
    """
    kw = track.hamiltonian_kwargs(t, hint)
    if rep.group is Group.SU2:
        kw = {"h0": kw["h0"], "h": np.conj(kw["h"])}
    return kw


class _SparseBuilder:
    """Sparse Hamiltonians from precomputed basis matrices, using linearity in the coefficients."""

    def __init__(self, rep: RepLabel, example: dict):
        self.rep = rep
        self.basis = None
        if rep.group is Group.UN1:
            return
        self.basis = []
        for name in sorted(example):
            for part, unit in (("re", 1.0), ("im", 1j)):
                if part == "im" and name not in ("h", "F"):
                    continue
                kw = {n: 0.0 for n in example}
                kw[name] = unit
                self.basis.append((name, part, sparse.csr_matrix(hamiltonian_matrix(rep, **kw))))

    def __call__(self, kw: dict):
        if self.basis is None:
            return sparse.csr_matrix(hamiltonian_matrix(self.rep, **kw))
        H = sparse.csr_matrix((self.rep.dim, self.rep.dim), dtype=complex)
        for name, part, B in self.basis:
            v = complex(kw[name])
            c = v.real if part == "re" else v.imag
            if c:
                H = H + c * B
        return H


def _key(kw: dict):
    return tuple((k, np.asarray(v).tobytes()) for k, v in sorted(kw.items()))


def coherent_state(rep: RepLabel, z) -> np.ndarray:
    """Coefficients of the coherent state at ``z`` in the basis of ``rep``."""
    g = rep.group
    if g is Group.SU2:
        return su2_cs(rep.weight, z).coeffs
    if g is Group.SU11:
        return su11_cs(rep.weight, z, rep.dim, tail_tol=1.0).coeffs
    if g is Group.HW:
        return glauber_cs(z, rep.dim, tail_tol=1.0).coeffs
    N = int(rep.weight[0]) if isinstance(rep.weight, tuple) else None
    m = int(rep.weight[1]) if isinstance(rep.weight, tuple) else int(rep.weight)
    z = np.atleast_1d(z)
    return un1_cs(len(z) if N is None else N, m, z).coeffs


def _tail(rep: RepLabel, psi) -> float:
    if rep.trust_dim >= rep.dim:
        return 0.0
    return float(np.sum(np.abs(psi[rep.trust_dim:]) ** 2))


def _segment_bounds(grid, track, segments):
    grid = np.asarray(grid, dtype=float)
    pts = np.concatenate([np.linspace(grid[0], grid[-1], segments + 1), grid,
                          [tb for tb in track.joints if grid[0] < tb < grid[-1]]])
    pts = np.unique(pts)
    tol = 1e-12 * max(1.0, abs(grid[-1]))
    keep = np.concatenate(([True], np.diff(pts) > tol))
    pts = pts[keep]
    # snap so that every grid time is represented exactly
    idx = np.searchsorted(pts, grid - tol)
    pts[idx] = grid
    return pts, idx


def schrodinger_evolve(rep: RepLabel, track: CoefficientTrack, psi0, grid, *,
                       segments: int = DEFAULT_SEGMENTS, reference=None,
                       leak_threshold: float = LEAK_THRESHOLD,
                       method: str = "auto") -> EvolutionResult:
    """Evolve ``psi0`` under the truncated Hamiltonian of ``track``.

    Parameters
    ----------
    rep : RepLabel
        Representation (and truncation) to work in.
    track : CoefficientTrack
        Coefficients; SU(2) tracks are read as the sphere Riccati coefficients
        (see :func:`quantum_coefficients`).
    psi0 : StateVector or array_like
        Initial coefficients of length ``rep.dim``.
    grid : array_like
        Output times, strictly increasing.
    segments : int
        Number of equal segments over the grid span; grid times and track
        joints are added as extra segment boundaries.
    reference : callable, optional
        ``reference(i, t) -> coefficients``; its overlap modulus with
        ``psi(t)`` is recorded as the fidelity.
    method : {"auto", "eig", "lanczos"}

    Raises
    ------
    TruncationLeakError
        Weight on untrusted rows exceeded ``leak_threshold``.
    """
    grid = np.asarray(grid, dtype=float)
    psi = np.array(getattr(psi0, "coeffs", psi0), dtype=complex)
    if psi.shape != (rep.dim,):
        raise ValueError(f"initial state has shape {psi.shape}, representation needs ({rep.dim},)")
    if len(grid) < 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    if _tail(rep, psi) > leak_threshold:
        raise TruncationLeakError(
            f"initial state has {_tail(rep, psi):.3e} weight on untrusted rows; "
            f"increase trunc_dim beyond {rep.dim}", grid[0])

    pts, out_idx = _segment_bounds(grid, track, segments)
    mids = 0.5 * (pts[:-1] + pts[1:])
    kws = [quantum_coefficients(rep, track, tm, tm) for tm in mids]
    keys = [_key(kw) for kw in kws]
    distinct = len(set(keys))
    if method == "auto":
        method = "eig" if rep.dim <= _EIG_MAX_DIM or distinct <= _EIG_MAX_DISTINCT else "lanczos"
    if method not in ("eig", "lanczos"):
        raise ValueError("method must be 'auto', 'eig' or 'lanczos'")

    norm0 = np.linalg.norm(psi)
    coeffs = np.empty((len(grid), rep.dim), dtype=complex)
    tails = np.empty(len(grid))
    coeffs[0], tails[0] = psi, _tail(rep, psi)
    cache: dict = {}
    sparse_cache: dict = {}
    builder = _SparseBuilder(rep, kws[0]) if method == "lanczos" else None
    nxt = 1
    for s in range(len(mids)):
        dt = pts[s + 1] - pts[s]
        key = keys[s]
        if method == "eig":
            prop = cache.get(key)
            if prop is None:
                prop = cache.setdefault(key, _EigPropagator(hamiltonian_matrix(rep, **kws[s])))
            psi = prop.apply(psi, dt)
        else:
            H = sparse_cache.get(key)
            if H is None:
                H = builder(kws[s])
                if len(sparse_cache) < 4:
                    sparse_cache[key] = H
            psi = _lanczos_apply(H, psi, dt)
        tail = _tail(rep, psi)
        if tail > leak_threshold:
            raise TruncationLeakError(
                f"{tail:.3e} of the weight reached the untrusted rows of a "
                f"{rep.dim}-dimensional basis; increase trunc_dim (e.g. to {2 * rep.dim})",
                pts[s + 1])
        while nxt < len(grid) and out_idx[nxt] == s + 1:
            coeffs[nxt], tails[nxt] = psi, tail
            nxt += 1

    drift = float(np.max(np.abs(np.linalg.norm(coeffs, axis=1) - norm0)))
    fid = None
    if reference is not None:
        fid = np.array([abs(np.vdot(reference(i, t), coeffs[i])) for i, t in enumerate(grid)])
    return EvolutionResult(grid, coeffs, rep, drift, fid, tails, method, len(mids))


# --------------------------------------------------------------------------
# experiments

@dataclass
class StabilityReport:
    """Fidelity of quantum evolution against coherent states on one classical trajectory."""

    group: Group
    t: np.ndarray
    z: np.ndarray
    weights: list
    fidelity: dict = field(default_factory=dict)
    norm_drift: dict = field(default_factory=dict)
    trunc_dim: dict = field(default_factory=dict)
    k0_error: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def min_fidelity(self) -> dict:
        return {w: float(np.min(f)) for w, f in self.fidelity.items()}

    def passed(self, tol: float = 1e-6) -> bool:
        return all(f >= 1 - tol for f in self.min_fidelity.values())


def _classical(group: Group, track, z0, grid, dt):
    if group is Group.SU2:
        return su2_flow(z0, track, grid, dt=dt).z
    if group is Group.SU11:
        return su11_flow(z0, track, grid, dt=dt).z
    if group is Group.HW:
        return glauber_flow(z0, track, grid, dt=dt).z
    return un1_flow(z0, track, grid, dt=dt).z


def _auto_trunc(k: float, z: np.ndarray) -> int:
    zmax = float(np.max(np.abs(z)))
    return max(64, 2 * su11_cs(k, zmax, tail_tol=1e-15).dim)


def _rep_for(group: Group, weight, z, trunc_dim):
    if group is Group.SU2:
        return RepLabel(group, weight)
    if group is Group.SU11:
        return RepLabel(group, weight, trunc_dim or _auto_trunc(weight, z))
    if group is Group.HW:
        zmax = float(np.max(np.abs(z)))
        return RepLabel(group, None, trunc_dim or max(64, 2 * glauber_cs(zmax, tail_tol=1e-15).dim))
    N = np.atleast_2d(z).shape[1]
    return RepLabel(group, (N, int(weight)))


def stability_experiment(group, weights, track: CoefficientTrack, z0, grid, *,
                         trunc_dim: int | None = None, segments: int = DEFAULT_SEGMENTS,
                         dt: float = 1e-3, jobs: int = 1) -> StabilityReport:
    """Integrate the classical flow once and test every weight against it.

    For each weight the coherent state at ``z0`` is evolved quantum
    mechanically and compared, at every output time, with the coherent state
    of the same weight at the classical ``z(t)``.  SU(1,1) runs also record
    the largest deviation of ``<K0>(t)`` from its closed form at ``z(t)``.
    """
    start = time.perf_counter()
    group = Group(group)
    grid = np.asarray(grid, dtype=float)
    z = _classical(group, track, z0, grid, dt)
    report = StabilityReport(group, grid, z, list(weights))

    def run(weight):
        rep = _rep_for(group, weight, z, trunc_dim)
        ref = [coherent_state(rep, zi) for zi in z]
        res = schrodinger_evolve(rep, track, ref[0], grid, segments=segments,
                                 reference=lambda i, t: ref[i])
        k0err = None
        if group is Group.SU11:
            K0 = np.diag(su11_generators(rep.weight, rep.dim)["K0"]).real
            quantum = np.sum(K0 * np.abs(res.coeffs) ** 2, axis=1)
            closed = np.array([su11_means_closed(rep.weight, zi)["K0"].real for zi in z])
            k0err = float(np.max(np.abs(quantum - closed) / closed))
        return weight, rep.dim, res, k0err

    if jobs > 1 and len(report.weights) > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(run, report.weights))
    else:
        results = [run(w) for w in report.weights]
    for weight, dim, res, k0err in results:
        report.fidelity[weight] = res.fidelity
        report.norm_drift[weight] = res.norm_drift
        report.trunc_dim[weight] = dim
        if k0err is not None:
            report.k0_error[weight] = k0err
    report.wall_time = time.perf_counter() - start
    return report


@dataclass
class MobiusReport:
    t: np.ndarray
    z_riccati: np.ndarray
    z_mobius: np.ndarray
    distance: np.ndarray
    wronskian_drift: float
    convention: str
    eps: EpsilonSolution | None = None

    @property
    def sup_distance(self) -> float:
        return float(np.max(self.distance))


def mobius_vs_riccati_experiment(track: CoefficientTrack, z0: complex, grid, *,
                                 dt: float = 1e-3, convention: str = "full",
                                 eps0=None, deps0=None) -> MobiusReport:
    """Disc trajectory two ways: Riccati integration and the auxiliary-oscillator propagator.

    The propagator is ``M(t) M(0)^{-1}`` with ``M`` from
    :func:`~gcsdyn.flow.mobius_from_epsilon`.  Distances are in the Poincare
    metric.  A singular coupling ``g`` in the track has no effect on either path.
    """
    grid = np.asarray(grid, dtype=float)
    ric = su11_flow(z0, track, grid, dt=dt).z
    eps = ermakov_solve(track, grid, eps0=eps0, deps0=deps0, dt=dt)
    M0inv = mobius_from_epsilon(eps, grid[0], convention).inverse()
    mob = np.array([(mobius_from_epsilon(eps, t, convention) @ M0inv)(complex(z0)) for t in grid])
    return MobiusReport(grid, ric, mob, disc_distance(ric, mob),
                        float(np.max(np.abs(eps.wronskian - 1.0))), convention, eps)
