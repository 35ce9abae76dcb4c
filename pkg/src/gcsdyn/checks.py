"""Cross-module invariant suite behind ``gcsdyn verify``.

Each check returns a :class:`CheckResult` with a one-line detail string.
Checks are cheap (a few seconds in total) and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import (Group, RepLabel, oscillator_su11, parity_block, su2_casimir,
                      su2_generators, su11_casimir, su11_generators)
from .flow import su2_flow
from .observables import (bose_occupation, resolve_su2_J0_factor,
                          resolve_uncertainty_exponent, resolve_un1_prefactor,
                          thermal_average_check, uncertainty_product)
from .oracle import mobius_vs_riccati_experiment, schrodinger_evolve
from .states import su2_cs, un1_cs, un1_kernel, wavepacket_identity_check
from .tracks import CoefficientTrack, PiecewiseConstant

__all__ = ["CheckResult", "CHECKS", "run_checks", "format_table"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _casimir_oscillator():
    K = oscillator_su11(64)
    full = su11_casimir(K)
    worst = 0.0
    for parity in (1, -1):
        block = parity_block(full, parity)[:-1, :-1]
        worst = max(worst, float(np.max(np.abs(block + 3 / 16 * np.eye(len(block))))))
    return worst < 1e-12, f"K^2 = -3/16 on trusted rows of both parity blocks, max dev {worst:.1e}"


def _casimir_su2():
    worst = 0.0
    for twoj in range(1, 21):
        j = twoj / 2
        C = su2_casimir(su2_generators(j))
        worst = max(worst, float(np.max(np.abs(C - j * (j + 1) * np.eye(len(C))))))
    return worst < 1e-12, f"J^2 = j(j+1) for j = 1/2..10, max dev {worst:.1e}"


def _commutators():
    worst = 0.0
    for j in (0.5, 1.0, 3.5):
        g = su2_generators(j)
        worst = max(worst, np.max(np.abs(g["J0"] @ g["Jp"] - g["Jp"] @ g["J0"] - g["Jp"])),
                    np.max(np.abs(g["Jp"] @ g["Jm"] - g["Jm"] @ g["Jp"] - 2 * g["J0"])))
    for k in (0.25, 0.75, 1.5):
        g = su11_generators(k, 40)
        c = (g["Kp"] @ g["Km"] - g["Km"] @ g["Kp"] + 2 * g["K0"])[:-1, :-1]
        worst = max(worst, np.max(np.abs(c)))
    return worst < 1e-12, f"[J0,J+]=J+, [J+,J-]=2J0, [K-,K+]=2K0 (trusted rows), max dev {worst:.1e}"


def _kernel():
    rng = np.random.default_rng(7)
    worst = 0.0
    for N, m in ((1, 2), (2, 3), (3, 4)):
        for _ in range(100):
            y = rng.normal(size=N) + 1j * rng.normal(size=N)
            z = rng.normal(size=N) + 1j * rng.normal(size=N)
            numeric = un1_cs(N, m, y).overlap(un1_cs(N, m, z))
            worst = max(worst, abs(numeric - un1_kernel(m, y, z)))
    return worst < 1e-10, f"<m;y|m;z> = (1+y*z)^m normalized, 300 pairs, max dev {worst:.1e}"


def _two_path():
    grid = np.linspace(0, 10, 201)
    tracks = {
        "constant": CoefficientTrack.oscillator(1.3, 0.2, T=10),
        "piecewise": CoefficientTrack.oscillator(PiecewiseConstant((0, 3, 7), (1.0, 1.4, 0.8)),
                                                 PiecewiseConstant((0, 5), (0.0, 0.3)), T=10),
    }
    worst = 0.0
    for tr in tracks.values():
        worst = max(worst, mobius_vs_riccati_experiment(tr, 0.3 + 0.2j, grid).sup_distance)
    return worst < 1e-8, f"Riccati vs auxiliary-oscillator propagator, sup disc distance {worst:.1e}"


def _uncertainty_floor():
    rng = np.random.default_rng(11)
    r = 0.95 * np.sqrt(rng.uniform(size=1000))
    z = r * np.exp(1j * rng.uniform(-np.pi, np.pi, 1000))
    worst = 0.0
    for k in (0.25, 0.75):
        prod = np.array([uncertainty_product(k, zi) for zi in z])
        worst = min(worst, float(np.min(prod - 4 * k * k)))
    return worst >= -1e-10, f"<q^2><p^2> - 4k^2 >= {worst:.1e} over 1000 disc points"


def _thermal():
    worst = 0.0
    for bw in (0.5, 1.0, 2.0, 5.0):
        rep = thermal_average_check(bw, "number")
        worst = max(worst, rep.abs_discrepancy,
                    abs(rep.closed_form_value - bose_occupation(bw)))
    at1 = thermal_average_check(1.0, "number").closed_form_value.real
    return worst < 1e-10, f"beta*omega=1: {at1:.10f} vs 1/(e-1) = {1 / math.expm1(1):.10f}"


def _wavepacket():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(4):
        alpha = rng.uniform(0, 1) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        z = rng.uniform(0, 1) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        res = wavepacket_identity_check(alpha, z, 40)
        worst = max(worst, res.identity, res.product, res.eigen)
    return worst < 1e-10, f"two-mode wave-packet identity at trunc 40, max residual {worst:.1e}"


def _resolution(fn):
    def check():
        r = fn()
        return r.consistent, f"printed {r.printed} -> resolved {r.resolved} (spread {r.spread:.1e})"
    return check


def _su2_convention():
    """Which sphere Riccati pairing reproduces H = h J+ + h* J- + h0 J0."""
    h0, h, z0 = 0.7, 0.4 + 0.3j, 0.3 - 0.2j
    grid = np.linspace(0, 3, 31)
    rep = RepLabel(Group.SU2, 1.5)
    quantum = CoefficientTrack.linear(h0, np.conj(h), T=3)
    res = schrodinger_evolve(rep, quantum, su2_cs(1.5, z0), grid)
    fid = {}
    for label, hh in (("h", h), ("h*", np.conj(h))):
        z = su2_flow(z0, CoefficientTrack.linear(h0, hh, T=3), grid).z
        fid[label] = min(abs(np.vdot(su2_cs(1.5, zi).coeffs, c)) for zi, c in zip(z, res.coeffs))
    ok = fid["h*"] > 1 - 1e-8 and fid["h"] < 1 - 1e-4
    return ok, ("H = h J+ + h* J- + h0 J0 evolves as i dz/dt = h + h0 z - h* z^2 "
                f"(fidelity {fid['h*']:.12f}; printed pairing gives {fid['h']:.6f})")


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "casimir-oscillator": _casimir_oscillator,
    "casimir-su2": _casimir_su2,
    "commutators": _commutators,
    "kernel": _kernel,
    "two-path": _two_path,
    "uncertainty-floor": _uncertainty_floor,
    "thermal": _thermal,
    "wavepacket": _wavepacket,
    "resolve-uncertainty-power": _resolution(resolve_uncertainty_exponent),
    "resolve-su2-J0-factor": _resolution(resolve_su2_J0_factor),
    "resolve-un1-prefactor": _resolution(resolve_un1_prefactor),
    "su2-convention": _su2_convention,
}


def run_checks(name_filter: str | None = None) -> list[CheckResult]:
    out = []
    for name, fn in CHECKS.items():
        if name_filter and name_filter not in name:
            continue
        try:
            passed, detail = fn()
        except Exception as err:  # a crashing check is a failing check
            passed, detail = False, f"{type(err).__name__}: {err}"
        out.append(CheckResult(name, bool(passed), detail))
    return out


def format_table(results: list[CheckResult]) -> str:
    width = max((len(r.name) for r in results), default=4)
    lines = [f"{'check':<{width}}  status  detail", "-" * (width + 16)]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.detail}")
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed")
    return "\n".join(lines)
