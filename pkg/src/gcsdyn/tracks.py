"""Time-dependent Hamiltonian coefficients.

A :class:`CoefficientTrack` bundles named channels over ``[0, T]``.  The
channel names used by the flows are

=========  =========================================================
``omega``  oscillator / rotation frequency (real)
``b``      friction-like ``(qp + pq)/2`` coefficient (real)
``g``      singular coupling ``g / q^2`` (real, constant)
``h0``     real diagonal coefficient of a linear Hamiltonian
``h``      complex ladder coefficient of a linear Hamiltonian
``F``      complex Heisenberg-Weyl force
``hmat``   Hermitian ``(N+1) x (N+1)`` coefficient matrix
=========  =========================================================

Piecewise-constant channels carry explicit joints.  Evaluation at a joint
is ambiguous, so every channel accepts a ``hint`` time lying strictly inside
the segment the caller is working on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline


__all__ = [
    "Channel",
    "Constant",
    "PiecewiseConstant",
    "Sinusoid",
    "Sampled",
    "CoefficientTrack",
]

REAL_CHANNELS = frozenset({"omega", "b", "g", "h0"})
KNOWN_CHANNELS = REAL_CHANNELS | {"h", "F", "hmat"}


class Channel:
    """A coefficient as a function of time."""

    kind = "abstract"

    def __call__(self, t: float, hint: float | None = None):
        raise NotImplementedError

    def derivative(self, t: float, hint: float | None = None):
        raise NotImplementedError

    @property
    def joints(self) -> tuple[float, ...]:
        return ()

    def jump(self, t: float):
        """Right limit minus left limit at ``t`` (zero for continuous channels)."""
        return 0.0

    def is_real(self) -> bool:
        raise NotImplementedError

    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True, eq=False)
class Constant(Channel):
    value: object
    kind = "constant"

    def __call__(self, t, hint=None):
        return self.value

    def derivative(self, t, hint=None):
        return 0.0 * self.value

    def is_real(self):
        return bool(np.all(np.imag(self.value) == 0))

    def is_zero(self):
        return bool(np.all(np.asarray(self.value) == 0))


@dataclass(frozen=True, eq=False)
class PiecewiseConstant(Channel):
    """Step function: ``values[i]`` on ``[breaks[i], breaks[i+1])``.

    ``breaks`` must start at 0 and be strictly increasing; the last segment
    extends to the end of the track.
    """

    breaks: tuple
    values: tuple
    kind = "piecewise"

    def __post_init__(self):
        breaks = tuple(float(x) for x in self.breaks)
        values = tuple(self.values)
        if len(breaks) != len(values) or not breaks:
            raise ValueError("breaks and values must have the same nonzero length")
        if breaks[0] != 0.0:
            raise ValueError("first break must be at t = 0 so segments cover the track")
        if any(b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])):
            raise ValueError("breaks must be strictly increasing")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "values", values)

    def _index(self, t, hint):
        ref = t if hint is None else hint
        return max(0, int(np.searchsorted(self.breaks, ref, side="right")) - 1)

    def __call__(self, t, hint=None):
        return self.values[self._index(t, hint)]

    def derivative(self, t, hint=None):
        return 0.0 * np.asarray(self.values[0])

    @property
    def joints(self):
        return self.breaks[1:]

    def jump(self, t):
        for i, tb in enumerate(self.breaks[1:], start=1):
            if abs(tb - t) <= 1e-12 * max(1.0, abs(t)):
                return np.asarray(self.values[i]) - np.asarray(self.values[i - 1])
        return 0.0

    def is_real(self):
        return all(np.all(np.imag(v) == 0) for v in self.values)


@dataclass(frozen=True)
class Sinusoid(Channel):
    """``offset + amplitude * sin(frequency * t + phase)``."""

    offset: complex = 0.0
    amplitude: complex = 0.0
    frequency: float = 1.0
    phase: float = 0.0
    kind = "sinusoidal"

    def __call__(self, t, hint=None):
        return self.offset + self.amplitude * math.sin(self.frequency * t + self.phase)

    def derivative(self, t, hint=None):
        return self.amplitude * self.frequency * math.cos(self.frequency * t + self.phase)

    def is_real(self):
        return np.imag(self.offset) == 0 and np.imag(self.amplitude) == 0

    def is_zero(self):
        return self.offset == 0 and self.amplitude == 0


class Sampled(Channel):
    """Smooth channel interpolated from samples.

    With ``derivatives`` a cubic Hermite spline is used and :meth:`derivative`
    is available; without them a natural cubic spline interpolates the values
    and :meth:`derivative` raises, because a derivative not supplied by the
    caller would be an interpolation artefact.
    """

    kind = "sampled"

    def __init__(self, times, values, derivatives=None):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values)
        if self.times.ndim != 1 or len(self.times) < 2 or np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be a strictly increasing 1-d array")
        self.has_derivative = derivatives is not None
        if self.has_derivative:
            self._spline = CubicHermiteSpline(self.times, self.values, np.asarray(derivatives))
        else:
            self._spline = CubicSpline(self.times, self.values)

    def __call__(self, t, hint=None):
        out = self._spline(t)
        return out.item() if np.ndim(out) == 0 else out

    def derivative(self, t, hint=None):
        if not self.has_derivative:
            raise ValueError("sampled channel has no derivative data")
        out = self._spline.derivative()(t)
        return out.item() if np.ndim(out) == 0 else out

    def is_real(self):
        return bool(np.all(np.imag(self.values) == 0))

    def is_zero(self):
        return bool(np.all(self.values == 0)) and (
            not self.has_derivative or bool(np.all(self._spline.c == 0)))


def _as_channel(value) -> Channel:
    if isinstance(value, Channel):
        return value
    return Constant(np.asarray(value).item() if np.ndim(value) == 0 else np.asarray(value))


@dataclass(frozen=True)
class CoefficientTrack:
    """Named coefficient channels on the time domain ``[0, T]``.

    Plain numbers or arrays are wrapped in :class:`Constant`.  Real channels
    and Hermiticity of ``hmat`` are validated on construction.
    """

    channels: Mapping[str, Channel]
    T: float
    _family: str = field(default="generic", compare=False)

    def __post_init__(self):
        chans = {name: _as_channel(v) for name, v in dict(self.channels).items()}
        unknown = set(chans) - KNOWN_CHANNELS
        if unknown:
            raise ValueError(f"unknown channels: {sorted(unknown)}")
        if self.T <= 0:
            raise ValueError("T must be positive")
        for name in REAL_CHANNELS & set(chans):
            if not chans[name].is_real():
                raise ValueError(f"channel {name!r} must be real (Hermitian Hamiltonian)")
        if "hmat" in chans:
            for t in (0.0, *self._joints_of(chans), self.T):
                m = np.asarray(chans["hmat"](t, hint=t), dtype=complex)
                if m.ndim != 2 or np.max(np.abs(m - m.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(m))):
                    raise ValueError("channel 'hmat' must be a Hermitian matrix at every sample")
        for name, ch in chans.items():
            if any(tb >= self.T for tb in ch.joints):
                raise ValueError(f"channel {name!r} has a joint at or beyond T")
        object.__setattr__(self, "channels", chans)
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "_family_cache", self._detect_family())
        object.__setattr__(self, "_b_varies", "b" in chans and not chans["b"].is_zero())

    @staticmethod
    def _joints_of(chans):
        return sorted({tb for ch in chans.values() for tb in ch.joints})

    # constructors -------------------------------------------------------
    @classmethod
    def oscillator(cls, omega, b=0.0, T=1.0, g=None):
        """Oscillator with friction ``(p^2 + omega^2 q^2)/2 + b (qp+pq)/2 [+ g/q^2]``."""
        ch = {"omega": omega, "b": b}
        if g is not None:
            ch["g"] = g
        return cls(ch, T, "oscillator")

    @classmethod
    def linear(cls, h0, h, T=1.0):
        return cls({"h0": h0, "h": h}, T, "linear")

    @classmethod
    def glauber(cls, omega, F=0.0, T=1.0):
        return cls({"omega": omega, "F": F}, T, "glauber")

    @classmethod
    def matrix(cls, hmat, T=1.0):
        return cls({"hmat": hmat}, T, "matrix")

    # queries ------------------------------------------------------------
    @property
    def family(self) -> str:
        return self._family_cache

    def _detect_family(self) -> str:
        if self._family != "generic":
            return self._family
        names = set(self.channels)
        if "hmat" in names:
            return "matrix"
        if "F" in names:
            return "glauber"
        if "h0" in names or "h" in names:
            return "linear"
        return "oscillator"

    @property
    def joints(self) -> tuple[float, ...]:
        return tuple(self._joints_of(self.channels))

    def segments(self) -> list[tuple[float, float]]:
        """Intervals on which every channel is smooth."""
        pts = [0.0, *self.joints, self.T]
        return list(zip(pts[:-1], pts[1:]))

    def has(self, name: str) -> bool:
        return name in self.channels

    def value(self, name: str, t: float, hint: float | None = None, default=0.0):
        ch = self.channels.get(name)
        if ch is None:
            return default
        v = ch(t, hint)
        return v.real if name in REAL_CHANNELS and isinstance(v, complex) else v

    def derivative(self, name: str, t: float, hint: float | None = None):
        ch = self.channels.get(name)
        return 0.0 if ch is None else ch.derivative(t, hint)

    def jump(self, name: str, t: float):
        ch = self.channels.get(name)
        return 0.0 if ch is None else ch.jump(t)

    def su_coefficients(self, t: float, hint: float | None = None) -> tuple[float, complex]:
        """``(h0, h)`` of the linear SU(2)/SU(1,1) Hamiltonian at time ``t``.

        Oscillator tracks go through ``h0 = 1 + omega^2``,
        ``h = (1 - omega^2)/2 - i b``.
        """
        fam = self.family
        if fam == "oscillator":
            w2 = self.value("omega", t, hint, 1.0) ** 2
            return 1.0 + w2, complex(0.5 * (1.0 - w2), -self.value("b", t, hint))
        if fam == "linear":
            return float(np.real(self.value("h0", t, hint))), complex(self.value("h", t, hint))
        raise ValueError(f"a {fam!r} track has no (h0, h) coefficients")

    def glauber_coefficients(self, t: float, hint: float | None = None) -> tuple[float, complex]:
        return float(np.real(self.value("omega", t, hint))), complex(self.value("F", t, hint))

    def hmat(self, t: float, hint: float | None = None) -> np.ndarray:
        return np.asarray(self.value("hmat", t, hint), dtype=complex)

    def omega_squared_eff(self, t: float, hint: float | None = None) -> float:
        """``Omega^2 = omega^2 - b^2 - db/dt`` entering the auxiliary oscillator.

        Joints of a piecewise ``b`` contribute no delta term here; the
        auxiliary solver handles them through matching conditions.
        """
        omega = self.value("omega", t, hint, 1.0)
        b = self.value("b", t, hint)
        bdot = self.derivative("b", t, hint) if self._b_varies else 0.0
        return omega * omega - b * b - bdot

    def hamiltonian_kwargs(self, t: float, hint: float | None = None) -> dict:
        """Keyword arguments for :func:`gcsdyn.algebra.hamiltonian_matrix`."""
        fam = self.family
        if fam == "matrix":
            return {"hmat": self.hmat(t, hint)}
        if fam == "glauber":
            omega, F = self.glauber_coefficients(t, hint)
            return {"omega": omega, "F": F}
        h0, h = self.su_coefficients(t, hint)
        return {"h0": h0, "h": h}
