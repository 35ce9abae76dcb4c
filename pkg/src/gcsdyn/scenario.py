"""Scenario configuration, validation and execution for the command line.

A scenario is a JSON object::

    {
      "group": "SU11",
      "weights": [0.25, 0.75],
      "z0": [0.3, 0.0],
      "track": {"family": "oscillator",
                "channels": {"omega": {"sinusoidal": {"offset": 1, "amplitude": 0.2,
                                                      "frequency": 1, "phase": 0}},
                             "b": 0}},
      "T": 10, "stride": 0.1,
      "truncation": {"trunc_dim": 512, "segments": 2048, "dt": 0.001},
      "experiment": "stability",
      "output": {"dir": "out", "stem": "run"}
    }

Complex numbers are written as a number, ``[re, im]``, ``{"re": .., "im": ..}``
or a Python-style string such as ``"0.3+0.1j"``.  Channel values are a
constant, ``{"piecewise": {"breaks": [...], "values": [...]}}`` or
``{"sinusoidal": {"offset": .., "amplitude": .., "frequency": .., "phase": ..}}``.

Everything is validated before any computation; a failure raises
:class:`ConfigError` naming the offending field and, where it can be found,
its line in the file.
"""

from __future__ import annotations

import copy
import hashlib
import io
import json
import math
import re
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from .algebra import Group
from .flow import glauber_flow, su2_flow, su11_flow, un1_flow
from .observables import (bose_occupation, quadrature_means, su2_means_closed,
                          su11_means_closed, thermal_average_check, un1_means_closed)
from .oracle import DEFAULT_SEGMENTS, mobius_vs_riccati_experiment, stability_experiment
from .tracks import CoefficientTrack, PiecewiseConstant, Sinusoid

__all__ = ["ConfigError", "ScenarioConfig", "ScenarioResult", "load_config",
           "parse_config", "run_scenario", "format_float", "EXPERIMENTS"]

EXPERIMENTS = ("classical", "stability", "mobius-vs-riccati", "observables", "thermal")
FAMILIES = {
    "oscillator": {"required": ("omega",), "optional": ("b", "g"), "complex": ()},
    "linear": {"required": ("h0",), "optional": ("h",), "complex": ("h",)},
    "glauber": {"required": ("omega",), "optional": ("F",), "complex": ("F",)},
    "matrix": {"required": ("hmat",), "optional": (), "complex": ("hmat",)},
}
GROUP_FAMILIES = {
    "SU2": ("linear",),
    "SU11": ("oscillator", "linear"),
    "HW": ("glauber",),
    "UN1": ("matrix",),
}
DEFAULT_FAMILY = {"SU2": "linear", "SU11": "oscillator", "HW": "glauber", "UN1": "matrix"}
THERMAL_OBSERVABLES = ("number", "identity", "vacuum_projector")


class ConfigError(Exception):
    """Invalid scenario configuration."""

    def __init__(self, path: str, message: str, line: int | None = None):
        self.path = path
        self.message = message
        self.line = line
        where = f" (line {line})" if line else ""
        super().__init__(f"config error at '{path}'{where}: {message}")


def format_float(x: float) -> str:
    """Fixed 17-significant-digit scientific notation."""
    return f"{float(x):.16e}"


# --------------------------------------------------------------------------
# primitive parsers

def _number(v, path) -> float:
    if isinstance(v, bool) or v is None:
        raise ConfigError(path, f"expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        x = float(v)
    elif isinstance(v, str):
        try:
            x = float(Fraction(v.strip()))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(path, f"expected a number, got {v!r}") from None
    else:
        raise ConfigError(path, f"expected a number, got {v!r}")
    if not math.isfinite(x):
        raise ConfigError(path, "must be finite")
    return x


def _complex(v, path) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(path, "complex numbers are written [re, im]")
        return complex(_number(v[0], f"{path}[0]"), _number(v[1], f"{path}[1]"))
    if isinstance(v, dict):
        extra = set(v) - {"re", "im"}
        if extra:
            raise ConfigError(path, f"unexpected keys {sorted(extra)} in complex number")
        return complex(_number(v.get("re", 0.0), f"{path}.re"),
                       _number(v.get("im", 0.0), f"{path}.im"))
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            return complex(_number(v, path))
    return complex(_number(v, path))


def _real(v, path) -> float:
    c = _complex(v, path)
    if c.imag != 0:
        raise ConfigError(path, f"must be real (Hermitian Hamiltonian), got {c}")
    return c.real


def _cjson(c: complex):
    return [float(c.real), float(c.imag)]


def _int(v, path, minimum=None) -> int:
    x = _number(v, path)
    if x != int(x):
        raise ConfigError(path, f"expected an integer, got {v!r}")
    x = int(x)
    if minimum is not None and x < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    return x


def _check_keys(d, path, allowed):
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object")
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}" if path else sorted(extra)[0],
                          f"unknown field; allowed: {sorted(allowed)}")


# --------------------------------------------------------------------------
# channels

def _scalar(v, path, is_complex):
    return _cjson(_complex(v, path)) if is_complex else _real(v, path)


def _matrix(v, path):
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise ConfigError(path, "expected a square matrix (list of rows)")
    n = len(v)
    rows = []
    for i, r in enumerate(v):
        if len(r) != n:
            raise ConfigError(f"{path}[{i}]", f"row length {len(r)} != {n}")
        rows.append([_complex(x, f"{path}[{i}][{j}]") for j, x in enumerate(r)])
    m = np.array(rows)
    if np.max(np.abs(m - m.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(m))):
        raise ConfigError(path, "coefficient matrix must be Hermitian")
    return [[_cjson(x) for x in r] for r in rows]


def _channel(v, path, is_complex, is_matrix=False):
    if isinstance(v, dict) and "piecewise" in v:
        _check_keys(v, path, ("piecewise",))
        spec = v["piecewise"]
        _check_keys(spec, f"{path}.piecewise", ("breaks", "values"))
        for key in ("breaks", "values"):
            if not isinstance(spec.get(key), list) or not spec[key]:
                raise ConfigError(f"{path}.piecewise.{key}", "expected a non-empty list")
        breaks = [_number(x, f"{path}.piecewise.breaks[{i}]") for i, x in enumerate(spec["breaks"])]
        if len(breaks) != len(spec["values"]):
            raise ConfigError(f"{path}.piecewise", "breaks and values differ in length")
        if breaks[0] != 0:
            raise ConfigError(f"{path}.piecewise.breaks[0]", "first break must be 0")
        if any(b <= a for a, b in zip(breaks, breaks[1:])):
            raise ConfigError(f"{path}.piecewise.breaks", "must be strictly increasing")
        conv = _matrix if is_matrix else (lambda x, p: _scalar(x, p, is_complex))
        values = [conv(x, f"{path}.piecewise.values[{i}]") for i, x in enumerate(spec["values"])]
        return {"piecewise": {"breaks": breaks, "values": values}}
    if isinstance(v, dict) and "sinusoidal" in v:
        if is_matrix:
            raise ConfigError(path, "matrix channels support constant or piecewise values only")
        _check_keys(v, path, ("sinusoidal",))
        spec = v["sinusoidal"]
        _check_keys(spec, f"{path}.sinusoidal", ("offset", "amplitude", "frequency", "phase"))
        return {"sinusoidal": {
            "offset": _scalar(spec.get("offset", 0.0), f"{path}.sinusoidal.offset", is_complex),
            "amplitude": _scalar(spec.get("amplitude", 0.0), f"{path}.sinusoidal.amplitude",
                                 is_complex),
            "frequency": _real(spec.get("frequency", 1.0), f"{path}.sinusoidal.frequency"),
            "phase": _real(spec.get("phase", 0.0), f"{path}.sinusoidal.phase"),
        }}
    if is_matrix:
        return _matrix(v, path)
    return _scalar(v, path, is_complex)


def _to_value(x):
    """Normalized JSON scalar/matrix to a Python value."""
    if isinstance(x, list) and x and isinstance(x[0], list):
        return np.array([[complex(*e) for e in row] for row in x])
    if isinstance(x, list):
        return complex(*x)
    return float(x)


def _build_channel(spec):
    if isinstance(spec, dict) and "piecewise" in spec:
        p = spec["piecewise"]
        return PiecewiseConstant(tuple(p["breaks"]), tuple(_to_value(v) for v in p["values"]))
    if isinstance(spec, dict) and "sinusoidal" in spec:
        s = spec["sinusoidal"]
        return Sinusoid(_to_value(s["offset"]), _to_value(s["amplitude"]),
                        s["frequency"], s["phase"])
    return _to_value(spec)


# --------------------------------------------------------------------------
# scenario

@dataclass
class ScenarioConfig:
    """Validated scenario.  ``data`` is the normalized JSON tree (the config echo)."""

    data: dict

    def __eq__(self, other):
        return isinstance(other, ScenarioConfig) and self.data == other.data

    @property
    def experiment(self) -> str:
        return self.data["experiment"]

    @property
    def group(self) -> Group:
        return Group(self.data["group"])

    @property
    def weights(self) -> list:
        return list(self.data["weights"])

    @property
    def z0(self):
        z = self.data["z0"]
        if z and isinstance(z[0], list):
            return np.array([complex(*c) for c in z])
        return complex(*z)

    @property
    def grid(self) -> np.ndarray:
        T, stride = self.data["T"], self.data["stride"]
        return np.linspace(0.0, T, int(round(T / stride)) + 1)

    def track(self) -> CoefficientTrack:
        tr = self.data["track"]
        channels = {name: _build_channel(spec) for name, spec in tr["channels"].items()}
        return CoefficientTrack(channels, self.data["T"], tr["family"])


def _weights(raw, group, path):
    if isinstance(raw, list):
        if not raw:
            raise ConfigError(path, "weight list is empty")
        items = [(x, f"{path}[{i}]") for i, x in enumerate(raw)]
    else:
        items = [(raw, path)]
    out = []
    for x, p in items:
        w = _number(x, p)
        if group == "SU2":
            if w <= 0 or abs(2 * w - round(2 * w)) > 1e-12:
                raise ConfigError(p, f"SU(2) weight j must be a positive half-integer, got {x!r}")
            w = round(2 * w) / 2
        elif group == "SU11":
            if w <= 0:
                raise ConfigError(p, f"SU(1,1) weight k must be > 0, got {x!r}")
        elif group == "UN1":
            w = _int(x, p, minimum=1)
        out.append(w)
    if len(set(out)) != len(out):
        raise ConfigError(path, "weights must be distinct")
    return out


def parse_config(raw: dict, text: str | None = None) -> ScenarioConfig:
    """Validate a decoded JSON tree.  ``text`` is used to attach line numbers to errors."""
    try:
        return ScenarioConfig(_parse(raw))
    except ConfigError as err:
        if err.line is None and text is not None:
            err = ConfigError(err.path, err.message, _locate(text, err.path))
        raise err


def _locate(text: str, path: str) -> int | None:
    """Best-effort line number of the last key in a dotted path."""
    keys = [k for k in re.split(r"[.\[\]]", path) if k and not k.isdigit()]
    pos = 0
    for key in keys:
        m = re.search(r'"%s"\s*:' % re.escape(key), text[pos:])
        if m is None:
            break
        pos += m.start()
    else:
        return text.count("\n", 0, pos) + 1 if keys else None
    return text.count("\n", 0, pos) + 1 if pos else None


TOP_KEYS = ("group", "weight", "weights", "z0", "track", "T", "stride", "truncation",
            "experiment", "thermal", "output", "sweep", "description")


def _parse(raw) -> dict:
    _check_keys(raw, "", TOP_KEYS)
    experiment = raw.get("experiment", "classical")
    if experiment not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {list(EXPERIMENTS)}, got {experiment!r}")
    out = {"experiment": experiment}
    if "description" in raw:
        out["description"] = str(raw["description"])

    out["output"] = _output(raw.get("output", {}))
    if experiment == "thermal":
        out["thermal"] = _thermal(raw.get("thermal"))
        return out

    group = raw.get("group")
    if group not in GROUP_FAMILIES:
        raise ConfigError("group", f"must be one of {sorted(GROUP_FAMILIES)}, got {group!r}")
    out["group"] = group

    if "weight" in raw and "weights" in raw:
        raise ConfigError("weights", "give either 'weight' or 'weights'")
    if group == "HW":
        out["weights"] = [None]
    else:
        key = "weights" if "weights" in raw else "weight"
        if key not in raw:
            raise ConfigError("weights", "missing")
        out["weights"] = _weights(raw[key], group, key)

    out["T"] = _number(raw.get("T"), "T") if "T" in raw else None
    if out["T"] is None or out["T"] <= 0:
        raise ConfigError("T", "time horizon T must be given and > 0")
    stride = _number(raw.get("stride", out["T"] / 100), "stride")
    n = round(out["T"] / stride) if stride > 0 else 0
    if stride <= 0 or n < 1 or abs(n * stride - out["T"]) > 1e-9 * out["T"]:
        raise ConfigError("stride", "output stride must be > 0 and divide T")
    out["stride"] = stride

    out["track"] = _track(raw.get("track"), group, out["T"])
    out["truncation"] = _truncation(raw.get("truncation", {}), stride)

    if "z0" not in raw:
        raise ConfigError("z0", "missing")
    if group == "UN1":
        hmat = out["track"]["channels"]["hmat"]
        if isinstance(hmat, dict):
            hmat = hmat["piecewise"]["values"][0]
        N = len(hmat) - 1
        z = raw["z0"]
        if not isinstance(z, list) or len(z) != N:
            raise ConfigError("z0", f"expected a list of {N} complex numbers")
        out["z0"] = [_cjson(_complex(c, f"z0[{i}]")) for i, c in enumerate(z)]
    else:
        z = _complex(raw["z0"], "z0")
        if group == "SU11" and abs(z) >= 1:
            raise ConfigError("z0", f"SU(1,1) initial point must lie in the unit disc, |z0| = {abs(z)}")
        out["z0"] = _cjson(z)

    if experiment == "mobius-vs-riccati" and (group != "SU11" or out["track"]["family"] != "oscillator"):
        raise ConfigError("experiment", "mobius-vs-riccati needs group SU11 with an oscillator track")
    if experiment == "observables" and group == "HW":
        raise ConfigError("experiment", "observables are provided for SU2, SU11 and UN1")
    return out


def _output(raw):
    _check_keys(raw, "output", ("dir", "stem"))
    out = {"dir": str(raw.get("dir", ".")), "stem": str(raw.get("stem", "scenario"))}
    if not out["stem"] or "/" in out["stem"]:
        raise ConfigError("output.stem", "must be a plain file name stem")
    return out


def _thermal(raw):
    if raw is None:
        raise ConfigError("thermal", "thermal experiment needs a 'thermal' section")
    _check_keys(raw, "thermal", ("beta_omega", "observable", "trunc_dim"))
    bw = raw.get("beta_omega")
    values = bw if isinstance(bw, list) else [bw]
    if bw is None or not values:
        raise ConfigError("thermal.beta_omega", "missing")
    parsed = []
    for i, x in enumerate(values):
        p = f"thermal.beta_omega[{i}]" if isinstance(bw, list) else "thermal.beta_omega"
        v = _number(x, p)
        if v <= 0:
            raise ConfigError(p, "beta * omega must be > 0")
        parsed.append(v)
    obs = raw.get("observable", "number")
    if obs not in THERMAL_OBSERVABLES:
        raise ConfigError("thermal.observable", f"must be one of {list(THERMAL_OBSERVABLES)}")
    trunc = raw.get("trunc_dim")
    trunc = None if trunc is None else _int(trunc, "thermal.trunc_dim", minimum=2)
    return {"beta_omega": parsed, "observable": obs, "trunc_dim": trunc}


def _track(raw, group, T):
    if raw is None:
        raise ConfigError("track", "missing")
    _check_keys(raw, "track", ("family", "channels"))
    family = raw.get("family", DEFAULT_FAMILY[group])
    if family not in GROUP_FAMILIES[group]:
        raise ConfigError("track.family",
                          f"group {group} accepts families {list(GROUP_FAMILIES[group])}, got {family!r}")
    spec = FAMILIES[family]
    chans = raw.get("channels")
    if not isinstance(chans, dict):
        raise ConfigError("track.channels", "expected an object")
    _check_keys(chans, "track.channels", spec["required"] + spec["optional"])
    out = {}
    for name in spec["required"] + spec["optional"]:
        path = f"track.channels.{name}"
        if name not in chans:
            if name in spec["required"]:
                raise ConfigError(path, "missing")
            continue
        out[name] = _channel(chans[name], path, name in spec["complex"], name == "hmat")
        if isinstance(out[name], dict) and "piecewise" in out[name]:
            if out[name]["piecewise"]["breaks"][-1] >= T:
                raise ConfigError(f"{path}.piecewise.breaks", "every break must lie before T")
    if "g" in out:
        if isinstance(out["g"], dict):
            raise ConfigError("track.channels.g", "singular coupling must be constant")
        if out["g"] <= -0.125:
            raise ConfigError("track.channels.g", "singular coupling needs g > -1/8")
    if family == "matrix" and isinstance(out["hmat"], dict):
        sizes = {len(v) for v in out["hmat"]["piecewise"]["values"]}
        if len(sizes) != 1:
            raise ConfigError("track.channels.hmat", "all matrices must have the same size")
    return {"family": family, "channels": out}


def _truncation(raw, stride):
    _check_keys(raw, "truncation", ("trunc_dim", "segments", "dt"))
    trunc = raw.get("trunc_dim")
    out = {
        "trunc_dim": None if trunc is None else _int(trunc, "truncation.trunc_dim", minimum=4),
        "segments": _int(raw.get("segments", DEFAULT_SEGMENTS), "truncation.segments", minimum=1),
        "dt": _number(raw.get("dt", 1e-3), "truncation.dt"),
    }
    if not 0 < out["dt"] <= stride:
        raise ConfigError("truncation.dt", "integration step must be > 0 and <= stride")
    return out


def load_config(path) -> ScenarioConfig:
    """Read and validate a scenario file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError("<file>", f"invalid JSON: {err.msg}", err.lineno) from None
    return parse_config(raw, text)


# --------------------------------------------------------------------------
# execution

@dataclass
class ScenarioResult:
    csv_text: str
    summary: dict


def _csv(header, columns) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(format_float(x) for x in row) + "\n")
    return buf.getvalue()


def _z_columns(z):
    z = np.asarray(z)
    if z.ndim == 2:
        header, cols = [], []
        for i in range(z.shape[1]):
            tag = "" if i == 0 else str(i + 1)
            header += [f"re_z{tag}", f"im_z{tag}"]
            cols += [z[:, i].real, z[:, i].imag]
        return header, cols
    return ["re_z", "im_z"], [z.real, z.imag]


def _trajectory_hash(t, z) -> str:
    header, cols = _z_columns(z)
    return hashlib.sha256(_csv(["t"] + header, [t] + cols).encode()).hexdigest()


def _wname(w) -> str:
    return f"{w:g}"


def _classical(cfg: ScenarioConfig, track):
    g, grid, dt = cfg.group, cfg.grid, cfg.data["truncation"]["dt"]
    if g is Group.SU2:
        return su2_flow(cfg.z0, track, grid, dt=dt)
    if g is Group.SU11:
        return su11_flow(cfg.z0, track, grid, dt=dt)
    if g is Group.HW:
        return glauber_flow(cfg.z0, track, grid, dt=dt)
    return un1_flow(cfg.z0, track, grid, dt=dt)


def _magnitude(z):
    z = np.asarray(z)
    return np.linalg.norm(z, axis=1) if z.ndim == 2 else np.abs(z)


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """Run one validated scenario; computational failures propagate as exceptions."""
    start = time.perf_counter()
    summary = {"version": __version__, "experiment": cfg.experiment,
               "min_fidelity": None, "max_norm_drift": None, "wronskian_drift": None}
    if cfg.experiment == "thermal":
        text, details = _run_thermal(cfg)
        summary.update(details)
    else:
        summary["group"] = cfg.data["group"]
        track = cfg.track()
        runner = {"classical": _run_classical, "stability": _run_stability,
                  "mobius-vs-riccati": _run_mobius, "observables": _run_observables}
        text, details = runner[cfg.experiment](cfg, track)
        summary.update(details)
    summary["wall_time"] = time.perf_counter() - start
    summary["config"] = copy.deepcopy(cfg.data)
    return ScenarioResult(text, summary)


def _run_classical(cfg, track):
    traj = _classical(cfg, track)
    zh, zc = _z_columns(traj.z)
    text = _csv(["t", *zh, "abs_z"], [traj.t, *zc, _magnitude(traj.z)])
    return text, {"trajectory_sha256": _trajectory_hash(traj.t, traj.z),
                  "error_estimate": traj.error_estimate,
                  "max_local_error": traj.max_local_error}


def _run_stability(cfg, track):
    tr = cfg.data["truncation"]
    rep = stability_experiment(cfg.group, cfg.weights, track, cfg.z0, cfg.grid,
                               trunc_dim=tr["trunc_dim"], segments=tr["segments"], dt=tr["dt"])
    zh, zc = _z_columns(rep.z)
    header, cols = ["t", *zh, "abs_z"], [rep.t, *zc, _magnitude(rep.z)]
    if len(rep.weights) == 1:
        header.append("fidelity")
        cols.append(rep.fidelity[rep.weights[0]])
    else:
        for w in rep.weights:
            header.append(f"fidelity_{_wname(w)}")
            cols.append(rep.fidelity[w])
    mins = rep.min_fidelity
    details = {
        "trajectory_sha256": _trajectory_hash(rep.t, rep.z),
        "min_fidelity": min(mins.values()),
        "max_norm_drift": max(rep.norm_drift.values()),
        "per_weight": [{"weight": w, "min_fidelity": mins[w], "norm_drift": rep.norm_drift[w],
                        "trunc_dim": rep.trunc_dim[w],
                        "k0_relative_error": rep.k0_error.get(w)} for w in rep.weights],
    }
    return _csv(header, cols), details


def _run_mobius(cfg, track):
    rep = mobius_vs_riccati_experiment(track, cfg.z0, cfg.grid, dt=cfg.data["truncation"]["dt"])
    eps = rep.eps
    text = _csv(["t", "re_z", "im_z", "re_z_mobius", "im_z_mobius", "disc_distance",
                 "rho", "gamma", "wronskian"],
                [rep.t, rep.z_riccati.real, rep.z_riccati.imag, rep.z_mobius.real,
                 rep.z_mobius.imag, rep.distance, eps.rho, eps.gamma, eps.wronskian])
    return text, {"trajectory_sha256": _trajectory_hash(rep.t, rep.z_riccati),
                  "wronskian_drift": rep.wronskian_drift,
                  "sup_disc_distance": rep.sup_distance}


def _run_observables(cfg, track):
    traj = _classical(cfg, track)
    zh, zc = _z_columns(traj.z)
    header, cols = ["t", *zh], [traj.t, *zc]
    g = cfg.group
    for w in cfg.weights:
        tag = _wname(w)
        if g is Group.SU2:
            means = [su2_means_closed(w, z) for z in traj.z]
            header += [f"J0_{tag}", f"re_Jm_{tag}", f"im_Jm_{tag}"]
            cols += [np.array([m["J0"].real for m in means]),
                     np.array([m["Jm"].real for m in means]),
                     np.array([m["Jm"].imag for m in means])]
        elif g is Group.SU11:
            means = [su11_means_closed(w, z) for z in traj.z]
            quad = [quadrature_means(w, z) for z in traj.z]
            header += [f"K0_{tag}", f"re_Km_{tag}", f"im_Km_{tag}", f"q2_{tag}", f"p2_{tag}"]
            cols += [np.array([m["K0"].real for m in means]),
                     np.array([m["Km"].real for m in means]),
                     np.array([m["Km"].imag for m in means]),
                     np.array([q["q2"] for q in quad]),
                     np.array([q["p2"] for q in quad])]
        else:
            M = np.array([un1_means_closed(w, z) for z in traj.z])
            for i in range(M.shape[1]):
                header.append(f"n{i}_{tag}")
                cols.append(M[:, i, i].real)
    return _csv(header, cols), {"trajectory_sha256": _trajectory_hash(traj.t, traj.z)}


def _run_thermal(cfg):
    th = cfg.data["thermal"]
    obs = th["observable"]
    rows = {"beta_omega": [], "z": [], "quantum": [], "canonical": [], "closed_form": [],
            "abs_discrepancy": []}
    for bw in th["beta_omega"]:
        rep = thermal_average_check(bw, obs, th["trunc_dim"])
        closed = {"number": bose_occupation(bw), "identity": 1.0,
                  "vacuum_projector": -math.expm1(-bw)}[obs]
        rows["beta_omega"].append(bw)
        rows["z"].append(math.exp(-bw / 2))
        rows["quantum"].append(rep.closed_form_value.real)
        rows["canonical"].append(rep.matrix_value.real)
        rows["closed_form"].append(closed)
        rows["abs_discrepancy"].append(max(rep.abs_discrepancy,
                                           abs(rep.closed_form_value.real - closed)))
    worst = max(rows["abs_discrepancy"])
    return _csv(list(rows), list(rows.values())), {
        "max_abs_discrepancy": worst, "passed": worst <= 1e-10}
