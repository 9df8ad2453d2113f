"""JSON configuration: scenario (de)serialization and run options."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .dynamics import NORM_FLOOR
from .entanglement import SignatureThresholds
from .experiments import DEFAULT_DT, OBJECTIVES, Scenario, system
from .hamiltonian import CouplingGraph, QubitParams
from .presets import get_preset


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


_QUBIT_KEYS = {"delta", "gamma", "omega"}
_COUPLING_KEYS = {"topology", "strength", "matrix"}
_SCENARIO_KEYS = {"name", "description", "qubits", "coupling", "initial_state", "axis",
                  "time", "sweep", "hermitian_baseline"}
_SHORTHAND_KEYS = {"n", "gamma", "omega", "delta", "J", "topology"}
_RUN_KEYS = {"scenario", "dt", "t_stop", "window", "objective", "search", "omega_step",
             "omega_span", "norm_floor", "thresholds", "output", "format"}
CONFIG_KEYS = _SCENARIO_KEYS | _SHORTHAND_KEYS | _RUN_KEYS
TOPOLOGIES = ("all_to_all", "nearest_neighbour", "custom")


def _reject_unknown(data: Mapping, allowed, where: str):
    if not isinstance(data, Mapping):
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(map(repr, unknown))}")


def coupling_to_dict(graph: CouplingGraph) -> dict:
    n = graph.n
    strength = float(graph.J[0, 1]) if n > 1 else 0.0
    if graph == CouplingGraph.all_to_all(n, strength):
        return {"topology": "all_to_all", "strength": strength}
    if graph == CouplingGraph.nearest_neighbour(n, strength):
        return {"topology": "nearest_neighbour", "strength": strength}
    return {"topology": "custom", "matrix": graph.J.tolist()}


def coupling_from_dict(data: Mapping, n: int, where: str = "coupling") -> CouplingGraph:
    _reject_unknown(data, _COUPLING_KEYS, where)
    topology = data.get("topology", "custom" if "matrix" in data else None)
    if topology not in TOPOLOGIES:
        raise ConfigError(f"{where}.topology: expected one of {', '.join(TOPOLOGIES)}, got {topology!r}")
    try:
        if topology == "custom":
            if "matrix" not in data:
                raise ConfigError(f"{where}.matrix: required for custom topology")
            J = np.array(data["matrix"], dtype=float)
            graph = CouplingGraph(J)
        else:
            if "strength" not in data:
                raise ConfigError(f"{where}.strength: required for topology {topology}")
            strength = float(data["strength"])
            graph = getattr(CouplingGraph, topology)(n, strength)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    if graph.n != n:
        raise ConfigError(f"{where}.matrix: {graph.n}x{graph.n} matrix for {n} qubits")
    return graph


def scenario_to_dict(s: Scenario) -> dict:
    out = {
        "name": s.name,
        "description": s.description,
        "qubits": [dataclasses.asdict(q) for q in s.qubits],
        "coupling": coupling_to_dict(s.coupling),
        "initial_state": s.initial_state,
        "axis": s.axis,
        "time": {"stop": s.t_stop, "dt": s.dt},
        "hermitian_baseline": s.hermitian_baseline,
    }
    if s.axis != "time":
        out["sweep"] = {"analysis_time": s.analysis_time, "values": list(s.values),
                        "values2": list(s.values2)}
    return out


def scenario_from_dict(data: Mapping, where: str = "config") -> Scenario:
    _reject_unknown(data, _SCENARIO_KEYS, where)
    for key in ("qubits", "coupling"):
        if key not in data:
            raise ConfigError(f"{where}.{key}: required")
    raw_qubits = data["qubits"]
    if not isinstance(raw_qubits, list) or not raw_qubits:
        raise ConfigError(f"{where}.qubits: expected a non-empty list")
    qubits = []
    for i, q in enumerate(raw_qubits):
        _reject_unknown(q, _QUBIT_KEYS, f"{where}.qubits[{i}]")
        try:
            qubits.append(QubitParams(**{k: float(v) for k, v in q.items()}))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.qubits[{i}]: {exc}") from exc
    coupling = coupling_from_dict(data["coupling"], len(qubits), f"{where}.coupling")
    time = data.get("time", {})
    _reject_unknown(time, {"stop", "dt"}, f"{where}.time")
    sweep = data.get("sweep", {})
    _reject_unknown(sweep, {"analysis_time", "values", "values2"}, f"{where}.sweep")
    try:
        return Scenario(
            name=str(data.get("name", "custom")),
            qubits=qubits,
            coupling=coupling,
            initial_state=str(data.get("initial_state", "coherent")),
            axis=str(data.get("axis", "time")),
            t_stop=time.get("stop"),
            dt=float(time.get("dt") or DEFAULT_DT),
            analysis_time=sweep.get("analysis_time"),
            values=tuple(sweep.get("values", ())),
            values2=tuple(sweep.get("values2", ())),
            hermitian_baseline=bool(data.get("hermitian_baseline", False)),
            description=str(data.get("description", "")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_json(path) -> dict:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


@dataclass
class RunConfig:
    """Resolved options for one CLI invocation."""

    subcommand: str
    scenario: Scenario | None
    output: str | None = None
    format: str = "csv"
    window: tuple | None = None
    objective: str = "max_tau"
    search: str = "time"
    omega_step: float = 1e-3
    omega_span: float = 0.3
    norm_floor: float = NORM_FLOOR
    thresholds: SignatureThresholds = field(default_factory=SignatureThresholds)
    shorthand: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "format": self.format,
            "window": list(self.window) if self.window else None,
            "objective": self.objective,
            "search": self.search,
            "omega_step": self.omega_step,
            "omega_span": self.omega_span,
            "norm_floor": self.norm_floor,
            "thresholds": dataclasses.asdict(self.thresholds),
        }


def _apply_shorthand(s: Scenario, opts: Mapping) -> Scenario:
    qubits = list(s.qubits)
    for key in ("gamma", "omega", "delta"):
        if opts.get(key) is not None:
            try:
                qubits = [dataclasses.replace(q, **{key: float(opts[key])}) for q in qubits]
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from exc
    coupling = s.coupling
    if opts.get("J") is not None or opts.get("topology") is not None:
        current = coupling_to_dict(coupling)
        topology = opts.get("topology") or current["topology"]
        desc = {"topology": topology}
        if topology == "custom":
            desc["matrix"] = current.get("matrix", coupling.J.tolist())
        else:
            desc["strength"] = opts["J"] if opts.get("J") is not None else current.get("strength", 0.0)
        coupling = coupling_from_dict(desc, len(qubits), "coupling")
    changes = {"qubits": qubits, "coupling": coupling}
    if opts.get("dt") is not None:
        changes["dt"] = float(opts["dt"])
    if opts.get("t_stop") is not None:
        changes["t_stop"] = float(opts["t_stop"])
    try:
        return dataclasses.replace(s, **changes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def resolve(subcommand: str, file_data: Mapping | None, flags: Mapping[str, Any]) -> RunConfig:
    """Merge a config-file object with command-line flags (flags win)."""
    data = dict(file_data or {})
    _reject_unknown(data, CONFIG_KEYS, "config")
    data.update({k: v for k, v in flags.items() if v is not None})

    scenario = None
    if data.get("scenario") is not None:
        try:
            scenario = get_preset(data["scenario"])
        except KeyError as exc:
            raise ConfigError(f"scenario: {exc.args[0]}") from None
    elif "qubits" in data or "coupling" in data:
        scenario = scenario_from_dict({k: data[k] for k in _SCENARIO_KEYS if k in data})
    elif data.get("gamma") is not None:
        n = int(data.get("n") or 3)
        try:
            scenario = system(n, float(data["gamma"]), float(data.get("omega") or 0.0),
                              float(data.get("J") or 0.0), data.get("topology") or "all_to_all",
                              delta=float(data.get("delta") or 0.0))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if scenario is not None:
        scenario = _apply_shorthand(scenario, data)

    fmt = data.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format: expected 'csv' or 'json', got {fmt!r}")
    objective = data.get("objective", "max_tau")
    if objective not in OBJECTIVES:
        raise ConfigError(f"objective: expected one of {', '.join(OBJECTIVES)}, got {objective!r}")
    search = data.get("search", "time")
    if search not in ("time", "omega"):
        raise ConfigError(f"search: expected 'time' or 'omega', got {search!r}")
    window = data.get("window")
    if window is not None:
        if len(window) != 2:
            raise ConfigError("window: expected [start, stop]")
        window = (float(window[0]), float(window[1]))
        if not 0 <= window[0] < window[1]:
            raise ConfigError(f"window: empty or invalid interval [{window[0]}, {window[1]}]")
    thresholds = data.get("thresholds") or {}
    allowed = {f.name for f in dataclasses.fields(SignatureThresholds)}
    _reject_unknown(thresholds, allowed, "thresholds")
    cfg = RunConfig(
        subcommand=subcommand,
        scenario=scenario,
        output=data.get("output"),
        format=fmt,
        window=window,
        objective=objective,
        search=search,
        omega_step=float(data.get("omega_step", 1e-3)),
        omega_span=float(data.get("omega_span", 0.3)),
        norm_floor=float(data.get("norm_floor", NORM_FLOOR)),
        thresholds=SignatureThresholds(**{k: float(v) for k, v in thresholds.items()}),
        shorthand={k: data.get(k) for k in _SHORTHAND_KEYS if data.get(k) is not None},
    )
    if cfg.omega_step <= 0 or cfg.omega_span < cfg.omega_step:
        raise ConfigError("omega_step/omega_span: empty drive grid")
    return cfg
