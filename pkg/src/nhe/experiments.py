"""Scenario sweeps and optimum searches built on the dynamics and measures."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .dynamics import (
    NORM_FLOOR,
    PostSelectionError,
    StateVector,
    basis_state,
    coherent_state,
    normalize,
    propagate,
    trajectory,
)
from .entanglement import (
    EntanglementReport,
    SignatureThresholds,
    StateClass,
    batch_measures,
    classify,
    pairs,
    report,
    reports,
)
from .hamiltonian import (
    CouplingGraph,
    Phase,
    QubitParams,
    build_hamiltonian,
    classify_phase,
    evolution_period,
)

AXES = ("time", "omega", "delta", "J12", "J12xJ23")
DEFAULT_DT = 0.01
DEFAULT_T_MAX = 20.0
OPTIMUM_DT = 0.005


class OptimumNotFound(RuntimeError):
    pass


@dataclass(frozen=True)
class Scenario:
    """One simulated configuration plus the axis it is swept along.

    For ``axis == "time"`` the state is tracked over ``[0, t_stop]`` with step
    ``dt`` (``t_stop=None`` picks the default window).  Any other axis is
    evaluated at ``analysis_time`` for every entry of ``values`` (and
    ``values2`` for the 2-D coupling grid, row-major over ``values``).
    """

    name: str
    qubits: tuple
    coupling: CouplingGraph
    initial_state: str = "coherent"
    axis: str = "time"
    t_stop: float | None = None
    dt: float = DEFAULT_DT
    analysis_time: float | None = None
    values: tuple = ()
    values2: tuple = ()
    hermitian_baseline: bool = False
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "values2", tuple(float(v) for v in self.values2))
        if len(self.qubits) != self.coupling.n:
            raise ValueError(f"{len(self.qubits)} qubits but a {self.coupling.n}-qubit coupling graph")
        if self.axis not in AXES:
            raise ValueError(f"unknown axis {self.axis!r}; expected one of {', '.join(AXES)}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_stop is not None and not self.t_stop > 0:
            raise ValueError(f"t_stop must be positive, got {self.t_stop}")
        if self.axis != "time":
            if self.analysis_time is None or self.analysis_time < 0:
                raise ValueError(f"axis {self.axis!r} needs a non-negative analysis_time")
            if not self.values:
                raise ValueError(f"axis {self.axis!r} needs sweep values")
            for vals in (self.values, self.values2):
                if len(vals) > 1 and np.any(np.diff(vals) <= 0):
                    raise ValueError("sweep values must be strictly increasing")
            if self.axis == "J12xJ23" and not self.values2:
                raise ValueError("J12xJ23 sweeps need values2 for J23")
            if self.axis.startswith("J12") and self.n < 2 + (self.axis == "J12xJ23"):
                raise ValueError(f"axis {self.axis} needs more qubits")
        initial_state(self)

    @property
    def n(self) -> int:
        return len(self.qubits)

    def hamiltonian(self) -> np.ndarray:
        return build_hamiltonian(self.qubits, self.coupling)

    def hermitian(self) -> "Scenario":
        """Same system with every loss rate set to zero."""
        qubits = [dataclasses.replace(q, gamma=0.0) for q in self.qubits]
        return dataclasses.replace(self, name=f"{self.name}_hermitian", qubits=qubits, hermitian_baseline=False)

    def time_grid(self) -> np.ndarray:
        stop = self.t_stop
        if stop is None:
            period = common_period(self.qubits)
            stop = 2 * period if period is not None else DEFAULT_T_MAX
        count = int(round(stop / self.dt))
        return np.arange(count + 1) * self.dt

    def at(self, value, value2=None) -> "Scenario":
        """Time-axis scenario with the swept parameter set to ``value``."""
        qubits, J = list(self.qubits), np.array(self.coupling.J)
        if self.axis == "omega":
            qubits = [dataclasses.replace(q, omega=value) for q in qubits]
        elif self.axis == "delta":
            qubits = [dataclasses.replace(q, delta=value) for q in qubits]
        elif self.axis in ("J12", "J12xJ23"):
            J[0, 1] = J[1, 0] = value
            if self.axis == "J12xJ23":
                J[1, 2] = J[2, 1] = value2
        return dataclasses.replace(self, qubits=qubits, coupling=CouplingGraph(J), axis="time",
                                   values=(), values2=())


def initial_state(s: Scenario) -> StateVector:
    """``"coherent"`` (product of (|f> - i|e>)/sqrt 2) or a basis label like ``"fff"``."""
    if s.initial_state == "coherent":
        return coherent_state(s.n)
    if len(s.initial_state) != s.n:
        raise ValueError(f"initial state {s.initial_state!r} does not match {s.n} qubits")
    return basis_state(s.initial_state)


def common_period(qubits: Sequence[QubitParams]) -> float | None:
    """Evolution period shared by identical resonant qubits in the symmetric phase."""
    first = qubits[0]
    if any(q != first for q in qubits) or first.delta != 0:
        return None
    if classify_phase(first).phase is not Phase.PT_SYMMETRIC:
        return None
    return evolution_period(first)


def default_window(qubits: Sequence[QubitParams]) -> tuple[float, float]:
    """One evolution period when it is defined, else ``[0, 20]`` us."""
    period = common_period(qubits)
    return (0.0, period if period is not None else DEFAULT_T_MAX)


@dataclass
class SweepResult:
    scenario: Scenario
    axis: str
    values: np.ndarray
    reports: list
    raw_norms: np.ndarray
    failures: list = field(default_factory=list)
    baseline: list | None = None
    annotations: list | None = None
    trajectory: object = None
    metadata: dict = field(default_factory=dict)

    def column(self, getter: Callable[[EntanglementReport], float]) -> np.ndarray:
        return np.array([getter(r) if r is not None else np.nan for r in self.reports])


def _time_run(s: Scenario, times, thresholds, floor):
    traj = trajectory(s.hamiltonian(), initial_state(s), times, floor=floor)
    ok = traj.valid
    reps = [None] * len(times)
    if np.any(ok) and s.n >= 2:
        for i, r in zip(np.flatnonzero(ok), reports(times[ok], traj.amplitudes[ok], s.n, thresholds)):
            reps[i] = r
    failures = []
    if traj.terminated_at is not None:
        failures.append((traj.terminated_at, "post-selection probability vanished"))
    return traj, reps, failures


def _point(s: Scenario, t, thresholds, floor):
    raw = propagate(s.hamiltonian(), initial_state(s), t)
    psi = normalize(raw, floor)
    return report(psi, t, thresholds), raw.norm


def run_scenario(s: Scenario, thresholds: SignatureThresholds = SignatureThresholds(),
                 floor: float = NORM_FLOOR) -> SweepResult:
    """Evaluate the scenario along its axis.

    Post-selection failures at individual points are recorded in
    ``failures`` and leave a ``None`` report; they do not abort the sweep.
    """
    meta = {"scenario": s.name, "axis": s.axis, "version": __version__}
    if s.axis == "time":
        times = s.time_grid()
        traj, reps, failures = _time_run(s, times, thresholds, floor)
        baseline = None
        if s.hermitian_baseline:
            baseline = _time_run(s.hermitian(), times, thresholds, floor)[1]
        meta["time_grid"] = {"start": 0.0, "stop": float(traj.times[-1]), "dt": s.dt, "points": len(traj)}
        return SweepResult(s, "t_us", traj.times, reps, traj.raw_norms, failures, baseline,
                           trajectory=traj, metadata=meta)

    if s.axis == "J12xJ23":
        grid = [(a, b) for a in s.values for b in s.values2]
    else:
        grid = [(a, None) for a in s.values]
    reps, norms, failures, baseline, notes = [], [], [], [] if s.hermitian_baseline else None, []
    for index, (a, b) in enumerate(grid):
        point = s.at(a, b)
        try:
            r, norm = _point(point, s.analysis_time, thresholds, floor)
        except PostSelectionError as exc:
            r, norm = None, np.nan
            failures.append((index, str(exc)))
        reps.append(r)
        norms.append(norm)
        if baseline is not None:
            baseline.append(_point(point.hermitian(), s.analysis_time, thresholds, floor)[0])
        if s.axis == "omega" and point.qubits[0].delta == 0:
            notes.append(classify_phase(point.qubits[0]).phase.value)
    values = np.array(grid, dtype=float) if s.axis == "J12xJ23" else np.array(s.values)
    meta["analysis_time"] = s.analysis_time
    if s.axis == "omega":
        meta["phase_boundary_omega"] = [q.gamma / 4 for q in s.qubits]
    return SweepResult(s, s.axis, values, reps, np.array(norms), failures, baseline,
                       notes or None, metadata=meta)


# -- objectives ---------------------------------------------------------------

def _scores(objective: str, m: dict) -> tuple[np.ndarray, np.ndarray]:
    """Score to maximize and the reported objective value, per row."""
    if objective == "max_tau":
        if np.all(np.isnan(m["tau"])):
            raise ValueError("max_tau needs a three-qubit system")
        return m["tau"], m["tau"]
    if objective == "min_max_pairwise_concurrence":
        worst = m["concurrences"].max(axis=1)
        return -worst, worst
    if objective == "max_min_entropy":
        best = m["entropies"].min(axis=1)
        return best, best
    if objective == "max_concurrence":
        return m["concurrences"][:, 0], m["concurrences"][:, 0]
    raise ValueError(f"unknown objective {objective!r}; expected one of {', '.join(OBJECTIVES)}")


OBJECTIVES = ("max_tau", "min_max_pairwise_concurrence", "max_min_entropy", "max_concurrence")

_INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section_max(f, a: float, b: float, tol: float = 1e-7) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _grid_scores(H, psi0, times, objective, n, floor):
    traj = trajectory(H, psi0, times, floor=floor)
    score = np.full(times.size, -np.inf)
    value = np.full(times.size, np.nan)
    ok = traj.valid
    if np.any(ok):
        sc, val = _scores(objective, batch_measures(traj.amplitudes[ok], n))
        score[ok], value[ok] = sc, val
    return score, value


def find_optimal_time(s: Scenario, window: tuple[float, float] | None = None,
                      objective: str = "max_tau", dt: float = OPTIMUM_DT,
                      floor: float = NORM_FLOOR) -> tuple[float, float]:
    """Grid search at resolution ``dt`` then golden-section refinement.

    Returns ``(t*, objective value at t*)``.
    """
    if window is None:
        window = default_window(s.qubits)
    lo, hi = float(window[0]), float(window[1])
    if not (0 <= lo < hi):
        raise ValueError(f"empty or invalid time window [{lo}, {hi}]")
    _scores(objective, batch_measures(initial_state(s).amplitudes, s.n))
    count = max(1, int(math.ceil((hi - lo) / dt - 1e-9)))
    times = np.linspace(lo, hi, count + 1)
    H, psi0 = s.hamiltonian(), initial_state(s)
    score, value = _grid_scores(H, psi0, times, objective, s.n, floor)
    if not np.any(np.isfinite(score)):
        raise OptimumNotFound(f"no valid post-selected state in window [{lo}, {hi}]")
    k = int(np.argmax(score))

    def f(t):
        try:
            psi = normalize(propagate(H, psi0, t), floor)
        except PostSelectionError:
            return -np.inf
        return float(_scores(objective, batch_measures(psi.amplitudes, s.n))[0][0])

    a, b = times[max(k - 1, 0)], times[min(k + 1, times.size - 1)]
    t_ref, s_ref = golden_section_max(f, a, b)
    if s_ref >= score[k]:
        t_best = t_ref
    else:
        t_best = float(times[k])
    psi = normalize(propagate(H, psi0, t_best), floor)
    val = float(_scores(objective, batch_measures(psi.amplitudes, s.n))[1][0])
    return float(t_best), val


def signature_onset(s: Scenario, signature: StateClass = StateClass.GHZ_LIKE,
                    window: tuple[float, float] | None = None, dt: float = OPTIMUM_DT,
                    thresholds: SignatureThresholds = SignatureThresholds(),
                    floor: float = NORM_FLOOR) -> float:
    """First time on a ``dt`` grid at which the state carries ``signature``."""
    lo, hi = window if window is not None else (0.0, DEFAULT_T_MAX)
    if not (0 <= lo < hi):
        raise ValueError(f"empty or invalid time window [{lo}, {hi}]")
    times = np.linspace(lo, hi, int(math.ceil((hi - lo) / dt - 1e-9)) + 1)
    traj = trajectory(s.hamiltonian(), initial_state(s), times, floor=floor)
    m = batch_measures(traj.amplitudes[traj.valid], s.n)
    for i, t in enumerate(times[traj.valid]):
        tau = None if s.n != 3 else m["tau"][i]
        if classify(tau, m["concurrences"][i], m["entropies"][i], thresholds) is signature:
            return float(t)
    raise OptimumNotFound(f"{signature.value} signature not reached in [{lo}, {hi}] us; try a longer window")


# -- parameter searches ----------------------------------------------------

def system(n: int, gamma: float, omega: float, J: float, topology: str = "all_to_all",
           delta: float = 0.0, name: str = "custom", **kwargs) -> Scenario:
    """Identical qubits on a regular coupling graph."""
    if topology == "all_to_all":
        graph = CouplingGraph.all_to_all(n, J)
    elif topology == "nearest_neighbour":
        graph = CouplingGraph.nearest_neighbour(n, J)
    else:
        raise ValueError(f"unknown topology {topology!r}")
    return Scenario(name, [QubitParams(delta, gamma, omega)] * n, graph, **kwargs)


@dataclass(frozen=True)
class OptimalDrive:
    omega: float
    t: float
    value: float
    omegas: np.ndarray = field(repr=False)
    best_values: np.ndarray = field(repr=False)


def find_optimal_drive(gamma: float, topology: str = "all_to_all", J: float = 1e-3,
                       t_window: tuple[float, float] | None = None, n: int = 3,
                       omega_step: float = 1e-3, omega_span: float = 0.3,
                       dt: float = DEFAULT_DT, t_cap: float = 40.0,
                       objective: str | None = None, floor: float = NORM_FLOOR) -> OptimalDrive:
    """Drive amplitude that maximizes the best reachable tangle (concurrence for n = 2).

    Scans ``omega`` on ``(gamma/4, gamma/4 + omega_span]`` with step
    ``omega_step``; for each value the objective is maximized over
    ``t_window`` on a ``dt`` grid, by default over one evolution period
    (capped at ``t_cap``).
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if J < 0:
        raise ValueError("J must be non-negative")
    if not (omega_step > 0 and omega_span >= omega_step):
        raise ValueError("omega grid is empty")
    if t_window is not None and not (0 <= t_window[0] < t_window[1]):
        raise ValueError(f"empty or invalid time window {t_window}")
    objective = objective or ("max_tau" if n == 3 else "max_concurrence")
    count = int(round(omega_span / omega_step))
    omegas = gamma / 4 + omega_step * np.arange(1, count + 1)
    best = np.full(omegas.size, -np.inf)
    best_t = np.zeros(omegas.size)
    for i, omega in enumerate(omegas):
        s = system(n, gamma, omega, J, topology)
        lo, hi = t_window if t_window is not None else (0.0, min(default_window(s.qubits)[1], t_cap))
        times = np.linspace(lo, hi, max(1, int(math.ceil((hi - lo) / dt))) + 1)
        score, _ = _grid_scores(s.hamiltonian(), initial_state(s), times, objective, n, floor)
        k = int(np.argmax(score))
        best[i], best_t[i] = score[k], times[k]
    i = int(np.argmax(best))
    return OptimalDrive(float(omegas[i]), float(best_t[i]), float(best[i]), omegas, best)


def phase_sweep(omegas: Sequence[float], gamma: float, J: float, t: float, n: int = 3,
                topology: str = "all_to_all", name: str = "phase_sweep",
                thresholds: SignatureThresholds = SignatureThresholds()) -> SweepResult:
    """Entanglement vs drive at fixed time, with the gamma = 0 system as baseline.

    ``annotations`` holds the single-qubit phase of every point; the
    boundary ``gamma/4`` is stored in ``metadata``.
    """
    omegas = tuple(omegas)
    if not omegas or min(omegas) <= 0:
        raise ValueError("omega range must be non-empty and positive")
    base = system(n, gamma, omegas[0], J, topology, name=name, axis="omega", analysis_time=t,
                  values=omegas, hermitian_baseline=True)
    return run_scenario(base, thresholds)


@dataclass(frozen=True)
class TimescaleComparison:
    t_non_hermitian: float
    t_hermitian: float
    ratio: float


def locate_time(s: Scenario, locator: str = "max_min_entropy",
                window: tuple[float, float] | None = None) -> float:
    """Characteristic entanglement time of a system.

    ``locator`` is an objective name for :func:`find_optimal_time` or
    ``"ghz_onset"`` for the first GHZ-like time.
    """
    window = window or default_window(s.qubits)
    if locator == "ghz_onset":
        return signature_onset(s, StateClass.GHZ_LIKE, window)
    t, value = find_optimal_time(s, window, locator)
    if locator == "max_min_entropy" and value < 1e-3:
        raise OptimumNotFound(f"no entanglement found in [{window[0]}, {window[1]}] us; try a longer window")
    return t


def timescale_comparison(J: float, gamma: float = 6.0, omega: float = 2.04,
                         hermitian_omega: float = 0.0, n: int = 3, topology: str = "all_to_all",
                         locator: str = "max_min_entropy") -> TimescaleComparison:
    """Ratio of the non-Hermitian to the Hermitian entanglement time.

    The Hermitian baseline is the same system with gamma = 0, driven at
    ``hermitian_omega`` (0 for the undriven reference).  Each system is
    searched over its own default window.
    """
    if not J > 0:
        raise ValueError("J must be positive")
    nh = system(n, gamma, omega, J, topology, name="non_hermitian")
    herm = system(n, 0.0, hermitian_omega, J, topology, name="hermitian")
    t_nh = locate_time(nh, locator)
    try:
        t_h = locate_time(herm, locator)
    except OptimumNotFound as exc:
        raise OptimumNotFound(f"Hermitian optimum not found: {exc}") from exc
    return TimescaleComparison(float(t_nh), float(t_h), float(t_nh / t_h))


def mutual_closeness(entropies: np.ndarray) -> np.ndarray:
    """Relative spread ``(max - min) / mean`` of per-qubit entropies, per row."""
    e = np.atleast_2d(entropies)
    mean = e.mean(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(mean > 0, (e.max(axis=1) - e.min(axis=1)) / mean, np.inf)


def pair_labels(n: int) -> list[str]:
    return [f"C{j}{k}" for j, k in pairs(n)]
