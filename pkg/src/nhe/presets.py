"""Built-in scenarios; names follow the figure panels they reproduce."""
from __future__ import annotations

import numpy as np

from .experiments import Scenario
from .hamiltonian import CouplingGraph, QubitParams

GAMMA = 6.0
OMEGA_OPT = 1.576
J_OPT = 1e-3
T_OPT = 3.23


def _qubits(gammas=(GAMMA, GAMMA, GAMMA), omega=OMEGA_OPT, delta=0.0):
    return [QubitParams(delta, g, omega) for g in gammas]


def _log_axis(lo=1e-5, hi=1e-1, points=61):
    return tuple(float(v) for v in np.logspace(np.log10(lo), np.log10(hi), points))


def _build():
    ata = CouplingGraph.all_to_all(3, J_OPT)
    omega_axis = tuple(round(0.1 * k, 10) for k in range(1, 81))
    items = [
        Scenario("fig1a", _qubits(), ata, t_stop=8.0,
                 description="all-to-all coupled lossy qubits, GHZ generation (J=1e-3, omega=1.576)"),
        Scenario("fig1a_j1e-4", _qubits(omega=1.529), CouplingGraph.all_to_all(3, 1e-4), t_stop=12.0,
                 description="all-to-all, J=1e-4 with omega=1.529"),
        Scenario("fig1a_j1e-5", _qubits(omega=1.512), CouplingGraph.all_to_all(3, 1e-5), t_stop=20.0,
                 description="all-to-all, J=1e-5 with omega=1.512"),
        Scenario("fig1a_inset", _qubits(), CouplingGraph.single_pair(3, 1, 2, J_OPT), t_stop=8.0,
                 description="qubit 3 decoupled, Bell pair between qubits 1 and 2"),
        Scenario("fig1b", _qubits(), CouplingGraph.nearest_neighbour(3, J_OPT), t_stop=12.0,
                 description="nearest-neighbour chain (J13=0), W generation"),
        Scenario("fig2a", _qubits(), ata, axis="J12xJ23", analysis_time=T_OPT,
                 values=_log_axis(), values2=_log_axis(),
                 description="three-tangle over non-uniform J12 x J23 at t=3.23 (J13=1e-3)"),
        Scenario("fig2b", _qubits(), ata, axis="delta", analysis_time=T_OPT,
                 values=(0.0, 1e-3, 1e-2, 1e-1),
                 description="off-resonant driving, delta in {0, 1e-3, 1e-2, 1e-1} at t=3.23"),
        Scenario("fig2c", _qubits(), CouplingGraph.nearest_neighbour(3, J_OPT), axis="J12",
                 analysis_time=T_OPT, values=_log_axis(),
                 description="nearest-neighbour entropies vs J12 (J23=1e-3, J13=0) at t=3.23"),
        Scenario("fig3a", _qubits(), ata, t_stop=8.0,
                 description="three non-Hermitian qubits"),
        Scenario("fig3b", _qubits((0.0, GAMMA, GAMMA)), ata, t_stop=8.0,
                 description="qubit 1 Hermitian, qubits 2-3 lossy (biseparable)"),
        Scenario("fig3c", _qubits((0.0, 0.0, GAMMA)), ata, t_stop=8.0,
                 description="qubits 1-2 Hermitian, qubit 3 lossy"),
        Scenario("fig3d", _qubits((0.0, 0.0, 0.0)), ata, t_stop=8.0,
                 description="three Hermitian qubits (control)"),
        Scenario("fig5a", _qubits((0.0, 0.0, 0.0), omega=0.0), CouplingGraph.all_to_all(3, 0.1), t_stop=20.0,
                 description="undriven Hermitian qubits, J=0.1"),
        Scenario("fig5b", _qubits(omega=2.04), CouplingGraph.all_to_all(3, 0.1), t_stop=20.0,
                 hermitian_baseline=True,
                 description="lossy vs Hermitian qubits driven at omega=2.04, J=0.1"),
        Scenario("fig5c", _qubits(omega=omega_axis[0]), CouplingGraph.all_to_all(3, 0.1), axis="omega",
                 analysis_time=1.08, values=omega_axis, hermitian_baseline=True,
                 description="entropies vs omega at t=1.08 (J=0.1), broken -> symmetric phase"),
        Scenario("fig5d", _qubits(omega=omega_axis[0]), CouplingGraph.all_to_all(3, 0.1), axis="omega",
                 analysis_time=13.0, values=omega_axis, hermitian_baseline=True,
                 description="entropies vs omega at t=13 (J=0.1)"),
    ]
    return {s.name: s for s in items}


PRESETS = _build()


def get_preset(name: str) -> Scenario:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
