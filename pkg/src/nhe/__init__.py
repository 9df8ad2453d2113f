"""Entanglement dynamics of driven, lossy passive PT-symmetric qubits."""

__version__ = "0.1.0"

from .hamiltonian import (  # noqa: E402
    CouplingGraph,
    Phase,
    PhaseClassification,
    QubitParams,
    build_hamiltonian,
    classify_phase,
    evolution_period,
)
from .dynamics import (  # noqa: E402
    PostSelectionError,
    SpectralDecomposition,
    StateVector,
    Trajectory,
    basis_state,
    coherent_state,
    decompose,
    normalize,
    propagate,
    trajectory,
)
from .entanglement import (  # noqa: E402
    EntanglementReport,
    ReducedDensityMatrix,
    StateClass,
    concurrence,
    entropy,
    partial_trace,
    report,
    three_tangle,
)

__all__ = [
    "CouplingGraph", "Phase", "PhaseClassification", "QubitParams", "build_hamiltonian",
    "classify_phase", "evolution_period",
    "PostSelectionError", "SpectralDecomposition", "StateVector", "Trajectory", "basis_state",
    "coherent_state", "decompose", "normalize", "propagate", "trajectory",
    "EntanglementReport", "ReducedDensityMatrix", "StateClass", "concurrence", "entropy",
    "partial_trace", "report", "three_tangle",
]
