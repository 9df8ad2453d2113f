"""Effective non-Hermitian Hamiltonian of driven, lossy two-level qubits.

Each qubit has two levels, |e> (lossy) and |f>.  The Hamiltonian reads

    H = sum_j (delta_j - i gamma_j / 2) |e><e|_j + omega_j X_j
        + sum_{j<k} J_jk (s_j^+ s_k + s_j s_k^+)

with s_j = |e><f|_j.  Basis states are labelled by integers whose binary
digits give the qubit levels, qubit 1 first (most significant bit), with
|e> -> 0 and |f> -> 1.  Index 0 is therefore |ee...e> and index 2**n - 1 is
|ff...f>.

Frequencies are angular frequencies in rad/us and times are in us.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MAX_QUBITS = 4

#: relative tolerance on |omega - gamma/4| used to call an exceptional point
EP_TOL = 1e-9


@dataclass(frozen=True)
class QubitParams:
    """Detuning, loss and drive of a single qubit (all in rad/us).

    ``gamma == 0`` describes a Hermitian qubit.
    """

    delta: float = 0.0
    gamma: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        for name in ("delta", "gamma", "omega"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0 (passive system), got {self.gamma}")
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")

    @property
    def is_hermitian(self) -> bool:
        return self.gamma == 0


@dataclass(frozen=True)
class CouplingGraph:
    """Symmetric real coupling matrix ``J`` (rad/us) with zero diagonal."""

    J: np.ndarray = field(repr=False)

    def __post_init__(self):
        J = np.array(self.J, dtype=float)
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise ValueError(f"coupling matrix must be square, got shape {J.shape}")
        n = J.shape[0]
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be between 1 and {MAX_QUBITS}, got {n}")
        if not np.all(np.isfinite(J)):
            raise ValueError("coupling matrix has non-finite entries")
        for j in range(n):
            if J[j, j] != 0:
                raise ValueError(f"coupling matrix diagonal must vanish, J[{j + 1},{j + 1}] = {J[j, j]}")
            for k in range(j + 1, n):
                if J[j, k] != J[k, j]:
                    raise ValueError(
                        f"coupling matrix is not symmetric at pair ({j + 1},{k + 1}): "
                        f"J[{j + 1},{k + 1}] = {J[j, k]} but J[{k + 1},{j + 1}] = {J[k, j]}"
                    )
        J.setflags(write=False)
        object.__setattr__(self, "J", J)

    @property
    def n(self) -> int:
        return self.J.shape[0]

    @classmethod
    def all_to_all(cls, n: int, strength: float) -> "CouplingGraph":
        J = np.full((n, n), float(strength))
        np.fill_diagonal(J, 0.0)
        return cls(J)

    @classmethod
    def nearest_neighbour(cls, n: int, strength: float) -> "CouplingGraph":
        """Open chain 1-2-...-n (for n = 3, J_13 = 0)."""
        J = np.zeros((n, n))
        for j in range(n - 1):
            J[j, j + 1] = J[j + 1, j] = strength
        return cls(J)

    @classmethod
    def single_pair(cls, n: int, j: int, k: int, strength: float) -> "CouplingGraph":
        """Only qubits ``j`` and ``k`` (1-based) are coupled."""
        if j == k or not (1 <= j <= n and 1 <= k <= n):
            raise ValueError(f"invalid pair ({j},{k}) for {n} qubits")
        J = np.zeros((n, n))
        J[j - 1, k - 1] = J[k - 1, j - 1] = strength
        return cls(J)

    @classmethod
    def uncoupled(cls, n: int) -> "CouplingGraph":
        return cls(np.zeros((n, n)))

    def __eq__(self, other):
        if not isinstance(other, CouplingGraph):
            return NotImplemented
        return np.array_equal(self.J, other.J)

    def __hash__(self):
        return hash(self.J.tobytes())


def _bit(n: int, j: int) -> int:
    """Bit mask of qubit ``j`` (0-based, qubit 0 is the most significant)."""
    return 1 << (n - 1 - j)


def build_hamiltonian(params: Sequence[QubitParams], couplings: CouplingGraph) -> np.ndarray:
    """Assemble the dense ``2**n x 2**n`` Hamiltonian.

    The exchange term enters once per unordered pair with amplitude ``J_jk``.

    Raises
    ------
    ValueError
        If the number of qubits in ``params`` and ``couplings`` differ.
    """
    params = list(params)
    n = len(params)
    if n != couplings.n:
        raise ValueError(f"got {n} qubit parameter sets for a {couplings.n}-qubit coupling graph")
    dim = 1 << n
    H = np.zeros((dim, dim), dtype=complex)
    J = couplings.J
    for state in range(dim):
        for j, q in enumerate(params):
            mj = _bit(n, j)
            if not state & mj:
                H[state, state] += q.delta - 0.5j * q.gamma
            if q.omega:
                H[state ^ mj, state] += q.omega
            for k in range(j + 1, n):
                mk = _bit(n, k)
                # hopping only connects states where qubits j and k differ
                if J[j, k] and bool(state & mj) != bool(state & mk):
                    H[state ^ mj ^ mk, state] += J[j, k]
    return H


class Phase(str, enum.Enum):
    PT_SYMMETRIC = "PT_SYMMETRIC"
    EXCEPTIONAL_POINT = "EXCEPTIONAL_POINT"
    PT_BROKEN = "PT_BROKEN"


@dataclass(frozen=True)
class PhaseClassification:
    phase: Phase
    period: float | None = None


def classify_phase(q: QubitParams, tol: float = EP_TOL) -> PhaseClassification:
    """Phase of a single uncoupled qubit on the PT-symmetric line (delta = 0).

    The exceptional point sits at ``omega = gamma / 4``; ``tol`` is relative to
    ``gamma / 4`` (absolute when gamma vanishes).
    """
    if q.delta != 0:
        raise ValueError("phase classification requires delta = 0 (PT-symmetric condition)")
    boundary = q.gamma / 4
    scale = boundary if boundary > 0 else 1.0
    if abs(q.omega - boundary) <= tol * scale:
        return PhaseClassification(Phase.EXCEPTIONAL_POINT)
    if q.omega > boundary:
        return PhaseClassification(Phase.PT_SYMMETRIC, evolution_period(q))
    return PhaseClassification(Phase.PT_BROKEN)


def evolution_period(q: QubitParams) -> float:
    """Full period ``4 pi / sqrt(16 omega**2 - gamma**2)`` in us."""
    disc = 16 * q.omega**2 - q.gamma**2
    if disc <= 0:
        raise ValueError(
            f"period undefined: omega={q.omega} does not exceed gamma/4={q.gamma / 4} (EP or broken phase)"
        )
    return 4 * math.pi / math.sqrt(disc)


def matrix_to_pairs(H: np.ndarray) -> list[list[float]]:
    """Row-major ``[re, im]`` pairs, the on-disk layout for matrices."""
    return [[float(z.real), float(z.imag)] for z in np.asarray(H).ravel()]


def matrix_from_pairs(pairs: Sequence[Sequence[float]]) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in pairs])
    dim = math.isqrt(flat.size)
    if dim * dim != flat.size:
        raise ValueError(f"{flat.size} entries do not form a square matrix")
    return flat.reshape(dim, dim)
