"""Propagation under exp(-iHt), post-selection and biorthogonal spectra."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .expm import expm
from .hamiltonian import MAX_QUBITS

#: post-selected norms below this count as vanished
NORM_FLOOR = 1e-300
NORMALIZED_TOL = 1e-10
#: decompositions above this condition number are flagged unusable
UNUSABLE_CONDITION = 1e12
CLUSTER_TOL = 1e-6
_RANK_TOL = 1e-5


class PostSelectionError(ArithmeticError):
    """The propagated state has (numerically) zero norm."""


@dataclass(frozen=True)
class StateVector:
    """Amplitudes over the computational basis |ee..e>, ..., |ff..f>."""

    amplitudes: np.ndarray = field(repr=False)
    normalized: bool = False

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        dim = amps.size
        if dim < 2 or dim & (dim - 1) or dim > 1 << MAX_QUBITS:
            raise ValueError(f"state dimension must be 2**n with 1 <= n <= {MAX_QUBITS}, got {dim}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("state has non-finite amplitudes")
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("zero-norm state")
        if self.normalized and abs(norm - 1) > NORMALIZED_TOL:
            raise ValueError(f"state flagged normalized but has norm {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __len__(self):
        return self.amplitudes.size


def product_state(qubit_amplitudes: Sequence[complex], n: int) -> StateVector:
    """``n``-fold tensor power of a single-qubit state given as ``(a_e, a_f)``."""
    single = np.asarray(qubit_amplitudes, dtype=complex)
    single = single / np.linalg.norm(single)
    amps = np.ones(1, dtype=complex)
    for _ in range(n):
        amps = np.kron(amps, single)
    return StateVector(amps, normalized=True)


def coherent_state(n: int) -> StateVector:
    """``2**(-n/2) (|f> - i|e>)^{(x)n}``."""
    return product_state([-1j, 1.0], n)


def basis_state(label: str) -> StateVector:
    """Basis state from a string of 'e'/'f' letters, qubit 1 first."""
    if not label or set(label) - {"e", "f"}:
        raise ValueError(f"basis label must consist of 'e' and 'f', got {label!r}")
    amps = np.zeros(1 << len(label), dtype=complex)
    amps[int(label.replace("e", "0").replace("f", "1"), 2)] = 1.0
    return StateVector(amps, normalized=True)


def _check_operands(H, psi):
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"Hamiltonian must be square, got shape {H.shape}")
    if H.shape[0] != len(psi):
        raise ValueError(f"dimension mismatch: H is {H.shape[0]}x{H.shape[0]}, state has {len(psi)} amplitudes")
    if not np.all(np.isfinite(H)):
        raise ValueError("Hamiltonian has non-finite entries")
    return H


def propagate(H, psi0: StateVector, t: float) -> StateVector:
    """Unnormalized ``exp(-iHt) psi0``."""
    H = _check_operands(H, psi0)
    if not (t >= 0 and math.isfinite(t)):
        raise ValueError(f"time must be finite and >= 0, got {t}")
    out = expm(-1j * t * H) @ psi0.amplitudes
    if not np.any(out) or not np.all(np.isfinite(out)):
        raise PostSelectionError(f"post-selection probability vanished at t={t}")
    return StateVector(out)


def normalize(psi: StateVector, floor: float = NORM_FLOOR) -> StateVector:
    """Post-select: rescale to unit norm."""
    norm = psi.norm
    if norm <= floor:
        raise PostSelectionError(f"post-selection probability vanished (norm {norm:.3e} <= floor {floor:.1e})")
    return StateVector(psi.amplitudes / norm, normalized=True)


@dataclass(frozen=True)
class Trajectory:
    """Post-selected states on a time grid.

    Rows after ``terminated_at`` (if any) are NaN: the raw norm fell below
    the post-selection floor there.
    """

    times: np.ndarray
    amplitudes: np.ndarray
    raw_norms: np.ndarray
    terminated_at: float | None = None

    def __len__(self):
        return len(self.times)

    def __iter__(self) -> Iterator[StateVector]:
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, i) -> StateVector:
        return StateVector(self.amplitudes[i], normalized=True)

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.raw_norms)


def _is_uniform(steps):
    return np.allclose(steps, steps[0], rtol=1e-12, atol=0)


def trajectory(H, psi0: StateVector, t_grid: Sequence[float], floor: float = NORM_FLOOR) -> Trajectory:
    """``normalize(propagate(H, psi0, t))`` for every ``t`` in ``t_grid``.

    On a uniform grid one step propagator is reused.  The state is
    renormalized after every step and the raw norm is carried as a running
    product, so strongly decaying runs lose no relative precision.
    """
    H = _check_operands(H, psi0)
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("time grid must be a non-empty 1-D sequence")
    if times[0] < 0 or not np.all(np.isfinite(times)):
        raise ValueError("times must be finite and >= 0")
    steps = np.diff(times)
    if np.any(steps <= 0):
        raise ValueError("time grid must be strictly increasing")

    dim = len(psi0)
    amps = np.full((times.size, dim), np.nan, dtype=complex)
    raw = np.full(times.size, np.nan)
    uniform = steps.size > 0 and _is_uniform(steps)
    step_op = expm(-1j * steps[0] * H) if uniform else None

    psi = psi0.amplitudes
    log_norm = 0.0
    terminated = None
    for i, t in enumerate(times):
        if i == 0:
            psi = expm(-1j * t * H) @ psi if t > 0 else psi.copy()
        else:
            U = step_op if uniform else expm(-1j * steps[i - 1] * H)
            psi = U @ psi
        norm = np.linalg.norm(psi)
        if norm > 0:
            log_norm += math.log(norm)
        if norm == 0 or not math.isfinite(norm) or log_norm <= math.log(floor):
            terminated = float(t)
            break
        psi = psi / norm
        amps[i] = psi
        # raw norms may underflow to 0.0 for very long runs; states do not
        raw[i] = math.exp(log_norm)
    return Trajectory(times, amps, raw, terminated)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Biorthogonal eigen-expansion ``psi(t) = sum_k a_k exp(-i E_k t) |r_k>``.

    ``right`` holds unit-norm right eigenvectors as columns, ``left`` the dual
    left eigenvectors as rows with ``left @ right == I``.  ``condition`` is
    ``max_k |l_k| |r_k| / |l_k . r_k|``; it is infinite when a defective
    eigenvalue cluster (an exceptional point) is detected.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    coefficients: np.ndarray
    condition: float
    pairing_distance: float
    defective: bool

    @property
    def usable(self) -> bool:
        return not self.defective and self.condition <= UNUSABLE_CONDITION

    def evolve(self, t: float) -> np.ndarray:
        """Unnormalized amplitudes at time ``t`` from the expansion."""
        return self.right @ (self.coefficients * np.exp(-1j * self.eigenvalues * t))


def _greedy_pairing(left_vals, right_vals):
    dist = np.abs(left_vals[:, None] - right_vals[None, :])
    order = np.argsort(dist, axis=None, kind="stable")
    perm = np.full(right_vals.size, -1)
    used = np.zeros(left_vals.size, dtype=bool)
    worst = 0.0
    for flat in order:
        i, j = divmod(int(flat), right_vals.size)
        if used[i] or perm[j] >= 0:
            continue
        perm[j] = i
        used[i] = True
        worst = max(worst, float(dist[i, j]))
    return perm, worst


def _clusters(vals, tol):
    """Single-linkage groups of eigenvalues closer than ``tol``."""
    parent = list(range(vals.size))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(vals.size):
        for j in range(i + 1, vals.size):
            if abs(vals[i] - vals[j]) <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(vals.size):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def _numerical_rank(A, tol):
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol))


def _is_defective(H, center, scale):
    # a diagonalizable eigenvalue has index 1: rank(A) == rank(A^2)
    A = H - center * np.eye(H.shape[0])
    r1 = _numerical_rank(A, _RANK_TOL * scale)
    r2 = _numerical_rank(A @ A, (_RANK_TOL * scale) ** 2)
    return r2 < r1


def decompose(H, psi0: StateVector, cluster_tol: float = CLUSTER_TOL) -> SpectralDecomposition:
    """Biorthogonal spectral decomposition of ``H`` and overlaps with ``psi0``.

    Right and left eigenproblems are solved separately and paired greedily by
    eigenvalue distance.  Near-degenerate clusters are biorthogonalized as a
    block, which handles diabolic points; clusters that fail the Jordan index
    test are reported as defective.
    """
    H = _check_operands(H, psi0)
    try:
        vals, right = np.linalg.eig(H)
        lvals, lvecs = np.linalg.eig(H.conj().T)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigensolver failed: {exc}") from exc
    perm, pairing = _greedy_pairing(lvals.conj(), vals)
    left = lvecs[:, perm].conj().T

    right = right / np.linalg.norm(right, axis=0)
    vscale = max(float(np.max(np.abs(vals))), 1.0) if vals.size else 1.0
    hscale = max(float(np.linalg.norm(H, 2)), np.finfo(float).tiny)
    defective = False
    for group in _clusters(vals, cluster_tol * vscale):
        idx = np.array(group)
        block = left[idx] @ right[:, idx]
        if idx.size > 1 and _is_defective(H, vals[idx].mean(), hscale):
            defective = True
            continue
        try:
            left[idx] = np.linalg.solve(block, left[idx])
        except np.linalg.LinAlgError:
            defective = True

    if defective:
        condition = math.inf
    else:
        condition = float(np.max(np.linalg.norm(left, axis=1)))
        if not math.isfinite(condition):
            condition = math.inf
    coefficients = left @ psi0.amplitudes
    return SpectralDecomposition(vals, right, left, coefficients, max(condition, 1.0), pairing, defective)
