"""Entanglement measures for pure states of a few qubits.

Pairwise Wootters concurrence, the residual three-tangle of three-qubit pure
states and von Neumann entropies (natural log) of single qubits.  Qubits are
numbered from 1 throughout this module.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import StateVector, NORMALIZED_TOL

LN2 = math.log(2)
W_ENTROPY = math.log(3) - 2 * math.log(2) / 3
W_CONCURRENCE = 2 / 3

_SY = np.array([[0, -1j], [1j, 0]])
_SYSY = np.kron(_SY, _SY)
_RHO_TOL = 1e-10
_MEASURE_TOL = 1e-8


@dataclass(frozen=True)
class ReducedDensityMatrix:
    keep: tuple
    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        m = len(self.keep)
        if rho.shape != (1 << m, 1 << m):
            raise ValueError(f"{m} kept qubits need a {1 << m}x{1 << m} matrix, got {rho.shape}")
        _check_density(rho, _RHO_TOL)
        rho.setflags(write=False)
        object.__setattr__(self, "keep", tuple(self.keep))
        object.__setattr__(self, "rho", rho)


def _check_density(rho, tol):
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    trace = np.trace(rho).real
    if abs(trace - 1) > tol:
        raise ValueError(f"density matrix trace is {trace!r}, expected 1")
    p = np.linalg.eigvalsh(rho)
    if p.min() < -tol or p.max() > 1 + tol:
        raise ValueError("density matrix eigenvalues outside [0, 1]")


def _require_normalized(psi: StateVector):
    if abs(psi.norm - 1) > NORMALIZED_TOL:
        raise ValueError(f"state must be normalized, norm is {psi.norm!r}")


def _reduced(amps, n, keep0):
    """Batched partial trace: ``amps`` is (N, 2**n), ``keep0`` 0-based."""
    N = amps.shape[0]
    t = amps.reshape((N,) + (2,) * n)
    t = np.moveaxis(t, [k + 1 for k in keep0], list(range(1, len(keep0) + 1)))
    t = t.reshape(N, 1 << len(keep0), -1)
    return np.einsum("nak,nbk->nab", t, t.conj())


def partial_trace(psi: StateVector, keep: Sequence[int]) -> ReducedDensityMatrix:
    """Reduced state of the qubits in ``keep`` (1-based, in the given order)."""
    n = psi.n
    keep = tuple(int(k) for k in keep)
    if not keep or len(set(keep)) != len(keep) or len(keep) >= n:
        raise ValueError(f"keep must be a non-empty strict subset of 1..{n}, got {keep}")
    if any(not 1 <= k <= n for k in keep):
        raise ValueError(f"qubit indices must lie in 1..{n}, got {keep}")
    _require_normalized(psi)
    rho = _reduced(psi.amplitudes[None, :], n, [k - 1 for k in keep])[0]
    return ReducedDensityMatrix(keep, rho)


def _concurrence_from_rho(rho):
    """Stacked concurrences; ``rho`` has shape (N, 4, 4).

    With ``rho = W W^dag`` the Wootters values are the singular values of
    ``W^T (sy x sy) W``; this avoids square roots of tiny eigenvalues of
    ``rho rho~``, which cost ~1e-8 accuracy on rank-deficient states.
    """
    p, V = np.linalg.eigh(rho)
    W = V * np.sqrt(np.clip(p, 0, None))[..., None, :]
    lam = np.linalg.svd(np.swapaxes(W, -1, -2) @ _SYSY @ W, compute_uv=False)
    c = lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]
    return np.clip(c, 0.0, 1.0)


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    ``max(0, l1 - l2 - l3 - l4)`` where the ``l_i`` are the square roots of
    the eigenvalues of ``rho (sy x sy) rho* (sy x sy)`` in decreasing order.
    """
    if isinstance(rho, ReducedDensityMatrix):
        rho = rho.rho
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"concurrence needs a 4x4 density matrix, got {rho.shape}")
    _check_density(rho, _MEASURE_TOL)
    return float(_concurrence_from_rho(rho[None])[0])


def _tangle(a):
    """Three-tangle of stacked amplitudes ``a`` with shape (N, 8)."""
    a1, a2, a3, a4, a5, a6, a7, a8 = (a[..., k] for k in range(8))
    d1 = (a1 * a8) ** 2 + (a2 * a7) ** 2 + (a3 * a6) ** 2 + (a4 * a5) ** 2
    d2 = (a1 * a8 * (a4 * a5 + a3 * a6 + a2 * a7)
          + a3 * a4 * a5 * a6 + a4 * a5 * a2 * a7 + a2 * a7 * a3 * a6)
    d3 = a1 * a7 * a4 * a6 + a2 * a8 * a3 * a5
    return np.clip(4 * np.abs(d1 - 2 * d2 + 4 * d3), 0.0, 1.0 + 1e-9)


def three_tangle(psi: StateVector) -> float:
    """Residual three-tangle ``4 |d1 - 2 d2 + 4 d3|`` of a pure 3-qubit state."""
    if psi.n != 3:
        raise ValueError(f"three-tangle is defined for 3 qubits, got {psi.n}")
    _require_normalized(psi)
    return float(_tangle(psi.amplitudes[None, :])[0])


def _entropy_from_probs(p):
    p = np.clip(p, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log(p), 0.0)
    return np.clip(terms.sum(axis=-1), 0.0, None)


def entropy(rho) -> float:
    """von Neumann entropy ``-Tr rho ln rho`` of a single-qubit state."""
    if isinstance(rho, ReducedDensityMatrix):
        rho = rho.rho
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"entropy needs a 2x2 density matrix, got {rho.shape}")
    _check_density(rho, _MEASURE_TOL)
    return float(_entropy_from_probs(np.linalg.eigvalsh(rho)))


def pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(1, n + 1), 2))


def batch_measures(amplitudes, n: int) -> dict[str, np.ndarray]:
    """All measures for a stack of normalized states, shape (N, 2**n).

    Returns ``entropies`` (N, n), ``concurrences`` (N, n(n-1)/2) ordered as
    :func:`pairs`, and ``tau`` (N,) for three qubits (NaN otherwise).
    """
    amps = np.atleast_2d(np.asarray(amplitudes, dtype=complex))
    entropies = np.empty((amps.shape[0], n))
    for j in range(n):
        rho = _reduced(amps, n, [j])
        entropies[:, j] = _entropy_from_probs(np.linalg.eigvalsh(rho))
    conc = np.empty((amps.shape[0], len(pairs(n))))
    if n > 2:
        for i, (j, k) in enumerate(pairs(n)):
            conc[:, i] = _concurrence_from_rho(_reduced(amps, n, [j - 1, k - 1]))
    elif n == 2:
        conc[:, 0] = _concurrence_from_rho(np.einsum("na,nb->nab", amps, amps.conj()))
    tau = _tangle(amps) if n == 3 else np.full(amps.shape[0], np.nan)
    return {"entropies": entropies, "concurrences": conc, "tau": tau}


class StateClass(str, enum.Enum):
    GHZ_LIKE = "GHZ_LIKE"
    W_LIKE = "W_LIKE"
    BISEPARABLE = "BISEPARABLE"
    SEPARABLE = "SEPARABLE"
    UNCLASSIFIED = "UNCLASSIFIED"


@dataclass(frozen=True)
class SignatureThresholds:
    """Cuts used to label a three-qubit state by its entanglement signature."""

    ghz_tau: float = 0.9
    ghz_max_concurrence: float = 0.1
    w_max_tau: float = 0.1
    w_min_entropy: float = 0.5
    w_window: float = 0.1
    entangled_entropy: float = 0.5
    separable_entropy: float = 0.05


def classify(tau: float | None, concurrences: Sequence[float], entropies: Sequence[float],
             thresholds: SignatureThresholds = SignatureThresholds()) -> StateClass:
    th = thresholds
    low = [s < th.separable_entropy for s in entropies]
    if all(low):
        return StateClass.SEPARABLE
    if tau is None or len(entropies) != 3:
        return StateClass.UNCLASSIFIED
    if tau > th.ghz_tau and max(concurrences) < th.ghz_max_concurrence:
        return StateClass.GHZ_LIKE
    if (tau < th.w_max_tau and min(entropies) > th.w_min_entropy
            and all(abs(c - W_CONCURRENCE) <= th.w_window for c in concurrences)
            and all(abs(s - W_ENTROPY) <= th.w_window for s in entropies)):
        return StateClass.W_LIKE
    if sum(low) == 1 and all(s > th.entangled_entropy for s, l in zip(entropies, low) if not l):
        return StateClass.BISEPARABLE
    return StateClass.UNCLASSIFIED


@dataclass(frozen=True)
class EntanglementReport:
    t: float
    concurrences: dict
    tau: float | None
    entropies: tuple
    classification: StateClass

    @property
    def n(self) -> int:
        return len(self.entropies)

    def C(self, j: int, k: int) -> float:
        return self.concurrences[(min(j, k), max(j, k))]

    def S(self, j: int) -> float:
        return self.entropies[j - 1]


def _report_from_row(t, n, entropies, concurrences, tau, thresholds):
    conc = {pair: float(c) for pair, c in zip(pairs(n), concurrences)}
    tau = None if n != 3 else float(tau)
    ent = tuple(float(s) for s in entropies)
    return EntanglementReport(float(t), conc, tau, ent, classify(tau, list(conc.values()), ent, thresholds))


def report(psi: StateVector, t: float = 0.0,
           thresholds: SignatureThresholds = SignatureThresholds()) -> EntanglementReport:
    """Bundle concurrences, three-tangle (3 qubits only) and entropies."""
    _require_normalized(psi)
    if psi.n < 2:
        raise ValueError("entanglement report needs at least two qubits")
    m = batch_measures(psi.amplitudes, psi.n)
    return _report_from_row(t, psi.n, m["entropies"][0], m["concurrences"][0], m["tau"][0], thresholds)


def reports(times, amplitudes, n: int,
            thresholds: SignatureThresholds = SignatureThresholds()) -> list[EntanglementReport]:
    """Vectorized :func:`report` over a stack of normalized states."""
    m = batch_measures(amplitudes, n)
    return [_report_from_row(t, n, m["entropies"][i], m["concurrences"][i], m["tau"][i], thresholds)
            for i, t in enumerate(times)]
