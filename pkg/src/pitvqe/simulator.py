"""Real-amplitude statevector engine.

Only Y rotations and controlled-Y rotations are supported, so amplitudes stay
real throughout; basis index bit i is z_i with qubit 0 least significant.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .hamiltonian import DiagonalCost

QUBIT_CAP = 20


class InitKind(Enum):
    ALL_ZERO = "zero"
    ALL_ONE = "one"
    SUPERPOSITION = "plus"


class StateVector:
    """Normalized real amplitude vector over 2^n basis states."""

    __slots__ = ("n", "amps")

    def __init__(self, n: int, amps: np.ndarray):
        self.n = n
        self.amps = amps

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def norm(self) -> float:
        return float(np.dot(self.amps, self.amps))


def init_state(n: int, kind: InitKind) -> StateVector:
    if not 1 <= n <= QUBIT_CAP:
        raise ResourceWarning(f"qubit count {n} outside [1, {QUBIT_CAP}]")
    amps = np.zeros(1 << n)
    if kind is InitKind.ALL_ZERO:
        amps[0] = 1.0
    elif kind is InitKind.ALL_ONE:
        amps[-1] = 1.0
    else:
        amps[:] = 2.0 ** (-n / 2)
    return StateVector(n, amps)


def _check_qubit(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.n:
        raise ValueError(f"qubit {qubit} out of range for {state.n} qubits")


def apply_ry(state: StateVector, qubit: int, theta: float) -> StateVector:
    """In-place Ry(theta) = [[c, -s], [s, c]] on one qubit, c=cos(theta/2)."""
    _check_qubit(state, qubit)
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    view = state.amps.reshape(1 << (state.n - qubit - 1), 2, 1 << qubit)
    a0 = view[:, 0, :].copy()
    view[:, 0, :] *= c
    view[:, 0, :] -= s * view[:, 1, :]
    view[:, 1, :] *= c
    view[:, 1, :] += s * a0
    return state

_CRY_INDEX_CACHE: dict[tuple[int, int, int], tuple[np.ndarray, np.ndarray]] = {}


def _cry_indices(n: int, control: int, target: int):
    key = (n, control, target)
    hit = _CRY_INDEX_CACHE.get(key)
    if hit is None:
        idx = np.arange(1 << n)
        lo = idx[((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)]
        hit = (lo, lo | (1 << target))
        _CRY_INDEX_CACHE[key] = hit
    return hit


def apply_cry(state: StateVector, control: int, target: int, theta: float) -> StateVector:
    """In-place Ry(theta) on target restricted to the control=1 subspace."""
    _check_qubit(state, control)
    _check_qubit(state, target)
    if control == target:
        raise ValueError("control and target must differ")
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    lo, hi = _cry_indices(state.n, control, target)
    a0 = state.amps[lo].copy()
    a1 = state.amps[hi]
    state.amps[lo] = c * a0 - s * a1
    state.amps[hi] = s * a0 + c * a1
    return state


def probabilities(state: StateVector) -> np.ndarray:
    return state.amps * state.amps


def expect_diagonal(state: StateVector, h: DiagonalCost) -> float:
    """<state| H |state> for a diagonal cost operator."""
    if h.n != state.n:
        raise ValueError(f"operator on {h.n} qubits, state on {state.n}")
    return float(np.dot(probabilities(state), h.dense_diagonal()))


def expect_z(state: StateVector, qubit: int) -> float:
    """<Z_qubit> = p(z_qubit = 0) - p(z_qubit = 1)."""
    _check_qubit(state, qubit)
    p = probabilities(state).reshape(1 << (state.n - qubit - 1), 2, 1 << qubit)
    return float(p[:, 0, :].sum() - p[:, 1, :].sum())


def excavation_probabilities(state: StateVector) -> np.ndarray:
    """Per-qubit p(z_i = 1) = (1 - <Z_i>) / 2."""
    return np.array([(1.0 - expect_z(state, q)) / 2.0 for q in range(state.n)])
