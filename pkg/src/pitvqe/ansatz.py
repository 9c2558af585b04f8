"""Parameterized circuit: one Ry per block, then one controlled-Ry per
retained parent-child pair (control = child, target = parent)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .lattice import PitLattice
from .simulator import InitKind, StateVector, apply_cry, apply_ry, init_state


@dataclass(frozen=True)
class SingleRy:
    qubit: int
    param_id: int


@dataclass(frozen=True)
class ControlledRy:
    control: int
    target: int
    param_id: int


@dataclass(frozen=True)
class ParamCircuit:
    n: int
    gates: tuple[SingleRy | ControlledRy, ...]

    @property
    def param_count(self) -> int:
        return len(self.gates)

    def dump(self) -> str:
        """One gate per line: ``ry q<i> p<k>`` / ``cry q<c> q<t> p<k>``."""
        lines = []
        for g in self.gates:
            if isinstance(g, SingleRy):
                lines.append(f"ry q{g.qubit} p{g.param_id}")
            else:
                lines.append(f"cry q{g.control} q{g.target} p{g.param_id}")
        return "\n".join(lines)


def build_circuit(
    lattice: PitLattice,
    pair_filter: Iterable[tuple[int, int]] | None = None,
    qubit_of: dict[int, int] | None = None,
) -> ParamCircuit:
    """Build the ansatz over a lattice or a subset of its blocks.

    ``pair_filter`` keeps only the listed (child, parent) pairs (default all);
    ``qubit_of`` maps block ids to circuit qubits for fragment circuits
    (default identity over all blocks).
    """
    all_pairs = lattice.pairs()
    if pair_filter is None:
        pairs = all_pairs
    else:
        pairs = sorted(pair_filter)
        bad = [p for p in pairs if p not in all_pairs]
        if bad:
            raise ValueError(f"pair_filter entries are not parent-child pairs: {bad}")
    if qubit_of is None:
        qubit_of = {i: i for i in range(lattice.n)}
    gates: list[SingleRy | ControlledRy] = []
    for block in sorted(qubit_of, key=qubit_of.get):
        gates.append(SingleRy(qubit=qubit_of[block], param_id=len(gates)))
    for child, parent in pairs:
        gates.append(
            ControlledRy(
                control=qubit_of[child], target=qubit_of[parent], param_id=len(gates)
            )
        )
    return ParamCircuit(n=len(qubit_of), gates=tuple(gates))


def prepare(circuit: ParamCircuit, params: Sequence[float], init: InitKind) -> StateVector:
    """Apply the bound circuit to the chosen initial product state."""
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.param_count,):
        raise ValueError(
            f"expected {circuit.param_count} parameters, got {params.shape}"
        )
    state = init_state(circuit.n, init)
    for g in circuit.gates:
        if isinstance(g, SingleRy):
            apply_ry(state, g.qubit, params[g.param_id])
        else:
            apply_cry(state, g.control, g.target, params[g.param_id])
    return state
