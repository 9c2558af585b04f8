"""Mean-field domain decomposition.

The lattice is split into disjoint fragments; each fragment keeps its own
small variational circuit, and parent-child pairs severed by the cut enter
the fragment's effective cost through the mean <Z> value of the out-of-
fragment block.  A sweep performs one optimizer iteration per fragment and
updates the mean fields, repeated to self-consistency.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .ansatz import ParamCircuit, build_circuit, prepare
from .hamiltonian import DiagonalCost
from .lattice import PitLattice
from .simulator import InitKind, StateVector, probabilities
from .vqe import DescentState, Optimizer, VqeConfig, _project


@dataclass(frozen=True)
class Partition:
    fragments: tuple[tuple[int, ...], ...]  # sorted block ids per fragment

    def __post_init__(self):
        frags = tuple(tuple(sorted(f)) for f in self.fragments)
        object.__setattr__(self, "fragments", frags)
        seen: set[int] = set()
        for f in frags:
            if not f:
                raise ValueError("empty fragment")
            overlap = seen.intersection(f)
            if overlap:
                raise ValueError(f"blocks {sorted(overlap)} appear in two fragments")
            seen.update(f)

    @property
    def fragment_of(self) -> dict[int, int]:
        return {b: a for a, f in enumerate(self.fragments) for b in f}


def partition_horizontal(lattice: PitLattice) -> Partition:
    """One fragment per lattice row."""
    return Partition(tuple(tuple(r) for r in lattice.rows() if r))


def partition_custom(lattice: PitLattice, assignment: Mapping[int, int]) -> Partition:
    """Partition from an explicit block -> fragment-id map."""
    expected = set(range(lattice.n))
    if set(assignment) != expected:
        missing = sorted(expected - set(assignment))
        extra = sorted(set(assignment) - expected)
        raise ValueError(f"assignment mismatch: missing {missing}, extra {extra}")
    by_frag: dict[int, list[int]] = {}
    for block, frag in assignment.items():
        by_frag.setdefault(frag, []).append(block)
    return Partition(tuple(tuple(sorted(by_frag[a])) for a in sorted(by_frag)))


def load_partition(path, lattice: PitLattice) -> Partition:
    """One fragment per line, whitespace-separated block ids."""
    frags = []
    with open(path, encoding="ascii") as fh:
        for raw in fh:
            stripped = raw.split("#", 1)[0].strip()
            if stripped:
                frags.append(tuple(int(tok) for tok in stripped.split()))
    assignment = {b: a for a, f in enumerate(frags) for b in f}
    return partition_custom(lattice, assignment)


@dataclass(frozen=True)
class FragmentProblem:
    fragment_id: int
    blocks: tuple[int, ...]  # sorted global block ids; local qubit = position
    intra_pairs: tuple[tuple[int, int], ...]  # (child, parent), both local
    child_in_pairs: tuple[tuple[int, int], ...]  # child global in, parent global out
    child_out_pairs: tuple[tuple[int, int], ...]  # child global out, parent global in
    circuit: ParamCircuit
    profits: tuple[int, ...]  # per local qubit

    @property
    def size(self) -> int:
        return len(self.blocks)

    def local(self, block: int) -> int:
        return self.blocks.index(block)


def build_fragment_problems(
    lattice: PitLattice, partition: Partition
) -> list[FragmentProblem]:
    frag_of = partition.fragment_of
    problems = []
    for a, blocks in enumerate(partition.fragments):
        members = set(blocks)
        intra, child_in, child_out = [], [], []
        for child, parent in lattice.pairs():
            if child in members and parent in members:
                intra.append((child, parent))
            elif child in members:
                child_in.append((child, parent))
            elif parent in members:
                child_out.append((child, parent))
        qubit_of = {b: k for k, b in enumerate(blocks)}
        circuit = build_circuit(lattice, pair_filter=intra, qubit_of=qubit_of)
        problems.append(
            FragmentProblem(
                fragment_id=a,
                blocks=tuple(blocks),
                intra_pairs=tuple(intra),
                child_in_pairs=tuple(child_in),
                child_out_pairs=tuple(child_out),
                circuit=circuit,
                profits=tuple(lattice.blocks[b].profit for b in blocks),
            )
        )
    return problems


def _local_bits(size: int) -> np.ndarray:
    idx = np.arange(1 << size, dtype=np.int64)
    return (idx[:, None] >> np.arange(size)) & 1


def _require_fields(mf: Mapping[int, float], blocks) -> None:
    missing = [b for b in blocks if b not in mf]
    if missing:
        raise ValueError(f"missing mean fields for blocks {missing}")


def effective_diagonal(
    fp: FragmentProblem, mf: Mapping[int, float], gamma: float,
    include_child_out: bool = True,
) -> np.ndarray:
    """Dense effective cost over the fragment's local basis.

    Mean fields replace the out-of-fragment end of each severed pair:
    a severed child i inside the fragment contributes z_i (1 + <Z_j>)/2 and a
    severed parent j inside contributes (1 - <Z_i>)/2 (1 - z_j).  The trace
    reported per fragment books each severed pair on the child's side, which
    is what ``include_child_out=False`` computes.
    """
    bits = _local_bits(fp.size)
    w = np.array(fp.profits, dtype=float)
    diag = -(bits @ w)
    for child, parent in fp.intra_pairs:
        diag = diag + gamma * bits[:, fp.local(child)] * (1 - bits[:, fp.local(parent)])
    _require_fields(mf, [j for _, j in fp.child_in_pairs])
    for child, parent in fp.child_in_pairs:
        diag = diag + gamma * bits[:, fp.local(child)] * (1.0 + mf[parent]) / 2.0
    if include_child_out:
        _require_fields(mf, [i for i, _ in fp.child_out_pairs])
        for child, parent in fp.child_out_pairs:
            diag = diag + gamma * (1.0 - mf[child]) / 2.0 * (
                1 - bits[:, fp.local(parent)]
            )
    return diag


def effective_cost(
    fp: FragmentProblem,
    mf: Mapping[int, float],
    gamma: float,
    z_local: Sequence[int],
) -> float:
    """Effective cost of one local bitstring under the current mean fields."""
    index = sum(int(z) << k for k, z in enumerate(z_local))
    return float(effective_diagonal(fp, mf, gamma)[index])


def fragment_mean_fields(fp: FragmentProblem, state: StateVector) -> dict[int, float]:
    """<Z_b> for every block of the fragment from its local state."""
    p = probabilities(state)
    bits = _local_bits(fp.size)
    out = {}
    for k, b in enumerate(fp.blocks):
        p1 = float(p[bits[:, k] == 1].sum())
        out[b] = 1.0 - 2.0 * p1
    return out


def total_energy(
    problems: Sequence[FragmentProblem],
    states: Sequence[StateVector],
    gamma: float,
) -> float:
    """Global mean-field energy with each severed pair counted once."""
    if len(states) != len(problems):
        raise ValueError("one state per fragment required")
    mf: dict[int, float] = {}
    for fp, st in zip(problems, states):
        mf.update(fragment_mean_fields(fp, st))
    total = 0.0
    for fp, st in zip(problems, states):
        # intra-fragment part exactly, severed pairs on the child side
        diag = effective_diagonal(fp, mf, gamma, include_child_out=False)
        total += float(np.dot(probabilities(st), diag))
    return total


@dataclass(frozen=True)
class ScfConfig:
    init: InitKind = InitKind.SUPERPOSITION
    optimizer: Optimizer = Optimizer.GRADIENT_DESCENT
    seed: int = 0
    init_param_range: tuple[float, float] = (0.0, np.pi / 10)
    bounds: tuple[float, float] = (0.0, np.pi)
    tolerance: float = 1e-6
    max_sweeps: int = 500
    inner_iterations: int = 1
    boundary_kick_enabled: bool = True
    kick_epsilon: float = 1e-3
    kick_temperature: float = 0.1
    sum_constraint_enabled: bool = True

    def __post_init__(self):
        if self.optimizer is Optimizer.SPSA:
            raise ValueError("the self-consistent sweep supports gd and qnb only")


@dataclass
class ScfResult:
    traces: list[list[float]]  # per sweep: negative local cost per fragment
    energy_trace: list[float]
    final_states: list[StateVector]
    final_distribution: np.ndarray
    sweeps: int
    converged: bool
    fragment_histories: list[list[tuple[int, float]]]


def boundary_kick(
    params: np.ndarray,
    bounds: tuple[float, float],
    epsilon: float,
    temperature: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Shift parameters stuck within epsilon of a bound inward by U(0, T]."""
    if epsilon <= 0 or temperature <= 0:
        raise ValueError("epsilon and temperature must be positive")
    lo, hi = bounds
    out = np.array(params, dtype=float)
    for k, v in enumerate(out):
        if v - lo < epsilon:
            out[k] = lo + temperature * (1.0 - rng.uniform(0.0, 1.0))
        elif hi - v < epsilon:
            out[k] = hi - temperature * (1.0 - rng.uniform(0.0, 1.0))
    return out


def sum_constraint_project(
    circuit: ParamCircuit, params: np.ndarray, upper: float = np.pi
) -> np.ndarray:
    """Rescale per-qubit gate groups whose parameter sum exceeds the range.

    A group is the single rotation on a qubit together with every controlled
    rotation targeting it; groups with no controlled member are left alone.
    """
    from .ansatz import ControlledRy, SingleRy

    groups: dict[int, list[int]] = {}
    for g in circuit.gates:
        if isinstance(g, SingleRy):
            groups.setdefault(g.qubit, []).append(g.param_id)
        else:
            groups.setdefault(g.target, []).append(g.param_id)
    out = np.array(params, dtype=float)
    for qubit, ids in groups.items():
        if len(ids) < 2:
            continue
        total = out[ids].sum()
        if total > upper:
            out[ids] *= upper / total
    return out


def _product_distribution(problems, states, n):
    idx = np.arange(1 << n)
    dist = np.ones(1 << n)
    for fp, st in zip(problems, states):
        local_idx = np.zeros(1 << n, dtype=np.int64)
        for k, b in enumerate(fp.blocks):
            local_idx |= ((idx >> b) & 1) << k
        dist *= probabilities(st)[local_idx]
    return dist


def scf_run(
    lattice: PitLattice,
    partition: Partition,
    gamma: Fraction | float,
    config: ScfConfig = ScfConfig(),
) -> ScfResult:
    """Self-consistent sweep: one optimizer iteration per fragment per loop."""
    gamma_f = float(gamma)
    problems = build_fragment_problems(lattice, partition)
    rng = np.random.default_rng(config.seed)
    lo, hi = config.init_param_range
    vqe_cfg = VqeConfig(
        init=config.init,
        optimizer=config.optimizer,
        seed=config.seed,
        tolerance=config.tolerance,
        bounds=config.bounds,
    )
    opt_states = []
    for fp in problems:
        params = _project(
            rng.uniform(lo, hi, size=fp.circuit.param_count), config.bounds
        )
        opt_states.append(
            DescentState(
                params, vqe_cfg, config.optimizer is Optimizer.QUASI_NEWTON_BOUNDED
            )
        )
    histories: list[list[tuple[int, float]]] = [[] for _ in problems]
    states = [
        prepare(fp.circuit, st.params, config.init)
        for fp, st in zip(problems, opt_states)
    ]
    mf: dict[int, float] = {}
    for fp, st in zip(problems, states):
        mf.update(fragment_mean_fields(fp, st))
    multi = len(problems) > 1
    traces: list[list[float]] = []
    energy_trace: list[float] = []
    converged = False
    sweep = 0
    while sweep < config.max_sweeps:
        sweep += 1
        for a, (fp, opt) in enumerate(zip(problems, opt_states)):
            diag = effective_diagonal(fp, mf, gamma_f)
            history = histories[a]

            def f(theta, _diag=diag, _fp=fp, _history=history):
                state = prepare(_fp.circuit, theta, config.init)
                value = float(np.dot(probabilities(state), _diag))
                _history.append((len(_history), value))
                return value

            for _ in range(config.inner_iterations):
                opt.iterate(f, refresh=multi)
            if config.sum_constraint_enabled and fp.intra_pairs:
                opt.params = sum_constraint_project(
                    fp.circuit, opt.params, upper=config.bounds[1]
                )
            if config.boundary_kick_enabled:
                kicked = boundary_kick(
                    opt.params, config.bounds, config.kick_epsilon,
                    config.kick_temperature, rng,
                )
                if not np.array_equal(kicked, opt.params):
                    opt.params = kicked
                    opt.fx = None  # force re-evaluation next iteration
            states[a] = prepare(fp.circuit, opt.params, config.init)
            mf.update(fragment_mean_fields(fp, states[a]))
        energy = total_energy(problems, states, gamma_f)
        energy_trace.append(energy)
        traces.append(
            [
                -float(
                    np.dot(
                        probabilities(st),
                        effective_diagonal(fp, mf, gamma_f, include_child_out=False),
                    )
                )
                for fp, st in zip(problems, states)
            ]
        )
        if len(energy_trace) >= 3 and (
            abs(energy_trace[-1] - energy_trace[-2]) < config.tolerance
            and abs(energy_trace[-2] - energy_trace[-3]) < config.tolerance
        ):
            converged = True
            break
    return ScfResult(
        traces=traces,
        energy_trace=energy_trace,
        final_states=states,
        final_distribution=_product_distribution(problems, states, lattice.n),
        sweeps=sweep,
        converged=converged,
        fragment_histories=histories,
    )
