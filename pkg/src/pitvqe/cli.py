"""Experiment runner: solve, decompose, oracle, compare-optimizers, sample.

Every mode resolves its settings, runs the experiment, prints a one-line
summary, and (with --out) writes plot-ready CSVs plus a run.meta file that
records the resolved settings.  Identical settings and seed reproduce the
output files byte for byte.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np

from . import BUNDLED_INSTANCES, bundled_instance_path
from .ansatz import build_circuit, prepare
from .decomposition import (
    Partition,
    ScfConfig,
    load_partition,
    partition_horizontal,
    scf_run,
)
from .hamiltonian import DiagonalCost, penalty_heuristic
from .lattice import InstanceError, PitLattice, load_instance
from .oracle import enumerate_lattice, p_opt, violation_probability
from .sampling import (
    ReadoutModel,
    bhattacharyya,
    corrupt_counts,
    counts_to_csv,
    distribution_to_csv,
    identity_model,
    mitigate,
    sample,
)
from .simulator import InitKind, probabilities
from .vqe import Optimizer, VqeConfig, compare_optimizers, run_with_restarts

INITS = {"zero": InitKind.ALL_ZERO, "one": InitKind.ALL_ONE,
         "plus": InitKind.SUPERPOSITION}
OPTIMIZERS = {"spsa": Optimizer.SPSA, "gd": Optimizer.GRADIENT_DESCENT,
              "qnb": Optimizer.QUASI_NEWTON_BOUNDED}


class UserError(Exception):
    """Bad flags or unreadable input; maps to exit code 1."""


def _resolve_instance(spec: str) -> tuple[str, PitLattice]:
    if os.path.exists(spec):
        return spec, load_instance(spec)
    if spec in BUNDLED_INSTANCES:
        path = bundled_instance_path(spec)
        return str(path), load_instance(path)
    raise UserError(f"instance file not found: {spec}")


def _resolve_gamma(text: str, lattice: PitLattice) -> Fraction:
    if text == "auto":
        return penalty_heuristic(lattice)
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UserError(f"--gamma must be a rational like 53/3 or 'auto', got {text!r}")


def _resolve_partition(spec: str, lattice: PitLattice) -> Partition:
    if spec == "horizontal":
        return partition_horizontal(lattice)
    if not os.path.exists(spec):
        raise UserError(f"partition file not found: {spec}")
    return load_partition(spec, lattice)


def _resolve_noise(spec: str, n: int) -> ReadoutModel | None:
    """Noise file: one line ``q<i> p10 p01`` per qubit; unlisted qubits are clean."""
    if spec == "none":
        return None
    if not os.path.exists(spec):
        raise UserError(f"noise model file not found: {spec}")
    mats = [np.eye(2) for _ in range(n)]
    with open(spec, encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.split("#", 1)[0].strip()
            if not stripped:
                continue
            parts = stripped.split()
            try:
                if len(parts) != 3 or not parts[0].startswith("q"):
                    raise ValueError
                qubit = int(parts[0][1:])
                p10, p01 = float(parts[1]), float(parts[2])
            except ValueError:
                raise UserError(
                    f"{spec}:{lineno}: expected 'q<i> p10 p01', got {stripped!r}"
                )
            if not 0 <= qubit < n:
                raise UserError(f"{spec}:{lineno}: qubit {qubit} out of range")
            mats[qubit] = np.array([[1.0 - p01, p10], [p01, 1.0 - p10]])
    return ReadoutModel(tuple(mats))


class _OutDir:
    def __init__(self, path: str | None):
        self.path = path
        if path is not None:
            os.makedirs(path, exist_ok=True)

    def write(self, name: str, text: str) -> None:
        if self.path is None:
            return
        with open(os.path.join(self.path, name), "w", encoding="ascii") as fh:
            fh.write(text)

    def write_meta(self, settings: dict) -> None:
        lines = [f"{k}={settings[k]}" for k in sorted(settings)]
        self.write("run.meta", "\n".join(lines) + "\n")


def _trace_csv(history) -> str:
    lines = ["evaluation,cost"]
    for evaluation, cost in history:
        lines.append(f"{evaluation},{cost:.12g}")
    return "\n".join(lines) + "\n"


def _solve_config(args, optimizer: Optimizer) -> VqeConfig:
    return VqeConfig(
        init=INITS[args.init],
        optimizer=optimizer,
        max_evaluations=args.max_evals,
        seed=args.seed,
    )


def _cmd_oracle(args) -> int:
    path, lattice = _resolve_instance(args.instance)
    gamma = _resolve_gamma(args.gamma, lattice)
    oracle = enumerate_lattice(lattice, gamma)
    out = _OutDir(args.out)
    out.write_meta({"mode": "oracle", "instance": path, "gamma": gamma})
    out.write(
        "oracle.csv",
        "p_opt_value,ground_cost,optimal_count\n"
        f"{oracle.p_opt_value},{oracle.ground_cost},{len(oracle.optimal_set)}\n",
    )
    print(f"P_opt={oracle.p_opt_value} optimal_count={len(oracle.optimal_set)}")
    return 0


def _cmd_solve(args) -> int:
    path, lattice = _resolve_instance(args.instance)
    gamma = _resolve_gamma(args.gamma, lattice)
    h = DiagonalCost(lattice, gamma)
    circuit = build_circuit(lattice)
    oracle = enumerate_lattice(lattice, gamma)
    config = _solve_config(args, OPTIMIZERS[args.optimizer])
    result = run_with_restarts(circuit, h, config, oracle, restarts=args.restarts)
    popt = p_opt(result.final_distribution, oracle)
    out = _OutDir(args.out)
    out.write_meta({
        "mode": "solve", "instance": path, "gamma": gamma, "init": args.init,
        "optimizer": args.optimizer, "seed": args.seed,
        "max_evals": args.max_evals, "restarts": args.restarts,
    })
    out.write("trace.csv", _trace_csv(result.history))
    out.write("distribution.csv",
              distribution_to_csv(result.final_distribution, lattice.n))
    print(f"P_opt={oracle.p_opt_value} p_opt={popt:.3f}")
    return 0


def _cmd_compare(args) -> int:
    path, lattice = _resolve_instance(args.instance)
    gamma = _resolve_gamma(args.gamma, lattice)
    h = DiagonalCost(lattice, gamma)
    circuit = build_circuit(lattice)
    oracle = enumerate_lattice(lattice, gamma)
    configs = [_solve_config(args, opt) for opt in OPTIMIZERS.values()]
    reports = compare_optimizers(circuit, h, configs, oracle, restarts=args.restarts)
    out = _OutDir(args.out)
    out.write_meta({
        "mode": "compare-optimizers", "instance": path, "gamma": gamma,
        "init": args.init, "seed": args.seed, "max_evals": args.max_evals,
        "restarts": args.restarts,
    })
    lines = ["optimizer,evaluations_to_converge,final_cost"]
    for report in reports:
        lines.append(
            f"{report.optimizer.value},{report.evaluations_to_converge},"
            f"{report.final_cost:.12g}"
        )
        print(f"{report.optimizer.value}: evaluations="
              f"{report.evaluations_to_converge} final_cost={report.final_cost:.6f}")
    out.write("report.csv", "\n".join(lines) + "\n")
    return 0


def _cmd_decompose(args) -> int:
    path, lattice = _resolve_instance(args.instance)
    gamma = _resolve_gamma(args.gamma, lattice)
    partition = _resolve_partition(args.partition, lattice)
    if OPTIMIZERS[args.optimizer] is Optimizer.SPSA:
        raise UserError("decompose supports --optimizer gd or qnb")
    config = ScfConfig(
        init=INITS[args.init],
        optimizer=OPTIMIZERS[args.optimizer],
        seed=args.seed,
    )
    result = scf_run(lattice, partition, gamma, config)
    oracle = enumerate_lattice(lattice, gamma)
    popt = p_opt(result.final_distribution, oracle)
    out = _OutDir(args.out)
    out.write_meta({
        "mode": "decompose", "instance": path, "gamma": gamma,
        "partition": args.partition, "init": args.init,
        "optimizer": args.optimizer, "seed": args.seed,
    })
    lines = ["sweep,fragment,negative_cost"]
    for sweep, row in enumerate(result.traces, start=1):
        for fragment, value in enumerate(row):
            lines.append(f"{sweep},{fragment},{value:.12g}")
    out.write("fragments.csv", "\n".join(lines) + "\n")
    out.write("distribution.csv",
              distribution_to_csv(result.final_distribution, lattice.n))
    print(f"P_opt={oracle.p_opt_value} p_opt={popt:.3f} "
          f"sweeps={result.sweeps} energy={result.energy_trace[-1]:.6f}")
    return 0


def _cmd_sample(args) -> int:
    path, lattice = _resolve_instance(args.instance)
    gamma = _resolve_gamma(args.gamma, lattice)
    h = DiagonalCost(lattice, gamma)
    circuit = build_circuit(lattice)
    oracle = enumerate_lattice(lattice, gamma)
    config = _solve_config(args, OPTIMIZERS[args.optimizer])
    result = run_with_restarts(circuit, h, config, oracle, restarts=args.restarts)
    state = prepare(circuit, result.best_params, INITS[args.init])
    counts = sample(state, args.shots, args.seed)
    model = _resolve_noise(args.noise, lattice.n)
    if model is not None:
        counts = corrupt_counts(counts, model, args.seed + 1)
    dist = counts.to_distribution(lattice.n)
    out = _OutDir(args.out)
    out.write_meta({
        "mode": "sample", "instance": path, "gamma": gamma, "init": args.init,
        "optimizer": args.optimizer, "seed": args.seed, "shots": args.shots,
        "noise": args.noise, "mitigate": args.mitigate,
        "max_evals": args.max_evals, "restarts": args.restarts,
    })
    out.write("counts.csv", counts_to_csv(counts, lattice.n))
    out.write("distribution.csv", distribution_to_csv(dist, lattice.n))
    exact = probabilities(state)
    summary = (f"P_opt={oracle.p_opt_value} p_opt={p_opt(dist, oracle):.3f} "
               f"p_v={violation_probability(dist, lattice):.4f} "
               f"d={bhattacharyya(dist, exact):.4f}")
    if args.mitigate:
        mitigated = mitigate(dist, model if model is not None
                             else identity_model(lattice.n))
        out.write("mitigated.csv", distribution_to_csv(mitigated, lattice.n))
        summary += (f" p_opt_mit={p_opt(mitigated, oracle):.3f} "
                    f"p_v_mit={violation_probability(mitigated, lattice):.4f} "
                    f"d_mit={bhattacharyya(mitigated, exact):.4f}")
    print(summary)
    return 0


def _add_common(parser, *, gamma=True):
    parser.add_argument("--instance", required=True,
                        help="instance file path or bundled name")
    if gamma:
        parser.add_argument("--gamma", default="auto",
                            help="rational penalty like 53/3, or 'auto'")
    parser.add_argument("--out", default=None, help="output directory for CSVs")


def _add_solver_flags(parser):
    parser.add_argument("--init", choices=sorted(INITS), default="zero")
    parser.add_argument("--optimizer", choices=sorted(OPTIMIZERS), default="qnb")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-evals", type=int, default=5000)
    parser.add_argument("--restarts", type=int, default=5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pitvqe",
        description="Variational solver for 2D open-pit profile optimization",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    p = sub.add_parser("oracle", help="exact enumeration of the instance")
    _add_common(p)
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("solve", help="run the variational solver")
    _add_common(p)
    _add_solver_flags(p)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("compare-optimizers",
                       help="run spsa, gd and qnb on the same problem")
    _add_common(p)
    _add_solver_flags(p)
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("decompose", help="mean-field fragment solver")
    _add_common(p)
    p.add_argument("--partition", default="horizontal",
                   help="'horizontal' or a partition file")
    p.add_argument("--init", choices=sorted(INITS), default="plus")
    p.add_argument("--optimizer", choices=("gd", "qnb"), default="gd")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_decompose)

    p = sub.add_parser("sample", help="finite shots, optional noise/mitigation")
    _add_common(p)
    _add_solver_flags(p)
    p.add_argument("--shots", type=int, default=8192)
    p.add_argument("--noise", default="none",
                   help="'none' or a noise model file (q<i> p10 p01 lines)")
    p.add_argument("--mitigate", action="store_true")
    p.set_defaults(fn=_cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (UserError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FloatingPointError, ResourceWarning, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
