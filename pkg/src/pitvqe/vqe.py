"""Variational minimization of the diagonal cost over circuit parameters.

Three optimizers are provided, all self-contained: SPSA, gradient descent
with backtracking, and a bounded BFGS-style quasi-Newton method.  All runs
are deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .ansatz import ParamCircuit, prepare
from .hamiltonian import DiagonalCost
from .oracle import OracleResult, p_opt
from .simulator import InitKind, expect_diagonal, probabilities


class Optimizer(Enum):
    SPSA = "spsa"
    GRADIENT_DESCENT = "gd"
    QUASI_NEWTON_BOUNDED = "qnb"


@dataclass(frozen=True)
class SpsaGains:
    """Gain schedules a_k = a/(A+k+1)^alpha, c_k = c/(k+1)^gamma."""

    a: float | None = None  # None: calibrate for ~0.1 rad first step
    c: float = 0.2
    A: float | None = None  # None: 0.01 * iteration budget
    alpha: float = 0.602
    gamma: float = 0.101

    def __post_init__(self):
        if self.a is not None and self.a <= 0:
            raise ValueError("gain a must be positive")
        if self.c <= 0:
            raise ValueError("gain c must be positive")


@dataclass(frozen=True)
class VqeConfig:
    init: InitKind = InitKind.ALL_ZERO
    optimizer: Optimizer = Optimizer.QUASI_NEWTON_BOUNDED
    max_evaluations: int = 5000
    seed: int = 0
    init_param_range: tuple[float, float] = (-np.pi / 10, np.pi / 10)
    tolerance: float = 1e-6
    bounds: tuple[float, float] | None = None  # box bounds on every parameter
    spsa: SpsaGains = field(default_factory=SpsaGains)
    fd_step: float = 1e-5
    grad_tolerance: float = 1e-3  # stationarity check for the descent methods

    def __post_init__(self):
        lo, hi = self.init_param_range
        if not lo < hi:
            raise ValueError("init_param_range must satisfy lo < hi")
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be positive")


@dataclass
class VqeResult:
    best_params: np.ndarray
    history: list[tuple[int, float]]
    param_snapshots: list[np.ndarray]
    final_cost: float
    final_distribution: np.ndarray
    evaluations_used: int


class _BudgetExhausted(Exception):
    pass


class _Evaluator:
    """Counts evaluations, records the trace, and tracks the best point."""

    def __init__(self, circuit, h, init, budget):
        self.circuit, self.h, self.init = circuit, h, init
        self.budget = budget
        self.history: list[tuple[int, float]] = []
        self.snapshots: list[np.ndarray] = []
        self.best_cost = np.inf
        self.best_params: np.ndarray | None = None

    @property
    def used(self) -> int:
        return len(self.history)

    def __call__(self, params: np.ndarray) -> float:
        if self.used >= self.budget:
            raise _BudgetExhausted
        value = evaluate(self.circuit, params, self.h, self.init)
        if not np.isfinite(value):
            raise FloatingPointError(
                f"non-finite cost {value} at parameters {params!r}"
            )
        self.history.append((self.used, value))
        self.snapshots.append(np.array(params))
        if value < self.best_cost:
            self.best_cost = value
            self.best_params = np.array(params)
        return value


def evaluate(
    circuit: ParamCircuit, params: Sequence[float], h: DiagonalCost, init: InitKind
) -> float:
    """Expectation of the diagonal cost in the prepared state."""
    return expect_diagonal(prepare(circuit, params, init), h)


def gradient_fd(
    circuit: ParamCircuit,
    params: Sequence[float],
    h: DiagonalCost,
    init: InitKind,
    step: float = 1e-5,
) -> np.ndarray:
    """Central-difference gradient of evaluate() in parameter space."""
    if step <= 0:
        raise ValueError("finite-difference step must be positive")
    params = np.asarray(params, dtype=float)
    grad = np.empty_like(params)
    for k in range(params.size):
        e = np.zeros_like(params)
        e[k] = step
        grad[k] = (
            evaluate(circuit, params + e, h, init)
            - evaluate(circuit, params - e, h, init)
        ) / (2 * step)
    return grad


def spsa_step(
    params: np.ndarray,
    cost_fn: Callable[[np.ndarray], float],
    k: int,
    gains: SpsaGains,
    rng: np.random.Generator,
) -> np.ndarray:
    """One SPSA update: two evaluations along a random +-1 perturbation.

    ``gains`` must carry concrete a and A values (no None placeholders).
    """
    if gains.a is None or gains.A is None:
        raise ValueError("spsa_step needs resolved gains (a and A set)")
    if gains.c <= 0 or gains.a <= 0:
        raise ValueError("SPSA gains must be positive")
    ak = gains.a / (gains.A + k + 1) ** gains.alpha
    ck = gains.c / (k + 1) ** gains.gamma
    delta = rng.integers(0, 2, size=params.size) * 2.0 - 1.0
    e_plus = cost_fn(params + ck * delta)
    e_minus = cost_fn(params - ck * delta)
    ghat = (e_plus - e_minus) / (2.0 * ck) / delta
    return params - ak * ghat


def _window_converged(costs: list[float], tol: float, window: int = 10) -> bool:
    if len(costs) < window:
        return False
    tail = costs[-window:]
    return max(tail) - min(tail) < tol


def _project(params: np.ndarray, bounds: tuple[float, float] | None) -> np.ndarray:
    if bounds is None:
        return params
    return np.clip(params, bounds[0], bounds[1])


def _fd_gradient(f, params, step):
    grad = np.empty_like(params)
    for k in range(params.size):
        e = np.zeros_like(params)
        e[k] = step
        grad[k] = (f(params + e) - f(params - e)) / (2 * step)
    return grad


def _line_search(
    f, params, fx, direction, slope, bounds, t0=1.0, shrink=0.5, c1=1e-4, tries=60
):
    """Backtracking Armijo search along direction, projected into bounds.

    Returns (new_params, new_cost, accepted_step).
    """
    t = t0
    for _ in range(tries):
        cand = _project(params + t * direction, bounds)
        fc = f(cand)
        if fc <= fx + c1 * slope * t or fc < fx - 1e-15:
            return cand, fc, t
        t *= shrink
    return params, fx, t


class DescentState:
    """Stepwise gradient-descent / BFGS driver.

    One ``iterate`` call performs one accepted-iterate update (gradient,
    backtracking line search, curvature update).  Both the batch VQE loop and
    the per-fragment self-consistent sweep drive this same object, so a
    single-fragment decomposition reproduces plain VQE bit-for-bit.
    """

    def __init__(self, params, config: VqeConfig, quasi_newton: bool):
        self.params = _project(np.array(params, dtype=float), config.bounds)
        self.config = config
        self.quasi_newton = quasi_newton
        self.H = np.eye(self.params.size)
        self.fx: float | None = None
        self.grad: np.ndarray | None = None
        self.accepted: list[float] = []
        # gradient descent grows the trial step after successful searches so
        # flat directions with tiny gradients still make O(1) progress
        self.step_scale = 1.0

    def iterate(self, f, refresh: bool = False) -> bool:
        """Advance one iteration; returns True when converged.

        ``refresh`` re-evaluates cost and gradient at the current point first,
        for callers whose cost function changed since the previous call.
        """
        config = self.config
        if self.fx is None or refresh:
            self.fx = f(self.params)
            self.grad = _fd_gradient(f, self.params, config.fd_step)
            if not self.accepted:
                self.accepted.append(self.fx)
        if self.quasi_newton:
            direction = -self.H @ self.grad
            if np.dot(direction, self.grad) >= 0:
                self.H = np.eye(self.params.size)
                direction = -self.grad
        else:
            direction = -self.grad
        slope = float(np.dot(self.grad, direction))
        if abs(slope) < 1e-14 and np.linalg.norm(self.grad) < 1e-9:
            return True
        t0 = self.step_scale if not self.quasi_newton else 1.0
        new_params, new_fx, t = _line_search(
            f, self.params, self.fx, direction, slope, config.bounds, t0=t0
        )
        if not self.quasi_newton:
            self.step_scale = min(max(t * 4.0, 1.0), 1e15)
        if new_fx >= self.fx - 1e-15 and np.allclose(new_params, self.params):
            return True
        new_grad = _fd_gradient(f, new_params, config.fd_step)
        if self.quasi_newton:
            s = new_params - self.params
            y = new_grad - self.grad
            sy = float(np.dot(s, y))
            if sy > 1e-12:
                rho = 1.0 / sy
                I = np.eye(s.size)
                V = I - rho * np.outer(s, y)
                self.H = V @ self.H @ V.T + rho * np.outer(s, s)
        self.params, self.fx, self.grad = new_params, new_fx, new_grad
        self.accepted.append(new_fx)
        # a flat cost window alone can fire while crawling out of a saddle,
        # so also require approximate stationarity
        return _window_converged(self.accepted, config.tolerance) and bool(
            np.max(np.abs(self.grad)) < config.grad_tolerance
        )


def _descent_loop(f, params, config: VqeConfig, quasi_newton: bool):
    """Shared driver for gradient descent and the quasi-Newton method."""
    state = DescentState(params, config, quasi_newton)
    while not state.iterate(f):
        pass
    return state.params


def _spsa_loop(f, params, config: VqeConfig, rng: np.random.Generator):
    gains = config.spsa
    budget_iters = max(1, (config.max_evaluations - f.used) // 3)
    A = gains.A if gains.A is not None else 0.01 * budget_iters
    a = gains.a
    if a is None:
        # first-step calibration: aim the k=0 update at ~0.1 rad per parameter
        mags = []
        c0 = gains.c
        for _ in range(5):
            delta = rng.integers(0, 2, size=params.size) * 2.0 - 1.0
            diff = f(params + c0 * delta) - f(params - c0 * delta)
            mags.append(abs(diff) / (2.0 * c0))
        mean_mag = max(np.mean(mags), 1e-10)
        a = 0.1 * (A + 1) ** gains.alpha / mean_mag
    resolved = replace(gains, a=a, A=A)
    accepted = []
    k = 0
    while True:
        params = _project(spsa_step(params, f, k, resolved, rng), config.bounds)
        accepted.append(f(params))  # trace + best-point tracking at the iterate
        k += 1
        if _window_converged(accepted, config.tolerance):
            break
    return params


def run(circuit: ParamCircuit, h: DiagonalCost, config: VqeConfig) -> VqeResult:
    """Minimize the cost; deterministic given config.seed."""
    rng = np.random.default_rng(config.seed)
    lo, hi = config.init_param_range
    params = rng.uniform(lo, hi, size=circuit.param_count)
    params = _project(params, config.bounds)
    f = _Evaluator(circuit, h, config.init, config.max_evaluations)
    try:
        if config.optimizer is Optimizer.SPSA:
            _spsa_loop(f, params, config, rng)
        else:
            _descent_loop(
                f, params, config,
                quasi_newton=config.optimizer is Optimizer.QUASI_NEWTON_BOUNDED,
            )
    except _BudgetExhausted:
        pass
    if f.best_params is None:
        # budget of 0 useful evaluations cannot happen (max_evaluations >= 1),
        # but guard against an immediate exhaustion edge case anyway
        f.best_params, f.best_cost = params, evaluate(circuit, params, h, config.init)
    dist = probabilities(prepare(circuit, f.best_params, config.init))
    return VqeResult(
        best_params=f.best_params,
        history=f.history,
        param_snapshots=f.snapshots,
        final_cost=f.best_cost,
        final_distribution=dist,
        evaluations_used=f.used,
    )


def run_with_restarts(
    circuit: ParamCircuit,
    h: DiagonalCost,
    config: VqeConfig,
    oracle: OracleResult | None = None,
    restarts: int = 5,
    p_opt_threshold: float = 0.5,
) -> VqeResult:
    """Re-run with fresh seeds when the oracle says the run got stuck."""
    result = run(circuit, h, config)
    if oracle is None:
        return result
    best = result
    attempt = 0
    while p_opt(best.final_distribution, oracle) < p_opt_threshold and attempt < restarts:
        attempt += 1
        config = replace(config, seed=config.seed + 104729 * attempt)
        result = run(circuit, h, config)
        if result.final_cost < best.final_cost:
            best = result
    return best


@dataclass(frozen=True)
class OptimizerReport:
    optimizer: Optimizer
    evaluations_to_converge: int
    final_cost: float


def compare_optimizers(
    circuit: ParamCircuit,
    h: DiagonalCost,
    configs: Sequence[VqeConfig],
    oracle: OracleResult | None = None,
    restarts: int = 5,
) -> list[OptimizerReport]:
    """Run each config on the same problem and report convergence effort."""
    reports = []
    for config in configs:
        result = run_with_restarts(circuit, h, config, oracle=oracle, restarts=restarts)
        reports.append(
            OptimizerReport(
                optimizer=config.optimizer,
                evaluations_to_converge=result.evaluations_used,
                final_cost=result.final_cost,
            )
        )
    return reports


def profile_evolution(
    circuit: ParamCircuit,
    result: VqeResult,
    init: InitKind,
    checkpoints: Sequence[int],
) -> list[np.ndarray]:
    """Per-site excavation probabilities p(z_i = 1) at chosen evaluations."""
    out = []
    for cp in checkpoints:
        if not 0 <= cp < len(result.param_snapshots):
            raise ValueError(f"checkpoint {cp} outside recorded history")
        state = prepare(circuit, result.param_snapshots[cp], init)
        p = probabilities(state)
        n = circuit.n
        probs = np.empty(n)
        for q in range(n):
            mask = (np.arange(1 << n) >> q) & 1
            probs[q] = p[mask == 1].sum()
        out.append(probs)
    return out
