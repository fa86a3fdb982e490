"""Two-loop surrogate descent, the natural-gradient baseline, and traces.

The optimizer alternates an estimation phase (build the trigonometric
surrogate at the current reference from 2ν²+ν+1 simulated energy queries)
with a classical inner loop (natural-gradient steps on the surrogate until
the trust radius, a feedback deviation, or the step budget stops it), then
rebases the circuit reference and repeats.  The baseline takes conventional
natural-gradient steps on the true landscape at 2ν queries each.

Costs are tracked in gradient-step-equivalent units: one per baseline step,
two per estimation phase; raw query counts are tracked alongside.  All
noise draws come from counter-based RNG streams keyed by (noise seed, run
seed, iteration, channel), so re-runs and concurrent dispatch are
bit-reproducible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzCircuit, energy, energy_gradient
from .metric import qfi_exact, regularized_natural_direction
from .simulator import ground_energy
from .surrogate import (
    CircuitOracle,
    NoiseLevels,
    estimate_coefficients,
    eval_energy,
    eval_gradient,
    query_schedule,
)

HALF_PI = 0.5 * np.pi

# Applied to every per-query std so a vanishing reference gradient never
# requests infinitely many shots.
NOISE_FLOOR = 1e-8

TRACE_COLUMNS = (
    "phase",
    "outer",
    "inner",
    "cumulative_cost",
    "cumulative_raw_queries",
    "energy_true",
    "energy_model",
    "distance_to_ground",
)

# Inner steps stop early once the surrogate gradient is this flat; the
# remaining steps would move θ by less than rounding.
_STATIONARY_GRADIENT = 1e-13


class DivergenceError(RuntimeError):
    """Optimization produced a non-finite value; carries the partial trace."""

    def __init__(self, message: str, trace: "OptimizationTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class NoiseSpec:
    """Shot-noise switch and target relative gradient precision."""

    enabled: bool = False
    relative_gradient_precision: float = 0.1
    rng_seed: int = 0

    def __post_init__(self):
        if self.relative_gradient_precision <= 0.0:
            raise ValueError(
                f"relative gradient precision must be > 0, got "
                f"{self.relative_gradient_precision}"
            )
        if self.rng_seed < 0:
            raise ValueError(f"rng_seed must be non-negative, got {self.rng_seed}")


@dataclass(frozen=True)
class OptimizerConfig:
    """Step sizes, budgets, and inner-loop termination settings.

    ``feedback_period`` 0 disables the periodic device check; when on,
    ``similarity_feedback`` additionally compares the surrogate gradient
    direction against a (noisy) device parameter-shift gradient and aborts
    the inner loop when 1−f exceeds ``similarity_abort``.
    ``record_inner_every`` 0 keeps traces to outer/feedback records only.
    """

    step_size: float
    eta: float = 0.01
    max_outer: int = 50
    max_inner: int = 10_000
    trust_radius: float = 0.2
    feedback_period: int = 0
    feedback_tolerance: float = 1e-2
    convergence_threshold: float = 1e-3
    similarity_abort: float = 5e-2
    similarity_feedback: bool = False
    frozen_metric: bool = False
    record_inner_every: int = 1
    store_theta: bool = False
    max_workers: int | None = None

    def __post_init__(self):
        if self.step_size <= 0.0:
            raise ValueError(f"step_size must be > 0, got {self.step_size}")
        if self.eta < 0.0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        if not 0.0 < self.trust_radius < HALF_PI:
            raise ValueError(
                f"trust_radius must lie in (0, π/2), got {self.trust_radius}"
            )
        for name in ("max_outer", "max_inner"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("feedback_period", "record_inner_every"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("feedback_tolerance", "convergence_threshold", "similarity_abort"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class TraceRecord:
    phase: str  # outer | inner | feedback
    outer: int
    inner: int
    cumulative_cost: float
    cumulative_raw_queries: int
    energy_true: float
    energy_model: float | None
    distance_to_ground: float
    theta_snapshot: tuple | None = None


@dataclass
class OptimizationTrace:
    records: list[TraceRecord] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def append(self, record: TraceRecord) -> None:
        if self.records:
            last = self.records[-1]
            if (
                record.cumulative_cost < last.cumulative_cost
                or record.cumulative_raw_queries < last.cumulative_raw_queries
            ):
                raise ValueError("cumulative cost and query counts must not decrease")
        self.records.append(record)

    @property
    def final(self) -> TraceRecord:
        return self.records[-1]


def cost_to_reach(trace: OptimizationTrace, threshold: float) -> float | None:
    """Cumulative cost at the first record within ``threshold`` of ground."""
    for record in trace.records:
        if record.distance_to_ground < threshold:
            return record.cumulative_cost
    return None


def one_minus_f(g1, g2) -> float:
    """Directional error 1 − ⟨g1,g2⟩/(‖g1‖‖g2‖) ∈ [0, 2]; 0 if either is 0."""
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    n1 = float(np.linalg.norm(g1))
    n2 = float(np.linalg.norm(g2))
    if n1 == 0.0 or n2 == 0.0:
        return 0.0
    return 1.0 - float(np.dot(g1, g2)) / (n1 * n2)


def precision_policy(g_norm: float, nu: int, spec: NoiseSpec) -> NoiseLevels:
    """Per-class raw-query stds targeting a fixed relative gradient precision.

    The combined eB coefficient (two queries) gets std r·‖g‖/√ν, so each of
    its raw queries gets that over √2; the single-query eA/eC classes get
    the coarser r·‖g‖, and each of the four eD queries r·‖g‖/2.  Everything
    is floored at 1e-8.
    """
    if g_norm < 0.0:
        raise ValueError(f"gradient norm must be >= 0, got {g_norm}")
    r = spec.relative_gradient_precision
    eps_b = r * g_norm / np.sqrt(nu)
    eps = r * g_norm
    return NoiseLevels(
        sigma_a=max(eps, NOISE_FLOOR),
        sigma_b=max(eps_b / np.sqrt(2.0), NOISE_FLOOR),
        sigma_c=max(eps, NOISE_FLOOR),
        sigma_d=max(0.5 * eps, NOISE_FLOOR),
    )


def feedback_check(
    model,
    circuit: AnsatzCircuit,
    h,
    theta,
    noise: NoiseLevels | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """|device energy at θ₀+θ − surrogate energy|, one raw query.

    The device query is perturbed with the coarse (eA-class) std when noise
    levels are given; noiseless it measures the pure truncation defect,
    which vanishes for ν=1 where the surrogate is the full series.
    """
    device = energy(circuit, theta, h)
    if noise is not None:
        generator = rng if rng is not None else np.random.default_rng(0)
        device += noise.sigma_a * generator.standard_normal()
    return abs(device - eval_energy(model, theta))


def _stream(*key) -> np.random.Generator:
    return np.random.default_rng([int(k) for k in key])


def _distance(value: float, ground: float) -> float:
    return abs(value - ground)


def run_analytic_descent(
    circuit: AnsatzCircuit,
    h,
    config: OptimizerConfig,
    noise: NoiseSpec,
    rng_seed: int = 0,
) -> OptimizationTrace:
    """Alternate surrogate estimation and natural-gradient descent on it.

    Each outer iteration costs 2 units and 2ν²+ν+1 raw queries (plus any
    feedback queries); the inner loop preconditions the surrogate gradient
    with the exact metric at the displaced point (or the reference-point
    metric under ``frozen_metric``) and stops on the trust radius, feedback
    deviation, directional-similarity abort, stationarity, or ``max_inner``.
    Convergence is declared when the true energy is within
    ``convergence_threshold`` of the exact ground energy.
    """
    nu = circuit.num_parameters
    ground = ground_energy(h)
    trace = OptimizationTrace(
        metadata={
            "method": "analytic_descent",
            "rng_seed": rng_seed,
            "noise_enabled": noise.enabled,
            "noise_seed": noise.rng_seed,
            "relative_gradient_precision": noise.relative_gradient_precision,
            "noise_floor": NOISE_FLOOR,
            "metric": "exact_frozen_outer" if config.frozen_metric else "exact_per_step",
            "nu": nu,
            "ground_energy": ground,
            "exit": "budget",
        }
    )
    cost = 0.0
    raw = 0
    current = circuit
    zeros = np.zeros(nu)
    e_true = energy(current, zeros, h)
    trace.append(
        TraceRecord(
            "outer", 0, 0, cost, raw, e_true, None, _distance(e_true, ground),
            tuple(current.theta_ref) if config.store_theta else None,
        )
    )
    if _distance(e_true, ground) < config.convergence_threshold:
        trace.metadata["exit"] = "converged"
        return trace

    inner_exits = []
    for outer in range(1, config.max_outer + 1):
        g_reference = energy_gradient(current, zeros, h)
        g_norm = float(np.linalg.norm(g_reference))
        levels = precision_policy(g_norm, nu, noise) if noise.enabled else None
        model = estimate_coefficients(
            CircuitOracle(current, h),
            query_schedule(nu),
            levels,
            rng_seed=(noise.rng_seed, rng_seed, outer, 0),
            max_workers=config.max_workers,
        )
        raw += 2 * nu * nu + nu + 1
        cost += 2.0

        theta = zeros.copy()
        frozen = qfi_exact(current, theta) if config.frozen_metric else None
        exit_reason = "max_inner"
        inner_done = 0
        feedback_events = 0
        for inner in range(1, config.max_inner + 1):
            metric = frozen if frozen is not None else qfi_exact(current, theta)
            g_model = eval_gradient(model, theta)
            if float(np.max(np.abs(g_model))) < _STATIONARY_GRADIENT:
                exit_reason = "stationary"
                break
            direction = regularized_natural_direction(metric, config.eta, g_model)
            theta = theta - config.step_size * direction
            inner_done = inner
            if not np.all(np.isfinite(theta)):
                raise DivergenceError(
                    f"non-finite parameters at outer {outer} inner {inner}; "
                    f"step_size {config.step_size} diverged",
                    trace,
                )
            e_model = eval_energy(model, theta)
            if not np.isfinite(e_model):
                raise DivergenceError(
                    f"non-finite surrogate energy at outer {outer} inner {inner}",
                    trace,
                )
            if config.record_inner_every and inner % config.record_inner_every == 0:
                e_inner = energy(current, theta, h)
                trace.append(
                    TraceRecord(
                        "inner", outer, inner, cost, raw, e_inner, e_model,
                        _distance(e_inner, ground),
                        tuple(current.theta_ref + theta) if config.store_theta else None,
                    )
                )
            if float(np.max(np.abs(theta))) >= config.trust_radius:
                exit_reason = "trust_radius"
                break
            if config.feedback_period and inner % config.feedback_period == 0:
                feedback_events += 1
                deviation = feedback_check(
                    model, current, h, theta, levels,
                    _stream(noise.rng_seed, rng_seed, outer, 2, feedback_events),
                )
                raw += 1
                e_check = energy(current, theta, h)
                trace.append(
                    TraceRecord(
                        "feedback", outer, inner, cost, raw, e_check, e_model,
                        _distance(e_check, ground),
                        tuple(current.theta_ref + theta) if config.store_theta else None,
                    )
                )
                if deviation > config.feedback_tolerance:
                    exit_reason = "feedback"
                    break
                if config.similarity_feedback:
                    sigma = max(
                        noise.relative_gradient_precision * g_norm / np.sqrt(nu),
                        NOISE_FLOOR,
                    ) if noise.enabled else 0.0
                    device_grad = energy_gradient(current, theta, h)
                    if sigma > 0.0:
                        device_grad = device_grad + sigma * _stream(
                            noise.rng_seed, rng_seed, outer, 3, feedback_events
                        ).standard_normal(nu)
                    raw += 2 * nu
                    if one_minus_f(g_model, device_grad) > config.similarity_abort:
                        exit_reason = "similarity"
                        break
        inner_exits.append({"outer": outer, "reason": exit_reason, "steps": inner_done})

        current = current.rebased(theta)
        e_true = energy(current, zeros, h)
        if not np.isfinite(e_true):
            raise DivergenceError(f"non-finite energy after outer {outer}", trace)
        trace.append(
            TraceRecord(
                "outer", outer, inner_done, cost, raw, e_true,
                eval_energy(model, theta), _distance(e_true, ground),
                tuple(current.theta_ref) if config.store_theta else None,
            )
        )
        if _distance(e_true, ground) < config.convergence_threshold:
            trace.metadata["exit"] = "converged"
            break
    trace.metadata["inner_exits"] = inner_exits
    return trace


def run_natural_gradient(
    circuit: AnsatzCircuit,
    h,
    config: OptimizerConfig,
    noise: NoiseSpec,
    rng_seed: int = 0,
) -> OptimizationTrace:
    """Conventional natural-gradient baseline: 1 cost unit, 2ν queries/step.

    The per-step gradient is the exact parameter-shift gradient plus, when
    noise is on, an independent Gaussian of std r·‖g‖/√ν on every entry;
    ``max_outer`` caps the number of steps.
    """
    nu = circuit.num_parameters
    ground = ground_energy(h)
    trace = OptimizationTrace(
        metadata={
            "method": "natural_gradient",
            "rng_seed": rng_seed,
            "noise_enabled": noise.enabled,
            "noise_seed": noise.rng_seed,
            "relative_gradient_precision": noise.relative_gradient_precision,
            "noise_floor": NOISE_FLOOR,
            "metric": "exact_per_step",
            "nu": nu,
            "ground_energy": ground,
            "exit": "budget",
        }
    )
    cost = 0.0
    raw = 0
    theta = np.zeros(nu)
    e_true = energy(circuit, theta, h)
    trace.append(
        TraceRecord(
            "outer", 0, 0, cost, raw, e_true, None, _distance(e_true, ground),
            tuple(circuit.theta_ref + theta) if config.store_theta else None,
        )
    )
    if _distance(e_true, ground) < config.convergence_threshold:
        trace.metadata["exit"] = "converged"
        return trace

    for step in range(1, config.max_outer + 1):
        g = energy_gradient(circuit, theta, h)
        if noise.enabled:
            sigma = max(
                noise.relative_gradient_precision * float(np.linalg.norm(g))
                / np.sqrt(nu),
                NOISE_FLOOR,
            )
            g = g + sigma * _stream(
                noise.rng_seed, rng_seed, step, 1
            ).standard_normal(nu)
        metric = qfi_exact(circuit, theta)
        direction = regularized_natural_direction(metric, config.eta, g)
        theta = theta - config.step_size * direction
        cost += 1.0
        raw += 2 * nu
        if not np.all(np.isfinite(theta)):
            raise DivergenceError(
                f"non-finite parameters at step {step}; "
                f"step_size {config.step_size} diverged",
                trace,
            )
        e_true = energy(circuit, theta, h)
        if not np.isfinite(e_true):
            raise DivergenceError(f"non-finite energy at step {step}", trace)
        trace.append(
            TraceRecord(
                "outer", step, 0, cost, raw, e_true, None,
                _distance(e_true, ground),
                tuple(circuit.theta_ref + theta) if config.store_theta else None,
            )
        )
        if _distance(e_true, ground) < config.convergence_threshold:
            trace.metadata["exit"] = "converged"
            break
    return trace


def _format_float(value: float) -> str:
    return "%.17g" % value


def write_trace_csv(trace: OptimizationTrace, path) -> None:
    """Persist records in the fixed column order; model energy blank if absent."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(TRACE_COLUMNS)
        for r in trace.records:
            writer.writerow(
                [
                    r.phase,
                    r.outer,
                    r.inner,
                    _format_float(r.cumulative_cost),
                    r.cumulative_raw_queries,
                    _format_float(r.energy_true),
                    "" if r.energy_model is None else _format_float(r.energy_model),
                    _format_float(r.distance_to_ground),
                ]
            )


def read_trace_csv(path) -> OptimizationTrace:
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows or tuple(rows[0]) != TRACE_COLUMNS:
        raise ValueError(f"{path}: missing or wrong trace header")
    trace = OptimizationTrace()
    for number, row in enumerate(rows[1:], start=2):
        if len(row) != len(TRACE_COLUMNS):
            raise ValueError(f"{path}:{number}: expected {len(TRACE_COLUMNS)} fields")
        trace.append(
            TraceRecord(
                row[0],
                int(row[1]),
                int(row[2]),
                float(row[3]),
                int(row[4]),
                float(row[5]),
                None if row[6] == "" else float(row[6]),
                float(row[7]),
            )
        )
    return trace
