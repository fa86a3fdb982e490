"""Command-line front end: seeded experiments, scaling study, validation.

Experiments are described by flat INI files (sections [hamiltonian],
[ansatz], [optimizer], [noise], [run]) so that a run's sidecar metadata is
itself a config that reproduces the run bit-for-bit.  Subcommands:

  run            optimize each (method, seed), one trace CSV + sidecar per run
  scaling-study  model/gradient error vs displacement radius with slope fits
  validate       parse a Hamiltonian source and report basic facts
"""

from __future__ import annotations

import argparse
import configparser
import csv
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from .ansatz import build_hardware_efficient, energy, energy_gradient
from .descent import (
    DivergenceError,
    NoiseSpec,
    OptimizerConfig,
    one_minus_f,
    run_analytic_descent,
    run_natural_gradient,
    write_trace_csv,
)
from .pauli import parse_pauli_sum, spin_ring_hamiltonian
from .simulator import ground_energy
from .surrogate import (
    CircuitOracle,
    estimate_coefficients,
    eval_energy,
    eval_gradient,
    query_schedule,
)

# Named experiment presets; explicit config keys always win.
_PRESETS = {
    "spin-ring": {"step_size": 0.01, "ng_step_size": 0.01, "basis_state_init": True},
    "molecular": {"step_size": 0.001, "ng_step_size": 0.1, "basis_state_init": False},
}

_METHODS = ("analytic_descent", "natural_gradient", "both")

DEFAULT_DELTAS = tuple(np.geomspace(0.01, 0.3, 7))


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment description (one Hamiltonian source)."""

    hamiltonian_file: str | None
    spin_ring_n: int | None
    spin_ring_j: float
    omega_seed: int | None
    blocks: int
    method: str
    optimizer: OptimizerConfig
    ng_step_size: float
    ng_max_steps: int
    noise: NoiseSpec
    seeds: tuple
    output_dir: str
    preset: str | None
    init_params_file: str | None
    init_perturbation: float
    basis_state_init: bool

    def __post_init__(self):
        if (self.hamiltonian_file is None) == (self.spin_ring_n is None):
            raise ValueError(
                "config must name exactly one Hamiltonian source: "
                "a file or the spin-ring preset"
            )
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.ng_step_size <= 0.0:
            raise ValueError(f"ng_step_size must be > 0, got {self.ng_step_size}")
        if self.ng_max_steps < 1:
            raise ValueError(f"ng_max_steps must be >= 1, got {self.ng_max_steps}")
        if self.init_perturbation < 0.0:
            raise ValueError(
                f"init_perturbation must be >= 0, got {self.init_perturbation}"
            )


def load_experiment_config(
    path, method=None, output_dir=None, seeds=None
) -> ExperimentConfig:
    """Parse an INI experiment file; optional arguments override its values."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path) as handle:
        parser.read_file(handle, source=str(path))
    for name in ("hamiltonian", "ansatz", "optimizer", "noise", "run"):
        if not parser.has_section(name):
            parser.add_section(name)
    ham = parser["hamiltonian"]
    ansatz = parser["ansatz"]
    opt = parser["optimizer"]
    noise_sec = parser["noise"]
    run = parser["run"]

    preset = run.get("preset", fallback=None)
    if preset is not None:
        preset = preset.replace("_", "-")
        if preset not in _PRESETS:
            raise ValueError(
                f"unknown preset {preset!r}; known presets: {sorted(_PRESETS)}"
            )
    defaults = _PRESETS.get(preset, {})

    ham_preset = ham.get("preset", fallback=None)
    ham_file = ham.get("file", fallback=None)
    spin_ring_n = None
    if ham_preset is not None:
        if ham_preset.replace("_", "-") != "spin-ring":
            raise ValueError(f"unknown hamiltonian preset {ham_preset!r}")
        spin_ring_n = ham.getint("N", fallback=None)
        if spin_ring_n is None:
            raise ValueError("spin-ring preset requires N in [hamiltonian]")

    step_size = opt.getfloat("step_size", fallback=defaults.get("step_size", 0.01))
    optimizer = OptimizerConfig(
        step_size=step_size,
        eta=opt.getfloat("eta", fallback=0.01),
        max_outer=opt.getint("max_outer", fallback=40),
        max_inner=opt.getint("max_inner", fallback=10_000),
        trust_radius=opt.getfloat("trust_radius", fallback=0.2),
        feedback_period=opt.getint("feedback_period", fallback=0),
        feedback_tolerance=opt.getfloat("feedback_tolerance", fallback=0.01),
        convergence_threshold=opt.getfloat("convergence_threshold", fallback=1e-3),
        similarity_abort=opt.getfloat("similarity_abort", fallback=0.05),
        similarity_feedback=opt.getboolean("similarity_feedback", fallback=False),
        frozen_metric=opt.getboolean("frozen_metric", fallback=False),
        record_inner_every=opt.getint("record_inner_every", fallback=0),
        max_workers=opt.getint("max_workers", fallback=None),
    )

    seed_text = run.get("seeds", fallback="0") if seeds is None else seeds
    parsed_seeds = tuple(int(part) for part in str(seed_text).split(",") if part.strip())

    init_params_file = run.get("init_params", fallback=None)
    basis_default = defaults.get(
        "basis_state_init", spin_ring_n is not None and init_params_file is None
    )
    return ExperimentConfig(
        hamiltonian_file=ham_file,
        spin_ring_n=spin_ring_n,
        spin_ring_j=ham.getfloat("J", fallback=0.05),
        omega_seed=ham.getint("omega_seed", fallback=None),
        blocks=ansatz.getint("blocks", fallback=2),
        method=method or opt.get("method", fallback="both"),
        optimizer=optimizer,
        ng_step_size=opt.getfloat(
            "ng_step_size", fallback=defaults.get("ng_step_size", step_size)
        ),
        ng_max_steps=opt.getint("ng_max_steps", fallback=20_000),
        noise=NoiseSpec(
            enabled=noise_sec.getboolean("enabled", fallback=False),
            relative_gradient_precision=noise_sec.getfloat(
                "relative_gradient_precision", fallback=0.1
            ),
            rng_seed=noise_sec.getint("rng_seed", fallback=0),
        ),
        seeds=parsed_seeds,
        output_dir=output_dir or run.get("output_dir", fallback="runs"),
        preset=preset,
        init_params_file=init_params_file,
        init_perturbation=run.getfloat("init_perturbation", fallback=0.5),
        basis_state_init=run.getboolean("basis_state_init", fallback=basis_default),
    )


def build_hamiltonian(config: ExperimentConfig):
    """Resolve the config's Hamiltonian source to a PauliSum."""
    if config.hamiltonian_file is not None:
        if not os.path.exists(config.hamiltonian_file):
            raise FileNotFoundError(
                f"Hamiltonian file not found: {config.hamiltonian_file}"
            )
        with open(config.hamiltonian_file) as handle:
            return parse_pauli_sum(handle.read())
    omega = None
    if config.omega_seed is not None:
        omega = np.random.default_rng(config.omega_seed).uniform(
            -1.0, 1.0, config.spin_ring_n
        )
    return spin_ring_hamiltonian(config.spin_ring_n, config.spin_ring_j, omega)


def _basis_state_reference(h, circuit) -> np.ndarray:
    """π on the first-layer rotations of qubits that are down in the lowest
    diagonal basis state, so the circuit starts from that product state."""
    n = h.num_qubits
    dim = 2**n
    idx = np.arange(dim)
    diag = np.zeros(dim)
    for coeff, string in h.terms:
        if "X" in string.letters or "Y" in string.letters:
            continue
        mask = 0
        for q, letter in enumerate(string.letters):
            if letter == "Z":
                mask |= 1 << (n - 1 - q)
        parity = (np.bitwise_count(idx & mask) & 1).astype(float)
        diag += coeff * (1.0 - 2.0 * parity)
    best = int(np.argmin(diag))
    base = np.zeros(circuit.num_parameters)
    for q in range(n):
        if (best >> (n - 1 - q)) & 1:
            base[q] = np.pi
    return base


def initial_reference(config: ExperimentConfig, circuit, h) -> np.ndarray:
    """Seed-independent base point for the optimization (before perturbation)."""
    if config.init_params_file is not None:
        if not os.path.exists(config.init_params_file):
            raise FileNotFoundError(
                f"initial parameter file not found: {config.init_params_file}"
            )
        vec = np.loadtxt(config.init_params_file, ndmin=1, dtype=float)
        if vec.shape != (circuit.num_parameters,):
            raise ValueError(
                f"initial parameters must have length {circuit.num_parameters}, "
                f"got shape {vec.shape}"
            )
        return vec
    if config.basis_state_init:
        return _basis_state_reference(h, circuit)
    return np.zeros(circuit.num_parameters)


def _seed_perturbation(config: ExperimentConfig, seed: int, nu: int) -> np.ndarray:
    if config.init_perturbation == 0.0:
        return np.zeros(nu)
    rng = np.random.default_rng([config.noise.rng_seed, int(seed), 0, 4])
    return rng.uniform(-config.init_perturbation, config.init_perturbation, nu)


def _sidecar_path(csv_path: str) -> str:
    return os.path.splitext(csv_path)[0] + ".cfg"


def _write_sidecar(path, config: ExperimentConfig, method, seed, trace) -> None:
    parser = configparser.ConfigParser()
    ham = {}
    if config.hamiltonian_file is not None:
        ham["file"] = config.hamiltonian_file
    else:
        ham["preset"] = "spin-ring"
        ham["N"] = str(config.spin_ring_n)
        ham["J"] = repr(config.spin_ring_j)
        if config.omega_seed is not None:
            ham["omega_seed"] = str(config.omega_seed)
    parser["hamiltonian"] = ham
    parser["ansatz"] = {"blocks": str(config.blocks)}
    opt = config.optimizer
    optimizer = {
        "method": method,
        "step_size": repr(opt.step_size),
        "eta": repr(opt.eta),
        "max_outer": str(opt.max_outer),
        "max_inner": str(opt.max_inner),
        "trust_radius": repr(opt.trust_radius),
        "feedback_period": str(opt.feedback_period),
        "feedback_tolerance": repr(opt.feedback_tolerance),
        "convergence_threshold": repr(opt.convergence_threshold),
        "similarity_abort": repr(opt.similarity_abort),
        "similarity_feedback": str(opt.similarity_feedback),
        "frozen_metric": str(opt.frozen_metric),
        "record_inner_every": str(opt.record_inner_every),
        "ng_step_size": repr(config.ng_step_size),
        "ng_max_steps": str(config.ng_max_steps),
    }
    if opt.max_workers is not None:
        optimizer["max_workers"] = str(opt.max_workers)
    parser["optimizer"] = optimizer
    parser["noise"] = {
        "enabled": str(config.noise.enabled),
        "relative_gradient_precision": repr(config.noise.relative_gradient_precision),
        "rng_seed": str(config.noise.rng_seed),
    }
    run = {
        "seeds": str(seed),
        "output_dir": ".",
        "init_perturbation": repr(config.init_perturbation),
        "basis_state_init": str(config.basis_state_init),
    }
    if config.preset is not None:
        run["preset"] = config.preset
    if config.init_params_file is not None:
        run["init_params"] = config.init_params_file
    parser["run"] = run
    parser["trace"] = {
        "exit": str(trace.metadata.get("exit")),
        "ground_energy": repr(trace.metadata.get("ground_energy")),
        "final_distance_to_ground": repr(trace.final.distance_to_ground),
        "final_cumulative_cost": repr(trace.final.cumulative_cost),
        "final_cumulative_raw_queries": str(trace.final.cumulative_raw_queries),
    }
    with open(path, "w") as handle:
        parser.write(handle)


def cmd_run(config: ExperimentConfig) -> int:
    """Run every (method, seed) pair; write one trace CSV + sidecar each."""
    h = build_hamiltonian(config)
    circuit = build_hardware_efficient(h.num_qubits, config.blocks)
    base = initial_reference(config, circuit, h)
    os.makedirs(config.output_dir, exist_ok=True)
    methods = (
        ("analytic_descent", "natural_gradient")
        if config.method == "both"
        else (config.method,)
    )
    for method in methods:
        for seed in config.seeds:
            start = base + _seed_perturbation(config, seed, circuit.num_parameters)
            seeded_circuit = circuit.rebased(start)
            if method == "analytic_descent":
                trace = run_analytic_descent(
                    seeded_circuit, h, config.optimizer, config.noise, seed
                )
            else:
                ng_config = replace(
                    config.optimizer,
                    step_size=config.ng_step_size,
                    max_outer=config.ng_max_steps,
                )
                trace = run_natural_gradient(
                    seeded_circuit, h, ng_config, config.noise, seed
                )
            csv_path = os.path.join(config.output_dir, f"{method}_seed{seed}.csv")
            write_trace_csv(trace, csv_path)
            _write_sidecar(_sidecar_path(csv_path), config, method, seed, trace)
            final = trace.final
            print(
                f"{method} seed {seed}: distance_to_ground "
                f"{final.distance_to_ground:.6g}, cost {final.cumulative_cost:g}, "
                f"raw queries {final.cumulative_raw_queries}, "
                f"exit {trace.metadata['exit']}"
            )
    return 0


@dataclass(frozen=True)
class ScalingStudyResult:
    deltas: tuple
    rows: tuple  # (delta, energy_error, one_minus_f) per sample
    energy_slope: float
    energy_r2: float
    similarity_slope: float
    similarity_r2: float
    anchor: tuple  # absolute parameter vector the model was anchored at


def _loglog_fit(deltas, means) -> tuple[float, float]:
    x = np.log10(np.asarray(deltas, dtype=float))
    y = np.log10(np.maximum(np.asarray(means, dtype=float), 1e-18))
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(r2)


def scaling_study(
    circuit,
    h,
    deltas=DEFAULT_DELTAS,
    samples: int = 1000,
    rng_seed: int = 0,
    prelim_steps: int = 2000,
    prelim_step_size: float = 0.001,
) -> ScalingStudyResult:
    """Model error and gradient-direction error vs displacement radius.

    A fixed-length noiseless natural-gradient run first moves the reference
    near the optimum; a noiseless surrogate is then built there and compared
    with the simulator at ``samples`` uniform draws from the ∞-ball of each
    radius.  Log-log slopes are fitted through the per-radius mean errors.

    The preliminary run deliberately stops short of full convergence: the
    direction-error exponent is only visible while the anchor still carries a
    residual gradient that dominates the curvature term over the sampled
    radii.  At a fully converged anchor the exponent degrades towards 2.
    """
    prelim_config = OptimizerConfig(
        step_size=prelim_step_size,
        max_outer=prelim_steps,
        convergence_threshold=1e-12,
        record_inner_every=0,
        store_theta=True,
    )
    prelim = run_natural_gradient(circuit, h, prelim_config, NoiseSpec(enabled=False))
    theta_star = np.array(prelim.final.theta_snapshot)
    anchored = circuit.rebased(theta_star - np.asarray(circuit.theta_ref))
    model = estimate_coefficients(
        CircuitOracle(anchored, h), query_schedule(circuit.num_parameters)
    )
    rng = np.random.default_rng(rng_seed)
    rows = []
    energy_means = []
    similarity_means = []
    for delta in deltas:
        energy_errors = np.empty(samples)
        similarity_errors = np.empty(samples)
        for sample in range(samples):
            theta = rng.uniform(-delta, delta, circuit.num_parameters)
            err = abs(eval_energy(model, theta) - energy(anchored, theta, h))
            omf = max(
                one_minus_f(
                    eval_gradient(model, theta), energy_gradient(anchored, theta, h)
                ),
                0.0,
            )
            energy_errors[sample] = err
            similarity_errors[sample] = omf
            rows.append((float(delta), float(err), float(omf)))
        energy_means.append(float(np.mean(energy_errors)))
        similarity_means.append(float(np.mean(similarity_errors)))
    energy_slope, energy_r2 = _loglog_fit(deltas, energy_means)
    similarity_slope, similarity_r2 = _loglog_fit(deltas, similarity_means)
    return ScalingStudyResult(
        tuple(float(d) for d in deltas),
        tuple(rows),
        energy_slope,
        energy_r2,
        similarity_slope,
        similarity_r2,
        tuple(float(v) for v in theta_star),
    )


def cmd_scaling_study(
    config: ExperimentConfig, output_path, deltas=DEFAULT_DELTAS,
    samples: int = 1000, rng_seed: int = 0,
) -> int:
    h = build_hamiltonian(config)
    circuit = build_hardware_efficient(h.num_qubits, config.blocks)
    base = initial_reference(config, circuit, h)
    result = scaling_study(
        circuit.rebased(base), h, deltas=deltas, samples=samples, rng_seed=rng_seed
    )
    with open(output_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("delta", "energy_error", "one_minus_f"))
        for delta, err, omf in result.rows:
            writer.writerow(["%.17g" % delta, "%.17g" % err, "%.17g" % omf])
    print(
        f"energy_error slope: {result.energy_slope:.3f} (R^2 {result.energy_r2:.4f})"
    )
    print(
        f"one_minus_f slope: {result.similarity_slope:.3f} "
        f"(R^2 {result.similarity_r2:.4f})"
    )
    return 0


def cmd_validate(source, spin_ring_n=None, j=0.05, omega_seed=None) -> int:
    """Parse a Hamiltonian source and report qubits, terms, ground energy."""
    if (source is None) == (spin_ring_n is None):
        raise ValueError(
            "validate needs exactly one source: a file path or --spin-ring N"
        )
    if source is not None:
        if not os.path.exists(source):
            raise FileNotFoundError(f"Hamiltonian file not found: {source}")
        with open(source) as handle:
            h = parse_pauli_sum(handle.read())
    else:
        omega = None
        if omega_seed is not None:
            omega = np.random.default_rng(omega_seed).uniform(-1.0, 1.0, spin_ring_n)
        h = spin_ring_hamiltonian(spin_ring_n, j, omega)
    print(f"qubits: {h.num_qubits}")
    print(f"terms: {len(h.terms)}")
    print("hermitian: yes (real Pauli coefficients)")
    if h.num_qubits <= 12:
        print(f"ground_energy: {ground_energy(h):.12g}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="analytic-descent",
        description=(
            "Surrogate-based variational optimization benchmark: estimate a "
            "trigonometric model of the energy landscape, descend it with "
            "natural-gradient steps, and compare against the conventional "
            "natural-gradient baseline."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run seeded optimization experiments")
    run_p.add_argument("--config", required=True, help="experiment INI file")
    run_p.add_argument("--method", choices=_METHODS, default=None)
    run_p.add_argument("--output-dir", default=None)
    run_p.add_argument("--seeds", default=None, help="comma-separated integers")

    study_p = sub.add_parser(
        "scaling-study", help="model error vs displacement radius"
    )
    study_p.add_argument("--config", required=True, help="experiment INI file")
    study_p.add_argument("--output", required=True, help="output CSV path")
    study_p.add_argument("--samples", type=int, default=1000)
    study_p.add_argument(
        "--deltas", default=None, help="comma-separated radii (default 0.01..0.3)"
    )
    study_p.add_argument("--rng-seed", type=int, default=0)

    val_p = sub.add_parser("validate", help="inspect a Hamiltonian source")
    val_p.add_argument("source", nargs="?", default=None, help="Hamiltonian text file")
    val_p.add_argument("--spin-ring", type=int, default=None, metavar="N")
    val_p.add_argument("--J", type=float, default=0.05)
    val_p.add_argument("--omega-seed", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = load_experiment_config(
                args.config,
                method=args.method,
                output_dir=args.output_dir,
                seeds=args.seeds,
            )
            return cmd_run(config)
        if args.command == "scaling-study":
            config = load_experiment_config(args.config)
            deltas = DEFAULT_DELTAS
            if args.deltas is not None:
                deltas = tuple(
                    float(part) for part in args.deltas.split(",") if part.strip()
                )
            return cmd_scaling_study(
                config, args.output, deltas=deltas,
                samples=args.samples, rng_seed=args.rng_seed,
            )
        return cmd_validate(
            args.source, spin_ring_n=args.spin_ring, j=args.J,
            omega_seed=args.omega_seed,
        )
    except (ValueError, OSError, DivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
