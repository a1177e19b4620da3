"""Nested architecture and weight search.

An outer swarm explores the hidden-layer width on a continuous scalar; every
architecture it proposes is scored by running a fresh inner swarm over that
network's weights and taking the best mean squared error found. The inner
optimizer comes in three flavors:

* ``pso_pso``         - plain swarm on the weights
* ``pso_pso_sa``      - annealed acceptance records each particle's bad
                        experiences, velocity rule unchanged
* ``pso_improved_pso_sa`` - annealed acceptance plus a repulsion term that
                        pushes particles away from their recorded bad point
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import pso
from .anneal import AnnealConfig, Temperature, cool, sa_accept, update_velocity_improved
from .dataset import Dataset
from .errors import ConfigError
from .mlp import Topology, WeightVector, mse_fitness
from .pso import PsoConfig


class Algorithm(Enum):
    PSO_PSO = "pso_pso"
    PSO_PSO_SA = "pso_pso_sa"
    PSO_IMPROVED_PSO_SA = "pso_improved_pso_sa"


def default_outer_pso() -> PsoConfig:
    """Architecture-swarm defaults: 20 particles, 15 iterations, box [7, 30]."""
    return PsoConfig(
        swarm_size=20,
        max_iterations=15,
        space_low=7.0,
        space_high=30.0,
    )


def default_inner_pso() -> PsoConfig:
    """Weight-swarm defaults: 50 particles, 2000 iterations, box [-2, 2]."""
    return PsoConfig(
        swarm_size=50,
        max_iterations=2000,
        space_low=-2.0,
        space_high=2.0,
    )


@dataclass
class TrainerConfig:
    """Both swarm configurations plus the annealing schedule and variant choice."""

    outer: PsoConfig = field(default_factory=default_outer_pso)
    inner: PsoConfig = field(default_factory=default_inner_pso)
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    algorithm: Algorithm = Algorithm.PSO_IMPROVED_PSO_SA
    hidden_low: int = 7
    hidden_high: int = 30

    def __post_init__(self):
        if self.hidden_low < 1:
            raise ConfigError("hidden_low must be >= 1")
        if self.hidden_low > self.hidden_high:
            raise ConfigError("hidden_low must be <= hidden_high")
        # Keep the architecture swarm's box glued to the hidden bounds so a
        # changed bound cannot leave the outer swarm searching the wrong range.
        lo, hi = float(self.hidden_low), float(self.hidden_high)
        if (self.outer.space_low, self.outer.space_high) != (lo, hi):
            self.outer = replace(self.outer, space_low=lo, space_high=hi, v_max=None)


@dataclass
class ArchitectureParticle:
    """Scalar-position particle whose position encodes a hidden-neuron count."""

    position: float
    velocity: float
    pbest_position: float
    pbest_fitness: float


@dataclass
class TrainedModel:
    """Best network found by one training run.

    ``trace`` rows are (outer_iter, inner_iter, hidden_count, best_mse) where
    best_mse is the best error seen anywhere in the run up to that point, so
    the sequence never increases.
    """

    topology: Topology
    weights: WeightVector
    train_mse: float
    trace: list[tuple[int, int, int, float]]


def decode_architecture(position: float, hidden_low: int, hidden_high: int) -> int:
    """Round half-up to the nearest integer, clamped into the hidden bounds."""
    if hidden_low > hidden_high:
        raise ValueError("hidden_low must be <= hidden_high")
    return int(min(max(math.floor(position + 0.5), hidden_low), hidden_high))


def derive_seed(base_seed: int, *indices: int) -> int:
    """Deterministic child seed from a base seed and loop indices."""
    out = base_seed
    for i in indices:
        out = out * 1_000_003 + i + 1
    return out


def _run_annealed(config: PsoConfig, anneal: AnnealConfig, c3: float, dimension: int, fitness):
    """Weight swarm with annealed bad-experience bookkeeping.

    Mirrors the plain swarm loop exactly, with two additions per iteration:
    a worsening particle rolls the acceptance gate and, when it fires, its
    current point becomes the recorded bad experience; and the temperature
    cools once after each particle sweep. A uniform draw is consumed only on
    worsening evaluations, so improving and worsening paths use the random
    stream differently. The velocity rule always draws r3, even when c3 = 0,
    so the two annealed variants walk identical random streams.
    """
    state = pso.init_swarm(config, dimension, fitness)
    temperature = Temperature(anneal.t0)
    trace = []
    for _ in range(config.max_iterations):
        for particle in state.particles:
            fit = pso._checked_fitness(fitness, particle.position)
            if fit < particle.pbest_fitness:
                particle.pbest_fitness = fit
                particle.pbest_position = particle.position.copy()
            else:
                delta_e = fit - particle.last_fitness
                if delta_e > 0:
                    u = float(state.rng.uniform())
                    if sa_accept(delta_e, temperature.current, anneal.k_const, u):
                        particle.pworst_position = particle.position.copy()
                        particle.pworst_fitness = fit
            particle.last_fitness = fit
        temperature = cool(temperature, anneal.frac)
        pso._refresh_gbest(state)
        w = state.inertia
        for particle in state.particles:
            r1 = state.rng.uniform(size=dimension)
            r2 = state.rng.uniform(size=dimension)
            r3 = state.rng.uniform(size=dimension)
            particle.velocity = update_velocity_improved(
                particle, state.gbest_position, w, config.c1, config.c2, c3,
                r1, r2, r3, config.v_max,
            )
            particle.position = pso.update_position(particle.position, particle.velocity, config)
        state.iteration += 1
        state.inertia = config.w0 * config.w_decay**state.iteration
        trace.append(state.gbest_fitness)
    return state.gbest_position.copy(), state.gbest_fitness, trace


def train_weights(topology: Topology, dataset: Dataset, config: TrainerConfig, seed: int):
    """Optimize one fixed architecture's weights.

    Returns (weights, best mse, per-iteration best-mse trace). The search box
    and budget come from ``config.inner``; ``seed`` overrides the inner seed
    so nested runs stay reproducible.
    """
    if dataset.n_rows == 0:
        raise ValueError("cannot train on an empty dataset")
    if topology.n_inputs != dataset.n_features:
        raise ValueError(
            f"topology expects {topology.n_inputs} inputs, dataset has {dataset.n_features}"
        )
    inner = replace(config.inner, seed=seed)

    def fitness(weights):
        return mse_fitness(topology, weights, dataset)

    if config.algorithm is Algorithm.PSO_PSO:
        position, best, trace = pso.run(inner, topology.n_params, fitness)
    else:
        c3 = config.anneal.c3 if config.algorithm is Algorithm.PSO_IMPROVED_PSO_SA else 0.0
        position, best, trace = _run_annealed(inner, config.anneal, c3, topology.n_params, fitness)
    return WeightVector(topology, position), best, trace


def evaluate_architecture(hidden: int, dataset: Dataset, config: TrainerConfig, seed: int) -> float:
    """Best inner mse for one hidden-neuron count; the outer swarm's fitness."""
    if not config.hidden_low <= hidden <= config.hidden_high:
        raise ValueError(
            f"hidden count {hidden} outside [{config.hidden_low}, {config.hidden_high}]"
        )
    topology = Topology(dataset.n_features, hidden)
    _, best, _ = train_weights(topology, dataset, config, seed)
    return best


def train(dataset: Dataset, config: TrainerConfig, seed: int) -> TrainedModel:
    """Full nested search over architectures and weights.

    Every architecture evaluation spins up a fresh inner swarm with a seed
    derived from (seed, outer iteration, particle index), so a rerun with the
    same arguments reproduces the model bit for bit while distinct
    evaluations still explore different weight initializations.
    """
    if dataset.n_rows == 0:
        raise ValueError("cannot train on an empty dataset")
    outer = config.outer
    rng = np.random.default_rng(seed)
    particles = []
    for _ in range(outer.swarm_size):
        particles.append(
            ArchitectureParticle(
                position=float(rng.uniform(outer.space_low, outer.space_high)),
                velocity=float(rng.uniform(-outer.v_max, outer.v_max)),
                pbest_position=0.0,
                pbest_fitness=math.inf,
            )
        )

    gbest_position = math.inf
    gbest_fitness = math.inf
    best_topology = None
    best_weights = None
    best_mse = math.inf
    trace: list[tuple[int, int, int, float]] = []
    w = outer.w0

    for outer_iter in range(outer.max_iterations):
        for index, arch in enumerate(particles):
            hidden = decode_architecture(arch.position, config.hidden_low, config.hidden_high)
            topology = Topology(dataset.n_features, hidden)
            weights, run_best, run_trace = train_weights(
                topology, dataset, config, derive_seed(seed, outer_iter, index)
            )
            running = best_mse
            for inner_iter, value in enumerate(run_trace):
                if value < running:
                    running = value
                trace.append((outer_iter, inner_iter, hidden, running))
            if run_best < best_mse:
                best_mse = run_best
                best_topology = topology
                best_weights = weights
            if run_best < arch.pbest_fitness:
                arch.pbest_fitness = run_best
                arch.pbest_position = arch.position
        for arch in particles:
            if arch.pbest_fitness < gbest_fitness:
                gbest_fitness = arch.pbest_fitness
                gbest_position = arch.pbest_position
        for arch in particles:
            r1 = float(rng.uniform())
            r2 = float(rng.uniform())
            velocity = (
                w * arch.velocity
                + outer.c1 * r1 * (arch.pbest_position - arch.position)
                + outer.c2 * r2 * (gbest_position - arch.position)
            )
            arch.velocity = float(np.clip(velocity, -outer.v_max, outer.v_max))
            arch.position = float(
                np.clip(arch.position + arch.velocity, outer.space_low, outer.space_high)
            )
        w = outer.w0 * outer.w_decay ** (outer_iter + 1)

    return TrainedModel(best_topology, best_weights, best_mse, trace)
