"""Global-best particle swarm over a bounded box, with clamped velocities.

Minimization convention throughout: lower fitness is better. The inertia
weight decays geometrically, so late iterations drift mostly on the pull
toward personal and swarm bests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericError


@dataclass
class PsoConfig:
    """Swarm parameters. ``v_max`` defaults to 20% of the box width."""

    swarm_size: int = 50
    max_iterations: int = 2000
    c1: float = 1.4960
    c2: float = 1.4960
    w0: float = 0.8
    w_decay: float = 0.9
    space_low: float = -2.0
    space_high: float = 2.0
    v_max: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 1:
            raise ConfigError("swarm_size must be >= 1")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.c1 < 0:
            raise ConfigError("c1 must be >= 0")
        if self.c2 < 0:
            raise ConfigError("c2 must be >= 0")
        if not 0 < self.w_decay <= 1:
            raise ConfigError("w_decay must be in (0, 1]")
        if not self.space_low < self.space_high:
            raise ConfigError("space_low must be < space_high")
        if self.v_max is None:
            self.v_max = 0.2 * (self.space_high - self.space_low)
        if self.v_max <= 0:
            raise ConfigError("v_max must be > 0")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")


@dataclass
class Particle:
    """One candidate solution with its best and worst personal records.

    ``pworst_*`` is only consulted by the repulsion velocity rule; the plain
    swarm carries it untouched. ``last_fitness`` is the value seen at the
    previous evaluation, used by the annealed variants to size a worsening.
    """

    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_fitness: float
    pworst_position: np.ndarray
    pworst_fitness: float
    last_fitness: float


@dataclass
class SwarmState:
    """Whole-swarm snapshot between iterations."""

    particles: list[Particle]
    gbest_position: np.ndarray
    gbest_fitness: float
    iteration: int
    inertia: float
    rng: np.random.Generator = field(repr=False)


def _checked_fitness(fitness, position) -> float:
    value = float(fitness(position))
    if not np.isfinite(value):
        raise NumericError(f"fitness returned non-finite value {value!r} at {position!r}")
    return value


def init_swarm(config: PsoConfig, dimension: int, fitness) -> SwarmState:
    """Place particles uniformly in the box and evaluate their starting points."""
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(config.seed)
    particles = []
    for _ in range(config.swarm_size):
        position = rng.uniform(config.space_low, config.space_high, size=dimension)
        velocity = rng.uniform(-config.v_max, config.v_max, size=dimension)
        fit = _checked_fitness(fitness, position)
        particles.append(
            Particle(
                position=position,
                velocity=velocity,
                pbest_position=position.copy(),
                pbest_fitness=fit,
                pworst_position=position.copy(),
                pworst_fitness=fit,
                last_fitness=fit,
            )
        )
    best = min(range(len(particles)), key=lambda i: particles[i].pbest_fitness)
    return SwarmState(
        particles=particles,
        gbest_position=particles[best].pbest_position.copy(),
        gbest_fitness=particles[best].pbest_fitness,
        iteration=0,
        inertia=config.w0,
        rng=rng,
    )


def update_velocity(particle: Particle, gbest, w: float, config: PsoConfig, r1, r2):
    """Inertia plus cognitive and social pulls, clamped to [-v_max, v_max]."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    x = particle.position
    if not (r1.shape == r2.shape == x.shape == particle.velocity.shape):
        raise ValueError("velocity update operands must share one dimension")
    v = (
        w * particle.velocity
        + config.c1 * r1 * (particle.pbest_position - x)
        + config.c2 * r2 * (np.asarray(gbest, dtype=float) - x)
    )
    return np.clip(v, -config.v_max, config.v_max)


def update_position(x, v, config: PsoConfig):
    """Step the position and clamp every component back into the box."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != v.shape:
        raise ValueError("position and velocity must share one dimension")
    return np.clip(x + v, config.space_low, config.space_high)


def _refresh_gbest(state: SwarmState) -> None:
    # Strict improvement only; scanning in index order keeps ties on the
    # lowest-index particle.
    for particle in state.particles:
        if particle.pbest_fitness < state.gbest_fitness:
            state.gbest_fitness = particle.pbest_fitness
            state.gbest_position = particle.pbest_position.copy()


def _advance_swarm(state: SwarmState, config: PsoConfig) -> None:
    w = state.inertia
    dimension = state.particles[0].position.size
    for particle in state.particles:
        r1 = state.rng.uniform(size=dimension)
        r2 = state.rng.uniform(size=dimension)
        particle.velocity = update_velocity(particle, state.gbest_position, w, config, r1, r2)
        particle.position = update_position(particle.position, particle.velocity, config)
    state.iteration += 1
    # Power form rather than repeated multiplication, so the inertia equals
    # w0 * w_decay^k exactly at every iteration count.
    state.inertia = config.w0 * config.w_decay**state.iteration


def step(state: SwarmState, fitness, config: PsoConfig) -> SwarmState:
    """One iteration: evaluate, update bests, then move every particle."""
    for particle in state.particles:
        fit = _checked_fitness(fitness, particle.position)
        if fit < particle.pbest_fitness:
            particle.pbest_fitness = fit
            particle.pbest_position = particle.position.copy()
        particle.last_fitness = fit
    _refresh_gbest(state)
    _advance_swarm(state, config)
    return state


def run(config: PsoConfig, dimension: int, fitness):
    """Full optimization: init plus ``max_iterations`` steps.

    Returns (best position, best fitness, per-iteration best-fitness trace).
    The trace has one entry per iteration and never increases.
    """
    state = init_swarm(config, dimension, fitness)
    trace = []
    for _ in range(config.max_iterations):
        step(state, fitness, config)
        trace.append(state.gbest_fitness)
    return state.gbest_position.copy(), state.gbest_fitness, trace


def write_trace_csv(path, trace, config: PsoConfig) -> None:
    """Dump a run trace as CSV rows of iteration, best fitness, inertia."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("iteration,gbest_fitness,inertia\n")
        for k, value in enumerate(trace, start=1):
            inertia = config.w0 * config.w_decay**k
            handle.write(f"{k},{value!r},{inertia!r}\n")
