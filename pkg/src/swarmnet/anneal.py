"""Annealed acceptance gate and the bad-experience repulsion velocity rule.

The annealed swarm variants use these pieces inside the weight optimizer:
a worsening move is recorded as the particle's "bad experience" only when the
acceptance gate fires, and the repulsion rule pushes particles away from that
recorded point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass
class AnnealConfig:
    """Temperature schedule and repulsion strength."""

    t0: float = 1.0
    frac: float = 0.95
    k_const: float = 1.0
    c3: float = 1.4960

    def __post_init__(self):
        if self.t0 <= 0:
            raise ConfigError("t0 must be > 0")
        if not 0 < self.frac < 1:
            raise ConfigError("frac must be in (0, 1)")
        if self.k_const <= 0:
            raise ConfigError("k_const must be > 0")
        if self.c3 < 0:
            raise ConfigError("c3 must be >= 0")


@dataclass(frozen=True)
class Temperature:
    """Current temperature and how many cooling steps produced it."""

    current: float
    step_count: int = 0


def acceptance_probability(delta_e: float, temperature: float, k_const: float) -> float:
    """Probability of accepting a move with energy change ``delta_e``.

    Improvements (delta_e <= 0) are always accepted; worsenings are accepted
    with probability e^(-delta_e / (k_const * temperature)).
    """
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    if delta_e <= 0:
        return 1.0
    # exp underflows to 0.0 for very cold temperatures, which is the intended limit
    return min(1.0, math.exp(-delta_e / (k_const * temperature)))


def sa_accept(delta_e: float, temperature: float, k_const: float, u: float) -> bool:
    """Acceptance decision against a caller-supplied uniform draw u in [0, 1)."""
    return acceptance_probability(delta_e, temperature, k_const) > u


def cool(temperature: Temperature, frac: float) -> Temperature:
    """Geometric cooling: multiply the temperature by ``frac`` once."""
    if not 0 < frac < 1:
        raise ValueError("frac must be in (0, 1)")
    return Temperature(temperature.current * frac, temperature.step_count + 1)


def update_velocity_improved(particle, gbest, w, c1, c2, c3, r1, r2, r3, v_max):
    """Velocity update with an extra term pushing away from the recorded bad point.

    v' = w*v + c1*r1*(pbest - x) - c3*r3*(pworst - x) + c2*r2*(gbest - x),
    clamped per component to [-v_max, v_max]. With c3 = 0 this reproduces the
    plain rule exactly for the same r1, r2.
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    r3 = np.asarray(r3, dtype=float)
    x = particle.position
    if not (r1.shape == r2.shape == r3.shape == x.shape == particle.velocity.shape):
        raise ValueError("velocity update operands must share one dimension")
    v = (
        w * particle.velocity
        + c1 * r1 * (particle.pbest_position - x)
        - c3 * r3 * (particle.pworst_position - x)
        + c2 * r2 * (np.asarray(gbest, dtype=float) - x)
    )
    return np.clip(v, -v_max, v_max)
