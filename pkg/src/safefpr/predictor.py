"""Constant-acceleration trajectory spread for post-deployment estimation.

Stands in for an external trajectory predictor: each actor gets a fan of
constant-acceleration extrapolations around its current acceleration, from
hard braking to mild speed-up, each with a configured probability.
"""

from __future__ import annotations

from dataclasses import dataclass

from .types import KinematicState, Trajectory, straight_line_trajectory

SAMPLE_DT = 0.25  # s between emitted trajectory samples


@dataclass(frozen=True)
class PredictorConfig:
    horizon: float = 6.0       # s of predicted future
    num_variants: int = 5
    decel_spread: float = 4.9  # m/s^2 swing around the current acceleration
    variant_probabilities: tuple[float, ...] | None = None  # uniform if None

    def __post_init__(self) -> None:
        if self.horizon <= 0.0:
            raise ValueError("horizon must be > 0")
        if self.num_variants < 1:
            raise ValueError("num_variants must be >= 1")
        if self.decel_spread < 0.0:
            raise ValueError("decel_spread must be >= 0")
        probs = self.variant_probabilities
        if probs is not None:
            if len(probs) != self.num_variants:
                raise ValueError("need one probability per variant")
            if any(not 0.0 <= p <= 1.0 for p in probs):
                raise ValueError("probabilities must be in [0, 1]")
            if abs(sum(probs) - 1.0) > 1e-9:
                raise ValueError("probabilities must sum to 1")

    def probabilities(self) -> tuple[float, ...]:
        if self.variant_probabilities is not None:
            return self.variant_probabilities
        return tuple(1.0 / self.num_variants for _ in range(self.num_variants))

    def acceleration_offsets(self) -> tuple[float, ...]:
        """Symmetric offsets from -spread to +spread, single variant -> 0."""
        n = self.num_variants
        if n == 1:
            return (0.0,)
        s = self.decel_spread
        return tuple(-s + 2.0 * s * i / (n - 1) for i in range(n))


def predict_trajectories(current: KinematicState, cfg: PredictorConfig) -> list[Trajectory]:
    """Fan of constant-acceleration futures for one actor.

    Speeds are floored at zero, so braking variants of a stationary actor
    stay put.
    """
    probs = cfg.probabilities()
    out = []
    for offset, prob in zip(cfg.acceleration_offsets(), probs):
        start = KinematicState(
            x=current.x,
            y=current.y,
            v=current.v,
            a=current.a + offset,
            heading=current.heading,
        )
        out.append(
            straight_line_trajectory(
                start, duration=cfg.horizon, sample_dt=SAMPLE_DT, probability=prob
            )
        )
    return out
