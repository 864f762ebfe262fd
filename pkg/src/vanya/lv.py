"""Lotka-Volterra predator-prey dynamics.

    dx/dt = alpha*x - beta*x*y
    dy/dt = delta*x*y - gamma*y

x is the prey abundance and y the predator abundance. Trajectories are
produced with a fixed-step classical Runge-Kutta integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IntegrationError, InvalidInputError

__all__ = [
    "LVParams",
    "LVState",
    "Trajectory",
    "lv_derivative",
    "integrate_rk4",
    "conserved_quantity",
    "conserved_along",
    "DEFAULT_PARAMS",
    "DEFAULT_INITIAL",
]


def _check_positive_finite(**values):
    for name, v in values.items():
        if not (math.isfinite(v) and v > 0):
            raise InvalidInputError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class LVParams:
    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        _check_positive_finite(
            alpha=self.alpha, beta=self.beta, gamma=self.gamma, delta=self.delta
        )

    @property
    def fixed_point(self) -> LVState:
        """Coexistence equilibrium (gamma/delta, alpha/beta)."""
        return LVState(self.gamma / self.delta, self.alpha / self.beta)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "delta": self.delta}

    @classmethod
    def from_dict(cls, d: dict) -> LVParams:
        return cls(float(d["alpha"]), float(d["beta"]), float(d["gamma"]), float(d["delta"]))


@dataclass(frozen=True)
class LVState:
    x: float
    y: float


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled states; ``states`` has shape (n, 2) with columns x, y."""

    dt: float
    states: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidInputError("dt must be positive")
        if self.states.ndim != 2 or self.states.shape[1] != 2 or len(self.states) == 0:
            raise InvalidInputError("states must be a non-empty (n, 2) array")
        if not np.all(np.isfinite(self.states)):
            raise InvalidInputError("trajectory contains non-finite states")

    def __len__(self):
        return len(self.states)

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.states))

    @property
    def x(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 1]

    def state(self, i: int) -> LVState:
        return LVState(float(self.states[i, 0]), float(self.states[i, 1]))


DEFAULT_PARAMS = LVParams(alpha=1.1, beta=0.4, gamma=0.4, delta=0.1)
DEFAULT_INITIAL = LVState(10.0, 5.0)


def lv_derivative(state: LVState, params: LVParams) -> tuple[float, float]:
    x, y = state.x, state.y
    if not (math.isfinite(x) and math.isfinite(y)):
        raise InvalidInputError(f"non-finite state ({x!r}, {y!r})")
    return (
        params.alpha * x - params.beta * x * y,
        params.delta * x * y - params.gamma * y,
    )


def integrate_rk4(params: LVParams, initial: LVState, dt: float, n_steps: int) -> Trajectory:
    """Integrate with classical fixed-step RK4.

    Returns ``n_steps + 1`` states including ``initial``. Raises
    :class:`IntegrationError` as soon as any stage or step leaves the
    positive quadrant or becomes non-finite; nothing is clamped.
    """
    if not (math.isfinite(dt) and dt > 0):
        raise InvalidInputError(f"dt must be positive and finite, got {dt!r}")
    if n_steps < 0:
        raise InvalidInputError("n_steps must be non-negative")
    x, y = float(initial.x), float(initial.y)
    if not (math.isfinite(x) and math.isfinite(y) and x > 0 and y > 0):
        raise InvalidInputError(f"initial state must be positive and finite, got ({x}, {y})")

    a, b, g, d = params.alpha, params.beta, params.gamma, params.delta
    h2 = 0.5 * dt
    out = np.empty((n_steps + 1, 2))
    out[0] = x, y
    for n in range(1, n_steps + 1):
        k1x = a * x - b * x * y
        k1y = d * x * y - g * y
        x2, y2 = x + h2 * k1x, y + h2 * k1y
        k2x = a * x2 - b * x2 * y2
        k2y = d * x2 * y2 - g * y2
        x3, y3 = x + h2 * k2x, y + h2 * k2y
        k3x = a * x3 - b * x3 * y3
        k3y = d * x3 * y3 - g * y3
        x4, y4 = x + dt * k3x, y + dt * k3y
        k4x = a * x4 - b * x4 * y4
        k4y = d * x4 * y4 - g * y4
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y = y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        # x > 0 is False for nan, so this also catches non-finite values
        if not (x > 0 and y > 0 and x2 > 0 and y2 > 0 and x3 > 0 and y3 > 0
                and x4 > 0 and y4 > 0 and math.isfinite(x) and math.isfinite(y)):
            raise IntegrationError(
                f"state left the positive quadrant or became non-finite (x={x!r}, y={y!r})", n
            )
        out[n, 0] = x
        out[n, 1] = y
    return Trajectory(dt=float(dt), states=out)


def conserved_quantity(state: LVState, params: LVParams) -> float:
    """First integral delta*x - gamma*ln x + beta*y - alpha*ln y."""
    x, y = state.x, state.y
    if not (x > 0 and y > 0):
        raise DomainError(f"conserved quantity needs x > 0 and y > 0, got ({x}, {y})")
    return (
        params.delta * x - params.gamma * math.log(x)
        + params.beta * y - params.alpha * math.log(y)
    )


def conserved_along(traj: Trajectory, params: LVParams) -> np.ndarray:
    """Vectorized :func:`conserved_quantity` over every state of a trajectory."""
    x, y = traj.x, traj.y
    return params.delta * x - params.gamma * np.log(x) + params.beta * y - params.alpha * np.log(y)
