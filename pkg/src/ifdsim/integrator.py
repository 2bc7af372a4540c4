"""Fixed-step method-of-lines time stepping with divergence detection.

The steppers are generic over 1-D state vectors (real or complex); the
rhs is any callable state -> state.  Divergence is a reported trajectory
status rather than an exception: runs that blow up are a result worth
returning, not a failure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ifdsim.errors import SingularGram

METHODS = ("euler", "rk4")


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"
    dt: float = 1e-3
    t_end: float = 1.0
    blowup_norm: float = None  # default resolved to 1e6 * initial max-norm
    record_every: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if self.dt > self.t_end:
            raise ValueError("dt must not exceed t_end")
        if self.blowup_norm is not None and not self.blowup_norm > 0:
            raise ValueError("blowup_norm must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class Trajectory:
    """Recorded snapshots of an integration run.

    states holds the initial state plus every record_every-th step; for a
    completed run there are 1 + floor(steps / record_every) snapshots.
    final_state is the last computed state regardless of cadence.
    """

    times: np.ndarray
    states: list
    status: str
    t_diverged: float = None
    final_state: np.ndarray = None


def step_euler(rhs_fn, d: np.ndarray, dt: float) -> np.ndarray:
    """One forward-Euler step d + dt * rhs(d)."""
    return d + dt * rhs_fn(d)


def step_rk4(rhs_fn, d: np.ndarray, dt: float) -> np.ndarray:
    """One classical 4-stage Runge-Kutta step."""
    k1 = rhs_fn(d)
    k2 = rhs_fn(d + 0.5 * dt * k1)
    k3 = rhs_fn(d + 0.5 * dt * k2)
    k4 = rhs_fn(d + dt * k3)
    return d + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


_STEPPERS = {"euler": step_euler, "rk4": step_rk4}


def integrate(rhs_fn, d0: np.ndarray, config: IntegratorConfig) -> Trajectory:
    """Fixed-step integration of d' = rhs(d) from t=0 through t_end.

    The run aborts with status "diverged" as soon as the state max-norm
    exceeds the blow-up threshold, any entry turns non-finite, or the rhs
    itself breaks down numerically (overflow, singular solve); these
    are the same event seen at different stages.
    """
    d0 = np.asarray(d0)
    step = _STEPPERS[config.method]
    n_steps = int(np.floor(config.t_end / config.dt + 1e-9))
    maxnorm0 = float(np.max(np.abs(d0))) if d0.size else 0.0
    blowup = config.blowup_norm
    if blowup is None:
        blowup = 1e6 * maxnorm0 if maxnorm0 > 0 else 1e6

    times = [0.0]
    states = [d0.copy()]
    d = d0.copy()
    for n in range(1, n_steps + 1):
        try:
            d = step(rhs_fn, d, config.dt)
        except (SingularGram, FloatingPointError, OverflowError):
            return Trajectory(np.asarray(times), states, "diverged",
                              t_diverged=n * config.dt, final_state=d)
        t = n * config.dt
        mx = np.max(np.abs(d))
        if not np.isfinite(mx) or mx > blowup:
            return Trajectory(np.asarray(times), states, "diverged",
                              t_diverged=t, final_state=d)
        if n % config.record_every == 0:
            times.append(t)
            states.append(d.copy())
    return Trajectory(np.asarray(times), states, "completed", final_state=d)
