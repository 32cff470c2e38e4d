"""
Explicit parabolic flow du/dt = F(A_u) - psi, projected to keep sup u = 0.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import AdmissibilityError, ArgumentError, FlowAbort
from .newton import residual
from .problem import ProblemSpec, SolveOptions, normalize_pair


@dataclass
class FlowTrajectory:
    """Residual history of a flow run; ``residuals[0]`` is the starting value."""
    dt: float
    steps: int
    residuals: list = field(default_factory=list)
    u: Optional[np.ndarray] = field(default=None, repr=False)
    b: float = 0.0

    @property
    def monotone(self) -> bool:
        r = self.residuals
        return all(later < earlier for earlier, later in zip(r, r[1:]))

    @property
    def stationary(self) -> bool:
        return all(value == 0.0 for value in self.residuals)

    def to_dict(self) -> dict:
        return {
            "dt": self.dt,
            "steps": self.steps,
            "b": self.b,
            "monotone": self.monotone,
            "residuals": list(self.residuals),
        }


def parabolic_flow(
    spec: ProblemSpec,
    u0: np.ndarray,
    dt: float,
    steps: int,
    options: SolveOptions = SolveOptions(),
    on_step: Optional[Callable[[int, float], None]] = None,
) -> FlowTrajectory:
    """
    Explicit Euler steps of u += dt (F - psi - mean(F - psi)).

    The mean of F - psi is tracked as b, so the recorded residual is
    sup |F - psi - b|. Leaving the cone raises FlowAbort with the step index.
    """
    if dt <= 0 or steps < 0:
        raise ArgumentError(f"flow needs dt > 0 and steps >= 0, got dt={dt}, steps={steps}")
    floor = options.admissibility_floor
    u, _ = normalize_pair(np.asarray(u0, dtype=float), 0.0)
    trajectory = FlowTrajectory(dt, steps)

    for step in range(steps + 1):
        try:
            r, _, _ = residual(spec, u, 0.0, floor=floor)
        except AdmissibilityError as e:
            trajectory.u = u
            raise FlowAbort(f"flow left the cone at step {step}: {e}", step=step, trajectory=trajectory) from e
        b = float(r.mean())
        drift = r - b
        sup_r = float(np.abs(drift).max())
        if not np.isfinite(sup_r):
            trajectory.u = u
            raise FlowAbort(f"flow produced a non-finite residual at step {step}", step=step, trajectory=trajectory)
        trajectory.residuals.append(sup_r)
        trajectory.b = b
        if on_step:
            on_step(step, sup_r)
        if step == steps:
            break
        u, _ = normalize_pair(u + dt * drift, b)

    trajectory.u = u
    return trajectory
