"""Coupling profile in momentum: infrared power law with a smooth UV cutoff.

rho(r) = amplitude * r^beta exactly on r <= cutoff*(1 - smooth_width), rolls
off C^1-smoothly to zero at r = cutoff, and vanishes beyond.  The roll-off is
a quintic ramp, so the derivative is available in closed form and satisfies
|rho'(r)| <= C * r^(beta-1) on (0, cutoff).
"""

from dataclasses import dataclass

import numpy as np

from cerenkov_fiber.smoothing import smootherstep, smootherstep_derivative


@dataclass(frozen=True)
class FormFactor:
    amplitude: float = 1.0
    beta: float = 1.0
    cutoff: float = 1.0
    smooth_width: float = 0.2

    def __post_init__(self):
        if not self.amplitude > 0.0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")
        if not self.cutoff > 0.0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")
        if not 0.0 < self.smooth_width < 1.0:
            raise ValueError(
                f"smooth_width must lie in (0, 1), got {self.smooth_width}"
            )

    @property
    def power_edge(self) -> float:
        """Largest radius where rho is exactly the pure power law."""
        return self.cutoff * (1.0 - self.smooth_width)

    def _roll(self, r):
        return smootherstep((self.cutoff - r) / (self.cutoff * self.smooth_width))

    def value(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            power = self.amplitude * np.where(r > 0.0, r, 1.0) ** self.beta
        power = np.where(r > 0.0, power, self.amplitude if self.beta == 0.0 else 0.0)
        out = np.where(r >= self.cutoff, 0.0, power * self._roll(r))
        return out if out.ndim else float(out)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        safe = np.where(r > 0.0, r, 1.0)
        power = self.amplitude * safe**self.beta
        dpower = self.amplitude * self.beta * safe ** (self.beta - 1.0)
        t = (self.cutoff - r) / (self.cutoff * self.smooth_width)
        roll = smootherstep(t)
        droll = smootherstep_derivative(t) * (-1.0 / (self.cutoff * self.smooth_width))
        out = np.where(
            (r >= self.cutoff) | (r <= 0.0), 0.0, dpower * roll + power * droll
        )
        return out if out.ndim else float(out)
