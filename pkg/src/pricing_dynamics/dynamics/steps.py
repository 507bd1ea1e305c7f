"""Projected steps and step-size schedules."""

from __future__ import annotations

import math
from typing import Union

import numpy as np

from ..exceptions import ParameterError
from ..market.models import FloatArray, PriceVector

Step = Union[float, FloatArray]


def step_project(p: PriceVector, g: FloatArray, step: Step) -> PriceVector:
    """Componentwise max{0, p - step·g}; exact zeros stay on the closed orthant."""
    if np.any(np.asarray(step) < 0):
        raise ParameterError("step", step, "step size must be nonnegative")
    return np.maximum(np.asarray(p, dtype=np.float64) - step * np.asarray(g, dtype=np.float64), 0.0)


def decaying_step(constant: float, t: int) -> float:
    """constant / sqrt(t + 1) for 0-based iteration t."""
    return constant / math.sqrt(t + 1)


class AdaGradState:
    """Accumulator H of squared gradient norms.

    The scalar form adds ⟨g, g⟩; the diagonal form adds g ⊙ g per coordinate.
    A zero denominator (no gradient seen and ε = 0) yields a zero step.
    """

    def __init__(self, n: int, eta: float, epsilon_div: float, *, diagonal: bool = False) -> None:
        self.eta = eta
        self.epsilon_div = epsilon_div
        self.diagonal = diagonal
        self.H: Union[float, FloatArray] = np.zeros(n) if diagonal else 0.0

    def step(self, g: FloatArray) -> Step:
        if self.diagonal:
            self.H = self.H + g * g
            denom = np.sqrt(self.H + self.epsilon_div)
            with np.errstate(divide="ignore"):
                return np.where(denom > 0, self.eta / denom, 0.0)
        self.H = float(self.H) + float(g @ g)
        denom = math.sqrt(self.H + self.epsilon_div)
        return self.eta / denom if denom > 0 else 0.0
