"""Closed-form utility machinery for reliability-style chances.

Archetypal power-law utility curves over a reliability value, an
exponential cost disutility that grows with reliability, their
difference (the omnibus utility), expected-utility maximization over
discrete decision problems, and mixing a survival function over a
discrete prior.

Pure functions; safe for unrestricted concurrent use.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence


class SaturationWarning(UserWarning):
    """The cost disutility was evaluated at full reliability, where the
    underlying cost diverges; the limit value 1 is returned instead."""


@dataclass(frozen=True)
class ReliabilityContext:
    """Inputs for the reliability utility forms.

    fbar is the reliability (survival chance) at mission time x; beta_u
    shapes the archetypal curve (risk neutral exactly when beta_u == x);
    delta scales the cost disutility.
    """

    fbar: float
    x: float = 1.0
    beta_u: float = 1.0
    delta: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 <= self.fbar <= 1.0:
            raise ValueError(f"fbar must lie in [0, 1], got {self.fbar}")
        if self.x <= 0:
            raise ValueError(f"x must be positive, got {self.x}")
        if self.beta_u <= 0:
            raise ValueError(f"beta_u must be positive, got {self.beta_u}")
        if self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")


@dataclass(frozen=True)
class Action:
    """Mutually exclusive outcomes with probabilities and utilities."""

    probabilities: tuple[float, ...]
    utilities: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.probabilities:
            raise ValueError("action must have at least one outcome")
        if len(self.probabilities) != len(self.utilities):
            raise ValueError("probabilities and utilities must have equal length")
        if any(p < 0 for p in self.probabilities):
            raise ValueError("probabilities must be non-negative")
        if abs(sum(self.probabilities) - 1.0) > 1e-9:
            raise ValueError(
                f"outcome probabilities must sum to 1 within 1e-9, got {sum(self.probabilities)}"
            )
        if any(not 0.0 <= u <= 1.0 for u in self.utilities):
            raise ValueError("utilities must lie in [0, 1]")


@dataclass(frozen=True)
class DecisionProblem:
    """A finite menu of actions to be ranked by expected utility."""

    actions: tuple[Action, ...]

    def __post_init__(self) -> None:
        if not self.actions:
            raise ValueError("decision problem must have at least one action")


def archetypal_utility(ctx: ReliabilityContext) -> float:
    """Power-law utility ``fbar ** (beta_u / x)``.

    Anchored at U(0) = 0 and U(1) = 1 for every parameter choice.
    """
    return ctx.fbar ** (ctx.beta_u / ctx.x)


def cost_disutility(ctx: ReliabilityContext) -> float:
    """Cost of achieving the reliability: ``1 - exp(-delta * fbar / (1 - fbar))``.

    Strictly increasing in fbar.  At fbar = 1 the cost diverges; the
    limit value 1 is returned and a :class:`SaturationWarning` is issued.
    """
    if ctx.fbar == 1.0:
        warnings.warn(
            "cost disutility saturates at fbar = 1 (cost diverges); returning the limit 1",
            SaturationWarning,
            stacklevel=2,
        )
        return 1.0
    return 1.0 - math.exp(-ctx.delta * ctx.fbar / (1.0 - ctx.fbar))


def omnibus_utility(ctx: ReliabilityContext) -> float:
    """Utility of the reliability net of its cost; may be negative."""
    return archetypal_utility(ctx) - cost_disutility(ctx)


def expected_utility(problem: DecisionProblem, action_index: int) -> float:
    """Probability-weighted utility sum for one action."""
    action = problem.actions[action_index]
    return sum(p * u for p, u in zip(action.probabilities, action.utilities))


def best_action(problem: DecisionProblem) -> int:
    """Index of the action with maximal expected utility.

    Ties break to the lowest index so the choice is deterministic.
    """
    best_idx = 0
    best_val = expected_utility(problem, 0)
    for idx in range(1, len(problem.actions)):
        val = expected_utility(problem, idx)
        if val > best_val:
            best_idx = idx
            best_val = val
    return best_idx


def survivability(
    fbar_of_theta: Callable[[float], float],
    theta_nodes: Sequence[float],
    weights: Sequence[float],
) -> float:
    """Personal survival probability: the survival function mixed over a
    discrete prior on its parameter.

    The prior weights must be normalized; each evaluated survival value
    must be a chance in [0, 1], so the mixture is too.
    """
    if len(theta_nodes) != len(weights):
        raise ValueError("theta_nodes and weights must have equal length")
    if not theta_nodes:
        raise ValueError("prior must have at least one node")
    if any(w < 0 for w in weights):
        raise ValueError("prior weights must be non-negative")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError(f"prior weights must sum to 1, got {sum(weights)}")
    total = 0.0
    for theta, w in zip(theta_nodes, weights):
        value = fbar_of_theta(theta)
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"survival value at theta = {theta} is {value}, outside [0, 1]")
        total += w * value
    return total


def reliability_curve(
    fbar_values: Iterable[float],
    x: float = 1.0,
    beta_u: float = 1.0,
    delta: float = 0.1,
) -> list[tuple[float, float, float, float]]:
    """Rows of (fbar, utility, disutility, omnibus) over an fbar lattice."""
    rows = []
    for fbar in fbar_values:
        ctx = ReliabilityContext(fbar=fbar, x=x, beta_u=beta_u, delta=delta)
        utility = archetypal_utility(ctx)
        disutility = cost_disutility(ctx)
        rows.append((fbar, utility, disutility, utility - disutility))
    return rows
