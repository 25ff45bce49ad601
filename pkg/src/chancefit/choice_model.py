"""Probability-of-choice model for binary gamble elicitation.

A subject is offered a sure chance ``c`` or a gamble that pays the best
outcome with chance ``p`` and the worst with chance ``1 - p``.  The model
gives the elicitor's probability that the subject picks the gamble, as a
function of the difference ``p - c`` and two subject parameters:

* ``alpha`` -- discrimination ability; larger values mean the subject is
  slower to switch preference as ``p - c`` moves away from zero.
* ``beta`` -- risk attitude; below 1 is risk prone, 1 is neutral, above 1
  is risk averse.

The indifference offset ``omega`` is the value of ``p - c`` at which the
choice probability crosses one half.  It has a closed form
(:func:`solve_omega`) and maps directly to a utility for ``c``
(:func:`utility_from_omega`).

All functions here are pure and all values immutable; they are safe for
unrestricted concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

RiskDisposition = Literal["prone", "neutral", "averse"]

# Inputs this close to 0 or 1 are treated as exactly on the boundary.
# Elicitation grids never place points that close to the edge, so this
# only guards against input noise.
BOUNDARY_TOL = 1e-12


def _sgn(x: float) -> int:
    return int(x > 0) - int(x < 0)


def _is_boundary(x: float, edge: float) -> bool:
    return abs(x - edge) <= BOUNDARY_TOL


@dataclass(frozen=True)
class ChoiceParams:
    """Discrimination/risk parameter pair indexing the choice model."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and self.alpha < float("inf")):
            raise ValueError(f"alpha must be a positive real, got {self.alpha}")
        if not (self.beta > 0 and self.beta < float("inf")):
            raise ValueError(f"beta must be a positive real, got {self.beta}")


@dataclass(frozen=True)
class GamblePoint:
    """A (sure chance, gamble win-chance) pair offered to the subject."""

    c: float
    p: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.c <= 1.0:
            raise ValueError(f"c must lie in [0, 1], got {self.c}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    def interior(self) -> bool:
        return not (
            _is_boundary(self.c, 0.0)
            or _is_boundary(self.c, 1.0)
            or _is_boundary(self.p, 0.0)
            or _is_boundary(self.p, 1.0)
        )


def choice_prob_linear(beta: float, g: GamblePoint) -> float:
    """Single-parameter choice probability ``((p - c + 1) / 2) ** beta``.

    Only defined for interior gambles; boundary points must go through
    :func:`choice_prob`, which encodes the rational-choice edge cases.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if not g.interior():
        raise ValueError(
            "choice_prob_linear is undefined on the boundary; "
            "use choice_prob, which handles p or c in {0, 1}"
        )
    return ((g.p - g.c + 1.0) / 2.0) ** beta


def choice_prob_penultimate(params: ChoiceParams, g: GamblePoint) -> float:
    """Signed-power form ``(((p - c) ** alpha + 1) / 2) ** beta``.

    This intermediate form is kept because it documents why the final
    model exists: for ``p < c`` and non-integer ``alpha`` the power
    ``(p - c) ** alpha`` has no real value.  Production code should call
    :func:`choice_prob`.
    """
    if not g.interior():
        raise ValueError(
            "choice_prob_penultimate is undefined on the boundary; use choice_prob"
        )
    delta = g.p - g.c
    if delta < 0 and not float(params.alpha).is_integer():
        raise ValueError(
            f"(p - c) = {delta} < 0 with non-integer alpha = {params.alpha} "
            "has a complex root; use choice_prob instead"
        )
    if delta < 0:
        signed_pow = (-1.0) ** int(params.alpha) * (-delta) ** params.alpha
    else:
        signed_pow = delta**params.alpha
    return ((signed_pow + 1.0) / 2.0) ** params.beta


def choice_prob_offset(params: ChoiceParams, delta: float) -> float:
    """Interior choice probability as a function of ``delta = p - c``.

    ``((1 + sgn(delta) * |delta| ** alpha) / 2) ** beta`` for
    ``delta in [-1, 1]``.  This is the curve whose root in ``delta``
    defines the indifference offset.
    """
    if not -1.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [-1, 1], got {delta}")
    s = _sgn(delta)
    base = (1.0 + s * abs(delta) ** params.alpha) / 2.0
    return base**params.beta


def choice_prob(params: ChoiceParams, g: GamblePoint) -> float:
    """Probability that the subject picks the gamble over the sure chance.

    Interior points use :func:`choice_prob_offset`.  Boundary points
    follow the rational-choice rules: a sure win over anything less is
    never traded away, a sure loss is never kept, and when both options
    are identical (both 0 or both 1) either answer is equally likely.
    """
    p_at_0 = _is_boundary(g.p, 0.0)
    p_at_1 = _is_boundary(g.p, 1.0)
    c_at_0 = _is_boundary(g.c, 0.0)
    c_at_1 = _is_boundary(g.c, 1.0)

    if (p_at_0 and c_at_0) or (p_at_1 and c_at_1):
        return 0.5
    if p_at_1:  # c < 1: the gamble is a sure win
        return 1.0
    if p_at_0:  # c > 0: the gamble is a sure loss
        return 0.0
    if c_at_1:  # p < 1: the sure option cannot be beaten
        return 0.0
    # c = 0 with interior p falls through to the interior formula.
    return choice_prob_offset(params, g.p - g.c)


def solve_omega(params: ChoiceParams) -> float:
    """Closed-form indifference offset: the ``p - c`` where the choice
    probability equals one half.

    ``omega = sgn(beta - 1) * [sgn(beta - 1) * (2 ** (1 - 1/beta) - 1)] ** (1/alpha)``,
    with ``beta = 1`` giving exactly 0.  The result always lies in
    ``[-1, 1]`` and its sign matches the sign of ``beta - 1``.
    """
    s = _sgn(params.beta - 1.0)
    if s == 0:
        return 0.0
    inner = s * (2.0 ** (1.0 - 1.0 / params.beta) - 1.0)
    return s * inner ** (1.0 / params.alpha)


def utility_from_omega(c: float, omega: float) -> float:
    """Map an indifference offset at sure chance ``c`` to a utility.

    ``U(c) = c + omega`` clamped into [0, 1]; a zero offset returns ``c``
    itself (risk neutrality at that point).
    """
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must be interior to (0, 1), got {c}")
    if not -1.0 <= omega <= 1.0:
        raise ValueError(f"omega must lie in [-1, 1], got {omega}")
    if omega > 0:
        return min(1.0, c + omega)
    if omega < 0:
        return max(0.0, c + omega)
    return c


def risk_disposition(omega: float) -> RiskDisposition:
    """Classify the sign of the indifference offset.

    Negative means the subject accepts gambles worse than the sure thing
    (prone), positive means the gamble must be strictly better (averse).
    """
    if not -1.0 <= omega <= 1.0:
        raise ValueError(f"omega must lie in [-1, 1], got {omega}")
    if omega < 0:
        return "prone"
    if omega > 0:
        return "averse"
    return "neutral"
