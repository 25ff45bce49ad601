"""Post-processing of elicited utility points into a coherent curve.

Two repairs are offered: a least-squares monotone projection
(:func:`isotonic_adjust`, pool-adjacent-violators) for violations of the
monotonicity requirement, and a log-odds least-squares fit over triplet
gambles (:func:`nl_triplet_fit`) for violations of anchor invariance.

Pure functions; safe for unrestricted concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import least_squares

from .choice_model import RiskDisposition, risk_disposition

FitMethod = Literal["mle", "bayes", "adjusted"]


class UnderdeterminedError(ValueError):
    """A triplet set leaves at least one interior utility unconstrained."""


class ConvergenceError(RuntimeError):
    """The triplet least-squares optimizer failed to converge."""


@dataclass(frozen=True)
class UtilityPoint:
    """An elicited (c, U(c)) pair with its offset and risk label."""

    c: float
    u: float
    omega: float
    disposition: RiskDisposition
    method: FitMethod
    at_bound: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"c must be interior to (0, 1), got {self.c}")
        if not 0.0 <= self.u <= 1.0:
            raise ValueError(f"u must lie in [0, 1], got {self.u}")
        if not -1.0 <= self.omega <= 1.0:
            raise ValueError(f"omega must lie in [-1, 1], got {self.omega}")
        if self.method != "adjusted":
            clamped = min(1.0, max(0.0, self.c + self.omega))
            if abs(self.u - clamped) > 1e-9:
                raise ValueError(
                    f"u = {self.u} is inconsistent with c + omega = "
                    f"{self.c + self.omega} (clamped {clamped})"
                )


@dataclass(frozen=True)
class TripletGamble:
    """Indifference chance for a gamble over the utilities of two other
    grid points, offered against the sure middle point.

    Indices refer to the extended point sequence (anchor 0, interior
    points in increasing c, anchor 1).
    """

    i: int
    m: int
    k: int
    p: float

    def __post_init__(self) -> None:
        if not self.i < self.m < self.k:
            raise ValueError(f"indices must satisfy i < m < k, got {(self.i, self.m, self.k)}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must be interior to (0, 1), got {self.p}")


def _pava(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted pool-adjacent-violators: least-squares non-decreasing fit."""
    # Each block is (weight sum, weighted mean, run length).
    blocks: list[list[float]] = []
    for v, w in zip(values, weights):
        blocks.append([w, v, 1])
        while len(blocks) > 1 and blocks[-2][1] > blocks[-1][1]:
            w2, m2, n2 = blocks.pop()
            w1, m1, n1 = blocks.pop()
            wt = w1 + w2
            blocks.append([wt, (w1 * m1 + w2 * m2) / wt, n1 + n2])
    out = np.empty_like(values)
    pos = 0
    for _, mean, n in blocks:
        out[pos : pos + n] = mean
        pos += n
    return out


def isotonic_adjust(points: Sequence[UtilityPoint]) -> tuple[UtilityPoint, ...]:
    """Project utilities onto the closest non-decreasing sequence.

    Points must be sorted by strictly increasing c.  Values changed by
    the projection are re-tagged ``method="adjusted"``; untouched points
    are returned as-is, so an already monotone input is a fixed point.
    Pool values are clamped into [0, 1] to stay consistent with the
    anchors U(0)=0 and U(1)=1.
    """
    pts = list(points)
    if not pts:
        return ()
    cs = [pt.c for pt in pts]
    if any(b <= a for a, b in zip(cs, cs[1:])):
        raise ValueError(f"points must be sorted by strictly increasing c, got {cs}")
    fitted = _pava(np.array([pt.u for pt in pts], dtype=float), np.ones(len(pts)))
    fitted = np.clip(fitted, 0.0, 1.0)
    out = []
    for pt, u_new in zip(pts, fitted):
        if u_new == pt.u:
            out.append(pt)
        else:
            out.append(replace(pt, u=float(u_new), method="adjusted"))
    return tuple(out)


def _check_coverage(n_interior: int, triplets: Sequence[TripletGamble]) -> None:
    seen: set[int] = set()
    for t in triplets:
        seen.update((t.i, t.m, t.k))
    missing = [m for m in range(1, n_interior + 1) if m not in seen]
    if missing:
        raise UnderdeterminedError(
            f"interior point indices {missing} appear in no triplet; "
            "their utilities are unconstrained"
        )


def nl_triplet_fit(
    c_values: Sequence[float],
    triplets: Sequence[TripletGamble],
) -> tuple[UtilityPoint, ...]:
    """Least-squares utility curve from triplet indifference chances.

    For each triplet the observed log-odds of the indifference chance is
    matched to ``log((U_m - U_i) / (U_k - U_m))`` over the extended point
    sequence ``(0, c_1, ..., c_n, 1)`` anchored at U=0 and U=1.  The
    utilities are parameterized through gap logits, so the fitted curve
    is strictly increasing by construction.

    Returns one point per interior c, tagged ``method="adjusted"``.
    """
    cs = [float(c) for c in c_values]
    if not cs:
        raise ValueError("c_values must be non-empty")
    if any(not 0.0 < c < 1.0 for c in cs):
        raise ValueError(f"c values must be interior to (0, 1), got {cs}")
    if any(b <= a for a, b in zip(cs, cs[1:])):
        raise ValueError(f"c values must be strictly increasing, got {cs}")
    n = len(cs)
    if not triplets:
        raise UnderdeterminedError("no triplets supplied")
    for t in triplets:
        if t.k > n + 1:
            raise ValueError(f"triplet index {t.k} exceeds the extended range 0..{n + 1}")
    _check_coverage(n, triplets)

    target = np.array([math.log(t.p / (1.0 - t.p)) for t in triplets])
    ii = np.array([t.i for t in triplets])
    mm = np.array([t.m for t in triplets])
    kk = np.array([t.k for t in triplets])

    def utilities(z: np.ndarray) -> np.ndarray:
        # n + 1 gaps from n free logits; the first logit is pinned to 0
        # so the parameterization is identifiable.
        logits = np.concatenate(([0.0], z))
        logits = logits - logits.max()
        gaps = np.exp(logits)
        gaps /= gaps.sum()
        return np.concatenate(([0.0], np.cumsum(gaps)))

    def residuals(z: np.ndarray) -> np.ndarray:
        u = utilities(z)
        return target - (np.log(u[mm] - u[ii]) - np.log(u[kk] - u[mm]))

    result = least_squares(
        residuals,
        x0=np.zeros(n),
        method="trf",
        xtol=1e-14,
        ftol=1e-14,
        gtol=1e-14,
    )
    if result.status <= 0:
        raise ConvergenceError(
            f"triplet least squares did not converge: {result.message}; "
            f"residual norm {np.linalg.norm(result.fun):.3e}"
        )
    u = utilities(result.x)
    out = []
    for idx, c in enumerate(cs, start=1):
        val = float(u[idx])
        out.append(
            UtilityPoint(
                c=c,
                u=val,
                omega=val - c,
                disposition=risk_disposition(val - c),
                method="adjusted",
            )
        )
    return tuple(out)


def triplet_objective(
    c_values: Sequence[float],
    triplets: Sequence[TripletGamble],
    utilities: Sequence[float],
) -> float:
    """Sum of squared log-odds residuals at a given interior utility vector."""
    u = np.concatenate(([0.0], np.asarray(utilities, dtype=float), [1.0]))
    total = 0.0
    for t in triplets:
        resid = math.log(t.p / (1.0 - t.p)) - math.log((u[t.m] - u[t.i]) / (u[t.k] - u[t.m]))
        total += resid * resid
    return total
