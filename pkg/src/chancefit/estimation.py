"""Fitting the choice model to binary answers.

Two routes are provided for a fixed sure value c:

* maximum likelihood over (alpha, beta) inside a box, seeded from a
  coarse log-spaced grid scan and polished with a bounded Nelder-Mead
  simplex (:func:`fit_mle`);
* a discretized joint posterior under independent gamma priors
  (:func:`posterior_grid`), from which the Bayes indifference offset is
  the root of the posterior-averaged centered choice probability,
  found by bisection (:func:`solve_omega_bayes`).

Both routes end in :func:`estimate_utility`, which converts the offset
into a utility point.  All posterior arithmetic stays in log space until
the final normalization.  Every function is a deterministic pure
function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln

from .choice_model import ChoiceParams, risk_disposition, solve_omega, utility_from_omega
from .consistency import UtilityPoint

EstimationMethod = Literal["mle", "bayes"]

DEFAULT_BOX = (0.05, 20.0)
_SCAN_NODES = 16  # per axis, log-spaced over the box
_AT_BOUND_TOL = 1e-6


class NoRootError(RuntimeError):
    """The posterior-averaged choice curve has no sign change in [-1, 1].

    Cannot occur for a proper posterior; raised as an internal invariant
    violation.
    """


@dataclass(frozen=True)
class ChoiceObservation:
    """One binary answer: sure chance c against a win-chance-p gamble."""

    c: float
    p: float
    y: int

    def __post_init__(self) -> None:
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"c must be interior to (0, 1), got {self.c}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must be interior to (0, 1), got {self.p}")
        if self.y not in (0, 1):
            raise ValueError(f"y must be 0 or 1, got {self.y}")


@dataclass(frozen=True)
class ChoiceDataset:
    """All answers collected at one shared sure value c."""

    c: float
    observations: tuple[ChoiceObservation, ...]

    def __post_init__(self) -> None:
        if not self.observations:
            raise ValueError("dataset must contain at least one observation")
        bad = [o.c for o in self.observations if o.c != self.c]
        if bad:
            raise ValueError(f"all observations must share c = {self.c}, found {set(bad)}")

    @classmethod
    def from_arrays(cls, c: float, ps: Sequence[float], ys: Sequence[int]) -> "ChoiceDataset":
        if len(ps) != len(ys):
            raise ValueError("ps and ys must have equal length")
        return cls(c=c, observations=tuple(ChoiceObservation(c, float(p), int(y)) for p, y in zip(ps, ys)))

    def deltas(self) -> np.ndarray:
        return np.array([o.p - o.c for o in self.observations])

    def ys(self) -> np.ndarray:
        return np.array([o.y for o in self.observations])


@dataclass(frozen=True)
class GammaPrior:
    """Gamma density in shape/rate form (mean = shape / rate)."""

    shape: float
    rate: float

    def __post_init__(self) -> None:
        if self.shape <= 0:
            raise ValueError(f"shape must be positive, got {self.shape}")
        if self.rate <= 0:
            raise ValueError(f"rate must be positive, got {self.rate}")

    def log_density(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (
            self.shape * math.log(self.rate)
            - gammaln(self.shape)
            + (self.shape - 1.0) * np.log(x)
            - self.rate * x
        )


# The default priors put mean 1 on both parameters with a mild spread.
DEFAULT_PRIOR = GammaPrior(shape=2.0, rate=2.0)


@dataclass(frozen=True)
class GridSpec:
    """Node layout for the discretized posterior.

    Log-spaced nodes resolve the small-parameter region where the model
    changes fastest while still covering the gamma prior's upper tail.
    """

    alpha_lo: float = 0.01
    alpha_hi: float = 20.0
    beta_lo: float = 0.01
    beta_hi: float = 20.0
    n_alpha: int = 80
    n_beta: int = 80

    def __post_init__(self) -> None:
        if not 0 < self.alpha_lo < self.alpha_hi:
            raise ValueError("alpha range must satisfy 0 < lo < hi")
        if not 0 < self.beta_lo < self.beta_hi:
            raise ValueError("beta range must satisfy 0 < lo < hi")
        if self.n_alpha < 2 or self.n_beta < 2:
            raise ValueError("need at least 2 nodes per axis")

    def alpha_nodes(self) -> np.ndarray:
        return np.geomspace(self.alpha_lo, self.alpha_hi, self.n_alpha)

    def beta_nodes(self) -> np.ndarray:
        return np.geomspace(self.beta_lo, self.beta_hi, self.n_beta)


def _cell_widths(nodes: np.ndarray) -> np.ndarray:
    """Trapezoid cell width owned by each node over the spanned interval."""
    mids = (nodes[1:] + nodes[:-1]) / 2.0
    edges = np.concatenate(([nodes[0]], mids, [nodes[-1]]))
    return np.diff(edges)


@dataclass(frozen=True)
class PosteriorGrid:
    """Normalized joint posterior mass over (alpha, beta) node pairs."""

    alpha_nodes: np.ndarray
    beta_nodes: np.ndarray
    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        # Copy so freezing the arrays never mutates caller-owned buffers.
        a = np.array(self.alpha_nodes, dtype=float)
        b = np.array(self.beta_nodes, dtype=float)
        w = np.array(self.weights, dtype=float)
        if a.ndim != 1 or b.ndim != 1:
            raise ValueError("node arrays must be one-dimensional")
        if np.any(a <= 0) or np.any(b <= 0):
            raise ValueError("nodes must be positive")
        if np.any(np.diff(a) <= 0) or np.any(np.diff(b) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if w.shape != (a.size, b.size):
            raise ValueError(f"weights must have shape {(a.size, b.size)}, got {w.shape}")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if abs(float(w.sum()) - 1.0) > 1e-6:
            raise ValueError(f"weights must sum to 1 within 1e-6, got {w.sum()!r}")
        for arr, name in ((a, "alpha_nodes"), (b, "beta_nodes"), (w, "weights")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def point_mass(cls, params: ChoiceParams) -> "PosteriorGrid":
        return cls(
            alpha_nodes=np.array([params.alpha]),
            beta_nodes=np.array([params.beta]),
            weights=np.array([[1.0]]),
        )

    def mean(self) -> tuple[float, float]:
        wa = self.weights.sum(axis=1)
        wb = self.weights.sum(axis=0)
        return float(wa @ self.alpha_nodes), float(wb @ self.beta_nodes)

    def mode(self) -> tuple[float, float]:
        i, j = np.unravel_index(int(np.argmax(self.weights)), self.weights.shape)
        return float(self.alpha_nodes[i]), float(self.beta_nodes[j])


@dataclass(frozen=True)
class FitResult:
    """Maximum-likelihood estimate with optimizer diagnostics."""

    alpha_hat: float
    beta_hat: float
    log_likelihood: float
    converged: bool
    at_bound: bool

    def params(self) -> ChoiceParams:
        return ChoiceParams(self.alpha_hat, self.beta_hat)


def _grouped(data: ChoiceDataset) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unique p - c offsets with per-offset counts of y=1 and y=0."""
    deltas = data.deltas()
    ys = data.ys()
    uniq, inv = np.unique(deltas, return_inverse=True)
    n1 = np.bincount(inv, weights=ys, minlength=uniq.size)
    n0 = np.bincount(inv, weights=1 - ys, minlength=uniq.size)
    return uniq, n1, n0


def _log_base(alpha: float | np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """log((1 + sgn(delta) |delta|**alpha) / 2) for interior deltas.

    Broadcasts alpha against deltas; the result is always finite because
    |delta| < 1 keeps the base strictly inside (0, 1)."""
    alpha = np.asarray(alpha, dtype=float)
    sgn = np.sign(deltas)
    mag = np.abs(deltas)
    # |delta| ** alpha via exp(alpha * log|delta|); delta == 0 gives 0.
    with np.errstate(divide="ignore"):
        logmag = np.where(mag > 0, np.log(np.where(mag > 0, mag, 1.0)), -np.inf)
    powered = np.where(np.isneginf(logmag), 0.0, np.exp(alpha[..., None] * logmag))
    base = (1.0 + sgn * powered) / 2.0
    return np.log(base)


def _ll_components(
    alpha: float, beta: float, uniq: np.ndarray, n1: np.ndarray, n0: np.ndarray
) -> float:
    lb = _log_base(alpha, uniq)
    logp = beta * lb
    # log(1 - exp(logp)) computed stably; logp < 0 always holds interior.
    log1mp = np.log(-np.expm1(logp))
    return float(n1 @ logp + n0 @ log1mp)


def log_likelihood(params: ChoiceParams, data: ChoiceDataset) -> float:
    """Bernoulli log likelihood of the answers under the choice model.

    Returns ``-inf`` if any answer has probability zero under the
    parameters (cannot happen for interior data, kept as a sentinel).
    """
    uniq, n1, n0 = _grouped(data)
    return _ll_components(params.alpha, params.beta, uniq, n1, n0)


def fit_mle(
    data: ChoiceDataset,
    box: tuple[float, float] = DEFAULT_BOX,
    start: ChoiceParams | None = None,
) -> FitResult:
    """Maximize the log likelihood over (alpha, beta) inside ``box``.

    A 16x16 log-spaced scan picks the starting point (the supplied
    ``start`` competes with the scan winner), then a bounded Nelder-Mead
    simplex polishes it to 1e-8 on the parameters.  ``at_bound`` is set
    when the maximizer lies within 1e-6 of the box edge, which is the
    expected outcome for degenerate answer patterns (e.g. all y = 1).
    """
    lo, hi = box
    if not 0 < lo < hi:
        raise ValueError(f"box must satisfy 0 < lo < hi, got {box}")
    uniq, n1, n0 = _grouped(data)

    def nll(x: np.ndarray) -> float:
        return -_ll_components(float(x[0]), float(x[1]), uniq, n1, n0)

    nodes = np.geomspace(lo, hi, _SCAN_NODES)
    best_x = None
    best_val = math.inf
    for a in nodes:
        for b in nodes:
            val = nll(np.array([a, b]))
            if val < best_val:
                best_val = val
                best_x = np.array([a, b])
    if start is not None:
        x0 = np.clip(np.array([start.alpha, start.beta]), lo, hi)
        val = nll(x0)
        if val < best_val:
            best_val = val
            best_x = x0

    result = minimize(
        nll,
        best_x,
        method="Nelder-Mead",
        bounds=[(lo, hi), (lo, hi)],
        options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 4000, "maxfev": 8000},
    )
    a_hat, b_hat = float(result.x[0]), float(result.x[1])
    at_bound = any(
        min(abs(v - lo), abs(v - hi)) < _AT_BOUND_TOL for v in (a_hat, b_hat)
    )
    return FitResult(
        alpha_hat=a_hat,
        beta_hat=b_hat,
        log_likelihood=-float(result.fun),
        converged=bool(result.success),
        at_bound=at_bound,
    )


def _grid_log_likelihood(
    alphas: np.ndarray, betas: np.ndarray, data: ChoiceDataset
) -> np.ndarray:
    """Log likelihood evaluated on the full (alpha, beta) node grid."""
    uniq, n1, n0 = _grouped(data)
    lb = _log_base(alphas, uniq)  # (n_alpha, n_u)
    logp = lb[:, None, :] * betas[None, :, None]  # (n_alpha, n_beta, n_u)
    log1mp = np.log(-np.expm1(logp))
    return logp @ n1 + log1mp @ n0


def posterior_grid(
    data: ChoiceDataset,
    prior_alpha: GammaPrior = DEFAULT_PRIOR,
    prior_beta: GammaPrior = DEFAULT_PRIOR,
    grid: GridSpec = GridSpec(),
) -> PosteriorGrid:
    """Discretized joint posterior over (alpha, beta).

    Node mass is prior density times likelihood times the trapezoid cell
    area, all assembled in log space and rescaled by the maximum before
    exponentiating so the normalization cannot underflow.
    """
    alphas = grid.alpha_nodes()
    betas = grid.beta_nodes()
    log_post = (
        _grid_log_likelihood(alphas, betas, data)
        + prior_alpha.log_density(alphas)[:, None]
        + prior_beta.log_density(betas)[None, :]
        + np.log(_cell_widths(alphas))[:, None]
        + np.log(_cell_widths(betas))[None, :]
    )
    peak = float(np.max(log_post))
    if not math.isfinite(peak):
        raise ValueError("posterior mass vanished everywhere on the grid")
    weights = np.exp(log_post - peak)
    weights /= weights.sum()
    return PosteriorGrid(alpha_nodes=alphas, beta_nodes=betas, weights=weights)


def _posterior_centered_prob(posterior: PosteriorGrid, omega: float) -> float:
    """Posterior-averaged choice probability at offset omega, minus 1/2."""
    a = posterior.alpha_nodes
    b = posterior.beta_nodes
    s = (omega > 0) - (omega < 0)
    if s == 0:
        g = np.power(0.5, b)  # base is exactly 1/2 for every alpha
        avg = float(posterior.weights.sum(axis=0) @ g)
    else:
        base = (1.0 + s * np.power(abs(omega), a)) / 2.0
        g = np.power(base[:, None], b[None, :])
        avg = float(np.sum(posterior.weights * g))
    return avg - 0.5


def solve_omega_bayes(
    posterior: PosteriorGrid,
    tol: float = 1e-10,
    max_iter: int = 60,
) -> float:
    """Bayes indifference offset: root of the posterior-averaged centered
    choice probability, found by bisection over [-1, 1].

    The averaged curve is strictly increasing in omega with values -1/2
    and +1/2 at the endpoints, so a unique root always exists for a
    proper posterior.
    """
    lo, hi = -1.0, 1.0
    f_lo = _posterior_centered_prob(posterior, lo)
    f_hi = _posterior_centered_prob(posterior, hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0:
        raise NoRootError(
            "posterior-averaged choice curve has the same sign at -1 and +1; "
            "the posterior grid is not a proper distribution"
        )
    for _ in range(max_iter):
        mid = (lo + hi) / 2.0
        f_mid = _posterior_centered_prob(posterior, mid)
        if f_mid == 0.0:
            return mid
        if f_mid > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol:
            break
    return (lo + hi) / 2.0


def fit_offset(
    data: ChoiceDataset,
    method: EstimationMethod = "mle",
    prior_alpha: GammaPrior = DEFAULT_PRIOR,
    prior_beta: GammaPrior = DEFAULT_PRIOR,
    box: tuple[float, float] = DEFAULT_BOX,
    grid: GridSpec = GridSpec(),
    start: ChoiceParams | None = None,
) -> tuple[float, bool]:
    """Indifference offset for one dataset; returns (omega, at_bound)."""
    if method == "mle":
        fit = fit_mle(data, box=box, start=start)
        return solve_omega(fit.params()), fit.at_bound
    if method == "bayes":
        posterior = posterior_grid(data, prior_alpha, prior_beta, grid)
        return solve_omega_bayes(posterior), False
    raise ValueError(f"method must be 'mle' or 'bayes', got {method!r}")


def estimate_utility(
    data: ChoiceDataset,
    method: EstimationMethod = "mle",
    prior_alpha: GammaPrior = DEFAULT_PRIOR,
    prior_beta: GammaPrior = DEFAULT_PRIOR,
    box: tuple[float, float] = DEFAULT_BOX,
    grid: GridSpec = GridSpec(),
    start: ChoiceParams | None = None,
) -> UtilityPoint:
    """Fit the dataset and convert the offset into a utility point."""
    omega, at_bound = fit_offset(
        data,
        method=method,
        prior_alpha=prior_alpha,
        prior_beta=prior_beta,
        box=box,
        grid=grid,
        start=start,
    )
    return UtilityPoint(
        c=data.c,
        u=utility_from_omega(data.c, omega),
        omega=omega,
        disposition=risk_disposition(omega),
        method=method,
        at_bound=at_bound,
    )
