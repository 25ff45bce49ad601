"""Live elicitation sessions: scheduling, answers, and utility estimates.

A session offers one binary gamble at a time.  End-point gambles pay the
anchor utilities 0 and 1; adjacent gambles pay previously elicited
utilities of neighboring sure values, which lets later answers ride on
earlier ones.  Presentation order of the win chances within each sure
value is shuffled by the session seed so consecutive answers can be
treated as independent.

In adjacent mode the schedule is a bisection tree over the sorted sure
values: the median gets an end-point block, then each sub-interval is
bisected recursively, every block paying the utilities of its interval
endpoints.  A block's gambles are only emitted once both endpoint
utilities have been estimated.

A session is a single-writer state machine: concurrent readers are fine,
mutations must be serialized per session (the HTTP service does this).
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from .choice_model import risk_disposition
from .consistency import UtilityPoint, isotonic_adjust
from .estimation import (
    DEFAULT_BOX,
    ChoiceDataset,
    ChoiceObservation,
    GammaPrior,
    GridSpec,
    estimate_utility,
    fit_offset,
)

GambleKind = Literal["end_point", "adjacent"]
SessionMode = Literal["end_point", "adjacent", "mixed"]


class UnknownGambleError(KeyError):
    """The gamble id is not part of this session's schedule."""


class AlreadyAnsweredError(ValueError):
    """The gamble id has already been answered; answers are immutable."""


class GambleLockedError(ValueError):
    """The gamble's prize utilities have not been estimated yet."""


class EstimationFailedError(RuntimeError):
    """Estimating one sure value failed; carries the failing c."""

    def __init__(self, c: float, cause: Exception):
        super().__init__(f"estimation failed for c = {c}: {cause}")
        self.c = c
        self.cause = cause


@dataclass(frozen=True)
class GambleSpec:
    """One concrete binary choice: a sure chance against a two-prize gamble."""

    id: str
    c: float
    p: float
    prize_hi: float
    prize_lo: float
    kind: GambleKind

    def __post_init__(self) -> None:
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"c must be interior to (0, 1), got {self.c}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must be interior to (0, 1), got {self.p}")
        if self.kind == "end_point":
            if self.prize_hi != 1.0 or self.prize_lo != 0.0:
                raise ValueError("end-point gambles must pay the anchors 1 and 0")
        else:
            if not 0.0 <= self.prize_lo < self.prize_hi <= 1.0:
                raise ValueError(
                    f"adjacent prizes must satisfy 0 <= lo < hi <= 1, "
                    f"got lo={self.prize_lo}, hi={self.prize_hi}"
                )


@dataclass(frozen=True)
class EstimationSettings:
    """Fit configuration shared by a whole session."""

    method: Literal["mle", "bayes"] = "mle"
    prior_shape: float = 2.0
    prior_rate: float = 2.0
    box: tuple[float, float] = DEFAULT_BOX
    grid: GridSpec = GridSpec()

    def priors(self) -> tuple[GammaPrior, GammaPrior]:
        prior = GammaPrior(shape=self.prior_shape, rate=self.prior_rate)
        return prior, prior


@dataclass(frozen=True)
class Answer:
    spec: GambleSpec
    y: int
    timestamp: float


@dataclass
class _Block:
    """All gambles sharing one sure value and one prize pair."""

    c: float
    kind: GambleKind
    lo_c: float  # sure value whose utility is the low prize (0.0 = anchor)
    hi_c: float  # sure value whose utility is the high prize (1.0 = anchor)
    gamble_ids: list[str] = field(default_factory=list)
    ps: list[float] = field(default_factory=list)
    prizes: tuple[float, float] | None = None  # (lo, hi), resolved at unlock
    index: dict[str, int] = field(default_factory=dict)  # gamble id -> position
    cursor: int = 0  # first position that may still be unanswered
    answered: int = 0


def _bisect_order(cs: Sequence[float], lo: float, hi: float) -> list[tuple[float, float, float]]:
    """(c, lo_c, hi_c) triples in recursive-bisection (preorder) order."""
    if not cs:
        return []
    mid = (len(cs) - 1) // 2
    c = cs[mid]
    out = [(c, lo, hi)]
    out += _bisect_order(cs[:mid], lo, c)
    out += _bisect_order(cs[mid + 1 :], c, hi)
    return out


class Session:
    """Evolving state of one elicitation run.

    Construct through :func:`create_session`; mutate only through
    :func:`record_choice`.
    """

    def __init__(
        self,
        session_id: str,
        mode: SessionMode,
        c_grid: tuple[float, ...],
        p_grid: tuple[float, ...],
        adjacent_p_grid: tuple[float, ...],
        seed: int,
        settings: EstimationSettings,
    ):
        self.id = session_id
        self.mode = mode
        self.c_grid = c_grid
        self.p_grid = p_grid
        self.adjacent_p_grid = adjacent_p_grid
        self.seed = seed
        self.settings = settings
        self.estimates: tuple[UtilityPoint, ...] = ()
        self._blocks: list[_Block] = []
        self._block_of: dict[str, _Block] = {}
        self._answers: dict[str, Answer] = {}
        self._answer_order: list[str] = []
        # Running per-block estimates keyed by (kind, c); used to resolve
        # adjacent prizes during the bootstrap.
        self._running: dict[tuple[str, float], UtilityPoint] = {}
        self._build_schedule()

    # -- schedule -----------------------------------------------------

    def _build_schedule(self) -> None:
        sorted_c = tuple(sorted(self.c_grid))
        if self.mode == "end_point":
            blocks = [_Block(c=c, kind="end_point", lo_c=0.0, hi_c=1.0) for c in self.c_grid]
            grids = [self.p_grid] * len(blocks)
        elif self.mode == "adjacent":
            blocks = []
            for c, lo, hi in _bisect_order(sorted_c, 0.0, 1.0):
                kind: GambleKind = "end_point" if (lo, hi) == (0.0, 1.0) else "adjacent"
                blocks.append(_Block(c=c, kind=kind, lo_c=lo, hi_c=hi))
            grids = [self.adjacent_p_grid] * len(blocks)
        elif self.mode == "mixed":
            blocks = [_Block(c=c, kind="end_point", lo_c=0.0, hi_c=1.0) for c in self.c_grid]
            grids = [self.p_grid] * len(blocks)
            for idx, c in enumerate(sorted_c):
                lo = sorted_c[idx - 1] if idx > 0 else 0.0
                hi = sorted_c[idx + 1] if idx < len(sorted_c) - 1 else 1.0
                blocks.append(_Block(c=c, kind="adjacent", lo_c=lo, hi_c=hi))
                grids.append(self.adjacent_p_grid)
        else:
            raise ValueError(f"unknown mode {self.mode!r}")

        counter = 0
        for block_idx, (block, grid) in enumerate(zip(blocks, grids)):
            order = np.random.default_rng([self.seed, block_idx]).permutation(len(grid))
            for j in order:
                gid = f"g{counter:04d}"
                counter += 1
                block.index[gid] = len(block.gamble_ids)
                block.gamble_ids.append(gid)
                block.ps.append(grid[j])
                self._block_of[gid] = block
            if block.kind == "end_point":
                block.prizes = (0.0, 1.0)
        self._blocks = blocks

    # -- read-only views ----------------------------------------------

    @property
    def total_gambles(self) -> int:
        return len(self._block_of)

    @property
    def answered_count(self) -> int:
        return len(self._answers)

    @property
    def pending_count(self) -> int:
        return self.total_gambles - self.answered_count

    def is_complete(self) -> bool:
        return self.pending_count == 0

    def answers(self) -> tuple[Answer, ...]:
        return tuple(self._answers[gid] for gid in self._answer_order)

    def schedule(self) -> list[dict]:
        """Flat schedule description (id, c, p, kind), in plan order."""
        rows = []
        for block in self._blocks:
            for gid, p in zip(block.gamble_ids, block.ps):
                rows.append({"id": gid, "c": block.c, "p": p, "kind": block.kind})
        return rows

    # -- prize resolution ----------------------------------------------

    def _utility_of(self, ref_c: float, for_mixed: bool) -> float | None:
        if ref_c == 0.0:
            return 0.0
        if ref_c == 1.0:
            return 1.0
        if for_mixed:
            curve = self._mixed_prize_curve()
            return None if curve is None else curve.get(ref_c)
        point = self._running.get(("end_point", ref_c)) or self._running.get(
            ("adjacent", ref_c)
        )
        return None if point is None else point.u

    def _mixed_prize_curve(self) -> dict[float, float] | None:
        """Monotone end-point utilities for resolving mixed-mode prizes.

        Available once every end-point block is answered; isotonic
        adjustment keeps neighbor prizes ordered.
        """
        points = []
        for c in sorted(self.c_grid):
            pt = self._running.get(("end_point", c))
            if pt is None:
                return None
            points.append(pt)
        adjusted = isotonic_adjust(points)
        return {pt.c: pt.u for pt in adjusted}

    def _resolve_block(self, block: _Block) -> bool:
        """Fill in the block's prize pair if its dependencies are met."""
        if block.prizes is not None:
            return True
        for_mixed = self.mode == "mixed"
        lo = self._utility_of(block.lo_c, for_mixed)
        hi = self._utility_of(block.hi_c, for_mixed)
        if lo is None or hi is None:
            return False
        if not lo < hi:
            raise EstimationFailedError(
                block.c,
                ValueError(
                    f"prize utilities collapsed: U({block.lo_c}) = {lo} is not "
                    f"below U({block.hi_c}) = {hi}"
                ),
            )
        block.prizes = (lo, hi)
        return True

    def _materialize(self, block: _Block, gid: str) -> GambleSpec:
        assert block.prizes is not None
        idx = block.index[gid]
        return GambleSpec(
            id=gid,
            c=block.c,
            p=block.ps[idx],
            prize_lo=block.prizes[0],
            prize_hi=block.prizes[1],
            kind=block.kind,
        )

    # -- estimation ----------------------------------------------------

    def _block_answers(self, block: _Block) -> list[Answer]:
        return [self._answers[g] for g in block.gamble_ids if g in self._answers]

    def _estimate_block(self, block: _Block, settings: EstimationSettings) -> UtilityPoint:
        answers = self._block_answers(block)
        if not answers:
            raise EstimationFailedError(block.c, ValueError("no answers recorded"))
        prior_a, prior_b = settings.priors()
        try:
            if block.kind == "end_point":
                data = ChoiceDataset(
                    c=block.c,
                    observations=tuple(
                        ChoiceObservation(block.c, ans.spec.p, ans.y) for ans in answers
                    ),
                )
                return estimate_utility(
                    data,
                    method=settings.method,
                    prior_alpha=prior_a,
                    prior_beta=prior_b,
                    box=settings.box,
                    grid=settings.grid,
                )
            # Adjacent fit happens on the interval-normalized scale; the
            # recorded prize pair then maps the result back to utility.
            u_lo, u_hi = answers[0].spec.prize_lo, answers[0].spec.prize_hi
            c_norm = (block.c - block.lo_c) / (block.hi_c - block.lo_c)
            data = ChoiceDataset(
                c=c_norm,
                observations=tuple(
                    ChoiceObservation(c_norm, ans.spec.p, ans.y) for ans in answers
                ),
            )
            omega, at_bound = fit_offset(
                data,
                method=settings.method,
                prior_alpha=prior_a,
                prior_beta=prior_b,
                box=settings.box,
                grid=settings.grid,
            )
            p_star = min(1.0, max(0.0, c_norm + omega))
            u = p_star * u_hi + (1.0 - p_star) * u_lo
            effective = u - block.c
            return UtilityPoint(
                c=block.c,
                u=u,
                omega=effective,
                disposition=risk_disposition(effective),
                method=settings.method,
                at_bound=at_bound,
            )
        except EstimationFailedError:
            raise
        except Exception as exc:
            raise EstimationFailedError(block.c, exc) from exc

    def _note_block_complete(self, block: _Block) -> None:
        if block.answered < len(block.gamble_ids):
            return
        if self.mode == "end_point":
            return  # estimates are computed on demand, nothing depends on them
        self._running[(block.kind, block.c)] = self._estimate_block(block, self.settings)


def create_session(
    c_grid: Sequence[float],
    p_grid: Sequence[float],
    mode: SessionMode = "end_point",
    seed: int = 0,
    adjacent_p_grid: Sequence[float] | None = None,
    settings: EstimationSettings = EstimationSettings(),
    session_id: str | None = None,
) -> Session:
    """Build the full gamble schedule for one subject.

    Grids must be strictly interior to (0, 1): the boundary answers are
    forced by rationality and carry no information.  The per-c
    presentation order of win chances is shuffled deterministically from
    the seed.
    """
    cs = tuple(float(c) for c in c_grid)
    ps = tuple(float(p) for p in p_grid)
    adj = tuple(float(p) for p in adjacent_p_grid) if adjacent_p_grid is not None else ps
    if not cs or not ps or not adj:
        raise ValueError("grids must be non-empty")
    for name, values in (("c", cs), ("p", ps), ("adjacent p", adj)):
        if any(not 0.0 < v < 1.0 for v in values):
            raise ValueError(f"{name} grid values must be interior to (0, 1), got {values}")
    if len(set(cs)) != len(cs):
        raise ValueError(f"c grid must not contain duplicates, got {cs}")
    return Session(
        session_id=session_id or uuid.uuid4().hex,
        mode=mode,
        c_grid=cs,
        p_grid=ps,
        adjacent_p_grid=adj,
        seed=int(seed),
        settings=settings,
    )


def next_gamble(session: Session) -> GambleSpec | None:
    """The gamble to present next, or None when the session is complete.

    Does not mutate the session: the same gamble is returned until it is
    answered, so an interrupted subject resumes where they left off.
    Blocks whose prize utilities are not yet estimated are skipped.
    """
    for block in session._blocks:
        if block.answered == len(block.gamble_ids):
            continue
        if not session._resolve_block(block):
            continue
        while block.gamble_ids[block.cursor] in session._answers:
            block.cursor += 1
        return session._materialize(block, block.gamble_ids[block.cursor])
    return None


def record_choice(
    session: Session, gamble_id: str, y: int, timestamp: float | None = None
) -> Session:
    """Record a binary answer for a pending gamble.

    Re-recording an id is an error; answers are immutable.  The
    timestamp is informational only and never feeds estimation.
    """
    if y not in (0, 1):
        raise ValueError(f"y must be 0 or 1, got {y}")
    block = session._block_of.get(gamble_id)
    if block is None:
        raise UnknownGambleError(gamble_id)
    if gamble_id in session._answers:
        raise AlreadyAnsweredError(f"gamble {gamble_id} has already been answered")
    if not session._resolve_block(block):
        raise GambleLockedError(
            f"gamble {gamble_id} is not yet available: prize utilities for "
            f"c = {block.c} depend on unanswered gambles"
        )
    spec = session._materialize(block, gamble_id)
    session._answers[gamble_id] = Answer(
        spec=spec, y=int(y), timestamp=time.time() if timestamp is None else timestamp
    )
    session._answer_order.append(gamble_id)
    block.answered += 1
    session._note_block_complete(block)
    return session


def compute_session_utilities(
    session: Session,
    method: Literal["mle", "bayes"] | None = None,
    prior_shape: float | None = None,
    prior_rate: float | None = None,
    box: tuple[float, float] | None = None,
    isotonic: bool = False,
) -> tuple[UtilityPoint, ...]:
    """Recompute the utility curve from the recorded answers.

    Every sure value with at least one answer gets a point; adjacent
    blocks are refit against the prize pair actually presented, so the
    result is reproducible from the answer log alone.  In mixed mode the
    adjacent refinement wins over the end-point fit for the same c.
    The curve (sorted by c) is stored on ``session.estimates``.
    """
    settings = session.settings
    overrides = {}
    if method is not None:
        overrides["method"] = method
    if prior_shape is not None:
        overrides["prior_shape"] = prior_shape
    if prior_rate is not None:
        overrides["prior_rate"] = prior_rate
    if box is not None:
        overrides["box"] = box
    if overrides:
        settings = replace(settings, **overrides)

    by_c: dict[float, UtilityPoint] = {}
    for block in session._blocks:
        if not session._block_answers(block):
            continue
        point = session._estimate_block(block, settings)
        if block.kind == "adjacent" or block.c not in by_c:
            by_c[block.c] = point
    points = tuple(by_c[c] for c in sorted(by_c))
    if isotonic:
        points = isotonic_adjust(points)
    session.estimates = points
    return points


def answers_as_rows(session: Session) -> list[tuple[float, float, int]]:
    """Recorded answers as (c, p, y) rows in answer order."""
    return [(a.spec.c, a.spec.p, a.y) for a in session.answers()]
