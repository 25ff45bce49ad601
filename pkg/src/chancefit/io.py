"""Delimited-text and document interchange.

One format per artifact: choice datasets as ``c,p,y`` rows, posteriors
as ``alpha,beta,weight``, utility curves as
``c,u,omega,disposition,method[,at_bound]``, reliability curves as
``fbar,utility,disutility,omnibus``, and sessions as self-contained
versioned JSON documents.  All file writes go through a
write-temp-then-rename so partial output never lands under the target
name.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

from .consistency import UtilityPoint
from .elicitation import (
    EstimationSettings,
    Session,
    create_session,
    record_choice,
)
from .estimation import ChoiceDataset, ChoiceObservation, GridSpec, PosteriorGrid

SCHEMA_VERSION = 1


class DatasetFormatError(ValueError):
    """A delimited input file failed to parse; message carries the line."""


class SessionDocumentError(ValueError):
    """A session document is unreadable, tampered with, or wrong version."""


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write text so the target either keeps its old content or gets all
    of the new content, never a prefix."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- choice datasets ---------------------------------------------------


def format_choice_rows(rows: Iterable[tuple[float, float, int]]) -> str:
    lines = ["c,p,y"]
    for c, p, y in rows:
        lines.append(f"{c!r},{p!r},{int(y)}")
    return "\n".join(lines) + "\n"


def write_choice_data(path: str | os.PathLike, rows: Iterable[tuple[float, float, int]]) -> None:
    atomic_write_text(path, format_choice_rows(rows))


def parse_choice_data(text: str) -> list[ChoiceDataset]:
    """Parse ``c,p,y`` rows into one dataset per distinct c (file order).

    Raises :class:`DatasetFormatError` with the 1-based line number of
    the first malformed row.
    """
    lines = [ln for ln in text.splitlines()]
    if not lines or lines[0].strip() == "":
        raise DatasetFormatError("line 1: expected header 'c,p,y', file is empty")
    header = [col.strip() for col in lines[0].split(",")]
    if header != ["c", "p", "y"]:
        raise DatasetFormatError(f"line 1: expected header 'c,p,y', got {lines[0]!r}")
    by_c: dict[float, list[ChoiceObservation]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise DatasetFormatError(f"line {lineno}: expected 3 comma-separated fields, got {line!r}")
        try:
            c = float(parts[0])
            p = float(parts[1])
            y = int(parts[2])
            obs = ChoiceObservation(c=c, p=p, y=y)
        except ValueError as exc:
            raise DatasetFormatError(f"line {lineno}: {exc}") from exc
        by_c.setdefault(c, []).append(obs)
    if not by_c:
        raise DatasetFormatError("line 2: no data rows present")
    return [ChoiceDataset(c=c, observations=tuple(obs)) for c, obs in by_c.items()]


def read_choice_data(path: str | os.PathLike) -> list[ChoiceDataset]:
    return parse_choice_data(Path(path).read_text())


# -- utility curves ----------------------------------------------------


def format_utility_curve(points: Sequence[UtilityPoint], include_at_bound: bool = False) -> str:
    header = "c,u,omega,disposition,method"
    if include_at_bound:
        header += ",at_bound"
    lines = [header]
    for pt in points:
        row = f"{pt.c!r},{pt.u!r},{pt.omega!r},{pt.disposition},{pt.method}"
        if include_at_bound:
            row += f",{int(pt.at_bound)}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def write_utility_curve(
    path: str | os.PathLike, points: Sequence[UtilityPoint], include_at_bound: bool = False
) -> None:
    atomic_write_text(path, format_utility_curve(points, include_at_bound))


def parse_utility_curve(text: str) -> list[UtilityPoint]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("c,u,omega,disposition,method"):
        raise DatasetFormatError(f"line 1: unexpected utility-curve header {lines[0] if lines else ''!r}")
    has_flag = lines[0].strip().endswith(",at_bound")
    points = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        expected = 6 if has_flag else 5
        if len(parts) != expected:
            raise DatasetFormatError(f"line {lineno}: expected {expected} fields, got {line!r}")
        if parts[3] not in ("prone", "neutral", "averse"):
            raise DatasetFormatError(f"line {lineno}: unknown disposition {parts[3]!r}")
        if parts[4] not in ("mle", "bayes", "adjusted"):
            raise DatasetFormatError(f"line {lineno}: unknown method {parts[4]!r}")
        try:
            points.append(
                UtilityPoint(
                    c=float(parts[0]),
                    u=float(parts[1]),
                    omega=float(parts[2]),
                    disposition=parts[3],  # type: ignore[arg-type]
                    method=parts[4],  # type: ignore[arg-type]
                    at_bound=bool(int(parts[5])) if has_flag else False,
                )
            )
        except ValueError as exc:
            raise DatasetFormatError(f"line {lineno}: {exc}") from exc
    return points


# -- posterior grids ---------------------------------------------------


def format_posterior(grid: PosteriorGrid) -> str:
    lines = ["alpha,beta,weight"]
    for i, a in enumerate(grid.alpha_nodes):
        for j, b in enumerate(grid.beta_nodes):
            lines.append(f"{float(a)!r},{float(b)!r},{float(grid.weights[i, j])!r}")
    return "\n".join(lines) + "\n"


def write_posterior(path: str | os.PathLike, grid: PosteriorGrid) -> None:
    atomic_write_text(path, format_posterior(grid))


# -- reliability / choice curves ----------------------------------------


def format_reliability_curve(rows: Iterable[tuple[float, float, float, float]]) -> str:
    lines = ["fbar,utility,disutility,omnibus"]
    for fbar, u, d, o in rows:
        lines.append(f"{fbar!r},{u!r},{d!r},{o!r}")
    return "\n".join(lines) + "\n"


def format_choice_curve(rows: Iterable[tuple[float, float]]) -> str:
    lines = ["delta,prob"]
    for delta, prob in rows:
        lines.append(f"{delta!r},{prob!r}")
    return "\n".join(lines) + "\n"


# -- session documents ---------------------------------------------------


def session_to_document(session: Session) -> dict:
    """Self-contained JSON-ready description of a session."""
    return {
        "schema_version": SCHEMA_VERSION,
        "id": session.id,
        "mode": session.mode,
        "seed": session.seed,
        "c_grid": list(session.c_grid),
        "p_grid": list(session.p_grid),
        "adjacent_p_grid": list(session.adjacent_p_grid),
        "settings": {
            "method": session.settings.method,
            "prior_shape": session.settings.prior_shape,
            "prior_rate": session.settings.prior_rate,
            "box": list(session.settings.box),
            "grid": {
                "alpha_lo": session.settings.grid.alpha_lo,
                "alpha_hi": session.settings.grid.alpha_hi,
                "beta_lo": session.settings.grid.beta_lo,
                "beta_hi": session.settings.grid.beta_hi,
                "n_alpha": session.settings.grid.n_alpha,
                "n_beta": session.settings.grid.n_beta,
            },
        },
        "schedule": session.schedule(),
        "answers": [
            {
                "id": ans.spec.id,
                "y": ans.y,
                "timestamp": ans.timestamp,
                "prize_lo": ans.spec.prize_lo,
                "prize_hi": ans.spec.prize_hi,
            }
            for ans in session.answers()
        ],
        "estimates": [
            {
                "c": pt.c,
                "u": pt.u,
                "omega": pt.omega,
                "disposition": pt.disposition,
                "method": pt.method,
                "at_bound": pt.at_bound,
            }
            for pt in session.estimates
        ],
    }


def session_from_document(doc: dict) -> Session:
    """Rebuild a session from its document and replay the answer log.

    The schedule is re-derived from the stored configuration and seed
    and must match the stored schedule (including the prize pairs seen
    at answer time); any mismatch means the document was corrupted.
    """
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SessionDocumentError(
            f"unsupported schema_version {version!r}; this build reads version {SCHEMA_VERSION}"
        )
    try:
        settings_doc = doc["settings"]
        grid_doc = settings_doc["grid"]
        settings = EstimationSettings(
            method=settings_doc["method"],
            prior_shape=settings_doc["prior_shape"],
            prior_rate=settings_doc["prior_rate"],
            box=tuple(settings_doc["box"]),
            grid=GridSpec(**grid_doc),
        )
        session = create_session(
            c_grid=doc["c_grid"],
            p_grid=doc["p_grid"],
            mode=doc["mode"],
            seed=doc["seed"],
            adjacent_p_grid=doc["adjacent_p_grid"],
            settings=settings,
            session_id=doc["id"],
        )
        rebuilt = session.schedule()
        if rebuilt != doc["schedule"]:
            raise SessionDocumentError(
                "stored schedule does not match the one derived from the "
                "stored seed and grids; the document was altered"
            )
        for ans in doc["answers"]:
            record_choice(session, ans["id"], ans["y"], timestamp=ans["timestamp"])
            recorded = session.answers()[-1].spec
            if (recorded.prize_lo, recorded.prize_hi) != (ans["prize_lo"], ans["prize_hi"]):
                raise SessionDocumentError(
                    f"replayed prizes for gamble {ans['id']} differ from the recorded "
                    "ones; the document was altered"
                )
    except SessionDocumentError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SessionDocumentError(f"malformed session document: {exc}") from exc
    return session


def save_session(path: str | os.PathLike, session: Session) -> None:
    atomic_write_text(path, json.dumps(session_to_document(session), indent=2))


def load_session(path: str | os.PathLike) -> Session:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SessionDocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SessionDocumentError("session document must be a JSON object")
    return session_from_document(doc)
