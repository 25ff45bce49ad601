"""Command-line front door: fit datasets, simulate subjects, emit curves,
replay sessions, and serve the HTTP API.

All results go to the requested output file (or stdout); diagnostics go
to stderr only.  Every subcommand is deterministic given its flags and
inputs, and exits 0 exactly when all requested outputs were fully
written.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import io as cfio
from .choice_model import ChoiceParams, GamblePoint, choice_prob_offset
from .consistency import isotonic_adjust
from .elicitation import compute_session_utilities
from .estimation import GammaPrior, estimate_utility
from .simulator import SyntheticSubject, simulate_choices
from .utility_forms import reliability_curve


def _float_list(ctx, param, value):
    if value is None:
        return None
    try:
        items = tuple(float(v) for v in value.split(",") if v.strip() != "")
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}")
    if not items:
        raise click.BadParameter("list must not be empty")
    return items


def _positive(ctx, param, value):
    if value is not None and value <= 0:
        raise click.BadParameter(f"{param.name} must be positive, got {value}")
    return value


@click.group()
def main() -> None:
    """Elicit and analyze the utility of a chance from binary choices."""


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(path_type=Path))
@click.option("--method", type=click.Choice(["mle", "bayes"]), default="mle", show_default=True)
@click.option("--isotonic", is_flag=True, help="Apply the monotone least-squares repair.")
@click.option("--prior-shape", type=float, default=2.0, show_default=True, callback=_positive)
@click.option("--prior-rate", type=float, default=2.0, show_default=True, callback=_positive)
@click.option("--box", nargs=2, type=float, default=(0.05, 20.0), show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def fit(data_path, method, isotonic, prior_shape, prior_rate, box, out_path) -> None:
    """Fit a c,p,y dataset and write the utility curve."""
    try:
        datasets = cfio.read_choice_data(data_path)
    except FileNotFoundError:
        click.echo(f"error: no such file: {data_path}", err=True)
        sys.exit(1)
    except cfio.DatasetFormatError as exc:
        click.echo(f"error: {data_path}: {exc}", err=True)
        sys.exit(1)
    prior = GammaPrior(shape=prior_shape, rate=prior_rate)
    points = []
    for data in sorted(datasets, key=lambda d: d.c):
        point = estimate_utility(
            data, method=method, prior_alpha=prior, prior_beta=prior, box=tuple(box)
        )
        if point.at_bound:
            click.echo(
                f"warning: fit for c = {data.c:g} ended on the parameter box edge; "
                "treat the offset with caution",
                err=True,
            )
        points.append(point)
    if isotonic:
        points = list(isotonic_adjust(points))
    cfio.write_utility_curve(out_path, points, include_at_bound=True)


@main.command()
@click.option("--alpha", type=float, required=True, callback=_positive)
@click.option("--beta", type=float, required=True, callback=_positive)
@click.option("--c-grid", required=True, callback=_float_list)
@click.option("--p-grid", required=True, callback=_float_list)
@click.option("--n", type=int, default=1, show_default=True, callback=_positive,
              help="Passes through the p grid per c value.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def simulate(alpha, beta, c_grid, p_grid, n, seed, out_path) -> None:
    """Sample binary answers from a synthetic subject."""
    try:
        subject = SyntheticSubject(params=ChoiceParams(alpha, beta), seed=seed)
        schedule = [GamblePoint(c=c, p=p) for c in c_grid for _ in range(n) for p in p_grid]
    except ValueError as exc:
        raise click.UsageError(str(exc))
    datasets = simulate_choices(subject, schedule)
    rows = [(obs.c, obs.p, obs.y) for data in datasets for obs in data.observations]
    cfio.write_choice_data(out_path, rows)


@main.command()
@click.option("--kind", type=click.Choice(["archetypal", "omnibus", "choice"]), required=True)
@click.option("--beta-u", type=float, default=1.0, show_default=True, callback=_positive)
@click.option("--mission-time", "x", type=float, default=1.0, show_default=True, callback=_positive)
@click.option("--delta", type=float, default=0.1, show_default=True, callback=_positive)
@click.option("--alpha", type=float, default=1.0, show_default=True, callback=_positive)
@click.option("--beta", type=float, default=1.0, show_default=True, callback=_positive)
@click.option("--steps", type=int, default=101, show_default=True, callback=_positive)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def curves(kind, beta_u, x, delta, alpha, beta, steps, out_path) -> None:
    """Emit model curves over a lattice for external plotting."""
    if steps < 2:
        raise click.UsageError("--steps must be at least 2")
    if kind == "choice":
        params = ChoiceParams(alpha, beta)
        rows = []
        for i in range(steps):
            d = -1.0 + 2.0 * i / (steps - 1)
            rows.append((d, choice_prob_offset(params, d)))
        cfio.atomic_write_text(out_path, cfio.format_choice_curve(rows))
        return
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # the fbar = 1 lattice endpoint saturates
        rows = reliability_curve(
            (i / (steps - 1) for i in range(steps)), x=x, beta_u=beta_u, delta=delta
        )
    cfio.atomic_write_text(out_path, cfio.format_reliability_curve(rows))


@main.command()
@click.option("--session", "session_path", required=True, type=click.Path(path_type=Path))
@click.option("--method", type=click.Choice(["mle", "bayes"]), default=None,
              help="Override the method stored with the session.")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Write the curve here instead of stdout.")
def replay(session_path, method, out_path) -> None:
    """Recompute a saved session's utility curve from its answer log."""
    try:
        session = cfio.load_session(session_path)
    except FileNotFoundError:
        click.echo(f"error: no such file: {session_path}", err=True)
        sys.exit(1)
    except cfio.SessionDocumentError as exc:
        click.echo(f"error: {session_path}: {exc}", err=True)
        sys.exit(1)
    points = compute_session_utilities(session, method=method)
    text = cfio.format_utility_curve(points, include_at_bound=True)
    if out_path is None:
        click.echo(text, nl=False)
    else:
        cfio.atomic_write_text(out_path, text)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--store", "store_dir", required=True, type=click.Path(path_type=Path),
              help="Directory holding one JSON document per session.")
def serve(host, port, store_dir) -> None:
    """Run the live-session HTTP service."""
    import uvicorn

    from .service import build_app

    uvicorn.run(build_app(store_dir), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
