"""Command-line surface: validation, queries, risk tables, ratings, serving.

Thin argument-parsing layer over the library so the CLI, the HTTP service,
and direct library calls all run the same code path. Numeric output is
fixed at 9 decimal places for reproducible golden tests.

Exit codes: 0 success, 1 domain error (name on stderr), 2 unreadable or
unparsable input.
"""

from __future__ import annotations

import sys

import click

from .admiralty import decision_category, parse_rating
from .errors import ParseError, RtbError, UnknownAttributeGroupError
from .example_models import bundled_model_dir, load_rates, rates_for
from .assessment import ensemble_risk, risk_of_bias
from .inference import query_association, query_counterfactual, query_intervention
from .model import load_network, validate_network


def _fail(err: RtbError, code: int = 1):
    click.echo(err.name, err=True)
    sys.exit(code)


def _load(model_path: str):
    try:
        return load_network(model_path)
    except FileNotFoundError:
        click.echo("file-not-found", err=True)
        sys.exit(2)
    except IsADirectoryError:
        click.echo("file-not-found", err=True)
        sys.exit(2)
    except ParseError as err:
        _fail(err, code=2)


def _parse_assignments(raw: str | None, flag: str) -> dict[str, str]:
    if not raw:
        return {}
    out: dict[str, str] = {}
    for part in raw.split(","):
        if "=" not in part:
            raise click.UsageError(f"{flag} entries must be NAME=state, got {part!r}")
        name, state = part.split("=", 1)
        out[name.strip()] = state.strip()
    return out


@click.group()
def main():
    """Risk/Trust/Bias decision support over discrete causal networks."""


@main.command()
@click.argument("model_path", type=click.Path())
def validate(model_path):
    """Check a model file; print one NODE<TAB>RULE<TAB>DETAIL line per violation."""
    net = _load(model_path)
    violations = validate_network(net)
    for v in violations:
        click.echo(v.as_line())
    sys.exit(0 if not violations else 1)


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--target", required=True)
@click.option("--evidence", "evidence_raw", default=None, help="Comma-separated NAME=state observations.")
@click.option("--do", "do_raw", default=None, help="Comma-separated NAME=state interventions.")
@click.option("--level", type=click.Choice(["assoc", "do", "cf"]), default="assoc")
def query(model_path, target, evidence_raw, do_raw, level):
    """Posterior of TARGET, printed as STATE<TAB>PROBABILITY lines."""
    net = _load(model_path)
    evidence = _parse_assignments(evidence_raw, "--evidence")
    do = _parse_assignments(do_raw, "--do")
    if level == "assoc" and do:
        raise click.UsageError("--do requires --level do or cf")
    try:
        if level == "assoc":
            post = query_association(net, target, evidence)
        elif level == "do":
            post = query_intervention(net, target, do, evidence)
        else:
            post = query_counterfactual(net, target, do, evidence)
    except RtbError as err:
        _fail(err)
    for state, p in post.probabilities.items():
        click.echo(f"{state}\t{p:.9f}")


@main.command()
@click.option("--rates", "rates_path", required=True, type=click.Path())
@click.option("--impact-fmr", required=True, type=float)
@click.option("--impact-fnmr", required=True, type=float)
@click.option("--subject", "subject_raw", required=True, help="Comma-separated ATTRIBUTE=group pairs.")
def risk(rates_path, impact_fmr, impact_fnmr, subject_raw):
    """Per-attribute risk lines for a subject, then the ensemble sum."""
    try:
        table = load_rates(rates_path)
    except FileNotFoundError:
        click.echo("file-not-found", err=True)
        sys.exit(2)
    subject = _parse_assignments(subject_raw, "--subject")
    values = []
    try:
        for attribute, group in subject.items():
            r = rates_for(table, attribute, group)
            values.append((attribute, risk_of_bias(impact_fmr, impact_fnmr, r)))
    except UnknownAttributeGroupError as err:
        _fail(err)
    for attribute, value in values:
        click.echo(f"{attribute}\t{value:.9f}")
    click.echo(f"ensemble\t{ensemble_risk([v for _, v in values]):.9f}")


@main.command()
@click.option("--rating", "rating_raw", required=True)
def admiralty(rating_raw):
    """Parse a reliability+credibility rating and print its decision category."""
    try:
        rating = parse_rating(rating_raw)
    except RtbError as err:
        _fail(err)
    click.echo(f"{rating}\t{decision_category(rating).value}")


@main.command()
@click.option("--port", default=8000, type=int)
@click.option("--models", "models_dir", default=None, type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1")
@click.option("--snapshots", "snapshot_dir", default=None, type=click.Path(file_okay=False))
def serve(port, models_dir, host, snapshot_dir):
    """Run the HTTP service (bundled models unless --models is given)."""
    import uvicorn

    from .service import create_app

    try:
        app = create_app(model_dir=models_dir or bundled_model_dir(), snapshot_dir=snapshot_dir)
    except (RtbError, OSError) as err:
        click.echo(f"startup failed: {err}", err=True)
        sys.exit(1)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
