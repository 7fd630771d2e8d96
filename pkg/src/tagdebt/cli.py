"""Command-line entry point: ``tagdebt <subcommand>``."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from tagdebt.config import ConfigError, default_config, parse_config, serialize_config
from tagdebt.detection import ClassificationInput, DetectorError, default_registry, evaluate_detector, load_corpus, select_text
from tagdebt.detection.registry import UnknownPluginType
from tagdebt.forge import Issue, IssueState, RepoRef, parse_timestamp

EXPORT_REPO = RepoRef("local", "export")


def _load_config(path: Path | None):
    if path is None:
        return default_config()
    try:
        return parse_config(path.read_bytes())
    except ConfigError as exc:
        click.echo(f"error: {path}: {exc}", err=True)
        sys.exit(1)


def _issue_from_export(record: dict) -> Issue:
    created = parse_timestamp(record["created_at"]) if record.get("created_at") else None
    updated = parse_timestamp(record["updated_at"]) if record.get("updated_at") else None
    labels = [lbl["name"] if isinstance(lbl, dict) else lbl for lbl in record.get("labels", [])]
    extra = {}
    if created is not None:
        extra["created_at"] = created
        extra["updated_at"] = updated or created
    return Issue(
        repo=EXPORT_REPO,
        number=record["number"],
        title=record.get("title", ""),
        body=record.get("body") or "",
        labels=frozenset(labels),
        state=IssueState(record.get("state", "open")),
        **extra,
    )


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log at DEBUG level.")
def main(verbose: bool) -> None:
    """TagDebt: label self-admitted technical debt in issues."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.option("--bind", default="0.0.0.0:8000", show_default=True, help="HOST:PORT to listen on.")
@click.option("--fake-forge", is_flag=True, help="Serve against an in-memory forge (demo mode).")
@click.option("--repo", "repos", multiple=True, help="owner/name of an installed repo to scan for lingering issues.")
@click.option("--frequency", default=24, show_default=True, type=click.IntRange(min=1), help="Hours between lingering scans.")
def serve(bind: str, fake_forge: bool, repos: tuple[str, ...], frequency: int) -> None:
    """Run the webhook server and the lingering-issue scheduler."""
    from tagdebt.forge import FakeForge, GitHubForge
    from tagdebt.notifier import NotifyError, OutboxMailer, SmtpMailer, SmtpSettings
    from tagdebt.server import StartupError, run_server

    repo_refs = [RepoRef.parse(r) for r in repos]
    if fake_forge:
        forge = FakeForge()
        for ref in repo_refs:
            forge.add_repo(ref)
        installed = forge.installed_repos
    else:
        forge = GitHubForge()
        installed = repo_refs
    try:
        mailer = SmtpMailer(SmtpSettings.from_env())
    except NotifyError:
        click.echo("SMTP is not configured; emails will only be logged.", err=True)
        mailer = OutboxMailer()
    try:
        run_server(bind, forge, default_registry(), mailer=mailer, installed_repos=installed, frequency_hours=frequency)
    except StartupError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command("validate-config")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def validate_config(file: Path) -> None:
    """Check a config.json and print the effective (merged) configuration."""
    try:
        config = parse_config(file.read_bytes())
    except ConfigError as exc:
        click.echo(f"invalid configuration: {exc}", err=True)
        sys.exit(1)
    click.echo(serialize_config(config), nl=False)


@main.command("print-default-config")
def print_default_config() -> None:
    """Print the built-in default configuration."""
    click.echo(serialize_config(default_config()), nl=False)


@main.command()
@click.argument("issues_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="config.json to take detection settings from.")
def classify(issues_file: Path, config_file: Path | None) -> None:
    """Classify an exported issue list offline; prints NUMBER<TAB>LABEL per issue."""
    config = _load_config(config_file)
    try:
        detector = default_registry().create(config.detection)
    except (UnknownPluginType, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    records = json.loads(issues_file.read_text(encoding="utf-8"))
    for record in records:
        issue = _issue_from_export(record)
        text = select_text(issue, config.detection.analyzed_part)
        try:
            verdict = detector.classify(ClassificationInput(text, issue.repo, issue.number))
        except DetectorError as exc:
            click.echo(f"error: issue #{issue.number}: {exc}", err=True)
            sys.exit(1)
        click.echo(f"{issue.number}\t{verdict.wire_label}")


@main.command()
@click.argument("corpus_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="config.json to take detection settings from.")
def evaluate(corpus_file: Path, config_file: Path | None) -> None:
    """Score the configured detector on a labeled corpus (TD-class precision/recall/F1)."""
    config = _load_config(config_file)
    detector = default_registry().create(config.detection)
    m = evaluate_detector(detector, load_corpus(corpus_file))
    click.echo(f"precision\t{m.precision:.3f}\nrecall\t{m.recall:.3f}\nf1\t{m.f1:.3f}")
    click.echo(f"tp={m.tp} fp={m.fp} fn={m.fn} tn={m.tn}")


@main.command()
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="config.json placed in every simulated repo.")
def simulate(scenario_file: Path, config_file: Path | None) -> None:
    """Replay a scenario against the in-memory forge and print each handler outcome."""
    from tagdebt.gateway import GatewayError
    from tagdebt.simulate import run_scenario

    entries = json.loads(scenario_file.read_text(encoding="utf-8"))
    try:
        result = run_scenario(entries, config=config_file.read_bytes() if config_file else None)
    except (GatewayError, ValueError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for step in result.steps:
        click.echo(str(step))
    for message in result.outbox.sent:
        click.echo(f"email\t{', '.join(message.recipients)}\t{message.subject}")


if __name__ == "__main__":
    main()
