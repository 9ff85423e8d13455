"""Command-line entry point.

Subcommands: validate a framework file, score an answers file offline, serve
the HTTP API, and write demo fixtures. Offline scoring and the service run
the same aggregation code, so a finalized API session and `secready score`
on the same answers agree to the last bit.

Exit codes are the machine contract: 0 success, 1 domain-level failure
(violations found, strict scoring incomplete), 2 unusable input or
environment (unreadable/unparseable files, corrupt log, busy port). Every
flag can also be set via SECREADY_* environment variables.
"""

from __future__ import annotations

import socket
import sys
from pathlib import Path
from typing import Optional

import click
import yaml

from . import demo, reporting
from .scoring import (
    AnswerSet,
    IncompleteAnswersError,
    NoAnswersError,
    ScoringError,
    aggregate,
    predicate_of,
    to_percent,
)
from .serialize import canonical_json, fmt_percent, fmt_score
from .sessions import AssessmentStore, LogCorruptError, StoreError
from .taxonomy import (
    BUILTIN_ISO27001_ID,
    FrameworkDefinition,
    FrameworkSyntaxError,
    FrameworkValidationError,
    builtin_iso27001,
    parse_framework,
    serialize_framework,
)

CONTEXT_SETTINGS = {"auto_envvar_prefix": "SECREADY", "help_option_names": ["-h", "--help"]}


@click.group(context_settings=CONTEXT_SETTINGS)
def main() -> None:
    """Security-readiness assessment toolkit."""


def _load_framework(ref: str) -> FrameworkDefinition:
    """Resolve a framework reference: builtin id or path to a framework file."""
    if ref == BUILTIN_ISO27001_ID:
        return builtin_iso27001()
    path = Path(ref)
    if not path.exists():
        raise click.ClickException(f"framework {ref!r} is neither a builtin id nor a readable file")
    return parse_framework(path)


def _load_answers(path: Path) -> AnswerSet:
    doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    if not isinstance(doc, dict) or "framework_id" not in doc or "answers" not in doc:
        raise click.ClickException(f"{path}: answers file needs 'framework_id' and 'answers'")
    answers = doc["answers"]
    if not isinstance(answers, dict):
        raise click.ClickException(f"{path}: 'answers' must map leaf ids to integer grades")
    return AnswerSet(framework_id=str(doc["framework_id"]), answers=dict(answers))


@main.command()
@click.argument("framework_file", type=click.Path(path_type=Path))
def validate(framework_file: Path) -> None:
    """Check a framework file; print one violation per line."""
    if not framework_file.exists():
        click.echo(f"error: cannot read {framework_file}", err=True)
        sys.exit(2)
    try:
        parse_framework(framework_file)
    except FrameworkValidationError as exc:
        for violation in exc.violations:
            click.echo(str(violation))
        sys.exit(1)
    except (FrameworkSyntaxError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo("ok")


@main.command()
@click.argument("framework_ref", metavar="FRAMEWORK")
@click.argument("answers_file", type=click.Path(path_type=Path))
@click.option("--mode", type=click.Choice(["strict", "provisional"]), default="strict", show_default=True)
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["text", "json", "csv", "text-table"]),
    default="text",
    show_default=True,
)
@click.option(
    "--histogram",
    "histogram_level",
    type=click.Choice(["domains", "controls"]),
    default=None,
    help="Also print a text-bar histogram at this level (text format only).",
)
def score(
    framework_ref: str,
    answers_file: Path,
    mode: str,
    output_format: str,
    histogram_level: Optional[str],
) -> None:
    """Score an answers file offline against FRAMEWORK (builtin id or file)."""
    try:
        definition = _load_framework(framework_ref)
        if not answers_file.exists():
            raise click.ClickException(f"cannot read {answers_file}")
        answers = _load_answers(answers_file)
        if answers.framework_id != definition.id:
            raise click.ClickException(
                f"answers are for framework {answers.framework_id!r}, not {definition.id!r}"
            )
    except FrameworkValidationError as exc:
        for violation in exc.violations:
            click.echo(str(violation), err=True)
        sys.exit(2)
    except (FrameworkSyntaxError, OSError, yaml.YAMLError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except click.ClickException as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(2)

    try:
        result = aggregate(definition, answers, mode)  # type: ignore[arg-type]
    except IncompleteAnswersError as exc:
        click.echo(f"error: {len(exc.missing)} leaves unanswered in strict mode:", err=True)
        for leaf_id in exc.missing:
            click.echo(f"  {leaf_id}", err=True)
        sys.exit(1)
    except NoAnswersError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except ScoringError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    if output_format == "text":
        overall = result.overall_achievement
        percent = to_percent(overall, definition.scale)
        predicate = predicate_of(overall, definition.scale)
        line = f"{fmt_score(overall)} / {fmt_percent(percent)} / {predicate}"
        if mode == "provisional":
            coverage = result.answered_count / result.total_leaves
            line += f"  [provisional, coverage {fmt_percent(coverage * 100)}]"
        click.echo(line)
        if mode == "strict":
            summary = reporting.summarize(result)
            click.echo(f"strongest: {', '.join(summary.strongest_domains)}")
            click.echo(f"weakest: {', '.join(summary.weakest_domains)}")
            click.echo(f"advice: {summary.advice}")
        for domain in result.domains:
            if domain.achievement is None:
                click.echo(f"{domain.node_id} n/a (no answered leaves)")
            else:
                click.echo(
                    f"{domain.node_id} {fmt_score(domain.achievement)} "
                    f"(priority {fmt_score(domain.priority)})"
                )
        if histogram_level is not None:
            if mode != "strict":
                click.echo("histogram: needs a complete (strict) result", err=True)
            else:
                series = reporting.histogram(result, histogram_level)  # type: ignore[arg-type]
                click.echo(reporting.text_histogram(series), nl=False)
    elif output_format == "json":
        doc: dict = {"result": reporting.result_to_doc(result)}
        if mode == "strict":
            doc["summary"] = reporting.summary_to_doc(reporting.summarize(result))
        click.echo(canonical_json(doc))
    else:
        click.echo(reporting.export(result, output_format), nl=False)  # type: ignore[arg-type]


@main.command()
@click.option("--port", type=int, default=8421, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--data-dir",
    type=click.Path(path_type=Path),
    default=Path("secready-data"),
    show_default=True,
)
@click.option(
    "--framework",
    "framework_files",
    type=click.Path(path_type=Path),
    multiple=True,
    help="Extra framework files to register besides the builtin.",
)
@click.option("--cors-origin", "cors_origins", multiple=True, default=("*",), show_default=True)
def serve(
    port: int,
    host: str,
    data_dir: Path,
    framework_files: tuple[Path, ...],
    cors_origins: tuple[str, ...],
) -> None:
    """Run the HTTP API, replaying the event log from --data-dir first."""
    import uvicorn

    from .service import create_app

    frameworks = [builtin_iso27001()]
    try:
        for path in framework_files:
            frameworks.append(parse_framework(path))
    except (FrameworkSyntaxError, FrameworkValidationError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    try:
        store = AssessmentStore(data_dir, frameworks)
    except LogCorruptError as exc:
        click.echo(f"error: event log corrupt: {exc}", err=True)
        sys.exit(2)
    except (StoreError, ScoringError, OSError) as exc:
        click.echo(f"error: cannot replay event log: {exc}", err=True)
        sys.exit(2)

    # Probe the port up front: uvicorn folds bind errors into its own exit path.
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((host, port))
    except OSError as exc:
        click.echo(f"error: cannot bind {host}:{port}: {exc}", err=True)
        sys.exit(2)
    finally:
        probe.close()

    app = create_app(store, cors_origins=cors_origins)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option(
    "--dir",
    "target_dir",
    type=click.Path(path_type=Path),
    default=Path("demo"),
    show_default=True,
)
def fixtures(target_dir: Path) -> None:
    """Write the builtin framework and demo answer files into --dir."""
    target_dir.mkdir(parents=True, exist_ok=True)
    definition = builtin_iso27001()

    framework_path = target_dir / "iso27001.yaml"
    framework_path.write_text(serialize_framework(definition), encoding="utf-8")

    sample = demo.sample_answers(definition)
    sample_doc = {"framework_id": sample.framework_id, "answers": dict(sorted(sample.answers.items()))}
    sample_path = target_dir / "sample-answers.yaml"
    sample_path.write_text(yaml.safe_dump(sample_doc, sort_keys=False), encoding="utf-8")

    excellent = {leaf.id: definition.scale.max_value for leaf in definition.leaves}
    excellent_doc = {"framework_id": definition.id, "answers": dict(sorted(excellent.items()))}
    excellent_path = target_dir / "all-excellent-answers.yaml"
    excellent_path.write_text(yaml.safe_dump(excellent_doc, sort_keys=False), encoding="utf-8")

    for path in (framework_path, sample_path, excellent_path):
        click.echo(str(path))


if __name__ == "__main__":
    main()
