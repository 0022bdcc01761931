"""Command-line interface for the counterfactual importance engine."""

import logging
import sys
from typing import Any, Dict, Optional

import click
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from .evaluation import category_from_flag
from .kinds import PERTURBATION_GROUPS
from .orchestrator import ImportanceOrchestrator
from .synth import SynthKind, SynthSpec, parse_params
from .utils import Config, setup_logger
from .utils.config import read_config_file
from .utils.errors import SceneParseError, describe_validation_error

EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3

METHODS = ["ours", "removal", "velocity", "everything", "inverse_distance"]

console = Console(stderr=True)
logger = logging.getLogger(__name__)


class ImportanceGroup(click.Group):
    """Click group that reports usage errors with exit code 1."""

    def main(self, *args: Any, standalone_mode: bool = True, **kwargs: Any) -> Any:
        try:
            rv = super().main(*args, standalone_mode=False, **kwargs)
        except click.UsageError as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        if standalone_mode:
            sys.exit(rv if isinstance(rv, int) else 0)
        return rv


def _fail(code: int, title: str, error: Exception) -> None:
    # messages carry file paths and ranges like [0, 1]; print them verbatim
    console.print(f"[bold red]{title}:[/bold red] {escape(str(error))}", soft_wrap=True)
    sys.exit(code)


def _run(action):
    """Run a command body, mapping failures onto exit codes."""
    try:
        return action()
    except ValidationError as e:
        _fail(EXIT_VALIDATION, "Validation Error", describe_validation_error(e))
    except (ValueError, SceneParseError) as e:
        _fail(EXIT_VALIDATION, "Validation Error", e)
    except Exception as e:
        logger.exception("Command failed")
        _fail(EXIT_RUNTIME, "Error", e)


def load_config(config_path: Optional[str], overrides: Dict[str, Any]) -> Config:
    """Resolve configuration: flags over config file over environment.

    Args:
        config_path: Optional YAML/JSON config file
        overrides: Nested mapping of values given as flags (None entries dropped)

    Returns:
        Validated Config
    """
    config = Config.from_env()
    if config_path:
        config = Config.from_file(config_path, base=config)
    return config.with_overrides(_prune(overrides))


def _prune(mapping: Dict[str, Any]) -> Dict[str, Any]:
    pruned: Dict[str, Any] = {}
    for key, value in mapping.items():
        if isinstance(value, dict):
            value = _prune(value)
            if not value:
                continue
        elif value is None:
            continue
        pruned[key] = value
    return pruned


def _progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        console=console,
        transient=True,
    )


@click.group(cls=ImportanceGroup)
def cli():
    """Counterfactual object importance for driving scenes.

    Scores every object in a scene by how much it changes the ego vehicle's
    plan, evaluates the scores against human annotations, generates synthetic
    scenes and renders top-down drawings.
    """
    pass


@cli.command()
@click.argument("scenes", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Report")
@click.option("--workers", type=click.IntRange(min=1), help="Worker processes")
@click.option("--tau", type=float, help="Collision distance in meters")
@click.option("--horizon", type=int, help="Prediction steps K (overrides scenes)")
@click.option("--dt", type=float, help="Time step in seconds (overrides scenes)")
@click.option("--speed-up-factor", type=float, help="Speed-up perturbation factor")
@click.option("--lane-width", type=float, help="Lane-change lateral offset")
@click.option(
    "--disable",
    multiple=True,
    type=click.Choice(list(PERTURBATION_GROUPS)),
    help="Perturbation to switch off (repeatable)",
)
@click.option("--no-ego-perturbation", is_flag=True, help="Do not perturb the ego")
@click.option("--no-index-weighting", is_flag=True, help="Ignore collision timing")
@click.option(
    "--pedestrian-method",
    type=click.Choice(["distance", "counterfactual"]),
    help="How pedestrians are scored",
)
@click.option("--predictor", type=click.Choice(["rule", "external"]), help="Planner")
@click.option("--predictor-cmd", help="Command of the external predictor")
@click.option("--predictor-timeout", type=float, help="Seconds per external call")
@click.option("--config", "config_path", type=click.Path(dir_okay=False))
@click.option("--log-level", default=None, help="Logging level")
def score(
    scenes,
    out,
    workers,
    tau,
    horizon,
    dt,
    speed_up_factor,
    lane_width,
    disable,
    no_ego_perturbation,
    no_index_weighting,
    pedestrian_method,
    predictor,
    predictor_cmd,
    predictor_timeout,
    config_path,
    log_level,
):
    """Score every object in the SCENES files and write one report.

    Example:
        importance score scenes/*.json --out report.json --disable lane_change
    """

    def action():
        config = load_config(
            config_path,
            {
                "log_level": log_level,
                "workers": workers,
                "scoring": {
                    "tau": tau,
                    "horizon": horizon,
                    "dt": dt,
                    "index_weighting": False if no_index_weighting else None,
                    "pedestrian_method": pedestrian_method,
                    "predictor_backend": predictor,
                    "predictor_command": predictor_cmd,
                    "predictor_timeout": predictor_timeout,
                    "perturbation": {
                        "speed_up_factor": speed_up_factor,
                        "lane_width": lane_width,
                        "perturb_ego": False if no_ego_perturbation else None,
                    },
                },
            },
        )
        if disable:
            perturbation = config.scoring.perturbation.without(disable)
            config = config.with_overrides(
                {
                    "scoring": {
                        "perturbation": {
                            "enabled": [k.value for k in perturbation.enabled]
                        }
                    }
                }
            )
        setup_logger(level=config.log_level)

        orchestrator = ImportanceOrchestrator(config)
        with _progress() as progress:
            task = progress.add_task(
                f"[cyan]Scoring {len(scenes)} scene(s)...", total=None
            )
            batch = orchestrator.score_to_file(list(scenes), out)
            progress.update(task, completed=True)

        console.print("[green]✓[/green] Scoring completed")
        summary = orchestrator.get_summary(batch)
        console.print(Panel(summary, title="Summary", border_style="green"))
        console.print(f"[bold green]Report saved to:[/bold green] {out}")

    _run(action)


@cli.command(name="eval")
@click.argument("report", type=click.Path(dir_okay=False))
@click.argument("annotations", type=click.Path(dir_okay=False))
@click.option("--theta1", type=int, help="Annotator count for Positive")
@click.option("--theta2", type=int, help="Annotator count below which Negative")
@click.option("--only", type=click.Choice(["vehicles", "pedestrians"]))
@click.option("--method", type=click.Choice(METHODS), help="Score to rank by")
@click.option("--out", type=click.Path(dir_okay=False), help="Evaluation document")
@click.option("--pr-table", type=click.Path(dir_okay=False), help="PR trace CSV")
@click.option("--config", "config_path", type=click.Path(dir_okay=False))
@click.option(
    "--scene",
    "scene_paths",
    multiple=True,
    type=click.Path(dir_okay=False),
    help="Scenario file the annotations must match (repeatable)",
)
@click.option("--log-level", default=None, help="Logging level")
def evaluate(
    report,
    annotations,
    theta1,
    theta2,
    only,
    method,
    out,
    pr_table,
    config_path,
    scene_paths,
    log_level,
):
    """Evaluate a REPORT against ANNOTATIONS with AP, OT-F1 and OT-Accuracy.

    Example:
        importance eval report.json labels.json --only pedestrians
    """

    def action():
        config = load_config(
            config_path,
            {
                "log_level": log_level,
                "evaluation": {
                    "theta1": theta1,
                    "theta2": theta2,
                    "method": method,
                    "category_filter": category_from_flag(only),
                },
            },
        )
        setup_logger(level=config.log_level)

        orchestrator = ImportanceOrchestrator(config)
        result = orchestrator.evaluate(
            report,
            annotations,
            config.evaluation,
            expected_scoring=(
                config.scoring
                if config_path and "scoring" in read_config_file(config_path)
                else None
            ),
            scene_paths=scene_paths,
        )
        if out:
            orchestrator.publisher.save_document(result, out)
            console.print(f"[bold green]Evaluation saved to:[/bold green] {out}")
        else:
            logger.info("No --out given; evaluation printed to stdout only")
        if pr_table:
            orchestrator.publisher.save_pr_table(result.result, pr_table)

        metrics = result.result
        table = Table(title="Evaluation")
        table.add_column("Metric", style="bold")
        table.add_column("Value", justify="right")
        table.add_row("AP", f"{metrics.ap:.4f}")
        table.add_row("OT-F1", f"{metrics.ot_f1:.4f}")
        table.add_row("OT-Accuracy", f"{metrics.ot_accuracy:.4f}")
        table.add_row("F1 threshold", f"{metrics.ot_f1_threshold:.4f}")
        counts = f"{metrics.n_positive} / {metrics.n_negative} / {metrics.n_ignored}"
        table.add_row("Positive / Negative / Ignored", counts)
        console.print(table)
        click.echo(
            f"ap={metrics.ap!r} ot_f1={metrics.ot_f1!r} "
            f"ot_accuracy={metrics.ot_accuracy!r}"
        )

    _run(action)


@cli.command()
@click.argument("kind", type=click.Choice([k.value for k in SynthKind]))
@click.option("--seed", default=0, type=click.IntRange(min=0), help="RNG seed")
@click.option("--param", "params", multiple=True, help="key=value (repeatable)")
@click.option("--scene-id", default=None, help="Override the generated scene id")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def gen(kind, seed, params, scene_id, out):
    """Generate a synthetic scene of the given KIND.

    Example:
        importance gen lead_follow --seed 7 --param gap=12 --out lead.json
    """

    def action():
        spec = SynthSpec(kind=SynthKind(kind), seed=seed, params=parse_params(params))
        orchestrator = ImportanceOrchestrator()
        scene = orchestrator.generate(spec, out, scene_id=scene_id)
        console.print(
            f"[green]✓[/green] {scene.scene_id} with {len(scene.agents)} agents "
            f"saved to {out}"
        )

    _run(action)


@cli.command()
@click.argument("scene", type=click.Path(dir_okay=False))
@click.argument("report", type=click.Path(dir_okay=False))
@click.option("--threshold", default=0.5, type=float, help="Importance cut-off")
@click.option("--method", default="ours", type=click.Choice(METHODS))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def render(scene, report, threshold, method, out):
    """Draw SCENE from above with the scores from REPORT.

    Example:
        importance render lead.json report.json --threshold 0.4 --out lead.svg
    """

    def action():
        orchestrator = ImportanceOrchestrator()
        path = orchestrator.render(scene, report, threshold, out, method=method)
        console.print(f"[green]✓[/green] Drawing saved to {path}")

    _run(action)


@cli.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False))
def config(config_path):
    """Display the resolved configuration."""

    def action():
        cfg = load_config(config_path, {})
        scoring = cfg.scoring

        console.print(
            Panel.fit(
                "[bold cyan]Current Configuration[/bold cyan]", border_style="cyan"
            )
        )
        console.print(f"\n[bold]tau:[/bold] {scoring.tau}")
        console.print(
            f"[bold]Horizon / dt:[/bold] {scoring.horizon or 'per scene'} / "
            f"{scoring.dt or 'per scene'}"
        )
        console.print(
            f"[bold]Speed-up factor:[/bold] {scoring.perturbation.speed_up_factor}"
        )
        enabled = ", ".join(k.value for k in scoring.perturbation.enabled) or "none"
        console.print(f"[bold]Perturbations:[/bold] {enabled}")
        console.print(f"[bold]Predictor:[/bold] {scoring.predictor_backend}")
        console.print(
            f"[bold]theta1 / theta2:[/bold] {cfg.evaluation.theta1} / "
            f"{cfg.evaluation.theta2}"
        )
        console.print(f"[bold]Workers:[/bold] {cfg.workers}")
        console.print(f"[bold]Log Level:[/bold] {cfg.log_level}")

    _run(action)


@cli.command()
def version():
    """Display version information."""
    from . import __version__

    console.print(
        f"[bold cyan]Counterfactual Importance[/bold cyan] version "
        f"[yellow]{__version__}[/yellow]"
    )


if __name__ == "__main__":
    cli()
