import asyncio
import sys

import click

from supercrit.errors import BlowUpError, ConfigError
from supercrit.logging_config import loggers
from supercrit.runners import EXIT_BLOW_UP, EXIT_CONFIG, run_scenario
from supercrit.scenario import list_scenarios, load_scenario
from supercrit.storage import RunStore

logger = loggers['cli']

EXIT_ERROR = 1


def _overrides(output, threads, seed):
    overrides = {}
    if output is not None:
        overrides["output.dir"] = output
    if threads is not None:
        overrides["threads"] = str(threads)
    if seed is not None:
        overrides["seed"] = str(seed)
    return overrides


def _record(scenario, status, exit_code, wall_clock, output_dir):
    try:
        asyncio.run(RunStore().record_run(scenario, status, exit_code, wall_clock, output_dir))
    except Exception as e:
        logger.error(f"Could not record run history: {str(e)}", exc_info=True)


@click.group()
def cli():
    """supercrit - slightly supercritical Euler and vortex patch experiments"""
    pass


@cli.command()
@click.argument('config')
@click.option('--output', default=None, help="Output directory (overrides output.dir)")
@click.option('--threads', type=int, default=None, help="Worker threads for sweeps")
@click.option('--seed', type=int, default=None, help="Override the scenario seed")
def run(config, output, threads, seed):
    """Run a scenario file or a bundled scenario by name"""
    scenario = None
    try:
        scenario = load_scenario(config, _overrides(output, threads, seed))
        outcome = run_scenario(scenario)
        click.echo(f"{scenario.name}: {outcome.status} (exit {outcome.exit_code}), report in {outcome.output_dir}")
        _record(scenario, outcome.status, outcome.exit_code, outcome.report["wallClock"], outcome.output_dir)
        sys.exit(outcome.exit_code)
    except ConfigError as e:
        logger.error(f"Config error in {config}: {str(e)}")
        click.echo(f"Config error: {str(e)}", err=True)
        sys.exit(EXIT_CONFIG)
    except BlowUpError as e:
        logger.error(f"Blow-up in {config} at t={e.time}: {str(e)}", exc_info=True)
        click.echo(f"Blow-up: {str(e)}", err=True)
        if scenario is not None:
            _record(scenario, "blow-up", EXIT_BLOW_UP, 0.0, scenario.output_dir)
        sys.exit(EXIT_BLOW_UP)
    except Exception as e:
        logger.error(f"Error running {config}: {str(e)}", exc_info=True)
        click.echo(f"Error: {str(e)}", err=True)
        sys.exit(EXIT_ERROR)


@cli.command()
@click.argument('config')
def validate(config):
    """Validate a scenario without running it"""
    try:
        scenario = load_scenario(config)
        click.echo(f"{scenario.name}: ok (mode={scenario.mode}, {len(scenario.values)} resolved keys)")
    except ConfigError as e:
        click.echo(f"Config error: {str(e)}", err=True)
        sys.exit(EXIT_CONFIG)
    except Exception as e:
        logger.error(f"Error validating {config}: {str(e)}", exc_info=True)
        click.echo(f"Error: {str(e)}", err=True)
        sys.exit(EXIT_ERROR)


@cli.command(name="list")
def list_cmd():
    """Show bundled scenarios"""
    try:
        rows = list_scenarios()
        if not rows:
            click.echo("No bundled scenarios found.")
            return
        width = max(len(name) for name, _, _ in rows)
        for name, mode, description in rows:
            click.echo(f"{name:<{width}}  {mode:<15} {description}")
    except Exception as e:
        click.echo(f"Error: {str(e)}", err=True)
        sys.exit(EXIT_ERROR)


@cli.command()
@click.option('--limit', type=int, default=10, help="Number of runs to show")
def history(limit):
    """Show recent runs"""
    try:
        runs = asyncio.run(RunStore().get_runs(limit))
        if not runs:
            click.echo("No runs recorded.")
            return
        for row in runs:
            click.echo(
                f"[{row['id']}] {row['started_at']} {row['name']} ({row['mode']}, seed={row['seed']}): "
                f"{row['status']} exit={row['exit_code']} {row['wall_clock']:.2f}s -> {row['output_dir']}"
            )
    except Exception as e:
        click.echo(f"Error: {str(e)}", err=True)
        sys.exit(EXIT_ERROR)


if __name__ == "__main__":
    cli()
