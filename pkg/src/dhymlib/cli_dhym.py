""" CLI utilities
"""

import logging
import os

import click

from dhymlib import __name__ as dhymlib_name
from dhymlib import __version__ as dhymlib_version

from .cohomology import RingDatabase
from .config import load_config
from .currents import available_charts
from .errors import DhymError
from .experiments import RUNNERS
from .logs import setup_logging
from .report import report_digest, to_json, write_csv, write_report
from .solver import available_problems, write_potential_csv

logger = logging.getLogger(__name__)


def add_version(f):
    """
    Add the version of the tool to the help heading.
    :param f: function to decorate
    :return: decorated function
    """
    doc = f.__doc__
    f.__doc__ = "Package " + dhymlib_name + " v" + dhymlib_version + "\n\n" + doc

    return f


def experiment_options(f):
    """Options shared by every experiment command"""
    options = [
        click.option("-c", "--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="YAML configuration file"),
        click.option("--seed", type=int, default=None, help="master seed"),
        click.option("--out", type=click.Path(file_okay=False), default=None, help="output directory"),
        click.option("--jobs", type=int, default=None, help="number of worker processes"),
        click.option("-v", "--verbose", count=True, help="debug messages on stderr"),
        click.option("-q", "--quiet", is_flag=True, default=False, help="only warnings and errors on stderr"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def run_command(command, config_path, seed, out, jobs, verbose, quiet, overrides=None):
    """Run an experiment, print its JSON report on stdout and write its files

    DhymError are reported on stderr and turned into the exit code of the error.
    """
    setup_logging(-1 if quiet else verbose)
    ctx = click.get_current_context()
    try:
        config = load_config(command, config_path, seed, out, jobs, overrides)
        outcome = RUNNERS[command](config)
        write_report(outcome.report, config.out_dir, command)
        if config.section("output")["csv"]:
            for name, (header, rows) in outcome.tables.items():
                write_csv(header, rows, os.path.join(config.out_dir, f"{command}_{name}.csv"))
        if "potential" in outcome.extras:
            path = os.path.join(config.out_dir, f"{command}_potential.csv")
            write_potential_csv(outcome.extras["potential"], path)
            logger.info(f"potential written to <{path}>")
        if "table" in outcome.extras and config.section("calibrate")["write"]:
            path = os.path.join(config.out_dir, "calibration.yml")
            outcome.extras["table"].dump(path)
            logger.info(f"calibration table written to <{path}>")
    except DhymError as e:
        logger.error(f"{type(e).__name__}: {e}")
        ctx.exit(e.exit_code)
    except FileNotFoundError as e:
        logger.error(str(e))
        ctx.exit(2)
    logger.info(f"report digest {report_digest(outcome.report)}")
    click.echo(to_json(outcome.report))


def _drop_none(**section):
    return {k: v for k, v in section.items() if v is not None}


@click.group()
@add_version
def main_cli():
    """
    * cli of dhymlib package for dHYM experiments *
    """
    pass


@click.command()
@experiment_options
@click.option("--dims", type=int, multiple=True, help="dimensions swept (repeat the option)")
@click.option("--samples", type=int, default=None, help="random pairs per dimension")
def angles(config_path, seed, out, jobs, verbose, quiet, dims, samples):
    """Monotonicity, concavity and variational suites of the angle functionals"""
    section = _drop_none(dims=list(dims) or None, samples=samples)
    run_command("angles", config_path, seed, out, jobs, verbose, quiet, {"angles": section})


main_cli.add_command(angles)


@click.command()
@experiment_options
@click.option("--ring", default=None, help="ring file, packaged or local")
@click.option("--family", default=None, help="test family declared in the ring file")
def stability(config_path, seed, out, jobs, verbose, quiet, ring, family):
    """Phase and stability verdicts of a test family"""
    section = _drop_none(ring=ring, family=family)
    run_command("stability", config_path, seed, out, jobs, verbose, quiet, {"stability": section})


main_cli.add_command(stability)


@click.command()
@experiment_options
@click.option("--problem", default=None, help="problem file, packaged or local")
@click.option("--path-steps", type=int, default=None, help="continuity steps, 0 for a direct solve")
def solve(config_path, seed, out, jobs, verbose, quiet, problem, path_steps):
    """Newton solve of the twisted equation on a flat torus"""
    section = _drop_none(problem=problem, path_steps=path_steps)
    run_command("solve", config_path, seed, out, jobs, verbose, quiet, {"solve": section})


main_cli.add_command(solve)


@click.command()
@experiment_options
@click.option("--chart", default=None, help="chart file, packaged or local")
@click.option("--radius", "radii", type=float, multiple=True, help="mollification radius (repeat the option)")
def mollify(config_path, seed, out, jobs, verbose, quiet, chart, radii):
    """Comparison formulas of sups and mollifications of a chart potential"""
    section = _drop_none(chart=chart, radii=list(radii) or None)
    run_command("mollify", config_path, seed, out, jobs, verbose, quiet, {"mollify": section})


main_cli.add_command(mollify)


@click.command()
@experiment_options
@click.option("--write", is_flag=True, default=False, help="write calibration.yml in the output directory")
def calibrate(config_path, seed, out, jobs, verbose, quiet, write):
    """Recompute the calibrated constants of the angle inequalities"""
    section = {"write": True} if write else {}
    run_command("calibrate", config_path, seed, out, jobs, verbose, quiet, {"calibrate": section})


main_cli.add_command(calibrate)


@click.command()
@click.option("-s", "--short", is_flag=True, default=False, help="do not show ring families")
def list_data(short):
    """List rings, problems and charts available in dhymlib"""
    database = RingDatabase()
    print("------ available rings ------")
    for name, origin in database.available():
        print(f"  * {name} ({origin})")
        if not short:
            try:
                ring = database.load_ring(name)
            except (DhymError, FileNotFoundError) as e:
                print(f"    < unreadable: {e} >")
                continue
            for family in ring.families:
                print(f"    < {family} > test family")
    print("----- available problems ----")
    for name in available_problems():
        print(f"  * {name}")
    print("------ available charts -----")
    for name in available_charts():
        print(f"  * {name}")
    print("-----------------------------")


main_cli.add_command(list_data)
