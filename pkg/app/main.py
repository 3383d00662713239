from pathlib import Path
import sys
import logging
from typing import List, Optional

import click

# Allow running from either the project root (`python -m app.main`) or from
# inside the `app/` directory (`python main.py`).
if __package__ in (None, ""):
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from app.core.config import settings
from app.core.exceptions import EXIT_OK, EXIT_USAGE, ChainSystemError, handle_error
from app.scene.commands import layout_command
from app.packages.kinematics.commands import fk_command, ik_command
from app.packages.statics.commands import statics_command
from app.packages.accuracy.commands import errmap_command, error_command
from app.packages.workspace.commands import compare_command, coverage_command, reach_command
from app.packages.trajectory.commands import plan_command

logger = logging.getLogger(__name__)


def configure_logging(verbosity: int) -> None:
    """Diagnostics go to stderr only; stdout carries results."""
    level = settings.LOG_LEVEL
    if verbosity == 1:
        level = "INFO"
    elif verbosity >= 2:
        level = "DEBUG"
    logging.basicConfig(level=level, format=settings.LOG_FORMAT, stream=sys.stderr, force=True)


@click.group()
@click.option("-v", "--verbose", count=True, help="Log progress to stderr (-vv for solver detail)")
def cli(verbose: int):
    """Rigid-chain parallel positioning: kinematics, statics, accuracy, workspace and motion planning."""
    configure_logging(verbose)


# Include commands
cli.add_command(layout_command)
cli.add_command(ik_command)
cli.add_command(fk_command)
cli.add_command(statics_command)
cli.add_command(error_command)
cli.add_command(errmap_command)
cli.add_command(reach_command)
cli.add_command(coverage_command)
cli.add_command(compare_command)
cli.add_command(plan_command)


def run(argv: Optional[List[str]] = None) -> int:
    """Execute one command line and return its exit code."""
    try:
        rv = cli.main(args=argv, prog_name="rigidchain", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except ChainSystemError as e:
        return handle_error(e)
    except ValueError as e:
        # Argument combinations the services reject
        click.echo(f"error: {e}", err=True)
        return EXIT_USAGE
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
