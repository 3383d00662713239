import logging

import click

from app.core.exceptions import EXIT_INFEASIBLE, EXIT_OK
from app.core.params import VECTOR3, scene_option, to_pose
from app.core.responses import emit_record
from app.packages.statics.service import static_forces

logger = logging.getLogger(__name__)


@click.command("statics")
@scene_option
@click.option("--pose", type=VECTOR3, required=True, help="Platform position x,y,z (m)")
@click.option("--release", "released", type=int, multiple=True,
              help="Index of a chain that carries no load; repeatable")
def statics_command(scene, pose, released):
    """Print the axial chain forces (N, tension positive) and whether they are within limits."""
    for index in released:
        if not 0 <= index < scene.n_drives:
            raise click.BadParameter(f"no chain {index} in a {scene.n_drives}-drive scene",
                                     param_hint="--release")
    active = None
    if released:
        active = [i for i in range(scene.n_drives) if i not in set(released)]

    solution = static_forces(scene, to_pose(pose), active)
    emit_record("forces", *solution.axial_forces)
    emit_record("margins", *solution.margins)
    emit_record("residual", solution.residual)
    emit_record("feasible", solution.feasible)
    if not solution.feasible:
        logger.warning("Chain forces exceed their limits")
        return EXIT_INFEASIBLE
    return EXIT_OK
