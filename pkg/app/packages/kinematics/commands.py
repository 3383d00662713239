import logging

import click

from app.core.params import FloatList, VECTOR3, scene_option, to_pose
from app.core.responses import emit, emit_record
from app.packages.accuracy.service import deployed_links
from app.packages.kinematics.service import (
    default_guess,
    forward_kinematics_3,
    forward_kinematics_lsq,
    inverse_kinematics,
)
from app.scene.models import ChainLengths

logger = logging.getLogger(__name__)


@click.command("ik")
@scene_option
@click.option("--pose", type=VECTOR3, required=True, help="Platform position x,y,z (m)")
@click.option("--links", is_flag=True, help="Also print the deployed link count of each chain")
def ik_command(scene, pose, links):
    """Print the chain lengths that hold the platform at POSE."""
    lengths = inverse_kinematics(scene, to_pose(pose))
    emit(*lengths.values)
    if links:
        emit_record("links", *(deployed_links(d, L) for d, L in zip(scene.drives, lengths.values)))


@click.command("fk")
@scene_option
@click.option("--lengths", type=FloatList(min_count=3), required=True, help="Chain lengths l1,l2,... (m)")
@click.option("--guess", type=VECTOR3, default=None,
              help="Initial guess x,y,z; selects the least-squares solver")
def fk_command(scene, lengths, guess):
    """Print the platform position for the given chain lengths."""
    if len(lengths) != scene.n_drives:
        raise click.BadParameter(f"scene has {scene.n_drives} drives, got {len(lengths)} lengths",
                                 param_hint="--lengths")
    chain_lengths = ChainLengths.of(lengths)
    if guess is None and scene.n_drives == 3:
        pose = forward_kinematics_3(scene, chain_lengths)
    else:
        seed = to_pose(guess) if guess is not None else default_guess(scene)
        logger.info(f"Least-squares FK from {seed.array().tolist()}")
        pose = forward_kinematics_lsq(scene, chain_lengths, seed)
    emit(*pose.array())
