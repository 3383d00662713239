import logging

import click

from app.core.params import VECTOR3, jobs_option, resolve_jobs_setting, scene_option, to_pose
from app.core.responses import emit_record, write_csv
from app.packages.accuracy.service import chain_length_error, error_map, propagate_error
from app.packages.kinematics.service import inverse_kinematics

logger = logging.getLogger(__name__)

ERRMAP_COLUMNS = ("cx", "cy", "cz", "worst_case_error_m")


@click.command("error")
@scene_option
@click.option("--pose", type=VECTOR3, required=True, help="Platform position x,y,z (m)")
def error_command(scene, pose):
    """Print cumulative chain errors at POSE and the position error they cause."""
    target = to_pose(pose)
    lengths = inverse_kinematics(scene, target)
    errors = [chain_length_error(d, L) for d, L in zip(scene.drives, lengths.values)]
    estimate = propagate_error(scene, target, errors)
    emit_record("chain_errors", *estimate.chain_errors)
    emit_record("position_error", *estimate.position_error)
    emit_record("worst_case_error", estimate.worst_case_norm)


@click.command("errmap")
@scene_option
@click.option("--grid-res", "grid_resolution", type=click.FloatRange(min=0.0, min_open=True), required=True,
              help="Largest cell edge (m)")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="CSV file to write")
@jobs_option
def errmap_command(scene, grid_resolution, out_path, jobs):
    """Write the worst-case position error at every reachable cell centre."""
    cells = error_map(scene, grid_resolution, resolve_jobs_setting(jobs))
    count = write_csv(out_path, ERRMAP_COLUMNS, cells)
    emit_record("cells", count)
    if cells:
        emit_record("max_error", max(c.worst_case_error for c in cells))
