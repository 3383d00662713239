import logging

import click

from app.core.config import settings
from app.core.exceptions import EXIT_INFEASIBLE, EXIT_OK
from app.core.params import GRID_DIMS, VECTOR3, jobs_option, resolve_jobs_setting, scene_option, to_pose
from app.core.responses import emit_record, write_csv
from app.packages.workspace.models import CONSTRAINTS, CoverageReport
from app.packages.workspace.service import is_reachable, segment_reachable, workspace_volume
from app.scene.service import build_layout_scene

logger = logging.getLogger(__name__)

COVERAGE_COLUMNS = ("ix", "iy", "iz", "cx", "cy", "cz", "reachable", "first_violation")


def emit_coverage(report: CoverageReport) -> None:
    emit_record("grid", *report.grid_dims)
    emit_record("cells_total", report.cells_total)
    emit_record("cells_reachable", report.cells_reachable)
    emit_record("fraction", report.fraction)
    emit_record("convention", report.convention)
    for name in CONSTRAINTS:
        emit_record("rejected", name, report.rejection_histogram[name])


@click.command("reach")
@scene_option
@click.option("--pose", type=VECTOR3, required=True, help="Platform position x,y,z (m)")
@click.option("--to", "goal", type=VECTOR3, default=None,
              help="Check the straight segment from POSE to this point instead")
def reach_command(scene, pose, goal):
    """Print whether the platform can be held at POSE, or along POSE -> TO."""
    if goal is None:
        result = is_reachable(scene, to_pose(pose).position)
        emit_record("reachable", result.reachable)
        emit_record("violations", *result.violations)
        return EXIT_OK if result.reachable else EXIT_INFEASIBLE

    check = segment_reachable(scene, to_pose(pose), to_pose(goal), settings.PATH_SAMPLE_SPACING_M)
    emit_record("reachable", check.reachable)
    if not check.reachable:
        emit_record("s", check.s)
    emit_record("violations", *check.violations)
    return EXIT_OK if check.reachable else EXIT_INFEASIBLE


@click.command("coverage")
@scene_option
@click.option("--grid", "grid_dims", type=GRID_DIMS, required=True, help="Cells per axis nx,ny,nz")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Per-cell CSV report")
@jobs_option
def coverage_command(scene, grid_dims, out_path, jobs):
    """Print the reachable fraction of the room and the rejection histogram."""
    report = workspace_volume(scene, grid_dims, resolve_jobs_setting(jobs), keep_cells=out_path is not None)
    if out_path is not None:
        rows = (
            (c.ix, c.iy, c.iz, c.cx, c.cy, c.cz, c.reachable, c.first_violation or "")
            for c in report.cells
        )
        count = write_csv(out_path, COVERAGE_COLUMNS, rows, comments=[f"convention: {report.convention}"])
        logger.info(f"Wrote {count} cells to {out_path}")
    emit_coverage(report)


@click.command("compare")
@scene_option
@click.option("--grid", "grid_dims", type=GRID_DIMS, required=True, help="Cells per axis nx,ny,nz")
@jobs_option
def compare_command(scene, grid_dims, jobs):
    """Coverage of the triangle and corner arrangements built from the scene's room and first drive."""
    template = scene.drives[0]
    first = scene.platform.attachment_offsets[0]
    offset = max(abs(first.x), abs(first.y))
    for kind in ("triangle", "corners"):
        layout = build_layout_scene(
            scene.room, template, kind,
            scene.platform.mass, scene.platform.payload_mass, offset,
            scene.gravity, scene.clearance,
        )
        report = workspace_volume(layout, grid_dims, resolve_jobs_setting(jobs))
        emit_record(kind, report.fraction)
