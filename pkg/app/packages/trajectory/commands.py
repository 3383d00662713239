import logging

import click

from app.core.exceptions import EXIT_INFEASIBLE, EXIT_OK
from app.core.params import VECTOR3, scene_option, to_pose
from app.core.responses import emit_record, write_csv
from app.packages.trajectory.models import MotionPlan, StepSchedule
from app.packages.trajectory.service import plan_path, quantize_schedule, synchronization_check

logger = logging.getLogger(__name__)

SCHEDULE_COLUMNS = ("time_s", "drive", "commanded_length_m")


def schedule_rows(schedule: StepSchedule):
    """Time-major rows; every drive appears once per tick."""
    for k, t in enumerate(schedule.times):
        for drive, commanded in enumerate(schedule.commanded):
            yield t, drive, commanded[k]


def plan_rows(plan: MotionPlan):
    for sample in plan.samples:
        yield (sample.time, sample.path_position, *sample.pose.array(), *sample.lengths.values)


@click.command("plan")
@scene_option
@click.option("--from", "start", type=VECTOR3, required=True, help="Start position x,y,z (m)")
@click.option("--to", "goal", type=VECTOR3, required=True, help="Goal position x,y,z (m)")
@click.option("--via", "via", type=VECTOR3, multiple=True,
              help="Intermediate stop x,y,z; repeatable, visited in order")
@click.option("--tick", type=click.FloatRange(min=0.0, min_open=True), default=None,
              help="Output sample period (s); default from TICK_S")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True,
              help="Quantized step schedule CSV")
@click.option("--plan-out", "plan_path_out", type=click.Path(dir_okay=False), default=None,
              help="Also write the un-quantized motion plan as CSV")
def plan_command(scene, start, goal, via, tick, out_path, plan_path_out):
    """Plan a rest-to-rest straight-line move and write its drive step schedule."""
    waypoints = [to_pose(start), *(to_pose(v) for v in via), to_pose(goal)]
    plan = plan_path(scene, waypoints, tick)
    schedule = quantize_schedule(scene, plan)
    report = synchronization_check(scene, schedule)

    write_csv(out_path, SCHEDULE_COLUMNS, schedule_rows(schedule))
    if plan_path_out is not None:
        length_columns = [f"length_{i}_m" for i in range(scene.n_drives)]
        write_csv(plan_path_out, ["time_s", "s_m", "x", "y", "z", *length_columns], plan_rows(plan))

    emit_record("duration", plan.duration)
    emit_record("samples", len(plan.samples))
    emit_record("ticks", len(schedule.times))
    for limit in plan.governing_limits:
        emit_record("limit", limit.phase, limit.drive, limit.limit, limit.value)
    emit_record("synchronized", report.synchronized)
    emit_record("max_deviation", report.max_deviation)
    return EXIT_OK if report.synchronized else EXIT_INFEASIBLE
