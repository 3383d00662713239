import logging

import click

from app.core.params import VECTOR3
from app.core.responses import emit_record
from app.scene.models import ChainDrive, Point3, Room
from app.scene.service import build_layout_scene, save_scene

logger = logging.getLogger(__name__)


@click.command("layout")
@click.option("--room", "room_size", type=VECTOR3, required=True, help="Room size x,y,z (m)")
@click.option("--kind", type=click.Choice(["triangle", "corners"]), default="corners", show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Scene file to write")
@click.option("--mass", type=float, default=50.0, show_default=True, help="Platform mass (kg)")
@click.option("--payload-mass", type=float, default=0.0, show_default=True, help="Payload mass (kg)")
@click.option("--offset", type=float, default=0.3, show_default=True,
              help="Attachment offset toward each anchor along x and y (m)")
@click.option("--length-min", type=float, default=0.5, show_default=True)
@click.option("--length-max", type=float, default=20.0, show_default=True)
@click.option("--stored-length", type=float, default=22.0, show_default=True)
@click.option("--pitch", type=float, default=0.0254, show_default=True, help="Chain link pitch (m)")
@click.option("--resolution", type=float, default=0.001, show_default=True, help="Length step (m)")
@click.option("--speed-max", type=float, default=0.5, show_default=True, help="m/s")
@click.option("--accel-max", type=float, default=0.5, show_default=True, help="m/s²")
@click.option("--error-coefficient", type=float, default=2.0e-4, show_default=True)
@click.option("--tension-limit", type=float, default=50000.0, show_default=True, help="N")
@click.option("--compression-limit", type=float, default=20000.0, show_default=True, help="N")
@click.option("--gimbal-cone", type=float, default=1.55, show_default=True, help="Half angle (rad)")
def layout_command(room_size, kind, out_path, mass, payload_mass, offset, length_min, length_max,
                   stored_length, pitch, resolution, speed_max, accel_max, error_coefficient,
                   tension_limit, compression_limit, gimbal_cone):
    """Write a scene with identical drives at the ceiling in a reference arrangement."""
    room = Room(size_x=room_size[0], size_y=room_size[1], size_z=room_size[2])
    template = ChainDrive(
        anchor=Point3(x=0.0, y=0.0, z=room.size_z),
        length_min=length_min,
        length_max=length_max,
        stored_length=stored_length,
        pitch=pitch,
        resolution=resolution,
        speed_max=speed_max,
        accel_max=accel_max,
        error_coefficient=error_coefficient,
        tension_limit=tension_limit,
        compression_limit=compression_limit,
        gimbal_cone_half_angle=gimbal_cone,
    )
    scene = build_layout_scene(room, template, kind, mass, payload_mass, offset)
    save_scene(scene, out_path)
    emit_record("drives", scene.n_drives)
    emit_record("out", out_path)
