import argparse
import json
import logging
import math
import os.path
import sys

import numpy as np

from .OptConstant import *
from .OptErrors import ConfigError, OpticsError, UsageError
from .OptFunctions import (
    angle_in_unit,
    degrees,
    length_in_unit,
    parse_angle,
    parse_length,
    split_quantity,
)
from .Anamorph import AnamorphKind, build_map
from .AnamorphRender import render, sheet_layout
from .Caustics import (
    blur_spot,
    least_confusion_focus,
    rainbow_histogram,
    rainbow_minimum,
)
from .CsvWriter import Table
from .CylinderScene import (
    Scene,
    cross_section_ratio,
    front_generator,
    image_pair,
    solve_reflection_point,
    trace_to_table,
    virtual_surface,
)
from .Figures import (
    archer_figure,
    blur_spot_figure,
    caustic2d_figure,
    pool_figure,
    rainbow_figure,
    ruler_figure,
    virtual_surface_figure,
)
from .OptGeometry import vec3
from .PyAnamorph import get_writer_by_filename, supported_formats, write
from .RasterImage import RasterImage
from .SceneReader import read_scene_file
from .WaterOptics import (
    WaterScene,
    archer_aim,
    archer_sight,
    floor_slopes,
    line_deviation,
    pool_floor_profile,
    ruler_apparent_shape,
    slope_at_gaze,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

COMMAND_ANAMORPH = "anamorph"
COMMAND_CAUSTIC2D = "caustic2d"
COMMAND_RAINBOW = "rainbow"
COMMAND_VIRTUAL_SURFACE = "virtual-surface"
COMMAND_BLUR_SPOT = "blur-spot"
COMMAND_POOL = "pool"
COMMAND_RULER = "ruler"
COMMAND_ARCHER = "archer"

# Pool defaults: 10 ft deep, seen from 10 ft above the water.
DEFAULT_POOL_EYE_HEIGHT = 10 * METERS_PER_FOOT
DEFAULT_POOL_DEPTH = 10 * METERS_PER_FOOT
DEFAULT_POOL_GAZE = math.radians(35.0)
DEFAULT_POOL_GAZE_MIN = math.radians(10.0)
DEFAULT_POOL_GAZE_MAX = math.radians(80.0)
DEFAULT_RULER_EYE_HEIGHT = 1.5
DEFAULT_RULER_DISTANCE = 2.0
DEFAULT_RULER_LENGTH = 1.0
DEFAULT_ARCHER_DEPTH = 0.5
DEFAULT_ARCHER_ANGLE = math.radians(30.0)
DEFAULT_BLUR_APERTURE = 0.004
DEFAULT_BLUR_POINT_HEIGHT = 0.02

EXPECTED = {
    "length": "number with optional unit m, cm, mm, in or ft",
    "angle": "number with optional unit deg or rad",
}

SCENE_FLAGS = (
    ("radius", "--radius"),
    ("cylinder_height", "--cylinder-height"),
    ("eye_distance", "--eye-distance"),
    ("eye_height", "--eye-height"),
    ("eye_x", "--eye-x"),
    ("eye_y", "--eye-y"),
    ("eye_z", "--eye-z"),
)


class Command:
    """One parsed invocation: subcommand name, resolved options in meters and
    radians, the echo of unit-carrying inputs and the scene it runs in."""

    def __init__(self, name, options, inputs, scene=None, water=None, verbose=False):
        self.name = name
        self.options = options
        self.inputs = inputs
        self.scene = scene
        self.water = water
        self.verbose = verbose

    def __repr__(self):
        return "Command(%s, %r)" % (self.name, self.options)

    def sidecar_path(self, extension):
        return os.path.splitext(self.options["out"])[0] + "." + extension


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, reason=json.dumps(message))


def _common_parent():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--scene", help="key=value scene file")
    parent.add_argument("--units", default=None, help="unit of bare numbers (m, cm, mm, in, ft)")
    parent.add_argument("--workers", type=int, default=1, help="threads for grid evaluation")
    parent.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    return parent


def _cylinder_parent():
    parent = argparse.ArgumentParser(add_help=False)
    for key, flag in SCENE_FLAGS:
        parent.add_argument(flag, dest=key, default=None)
    parent.add_argument("--eye-reference", choices=(EYE_REFERENCE_SURFACE, EYE_REFERENCE_AXIS))
    return parent


def _water_parent():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--n-water", dest="n_water", type=float, default=None)
    return parent


def build_parser():
    common = _common_parent()
    cylinder = _cylinder_parent()
    water = _water_parent()
    parser = _Parser(
        prog="pyanamorph",
        description="Cylindrical mirror anamorphs, caustics and water optics.",
    )
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands.required = True

    sub = commands.add_parser(
        COMMAND_ANAMORPH, parents=[common, cylinder], help="render a printable anamorph sheet"
    )
    sub.add_argument("--kind", default=AnamorphKind.ERECT, choices=AnamorphKind.ALL)
    sub.add_argument("--image", required=True, help="source image")
    sub.add_argument("--out", default="anamorph.png")
    sub.add_argument("--dpi", type=float, default=DEFAULT_DPI)
    sub.add_argument("--width", default=None, help="source width on the tube")
    sub.add_argument("--height", default=None, help="source height on the tube")
    sub.add_argument("--base-height", dest="base_height", default=None)
    sub.add_argument("--sheet", default=SHEET_A4, choices=(SHEET_A4, SHEET_LETTER, "none"))
    sub.add_argument("--no-footprint", dest="footprint", action="store_false")

    sub = commands.add_parser(
        COMMAND_CAUSTIC2D, parents=[common, cylinder], help="catacaustic of a circle"
    )
    sub.add_argument("--source-x", dest="source_x", default=None)
    sub.add_argument("--source-y", dest="source_y", default=None)
    sub.add_argument("--beam-angle", dest="beam_angle", default=None)
    sub.add_argument("--rays", type=int, default=240)
    sub.add_argument("--samples", type=int, default=2000)
    sub.add_argument("--out", default="caustic2d.svg")

    sub = commands.add_parser(COMMAND_RAINBOW, parents=[common], help="rainbow angle and histogram")
    sub.add_argument("--n", type=float, default=N_WATER)
    sub.add_argument("--samples", type=int, default=200000)
    sub.add_argument("--bins", type=int, default=90)
    sub.add_argument("--out", default="rainbow.svg")

    sub = commands.add_parser(
        COMMAND_VIRTUAL_SURFACE, parents=[common, cylinder], help="H image surface inside the tube"
    )
    sub.add_argument("--azimuths", type=int, default=61)
    sub.add_argument("--heights", type=int, default=41)
    sub.add_argument("--out", default="virtual-surface.svg")

    sub = commands.add_parser(
        COMMAND_BLUR_SPOT, parents=[common, cylinder], help="astigmatic blur through a pupil"
    )
    sub.add_argument("--aperture", default=None)
    sub.add_argument("--focus", default=None, help="single focus distance")
    sub.add_argument("--source-x", dest="source_x", default=None)
    sub.add_argument("--source-y", dest="source_y", default=None)
    sub.add_argument("--point-height", dest="point_height", default=None)
    sub.add_argument("--aperture-grid", dest="aperture_grid", type=int, default=DEFAULT_APERTURE_GRID)
    sub.add_argument("--out", default="blur-spot.svg")

    sub = commands.add_parser(COMMAND_POOL, parents=[common, water], help="apparent pool floor")
    sub.add_argument("--eye-height", dest="eye_height", default=None)
    sub.add_argument("--depth", default=None)
    sub.add_argument("--gaze", default=None)
    sub.add_argument("--gaze-min", dest="gaze_min", default=None)
    sub.add_argument("--gaze-max", dest="gaze_max", default=None)
    sub.add_argument("--samples", type=int, default=50)
    sub.add_argument("--out", default="pool.svg")

    sub = commands.add_parser(COMMAND_RULER, parents=[common, water], help="submerged vertical ruler")
    sub.add_argument("--eye-height", dest="eye_height", default=None)
    sub.add_argument("--distance", default=None)
    sub.add_argument("--length", default=None)
    sub.add_argument("--samples", type=int, default=20)
    sub.add_argument("--out", default="ruler.svg")

    sub = commands.add_parser(COMMAND_ARCHER, parents=[common, water], help="archer fish sight line")
    sub.add_argument("--depth", default=None, help="eye depth below the surface")
    sub.add_argument("--target-x", dest="target_x", default=None)
    sub.add_argument("--target-z", dest="target_z", default=None)
    sub.add_argument("--apparent-angle", dest="apparent_angle", default=None)
    sub.add_argument("--target-height", dest="target_height", default=None)
    sub.add_argument("--out", default="archer.svg")
    return parser


class _Resolver:
    """Turns flag texts into meters and radians, keeping an echo of each."""

    def __init__(self, args, units):
        self.args = args
        self.units = units
        self.inputs = {}

    def _quantity(self, kind, key, default):
        text = getattr(self.args, key, None)
        if text is None:
            return default
        flag = "--" + key.replace("_", "-")
        default_unit = self.units if kind == "length" else "deg"
        try:
            if kind == "length":
                value = parse_length(text, default_unit)
            else:
                value = parse_angle(text, default_unit)
        except ValueError:
            raise UsageError(
                "bad %s value" % kind,
                flag=flag,
                expected=json.dumps(EXPECTED[kind]),
                value=json.dumps(text),
            )
        unit = split_quantity(text)[1] or default_unit
        back = length_in_unit if kind == "length" else angle_in_unit
        self.inputs[key] = {
            "text": text,
            "unit": unit,
            "value": value,
            "in_unit": back(value, unit),
        }
        return value

    def length(self, key, default=None):
        return self._quantity("length", key, default)

    def angle(self, key, default=None):
        return self._quantity("angle", key, default)


def _positive(flag, value):
    if value is not None and not value > 0:
        raise UsageError("value must be positive", flag=flag, value=value)
    return value


def _check_out(out, categories):
    writer = get_writer_by_filename(out)
    if writer is not None and _category(writer) in categories:
        return
    raise UsageError(
        "unsupported output file",
        flag="--out",
        expected="/".join(categories),
        value=json.dumps(out),
    )


def _category(writer):
    for file_type in supported_formats():
        if file_type["writer"] is writer:
            return file_type["category"]
    return None


def parse_args(argv=None):
    """Parses argv into a validated Command, raising UsageError on bad input."""
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(argv)
    units = (args.units or "m").lower()
    file_settings = {}
    if args.scene is not None:
        try:
            file_settings = read_scene_file(args.scene)
        except IOError as e:
            raise ConfigError(
                "cannot read scene file",
                path=json.dumps(args.scene),
                reason=json.dumps(str(e.strerror)),
            )
    try:
        parse_length("1", units)
    except ValueError:
        raise UsageError("unknown unit", flag="--units", expected=json.dumps(EXPECTED["length"]))
    resolve = _Resolver(args, units)
    options = {
        "out": args.out,
        "workers": max(1, args.workers),
    }
    name = args.command
    scene = None
    water = None
    if name in (COMMAND_ANAMORPH, COMMAND_CAUSTIC2D, COMMAND_VIRTUAL_SURFACE, COMMAND_BLUR_SPOT):
        settings = {k: v for k, v in file_settings.items() if k != "n_water"}
        for key, flag in SCENE_FLAGS:
            value = resolve.length(key)
            if value is not None:
                settings[key] = value
        if args.eye_reference is not None:
            settings["eye_reference"] = args.eye_reference
        try:
            scene = Scene.from_settings(settings)
        except ValueError as e:
            raise UsageError("invalid scene", reason=json.dumps(str(e)))
    else:
        n_water = file_settings.get("n_water", N_WATER)
        if getattr(args, "n_water", None) is not None:
            n_water = args.n_water
        if n_water < 1:
            raise UsageError("index must be at least 1", flag="--n-water", value=n_water)
        water = n_water

    if name == COMMAND_ANAMORPH:
        _check_out(args.out, ("raster",))
        options.update(
            kind=args.kind,
            image=args.image,
            dpi=_positive("--dpi", args.dpi),
            width=_positive("--width", resolve.length("width", DEFAULT_IMAGE_WIDTH)),
            height=_positive("--height", resolve.length("height", DEFAULT_IMAGE_HEIGHT)),
            base_height=resolve.length("base_height", DEFAULT_BASE_HEIGHT),
            sheet=args.sheet,
            footprint=args.footprint,
        )
    elif name == COMMAND_CAUSTIC2D:
        _check_out(args.out, ("figure",))
        source_x = resolve.length("source_x")
        source_y = resolve.length("source_y")
        beam = resolve.angle("beam_angle")
        if (source_x is None) != (source_y is None):
            raise UsageError("give both source coordinates", flag="--source-x/--source-y")
        if source_x is not None and beam is not None:
            raise UsageError("choose a point source or a beam", flag="--beam-angle")
        options.update(
            source=None if source_x is None else (source_x, source_y),
            beam_angle=0.0 if beam is None else beam,
            rays=int(_positive("--rays", args.rays)),
            samples=int(_positive("--samples", args.samples)),
        )
    elif name == COMMAND_RAINBOW:
        _check_out(args.out, ("figure",))
        if not args.n > 1:
            raise UsageError("drop index must exceed 1", flag="--n", value=args.n)
        options.update(
            n=args.n,
            samples=int(_positive("--samples", args.samples)),
            bins=int(_positive("--bins", args.bins)),
        )
    elif name == COMMAND_VIRTUAL_SURFACE:
        _check_out(args.out, ("figure",))
        options.update(
            azimuths=int(_positive("--azimuths", args.azimuths)),
            heights=int(_positive("--heights", args.heights)),
        )
    elif name == COMMAND_BLUR_SPOT:
        _check_out(args.out, ("figure",))
        source_x = resolve.length("source_x")
        source_y = resolve.length("source_y")
        if (source_x is None) != (source_y is None):
            raise UsageError("give both source coordinates", flag="--source-x/--source-y")
        options.update(
            aperture=_positive("--aperture", resolve.length("aperture", DEFAULT_BLUR_APERTURE)),
            focus=_positive("--focus", resolve.length("focus")),
            source=None if source_x is None else (source_x, source_y),
            point_height=resolve.length("point_height", DEFAULT_BLUR_POINT_HEIGHT),
            aperture_grid=int(_positive("--aperture-grid", args.aperture_grid)),
        )
        if options["focus"] is not None and not options["focus"] > DEFAULT_EYE_FOCAL_LENGTH:
            raise UsageError(
                "focus must exceed the eye focal length",
                flag="--focus",
                minimum=DEFAULT_EYE_FOCAL_LENGTH,
                value=options["focus"],
            )
    elif name == COMMAND_POOL:
        _check_out(args.out, ("figure",))
        options.update(
            eye_height=_positive("--eye-height", resolve.length("eye_height", DEFAULT_POOL_EYE_HEIGHT)),
            depth=_positive("--depth", resolve.length("depth", DEFAULT_POOL_DEPTH)),
            gaze=_positive("--gaze", resolve.angle("gaze", DEFAULT_POOL_GAZE)),
            gaze_min=_positive("--gaze-min", resolve.angle("gaze_min", DEFAULT_POOL_GAZE_MIN)),
            gaze_max=_positive("--gaze-max", resolve.angle("gaze_max", DEFAULT_POOL_GAZE_MAX)),
            samples=int(_positive("--samples", args.samples)),
        )
        if not options["gaze_min"] < options["gaze_max"] < math.pi / 2:
            raise UsageError("need gaze-min < gaze-max < 90deg", flag="--gaze-max")
    elif name == COMMAND_RULER:
        _check_out(args.out, ("figure",))
        options.update(
            eye_height=_positive("--eye-height", resolve.length("eye_height", DEFAULT_RULER_EYE_HEIGHT)),
            distance=resolve.length("distance", DEFAULT_RULER_DISTANCE),
            length=_positive("--length", resolve.length("length", DEFAULT_RULER_LENGTH)),
            samples=int(_positive("--samples", args.samples)),
        )
    elif name == COMMAND_ARCHER:
        _check_out(args.out, ("figure",))
        target_x = resolve.length("target_x")
        target_z = resolve.length("target_z")
        if (target_x is None) != (target_z is None):
            raise UsageError("give both target coordinates", flag="--target-x/--target-z")
        if target_z is not None and not target_z > 0:
            raise UsageError("target must be above the water", flag="--target-z", value=target_z)
        options.update(
            depth=_positive("--depth", resolve.length("depth", DEFAULT_ARCHER_DEPTH)),
            target=None if target_x is None else (target_x, target_z),
            apparent_angle=resolve.angle("apparent_angle", DEFAULT_ARCHER_ANGLE),
            target_height=resolve.length("target_height"),
        )
    return Command(name, options, resolve.inputs, scene, water, args.verbose)


def _sidecar(command, metrics):
    document = {
        "command": command.name,
        "inputs": command.inputs,
        "metrics": metrics,
    }
    if command.scene is not None:
        document["scene"] = command.scene.to_dict()
    if command.water is not None:
        document["n_water"] = command.water
    return document


def _emit(path, obj, settings=None):
    write(obj, path, settings)
    print("wrote=%s" % path)


def _run_anamorph(command):
    o = command.options
    settings = {"base_height": o["base_height"], "workers": o["workers"]}
    anamorph = build_map(o["kind"], command.scene, o["width"], o["height"], settings)
    source = RasterImage.read(o["image"])
    out = render(
        anamorph,
        source,
        {"dpi": o["dpi"], "footprint": o["footprint"], "workers": o["workers"]},
    )
    if o["sheet"] != "none":
        out = sheet_layout(out, o["sheet"])
    _emit(o["out"], out)
    extras = out.extras
    metrics = {
        "kind": o["kind"],
        "dpi": o["dpi"],
        "width_px": out.width,
        "height_px": out.height,
        "source_width_px": source.width,
        "source_height_px": source.height,
        "coverage": extras["coverage"],
        "unreachable": extras["unreachable"],
        "circle_center_px": extras["circle_center_px"],
        "circle_diameter_px": extras["circle_diameter_px"],
        "sheet": o["sheet"],
        "image_width": o["width"],
        "image_height": o["height"],
        "base_height": o["base_height"],
    }
    if extras["unreachable"]:
        print("warning=unreachable pixels=%d" % extras["unreachable"], file=sys.stderr)
    _emit(command.sidecar_path("json"), _sidecar(command, metrics))


def _run_caustic2d(command):
    o = command.options
    radius = command.scene.radius
    direction = None
    if o["source"] is None:
        direction = (math.cos(o["beam_angle"]), math.sin(o["beam_angle"]))
    figure, sheet = caustic2d_figure(
        radius, o["source"], direction, {"rays": o["rays"], "samples": o["samples"]}
    )
    table = Table(("parameter", "x", "y", "cusp"))
    cusps = set(sheet.cusps)
    for k, (u, point) in enumerate(sheet.samples):
        table.add_row(u, point[0], point[1], int(k in cusps))
    _emit(o["out"], figure)
    _emit(command.sidecar_path("csv"), table)
    metrics = {
        "radius": radius,
        "source": o["source"],
        "beam_angle": None if o["source"] is not None else o["beam_angle"],
        "envelope_samples": len(sheet),
        "degenerate": len(sheet.degenerate),
        "cusps": [[float(p[0]), float(p[1])] for p in sheet.cusp_points()],
        "closed": sheet.closed,
    }
    _emit(command.sidecar_path("json"), _sidecar(command, metrics))


def _run_rainbow(command):
    o = command.options
    counts, edges, angle = rainbow_histogram(o["n"], o["samples"], o["bins"])
    b, deviation, _ = rainbow_minimum(o["n"])
    table = Table(("angle_low_deg", "angle_high_deg", "count"))
    for k, count in enumerate(counts):
        table.add_row(degrees(edges[k]), degrees(edges[k + 1]), int(count))
    _emit(o["out"], rainbow_figure(o["n"]))
    _emit(command.sidecar_path("csv"), table)
    metrics = {
        "n": o["n"],
        "impact_parameter": b,
        "minimum_deviation_deg": degrees(deviation),
        "rainbow_angle_deg": degrees(angle),
    }
    _emit(command.sidecar_path("json"), _sidecar(command, metrics))


def _surface_grid(scene, azimuth_count, height_count):
    visible = math.acos(scene.radius / scene.eye_horizontal_distance) * 0.98
    theta = scene.eye_azimuth
    azimuths = np.linspace(theta - visible, theta + visible, azimuth_count)
    top = min(scene.cylinder_height, 0.999 * scene.eye[2])
    heights = np.linspace(0.0, top, height_count)
    return azimuths, heights


def _run_virtual_surface(command):
    o = command.options
    scene = command.scene
    azimuths, heights = _surface_grid(scene, o["azimuths"], o["heights"])
    surface = virtual_surface(scene, azimuths, heights, {"workers": o["workers"]})
    table = Table(("azimuth_deg", "height", "h_x", "h_y", "h_z", "table_x", "table_y"))
    for i, azimuth in enumerate(azimuths):
        for k, height in enumerate(heights):
            if not surface.mask[i, k]:
                continue
            h = surface.h_points[i, k]
            t = surface.table_points[i, k]
            table.add_row(degrees(azimuth), height, h[0], h[1], h[2], t[0], t[1])
    _emit(o["out"], virtual_surface_figure(scene, surface))
    _emit(command.sidecar_path("csv"), table)
    middle = len(heights) // 2
    metrics = {
        "azimuths": len(azimuths),
        "heights": len(heights),
        "skipped": surface.skipped,
        "cross_section_height": float(heights[middle]),
        "cross_section_ratio": cross_section_ratio(scene, surface, middle),
    }
    _emit(command.sidecar_path("json"), _sidecar(command, metrics))


def _run_blur_spot(command):
    o = command.options
    scene = command.scene
    if o["source"] is None:
        source = trace_to_table(scene, front_generator(scene, o["point_height"]))
    else:
        source = vec3(o["source"][0], o["source"][1], 0.0)
    point = solve_reflection_point(scene, source)
    pair = image_pair(scene, point, source)
    d_h, d_v = pair.distances(scene.eye)
    if o["focus"] is not None:
        foci = [("focus", o["focus"])]
    else:
        foci = [
            ("H focus", d_h),
            ("least confusion", least_confusion_focus(d_h, d_v)),
            ("V focus", d_v),
        ]
    settings = {"aperture_grid": o["aperture_grid"]}
    spots = []
    table = Table(
        ("label", "focus_distance", "sigma_horizontal", "sigma_vertical", "aspect", "orientation")
    )
    for label, focus in foci:
        spot = blur_spot(scene, o["aperture"], focus, source, point, settings)
        spots.append((label, spot))
        table.add_row(
            label, focus, spot.sigma_horizontal, spot.sigma_vertical, spot.aspect, spot.orientation
        )
    _emit(o["out"], blur_spot_figure(spots))
    _emit(command.sidecar_path("csv"), table)
    metrics = {
        "source": source,
        "point": point,
        "h_distance": d_h,
        "v_distance": d_v,
        "aperture": o["aperture"],
        "spots": [
            {"label": label, "focus_distance": spot.focus_distance, "orientation": spot.orientation}
            for label, spot in spots
        ],
    }
    _emit(command.sidecar_path("json"), _sidecar(command, metrics))


def _run_pool(command):
    o = command.options
    ws = WaterScene((0.0, 0.0, o["eye_height"]), o["depth"], command.water)
    gazes = np.linspace(o["gaze_min"], o["gaze_max"], o["samples"])
    profile = pool_floor_profile(ws, gazes)
    table = Table(("gaze_deg", "floor_x", "floor_z", "h_x", "h_z", "v_x", "v_z"))
    for sample in profile:
        table.add_row(
            degrees(sample.gaze),
            sample.floor_point[0],
            sample.floor_point[2],
            sample.h_point[0],
            sample.h_point[2],
            sample.v_point[0],
            sample.v_point[2],
        )
    _emit(o["out"], pool_figure(ws, profile))
    _emit(command.sidecar_path("csv"), table)
    metrics = {
        "eye_height": o["eye_height"],
        "depth": o["depth"],
        "gaze_deg": degrees(o["gaze"]),
        "slope_h_deg": degrees(slope_at_gaze(ws, o["gaze"], LABEL_H, "apparent")),
        "slope_h_true_run_deg": degrees(slope_at_gaze(ws, o["gaze"], LABEL_H, "true")),
        "slope_v_deg": degrees(slope_at_gaze(ws, o["gaze"], LABEL_V, "apparent")),
        "profile_slopes_v_deg": [
            [distance, degrees(slope)] for distance, slope in floor_slopes(profile, LABEL_V)
        ],
    }
    _emit(command.sidecar_path("json"), _sidecar(command, metrics))


def _run_ruler(command):
    o = command.options
    ws = WaterScene((0.0, 0.0, o["eye_height"]), None, command.water)
    base = (o["distance"], 0.0)
    shape = ruler_apparent_shape(ws, base, o["length"], o["samples"])
    table = Table(("depth", "h_x", "h_z", "v_x", "v_z", "separation"))
    separations = shape.separations()
    for k, depth in enumerate(shape.depths):
        h = shape.h_points[k]
        v = shape.v_points[k]
        table.add_row(depth, h[0], h[2], v[0], v[2], separations[k])
    _emit(o["out"], ruler_figure(ws, base, o["length"], shape))
    _emit(command.sidecar_path("csv"), table)
    metrics = {
        "samples": len(shape.depths),
        "dropped": shape.dropped,
        "h_line_deviation": float(np.max(line_deviation(shape.h_points), initial=0.0)),
        "v_line_deviation": float(np.max(line_deviation(shape.v_points), initial=0.0)),
    }
    _emit(command.sidecar_path("json"), _sidecar(command, metrics))


def _run_archer(command):
    o = command.options
    ws = WaterScene((0.0, 0.0, -o["depth"]), None, command.water)
    if o["target"] is not None:
        aim = archer_aim(ws, vec3(o["target"][0], 0.0, o["target"][1]))
    else:
        angle = o["apparent_angle"]
        direction = vec3(math.sin(angle), 0.0, math.cos(angle))
        aim = archer_sight(ws, direction, o["target_height"])
    _emit(o["out"], archer_figure(ws, aim))
    _emit(command.sidecar_path("json"), _sidecar(command, aim.to_dict()))


HANDLERS = {
    COMMAND_ANAMORPH: _run_anamorph,
    COMMAND_CAUSTIC2D: _run_caustic2d,
    COMMAND_RAINBOW: _run_rainbow,
    COMMAND_VIRTUAL_SURFACE: _run_virtual_surface,
    COMMAND_BLUR_SPOT: _run_blur_spot,
    COMMAND_POOL: _run_pool,
    COMMAND_RULER: _run_ruler,
    COMMAND_ARCHER: _run_archer,
}


def run(command):
    """Runs a parsed command.

    0 on success, 1 on a domain or I/O error, 2 when a parameter combination
    is rejected by the library.
    """
    try:
        HANDLERS[command.name](command)
    except OpticsError as e:
        print(e.diagnostic(), file=sys.stderr)
        return EXIT_DOMAIN
    except IOError as e:
        print("error=io message=%s" % json.dumps(str(e)), file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as e:
        print(UsageError(str(e), reason=json.dumps(str(e))).diagnostic(), file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv=None):
    try:
        command = parse_args(argv)
    except (UsageError, ConfigError) as e:
        print(e.diagnostic(), file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if command.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logger.debug("running %r", command)
    return run(command)
