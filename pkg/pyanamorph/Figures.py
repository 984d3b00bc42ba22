import math

import numpy as np

from .OptConstant import *
from .OptMatrix import OptMatrix
from .Caustics import (
    circle_reflection_family,
    drop_path,
    drop_ray_family,
    envelope_2d,
    rainbow_minimum,
)
from .OptGeometry import snells_window_angle, unit, vec3

FIGURE_WIDTH_MM = 160.0
FIGURE_HEIGHT_MM = 120.0
FIGURE_MARGIN_MM = 10.0
FIGURE_BAND_MM = 8.0
STROKE_MM = 0.3
DOT_MM = 0.4
LABEL_MM = 3.0

DEFAULT_FIGURE_RAYS = 240
DEFAULT_ENVELOPE_SAMPLES = 2000
DEFAULT_DROP_RAYS = 40

INK = "#000000"
GREY = "#9e9e9e"
RED = "#d62728"
BLUE = "#1f77b4"
GREEN = "#2ca02c"
ORANGE = "#ff7f0e"


def _nice_length(target):
    """Largest 1, 2 or 5 times a power of ten not above target."""
    if not target > 0 or not math.isfinite(target):
        return 1.0
    base = 10.0 ** math.floor(math.log10(target))
    for step in (5.0, 2.0, 1.0):
        if step * base <= target:
            return step * base
    return base


def _length_label(length, unit):
    if unit != "m":
        return "%g %s" % (length, unit)
    if length >= 1:
        return "%g m" % length
    if length >= 0.01:
        return "%g cm" % (length * 100)
    if length >= 0.001:
        return "%g mm" % (length * 1000)
    return "%g µm" % (length * 1e6)


class SvgFigure:
    """Layered drawing on a canvas in millimeters.

    Elements are added in world coordinates (meters unless unit says
    otherwise) and stored on the canvas through self.matrix, y pointing up in
    the world and down on the canvas.
    """

    def __init__(self, width_mm=FIGURE_WIDTH_MM, height_mm=FIGURE_HEIGHT_MM, title=None, unit="m"):
        if width_mm <= 2 * FIGURE_MARGIN_MM or height_mm <= 2 * FIGURE_MARGIN_MM + FIGURE_BAND_MM:
            raise ValueError("figure canvas too small")
        self.width_mm = float(width_mm)
        self.height_mm = float(height_mm)
        self.title = title
        self.unit = unit
        self.layers = []
        self._layers = {}
        self.matrix = OptMatrix()
        self.matrix.post_scale(1000.0, -1000.0)
        self.matrix.post_translate(0.5 * self.width_mm, 0.5 * self.height_mm)

    def fit(self, points, margin_mm=FIGURE_MARGIN_MM):
        """Uniform world to canvas transform showing every finite point."""
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        points = points[np.isfinite(points).all(axis=1)]
        if len(points) == 0:
            return
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        span = hi - lo
        extent = float(span.max())
        if extent <= 0:
            extent = 1.0
        span = np.maximum(span, 1e-3 * extent)
        available_width = self.width_mm - 2 * margin_mm
        available_height = self.height_mm - 2 * margin_mm - FIGURE_BAND_MM
        scale = min(available_width / span[0], available_height / span[1])
        center = 0.5 * (lo + hi)
        matrix = OptMatrix()
        matrix.post_translate(-center[0], -center[1])
        matrix.post_scale(scale, -scale)
        matrix.post_translate(0.5 * self.width_mm, margin_mm + 0.5 * available_height)
        self.matrix = matrix

    def layer(self, name):
        if name not in self._layers:
            elements = []
            self._layers[name] = elements
            self.layers.append((name, elements))
        return self._layers[name]

    def _canvas(self, points):
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        return [tuple(p) for p in self.matrix.map_points(points)]

    def polyline(self, layer, points, stroke=INK, width=STROKE_MM, closed=False):
        """Adds the finite runs of points as separate polylines."""
        points = np.asarray(points, dtype=float)[..., :2].reshape(-1, 2)
        if closed and len(points) > 2:
            points = np.vstack([points, points[:1]])
        finite = np.isfinite(points).all(axis=1)
        run = []
        for point, ok in zip(points, finite):
            if ok:
                run.append(point)
                continue
            self._add_run(layer, run, stroke, width)
            run = []
        self._add_run(layer, run, stroke, width)

    def _add_run(self, layer, run, stroke, width):
        if len(run) < 2:
            return
        self.layer(layer).append(
            {"type": "polyline", "points": self._canvas(run), "stroke": stroke, "width": width}
        )

    def segment(self, layer, start, end, stroke=INK, width=STROKE_MM):
        self.layer(layer).append(
            {
                "type": "line",
                "points": self._canvas([start[:2], end[:2]]),
                "stroke": stroke,
                "width": width,
            }
        )

    def circle(self, layer, center, radius, stroke=INK, width=STROKE_MM):
        self.layer(layer).append(
            {
                "type": "circle",
                "points": self._canvas([center[:2]]),
                "radius": radius * self.matrix.scale_factor(),
                "stroke": stroke,
                "width": width,
            }
        )

    def dot(self, layer, point, fill=INK, radius_mm=DOT_MM):
        self.layer(layer).append(
            {
                "type": "circle",
                "points": self._canvas([point[:2]]),
                "radius": radius_mm,
                "fill": fill,
                "width": 0.0,
            }
        )

    def label(self, layer, point, text, size=LABEL_MM, offset_mm=(1.0, -1.0)):
        (x, y), = self._canvas([point[:2]])
        self.layer(layer).append(
            {
                "type": "text",
                "points": [(x + offset_mm[0], y + offset_mm[1])],
                "text": str(text),
                "size": size,
            }
        )

    def validate(self):
        for name, elements in self.layers:
            for element in elements:
                values = [v for p in element["points"] for v in p]
                values.append(element.get("radius", 0.0))
                values.append(element.get("width", 0.0))
                if not all(math.isfinite(v) for v in values):
                    raise ValueError("non-finite coordinate in layer %s" % name)

    def scale_bar_length(self):
        """(world length, canvas length in mm) of the scale bar."""
        scale = self.matrix.scale_factor()
        target = 0.25 * (self.width_mm - 2 * FIGURE_MARGIN_MM) / scale
        length = _nice_length(target)
        return length, length * scale

    def scale_bar_elements(self):
        length, canvas_length = self.scale_bar_length()
        y = self.height_mm - FIGURE_MARGIN_MM
        left = FIGURE_MARGIN_MM
        return [
            {
                "type": "line",
                "points": [(left, y), (left + canvas_length, y)],
                "stroke": INK,
                "width": 2 * STROKE_MM,
            },
            {
                "type": "text",
                "points": [(left, y - 1.5)],
                "text": _length_label(length, self.unit),
                "size": LABEL_MM,
            },
        ]

    def element_count(self, layer=None):
        if layer is not None:
            return len(self._layers.get(layer, []))
        return sum(len(elements) for _, elements in self.layers)


def caustic2d_figure(radius, source=None, direction=None, settings=None):
    """Mirror circle, reflected rays and their envelope. Returns (figure, sheet)."""
    if settings is None:
        settings = {}
    rays = int(settings.get("rays", DEFAULT_FIGURE_RAYS))
    samples = int(settings.get("samples", DEFAULT_ENVELOPE_SAMPLES))
    family = circle_reflection_family(radius, source, direction)
    sheet = envelope_2d(family, family.sample_params(samples), label="catacaustic")
    figure = SvgFigure(title="catacaustic of a circle")
    box = [(-radius, -radius), (radius, radius)]
    if source is not None and math.hypot(source[0], source[1]) <= 3 * radius:
        box.append((source[0], source[1]))
    figure.fit(box)
    figure.circle("mirror", (0.0, 0.0), radius)
    if source is None:
        beam = unit(vec3(*(direction if direction is not None else (1.0, 0.0)), 0.0))
    for u in family.sample_params(rays):
        ray = family(u)
        hit = ray.origin
        start = hit - 2 * radius * beam if source is None else vec3(source[0], source[1], 0.0)
        figure.segment("incident", start, hit, stroke=GREY, width=0.1)
        chord = max(-2.0 * float(np.dot(hit, ray.direction)), radius)
        figure.segment("reflected", hit, ray.at(chord), stroke=GREY, width=0.1)
    points = sheet.points()
    if len(points):
        points = points.copy()
        points[np.hypot(points[:, 0], points[:, 1]) > 2 * radius] = np.nan
        figure.polyline("caustic", points, stroke=RED, width=0.5, closed=sheet.closed)
    for cusp in sheet.cusp_points():
        figure.dot("cusps", cusp, fill=RED, radius_mm=0.8)
    if source is not None:
        figure.dot("source", source, fill=ORANGE, radius_mm=0.8)
    return figure, sheet


def rainbow_figure(n=N_WATER, settings=None):
    """Unit drop with once-reflected paths, the exit caustic and the rainbow ray."""
    if settings is None:
        settings = {}
    rays = int(settings.get("rays", DEFAULT_DROP_RAYS))
    figure = SvgFigure(title="rainbow rays in a drop", unit="drop radii")
    figure.fit([(-2.0, -2.0), (2.5, 2.0)])
    figure.circle("drop", (0.0, 0.0), 1.0)
    for b in (np.arange(rays) + 0.5) / rays:
        entry, back, exit_point, outgoing = drop_path(n, b)
        path = [(2.5, b), entry, back, exit_point, exit_point + 1.5 * outgoing]
        figure.polyline("paths", [p[:2] for p in path], stroke=GREY, width=0.1)
    family = drop_ray_family(n)
    sheet = envelope_2d(family, family.sample_params(DEFAULT_ENVELOPE_SAMPLES), label="rainbow")
    points = sheet.points()
    if len(points):
        points = points.copy()
        points[np.hypot(points[:, 0], points[:, 1]) > 2.0] = np.nan
        figure.polyline("caustic", points, stroke=RED, width=0.5)
    b_min, _, angle = rainbow_minimum(n)
    entry, back, exit_point, outgoing = drop_path(n, b_min)
    path = [(2.5, b_min), entry, back, exit_point, exit_point + 1.5 * outgoing]
    figure.polyline("rainbow-ray", [p[:2] for p in path], stroke=BLUE, width=0.5)
    figure.label("labels", exit_point + 1.5 * outgoing, "%.2f deg" % math.degrees(angle))
    return figure


def virtual_surface_figure(scene, surface, height_indices=None):
    """Top view of the tube and horizontal sections of the H image surface."""
    radius = scene.radius
    if height_indices is None:
        count = len(surface.heights)
        height_indices = sorted(set(np.linspace(0, count - 1, min(count, 5)).astype(int)))
    figure = SvgFigure(title="virtual image surface, top view")
    figure.fit([(-1.2 * radius, -1.2 * radius), (1.2 * radius, 1.2 * radius)])
    figure.circle("cylinder", (0.0, 0.0), radius)
    theta = scene.eye_azimuth
    towards = (1.15 * radius * math.cos(theta), 1.15 * radius * math.sin(theta))
    figure.label("labels", towards, "to eye")
    for k in height_indices:
        section = surface.h_points[:, k, :2].copy()
        section[~surface.mask[:, k]] = np.nan
        figure.polyline("sections", section, stroke=BLUE)
    return figure


def blur_spot_figure(spots):
    """Side by side retinal spots, spots being (title, BlurSpot) pairs."""
    figure = SvgFigure(title="blur spots")
    clouds = [np.asarray(spot.points, dtype=float).reshape(-1, 2) for _, spot in spots]
    spread = max([float(np.abs(c).max()) for c in clouds if len(c)] + [1e-9])
    spacing = 3.0 * spread
    box = []
    for k, cloud in enumerate(clouds):
        offset = np.array([k * spacing, 0.0])
        box.extend([offset - spread, offset + spread])
    figure.fit(box)
    for k, ((title, _), cloud) in enumerate(zip(spots, clouds)):
        offset = np.array([k * spacing, 0.0])
        for point in cloud:
            figure.dot("spots", point + offset, radius_mm=0.25)
        figure.label("labels", offset + np.array([-spread, spread]), title)
    return figure


def _side(points):
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    return np.stack([points[:, 0], points[:, 2]], axis=-1)


def pool_figure(ws, profile, sight_lines=6):
    """Side view of a pool: true floor, its H and V images and a few sight lines."""
    eye = ws.eye
    floor = _side([s.floor_point for s in profile])
    h_image = _side([s.h_point for s in profile])
    v_image = _side([s.v_point for s in profile])
    figure = SvgFigure(title="apparent pool floor")
    far = float(np.nanmax(floor[:, 0])) if len(floor) else 1.0
    figure.fit([(eye[0], eye[2]), (far, -ws.depth), (eye[0], -ws.depth)])
    figure.segment("water", (eye[0], 0.0), (far, 0.0), stroke=BLUE)
    figure.segment("floor", (eye[0], -ws.depth), (far, -ws.depth))
    step = max(1, len(profile) // max(1, sight_lines))
    for sample in profile[::step]:
        crossing_x = eye[0] + eye[2] / math.tan(sample.gaze)
        figure.polyline(
            "sight-lines",
            [(eye[0], eye[2]), (crossing_x, 0.0), (sample.floor_point[0], sample.floor_point[2])],
            stroke=GREY,
            width=0.1,
        )
    figure.polyline("true-floor", floor, stroke=INK)
    figure.polyline("h-image", h_image, stroke=RED)
    figure.polyline("v-image", v_image, stroke=GREEN)
    figure.dot("eye", (eye[0], eye[2]))
    return figure


def ruler_figure(ws, base, length, shape):
    """Side view of a submerged vertical ruler and its H and V images."""
    eye = ws.eye
    figure = SvgFigure(title="submerged ruler")
    box = [(eye[0], eye[2]), (base[0], 0.0), (base[0], -length)]
    if len(shape.h_points):
        box.extend(_side(shape.h_points))
        box.extend(_side(shape.v_points))
    figure.fit(box)
    left = min(eye[0], base[0])
    right = max(eye[0], base[0])
    figure.segment("water", (left, 0.0), (right, 0.0), stroke=BLUE)
    figure.segment("ruler", (base[0], 0.0), (base[0], -length), width=0.5)
    if len(shape.h_points):
        figure.polyline("h-image", _side(shape.h_points), stroke=RED)
        figure.polyline("v-image", _side(shape.v_points), stroke=GREEN)
    figure.dot("eye", (eye[0], eye[2]))
    return figure


def archer_figure(ws, aim):
    """Vertical section through the archer's sight line with Snell's window."""
    eye = ws.eye
    apparent = np.asarray(aim.apparent_direction, dtype=float)
    true = np.asarray(aim.true_direction, dtype=float)
    across = math.hypot(apparent[0], apparent[1])
    if across > UNIT_TOLERANCE:
        axis = np.array([apparent[0] / across, apparent[1] / across, 0.0])
    else:
        axis = np.array([1.0, 0.0, 0.0])

    def plane(direction, t):
        point = t * np.asarray(direction)
        return (float(np.dot(point, axis)), float(eye[2] + point[2]))

    depth = -eye[2]
    reach = 3.0 * depth / max(apparent[2], 0.2)
    figure = SvgFigure(title="archer fish sight line")
    window = snells_window_angle(ws.n_water)
    rim = depth * math.tan(window)
    figure.fit([(-rim, eye[2]), (rim, eye[2]), plane(apparent, reach), plane(true, reach)])
    figure.segment("water", (-rim, 0.0), (rim, 0.0), stroke=BLUE)
    for side in (-1.0, 1.0):
        figure.segment("window", (0.0, eye[2]), (side * rim, 0.0), stroke=GREY, width=0.1)
    crossing = depth / apparent[2]
    figure.segment("apparent", (0.0, eye[2]), plane(apparent, reach), stroke=RED)
    figure.segment("true", (0.0, eye[2]), plane(true, reach), stroke=GREEN)
    figure.dot("crossing", plane(apparent, crossing))
    figure.dot("eye", (0.0, eye[2]))
    figure.label("labels", plane(true, reach), "%.3f deg" % math.degrees(aim.correction))
    return figure
