import logging
import math

import numpy as np
from scipy.optimize import brentq

from .OptConstant import *
from .OptErrors import (
    DegenerateChiefRay,
    NoHit,
    NoSolution,
    NoTableHit,
)
from .OptFunctions import evaluate_blocks, parse_length, wrap_angle
from .OptGeometry import (
    Ray,
    cylinder_normal,
    cylinder_point,
    intersect_plane,
    norm,
    reflect,
    unit,
    vec3,
)

logger = logging.getLogger(__name__)


class Scene:
    """Eye, vertical mirror tube on the z axis, table at z = 0. Immutable."""

    def __init__(
        self,
        eye=None,
        radius=DEFAULT_RADIUS,
        cylinder_height=DEFAULT_CYLINDER_HEIGHT,
    ):
        radius = float(radius)
        if radius <= 0:
            raise ValueError("cylinder radius must be positive")
        if cylinder_height <= 0:
            raise ValueError("cylinder height must be positive")
        if eye is None:
            eye = Scene.default_eye(radius)
        eye = vec3(eye)
        if eye[0] * eye[0] + eye[1] * eye[1] <= radius * radius:
            raise ValueError("eye must be outside the cylinder")
        if eye[2] <= 0:
            raise ValueError("eye must be above the table")
        eye.flags.writeable = False
        self._eye = eye
        self._radius = radius
        self._cylinder_height = float(cylinder_height)

    def __repr__(self):
        return "Scene(eye=%s, radius=%r, cylinder_height=%r)" % (
            list(self._eye),
            self._radius,
            self._cylinder_height,
        )

    def __eq__(self, other):
        if not isinstance(other, Scene):
            return False
        return (
            np.array_equal(self._eye, other._eye)
            and self._radius == other._radius
            and self._cylinder_height == other._cylinder_height
        )

    @property
    def eye(self):
        return self._eye

    @property
    def radius(self):
        return self._radius

    @property
    def cylinder_height(self):
        return self._cylinder_height

    @property
    def eye_azimuth(self):
        return math.atan2(self._eye[1], self._eye[0])

    @property
    def eye_horizontal_distance(self):
        return math.hypot(self._eye[0], self._eye[1])

    def with_eye(self, eye):
        return Scene(eye, self._radius, self._cylinder_height)

    def to_dict(self):
        return {
            "eye_x": float(self._eye[0]),
            "eye_y": float(self._eye[1]),
            "eye_z": float(self._eye[2]),
            "radius": self._radius,
            "cylinder_height": self._cylinder_height,
        }

    @staticmethod
    def default_eye(
        radius=DEFAULT_RADIUS,
        eye_distance=DEFAULT_EYE_DISTANCE,
        eye_height=DEFAULT_EYE_HEIGHT,
        eye_reference=DEFAULT_EYE_REFERENCE,
    ):
        """Eye on the +x side, eye_distance from the tube surface or its axis."""
        if eye_reference == EYE_REFERENCE_SURFACE:
            x = radius + eye_distance
        elif eye_reference == EYE_REFERENCE_AXIS:
            x = eye_distance
        else:
            raise ValueError("eye_reference must be 'surface' or 'axis'")
        return vec3(x, 0.0, eye_height)

    @staticmethod
    def from_settings(settings=None):
        """Builds a scene from a settings dict; explicit eye_x/y/z win over distance and height."""
        if settings is None:
            settings = {}
        unit_name = settings.get("units", "m")

        def length(key, default):
            value = settings.get(key, None)
            if value is None:
                return default
            if isinstance(value, (int, float)):
                return float(value)
            return parse_length(value, unit_name)

        radius = length("radius", DEFAULT_RADIUS)
        eye = Scene.default_eye(
            radius,
            length("eye_distance", DEFAULT_EYE_DISTANCE),
            length("eye_height", DEFAULT_EYE_HEIGHT),
            settings.get("eye_reference", DEFAULT_EYE_REFERENCE),
        )
        eye = vec3(
            length("eye_x", eye[0]),
            length("eye_y", eye[1]),
            length("eye_z", eye[2]),
        )
        return Scene(
            eye, radius, length("cylinder_height", DEFAULT_CYLINDER_HEIGHT)
        )

    def is_visible(self, point):
        """True when the outward normal at a cylinder point faces the eye."""
        normal = cylinder_normal(point, self._radius)
        return float(np.dot(normal, self._eye - point)) > 0


class SightLine:
    """Chief ray eye -> P, its reflection at P and where that reaches the table."""

    def __init__(self, eye, point, normal, incident, reflected, table_point):
        self.eye = eye
        self.point = point
        self.normal = normal
        self.incident = incident
        self.reflected = reflected
        self.table_point = table_point

    def chief_ray(self):
        return Ray(self.eye, self.incident, normalize=False)


class ImagePair:
    def __init__(self, h_point, v_point, point=None):
        self.h_point = h_point
        self.v_point = v_point
        self.point = point

    def __repr__(self):
        return "ImagePair(h=%s, v=%s)" % (list(self.h_point), list(self.v_point))

    def distances(self, eye):
        return norm(self.h_point - eye), norm(self.v_point - eye)


def _check_on_cylinder(scene, point):
    rho = math.hypot(point[0], point[1])
    if abs(rho - scene.radius) > SURFACE_TOLERANCE:
        raise ValueError(
            "point is not on the cylinder (radius %.12g, expected %.12g)"
            % (rho, scene.radius)
        )


def trace_sight_line(scene, point):
    point = vec3(point)
    _check_on_cylinder(scene, point)
    normal = cylinder_normal(point, scene.radius)
    incident = unit(point - scene.eye)
    facing = -float(np.dot(incident, normal))
    if facing <= UNIT_TOLERANCE:
        raise DegenerateChiefRay(
            "point is on or beyond the silhouette seen from the eye",
            cos_incidence=facing,
        )
    reflected = reflect(incident, normal)
    if point[2] <= POSITION_TOLERANCE:
        table_point = point.copy()
        table_point[2] = 0.0
    elif reflected[2] >= -UNIT_TOLERANCE:
        raise NoTableHit(
            "reflected ray does not descend to the table",
            z=float(point[2]),
            dz=float(reflected[2]),
        )
    else:
        table_point = intersect_plane(Ray(point, reflected, normalize=False))
    return SightLine(scene.eye, point, normal, incident, reflected, table_point)


def trace_to_table(scene, point):
    return trace_sight_line(scene, point).table_point


def _alignment(phi, eye_rho, tx, ty, radius):
    """Signed angle normal->eye plus signed angle normal->target; zero at reflection.

    Frame rotated so the eye sits on the +x axis at eye_rho.
    """
    c = np.cos(phi)
    s = np.sin(phi)
    to_eye = np.arctan2(-eye_rho * s, eye_rho * c - radius)
    to_target = np.arctan2(ty * c - tx * s, tx * c + ty * s - radius)
    return to_eye + to_target


def _reflection_bracket(eye_rho, t_rho, delta, radius):
    """Azimuth interval on which the arc is seen from both the eye and the target."""
    alpha_eye = np.arccos(radius / eye_rho)
    alpha_target = np.arccos(np.minimum(1.0, radius / t_rho))
    lo = np.maximum(-alpha_eye, delta - alpha_target)
    hi = np.minimum(alpha_eye, delta + alpha_target)
    return lo, hi


def _occluded(scene, tx, ty):
    """True where the eye -> table segment passes through the tube below its top."""
    ex, ey, ez = scene.eye
    dx = tx - ex
    dy = ty - ey
    a = dx * dx + dy * dy
    half_b = ex * dx + ey * dy
    c = ex * ex + ey * ey - scene.radius * scene.radius
    discriminant = half_b * half_b - a * c
    safe = np.maximum(discriminant, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (-half_b - np.sqrt(safe)) / a
    z_hit = ez * (1.0 - t1)
    return (
        (discriminant > DISCRIMINANT_TOLERANCE)
        & (t1 > 0)
        & (t1 < 1)
        & (z_hit <= scene.cylinder_height)
    )


def _height_on_cylinder(scene, px, py, tx, ty):
    s_eye = np.hypot(scene.eye[0] - px, scene.eye[1] - py)
    s_table = np.hypot(tx - px, ty - py)
    return scene.eye[2] * s_table / (s_eye + s_table)


def solve_reflection_point(scene, table_point):
    """Cylinder point P whose reflection carries the eye's gaze to table_point."""
    table_point = vec3(table_point)
    if abs(table_point[2]) > POSITION_TOLERANCE:
        raise ValueError("table point must have z = 0")
    tx, ty = float(table_point[0]), float(table_point[1])
    radius = scene.radius
    t_rho = math.hypot(tx, ty)
    if t_rho < radius - SURFACE_TOLERANCE:
        raise NoSolution("point is inside the cylinder footprint", rho=t_rho)
    if t_rho <= radius + SURFACE_TOLERANCE:
        return vec3(tx * radius / t_rho, ty * radius / t_rho, 0.0)
    if bool(_occluded(scene, np.array(tx), np.array(ty))):
        raise NoSolution("point is hidden behind the cylinder", x=tx, y=ty)
    theta_eye = scene.eye_azimuth
    eye_rho = scene.eye_horizontal_distance
    delta = wrap_angle(math.atan2(ty, tx) - theta_eye)
    lo, hi = _reflection_bracket(eye_rho, t_rho, delta, radius)
    lo, hi = float(lo), float(hi)
    if lo >= hi:
        raise NoSolution("no arc is visible from both eye and point", x=tx, y=ty)
    rx = t_rho * math.cos(delta)
    ry = t_rho * math.sin(delta)

    def g(phi):
        return float(_alignment(phi, eye_rho, rx, ry, radius))

    g_lo, g_hi = g(lo), g(hi)
    if g_lo * g_hi > 0:
        raise NoSolution("alignment has no sign change", lo=lo, hi=hi)
    logger.debug("alhazen bracket [%.9g, %.9g] for (%.6g, %.6g)", lo, hi, tx, ty)
    phi = brentq(g, lo, hi, xtol=AZIMUTH_TOLERANCE)
    azimuth = theta_eye + phi
    px = radius * math.cos(azimuth)
    py = radius * math.sin(azimuth)
    z = float(_height_on_cylinder(scene, px, py, tx, ty))
    if z > scene.cylinder_height:
        raise NoSolution("reflection point above the top of the tube", z=z)
    return vec3(px, py, z)


def solve_reflection_points(scene, tx, ty):
    """Vectorised solve_reflection_point.

    Returns (points (N, 3), valid mask). Bisection then safeguarded secant steps.
    """
    tx = np.asarray(tx, dtype=float).ravel()
    ty = np.asarray(ty, dtype=float).ravel()
    radius = scene.radius
    theta_eye = scene.eye_azimuth
    eye_rho = scene.eye_horizontal_distance
    t_rho = np.hypot(tx, ty)
    ct, st = math.cos(theta_eye), math.sin(theta_eye)
    rx = tx * ct + ty * st
    ry = -tx * st + ty * ct
    delta = np.arctan2(ry, rx)
    outside = t_rho > radius + SURFACE_TOLERANCE
    rim = (t_rho >= radius - SURFACE_TOLERANCE) & ~outside
    valid = outside & ~_occluded(scene, tx, ty)
    with np.errstate(invalid="ignore", divide="ignore"):
        lo, hi = _reflection_bracket(eye_rho, np.where(outside, t_rho, 2 * radius), delta, radius)
    valid &= lo < hi
    lo = np.where(valid, lo, 0.0)
    hi = np.where(valid, hi, 0.0)

    def g(phi):
        return _alignment(phi, eye_rho, rx, ry, radius)

    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        above = g(mid) > 0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    a, b = lo, hi
    ga, gb = g(a), g(b)
    for _ in range(SECANT_STEPS):
        denominator = gb - ga
        usable = denominator != 0
        step = np.where(usable, gb * (b - a) / np.where(usable, denominator, 1.0), 0.0)
        c = np.clip(b - step, lo, hi)
        a, ga = b, gb
        b = c
        gb = g(b)
    azimuth = theta_eye + b
    px = radius * np.cos(azimuth)
    py = radius * np.sin(azimuth)
    pz = _height_on_cylinder(scene, px, py, tx, ty)
    valid &= pz <= scene.cylinder_height
    points = np.stack([px, py, pz], axis=-1)
    if np.any(rim):
        scale = radius / np.where(rim, t_rho, 1.0)
        points[rim] = np.stack([tx[rim] * scale[rim], ty[rim] * scale[rim], np.zeros(int(rim.sum()))], axis=-1)
        valid |= rim
    points[~valid] = np.nan
    logger.debug("solved %d of %d reflection points", int(valid.sum()), valid.size)
    return points, valid


def trace_to_table_many(scene, points):
    """Vectorised trace_to_table. Returns (table points (N, 3), valid mask)."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    radius = scene.radius
    normals = np.zeros_like(points)
    normals[:, 0] = points[:, 0] / radius
    normals[:, 1] = points[:, 1] / radius
    incident = unit(points - scene.eye)
    facing = -np.sum(incident * normals, axis=-1)
    reflected = incident - 2.0 * np.sum(incident * normals, axis=-1, keepdims=True) * normals
    at_table = points[:, 2] <= POSITION_TOLERANCE
    descending = reflected[:, 2] < -UNIT_TOLERANCE
    valid = (facing > UNIT_TOLERANCE) & (descending | at_table)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(at_table, 0.0, -points[:, 2] / reflected[:, 2])
    table = points + t[:, None] * reflected
    table[:, 2] = 0.0
    table[~valid] = np.nan
    return table, valid


def image_pair(scene, point, source):
    """H (tangential) and V (sagittal) virtual images of source seen via P."""
    point = vec3(point)
    source = vec3(source)
    _check_on_cylinder(scene, point)
    normal = cylinder_normal(point, scene.radius)
    gaze = unit(point - scene.eye)
    cos_incidence = -float(np.dot(gaze, normal))
    if cos_incidence <= UNIT_TOLERANCE:
        raise DegenerateChiefRay("grazing incidence", cos_incidence=cos_incidence)
    to_source = source - point
    # flat vertically, so the sagittal fan sees a plane mirror
    v_point = source - 2.0 * float(np.dot(to_source, normal)) * normal
    v_point[2] = source[2]
    horizontal = math.hypot(gaze[0], gaze[1])
    cos_h = -(gaze[0] * normal[0] + gaze[1] * normal[1]) / horizontal
    s_h = math.hypot(to_source[0], to_source[1])
    focal = scene.radius * cos_h
    d_h = s_h * focal / (focal + 2.0 * s_h)
    h_point = point + (d_h / horizontal) * gaze
    return ImagePair(h_point, v_point, point)


def image_pairs_many(scene, points, sources):
    """Vectorised image_pair. Returns (h_points, v_points, valid mask)."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    sources = np.asarray(sources, dtype=float).reshape(-1, 3)
    radius = scene.radius
    normals = np.zeros_like(points)
    normals[:, 0] = points[:, 0] / radius
    normals[:, 1] = points[:, 1] / radius
    gaze = unit(points - scene.eye)
    cos_incidence = -np.sum(gaze * normals, axis=-1)
    valid = cos_incidence > UNIT_TOLERANCE
    to_source = sources - points
    v_points = sources - 2.0 * np.sum(to_source * normals, axis=-1, keepdims=True) * normals
    v_points[:, 2] = sources[:, 2]
    horizontal = np.hypot(gaze[:, 0], gaze[:, 1])
    cos_h = -(gaze[:, 0] * normals[:, 0] + gaze[:, 1] * normals[:, 1]) / horizontal
    s_h = np.hypot(to_source[:, 0], to_source[:, 1])
    focal = radius * cos_h
    with np.errstate(divide="ignore", invalid="ignore"):
        d_h = s_h * focal / (focal + 2.0 * s_h)
    h_points = points + (d_h / horizontal)[:, None] * gaze
    valid &= np.isfinite(h_points).all(axis=-1) & np.isfinite(v_points).all(axis=-1)
    return h_points, v_points, valid


class VirtualSurface:
    """H image locus sampled on an azimuth x height grid of cylinder points."""

    def __init__(self, azimuths, heights, points, table_points, h_points, v_points, mask):
        self.azimuths = azimuths
        self.heights = heights
        self.points = points
        self.table_points = table_points
        self.h_points = h_points
        self.v_points = v_points
        self.mask = mask

    @property
    def skipped(self):
        return int(self.mask.size - np.count_nonzero(self.mask))

    def column(self, azimuth_index):
        keep = self.mask[azimuth_index]
        return self.heights[keep], self.h_points[azimuth_index][keep]

    def section(self, height_index):
        keep = self.mask[:, height_index]
        return self.azimuths[keep], self.h_points[:, height_index][keep]


def virtual_surface(scene, azimuths, heights, settings=None):
    azimuths = np.asarray(azimuths, dtype=float)
    heights = np.asarray(heights, dtype=float)
    n_azimuth = len(azimuths)
    n_height = len(heights)

    def block(start, stop):
        phi, z = np.meshgrid(azimuths[start:stop], heights, indexing="ij")
        points = np.stack(
            [scene.radius * np.cos(phi), scene.radius * np.sin(phi), z], axis=-1
        ).reshape(-1, 3)
        table, traced = trace_to_table_many(scene, points)
        h_points, v_points, imaged = image_pairs_many(scene, points, table)
        return points, table, h_points, v_points, traced & imaged

    parts = evaluate_blocks(block, n_azimuth, settings)
    shape = (n_azimuth, n_height)
    if parts:
        points, table, h_points, v_points, mask = (
            np.concatenate([p[i] for p in parts]) for i in range(5)
        )
    else:
        points = table = h_points = v_points = np.zeros((0, 3))
        mask = np.zeros(0, dtype=bool)
    surface = VirtualSurface(
        azimuths,
        heights,
        points.reshape(shape + (3,)),
        table.reshape(shape + (3,)),
        h_points.reshape(shape + (3,)),
        v_points.reshape(shape + (3,)),
        mask.reshape(shape),
    )
    if surface.skipped:
        logger.debug("virtual surface skipped %d samples", surface.skipped)
    return surface


def cross_section_ratio(scene, surface, height_index):
    """Depth in front of the axis plane over half-width, in the eye's frame."""
    _, h_points = surface.section(height_index)
    if len(h_points) == 0:
        raise NoSolution("empty cross-section", height_index=height_index)
    theta = scene.eye_azimuth
    c, s = math.cos(theta), math.sin(theta)
    forward = h_points[:, 0] * c + h_points[:, 1] * s
    lateral = -h_points[:, 0] * s + h_points[:, 1] * c
    return float(np.max(forward) / np.max(np.abs(lateral)))


def front_generator(scene, height):
    """Cylinder point facing the eye at the given height."""
    return cylinder_point(scene.radius, scene.eye_azimuth, height)
