import logging
import math

import numpy as np
from scipy.optimize import bisect

from .OptConstant import *
from .OptErrors import NoChiefRay, NoDegeneracy, OpticsError, OutsideSnellsWindow
from .Caustics import RayFamily, focal_points_on_chief_ray
from .OptGeometry import (
    Interface,
    Ray,
    Z_AXIS,
    angle_between,
    intersect_plane,
    norm,
    refract,
    snells_window_angle,
    unit,
    vec3,
)

logger = logging.getLogger(__name__)

UPWARD_SURFACE_NORMAL = np.array([0.0, 0.0, -1.0])
DOWNWARD_SURFACE_NORMAL = np.array([0.0, 0.0, 1.0])


class WaterScene:
    """Flat water surface at z = 0, eye above (z > 0) or below (z < 0)."""

    def __init__(self, eye, depth=None, n_water=N_WATER):
        eye = vec3(eye)
        if eye[2] == 0:
            raise ValueError("eye must not sit on the water surface")
        if depth is not None and depth <= 0:
            raise ValueError("floor depth must be positive")
        if n_water < 1:
            raise ValueError("index of water must be >= 1")
        eye.flags.writeable = False
        self.eye = eye
        self.depth = depth
        self.n_water = float(n_water)

    def __repr__(self):
        return "WaterScene(eye=%s, depth=%r, n_water=%r)" % (
            list(self.eye),
            self.depth,
            self.n_water,
        )

    def to_dict(self):
        return {
            "eye_x": float(self.eye[0]),
            "eye_y": float(self.eye[1]),
            "eye_z": float(self.eye[2]),
            "depth": self.depth,
            "n_water": self.n_water,
        }

    def water_to_air(self):
        return Interface(self.n_water, N_AIR)

    def air_to_water(self):
        return Interface(N_AIR, self.n_water)


class RefractedImagePair:
    def __init__(self, h_point, v_point, crossing, chief):
        self.h_point = h_point
        self.v_point = v_point
        self.crossing = crossing
        self.chief = chief

    def __repr__(self):
        return "RefractedImagePair(h=%s, v=%s)" % (list(self.h_point), list(self.v_point))


def surface_crossing(ws, source):
    """Point on z = 0 where the refracted chief ray from source to eye crosses.

    Bisection on the horizontal coordinate between source and eye.
    """
    source = vec3(source)
    eye = ws.eye
    below, above = (source, eye) if source[2] < 0 else (eye, source)
    if below[2] >= 0 or above[2] <= 0:
        raise NoChiefRay("source and eye must be on opposite sides of the surface")
    dx = above[0] - below[0]
    dy = above[1] - below[1]
    rho = math.hypot(dx, dy)
    if rho <= POSITION_TOLERANCE:
        return vec3(below[0], below[1], 0.0)
    h_water = -below[2]
    h_air = above[2]
    n = ws.n_water

    def snell(x):
        return n * x / math.hypot(x, h_water) - (rho - x) / math.hypot(rho - x, h_air)

    x = bisect(snell, 0.0, rho, xtol=POSITION_TOLERANCE)
    return vec3(below[0] + dx * x / rho, below[1] + dy * x / rho, 0.0)


def _in_plane_axes(direction):
    """(in-plane, out-of-plane) unit vectors transverse to a ray, plane of incidence vertical."""
    out_of_plane = np.cross(direction, Z_AXIS)
    if np.linalg.norm(out_of_plane) < UNIT_TOLERANCE:
        out_of_plane = np.array([0.0, 1.0, 0.0])
    out_of_plane = unit(out_of_plane)
    in_plane = np.cross(out_of_plane, direction)
    return unit(in_plane), out_of_plane


def refracted_ray_family(ws, source, crossing, spread=0.2):
    """Rays leaving a submerged source and refracted into air.

    Parameter 0 tilts within the plane of incidence, parameter 1 out of it.
    """
    source = vec3(source)
    chief_under = unit(crossing - source)
    in_plane, out_of_plane = _in_plane_axes(chief_under)
    iface = ws.water_to_air()

    def function(params):
        direction = unit(
            chief_under
            + math.tan(params[0]) * in_plane
            + math.tan(params[1]) * out_of_plane
        )
        hit = intersect_plane(Ray(source, direction, normalize=False))
        return Ray(hit, refract(direction, UPWARD_SURFACE_NORMAL, iface), normalize=False)

    def h_axis(chief):
        return _in_plane_axes(chief.direction)[0]

    family = RayFamily(
        function,
        2,
        ((-spread, spread), (-spread, spread)),
        norm(ws.eye - crossing),
        h_axis=h_axis,
        name="water",
    )
    family.center = (0.0, 0.0)
    return family


def apparent_point(ws, source):
    """Tangential (H) and sagittal (V) images of a submerged source seen from air."""
    source = vec3(source)
    if source[2] >= 0 or ws.eye[2] <= 0:
        raise NoChiefRay("need a submerged source and an eye in air", source_z=float(source[2]))
    crossing = surface_crossing(ws, source)
    family = refracted_ray_family(ws, source, crossing)
    chief = family(family.center)
    t_h, t_v = focal_points_on_chief_ray(family, family.center)
    return RefractedImagePair(chief.at(t_h), chief.at(t_v), crossing, chief)


def apparent_point_closed_form(ws, source):
    """Oblique-refraction closed forms for the same pair, used as a cross-check."""
    source = vec3(source)
    crossing = surface_crossing(ws, source)
    under = unit(crossing - source)
    cos_w = float(under[2])
    sin_w = math.sqrt(max(0.0, 1.0 - cos_w * cos_w))
    sin_a = min(1.0, ws.n_water * sin_w)
    cos_a = math.sqrt(1.0 - sin_a * sin_a)
    length = -source[2] / cos_w
    sagittal = length / ws.n_water
    tangential = length * cos_a * cos_a / (ws.n_water * cos_w * cos_w)
    back = unit(crossing - ws.eye)
    return crossing + tangential * back, crossing + sagittal * back


class PoolSample:
    def __init__(self, gaze, floor_point, h_point, v_point):
        self.gaze = gaze
        self.floor_point = floor_point
        self.h_point = h_point
        self.v_point = v_point

    @property
    def distance(self):
        return math.hypot(self.floor_point[0], self.floor_point[1])

    def image(self, which=LABEL_H):
        return self.h_point if which == LABEL_H else self.v_point


def _pool_frame(ws):
    if ws.eye[2] <= 0:
        raise ValueError("pool observer must be above the water")
    if ws.depth is None:
        raise ValueError("pool scene needs a floor depth")


def pool_floor_point(ws, gaze):
    """Floor point seen along a gaze angle below the horizontal, looking along +x."""
    _pool_frame(ws)
    direction = vec3(math.cos(gaze), 0.0, -math.sin(gaze))
    crossing = intersect_plane(Ray(ws.eye, direction, normalize=False))
    under = refract(direction, DOWNWARD_SURFACE_NORMAL, ws.air_to_water())
    return intersect_plane(Ray(crossing, under, normalize=False), -ws.depth)


def pool_floor_profile(ws, gazes):
    """Floor points along each gaze with both of their images, H and V."""
    _pool_frame(ws)
    profile = []
    for gaze in gazes:
        floor_point = pool_floor_point(ws, gaze)
        pair = apparent_point(ws, floor_point)
        profile.append(PoolSample(gaze, floor_point, pair.h_point, pair.v_point))
    return profile


def floor_slopes(profile, which=LABEL_H, against="apparent"):
    """Apparent upward slope (radians) between neighbouring samples.

    against="apparent" measures rise over apparent horizontal run; "true"
    measures rise over the run of the real floor points.
    """
    slopes = []
    for first, second in zip(profile, profile[1:]):
        p0 = first.image(which)
        p1 = second.image(which)
        rise = p1[2] - p0[2]
        if against == "true":
            run = second.distance - first.distance
        else:
            run = math.hypot(p1[0], p1[1]) - math.hypot(p0[0], p0[1])
        slopes.append(
            (0.5 * (first.distance + second.distance), math.atan2(rise, run))
        )
    return slopes


def slope_at_gaze(ws, gaze, which=LABEL_H, against="apparent", delta=1e-4):
    """Local apparent floor slope at one gaze angle, by a symmetric pair of gazes."""
    profile = pool_floor_profile(ws, (gaze + delta, gaze - delta))
    return floor_slopes(profile, which, against)[0][1]


class RulerShape:
    def __init__(self, depths, h_points, v_points, dropped):
        self.depths = depths
        self.h_points = h_points
        self.v_points = v_points
        self.dropped = dropped

    def separations(self):
        return np.linalg.norm(self.h_points - self.v_points, axis=-1)


def line_deviation(points):
    """Distance of each point from the line through the first two."""
    points = np.asarray(points, dtype=float)
    if len(points) < 3:
        return np.zeros(len(points))
    axis = unit(points[1] - points[0])
    offsets = points - points[0]
    along = offsets @ axis
    return np.linalg.norm(offsets - along[:, None] * axis, axis=-1)


def ruler_apparent_shape(ws, base, length, samples=20):
    """H and V images of a vertical ruler from the surface at base (x, y) down to -length."""
    if length <= 0:
        raise ValueError("ruler length must be positive")
    depths = np.linspace(0.0, length, samples + 1)[1:]
    kept = []
    h_points = []
    v_points = []
    dropped = 0
    for depth in depths:
        source = vec3(base[0], base[1], -depth)
        try:
            pair = apparent_point(ws, source)
        except OpticsError as e:
            logger.debug("ruler sample at %.6g dropped: %s", depth, e.diagnostic())
            dropped += 1
            continue
        kept.append(depth)
        h_points.append(pair.h_point)
        v_points.append(pair.v_point)
    if dropped:
        logger.debug("ruler dropped %d samples", dropped)
    return RulerShape(np.array(kept), np.array(h_points), np.array(v_points), dropped)


class ArcherAim:
    def __init__(self, apparent_direction, true_direction, correction):
        self.apparent_direction = apparent_direction
        self.true_direction = true_direction
        self.correction = correction

    def to_dict(self):
        return {
            "apparent_direction": [float(v) for v in self.apparent_direction],
            "true_direction": [float(v) for v in self.true_direction],
            "correction_deg": math.degrees(self.correction),
        }


def _check_fish(ws):
    if ws.eye[2] >= 0:
        raise ValueError("the archer's eye must be under water")


def archer_aim(ws, target):
    """Underwater sight line to an airborne target versus the straight line to it."""
    _check_fish(ws)
    target = vec3(target)
    if target[2] <= 0:
        raise ValueError("target must be above the water")
    true_direction = unit(target - ws.eye)
    crossing = surface_crossing(ws, target)
    apparent = unit(crossing - ws.eye)
    window = snells_window_angle(ws.n_water)
    underwater = angle_between(apparent, Z_AXIS)
    if underwater >= window:
        raise OutsideSnellsWindow(
            "sight line lies outside Snell's window",
            angle_deg=math.degrees(underwater),
        )
    return ArcherAim(apparent, true_direction, angle_between(apparent, true_direction))


def archer_sight(ws, apparent_direction, target_height=None):
    """True air-side direction behind an apparent underwater sight line.

    With a target height the true direction points from the eye to where the
    refracted ray reaches that height; otherwise it is the refracted ray's
    own direction.
    """
    _check_fish(ws)
    apparent = unit(vec3(apparent_direction))
    underwater = angle_between(apparent, Z_AXIS)
    window = snells_window_angle(ws.n_water)
    if apparent[2] <= 0 or underwater >= window:
        raise OutsideSnellsWindow(
            "sight line lies outside Snell's window",
            angle_deg=math.degrees(underwater),
        )
    crossing = intersect_plane(Ray(ws.eye, apparent, normalize=False))
    air = refract(apparent, UPWARD_SURFACE_NORMAL, ws.water_to_air())
    if target_height is None:
        true_direction = air
    else:
        target = intersect_plane(Ray(crossing, air, normalize=False), target_height)
        true_direction = unit(target - ws.eye)
    return ArcherAim(apparent, true_direction, angle_between(apparent, true_direction))
