import logging
import math

import numpy as np
from scipy.optimize import bisect

from .OptConstant import *
from .OptErrors import NoHit, TotalInternalReflection

logger = logging.getLogger(__name__)

Z_AXIS = np.array([0.0, 0.0, 1.0])


def vec3(x, y=None, z=None):
    """Vec3 is a float numpy array of shape (3,)."""
    if y is None:
        v = np.array(x, dtype=float)
        if v.shape != (3,):
            raise ValueError("expected three components, got shape %s" % (v.shape,))
        return v
    return np.array([x, y, z], dtype=float)


def norm(v):
    return float(np.linalg.norm(v))


def unit(v):
    v = np.asarray(v, dtype=float)
    length = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(length == 0):
        raise ValueError("cannot normalise a zero vector")
    return v / length


def is_unit(v, tolerance=UNIT_TOLERANCE):
    length = np.linalg.norm(np.asarray(v, dtype=float), axis=-1)
    return bool(np.all(np.abs(length - 1.0) <= tolerance))


def _check_unit(name, v):
    if not is_unit(v):
        raise ValueError("%s must be unit length" % name)


def angle_between(a, b):
    """Unsigned angle between two vectors, stable near 0 and pi."""
    return math.atan2(norm(np.cross(a, b)), float(np.dot(a, b)))


class Ray:
    def __init__(self, origin, direction, normalize=True):
        self.origin = vec3(origin)
        direction = vec3(direction)
        if normalize:
            direction = unit(direction)
        else:
            _check_unit("ray direction", direction)
        self.direction = direction

    def __repr__(self):
        return "Ray(%s, %s)" % (list(self.origin), list(self.direction))

    def at(self, t):
        return self.origin + t * self.direction

    def reversed(self):
        return Ray(self.origin, -self.direction, normalize=False)

    def distance_to_line(self, point):
        """Perpendicular distance of point from the infinite line of the ray."""
        offset = vec3(point) - self.origin
        return norm(offset - np.dot(offset, self.direction) * self.direction)


class Interface:
    def __init__(self, n_incident=N_AIR, n_transmitted=N_WATER):
        if n_incident < 1 or n_transmitted < 1:
            raise ValueError(
                "refractive indices must be >= 1 (got %r, %r)"
                % (n_incident, n_transmitted)
            )
        self.n_incident = float(n_incident)
        self.n_transmitted = float(n_transmitted)

    def __repr__(self):
        return "Interface(%r, %r)" % (self.n_incident, self.n_transmitted)

    def __eq__(self, other):
        if not isinstance(other, Interface):
            return False
        return (
            self.n_incident == other.n_incident
            and self.n_transmitted == other.n_transmitted
        )

    @property
    def ratio(self):
        return self.n_incident / self.n_transmitted

    def reversed(self):
        return Interface(self.n_transmitted, self.n_incident)


def reflect(d, n):
    """Mirror d in the plane with normal n. Broadcasts over (N, 3) arrays."""
    d = np.asarray(d, dtype=float)
    n = np.asarray(n, dtype=float)
    _check_unit("d", d)
    _check_unit("n", n)
    return d - 2.0 * np.sum(d * n, axis=-1, keepdims=True) * n


def refract(d, n, iface):
    """Snell refraction of d through a surface whose normal n faces the incoming ray."""
    d = vec3(d)
    n = vec3(n)
    _check_unit("d", d)
    _check_unit("n", n)
    cos_i = -float(np.dot(d, n))
    if cos_i <= 0:
        raise ValueError("ray must travel into the surface (d.n < 0)")
    eta = iface.ratio
    sin2_t = eta * eta * max(0.0, 1.0 - cos_i * cos_i)
    if sin2_t > 1.0:
        incidence = math.acos(min(1.0, cos_i))
        raise TotalInternalReflection(
            "no transmitted ray beyond the critical angle",
            angle_deg=math.degrees(incidence),
            critical_deg=math.degrees(math.asin(1.0 / eta)),
        )
    cos_t = math.sqrt(1.0 - sin2_t)
    t = eta * d + (eta * cos_i - cos_t) * n
    return t / np.linalg.norm(t)


def is_total_internal_reflection(theta, iface):
    return iface.ratio * math.sin(theta) > 1.0


def critical_angle_by_bisection(iface, xtol=1e-14):
    """Incidence angle where the TIR predicate switches, found by bisection."""
    if iface.n_incident <= iface.n_transmitted:
        raise ValueError("no critical angle unless n_incident > n_transmitted")

    def predicate(theta):
        return 1.0 if is_total_internal_reflection(theta, iface) else -1.0

    return bisect(predicate, 0.0, math.pi / 2, xtol=xtol)


def snells_window_angle(n=N_WATER):
    """Half-angle of the cone through which an underwater eye sees the sky."""
    return math.asin(1.0 / n)


def intersect_plane(ray, height=0.0):
    dz = ray.direction[2]
    if abs(dz) < UNIT_TOLERANCE:
        raise NoHit("ray parallel to the plane", z=height)
    t = (height - ray.origin[2]) / dz
    if t <= 0:
        raise NoHit("plane is behind the ray", z=height, t=t)
    point = ray.at(t)
    point[2] = height
    return point


def intersect_cylinder(ray, radius):
    """Nearest forward hit on the infinite cylinder x^2 + y^2 = radius^2.

    Returns (point, outward normal). Grazing hits count as misses.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    ox, oy = ray.origin[0], ray.origin[1]
    dx, dy = ray.direction[0], ray.direction[1]
    a = dx * dx + dy * dy
    if a < UNIT_TOLERANCE:
        raise NoHit("ray parallel to the cylinder axis")
    half_b = ox * dx + oy * dy
    c = ox * ox + oy * oy - radius * radius
    discriminant = half_b * half_b - a * c
    if discriminant <= DISCRIMINANT_TOLERANCE:
        raise NoHit("ray misses the cylinder", discriminant=discriminant)
    root = math.sqrt(discriminant)
    for t in ((-half_b - root) / a, (-half_b + root) / a):
        if t > SURFACE_TOLERANCE:
            break
    else:
        raise NoHit("cylinder is behind the ray")
    point = ray.at(t)
    rho = math.hypot(point[0], point[1])
    point[0] *= radius / rho
    point[1] *= radius / rho
    normal = np.array([point[0] / radius, point[1] / radius, 0.0])
    return point, normal


def cylinder_normal(point, radius):
    return np.array([point[0] / radius, point[1] / radius, 0.0])


def cylinder_point(radius, azimuth, height):
    return np.array([radius * math.cos(azimuth), radius * math.sin(azimuth), height])
