import logging
import math

import numpy as np
from scipy.optimize import bisect, brentq, minimize_scalar

from .OptConstant import *
from .OptErrors import (
    ApertureOcclusion,
    DegenerateParameter,
    NoDegeneracy,
    OpticsError,
)
from .CylinderScene import solve_reflection_point
from .OptGeometry import (
    Interface,
    Ray,
    Z_AXIS,
    intersect_cylinder,
    norm,
    reflect,
    refract,
    unit,
    vec3,
)

logger = logging.getLogger(__name__)


class RayFamily:
    """One or two parameter map from parameters to Ray.

    For two parameter families, h_axis(chief_ray) gives the transverse unit
    vector along which the H fan collapses at its focus.
    """

    def __init__(
        self, function, dim=1, domain=None, scale=1.0, h_axis=None, closed=False, name=None
    ):
        if dim not in (1, 2):
            raise ValueError("ray families have one or two parameters")
        if domain is None:
            domain = (0.0, 1.0) if dim == 1 else ((0.0, 1.0), (0.0, 1.0))
        self.function = function
        self.dim = dim
        self.domain = domain
        self.scale = float(scale)
        self.closed = closed
        self.name = name
        self._h_axis = h_axis

    def __call__(self, params):
        return self.function(params)

    def steps(self):
        if self.dim == 1:
            lo, hi = self.domain
            return FD_STEP * (hi - lo)
        return tuple(FD_STEP * (hi - lo) for lo, hi in self.domain)

    def h_axis(self, chief):
        if self._h_axis is not None:
            return unit(self._h_axis(chief))
        return horizontal_transverse(chief.direction)

    def sample_params(self, count):
        """Evenly spaced interior parameters (endpoints excluded)."""
        lo, hi = self.domain
        return np.linspace(lo, hi, count + 2)[1:-1]


def horizontal_transverse(direction):
    axis = np.cross(Z_AXIS, direction)
    if np.linalg.norm(axis) < UNIT_TOLERANCE:
        return np.array([0.0, 1.0, 0.0])
    return unit(axis)


class CausticSheet:
    """Sampled envelope of a planar ray family.

    cusps holds the index of the sample nearest each cusp; cusp_locations
    holds the refined (parameter, point) of each cusp.
    """

    def __init__(self, samples, label=None, cusps=None, degenerate=None, closed=False,
                 cusp_locations=None):
        self.samples = samples
        self.label = label
        self.cusps = cusps if cusps is not None else []
        self.cusp_locations = cusp_locations if cusp_locations is not None else []
        self.degenerate = degenerate if degenerate is not None else []
        self.closed = closed

    def __len__(self):
        return len(self.samples)

    def params(self):
        return np.array([s[0] for s in self.samples])

    def points(self):
        if not self.samples:
            return np.zeros((0, 3))
        return np.array([s[1] for s in self.samples])

    def cusp_points(self):
        return [point for _, point in self.cusp_locations]


def _cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


class _Envelope:
    """Envelope point and signed speed of a planar family at any parameter."""

    def __init__(self, family):
        self.family = family
        self.h = family.steps()
        lo, hi = family.domain
        self.period = hi - lo
        self.k = CUSP_SPEED_STEP * self.period

    def at(self, u):
        """(ray, point), or None where neighbouring rays stay parallel."""
        family = self.family
        h = self.h
        ray = family(u)
        plus = family(u + h)
        minus = family(u - h)
        if abs(ray.direction[2]) > UNIT_TOLERANCE:
            raise ValueError("envelope_2d needs rays in a z = const plane")
        d_origin = (plus.origin - minus.origin) / (2 * h)
        d_direction = (plus.direction - minus.direction) / (2 * h)
        denominator = _cross2(d_direction, ray.direction)
        if abs(denominator) <= 1e-9:
            return None
        s = -_cross2(d_origin, ray.direction) / denominator
        return ray, ray.at(s)

    def speed(self, u):
        """Rate of the envelope point along its own ray; changes sign at a cusp."""
        here = self.at(u)
        after = self.at(u + self.k)
        before = self.at(u - self.k)
        if here is None or after is None or before is None:
            return None
        return float(np.dot(after[1] - before[1], here[0].direction)) / (2 * self.k)

    def cusp(self, u0, u1, s0, s1):
        try:
            u = brentq(self._speed_or_fail, u0, u1, xtol=1e-12 * self.period)
        except (OpticsError, ValueError):
            u = u0 if abs(s0) < abs(s1) else u1
        found = self.at(u)
        if found is None:
            return None
        return u, found[1]

    def _speed_or_fail(self, u):
        s = self.speed(u)
        if s is None:
            raise OpticsError("speed undefined")
        return s


def _find_cusps(envelope, samples, closed):
    """Sign changes of the signed speed between neighbours whose rays agree in sense."""
    params = [u for u, _ in samples]
    speeds = []
    directions = []
    for u in params:
        try:
            s = envelope.speed(u)
            ray = envelope.family(u)
        except OpticsError:
            s, ray = None, None
        speeds.append(s)
        directions.append(None if ray is None else ray.direction)
    pairs = [(k, k + 1, 0.0) for k in range(len(params) - 1)]
    if closed and len(params) > 2:
        pairs.append((len(params) - 1, 0, envelope.period))
    indices = []
    locations = []
    for a, b, shift in pairs:
        s0, s1 = speeds[a], speeds[b]
        if s0 is None or s1 is None or not s0 * s1 < 0:
            continue
        if np.dot(directions[a], directions[b]) <= 0:
            continue
        found = envelope.cusp(params[a], params[b] + shift, s0, s1)
        if found is None:
            continue
        u, point = found
        index = a if abs(u - params[a]) <= abs(params[b] + shift - u) else b
        indices.append(index)
        locations.append((u, point))
    for k in range(1, len(params) - 1):
        if speeds[k] == 0 and speeds[k - 1] is not None and speeds[k + 1] is not None:
            if speeds[k - 1] * speeds[k + 1] < 0:
                indices.append(k)
                locations.append(samples[k])
    return indices, locations


def envelope_2d(family, params, label=None):
    """Envelope of a planar ray family by the neighbour-ray intersection limit."""
    if family.dim != 1:
        raise ValueError("envelope_2d needs a one parameter family")
    envelope = _Envelope(family)
    samples = []
    degenerate = []
    for u in params:
        u = float(u)
        try:
            found = envelope.at(u)
        except OpticsError as e:
            logger.debug("envelope sample %.9g failed: %s", u, e.diagnostic())
            degenerate.append(u)
            continue
        if found is None:
            degenerate.append(u)
            continue
        samples.append((u, found[1]))
    if degenerate:
        logger.debug("%d envelope samples flagged degenerate", len(degenerate))
    cusps, locations = _find_cusps(envelope, samples, family.closed)
    if cusps:
        logger.debug("%d cusps on the envelope", len(cusps))
    return CausticSheet(samples, label, cusps, degenerate, family.closed, locations)


def neighbor_intersections(family, params):
    """Brute-force caustic: intersection of each pair of consecutive rays."""
    rays = [family(float(u)) for u in params]
    points = []
    for k in range(len(rays) - 1):
        a, b = rays[k], rays[k + 1]
        denominator = _cross2(a.direction, b.direction)
        if denominator == 0:
            continue
        offset = b.origin - a.origin
        s = _cross2(offset, b.direction) / denominator
        points.append((0.5 * (params[k] + params[k + 1]), a.at(s)))
    return points


def circle_reflection_family(radius, source=None, direction=None):
    """Planar rays reflected once inside a mirror circle centred on the origin.

    Parametrised by the azimuth of the reflection point. Either a point
    source (inside, on, or far outside the circle) or a parallel beam.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if source is None:
        if direction is None:
            direction = (1.0, 0.0)
        beam = unit(vec3(direction[0], direction[1], 0.0))
        centre = math.atan2(beam[1], beam[0])
        domain = (centre - math.pi / 2, centre + math.pi / 2)
        closed = False

        def incoming(hit):
            return beam

    else:
        emitter = vec3(source[0], source[1], 0.0)
        rho = math.hypot(emitter[0], emitter[1])
        theta = math.atan2(emitter[1], emitter[0])
        if rho <= radius * (1 + 1e-9):
            domain = (theta, theta + 2 * math.pi)
            closed = True
        else:
            half = math.pi - math.acos(radius / rho)
            domain = (theta + math.pi - half, theta + math.pi + half)
            closed = False

        def incoming(hit):
            return unit(hit - emitter)

    def function(u):
        normal = np.array([math.cos(u), math.sin(u), 0.0])
        hit = radius * normal
        return Ray(hit, reflect(incoming(hit), normal), normalize=False)

    return RayFamily(function, 1, domain, radius, closed=closed, name="circle")


def drop_path(n, b):
    """(entry, bounce, exit point, outgoing direction) of a ray hitting a unit drop at impact b."""
    incoming = np.array([-1.0, 0.0, 0.0])
    entry = np.array([math.sqrt(1.0 - b * b), b, 0.0])
    inside = refract(incoming, entry, Interface(N_AIR, n))
    back = entry - 2.0 * float(np.dot(entry, inside)) * inside
    back = back / np.linalg.norm(back)
    bounced = reflect(inside, back)
    exit_point = back - 2.0 * float(np.dot(back, bounced)) * bounced
    exit_point = exit_point / np.linalg.norm(exit_point)
    outgoing = refract(bounced, -exit_point, Interface(n, N_AIR))
    return entry, back, exit_point, outgoing


def drop_ray_family(n=N_WATER):
    """Exit rays of sunlight (travelling -x) after one internal reflection in a unit drop."""
    if n <= 1:
        raise ValueError("drop index must exceed 1")

    def function(b):
        _, _, exit_point, outgoing = drop_path(n, b)
        return Ray(exit_point, outgoing, normalize=False)

    return RayFamily(function, 1, (0.0, 1.0), 1.0, name="drop")


def rainbow_deviation(n, b):
    """Deviation pi + 2i - 4r of a ray with one internal reflection."""
    if not 0 <= b < 1:
        raise ValueError("impact parameter must lie in [0, 1)")
    if n <= 1:
        raise ValueError("drop index must exceed 1")
    i = math.asin(b)
    r = math.asin(b / n)
    return math.pi + 2 * i - 4 * r


def rainbow_minimum(n=N_WATER):
    """(impact parameter, minimum deviation, rainbow angle) by golden-section search."""
    result = minimize_scalar(
        lambda b: rainbow_deviation(n, b),
        bracket=(0.0, 0.8, 0.9999),
        method="golden",
        tol=1e-10,
    )
    b = float(result.x)
    deviation = float(result.fun)
    return b, deviation, math.pi - deviation


def rainbow_histogram(n=N_WATER, samples=200000, bins=90, settings=None):
    """Histogram of exit angles (pi - deviation) for uniform impact parameters.

    Returns (counts, edges in radians, rainbow angle).
    """
    if settings is None:
        settings = {}
    upper = settings.get("max_angle", math.pi / 2)
    b = (np.arange(samples) + 0.5) / samples
    i = np.arcsin(b)
    r = np.arcsin(b / n)
    angles = -(2 * i - 4 * r)
    counts, edges = np.histogram(angles, bins=bins, range=(0.0, upper))
    return counts, edges, rainbow_minimum(n)[2]


def _transverse_jacobian(family, center):
    """Jacobian A + t B of parameters -> transverse offset at distance t along the chief ray."""
    chief = family(center)
    origin = chief.origin
    direction = chief.direction
    e_h = family.h_axis(chief)
    e_h = unit(e_h - np.dot(e_h, direction) * direction)
    e_other = np.cross(direction, e_h)
    a = np.zeros((2, 2))
    b = np.zeros((2, 2))
    steps = family.steps()
    for i in range(2):
        columns = []
        for sign in (1.0, -1.0):
            params = list(center)
            params[i] += sign * steps[i]
            ray = family(params)
            along = float(np.dot(ray.direction, direction))
            if along <= 0:
                raise NoDegeneracy("neighbour ray turns away from the chief ray")
            s0 = float(np.dot(origin - ray.origin, direction)) / along
            offset = ray.origin + s0 * ray.direction - origin
            slope = ray.direction / along - direction
            columns.append((offset, slope))
        d_offset = (columns[0][0] - columns[1][0]) / (2 * steps[i])
        d_slope = (columns[0][1] - columns[1][1]) / (2 * steps[i])
        a[:, i] = (np.dot(d_offset, e_h), np.dot(d_offset, e_other))
        b[:, i] = (np.dot(d_slope, e_h), np.dot(d_slope, e_other))
    return a, b


def _determinant(a, b, t):
    return (a[0, 0] + t * b[0, 0]) * (a[1, 1] + t * b[1, 1]) - (
        a[0, 1] + t * b[0, 1]
    ) * (a[1, 0] + t * b[1, 0])


def focal_points(family, center):
    """Signed distances along the chief ray where the ray map drops rank.

    Returns a sorted list of (t, labels) with labels a tuple drawn from H, V.
    """
    if family.dim != 2:
        raise ValueError("focal search needs a two parameter family")
    a, b = _transverse_jacobian(family, center)
    span = FOCAL_SCAN_SPAN * family.scale
    ts = np.linspace(-span, span, FOCAL_SCAN_SAMPLES + 1)
    dets = _determinant(a, b, ts)
    roots = []
    for k in range(len(ts) - 1):
        if dets[k] == 0:
            roots.append(float(ts[k]))
        elif dets[k] * dets[k + 1] < 0:
            roots.append(
                bisect(
                    lambda t: _determinant(a, b, t),
                    ts[k],
                    ts[k + 1],
                    xtol=FOCAL_BISECT_TOLERANCE,
                )
            )
    magnitude = np.linalg.norm(a) + span * np.linalg.norm(b)
    if len(roots) < 2:
        quadratic = np.linalg.det(b)
        linear = a[0, 0] * b[1, 1] + b[0, 0] * a[1, 1] - a[0, 1] * b[1, 0] - b[0, 1] * a[1, 0]
        if quadratic != 0:
            vertex = -linear / (2 * quadratic)
            if abs(vertex) <= span and abs(_determinant(a, b, vertex)) <= 1e-9 * float(
                np.max(np.abs(dets))
            ):
                if not any(abs(vertex - r) <= 1e-9 * span for r in roots):
                    roots.append(float(vertex))
    if not roots:
        raise NoDegeneracy("no focal point within the scan range", span=span)
    roots.sort()
    labelled = []
    horizontalness = []
    for t in roots:
        u, singular, _ = np.linalg.svd(a + t * b)
        if singular[0] <= 1e-6 * magnitude:
            labelled.append((t, (LABEL_H, LABEL_V)))
            horizontalness.append(None)
        else:
            labelled.append((t, None))
            horizontalness.append(abs(u[0, 1]))
    open_roots = [k for k, lab in enumerate(labelled) if lab[1] is None]
    if len(open_roots) >= 2:
        best = max(open_roots, key=lambda k: horizontalness[k])
        for k in open_roots:
            labelled[k] = (labelled[k][0], (LABEL_H,) if k == best else (LABEL_V,))
    elif len(open_roots) == 1:
        k = open_roots[0]
        label = LABEL_H if horizontalness[k] >= math.sqrt(0.5) else LABEL_V
        labelled[k] = (labelled[k][0], (label,))
    return labelled


def focal_points_on_chief_ray(family, center):
    """(t_H, t_V) along the chief ray; negative for virtual images."""
    found = {}
    for t, labels in focal_points(family, center):
        for label in labels:
            if label not in found or abs(t) < abs(found[label]):
                found[label] = t
    if LABEL_H not in found or LABEL_V not in found:
        raise NoDegeneracy(
            "only one focal fan found",
            found=",".join(sorted(found)),
        )
    return found[LABEL_H], found[LABEL_V]


def launch_direction(azimuth, elevation):
    ce = math.cos(elevation)
    return np.array([ce * math.cos(azimuth), ce * math.sin(azimuth), math.sin(elevation)])


def cylinder_ray_family(scene, source, point, spread=0.5):
    """Rays from source reflected by the tube, parametrised by launch (azimuth, elevation).

    The centre parameters return the chief ray from point towards the eye.
    """
    source = vec3(source)
    towards = unit(vec3(point) - source)
    azimuth = math.atan2(towards[1], towards[0])
    elevation = math.asin(max(-1.0, min(1.0, towards[2])))

    def function(params):
        direction = launch_direction(params[0], params[1])
        hit, normal = intersect_cylinder(Ray(source, direction, normalize=False), scene.radius)
        return Ray(hit, reflect(direction, normal), normalize=False)

    family = RayFamily(
        function,
        2,
        ((azimuth - spread, azimuth + spread), (elevation - spread, elevation + spread)),
        norm(scene.eye - vec3(point)),
        name="cylinder",
    )
    family.center = (azimuth, elevation)
    return family


class BlurSpot:
    def __init__(self, points, axes, focus_distance, aperture_diameter):
        self.points = points
        self.focus_distance = focus_distance
        self.aperture_diameter = aperture_diameter
        if len(points) > 1:
            covariance = np.cov(points.T, bias=True)
        else:
            covariance = np.zeros((2, 2))
        values, vectors = np.linalg.eigh(covariance)
        values = np.maximum(values, 0.0)
        self.sigma_minor = float(math.sqrt(values[0]))
        self.sigma_major = float(math.sqrt(values[1]))
        major = vectors[:, 1]
        self.orientation = "vertical" if abs(major[1]) > abs(major[0]) else "horizontal"
        self.sigma_horizontal = float(math.sqrt(max(covariance[0, 0], 0.0)))
        self.sigma_vertical = float(math.sqrt(max(covariance[1, 1], 0.0)))
        self.axes = axes

    @property
    def aspect(self):
        """Vertical over horizontal spread."""
        if self.sigma_horizontal == 0:
            return float("inf")
        return self.sigma_vertical / self.sigma_horizontal


def blur_spot(scene, aperture_diameter, focus_distance, source, point, settings=None):
    """Spot of a table source seen via P through a thin lens focused at focus_distance."""
    if settings is None:
        settings = {}
    if focus_distance <= 0:
        raise ValueError("focus distance must be positive")
    grid = int(settings.get("aperture_grid", DEFAULT_APERTURE_GRID))
    focal_length = float(settings.get("eye_focal_length", DEFAULT_EYE_FOCAL_LENGTH))
    if focus_distance <= focal_length:
        raise ValueError("focus distance must exceed the lens focal length")
    eye = scene.eye
    gaze = unit(vec3(point) - eye)
    e_h = horizontal_transverse(gaze)
    e_v = np.cross(gaze, e_h)
    radius = 0.5 * aperture_diameter
    offsets = np.linspace(-radius, radius, grid) if grid > 1 else np.zeros(1)
    image_distance = focal_length * focus_distance / (focus_distance - focal_length)
    magnification = image_distance / focus_distance
    cloud = []
    failed = 0
    total = 0
    for y in offsets:
        for x in offsets:
            if x * x + y * y > radius * radius * (1 + 1e-12):
                continue
            total += 1
            pupil = eye + x * e_h + y * e_v
            try:
                hit = solve_reflection_point(scene.with_eye(pupil), source)
            except OpticsError:
                failed += 1
                continue
            backwards = unit(hit - pupil)
            along = float(np.dot(backwards, gaze))
            landing = pupil + (focus_distance / along) * backwards - eye
            cloud.append(
                (magnification * np.dot(landing, e_h), magnification * np.dot(landing, e_v))
            )
    if failed:
        raise ApertureOcclusion(
            "part of the aperture has no reflection path",
            fraction=failed / float(total),
        )
    logger.debug("blur spot traced %d aperture rays", total)
    return BlurSpot(np.array(cloud), (e_h, e_v), focus_distance, aperture_diameter)


def least_confusion_focus(d_h, d_v):
    """Focus distance at which the H and V blurs are equally wide."""
    return 2.0 * d_h * d_v / (d_h + d_v)
