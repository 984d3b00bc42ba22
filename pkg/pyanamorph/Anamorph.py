import logging
import math

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .OptConstant import *
from .OptErrors import OpticsError, RegionOverflow
from .CylinderScene import (
    image_pairs_many,
    solve_reflection_points,
    trace_to_table_many,
    virtual_surface,
)

logger = logging.getLogger(__name__)

ARC_TABLE_AZIMUTHS = 241
ARC_TABLE_HEIGHTS = 481
BOUNDARY_SAMPLES = 33


class AnamorphKind:
    ERECT = "erect"
    THREE_D = "3d"
    FLAT = "flat"

    ALL = (ERECT, THREE_D, FLAT)

    @staticmethod
    def parse(text):
        value = str(text).strip().lower()
        if value in ("3d", "threed", "three_d"):
            return AnamorphKind.THREE_D
        if value in (AnamorphKind.ERECT, AnamorphKind.FLAT):
            return value
        raise ValueError("anamorph kind must be erect, 3d or flat: %r" % text)


class AnamorphMap:
    """Correspondence between source coordinates (a, h) and table points.

    a is the horizontal source coordinate in meters, centred, positive to the
    viewer's right; h is the height above the bottom edge of the source.
    """

    def __init__(self, kind, scene, width, height, base_height=DEFAULT_BASE_HEIGHT):
        if kind not in AnamorphKind.ALL:
            raise ValueError("unknown anamorph kind %r" % (kind,))
        if width <= 0 or height <= 0:
            raise ValueError("image size must be positive")
        if base_height < 0:
            raise ValueError("base height must not be negative")
        self.kind = kind
        self.scene = scene
        self.width = float(width)
        self.height = float(height)
        self.base_height = float(base_height)
        self._arc_of = None
        self._height_of = None
        self._arc_limit = None
        self._arc_base = 0.0

    def to_dict(self):
        return {
            "kind": self.kind,
            "image_width": self.width,
            "image_height": self.height,
            "base_height": self.base_height,
        }

    def in_domain(self, a, h):
        return (np.abs(a) <= 0.5 * self.width) & (h >= 0) & (h <= self.height)

    def _eye_frame(self):
        theta = self.scene.eye_azimuth
        return math.cos(theta), math.sin(theta)

    def _build_arc_tables(self):
        scene = self.scene
        radius = scene.radius
        theta = scene.eye_azimuth
        visible = math.acos(radius / scene.eye_horizontal_distance)
        half = min(0.5 * self.width / radius * 1.05, visible * 0.999)
        azimuths = np.linspace(theta - half, theta + half, ARC_TABLE_AZIMUTHS)
        top = min(scene.cylinder_height, 0.999 * scene.eye[2])
        heights = np.linspace(0.0, top, ARC_TABLE_HEIGHTS)
        surface = virtual_surface(scene, azimuths, heights)
        if not surface.mask.all():
            raise RegionOverflow(
                "virtual surface not fully visible over the image width",
                skipped=surface.skipped,
            )
        steps = np.linalg.norm(np.diff(surface.h_points, axis=1), axis=-1)
        arcs = np.concatenate([np.zeros((len(azimuths), 1)), np.cumsum(steps, axis=1)], axis=1)
        relative = azimuths - theta
        self._arc_of = RegularGridInterpolator(
            (relative, heights), arcs, bounds_error=False, fill_value=np.nan
        )
        arc_grid = np.linspace(0.0, float(arcs[:, -1].max()), ARC_TABLE_HEIGHTS)
        height_table = np.empty((len(azimuths), len(arc_grid)))
        for i in range(len(azimuths)):
            column = np.interp(arc_grid, arcs[i], heights, right=np.nan)
            height_table[i] = column
        self._height_of = RegularGridInterpolator(
            (relative, arc_grid), height_table, bounds_error=False, fill_value=np.nan
        )
        self._arc_limit = (relative, arcs[:, -1])
        self._arc_base = float(self._arc_of([[0.0, self.base_height]])[0])

    def _cylinder_coordinates(self, a, h):
        """Azimuth offset from the eye and height on the tube for erect and 3D maps."""
        offset = a / self.scene.radius
        if self.kind == AnamorphKind.ERECT:
            return offset, self.base_height + h
        arc = self._arc_base + h
        limit = np.interp(offset, self._arc_limit[0], self._arc_limit[1])
        z = self._height_of(np.stack([offset, np.minimum(arc, limit)], axis=-1))
        z = np.where(arc <= limit, z, np.nan)
        return offset, z

    def forward_many(self, a, h):
        """Table points (N, 3) and validity for source coordinates."""
        a = np.asarray(a, dtype=float).ravel()
        h = np.asarray(h, dtype=float).ravel()
        scene = self.scene
        if self.kind == AnamorphKind.FLAT:
            points, hit = _eye_rays_on_cylinder(scene, self.flat_source(a, h))
        else:
            offset, z = self._cylinder_coordinates(a, h)
            azimuth = scene.eye_azimuth + offset
            points = np.stack(
                [scene.radius * np.cos(azimuth), scene.radius * np.sin(azimuth), z], axis=-1
            )
            hit = np.isfinite(z) & (z <= scene.cylinder_height)
        table, traced = trace_to_table_many(scene, np.where(hit[:, None], points, 0.0))
        valid = hit & traced
        table[~valid] = np.nan
        return table, valid

    def forward(self, a, h):
        table, valid = self.forward_many([a], [h])
        if not valid[0]:
            raise RegionOverflow("source point has no anamorph image", a=a, h=h)
        return table[0]

    def flat_source(self, a, h):
        """Table positions of the flat source, standing behind the front of the tube."""
        c, s = self._eye_frame()
        forward = self.scene.radius - self.base_height - h
        return np.stack([forward * c - a * s, forward * s + a * c, np.zeros_like(a)], axis=-1)

    def inverse_many(self, tx, ty):
        """Source coordinates (a, h) and validity for table points."""
        tx = np.asarray(tx, dtype=float).ravel()
        ty = np.asarray(ty, dtype=float).ravel()
        scene = self.scene
        points, solved = solve_reflection_points(scene, tx, ty)
        if self.kind == AnamorphKind.FLAT:
            table = np.stack([tx, ty, np.zeros_like(tx)], axis=-1)
            c, s = self._eye_frame()
            front = np.array([scene.radius * c, scene.radius * s, 0.0])
            _, v_points, imaged = image_pairs_many(
                scene, np.where(solved[:, None], points, front), table
            )
            forward = v_points[:, 0] * c + v_points[:, 1] * s
            a = -v_points[:, 0] * s + v_points[:, 1] * c
            h = scene.radius - self.base_height - forward
            valid = solved & imaged
        else:
            offset = np.arctan2(points[:, 1], points[:, 0]) - scene.eye_azimuth
            offset = np.mod(offset + math.pi, 2 * math.pi) - math.pi
            a = offset * scene.radius
            if self.kind == AnamorphKind.ERECT:
                h = points[:, 2] - self.base_height
            else:
                arc = self._arc_of(np.stack([offset, points[:, 2]], axis=-1))
                h = arc - self._arc_base
            valid = solved & np.isfinite(h)
        a = np.where(valid, a, np.nan)
        h = np.where(valid, h, np.nan)
        valid &= self.in_domain(np.nan_to_num(a, nan=np.inf), np.nan_to_num(h, nan=-1.0))
        return a, h, valid, solved

    def boundary(self, samples=BOUNDARY_SAMPLES):
        """Source coordinates around the edge of the image rectangle."""
        half = 0.5 * self.width
        xs = np.linspace(-half, half, samples)
        ys = np.linspace(0.0, self.height, samples)
        a = np.concatenate([xs, np.full(samples, half), xs[::-1], np.full(samples, -half)])
        h = np.concatenate([np.zeros(samples), ys, np.full(samples, self.height), ys[::-1]])
        return a, h

    def table_extent(self):
        """(x_min, y_min, x_max, y_max) of the anamorph on the table."""
        a, h = self.boundary()
        table, valid = self.forward_many(a, h)
        if not valid.all():
            failed_a = a[~valid]
            failed_h = h[~valid]
            raise RegionOverflow(
                "image does not fit the reachable table fan",
                clipped=int((~valid).sum()),
                a_min=float(failed_a.min()),
                a_max=float(failed_a.max()),
                h_min=float(failed_h.min()),
                h_max=float(failed_h.max()),
            )
        return (
            float(table[:, 0].min()),
            float(table[:, 1].min()),
            float(table[:, 0].max()),
            float(table[:, 1].max()),
        )


def _eye_rays_on_cylinder(scene, targets):
    """First tube hit of each eye -> target line, vectorised. Returns (points, valid)."""
    eye = scene.eye
    d = targets - eye
    a = d[:, 0] ** 2 + d[:, 1] ** 2
    half_b = eye[0] * d[:, 0] + eye[1] * d[:, 1]
    c = eye[0] ** 2 + eye[1] ** 2 - scene.radius ** 2
    discriminant = half_b * half_b - a * c
    with np.errstate(invalid="ignore", divide="ignore"):
        t = (-half_b - np.sqrt(discriminant)) / a
    points = eye + t[:, None] * d
    valid = (discriminant > DISCRIMINANT_TOLERANCE) & (t > 0) & (t < 1)
    valid &= (points[:, 2] >= 0) & (points[:, 2] <= scene.cylinder_height)
    rho = np.hypot(points[:, 0], points[:, 1])
    with np.errstate(invalid="ignore", divide="ignore"):
        points[:, 0] *= scene.radius / rho
        points[:, 1] *= scene.radius / rho
    points[~valid] = np.nan
    return points, valid


def build_map(kind, scene, width=DEFAULT_IMAGE_WIDTH, height=DEFAULT_IMAGE_HEIGHT, settings=None):
    """AnamorphMap for the kind, checked against the reachable table fan."""
    if settings is None:
        settings = {}
    kind = AnamorphKind.parse(kind)
    anamorph = AnamorphMap(
        kind, scene, width, height, settings.get("base_height", DEFAULT_BASE_HEIGHT)
    )
    if kind == AnamorphKind.THREE_D:
        anamorph._build_arc_tables()
    extent = anamorph.table_extent()
    logger.debug("%s anamorph spans %s", kind, extent)
    return anamorph
