import math

import numpy as np


def _translation(tx, ty):
    return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [tx, ty, 1.0]])


def _scaling(sx, sy):
    return np.diag([float(sx), float(sy), 1.0])


def _rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


class OptMatrix:
    """Planar affine map held as a 3x3 array acting on row vectors [x, y, 1].

    Carries table coordinates (meters) onto figure canvases (millimeters).
    Every post_* call appends its transform after the ones already applied.
    """

    def __init__(self, m=None):
        if m is None:
            self.m = np.identity(3)
        else:
            self.m = np.array(m, dtype=float).reshape(3, 3)

    def __eq__(self, other):
        return isinstance(other, OptMatrix) and np.array_equal(self.m, other.m)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __matmul__(self, other):
        return OptMatrix(self.m @ other.m)

    def __str__(self):
        return np.array2string(self.m, precision=3)

    def reset(self):
        self.m = np.identity(3)

    def _about(self, transform, x, y):
        if x == 0 and y == 0:
            self.m = self.m @ transform
        else:
            self.m = self.m @ _translation(-x, -y) @ transform @ _translation(x, y)

    def post_translate(self, tx, ty):
        self.m = self.m @ _translation(tx, ty)

    def post_scale(self, sx=1, sy=None, x=0, y=0):
        self._about(_scaling(sx, sx if sy is None else sy), x, y)

    def post_rotate(self, theta, x=0, y=0):
        self._about(_rotation(theta), x, y)

    def inverse(self):
        if np.linalg.det(self.m) == 0:
            raise ValueError("singular matrix")
        try:
            self.m = np.linalg.inv(self.m)
        except np.linalg.LinAlgError:
            raise ValueError("singular matrix")

    def point_in_matrix_space(self, v0, v1=None):
        if v1 is None:
            v0, v1 = v0[0], v0[1]
        x, y, _ = np.array([v0, v1, 1.0]) @ self.m
        return float(x), float(y)

    def map_points(self, points):
        """(N, 2) array in, new (N, 2) array out."""
        points = np.asarray(points, dtype=float)
        return points @ self.m[:2, :2] + self.m[2, :2]

    def scale_factor(self):
        """Geometric mean scale, for converting lengths."""
        return math.sqrt(abs(np.linalg.det(self.m[:2, :2])))
