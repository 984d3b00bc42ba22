import cv2
import numpy as np

from .OptConstant import *
from .OptFunctions import pixels_per_meter


class RasterImage:
    """RGB 8-bit pixels (rows, columns, 3) with a physical resolution in dpi."""

    def __init__(self, pixels, dpi=DEFAULT_DPI, extras=None):
        pixels = np.asarray(pixels)
        if pixels.ndim == 2:
            pixels = np.repeat(pixels[:, :, None], 3, axis=2)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise ValueError("raster must have three channels")
        if dpi <= 0:
            raise ValueError("dpi must be positive")
        self.pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
        self.dpi = float(dpi)
        self.extras = extras if extras is not None else {}

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def pixels_per_meter(self):
        return pixels_per_meter(self.dpi)

    def physical_size(self):
        """(width, height) in meters."""
        ppm = self.pixels_per_meter
        return self.width / ppm, self.height / ppm

    def copy(self):
        return RasterImage(self.pixels.copy(), self.dpi, dict(self.extras))

    @staticmethod
    def blank(width, height, dpi=DEFAULT_DPI, color=WHITE):
        pixels = np.empty((int(height), int(width), 3), dtype=np.uint8)
        pixels[:, :] = color
        return RasterImage(pixels, dpi)

    @staticmethod
    def read(path, dpi=DEFAULT_DPI):
        bgr = cv2.imread(path, cv2.IMREAD_COLOR)
        if bgr is None:
            raise IOError("could not read image %s" % path)
        return RasterImage(cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB), dpi)
