import logging
import math

import cv2
import numpy as np

from .OptConstant import *
from .OptErrors import DoesNotFit
from .OptFunctions import evaluate_blocks, physical_to_pixels, pixels_per_meter
from .RasterImage import RasterImage

logger = logging.getLogger(__name__)

CIRCLE_SHIFT = 4
DEFAULT_RENDER_MARGIN = 0.005
SCALE_BAR_THICKNESS = 3
SCALE_BAR_TICK = 15


def table_to_pixels(raster, points):
    """Table (x, y) to fractional (column, row) of a rendered anamorph."""
    x_min, y_min = raster.extras["origin"]
    ppm = raster.pixels_per_meter
    points = np.asarray(points, dtype=float)
    columns = (points[..., 1] - y_min) * ppm - 0.5
    rows = (points[..., 0] - x_min) * ppm - 0.5
    return np.stack([columns, rows], axis=-1)


def _source_pixels(anamorph, src, a, h):
    columns = (a + 0.5 * anamorph.width) / anamorph.width * src.width - 0.5
    rows = (anamorph.height - h) / anamorph.height * src.height - 0.5
    return columns, rows


def _draw_footprint(pixels, center, radius_px):
    scale = 1 << CIRCLE_SHIFT
    cv2.circle(
        pixels,
        (int(round(center[0] * scale)), int(round(center[1] * scale))),
        int(round(radius_px * scale)),
        BLACK,
        1,
        cv2.LINE_8,
        CIRCLE_SHIFT,
    )


def render(anamorph, src, settings=None):
    """Inverse-sampled anamorph sheet content at the requested dpi.

    Rows run towards the viewer along +x, columns along +y.
    """
    if settings is None:
        settings = {}
    dpi = float(settings.get("dpi", DEFAULT_DPI))
    margin = float(settings.get("margin", DEFAULT_RENDER_MARGIN))
    footprint = settings.get("footprint", True)
    ppm = pixels_per_meter(dpi)
    radius = anamorph.scene.radius
    extent = anamorph.table_extent()
    x_min = min(extent[0], -radius) - margin
    y_min = min(extent[1], -radius) - margin
    x_max = max(extent[2], radius) + margin
    y_max = max(extent[3], radius) + margin
    width = int(math.ceil((y_max - y_min) * ppm))
    height = int(math.ceil((x_max - x_min) * ppm))
    ys = y_min + (np.arange(width) + 0.5) / ppm
    inside_extent_y = (ys >= extent[1]) & (ys <= extent[3])

    def block(start, stop):
        xs = x_min + (np.arange(start, stop) + 0.5) / ppm
        tx, ty = np.meshgrid(xs, ys, indexing="ij")
        a, h, valid, solved = anamorph.inverse_many(tx, ty)
        columns, rows = _source_pixels(anamorph, src, a, h)
        columns = np.where(valid, columns, -1.0).reshape(tx.shape).astype(np.float32)
        rows = np.where(valid, rows, -1.0).reshape(tx.shape).astype(np.float32)
        sampled = cv2.remap(
            src.pixels,
            columns,
            rows,
            cv2.INTER_LINEAR,
            borderMode=cv2.BORDER_REPLICATE,
        )
        valid = valid.reshape(tx.shape)
        sampled[~valid] = WHITE
        outside = np.hypot(tx, ty) > radius
        in_extent = (
            (tx >= extent[0]) & (tx <= extent[2]) & inside_extent_y[None, :]
        )
        unreachable = int(np.count_nonzero(in_extent & outside & ~solved.reshape(tx.shape)))
        return sampled, int(np.count_nonzero(valid)), unreachable

    parts = evaluate_blocks(block, height, settings)
    pixels = np.concatenate([p[0] for p in parts], axis=0)
    covered = sum(p[1] for p in parts)
    unreachable = sum(p[2] for p in parts)
    center = ((0.0 - y_min) * ppm - 0.5, (0.0 - x_min) * ppm - 0.5)
    radius_px = radius * ppm
    if footprint:
        _draw_footprint(pixels, center, radius_px)
    extras = {
        "kind": anamorph.kind,
        "origin": (x_min, y_min),
        "coverage": covered / float(width * height),
        "unreachable": unreachable,
        "circle_center_px": center,
        "circle_radius_px": radius_px,
        "circle_diameter_px": 2 * radius_px,
        "footprint": bool(footprint),
    }
    logger.debug(
        "rendered %dx%d px, coverage %.4f, unreachable %d",
        width,
        height,
        extras["coverage"],
        unreachable,
    )
    return RasterImage(pixels, dpi, extras)


def unwarp(anamorph, sheet, src_width, src_height):
    """Samples a rendered anamorph back through the forward map onto the source grid.

    Returns (RasterImage, valid mask of shape (src_height, src_width)).
    """
    columns = np.arange(src_width)
    rows = np.arange(src_height)
    grid_c, grid_r = np.meshgrid(columns, rows)
    a = (grid_c + 0.5) / src_width * anamorph.width - 0.5 * anamorph.width
    h = anamorph.height - (grid_r + 0.5) / src_height * anamorph.height
    table, valid = anamorph.forward_many(a, h)
    pixel = table_to_pixels(sheet, table)
    map_x = np.where(valid, pixel[:, 0], -1.0).reshape(grid_c.shape).astype(np.float32)
    map_y = np.where(valid, pixel[:, 1], -1.0).reshape(grid_c.shape).astype(np.float32)
    sampled = cv2.remap(
        sheet.pixels,
        map_x,
        map_y,
        cv2.INTER_LINEAR,
        borderMode=cv2.BORDER_CONSTANT,
        borderValue=WHITE,
    )
    return RasterImage(sampled, sheet.dpi), valid.reshape(grid_c.shape)


def dot_centroids(raster, threshold=128, min_area=4):
    """Centroids (column, row) of dark blobs, in label order."""
    gray = cv2.cvtColor(raster.pixels, cv2.COLOR_RGB2GRAY)
    mask = (gray < threshold).astype(np.uint8)
    count, _, stats, centroids = cv2.connectedComponentsWithStats(mask, connectivity=8)
    keep = [k for k in range(1, count) if stats[k, cv2.CC_STAT_AREA] >= min_area]
    return centroids[keep]


def sheet_size_pixels(sheet, dpi):
    try:
        width, height = SHEET_SIZES[sheet]
    except KeyError:
        raise ValueError("unknown sheet %r, expected a4 or letter" % (sheet,))
    return int(round(physical_to_pixels(width, dpi))), int(round(physical_to_pixels(height, dpi)))


def _draw_scale_bar(pixels, left, middle, length):
    half = SCALE_BAR_THICKNESS // 2
    pixels[middle - half : middle + half + 1, left : left + length] = BLACK
    for column in (left, left + length - 1):
        pixels[middle - SCALE_BAR_TICK : middle + SCALE_BAR_TICK + 1, column] = BLACK


def sheet_layout(out, sheet=SHEET_A4, settings=None):
    """Centres rendered content on a printable sheet with a 10 cm scale bar."""
    if settings is None:
        settings = {}
    dpi = out.dpi
    sheet_width, sheet_height = sheet_size_pixels(sheet, dpi)
    margin = int(math.ceil(physical_to_pixels(float(settings.get("sheet_margin", SHEET_MARGIN)), dpi)))
    band = int(math.ceil(physical_to_pixels(SCALE_BAR_BAND, dpi)))
    bar = int(round(physical_to_pixels(SCALE_BAR_LENGTH, dpi)))
    available_width = sheet_width - 2 * margin
    available_height = sheet_height - 2 * margin - band
    if out.width > available_width or out.height > available_height or bar > available_width:
        ppm = out.pixels_per_meter
        raise DoesNotFit(
            "content does not fit on the sheet",
            sheet=sheet,
            required_width_mm=1000.0 * (max(out.width, bar) + 2 * margin) / ppm,
            required_height_mm=1000.0 * (out.height + 2 * margin + band) / ppm,
        )
    left = margin + (available_width - out.width) // 2
    top = margin + (available_height - out.height) // 2
    page = RasterImage.blank(sheet_width, sheet_height, dpi)
    page.pixels[top : top + out.height, left : left + out.width] = out.pixels
    if out.extras.get("footprint", False) and "circle_center_px" in out.extras:
        cx, cy = out.extras["circle_center_px"]
        _draw_footprint(page.pixels, (cx + left, cy + top), out.extras["circle_radius_px"])
    _draw_scale_bar(page.pixels, margin, sheet_height - margin - band // 2, bar)
    page.extras = dict(out.extras)
    page.extras.update(
        {
            "sheet": sheet,
            "content_offset": (left, top),
            "margins_px": (
                left,
                top,
                sheet_width - left - out.width,
                sheet_height - top - out.height,
            ),
            "scale_bar_px": bar,
        }
    )
    if "origin" in out.extras:
        x_min, y_min = out.extras["origin"]
        ppm = out.pixels_per_meter
        page.extras["origin"] = (x_min - top / ppm, y_min - left / ppm)
    if "circle_center_px" in out.extras:
        cx, cy = out.extras["circle_center_px"]
        page.extras["circle_center_px"] = (cx + left, cy + top)
    return page
