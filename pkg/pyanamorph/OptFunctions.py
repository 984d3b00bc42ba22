import math
import re

from .OptConstant import *

LENGTH_SCALES = {
    "m": 1.0,
    "cm": 0.01,
    "mm": 0.001,
    "in": METERS_PER_INCH,
    "inch": METERS_PER_INCH,
    "ft": METERS_PER_FOOT,
    "feet": METERS_PER_FOOT,
}

ANGLE_SCALES = {
    "rad": 1.0,
    "deg": math.pi / 180.0,
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][-+]?[0-9]+)?)\s*([a-zA-Z]*)\s*$")


def split_quantity(text):
    """Splits '10ft' into (10.0, 'ft'). Returns None when unparsable."""
    m = _QUANTITY.match(str(text))
    if m is None:
        return None
    return float(m.group(1)), m.group(2).lower()


def parse_length(text, default_unit="m"):
    quantity = split_quantity(text)
    if quantity is None:
        raise ValueError("expected a length such as 25cm, 10ft or 0.4m: %r" % text)
    value, unit = quantity
    if unit == "":
        unit = default_unit
    try:
        scale = LENGTH_SCALES[unit]
    except KeyError:
        raise ValueError("unknown length unit %r in %r" % (unit, text))
    return value * scale


def parse_angle(text, default_unit="deg"):
    quantity = split_quantity(text)
    if quantity is None:
        raise ValueError("expected an angle such as 35deg or 0.6rad: %r" % text)
    value, unit = quantity
    if unit == "":
        unit = default_unit
    try:
        scale = ANGLE_SCALES[unit]
    except KeyError:
        raise ValueError("unknown angle unit %r in %r" % (unit, text))
    return value * scale


def length_in_unit(meters, unit):
    return meters / LENGTH_SCALES[unit]


def angle_in_unit(radians, unit):
    return radians / ANGLE_SCALES[unit]


def format_quantity(value, unit):
    return "%.12g%s" % (value, unit)


def physical_to_pixels(length, dpi):
    """Meters to pixels at the given dots per inch."""
    return length * dpi / METERS_PER_INCH


def pixels_to_physical(pixels, dpi):
    return pixels * METERS_PER_INCH / dpi


def pixels_per_meter(dpi):
    return dpi / METERS_PER_INCH


def wrap_angle(theta):
    """Wraps into (-pi, pi]."""
    tau = math.pi * 2
    theta = math.fmod(theta + math.pi, tau)
    if theta <= 0:
        theta += tau
    return theta - math.pi


def degrees(radians):
    return radians * 180.0 / math.pi


def radians(degrees_value):
    return degrees_value * math.pi / 180.0


def row_blocks(rows, workers):
    """Splits range(rows) into contiguous (start, stop) blocks, one or more per worker."""
    if rows <= 0:
        return []
    count = max(1, min(rows, int(workers) * 4))
    edges = [(rows * i) // count for i in range(count + 1)]
    return [(edges[i], edges[i + 1]) for i in range(count) if edges[i] < edges[i + 1]]


def evaluate_blocks(function, rows, settings=None):
    """Evaluates function(start, stop) over row blocks and returns results in block order.

    The `workers` setting selects a thread pool; results never depend on it.
    """
    if settings is None:
        settings = {}
    workers = int(settings.get("workers", 1) or 1)
    blocks = row_blocks(rows, workers)
    if workers <= 1 or len(blocks) <= 1:
        return [function(start, stop) for start, stop in blocks]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(function, start, stop) for start, stop in blocks]
        return [future.result() for future in futures]
