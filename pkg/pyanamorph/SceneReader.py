from .OptConstant import *
from .OptErrors import ConfigError
from .OptFunctions import LENGTH_SCALES, parse_length

READ_FILE_IN_TEXT_MODE = True

LENGTH_KEYS = (
    "eye_x",
    "eye_y",
    "eye_z",
    "radius",
    "cylinder_height",
    "eye_distance",
    "eye_height",
)
KNOWN_KEYS = LENGTH_KEYS + ("eye_reference", "n_water", "units")


def _entries(f):
    for number, line in enumerate(f, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected key=value", line=number, text=line)
        key, value = line.split("=", 1)
        key = key.strip().lower()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown scene key", line=number, key=key)
        yield number, key, value


def read(f, out=None, settings=None):
    """Reads key=value scene lines into out (a dict), lengths in meters.

    Bare numbers take the file's units (default from settings, else meters).
    """
    if out is None:
        out = {}
    if settings is None:
        settings = {}
    raw = {}
    for number, key, value in _entries(f):
        raw[key] = (number, value)
    unit_name = settings.get("units", "m")
    if "units" in raw:
        number, unit_name = raw.pop("units")
        unit_name = unit_name.lower()
        if unit_name not in LENGTH_SCALES:
            raise ConfigError("unknown length unit", line=number, units=unit_name)
    for key, (number, value) in sorted(raw.items()):
        try:
            if key in LENGTH_KEYS:
                out[key] = parse_length(value, unit_name)
            elif key == "n_water":
                out[key] = float(value)
                if out[key] < 1:
                    raise ValueError("index below 1")
            elif key == "eye_reference":
                value = value.lower()
                if value not in (EYE_REFERENCE_SURFACE, EYE_REFERENCE_AXIS):
                    raise ValueError("expected surface or axis")
                out[key] = value
        except ValueError:
            raise ConfigError("bad scene value", line=number, key=key, value=value)
    return out


def read_scene_file(path, settings=None):
    with open(path, "r") as stream:
        return read(stream, {}, settings)
