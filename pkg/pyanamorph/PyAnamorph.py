import os
import os.path
import tempfile

from . import CsvWriter
from . import JsonWriter
from . import PngWriter
from . import PpmWriter
from . import SvgWriter
from .SceneReader import read_scene_file


def supported_formats():
    """Generates dictionary entries for supported output formats. Each entry
    has description, extension, mimetype, category and writer."""
    yield (
        {
            "description": "Portable Network Graphics, with physical dpi",
            "extension": "png",
            "extensions": ("png",),
            "mimetype": "image/png",
            "category": "raster",
            "writer": PngWriter,
        }
    )
    yield (
        {
            "description": "Portable Pixmap",
            "extension": "ppm",
            "extensions": ("ppm",),
            "mimetype": "image/x-portable-pixmap",
            "category": "raster",
            "writer": PpmWriter,
        }
    )
    yield (
        {
            "description": "Scalable Vector Graphics 1.1",
            "extension": "svg",
            "extensions": ("svg",),
            "mimetype": "image/svg+xml",
            "category": "figure",
            "writer": SvgWriter,
        }
    )
    yield (
        {
            "description": "Comma-separated values",
            "extension": "csv",
            "extensions": ("csv",),
            "mimetype": "text/csv",
            "category": "table",
            "writer": CsvWriter,
        }
    )
    yield (
        {
            "description": "JSON sidecar",
            "extension": "json",
            "extensions": ("json",),
            "mimetype": "application/json",
            "category": "sidecar",
            "writer": JsonWriter,
        }
    )


def get_extension_by_filename(filename):
    """extracts the extension from a filename"""
    return os.path.splitext(filename)[1][1:]


def get_writer_by_filename(filename):
    extension = get_extension_by_filename(filename).lower()
    for file_type in supported_formats():
        if extension in file_type["extensions"]:
            return file_type["writer"]
    return None


def write_artifact(writer, obj, path, settings=None):
    """Writes through a temporary file in the target directory, then renames."""
    try:
        text_mode = writer.WRITE_FILE_IN_TEXT_MODE
    except AttributeError:
        text_mode = False
    directory = os.path.dirname(os.path.abspath(path))
    try:
        handle, temporary = tempfile.mkstemp(
            prefix="." + os.path.basename(path) + ".", dir=directory
        )
    except OSError as e:
        raise IOError("cannot write %s: %s" % (path, e.strerror))
    try:
        if text_mode:
            with os.fdopen(handle, "w", encoding="utf-8", newline="\n") as stream:
                writer.write(obj, stream, settings)
        else:
            with os.fdopen(handle, "wb") as stream:
                writer.write(obj, stream, settings)
        os.chmod(temporary, 0o644)
        os.replace(temporary, path)
    except OSError as e:
        if os.path.exists(temporary):
            os.remove(temporary)
        raise IOError("cannot write %s: %s" % (path, e.strerror))
    except BaseException:
        if os.path.exists(temporary):
            os.remove(temporary)
        raise


def write(obj, path, settings=None):
    """Writes obj to path, choosing the writer by extension."""
    writer = get_writer_by_filename(path)
    if writer is None:
        raise ValueError(
            "unsupported output extension %r" % get_extension_by_filename(path)
        )
    write_artifact(writer, obj, path, settings)


def write_png(raster, path, settings=None):
    write_artifact(PngWriter, raster, path, settings)


def write_ppm(raster, path, settings=None):
    write_artifact(PpmWriter, raster, path, settings)


def write_svg(figure, path, settings=None):
    write_artifact(SvgWriter, figure, path, settings)


def write_csv(table, path, settings=None):
    write_artifact(CsvWriter, table, path, settings)


def write_json(document, path, settings=None):
    write_artifact(JsonWriter, document, path, settings)


emit_svg = write_svg
read_scene = read_scene_file
