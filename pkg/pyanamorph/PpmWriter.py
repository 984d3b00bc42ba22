import numpy as np

WRITE_FILE_IN_TEXT_MODE = False


def write(raster, f, settings=None):
    """Binary P6 fallback. Carries no physical resolution."""
    header = "P6\n%d %d\n255\n" % (raster.width, raster.height)
    f.write(header.encode("ascii"))
    f.write(np.ascontiguousarray(raster.pixels, dtype=np.uint8).tobytes())
