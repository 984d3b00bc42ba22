import struct
import zlib

import numpy as np

from .OptFunctions import pixels_per_meter

WRITE_FILE_IN_TEXT_MODE = False
COMPRESSION_LEVEL = 9


def write_png(buf, width, height, ppm=None):
    """RGB 8-bit PNG bytes. ppm, if given, goes into the pHYs chunk."""
    width_byte_3 = width * 3
    raw_data = b"".join(
        b"\x00" + buf[span : span + width_byte_3]
        for span in range(0, height * width_byte_3, width_byte_3)
    )

    def png_pack(png_tag, data):
        chunk_head = png_tag + data
        return (
            struct.pack("!I", len(data))
            + chunk_head
            + struct.pack("!I", 0xFFFFFFFF & zlib.crc32(chunk_head))
        )

    chunks = [
        b"\x89PNG\r\n\x1a\n",
        png_pack(b"IHDR", struct.pack("!2I5B", width, height, 8, 2, 0, 0, 0)),
    ]
    if ppm is not None:
        chunks.append(png_pack(b"pHYs", struct.pack("!2IB", ppm, ppm, 1)))
    chunks.append(png_pack(b"IDAT", zlib.compress(raw_data, COMPRESSION_LEVEL)))
    chunks.append(png_pack(b"IEND", b""))
    return b"".join(chunks)


def read_png_phys(data):
    """Pixels per meter stored in a PNG's pHYs chunk, or None."""
    position = 8
    while position + 8 <= len(data):
        length = struct.unpack("!I", data[position : position + 4])[0]
        tag = data[position + 4 : position + 8]
        if tag == b"pHYs":
            x, y, unit = struct.unpack("!2IB", data[position + 8 : position + 17])
            return x if unit == 1 else None
        position += 12 + length
    return None


def write(raster, f, settings=None):
    """Writes a RasterImage as PNG with its dpi as physical dimensions."""
    pixels = np.ascontiguousarray(raster.pixels, dtype=np.uint8)
    ppm = int(round(pixels_per_meter(raster.dpi)))
    f.write(write_png(pixels.tobytes(), raster.width, raster.height, ppm))
