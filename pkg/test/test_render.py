from __future__ import print_function

import time
import unittest

import numpy as np
from scipy.spatial import cKDTree

from scenes_for_tests import *
from pyanamorph import *

RENDER_SETTINGS = {"dpi": 300, "footprint": False}


def source_coordinates(anamorph, src, points):
    """(a, h) of source pixel positions given as (column, row)."""
    a = (points[:, 0] + 0.5) / src.width * anamorph.width - 0.5 * anamorph.width
    h = anamorph.height - (points[:, 1] + 0.5) / src.height * anamorph.height
    return a, h


class TestRender(unittest.TestCase):

    def test_dot_grid_lands_where_forward_map_says(self):
        anamorph = get_small_map(AnamorphKind.ERECT)
        pixels, centres = get_dot_grid()
        src = RasterImage(pixels)
        out = render(anamorph, src, RENDER_SETTINGS)
        a, h = source_coordinates(anamorph, src, centres)
        table, valid = anamorph.forward_many(a, h)
        self.assertTrue(valid.all())
        expected = table_to_pixels(out, table[:, :2])
        found = dot_centroids(out)
        self.assertEqual(len(found), len(expected))
        distances, _ = cKDTree(found).query(expected)
        self.assertLess(distances.max(), 2.0)
        self.assertLess(float(np.sqrt(np.mean(distances ** 2))), 0.5)

    def test_unwarp_recovers_source(self):
        anamorph = get_small_map(AnamorphKind.THREE_D)
        ramp = get_ramp()
        out = render(anamorph, RasterImage(ramp), RENDER_SETTINGS)
        back, valid = unwarp(anamorph, out, ramp.shape[1], ramp.shape[0])
        self.assertTrue(valid.all())
        inner = (slice(2, -2), slice(2, -2))
        difference = back.pixels[inner].astype(float) - ramp[inner].astype(float)
        self.assertLess(float(np.sqrt(np.mean(difference ** 2))) / 255.0, 0.02)

    def test_workers_do_not_change_pixels(self):
        anamorph = get_small_map(AnamorphKind.FLAT)
        src = RasterImage(get_ramp())
        one = render(anamorph, src, {"dpi": 150, "workers": 1})
        four = render(anamorph, src, {"dpi": 150, "workers": 4})
        self.assertTrue(np.array_equal(one.pixels, four.pixels))
        self.assertEqual(one.extras, four.extras)

    def test_render_extras(self):
        anamorph = get_small_map(AnamorphKind.ERECT)
        out = render(anamorph, RasterImage(get_ramp()), {"dpi": 300})
        self.assertEqual(out.dpi, 300.0)
        self.assertAlmostEqual(out.extras["circle_diameter_px"], 0.05 / 0.0254 * 300, places=6)
        self.assertGreater(out.extras["coverage"], 0.0)
        self.assertLess(out.extras["coverage"], 1.0)
        self.assertTrue(out.extras["footprint"])
        self.assertEqual(out.extras["kind"], AnamorphKind.ERECT)
        # the tube footprint outline is drawn in black
        cx, cy = out.extras["circle_center_px"]
        radius = out.extras["circle_radius_px"]
        ring = out.pixels[int(round(cy)), int(round(cx - radius)) - 1 : int(round(cx - radius)) + 2]
        self.assertTrue((ring == 0).all(axis=-1).any())

    def test_rendered_table_is_white_inside_tube(self):
        anamorph = get_small_map(AnamorphKind.ERECT)
        out = render(anamorph, RasterImage(get_ramp()), RENDER_SETTINGS)
        cx, cy = out.extras["circle_center_px"]
        centre = out.pixels[int(round(cy)), int(round(cx))]
        self.assertTrue((centre == 255).all())

    def test_full_size_render_time(self):
        anamorph = build_map(AnamorphKind.THREE_D, get_default_scene())
        src = RasterImage(get_ramp(2000, 2000))
        start = time.time()
        out = render(anamorph, src, RENDER_SETTINGS)
        elapsed = time.time() - start
        self.assertLess(elapsed, 30.0)
        self.assertGreater(out.extras["coverage"], 0.0)


class TestSheetLayout(unittest.TestCase):

    def test_a4_layout(self):
        anamorph = get_small_map(AnamorphKind.ERECT)
        out = render(anamorph, RasterImage(get_ramp()), {"dpi": 300})
        page = sheet_layout(out, SHEET_A4)
        self.assertEqual((page.width, page.height), (2480, 3508))
        self.assertEqual(page.extras["scale_bar_px"], 1181)
        left, top = page.extras["content_offset"]
        self.assertTrue(
            np.array_equal(page.pixels[top : top + out.height, left : left + out.width], out.pixels)
        )
        for margin in page.extras["margins_px"]:
            self.assertGreaterEqual(margin, 118)

    def test_letter_size(self):
        self.assertEqual(sheet_size_pixels(SHEET_LETTER, 100), (850, 1100))
        with self.assertRaises(ValueError):
            sheet_size_pixels("a3", 300)

    def test_content_too_wide(self):
        with self.assertRaises(DoesNotFit) as context:
            sheet_layout(RasterImage.blank(4000, 10, 300), SHEET_A4)
        self.assertIn("sheet=a4", context.exception.diagnostic())


class TestRasterImage(unittest.TestCase):

    def test_blank(self):
        raster = RasterImage.blank(4, 3, 254)
        self.assertEqual(raster.pixels.shape, (3, 4, 3))
        self.assertTrue((raster.pixels == 255).all())
        self.assertAlmostEqual(raster.physical_size()[0], 4 * 0.0001, places=12)

    def test_gray_is_expanded(self):
        raster = RasterImage(np.zeros((2, 2), dtype=np.uint8))
        self.assertEqual(raster.pixels.shape, (2, 2, 3))

    def test_bad_dpi(self):
        with self.assertRaises(ValueError):
            RasterImage.blank(2, 2, 0)
