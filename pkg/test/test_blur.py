from __future__ import print_function

import math
import unittest

import numpy as np

from scenes_for_tests import *
from pyanamorph import *

APERTURE = 0.004
SETTINGS = {"aperture_grid": 11}


def get_blur_case():
    scene = get_default_scene()
    p = cylinder_point(scene.radius, 0.3, 0.05)
    t = trace_to_table(scene, p)
    d_h, d_v = image_pair(scene, p, t).distances(scene.eye)
    return scene, p, t, d_h, d_v


class TestBlurSpot(unittest.TestCase):

    def test_focused_on_h_image_is_vertical(self):
        scene, p, t, d_h, d_v = get_blur_case()
        spot = blur_spot(scene, APERTURE, d_h, t, p, SETTINGS)
        self.assertEqual(spot.orientation, "vertical")
        self.assertGreater(spot.aspect, 1.0)

    def test_focused_on_v_image_is_horizontal(self):
        scene, p, t, d_h, d_v = get_blur_case()
        spot = blur_spot(scene, APERTURE, d_v, t, p, SETTINGS)
        self.assertEqual(spot.orientation, "horizontal")
        self.assertLess(spot.aspect, 1.0)

    def test_orientation_flips_once(self):
        scene, p, t, d_h, d_v = get_blur_case()
        aspects = [
            blur_spot(scene, APERTURE, focus, t, p, SETTINGS).aspect
            for focus in np.linspace(d_h, d_v, 9)
        ]
        above = [a > 1.0 for a in aspects]
        flips = sum(1 for first, second in zip(above, above[1:]) if first != second)
        self.assertEqual(flips, 1)

    def test_least_confusion_between_images(self):
        scene, p, t, d_h, d_v = get_blur_case()
        focus = least_confusion_focus(d_h, d_v)
        self.assertGreater(focus, d_h)
        self.assertLess(focus, d_v)
        self.assertAlmostEqual(least_confusion_focus(0.3, 0.3), 0.3, places=15)

    def test_spot_cloud_size(self):
        scene, p, t, d_h, d_v = get_blur_case()
        spot = blur_spot(scene, APERTURE, d_h, t, p, SETTINGS)
        # pupil samples inside an 11 by 11 grid circle
        self.assertEqual(spot.points.shape, (81, 2))
        self.assertEqual(spot.aperture_diameter, APERTURE)

    def test_bad_focus(self):
        scene, p, t, d_h, d_v = get_blur_case()
        with self.assertRaises(ValueError):
            blur_spot(scene, APERTURE, 0.0, t, p, SETTINGS)
        with self.assertRaises(ValueError):
            blur_spot(scene, APERTURE, 0.01, t, p, SETTINGS)


    def test_h_focus_blur_is_strongly_elongated(self):
        scene, p, t, d_h, d_v = get_blur_case()
        spot = blur_spot(scene, APERTURE, d_h, t, p, SETTINGS)
        self.assertGreater(spot.sigma_major / spot.sigma_minor, 3.0)
        spot = blur_spot(scene, APERTURE, d_v, t, p, SETTINGS)
        self.assertGreater(spot.sigma_major / spot.sigma_minor, 3.0)

    def test_pinhole_has_no_blur(self):
        scene, p, t, d_h, d_v = get_blur_case()
        focus = least_confusion_focus(d_h, d_v)
        wide = blur_spot(scene, APERTURE, focus, t, p, SETTINGS)
        pinhole = blur_spot(scene, APERTURE * 1e-2, focus, t, p, SETTINGS)
        self.assertGreater(wide.sigma_major, 0.0)
        self.assertLess(pinhole.sigma_major, 0.02 * wide.sigma_major)
