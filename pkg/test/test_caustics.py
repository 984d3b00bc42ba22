from __future__ import print_function

import math
import unittest

import numpy as np

from scenes_for_tests import *
from pyanamorph import *


def plane_mirror_family():
    """Point source one meter above a flat mirror at z = 0."""
    source = vec3(0.0, 0.0, 1.0)

    def function(params):
        direction = launch_direction(params[0], params[1])
        hit = intersect_plane(Ray(source, direction, normalize=False))
        return Ray(hit, reflect(direction, Z_AXIS), normalize=False)

    return RayFamily(function, 2, ((-1.0, 1.0), (-1.5, -0.1)), 1.0)


def parallel_family():
    """Parallel rays along +z, no focus anywhere."""

    def function(params):
        return Ray(vec3(params[0], params[1], 0.0), Z_AXIS, normalize=False)

    return RayFamily(function, 2, ((-1.0, 1.0), (-1.0, 1.0)), 1.0)


class TestEnvelope(unittest.TestCase):

    def test_parallel_beam_paraxial_focus(self):
        radius = 0.025
        family = circle_reflection_family(radius, direction=(1.0, 0.0))
        sheet = envelope_2d(family, [0.0])
        self.assertEqual(len(sheet), 1)
        point = sheet.points()[0]
        self.assertLess(math.hypot(point[0] - radius / 2, point[1]), 1e-6 * radius)

    def test_envelope_matches_neighbor_intersections(self):
        radius = 0.025
        family = circle_reflection_family(radius, direction=(1.0, 0.0))
        params = family.sample_params(10000)
        oracle = neighbor_intersections(family, params)
        self.assertEqual(len(oracle), len(params) - 1)
        chosen = oracle[::100]
        sheet = envelope_2d(family, [u for u, _ in chosen])
        self.assertEqual(len(sheet), len(chosen))
        for (_, expected), found in zip(chosen, sheet.points()):
            self.assertLess(np.linalg.norm(found - expected), 1e-5 * radius)

    def test_source_on_circle_cardioid(self):
        radius = 0.025
        family = circle_reflection_family(radius, source=(radius, 0.0))
        self.assertTrue(family.closed)
        sheet = envelope_2d(family, [math.pi])
        point = sheet.points()[0]
        self.assertLess(math.hypot(point[0] + radius / 3, point[1]), 1e-6 * radius)

    def test_cardioid_has_one_cusp_opposite_the_source(self):
        radius = 0.025
        family = circle_reflection_family(radius, source=(radius, 0.0))
        for count in (2000, 2001):
            sheet = envelope_2d(family, family.sample_params(count))
            self.assertEqual(len(sheet.cusps), 1)
            cusp = sheet.cusp_points()[0]
            self.assertLess(math.hypot(cusp[0] + radius / 3, cusp[1]), 1e-5 * radius)
            u, _ = sheet.cusp_locations[0]
            self.assertAlmostEqual(u, math.pi, delta=1e-4)
            nearest = sheet.samples[sheet.cusps[0]][0]
            self.assertLess(abs(nearest - math.pi), 2 * math.pi / count)

    def test_parallel_beam_has_one_cusp_on_axis(self):
        radius = 0.025
        family = circle_reflection_family(radius, direction=(1.0, 0.0))
        sheet = envelope_2d(family, family.sample_params(2000))
        self.assertEqual(len(sheet.cusps), 1)
        cusp = sheet.cusp_points()[0]
        self.assertLess(math.hypot(cusp[0] - radius / 2, cusp[1]), 1e-5 * radius)

    def test_envelope_rotates_with_the_beam(self):
        radius = 0.025
        angle = 0.7
        c, s = math.cos(angle), math.sin(angle)
        straight = circle_reflection_family(radius, direction=(1.0, 0.0))
        turned = circle_reflection_family(radius, direction=(c, s))
        params = straight.sample_params(200)
        first = envelope_2d(straight, params).points()
        second = envelope_2d(turned, params + angle).points()
        self.assertEqual(len(first), len(second))
        rotated = np.column_stack(
            [c * first[:, 0] - s * first[:, 1], s * first[:, 0] + c * first[:, 1]]
        )
        self.assertLess(np.abs(rotated - second[:, :2]).max(), 1e-7 * radius)

    def test_far_source_approaches_parallel_beam(self):
        radius = 0.025
        beam = circle_reflection_family(radius, direction=(1.0, 0.0))
        far = circle_reflection_family(radius, source=(-1e6 * radius, 0.0))
        self.assertFalse(far.closed)
        params = np.linspace(-math.pi / 4, math.pi / 4, 101)
        near_points = envelope_2d(beam, params).points()
        far_points = envelope_2d(far, params + 2 * math.pi).points()
        self.assertEqual(len(near_points), len(far_points))
        self.assertLess(np.linalg.norm(near_points - far_points, axis=1).max(), 1e-5 * radius)

    def test_distant_source_domain_is_visible_arc(self):
        family = circle_reflection_family(1.0, source=(3.0, 0.0))
        self.assertFalse(family.closed)
        lo, hi = family.domain
        self.assertAlmostEqual(0.5 * (lo + hi), math.pi, places=12)
        self.assertLess(hi - lo, 2 * math.pi)

    def test_envelope_rejects_two_parameter_family(self):
        with self.assertRaises(ValueError):
            envelope_2d(plane_mirror_family(), [0.0])

    def test_bad_radius(self):
        with self.assertRaises(ValueError):
            circle_reflection_family(0.0)


class TestFocalPoints(unittest.TestCase):

    def test_plane_mirror_double_focus(self):
        family = plane_mirror_family()
        found = focal_points(family, (0.0, -math.pi / 4))
        self.assertTrue(found)
        for t, labels in found:
            self.assertAlmostEqual(t, -math.sqrt(2), delta=1e-6)
        labels = set()
        for _, found_labels in found:
            labels.update(found_labels)
        self.assertEqual(labels, {LABEL_H, LABEL_V})
        t_h, t_v = focal_points_on_chief_ray(family, (0.0, -math.pi / 4))
        self.assertAlmostEqual(t_h, t_v, delta=1e-6)

    def test_parallel_family_has_no_focus(self):
        with self.assertRaises(NoDegeneracy) as context:
            focal_points(parallel_family(), (0.0, 0.0))
        self.assertTrue(context.exception.diagnostic().startswith("error=no_degeneracy"))

    def test_one_parameter_family_rejected(self):
        with self.assertRaises(ValueError):
            focal_points(circle_reflection_family(1.0), 0.0)

    def test_cylinder_family_matches_image_pair(self):
        scene = get_default_scene()
        for p, t in get_sight_lines(scene, 100, seed=21):
            family = cylinder_ray_family(scene, t, p)
            chief = family(family.center)
            self.assertLess(np.linalg.norm(chief.origin - p), 1e-9)
            t_h, t_v = focal_points_on_chief_ray(family, family.center)
            pair = image_pair(scene, p, t)
            d_h, d_v = pair.distances(scene.eye)
            self.assertLess(np.linalg.norm(chief.at(t_h) - pair.h_point), 1e-4 * d_h)
            self.assertLess(np.linalg.norm(chief.at(t_v) - pair.v_point), 1e-4 * d_v)

    def test_cylinder_images_are_virtual(self):
        scene = get_default_scene()
        p, t = get_sight_lines(scene, 1, seed=22)[0]
        family = cylinder_ray_family(scene, t, p)
        t_h, t_v = focal_points_on_chief_ray(family, family.center)
        self.assertLess(t_h, 0)
        self.assertLess(t_v, 0)
        # the H image sits closer to the mirror than the V image
        self.assertLess(abs(t_h), abs(t_v))
