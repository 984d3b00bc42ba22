from __future__ import print_function

import math
import unittest

import numpy as np

from pyanamorph import *


def incoming(angle_deg):
    """Downward ray at angle_deg from the -z axis, in the xz plane."""
    a = math.radians(angle_deg)
    return np.array([math.sin(a), 0.0, -math.cos(a)])


class TestGeometry(unittest.TestCase):

    def test_reflect_normal_incidence(self):
        d = reflect([0.0, 0.0, -1.0], [0.0, 0.0, 1.0])
        self.assertTrue(np.allclose(d, [0.0, 0.0, 1.0], atol=1e-15))

    def test_reflect_oblique(self):
        d = unit([1.0, 0.0, -1.0])
        r = reflect(d, [0.0, 0.0, 1.0])
        self.assertTrue(np.allclose(r, unit([1.0, 0.0, 1.0])))
        self.assertTrue(is_unit(r))

    def test_reflect_broadcasts(self):
        rng = np.random.default_rng(3)
        d = unit(rng.normal(size=(50, 3)))
        n = unit(rng.normal(size=(50, 3)))
        r = reflect(d, n)
        for k in range(50):
            self.assertTrue(np.allclose(r[k], reflect(d[k], n[k])))
        self.assertTrue(np.allclose(np.sum(r * n, axis=-1), -np.sum(d * n, axis=-1)))

    def test_reflect_rejects_non_unit(self):
        with self.assertRaises(ValueError):
            reflect([0.0, 0.0, -2.0], [0.0, 0.0, 1.0])
        with self.assertRaises(ValueError):
            reflect([0.0, 0.0, -1.0], [0.0, 0.0, 0.5])

    def test_refract_normal_incidence(self):
        t = refract([0.0, 0.0, -1.0], [0.0, 0.0, 1.0], Interface(N_AIR, N_WATER))
        self.assertTrue(np.allclose(t, [0.0, 0.0, -1.0], atol=1e-15))

    def test_refract_snell_law(self):
        iface = Interface(N_AIR, N_WATER)
        for angle in (5.0, 30.0, 60.0, 85.0):
            t = refract(incoming(angle), [0.0, 0.0, 1.0], iface)
            self.assertTrue(is_unit(t))
            sin_t = math.hypot(t[0], t[1])
            self.assertAlmostEqual(
                N_AIR * math.sin(math.radians(angle)), N_WATER * sin_t, places=12
            )
            self.assertLess(t[2], 0)

    def test_refract_reversibility(self):
        forward = Interface(N_AIR, N_WATER)
        d = incoming(40.0)
        t = refract(d, [0.0, 0.0, 1.0], forward)
        back = refract(-t, [0.0, 0.0, -1.0], forward.reversed())
        self.assertTrue(np.allclose(back, -d, atol=1e-12))

    def test_refract_near_critical_angle(self):
        iface = Interface(N_WATER, N_AIR)
        d = -incoming(48.60)
        t = refract(d, [0.0, 0.0, -1.0], iface)
        self.assertGreater(math.degrees(math.acos(t[2])), 89.0)
        with self.assertRaises(TotalInternalReflection) as context:
            refract(-incoming(48.62), [0.0, 0.0, -1.0], iface)
        self.assertEqual(context.exception.code, "total_internal_reflection")
        self.assertIn("error=total_internal_reflection", context.exception.diagnostic())

    def test_refract_requires_incoming_ray(self):
        with self.assertRaises(ValueError):
            refract([0.0, 0.0, 1.0], [0.0, 0.0, 1.0], Interface())

    def test_critical_angle_by_bisection(self):
        critical = critical_angle_by_bisection(Interface(N_WATER, N_AIR))
        self.assertAlmostEqual(math.degrees(critical), 48.61, delta=0.01)
        self.assertAlmostEqual(critical, snells_window_angle(N_WATER), places=10)
        with self.assertRaises(ValueError):
            critical_angle_by_bisection(Interface(N_AIR, N_WATER))

    def test_interface_rejects_index_below_one(self):
        with self.assertRaises(ValueError):
            Interface(0.9, 1.0)

    def test_intersect_plane(self):
        p = intersect_plane(Ray([1.0, 2.0, 3.0], [0.0, 0.0, -1.0]))
        self.assertEqual(p[2], 0.0)
        self.assertAlmostEqual(p[0], 1.0)
        self.assertAlmostEqual(p[1], 2.0)
        p = intersect_plane(Ray([0.0, 0.0, 1.0], [1.0, 0.0, -1.0]), 0.5)
        self.assertAlmostEqual(p[0], 0.5)
        self.assertEqual(p[2], 0.5)

    def test_intersect_plane_misses(self):
        with self.assertRaises(NoHit):
            intersect_plane(Ray([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]))
        with self.assertRaises(NoHit):
            intersect_plane(Ray([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]))

    def test_intersect_cylinder_head_on(self):
        point, normal = intersect_cylinder(Ray([1.0, 0.0, 0.3], [-1.0, 0.0, 0.0]), 0.025)
        self.assertTrue(np.allclose(point, [0.025, 0.0, 0.3], atol=1e-15))
        self.assertTrue(np.allclose(normal, [1.0, 0.0, 0.0]))

    def test_intersect_cylinder_lands_on_surface(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            origin = np.array([rng.uniform(0.1, 1.0), rng.uniform(-0.01, 0.01), 0.2])
            target = np.array([0.0, rng.uniform(-0.02, 0.02), rng.uniform(0.0, 0.3)])
            point, normal = intersect_cylinder(Ray(origin, target - origin), 0.025)
            self.assertAlmostEqual(math.hypot(point[0], point[1]), 0.025, places=15)
            self.assertGreater(np.dot(normal, origin - point), 0)

    def test_intersect_cylinder_misses(self):
        with self.assertRaises(NoHit):
            intersect_cylinder(Ray([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]), 0.025)
        with self.assertRaises(NoHit):
            intersect_cylinder(Ray([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]), 0.025)
        with self.assertRaises(NoHit):
            intersect_cylinder(Ray([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]), 0.025)

    def test_intersect_cylinder_grazing_is_a_miss(self):
        with self.assertRaises(NoHit):
            intersect_cylinder(Ray([1.0, 0.025, 0.0], [-1.0, 0.0, 0.0]), 0.025)

    def test_ray_distance_to_line(self):
        ray = Ray([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
        self.assertAlmostEqual(ray.distance_to_line([5.0, 3.0, 4.0]), 5.0)
        self.assertTrue(np.allclose(ray.reversed().direction, [-1.0, 0.0, 0.0]))

    def test_unit_rejects_zero(self):
        with self.assertRaises(ValueError):
            unit([0.0, 0.0, 0.0])

    def test_angle_between(self):
        self.assertAlmostEqual(angle_between([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]), math.pi / 2)
        self.assertEqual(angle_between(Z_AXIS, Z_AXIS), 0.0)
