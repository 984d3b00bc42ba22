from __future__ import print_function

import math
import unittest

import numpy as np

from pyanamorph import *


class TestMatrix(unittest.TestCase):

    def test_matrix(self):
        matrix = OptMatrix()
        matrix.post_rotate(math.pi / 2, 100, 100)
        p = matrix.point_in_matrix_space(50, 50)
        self.assertAlmostEqual(p[0], 150)
        self.assertAlmostEqual(p[1], 50)

    def test_matrix_2(self):
        matrix = OptMatrix()
        matrix.reset()
        matrix.post_scale(2, 2, 50, 50)
        p = matrix.point_in_matrix_space(50, 50)
        self.assertAlmostEqual(p[0], 50)
        self.assertAlmostEqual(p[1], 50)

        p = matrix.point_in_matrix_space(25, 25)
        self.assertAlmostEqual(p[0], 0)
        self.assertAlmostEqual(p[1], 0)
        matrix.post_rotate(math.pi / 4, 50, 50)

        p = matrix.point_in_matrix_space(25, 25)
        self.assertAlmostEqual(p[0], 50)

    def test_matrix_3(self):
        matrix = OptMatrix()
        matrix.post_scale(0.5, 0.5)
        p = matrix.point_in_matrix_space(100, 100)
        self.assertAlmostEqual(p[0], 50)
        self.assertAlmostEqual(p[1], 50)
        matrix.reset()
        matrix.post_scale(2, 2, 100, 100)
        p = matrix.point_in_matrix_space(50, 50)
        self.assertAlmostEqual(p[0], 0)
        self.assertAlmostEqual(p[1], 0)

    def test_inverse(self):
        matrix = OptMatrix()
        matrix.post_scale(1000.0, -1000.0)
        matrix.post_rotate(0.3)
        matrix.post_translate(80.0, 60.0)
        inverse = OptMatrix(matrix.m)
        inverse.inverse()
        p = matrix.point_in_matrix_space(0.02, -0.01)
        q = inverse.point_in_matrix_space(p)
        self.assertAlmostEqual(q[0], 0.02, places=12)
        self.assertAlmostEqual(q[1], -0.01, places=12)
        identity = matrix @ inverse
        r = identity.point_in_matrix_space(7.0, -3.0)
        self.assertAlmostEqual(r[0], 7.0, places=9)
        self.assertAlmostEqual(r[1], -3.0, places=9)

    def test_singular(self):
        matrix = OptMatrix()
        matrix.post_scale(0, 1)
        with self.assertRaises(ValueError):
            matrix.inverse()

    def test_map_points_matches_single_points(self):
        matrix = OptMatrix()
        matrix.post_rotate(1.1, 3, 4)
        matrix.post_scale(2.5, -2.5)
        points = np.array([[0.0, 0.0], [1.0, 2.0], [-3.0, 0.5]])
        mapped = matrix.map_points(points)
        for point, expected in zip(points, mapped):
            self.assertTrue(np.allclose(matrix.point_in_matrix_space(point), expected))

    def test_scale_factor(self):
        matrix = OptMatrix()
        matrix.post_scale(1000.0, -1000.0)
        matrix.post_rotate(0.7)
        self.assertAlmostEqual(matrix.scale_factor(), 1000.0, places=9)
        self.assertNotEqual(matrix, OptMatrix())
