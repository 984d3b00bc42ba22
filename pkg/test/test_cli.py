from __future__ import print_function

import contextlib
import io
import json
import math
import os
import unittest
import xml.etree.ElementTree as ET

import cv2

from scenes_for_tests import *
from pyanamorph import *
from pyanamorph import PngWriter

SVG = "{http://www.w3.org/2000/svg}"


def run_cli(argv):
    """(exit status, stdout, stderr) of one command line."""
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        status = main(argv)
    return status, out.getvalue(), err.getvalue()


def read_bytes(path):
    with open(path, "rb") as f:
        return f.read()


def read_sidecar(path):
    with open(path, "r") as f:
        return json.load(f)


class TestParse(unittest.TestCase):

    def test_lengths_keep_their_units(self):
        command = parse_args(["pool", "--eye-height", "10ft", "--depth", "10ft", "--gaze", "35deg"])
        self.assertEqual(command.name, "pool")
        self.assertAlmostEqual(command.options["depth"], 3.048, places=12)
        self.assertAlmostEqual(command.options["gaze"], math.radians(35), places=15)
        self.assertEqual(command.inputs["depth"]["unit"], "ft")
        self.assertAlmostEqual(command.inputs["depth"]["in_unit"], 10.0, places=12)
        self.assertEqual(command.inputs["depth"]["text"], "10ft")
        self.assertEqual(command.water, N_WATER)
        self.assertIsNone(command.scene)

    def test_units_flag(self):
        command = parse_args(["pool", "--units", "ft", "--depth", "10"])
        self.assertAlmostEqual(command.options["depth"], 3.048, places=12)
        self.assertEqual(command.inputs["depth"]["unit"], "ft")
        with self.assertRaises(UsageError):
            parse_args(["pool", "--units", "parsec"])

    def test_defaults(self):
        command = parse_args(["caustic2d"])
        self.assertIsNone(command.options["source"])
        self.assertEqual(command.options["beam_angle"], 0.0)
        self.assertEqual(command.scene, Scene())
        self.assertEqual(command.inputs, {})
        self.assertEqual(command.sidecar_path("json"), "caustic2d.json")

    def test_point_source(self):
        command = parse_args(["caustic2d", "--source-x", "2.5cm", "--source-y", "0"])
        self.assertAlmostEqual(command.options["source"][0], 0.025, places=15)
        with self.assertRaises(UsageError):
            parse_args(["caustic2d", "--source-x", "2.5cm"])
        with self.assertRaises(UsageError):
            parse_args(["caustic2d", "--source-x", "1", "--source-y", "0", "--beam-angle", "10deg"])

    def test_angles(self):
        command = parse_args(["archer", "--apparent-angle", "0.5rad"])
        self.assertEqual(command.options["apparent_angle"], 0.5)
        self.assertIsNone(command.options["target"])

    def test_bad_length(self):
        with self.assertRaises(UsageError) as context:
            parse_args(["pool", "--depth", "deep"])
        self.assertIn("flag=--depth", context.exception.diagnostic())
        self.assertTrue(context.exception.diagnostic().startswith("error=usage"))

    def test_scene_flags_override_file(self):
        path = write_scene_file("cli_scene.txt", "units=cm\nradius=3\neye_height=50\n")
        self.addCleanup(os.remove, path)
        command = parse_args(["caustic2d", "--scene", path, "--radius", "2cm"])
        self.assertAlmostEqual(command.scene.radius, 0.02, places=15)
        self.assertAlmostEqual(command.scene.eye[2], 0.5, places=15)
        command = parse_args(["caustic2d", "--scene", path])
        self.assertAlmostEqual(command.scene.radius, 0.03, places=15)

    def test_scene_file_water_index(self):
        path = write_scene_file("cli_water.txt", "n_water=1.34\n")
        self.addCleanup(os.remove, path)
        self.assertEqual(parse_args(["pool", "--scene", path]).water, 1.34)
        self.assertEqual(parse_args(["pool", "--scene", path, "--n-water", "1.3"]).water, 1.3)


class TestExitStatus(unittest.TestCase):

    def usage_line(self, argv):
        status, out, err = run_cli(argv)
        self.assertEqual(status, 2)
        self.assertEqual(out, "")
        lines = err.strip().splitlines()
        self.assertEqual(len(lines), 1)
        self.assertTrue(lines[0].startswith("error=usage "))
        return lines[0]

    def test_unknown_flag(self):
        line = self.usage_line(["pool", "--bogus"])
        self.assertIn("reason=", line)
        self.assertIn("--bogus", line)

    def test_missing_command(self):
        self.assertIn("reason=", self.usage_line([]))

    def test_missing_image(self):
        self.assertIn("--image", self.usage_line(["anamorph"]))

    def test_focus_inside_eye(self):
        line = self.usage_line(["blur-spot", "--focus", "1cm", "--out", "cli_blur_near.svg"])
        self.assertIn("flag=--focus", line)
        self.assertFalse(os.path.exists("cli_blur_near.svg"))

    def test_target_under_water(self):
        line = self.usage_line(
            ["archer", "--target-x", "1", "--target-z", "-0.2", "--out", "cli_archer_low.svg"]
        )
        self.assertIn("flag=--target-z", line)
        self.assertFalse(os.path.exists("cli_archer_low.svg"))

    def test_library_rejection_is_usage(self):
        options = {"eye_height": 1.5, "distance": 2.0, "length": 0.0, "samples": 20,
                   "out": "cli_ruler_empty.svg"}
        command = Command("ruler", options, {}, water=N_WATER)
        err = io.StringIO()
        with contextlib.redirect_stderr(err):
            status = run(command)
        self.assertEqual(status, 2)
        self.assertTrue(err.getvalue().startswith("error=usage reason="))
        self.assertFalse(os.path.exists("cli_ruler_empty.svg"))

    def test_wrong_output_kind(self):
        status, _, err = run_cli(["pool", "--out", "cli_pool.png"])
        self.assertEqual(status, 2)
        self.assertIn("flag=--out", err)
        self.assertFalse(os.path.exists("cli_pool.png"))

    def test_unknown_scene_key(self):
        path = write_scene_file("cli_bad_scene.txt", "radius=2cm\ncolour=red\n")
        self.addCleanup(os.remove, path)
        status, _, err = run_cli(["caustic2d", "--scene", path])
        self.assertEqual(status, 2)
        self.assertEqual(err.strip(), "error=config key=colour line=2")

    def test_missing_scene_file(self):
        status, _, err = run_cli(["caustic2d", "--scene", "no_such_scene.txt"])
        self.assertEqual(status, 2)
        self.assertTrue(err.startswith("error=config"))

    def test_outside_snells_window(self):
        status, out, err = run_cli(["archer", "--apparent-angle", "49deg", "--out", "cli_archer49.svg"])
        self.assertEqual(status, 1)
        self.assertEqual(err.strip(), "error=outside_snells_window angle_deg=49")
        self.assertEqual(out, "")
        self.assertFalse(os.path.exists("cli_archer49.svg"))

    def test_missing_image_file(self):
        status, _, err = run_cli(["anamorph", "--image", "no_such_image.png", "--out", "cli_none.png"])
        self.assertEqual(status, 1)
        self.assertTrue(err.startswith("error=io"))


class TestCommands(unittest.TestCase):

    def outputs(self, out, *extensions):
        stem = os.path.splitext(out)[0]
        paths = [out] + [stem + "." + e for e in extensions]
        for path in paths:
            self.addCleanup(os.remove, path)
        return paths

    def test_caustic2d_is_reproducible(self):
        first = self.outputs("cli_caustic_a.svg", "csv", "json")
        second = self.outputs("cli_caustic_b.svg", "csv", "json")
        self.assertEqual(run_cli(["caustic2d", "--out", first[0]])[0], 0)
        status, out, _ = run_cli(["caustic2d", "--out", second[0]])
        self.assertEqual(status, 0)
        self.assertIn("wrote=cli_caustic_b.svg", out)
        for a, b in zip(first, second):
            self.assertEqual(read_bytes(a), read_bytes(b))
        root = ET.parse(first[0]).getroot()
        groups = {g.get("id"): g for g in root.findall(SVG + "g")}
        self.assertGreaterEqual(len(list(groups["reflected"])), 200)
        self.assertTrue(read_bytes(first[1]).startswith(b'"parameter","x","y","cusp"\r\n'))
        sidecar = read_sidecar(first[2])
        self.assertEqual(sidecar["command"], "caustic2d")
        self.assertEqual(sidecar["metrics"]["beam_angle"], 0.0)
        self.assertEqual(sidecar["scene"]["radius"], DEFAULT_RADIUS)
        self.assertEqual(len(sidecar["metrics"]["cusps"]), 1)
        cusp_x, cusp_y = sidecar["metrics"]["cusps"][0]
        self.assertLess(math.hypot(cusp_x - DEFAULT_RADIUS / 2, cusp_y), 1e-5 * DEFAULT_RADIUS)
        rows = read_bytes(first[1]).split(b"\r\n")[1:]
        self.assertEqual(sum(1 for row in rows if row.endswith(b',"1"')), 1)

    def test_caustic2d_point_source(self):
        paths = self.outputs("cli_cardioid.svg", "csv", "json")
        status, _, _ = run_cli(
            ["caustic2d", "--source-x", "2.5cm", "--source-y", "0", "--out", paths[0]]
        )
        self.assertEqual(status, 0)
        sidecar = read_sidecar(paths[2])
        self.assertTrue(sidecar["metrics"]["closed"])
        self.assertIsNone(sidecar["metrics"]["beam_angle"])
        self.assertEqual(sidecar["inputs"]["source_x"]["unit"], "cm")
        self.assertEqual(len(sidecar["metrics"]["cusps"]), 1)
        cusp_x, cusp_y = sidecar["metrics"]["cusps"][0]
        self.assertLess(math.hypot(cusp_x + 0.025 / 3, cusp_y), 1e-5 * 0.025)

    def test_rainbow(self):
        paths = self.outputs("cli_rainbow.svg", "csv", "json")
        self.assertEqual(run_cli(["rainbow", "--samples", "20000", "--out", paths[0]])[0], 0)
        metrics = read_sidecar(paths[2])["metrics"]
        self.assertAlmostEqual(metrics["rainbow_angle_deg"], 42.0, delta=0.1)
        lines = read_bytes(paths[1]).split(b"\r\n")
        self.assertEqual(lines[0], b'"angle_low_deg","angle_high_deg","count"')
        self.assertEqual(len(lines), 92)

    def test_virtual_surface_workers(self):
        one = self.outputs("cli_surface_1.svg", "csv", "json")
        four = self.outputs("cli_surface_4.svg", "csv", "json")
        common = ["virtual-surface", "--azimuths", "9", "--heights", "5"]
        self.assertEqual(run_cli(common + ["--workers", "1", "--out", one[0]])[0], 0)
        self.assertEqual(run_cli(common + ["--workers", "4", "--out", four[0]])[0], 0)
        for a, b in zip(one, four):
            self.assertEqual(read_bytes(a), read_bytes(b))

    def test_blur_spot(self):
        paths = self.outputs("cli_blur.svg", "csv", "json")
        self.assertEqual(run_cli(["blur-spot", "--aperture-grid", "7", "--out", paths[0]])[0], 0)
        rows = read_bytes(paths[1]).split(b"\r\n")
        self.assertEqual(len(rows), 5)
        metrics = read_sidecar(paths[2])["metrics"]
        self.assertLess(metrics["h_distance"], metrics["v_distance"])
        orientations = [spot["orientation"] for spot in metrics["spots"]]
        self.assertEqual(orientations[0], "vertical")
        self.assertEqual(orientations[2], "horizontal")

    def test_pool(self):
        paths = self.outputs("cli_pool.svg", "csv", "json")
        argv = ["pool", "--eye-height", "10ft", "--depth", "10ft", "--gaze", "35deg",
                "--samples", "12", "--out", paths[0]]
        self.assertEqual(run_cli(argv)[0], 0)
        sidecar = read_sidecar(paths[2])
        self.assertAlmostEqual(sidecar["inputs"]["depth"]["in_unit"], 10.0, places=12)
        self.assertEqual(sidecar["n_water"], N_WATER)
        self.assertNotIn("scene", sidecar)
        self.assertAlmostEqual(sidecar["metrics"]["slope_v_deg"], 7.955, delta=0.02)
        self.assertGreater(sidecar["metrics"]["slope_h_deg"], sidecar["metrics"]["slope_v_deg"])
        for key in ("slope_h_deg", "slope_h_true_run_deg", "slope_v_deg"):
            self.assertIn(key, sidecar["metrics"])

    def test_ruler(self):
        paths = self.outputs("cli_ruler.svg", "csv", "json")
        self.assertEqual(run_cli(["ruler", "--distance", "2m", "--length", "1m", "--out", paths[0]])[0], 0)
        metrics = read_sidecar(paths[2])["metrics"]
        self.assertEqual(metrics["dropped"], 0)
        self.assertEqual(metrics["samples"], 20)
        self.assertLess(metrics["v_line_deviation"], 1e-6)
        self.assertGreater(metrics["h_line_deviation"], 1e-4)

    def test_archer(self):
        paths = self.outputs("cli_archer.svg", "json")
        self.assertEqual(run_cli(["archer", "--apparent-angle", "30deg", "--out", paths[0]])[0], 0)
        metrics = read_sidecar(paths[1])["metrics"]
        expected = math.degrees(math.asin(N_WATER * 0.5)) - 30.0
        self.assertAlmostEqual(metrics["correction_deg"], expected, places=6)

    def test_anamorph_sheet(self):
        source = "cli_white.png"
        write_png(RasterImage.blank(1, 1), source)
        self.addCleanup(os.remove, source)
        paths = self.outputs("cli_sheet.png", "json")
        argv = ["anamorph", "--image", source, "--dpi", "100", "--width", "3cm", "--height", "3cm",
                "--out", paths[0]]
        status, out, _ = run_cli(argv)
        self.assertEqual(status, 0)
        self.assertIn("wrote=cli_sheet.png", out)
        data = read_bytes(paths[0])
        self.assertEqual(PngWriter.read_png_phys(data), 3937)
        pixels = cv2.imread(paths[0], cv2.IMREAD_COLOR)
        self.assertEqual(pixels.shape[:2], (1169, 827))
        self.assertGreater(float((pixels == 255).all(axis=-1).mean()), 0.9)
        metrics = read_sidecar(paths[1])["metrics"]
        self.assertAlmostEqual(metrics["circle_diameter_px"], 0.05 * 100 / 0.0254, places=6)
        self.assertEqual(metrics["sheet"], "a4")
        self.assertAlmostEqual(read_sidecar(paths[1])["inputs"]["width"]["in_unit"], 3.0, places=12)

    def test_anamorph_defaults_fit_every_kind(self):
        source = "cli_ramp.png"
        write_png(RasterImage(get_ramp()), source)
        self.addCleanup(os.remove, source)
        for kind in AnamorphKind.ALL:
            paths = self.outputs("cli_default_%s.png" % kind, "json")
            status, _, err = run_cli(["anamorph", "--kind", kind, "--image", source, "--out", paths[0]])
            self.assertEqual(status, 0, err)
            metrics = read_sidecar(paths[1])["metrics"]
            self.assertEqual(metrics["sheet"], "a4")
            self.assertGreater(metrics["coverage"], 0.0)
