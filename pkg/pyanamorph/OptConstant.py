# All lengths are meters, all angles radians.

N_AIR = 1.0
N_WATER = 1.333

METERS_PER_INCH = 0.0254
METERS_PER_FOOT = 0.3048

# Default scene: tube of diameter about 5 cm, eye about 25 cm from the tube
# and about 40 cm above the table.
DEFAULT_RADIUS = 0.025
DEFAULT_CYLINDER_HEIGHT = 0.25
DEFAULT_EYE_DISTANCE = 0.25
DEFAULT_EYE_HEIGHT = 0.40
EYE_REFERENCE_SURFACE = "surface"
EYE_REFERENCE_AXIS = "axis"
DEFAULT_EYE_REFERENCE = EYE_REFERENCE_SURFACE

# Default source image placement on the tube.
DEFAULT_IMAGE_WIDTH = 0.04
DEFAULT_IMAGE_HEIGHT = 0.05
DEFAULT_BASE_HEIGHT = 0.01

UNIT_TOLERANCE = 1e-12
DISCRIMINANT_TOLERANCE = 1e-12
SURFACE_TOLERANCE = 1e-9
AZIMUTH_TOLERANCE = 1e-12
POSITION_TOLERANCE = 1e-12

# Focal search along a chief ray.
FD_STEP = 1e-6
CUSP_SPEED_STEP = 1e-4
FOCAL_SCAN_SPAN = 10.0
FOCAL_SCAN_SAMPLES = 10000
FOCAL_BISECT_TOLERANCE = 1e-10

# Vectorised Alhazen solver.
BISECTION_STEPS = 34
SECANT_STEPS = 4

# Blur spot simulation.
DEFAULT_APERTURE_GRID = 21
DEFAULT_EYE_FOCAL_LENGTH = 0.017

# Sheets, (width, height) in meters.
SHEET_A4 = "a4"
SHEET_LETTER = "letter"
SHEET_SIZES = {
    SHEET_A4: (0.210, 0.297),
    SHEET_LETTER: (0.2159, 0.2794),
}
SHEET_MARGIN = 0.010
SCALE_BAR_LENGTH = 0.10
SCALE_BAR_BAND = 0.008

DEFAULT_DPI = 300.0
WHITE = (255, 255, 255)
BLACK = (0, 0, 0)

LABEL_H = "H"
LABEL_V = "V"
