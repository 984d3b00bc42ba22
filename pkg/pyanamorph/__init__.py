name = "pyanamorph"

# items available at the top level (e.g. pyanamorph.solve_reflection_point)
from .OptConstant import *
from .OptErrors import *
from .OptFunctions import *
from .OptMatrix import OptMatrix
from .OptGeometry import *
from .CylinderScene import *
from .Caustics import *
from .Anamorph import *
from .RasterImage import RasterImage
from .AnamorphRender import *
from .WaterOptics import *
from .CsvWriter import Table
from .Figures import *

# items available in a sub-hierarchy (e.g. pyanamorph.Cli.main)
from .PyAnamorph import *
from .Cli import Command, main, parse_args, run
