"""Conformal mapping of the Bunimovich stadium and of rectangles onto the disk."""
from .conformal_map import BoundaryAngleTable, DiskMap, HarmonicMeasureResult, Method
from .errors import ConvergenceError, DomainError, SolverError
from .geometry import DomainGeometry, Hit, Shape, arc_point, classify_hit, inscribed_radius
from .monte_carlo import McConfig, McResult
from .monte_carlo import run as run_monte_carlo
from .rect_exact import RectMeasureQuery, rect_end_measure
from .symm_solver import CollocationConfig, SourceDensitySolution, solve

__version__ = "0.1.0"

__all__ = [
    "BoundaryAngleTable", "CollocationConfig", "ConvergenceError", "DiskMap", "DomainError",
    "DomainGeometry", "HarmonicMeasureResult", "Hit", "McConfig", "McResult", "Method",
    "RectMeasureQuery", "Shape", "SolverError", "SourceDensitySolution", "arc_point",
    "classify_hit", "inscribed_radius", "rect_end_measure", "run_monte_carlo", "solve",
]
