"""Variational geometry of planar domains without necks.

Computes p-Cheeger constants, volume-constrained least-perimeter sets,
and prescribed-curvature minimizers on simple polygons, with exact
arc-polygon minimizer geometry and an independent grid oracle.
"""
from .errors import (
    AssumptionError,
    CheegerlabError,
    InputError,
    NeckDetectedError,
    NumericalError,
)
from .geometry import (
    Arc,
    ArcPolygon,
    Disk,
    Polygon,
    Segment,
    contact_length,
    domain_from_json_dict,
    measure,
    validate_polygon,
)
from .offsets import (
    InnerBody,
    InradiusResult,
    Kernel,
    NoNeckReport,
    erode,
    inradius,
    no_neck_check,
    opened,
    roll,
)
from .oracle import (
    CutResult,
    GridProblem,
    build_grid,
    compare,
    grid_energy,
    min_cut_F,
    oracle_H1,
    oracle_I,
    rasterize,
    stencil_weights,
)
from .pcheeger import (
    CheegerResult,
    MultivalueReport,
    Verdict,
    VolumeMapScan,
    curvature_bounds_ok,
    multivalue_probe,
    rayleigh_quotient,
    solve_cheeger,
    stationarity_residual,
    volume_map_scan,
)
from .profile import (
    FamilyPoint,
    Plateau,
    VolumeProfile,
    build_profile,
    plateau_energy_probe,
)
from .svgio import parse_path, path_data, read_svg, write_svg

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "ArcPolygon",
    "AssumptionError",
    "CheegerlabError",
    "CheegerResult",
    "CutResult",
    "Disk",
    "FamilyPoint",
    "GridProblem",
    "InnerBody",
    "InputError",
    "InradiusResult",
    "Kernel",
    "MultivalueReport",
    "NeckDetectedError",
    "NoNeckReport",
    "NumericalError",
    "Plateau",
    "Polygon",
    "Segment",
    "Verdict",
    "VolumeMapScan",
    "VolumeProfile",
    "build_grid",
    "build_profile",
    "compare",
    "contact_length",
    "curvature_bounds_ok",
    "domain_from_json_dict",
    "erode",
    "grid_energy",
    "inradius",
    "measure",
    "min_cut_F",
    "multivalue_probe",
    "no_neck_check",
    "opened",
    "oracle_H1",
    "oracle_I",
    "parse_path",
    "path_data",
    "plateau_energy_probe",
    "rasterize",
    "rayleigh_quotient",
    "read_svg",
    "roll",
    "solve_cheeger",
    "stationarity_residual",
    "stencil_weights",
    "validate_polygon",
    "volume_map_scan",
    "write_svg",
    "__version__",
]
