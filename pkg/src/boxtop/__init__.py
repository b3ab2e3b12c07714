"""Finite-model workbench for cube covers of the Boolean cube and related witnesses."""
from .cube import (
    Cube,
    CubeFamily,
    Point,
    complement_cubes,
    contains_point,
    cube_cardinality,
    cube_points,
    format_cube,
    is_compatible,
    meet,
    parse_cube,
    parse_point,
    support,
)
from .errors import (
    BoxtopError,
    CoverError,
    DimensionTooSmallError,
    InputError,
    NotDenseError,
    PropertyFailure,
    ResourceError,
)
from .kernels import BACKEND

__version__ = "0.1.0"
