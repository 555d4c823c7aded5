"""Local area random graphs over norm-derived plane metrics.

The layers, bottom to top: exact scalar arithmetic, norm shapes and
distances, dense point-set sampling, LARG edge sampling, step-isometry
construction and verification, grid/anchoring machinery, and Monte Carlo
experiments.  Everything public in each layer is re-exported here.
"""

from .exact import (
    FLOAT_INTEGER_GUARD,
    BoundaryAmbiguityError,
    SqrtExt,
    exact_div,
    exact_floor,
    format_scalar,
    fractional_part,
    guarded_floor,
    is_exact,
    parse_scalar,
)
from .geometry import *  # noqa: F401,F403
from .pointsets import *  # noqa: F401,F403
from .larg import *  # noqa: F401,F403
from .stepiso import *  # noqa: F401,F403
from .grids import *  # noqa: F401,F403
from .anchoring import *  # noqa: F401,F403
from .experiments import *  # noqa: F401,F403

from . import exact, geometry, pointsets, larg, stepiso, grids, anchoring, experiments

__version__ = "0.1.0"

_exact_names = [
    "FLOAT_INTEGER_GUARD",
    "BoundaryAmbiguityError",
    "SqrtExt",
    "exact_div",
    "exact_floor",
    "format_scalar",
    "fractional_part",
    "guarded_floor",
    "is_exact",
    "parse_scalar",
]
__all__ = sorted(
    set(_exact_names)
    | set(geometry.__all__)
    | set(pointsets.__all__)
    | set(larg.__all__)
    | set(stepiso.__all__)
    | set(grids.__all__)
    | set(anchoring.__all__)
    | set(experiments.__all__)
)
