"""Multi-robot coverage control with time-varying density functions.

Voronoi-based locational-cost descent, the centralized centroid-Jacobian
tracking law, and its k-hop Neumann truncations, plus a scenario CLI and a
live operator console bridge.
"""

from .controllers import ControlState, VelocityCommand, cortes, lloyd, tvd_c, tvd_dk
from .density import DensityField, GaussianComponent, builtin
from .geometry import Domain, Tessellation, boundary_segment, clip_halfplane, tessellate
from .jacobian import (
    CentroidJacobian,
    assemble,
    dc_dp_block,
    neumann_apply,
    solve_exact,
    spectral_radius,
)
from .moments import MomentSet, QuadratureConfig, moments, polygon_integral, segment_integral
from .sim import (
    Scenario,
    SimTrace,
    cost_gradient,
    init_cvt,
    locational_cost,
    run,
    unicycle_map,
)

__all__ = [
    "ControlState", "VelocityCommand", "lloyd", "cortes", "tvd_c", "tvd_dk",
    "DensityField", "GaussianComponent", "builtin",
    "Domain", "Tessellation", "tessellate", "clip_halfplane", "boundary_segment",
    "CentroidJacobian", "assemble", "dc_dp_block", "neumann_apply",
    "solve_exact", "spectral_radius",
    "MomentSet", "QuadratureConfig", "moments", "polygon_integral", "segment_integral",
    "Scenario", "SimTrace", "locational_cost", "cost_gradient", "init_cvt",
    "run", "unicycle_map",
]

__version__ = "0.1.0"
