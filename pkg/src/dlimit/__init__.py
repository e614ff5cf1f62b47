"""Rasters, Hausdorff distances and exact algebra for the large-degree limits
of z^n + c, z^t + c and z^n + c + a/z^n."""
from .dynamics import (
    BOUNDED,
    INFINITY,
    CriticalData,
    Classification,
    EscapeSpec,
    OrbitOutcome,
    PerturbedPower,
    PowerPoly,
    RealPower,
    apply_map,
    classify,
    critical_data,
    critical_values,
    escape_radius,
    iterate_orbit,
    principal_power,
)
from .geometry import (
    Circle,
    ClosedAnnulus,
    ClosedDisk,
    Limacon,
    RadialRootBundle,
    RootFindingError,
    SectorSolution,
    annulus_bounds,
    critical_fixed_solutions,
    distance_to_target,
    limacon_point,
    radial_roots,
    roots_of_minus_one,
    superattracting_center,
    verify_center_dynamics,
)
from .hausdorff import (
    HausdorffReport,
    directed_raster_distance,
    hausdorff_raster,
    hausdorff_to_target,
)
from .kernels import BACKEND
from .raster import (
    GridSpec,
    SetRaster,
    boundary_raster,
    filled_julia_raster,
    parameter_raster,
    rotate_raster,
    target_raster,
)

__version__ = "0.1.0"
