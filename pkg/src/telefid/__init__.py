"""Average fidelity and fidelity deviation of qubit teleportation through a Werner channel."""

from .measures import (
    THRESHOLDS,
    ChannelClass,
    ConsistencyError,
    PerformancePoint,
    RegionTriangle,
    average_fidelity,
    classify_channel,
    covariance_element,
    d_bounds,
    delta,
    f_bounds,
    fidelity_deviation,
    half_circle_bound,
    region_triangle,
)
from .montecarlo import (
    Estimate,
    SamplerConfig,
    mc_average_fidelity,
    mc_fidelity_deviation,
    mc_moment2,
    mc_moment4,
    sample_bloch,
)
from .optimizer import OptimizationResult, OptimizerConfig, optimize_corrections
from .qubit import (
    Rotation3,
    bell_basis,
    bloch_to_density,
    pauli,
    su2_to_so3,
    unitary_from_axis_angle,
    validate_measurement,
)
from .teleportation import (
    ConfigError,
    ProtocolConfig,
    WernerChannel,
    state_fidelity,
    teleport_closed,
    teleport_dense,
    werner_state,
    xi,
)

__version__ = "0.1.0"
