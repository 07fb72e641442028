"""Exact circuits for the periodic XY chain.

Diagonalization by a fermionic Fourier transform and Bogoliubov rotations,
exact time evolution, momentum-space coarse graining and thermofield-double
preparation, each checked against dense-matrix oracles.
"""

from importlib.metadata import PackageNotFoundError, version as _dist_version

from .circuits import (
    build_bog_layer,
    build_fourier,
    build_laplacian,
    build_rg,
    build_tfd,
    build_time_evolution,
    build_udis,
    coarse_grain,
    energy_frequencies,
    evolve_position_state,
    momentum_reorder_network,
    single_particle_matrix,
)
from .ir import Circuit, GateOp
from .model import (
    ModelParams,
    MomentumLayout,
    bogoliubov_angle,
    build_hamiltonian,
    dispersion,
    exact_spectrum,
    ground_state,
)
from .sim import DensityMatrix, StateVector
from .tolerances import TOL

try:
    __version__ = _dist_version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"


def version_string() -> str:
    """Version tag in ``v<major>.<minor>.<patch>`` form."""
    return f"v{__version__}"


__all__ = [
    "Circuit",
    "DensityMatrix",
    "GateOp",
    "ModelParams",
    "MomentumLayout",
    "StateVector",
    "TOL",
    "bogoliubov_angle",
    "build_bog_layer",
    "build_fourier",
    "build_hamiltonian",
    "build_laplacian",
    "build_rg",
    "build_tfd",
    "build_time_evolution",
    "build_udis",
    "coarse_grain",
    "dispersion",
    "energy_frequencies",
    "evolve_position_state",
    "exact_spectrum",
    "ground_state",
    "momentum_reorder_network",
    "single_particle_matrix",
    "version_string",
]
