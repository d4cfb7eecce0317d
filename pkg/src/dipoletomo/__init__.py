"""Vortex-dipole scattering simulation and linearized potential reconstruction."""

from .config import RunConfig, load_config, parse_config
from .dynamics import (IntegratorConfig, PhaseState, Trajectory, exit_time,
                       free_flow, free_flow_jacobian, hamiltonian, integrate,
                       vector_field)
from .potential import (ZERO, CompactBump, Constant, GaussianBump,
                        GaussianSum, Potential, parse_potential, perp)
from .reconstruction import (ReconstructionResult, lambda_kernel,
                             moment_check, reconstruct_general,
                             reconstruct_radial)
from .scattering import (LaunchParams, S0Series, ScatteringSample,
                         ScatteringTable, angular_table, launch, load_table,
                         radial_table, rotate_sample, s0_series, save_table,
                         scattering_sample)
from .verification import (IdentityReport, conservation_report,
                           covariance_report, linearization_order,
                           identity_residual)

__all__ = [name for name in dir() if not name.startswith("_")]
