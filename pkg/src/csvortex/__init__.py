"""Numerical machinery for SU(3) Chern-Simons vortex profiles:
radial shooting, explicit Liouville profiles and kernels, flux-plane
geometry, the 0-th order blow-up approximation, and weighted-norm
identity verification.
"""

from .errors import (BracketError, CsvortexError, DivergentNormError,
                     DomainError, NonConvergenceError, QuadratureError,
                     ScaleMismatchError, SpreadError, StiffnessError,
                     WindowError)
from .flux_atlas import (FluxPoint, J, gamma1, in_SN, in_omega,
                         mass_identities, on_ell1, on_ell2)
from .profiles import (LiouvilleParams, kernel_eval, liouville_eval,
                       liouville_flux, liouville_regular_part, xi_eval,
                       xi_radial_parts)
from .quadrature import (QuadratureSpec, fd_laplacian, integrate_polar,
                         integrate_radial, richardson_slope)
from .shooting import (RadialSolution, classify, extract_beta,
                       integrate_scalar, integrate_su3,
                       rescale_component2, shoot_scalar_for_gamma,
                       solution_to_csv, solution_to_json)
from .approx import (ApproxSolution, CSHProfile, VortexConfig, A_of_x,
                     build_approx, c_vector, d_of_x, recenter,
                     reduction_T, reduction_T_polar, solve_reduced_a,
                     u1_star, u2_star)
from .linearized import (FieldOnGrid, WeightedNormSpec, apply_linearized,
                         green_representation_check, project_Q, weight_rho,
                         y_norm)

__version__ = "0.1.0"
