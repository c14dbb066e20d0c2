"""Scale-shear filter bank with numerical verification of uncertainty bounds.

Subpackage map: group arithmetic (``group``), special-function constants
(``specfun``), grids and signals (``grid``), weights and regions
(``weights``), the filter-bank system (``system``), the transform and its
identities (``transform``), inequality verifiers (``verify``), and the
configuration/CLI driver (``config``/``cli``).
"""
from .grid import (SampledSignal, SpatialGrid, SupportError, fourier, gaussian_signal,
                   load_signal, make_grid, save_signal)
from .group import (GroupElement, apply_unitary, group_compose, group_identity,
                    group_inverse, haar_weight, msa_matrix, scaling_matrix, shear_matrix)
from .kernels import BACKEND as KERNEL_BACKEND
from .specfun import (UncertaintyConstants, digamma, gamma, pitt_constant,
                      pitt_derivative_at_zero, uncertainty_constants)
from .system import (AdmissibilityResult, AliasingError, ChannelSet, GeneratorSpec,
                     ShearletSystem, admissibility, build_system, evaluate_generator_hat,
                     normalize_system, separable_reference)
from .transform import (CoefficientField, direct_oracle, energy, forward,
                        load_coefficients, moyal, save_coefficients,
                        weighted_spectral_identity)
from .verify import (EmpiricalConstantReport, InequalityReport, VerificationContext,
                     nazarov_empirical_constant, verify_beckner, verify_heisenberg,
                     verify_local, verify_local_sobolev, verify_nazarov_concentration,
                     verify_pitt, verify_sobolev_log)
from .weights import (RegionSpec, SpectralGradient, origin_cell_average, region_mask,
                      spectral_gradient_norm_sq, weight_field, weighted_norm_sq)

__version__ = "0.1.0"
