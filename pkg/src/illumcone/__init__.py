"""Cone-union construction for bodies of constant width with large illumination number."""

__version__ = "0.1.0"

from .diameter import Configuration, check_pair, diameter_oracle, verify_configuration
from .geometry import (Cone, ConeDomainError, ConeParams, SphericalCap, base_circle_point, cone_extreme_points,
                       derive_cone_params, optimum_params, solve_optimal_R)
from .illumination import (blocking_witness, counting_lower_bound, greedy_apex_cover, illumination_cap,
                           is_blocked)
from .optimizer import evaluate, maximize_tau, psi_required
from .sphere import (AnnulusCode, cap_multiplicity, generate_annulus_code, max_multiplicity,
                     sample_uniform)

__all__ = [
    "AnnulusCode", "Cone", "ConeDomainError", "ConeParams", "Configuration", "SphericalCap",
    "base_circle_point", "blocking_witness", "cap_multiplicity", "check_pair", "cone_extreme_points",
    "counting_lower_bound", "derive_cone_params", "diameter_oracle", "evaluate", "generate_annulus_code",
    "greedy_apex_cover", "illumination_cap", "is_blocked", "max_multiplicity", "maximize_tau",
    "optimum_params", "psi_required", "sample_uniform", "solve_optimal_R", "verify_configuration",
]
