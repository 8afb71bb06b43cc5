"""monoflow: analysis toolkit for eventually cooperative and competitive
dynamical systems.

Submodules: cones (partial orders), systems (vector fields), integrate
(trajectory sampling), monotonicity (order-preservation certificates),
oscillation (monotone-interval scanning), witness (exact interval-landing
construction), limitsets (limit-set estimation and classification), cli.
"""

__version__ = "0.1.0"

from .cones import Cone, OrderRelation, order_relation, positive_orthant, validate_cone
from .integrate import Direction, IntegratorOptions, Trajectory, integrate
from .monotonicity import (MonotonicityCertificate, certify_linear,
                           estimate_tstar_empirical, verify_order_preservation)
from .oscillation import (DiscreteOrbit, MonotoneInterval, OscillationVerdict,
                          discrete_scan, non_oscillation_verdict,
                          scan_monotone_intervals, steepen)
from .systems import SystemDef, eval_field, jacobian, parse_system
from .witness import (WitnessProblem, WitnessResult, brute_force_witness,
                      construct_witness)
from .limitsets import (LimitSetClass, LimitSetEstimate, SpectrumReport,
                        classify_limit_set, estimate_limit_set,
                        floquet_multipliers, non_ordering_check,
                        project_and_check, spectrum_at_equilibrium)

__all__ = [
    "Cone", "OrderRelation", "order_relation", "positive_orthant", "validate_cone",
    "Direction", "IntegratorOptions", "Trajectory", "integrate",
    "MonotonicityCertificate", "certify_linear", "estimate_tstar_empirical",
    "verify_order_preservation",
    "DiscreteOrbit", "MonotoneInterval", "OscillationVerdict", "discrete_scan",
    "non_oscillation_verdict", "scan_monotone_intervals", "steepen",
    "SystemDef", "eval_field", "jacobian", "parse_system",
    "WitnessProblem", "WitnessResult", "brute_force_witness", "construct_witness",
    "LimitSetClass", "LimitSetEstimate", "SpectrumReport", "classify_limit_set",
    "estimate_limit_set", "floquet_multipliers", "non_ordering_check",
    "project_and_check", "spectrum_at_equilibrium",
    "__version__",
]
