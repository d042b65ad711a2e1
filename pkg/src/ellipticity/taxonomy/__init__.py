from .bnb import branch_and_bound, sigma_min_batch, sigma_min_lower_bound
from .checks import (
    DEFAULT_BUDGETS,
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    Budgets,
    Certificate,
    Verdict,
    boundary_radius_bound,
    check_boundary_ellipticity,
    check_C_ellipticity,
    check_cancellation,
    check_real_ellipticity,
    direction_schedule,
    normalize_complex_direction,
    rational_sphere_points,
    with_budget,
)
from .witness import Witness, normalized_residual, refine_witness, verify_witness
from .report import N1_NOTE, TaxonomyReport, canonical_json, chain_violations, classify
