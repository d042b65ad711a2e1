from .grid import GridError, GridField, sample_field
from .fd import CENTRAL, ONE_SIDED, apply_operator_fd, apply_terms_fd, derivative_norm_fd
from .norms import lp_norm
from .besov import BesovResult, besov_seminorm, besov_seminorm_detailed, finite_difference_delta
from .curve import ExperimentCurve, Fit
from .counterexample import (
    CounterexampleError,
    CounterexampleFamily,
    HolomorphicProfile,
    LogPowerForm,
    SOBOLEV,
    TRACE,
    ProductField,
    counterexample_field,
    family_for,
    frame_matrix,
    rotate_operator,
)
from .experiments import (
    DEFAULT_EPS,
    ExperimentError,
    kernel_decay_check,
    null_field_fd_check,
    random_bump_fields,
    sobolev_ratio_experiment,
    standard_bump,
    trace_blowup_experiment,
    truncation_experiment,
    verify_representation,
)
