from .vandermonde import (
    ExtensionRecipe,
    ThetaProfile,
    VandermondeError,
    default_theta,
    fd_weights,
    vandermonde_coefficients,
    vandermonde_inverse,
    vandermonde_residual,
)
from .kernel import (
    KernelProfile,
    default_profile,
    holder_cone_kernel,
    homogeneous_kernel,
    raw_phi,
    sobolev_kernel,
    sphere_integral,
)
from .extension import (
    ExtensionError,
    bump_mollifier,
    layer_extension_besov,
    layer_extension_top,
    mollify,
    normal_traces,
    random_boundary_data,
    superpose_extension,
    verify_extension,
)
