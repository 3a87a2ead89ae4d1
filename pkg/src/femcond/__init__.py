"""Conditioning of linear finite element stiffness matrices on anisotropic
simplicial meshes: assembly, exact extreme eigenvalues, a-priori bounds, and
experiment sweeps."""

from .assembly import (
    DensityFunction,
    DiffusionField,
    SparseSymmetric,
    assemble_mass_weighted,
    assemble_stiffness,
    average_diffusion,
    density_beta_weighted,
    density_equidistributed,
    jacobi_scale,
    read_matrix_market,
    write_matrix_market,
)
from .bounds import (
    AnisotropyMetrics,
    BoundReport,
    Calibration,
    bound_kappa,
    bound_kappa_prior,
    bound_kappa_sas_conjectured,
    bound_lambda_max,
    bound_lambda_min_A,
    bound_lambda_min_B,
    bound_lambda_min_SAS,
    bound_lambda_min_fried,
    bound_lambda_rho,
    build_report,
    calibrate,
    compute_beta,
    evaluate_raw_bounds,
)
from .mesh import (
    ElementGeometry,
    MeshMetrics,
    SimplicialMesh,
    compute_metrics,
    distance_to_boundary,
    element_d_k,
    export_mesh,
    generate_boundary_layer,
    generate_chebyshev_1d,
    generate_power2_1d,
    generate_uniform,
    import_mesh,
    max_aspect_ratio,
)
from .spectra import (
    SpectralResult,
    condition_report,
    extreme_eigenvalues,
    generalized_min_eigenvalue,
)

__version__ = "0.1.0"
