"""Edge differentially private principal components of graphs.

Library surface:

- :mod:`privpc.graph`: immutable CSR graphs, edge-list IO, subset densities.
- :mod:`privpc.spectral`: top-two eigenpairs and sensitivity statistics.
- :mod:`privpc.noise`: seeded inverse-CDF noise samplers.
- :mod:`privpc.ptr`: the propose-test-release mechanism.
- :mod:`privpc.ppm`: the private power method baseline.
- :mod:`privpc.subsets`: top-k eigenscore and densest-k-subgraph extraction.
- :mod:`privpc.estimators`: scikit-learn style wrappers.
- ``privpc`` CLI: experiments, benchmarks, and reports.
"""

from .estimators import (
    GaussianEigenvector,
    NonprivateEigenvector,
    PowerMethodEigenvector,
    PtrEigenvector,
    as_graph,
)
from .graph import Graph, GraphFormatError, edge_density, induced_edge_count, load_edge_list, loads_edge_list
from .noise import RngStream, TblParams, sample_gaussian, sample_laplace, sample_tbl, tbl_delta0
from .ppm import PpmConfig, ppm_sigma, run_ppm
from .ptr import (
    PtrConfig,
    PtrOutcome,
    beta_bounds,
    check_parameter_condition,
    compute_beta,
    compute_phi,
    gs_phi,
    run_ptr,
    success_probability_lower_bound,
)
from .spectral import (
    GAP_THRESHOLD,
    ConvergenceError,
    SpectralSummary,
    local_sensitivity_bound,
    smooth_sensitivity_diagnostic,
    theta_bound,
    top_two_eigenpairs,
)
from .subsets import SubsetResult, dks_extract, dks_upper_bound, jaccard, top_k_abs_subset

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "GraphFormatError",
    "load_edge_list",
    "loads_edge_list",
    "edge_density",
    "induced_edge_count",
    "SpectralSummary",
    "ConvergenceError",
    "top_two_eigenpairs",
    "local_sensitivity_bound",
    "theta_bound",
    "smooth_sensitivity_diagnostic",
    "GAP_THRESHOLD",
    "RngStream",
    "TblParams",
    "sample_laplace",
    "sample_gaussian",
    "sample_tbl",
    "tbl_delta0",
    "PtrConfig",
    "PtrOutcome",
    "gs_phi",
    "beta_bounds",
    "compute_beta",
    "check_parameter_condition",
    "compute_phi",
    "success_probability_lower_bound",
    "run_ptr",
    "PpmConfig",
    "ppm_sigma",
    "run_ppm",
    "SubsetResult",
    "top_k_abs_subset",
    "dks_extract",
    "dks_upper_bound",
    "jaccard",
    "NonprivateEigenvector",
    "GaussianEigenvector",
    "PowerMethodEigenvector",
    "PtrEigenvector",
    "as_graph",
    "__version__",
]
