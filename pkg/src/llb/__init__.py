"""Exact Betti numbers of finite covers, heat-trace estimates of L2-Betti numbers,
local statistics of graphs and heat kernels on hyperbolic surfaces."""

from .complex import (
    BettiVector,
    IntegerSparseMatrix,
    SimplicialComplex,
    betti_number,
    betti_numbers,
    boundary_matrix,
    hodge_laplacian,
    validate_complex,
)
from .covers import (
    CoverTower,
    PermutationRep,
    cover_from_permutations,
    free_subgroup_chain_tower,
    normal_chain_tower,
)
from .hyperbolic import (
    HyperbolicSurface,
    compact_dual_l2_betti,
    fit_gaussian_constant,
    genus_limit_check,
    h2_heat_kernel,
    orbit_enumerate,
    surface_heat_diagonal,
)
from .io import VERSION as __version__
from .io import emit_report, parse_inputs
from .kernels import BACKEND
from .local import ball_census, injectivity_radius_profile, thin_part_fraction, tv_distance
from .lueck import (
    heat_trace_exact,
    heat_trace_stochastic,
    l2_betti_plateau,
    normalized_betti_sequence,
)
