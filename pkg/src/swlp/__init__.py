"""Pseudo-spectral shallow-water simulator with dyadic-analysis tooling."""

from .besov import (
    BesovSpec,
    HybridBesovSpec,
    active_levels,
    besov_minus1_infty,
    besov_norm,
    block_norms,
    heat_characterization_ratio,
    hybrid_besov_norm,
    lp_norm,
    time_besov_norm,
    time_hybrid_besov_norm,
)
from .dyadic import (
    ANNULUS_HI,
    ANNULUS_LO,
    DyadicFilter,
    build_dyadic_filter,
    cover_range,
    default_filter,
    dyadic_block,
    freq_split,
    low_sum,
)
from .grid import (
    Grid,
    SpectralField,
    curl_norm,
    dealias,
    dealias_mask,
    dilate,
    div,
    dump_field,
    grad,
    helmholtz_split,
    inverse_transform,
    laplacian,
    load_field,
    make_grid,
    mult,
    sym_grad,
    transform,
)
from .paraproduct import (
    bony_parts,
    composition_ratio,
    hybrid_para_ratio,
    para,
    product_law_ratio,
    remainder,
)
from .quasi import (
    FrictionReport,
    HeatState,
    advance,
    friction_exact_residual,
    gaussian_bump,
    heat_estimate_ratio,
    heat_evolve,
    kernel_decay_fit,
    kernel_rate,
    log_density,
    max_principle_check,
    quasi_residual,
    velocity_from_density,
)
from .solver import (
    BlowupError,
    CflError,
    RhsTerms,
    SimState,
    SolverConfig,
    assemble_rhs,
    cfl_number,
    ft_norm,
    ft_norm_single,
    ft_specs,
    gronwall_integrand,
    full_residual,
    gronwall_exponent,
    initial_state,
    mass_drift,
    random_band_field,
    recompose,
    scaling_check,
    step,
)

__version__ = "0.1.0"
