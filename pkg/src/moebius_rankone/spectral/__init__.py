from .criteria import (
    DkbszBound,
    KlemesRow,
    PeyriereReport,
    ResidueReport,
    SubsequencePlan,
    dilation_pair_diagnostics,
    divergence_residue,
    dkbsz_bound,
    klemes_reinhold_check,
    mj_sequence,
    peyriere_diagnostics,
    plan_product,
)
from .measures import (
    Dilated,
    GridDensity,
    Pushed,
    SparseSpectrum,
    ThouvenotVerdict,
    average_translates,
    coefficient_budget,
    density_from_spectrum,
    empirical_spectral_density,
    hellinger,
    hellinger_atomic,
    mutually_singular,
    power_pushforward,
    pseudo_dilate,
    rotate,
    sparse_product,
    thouvenot_check,
)
from .riesz import (
    RieszFactor,
    RieszProduct,
    evaluate_density,
    factor_square_coeffs,
    product_coeffs,
    riesz_factor,
    riesz_factors,
)
