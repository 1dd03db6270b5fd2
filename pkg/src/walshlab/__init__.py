"""Walsh time-frequency laboratory: transforms, phase-plane model sums,
density and Calderón-Zygmund decompositions, weak-L^p experiments."""

from .decomposition import (
    CZCertificate,
    CZResult,
    DensityDecomposition,
    InvariantError,
    PreconditionError,
    coefficient_defect,
    cz_norm_certificate,
    density_decomposition,
    good_tiles,
    multi_frequency_cz,
    single_forest_pairing,
    subspace_norm_constant,
    tree_estimate_check,
)
from .dyadic import (
    FREQUENCY,
    TIME,
    Bitile,
    BitileCollection,
    ConvexityError,
    DyadicInterval,
    ResolutionError,
    Tile,
    convex_hull,
    fefferman_leq,
    is_convex,
    maximal_dyadic_intervals,
)
from .lacunary import LacunarySequence, fourier_coefficients, lacunary_norm_scan, make_lacunary, zygmund_ratio
from .maximal import (
    NormReport,
    dual_exponent,
    dyadic_maximal,
    exceptional_set,
    lp_norm,
    martingale_maximal,
    norm_report,
    weak_lp_norm,
)
from .model import Forest, Tree, dense, dense_value, density_of, model_sum, size, tree_partition
from .walsh import (
    argmax_choice,
    carleson_max,
    fwht,
    inverse_fwht,
    lacunary_max,
    pairing,
    partial_sum,
    walsh_character,
    wave_packet,
)

__version__ = "0.1.0"
