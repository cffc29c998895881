"""Hermite expansions, Hermite multipliers and their norms."""
from .errors import CutoffError, GridMismatchError, HermiteError, SizingError, SymbolError
from .hermite_core import (GridFunction, GridSpec, HermiteBasis, build_basis, eigenvalue,
                           eval_hermite, gauss_hermite_rule, hermite_function, hermite_functions,
                           hermite_lp_norm, hermite_lp_norms, lp_norm, sample)
from .hnorms import HormanderReport, block_sobolev_norm, hormander_norm
from .operators import (OperatorSpec, apply, apply_multilinear, band_limit, spectral_projection,
                        square_function)
from .opnorms import (NormEstimate, band_opnorm, compactness_profile, l2_opnorm, lp_opnorm_lower,
                      operator_matrix, projection_opnorm_lower)
from .report import emit_report
from .symbols import (LPPartition, Symbol, condition_report, forward_difference, load_symbol_table,
                      make_cutoff, make_lp_partition, make_symbol, multilinear_separable,
                      parse_symbol, pseudo_symbol, separable_symbol, tabulated_symbol)
from .thresholds import delta, gamma, s_threshold
from .transform import SpectralCoeffs, continuous_ft, forward_fht, inverse_fht, plancherel_defect

