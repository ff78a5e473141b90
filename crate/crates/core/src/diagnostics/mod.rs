//! Inclusion and equality tests for `H(B)`, and independent norm oracles.

mod hardy;
mod inclusion;
mod oracles;

pub use hardy::{equals_hardy_report, EqualsHardyReport, HardyVerdict, SupCheck, SUP_MARGIN};
pub use inclusion::{
    combine, inclusion_report, Criterion, InclusionParams, InclusionReport, Verdict,
    BOUNDED_GROWTH, DIVERGENT_RATIO, INTEGRABLE_EXPONENT, NEGLIGIBLE_TAIL, NONINTEGRABLE_EXPONENT,
    SUMMABLE_RATIO, UNBOUNDED_GROWTH, ZERO_DEPTH,
};
pub use oracles::{
    gram_oracle_norm, radial_angular_lattice, toeplitz_defect_converged, toeplitz_defect_oracle,
    DefectEstimate, DefectTrace, GramEstimate, DEFECT_EIGEN_CUTOFF, DOUBLING_CAP, DOUBLING_TOL,
    GRAM_CONDITION_CAP,
};
