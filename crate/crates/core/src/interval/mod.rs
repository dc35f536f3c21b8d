//! A nonatomic model: piecewise-polynomial functions on `[0, 1]` with
//! supports taken modulo null sets, and finite-rank integral operators.

pub mod frop;
pub mod poly;
pub mod region;

pub use frop::{
    frop_apply, frop_image_subspace, frop_is_sbp, frop_is_scp, frop_range_supports, frop_range_supports_detailed,
    half_interval_example, linear_projection_example, region_closures, CoefficientSubspace, FiniteRankOp,
    IntervalVerdict, IntervalWitness, RangeSupport, RegionClosures, Term,
};
pub use poly::{integrate, Piece, PiecewisePoly, MAX_DEGREE, MAX_PIECES};
pub use region::{pp_band_contains, pp_disjoint, pp_support, IntervalRegion};
