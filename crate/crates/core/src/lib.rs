//! Generalized inverses of complex matrices centred on the W-weighted
//! m-weak group MP inverse, together with the constrained least-squares and
//! matrix-equation solvers built on it.

pub mod classical;
pub mod error;
pub mod linalg;
pub mod solvers;
pub mod testgen;
pub mod tolerance;
pub mod weighted;
pub mod wmwgmp;

pub use error::{GinvError, Result};
pub use linalg::{ComplexMatrix, C64};
pub use tolerance::ToleranceConfig;
pub use weighted::{make_weighted_pair, WeightedPair};
pub use wmwgmp::{wmwgmp, wmwgmp_route, RouteId};
pub use solvers::{
    build_bordering_e, cramer_solve, general_solution, solve_constrained_wg,
    solve_constrained_wmwgmp, BorderingData, ConstrainedSolveResult, CramerRhs,
};
pub use testgen::{generate_nilpotent, generate_pair, GeneratedPair, PairSpec};
