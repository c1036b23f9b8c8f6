//! Exact computation of prolonged infinitesimals of one-parameter group
//! actions on the multispace of plane curves `u = u(x)`.
//!
//! Modules, bottom up:
//!
//! * [`scalar`] and [`expr`]: exact rationals and a small symbolic kernel.
//! * [`lattice`]: lattices, Vandermonde determinants, divided differences.
//! * [`deltaop`]: the discrete derivative `Δ/Δx` and shift `S`.
//! * [`jetoracle`]: classical jet-space prolongation, three ways.
//! * [`multiprolong`]: multispace infinitesimals by determinants, by
//!   recursion, and from finite actions.
//! * [`coalesce`]: limits as the lattice points merge.
//! * [`verify`]: randomized verification suites.

pub mod closed_forms;
pub mod coalesce;
pub mod deltaop;
pub mod exec;
pub mod expr;
pub mod jetoracle;
pub mod lattice;
pub mod linalg;
pub mod multiprolong;
pub mod random;
pub mod scalar;
pub mod unipoly;
pub mod verify;

pub use coalesce::{CoalesceError, CoalescenceReport, CoalescenceSchedule, LimitEstimate};
pub use deltaop::{DeltaError, IdentityCheck, WindowFunction};
pub use exec::Execution;
pub use expr::{parse, Expr, JetVariableFamily};
pub use jetoracle::{JetOracleError, ProlongedVectorField, VectorField};
pub use lattice::{
    ConfluentSamples, DividedDifferenceTableau, Lattice, LatticeError, MultispaceJet, PointedCurveSamples,
};
pub use multiprolong::{Method, OneParamAction, ProlongError, ProlongationResult};
pub use scalar::ExactScalar;
