//! Stable and popular half-matchings in roommates markets.
//!
//! The crate models a roommates instance as a multigraph whose vertices
//! value their incident edges, and provides:
//!
//! * matchings, stability predicates and the bipartite double cover;
//! * a stable-partition engine for strict multigraphs, with brute-force oracles;
//! * the edge-copy reductions that turn approximation and popularity problems
//!   into a single stable-partition computation;
//! * end-to-end solvers, including LP duals for maximum-weight matchings;
//! * exact popularity checks (votes, pairings, Δ minimisation).
//!
//! All algorithms are generic over a [`Scalar`] field. [`Rational`] is the
//! default and is exact.

pub mod cover;
pub mod engine;
pub mod fixtures;
pub mod instance;
pub mod lp;
pub mod matching;
pub mod popcheck;
pub mod reductions;
pub mod scalar;
pub mod solvers;
pub mod stability;

pub use cover::DoubleCover;
pub use engine::{
    brute_force_max_stable, enumerate_half_matchings, stable_half_matching, EngineError,
    StablePartitionCert, StrictInstance,
};
pub use instance::{Edge, EdgeId, Instance, InstanceError, RawInstance, Thresholds, VertexId};
pub use matching::{
    assigned_value, matching_stats, FractionalMatching, HalfComponent, HalfMatching,
    MatchingError, MatchingStats,
};
pub use popcheck::{
    delta_feasible, delta_feasible_value, delta_product, delta_sensible, is_popular, is_popular_among,
    is_popular_critical, is_popular_mixed, is_popular_sampled, min_cost_transport, vote, Counterexample,
    DeltaResult, PairEntry, Pairing, PairingKind, PopError, Scope, Transport, TransportError, Verdict,
};
pub use reductions::{
    build_crit_reduction, build_gamma_reduction, build_pri_reduction, build_srti_reduction, CopyKind,
    Construction, DerivedInstance, ReductionError,
};
pub use scalar::Scalar;
pub use solvers::{
    critical_feasible, max_weight_dual, solve_max_gamma, solve_max_pri, solve_max_srti, solve_pop_crit, solve_pop_maxw, weighted_size, DualSolution,
    SolveError,
};
pub use stability::{blocking_edges, is_stable, BlockingMode, StabilityError};

/// Arbitrary-precision rational; the default scalar.
pub type Rational = num_rational::BigRational;
/// Rational over `i64`; faster, exact as long as nothing overflows.
pub type Rational64 = num_rational::Rational64;
