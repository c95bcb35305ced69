//! Multi-criteria decision analysis with rank-reversal auditing.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: decision matrices, objectives and weights.
//! - [`ranking`]: tie-aware rankings, metadata and ranking comparators.
//! - [`methods`]: deciders (weighted sum, TOPSIS), transformers, pipelines
//!   and the hierarchical tie-breaker.
//! - [`rank_invariant`]: controlled degradation of suboptimal alternatives
//!   (RRT1) with graceful handling of filtered alternatives.
//! - [`transitivity`]: pairwise dominance graphs, 3-cycle detection (RRT2),
//!   cycle breaking and ranking recomposition (RRT3).
//!
//! All numeric code is generic over [`Scalar`]; the `*64` / `*32` aliases
//! below fix the scalar type for the common cases.

pub mod methods;
pub mod model;
pub mod rank_invariant;
pub mod ranking;
pub mod scalar;
pub mod transitivity;

pub use methods::{
    break_tie, Decider, MethodError, PairOutcome, Pipeline, Stage, TieBreakPolicy, Topsis,
    Transformer, WeightedSum,
};
pub use model::{DecisionMatrix, ModelError, Objective};
pub use rank_invariant::{Aggregator, MutationRecord, Rrt1Config, Rrt1Error, Rrt1Verdict};
pub use ranking::{Correlation, Extra, RankResult, RankTable, RankingError, RanksComparator};
pub use scalar::Scalar;
pub use transitivity::{
    CycleResolution, CycleStrategy, DominanceGraph, Rrt2Result, Rrt3Report, TransitivityError,
    TransitivityReport,
};

pub type DecisionMatrix64 = DecisionMatrix<f64>;
pub type DecisionMatrix32 = DecisionMatrix<f32>;
pub type Pipeline64 = Pipeline<f64>;
pub type Pipeline32 = Pipeline<f32>;
pub type TieBreakPolicy64 = TieBreakPolicy<f64>;
pub type Stage64 = Stage<f64>;
pub type MutationRecord64 = MutationRecord<f64>;
