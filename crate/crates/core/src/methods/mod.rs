//! Ranking methods, preprocessing transformers and their composition.
//!
//! Deciders map a [`DecisionMatrix`] to a [`RankResult`]; transformers map a
//! matrix to a new matrix. Both must be pure: the audits evaluate them
//! concurrently on shared matrices and rely on equal inputs giving equal
//! outputs.

mod deciders;
mod pipeline;
mod tiebreak;
mod transformers;

use thiserror::Error;

use crate::model::{DecisionMatrix, ModelError};
use crate::ranking::{RankResult, RankingError};
use crate::scalar::Scalar;

pub use deciders::{topsis, weighted_sum, Topsis, WeightedSum};
pub use pipeline::Pipeline;
pub use tiebreak::{break_tie, PairOutcome, TieBreakPolicy};
pub use transformers::{
    filter_gt, filter_non_dominated, invert_minimize, sum_scaler_weights, vector_scaler_matrix,
    Stage,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MethodError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ranking(#[from] RankingError),
    #[error("criterion {0:?} is minimized; invert it before a weighted sum")]
    MinimizeNotInverted(String),
    #[error("criterion {0:?} has a zero Euclidean norm")]
    ZeroColumnNorm(String),
    #[error("alternative {0:?} has zero distance to both ideal and anti-ideal")]
    DegenerateIdeal(String),
    #[error("minimized criterion {criterion:?} is zero for alternative {alternative:?}")]
    ZeroInMinimizeColumn {
        criterion: String,
        alternative: String,
    },
    #[error("unknown criterion {0:?}")]
    UnknownCriterion(String),
    #[error("every alternative was filtered out")]
    AllFiltered,
    #[error("stage {index} ({name}): {source}")]
    Stage {
        index: usize,
        name: String,
        #[source]
        source: Box<MethodError>,
    },
    #[error("{0}")]
    Custom(String),
}

impl MethodError {
    /// True when the root cause is a filter that removed every alternative.
    pub fn is_all_filtered(&self) -> bool {
        match self {
            MethodError::AllFiltered => true,
            MethodError::Stage { source, .. } => source.is_all_filtered(),
            _ => false,
        }
    }
}

/// Evaluates a decision matrix into a ranking.
///
/// The output may cover fewer alternatives than the input (pipelines filter)
/// but never alternatives the input lacks.
pub trait Decider<T: Scalar>: Send + Sync {
    fn name(&self) -> String;

    fn evaluate(&self, dm: &DecisionMatrix<T>) -> Result<RankResult, MethodError>;
}

/// Maps a decision matrix to another decision matrix.
pub trait Transformer<T: Scalar>: Send + Sync {
    fn name(&self) -> String;

    fn transform(&self, dm: &DecisionMatrix<T>) -> Result<DecisionMatrix<T>, MethodError>;
}

impl<T: Scalar, D: Decider<T> + ?Sized> Decider<T> for &D {
    fn name(&self) -> String {
        (**self).name()
    }

    fn evaluate(&self, dm: &DecisionMatrix<T>) -> Result<RankResult, MethodError> {
        (**self).evaluate(dm)
    }
}

impl<T: Scalar, D: Decider<T> + ?Sized> Decider<T> for Box<D> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn evaluate(&self, dm: &DecisionMatrix<T>) -> Result<RankResult, MethodError> {
        (**self).evaluate(dm)
    }
}

impl<T: Scalar, X: Transformer<T> + ?Sized> Transformer<T> for Box<X> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn transform(&self, dm: &DecisionMatrix<T>) -> Result<DecisionMatrix<T>, MethodError> {
        (**self).transform(dm)
    }
}
