use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{MethodError, Transformer};
use crate::model::{DecisionMatrix, Objective};
use crate::scalar::Scalar;

/// Replaces every minimized column by its reciprocal and flips it to
/// maximized.
pub fn invert_minimize<T: Scalar>(
    dm: &DecisionMatrix<T>,
) -> Result<DecisionMatrix<T>, MethodError> {
    let mut out = dm.clone();
    for (j, obj) in dm.objectives().iter().enumerate() {
        if *obj != Objective::Minimize {
            continue;
        }
        let mut col = Vec::with_capacity(dm.n_alternatives());
        for (i, v) in dm.column(j).enumerate() {
            if v == T::zero() {
                return Err(MethodError::ZeroInMinimizeColumn {
                    criterion: dm.criteria()[j].clone(),
                    alternative: dm.alternatives()[i].clone(),
                });
            }
            col.push(v.recip());
        }
        out = out.with_column(j, &col, Objective::Maximize)?;
    }
    Ok(out)
}

/// Satisficing filter: keeps alternatives strictly above every threshold.
pub fn filter_gt<T: Scalar>(
    dm: &DecisionMatrix<T>,
    thresholds: &BTreeMap<String, T>,
) -> Result<DecisionMatrix<T>, MethodError> {
    let mut checks = Vec::with_capacity(thresholds.len());
    for (crit, limit) in thresholds {
        let j = dm
            .criterion_position(crit)
            .ok_or_else(|| MethodError::UnknownCriterion(crit.clone()))?;
        checks.push((j, *limit));
    }
    let keep: Vec<usize> = (0..dm.n_alternatives())
        .filter(|&i| checks.iter().all(|&(j, limit)| dm.value(i, j) > limit))
        .collect();
    if keep.is_empty() {
        return Err(MethodError::AllFiltered);
    }
    Ok(dm.select_rows(&keep))
}

fn dominates<T: Scalar>(dm: &DecisionMatrix<T>, x: usize, y: usize) -> bool {
    let mut strict = false;
    for (j, obj) in dm.objectives().iter().enumerate() {
        let (a, b) = (dm.value(x, j), dm.value(y, j));
        if obj.better(b, a) {
            return false;
        }
        strict |= obj.better(a, b);
    }
    strict
}

/// Removes every Pareto-dominated alternative.
pub fn filter_non_dominated<T: Scalar>(
    dm: &DecisionMatrix<T>,
) -> Result<DecisionMatrix<T>, MethodError> {
    let n = dm.n_alternatives();
    let keep: Vec<usize> = (0..n)
        .filter(|&i| !(0..n).any(|k| k != i && dominates(dm, k, i)))
        .collect();
    Ok(dm.select_rows(&keep))
}

pub fn sum_scaler_weights<T: Scalar>(
    dm: &DecisionMatrix<T>,
) -> Result<DecisionMatrix<T>, MethodError> {
    let total: T = dm.weights().iter().copied().sum();
    Ok(dm.with_weights(dm.weights().iter().map(|w| *w / total).collect())?)
}

/// Divides each column by its Euclidean norm.
pub fn vector_scaler_matrix<T: Scalar>(
    dm: &DecisionMatrix<T>,
) -> Result<DecisionMatrix<T>, MethodError> {
    let mut out = dm.clone();
    for j in 0..dm.n_criteria() {
        let norm = dm.column(j).map(|v| v * v).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(MethodError::ZeroColumnNorm(dm.criteria()[j].clone()));
        }
        let col: Vec<T> = dm.column(j).map(|v| v / norm).collect();
        out = out.with_column(j, &col, dm.objectives()[j])?;
    }
    Ok(out)
}

/// The fixed transformer vocabulary available to declarative pipelines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Stage<T> {
    InvertMinimize,
    FilterGt { thresholds: BTreeMap<String, T> },
    FilterNonDominated,
    SumScaler,
    VectorScaler,
}

impl<T> Stage<T> {
    pub const NAMES: [&'static str; 5] = [
        "invert_minimize",
        "filter_gt",
        "filter_non_dominated",
        "sum_scaler",
        "vector_scaler",
    ];

    pub fn stage_name(&self) -> &'static str {
        match self {
            Stage::InvertMinimize => Self::NAMES[0],
            Stage::FilterGt { .. } => Self::NAMES[1],
            Stage::FilterNonDominated => Self::NAMES[2],
            Stage::SumScaler => Self::NAMES[3],
            Stage::VectorScaler => Self::NAMES[4],
        }
    }
}

impl<T: Scalar> Transformer<T> for Stage<T> {
    fn name(&self) -> String {
        self.stage_name().to_owned()
    }

    fn transform(&self, dm: &DecisionMatrix<T>) -> Result<DecisionMatrix<T>, MethodError> {
        match self {
            Stage::InvertMinimize => invert_minimize(dm),
            Stage::FilterGt { thresholds } => filter_gt(dm, thresholds),
            Stage::FilterNonDominated => filter_non_dominated(dm),
            Stage::SumScaler => sum_scaler_weights(dm),
            Stage::VectorScaler => vector_scaler_matrix(dm),
        }
    }
}
