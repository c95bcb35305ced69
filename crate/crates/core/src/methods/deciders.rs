use serde_json::Value;

use super::{Decider, MethodError};
use crate::model::{DecisionMatrix, Objective};
use crate::ranking::RankResult;
use crate::scalar::Scalar;

fn scores_value<T: Scalar>(dm: &DecisionMatrix<T>, scores: &[T]) -> Value {
    Value::Object(
        dm.alternatives()
            .iter()
            .zip(scores)
            .map(|(a, s)| (a.clone(), Value::from(s.to_f64_lossy())))
            .collect(),
    )
}

/// Score `Σ w·v` per alternative; every criterion must be maximized.
pub fn weighted_sum<T: Scalar>(dm: &DecisionMatrix<T>) -> Result<RankResult, MethodError> {
    if let Some(j) = dm
        .objectives()
        .iter()
        .position(|o| *o == Objective::Minimize)
    {
        return Err(MethodError::MinimizeNotInverted(dm.criteria()[j].clone()));
    }
    let scores: Vec<T> = dm
        .rows()
        .map(|row| row.iter().zip(dm.weights()).map(|(v, w)| *v * *w).sum())
        .collect();
    let mut rank = RankResult::from_scores("WeightedSum", dm.alternatives().to_vec(), &scores)?;
    rank.extra_mut()
        .insert("weighted_sum.scores", scores_value(dm, &scores))?;
    Ok(rank)
}

/// TOPSIS with internal vector normalization; ranks by closeness to the
/// ideal solution.
pub fn topsis<T: Scalar>(dm: &DecisionMatrix<T>) -> Result<RankResult, MethodError> {
    let m = dm.n_criteria();
    let mut weighted: Vec<Vec<T>> = dm.rows().map(|r| r.to_vec()).collect();
    for j in 0..m {
        let norm = dm.column(j).map(|v| v * v).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(MethodError::ZeroColumnNorm(dm.criteria()[j].clone()));
        }
        let w = dm.weights()[j];
        for row in weighted.iter_mut() {
            row[j] = row[j] / norm * w;
        }
    }

    let mut ideal = vec![T::zero(); m];
    let mut anti = vec![T::zero(); m];
    for j in 0..m {
        let col = weighted.iter().map(|r| r[j]);
        let (lo, hi) = col.fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        (ideal[j], anti[j]) = match dm.objectives()[j] {
            Objective::Maximize => (hi, lo),
            Objective::Minimize => (lo, hi),
        };
    }

    let dist = |row: &[T], target: &[T]| {
        row.iter()
            .zip(target)
            .map(|(a, b)| (*a - *b).powi(2))
            .sum::<T>()
            .sqrt()
    };
    let mut closeness = Vec::with_capacity(weighted.len());
    for (i, row) in weighted.iter().enumerate() {
        let d_plus = dist(row, &ideal);
        let d_minus = dist(row, &anti);
        let denom = d_plus + d_minus;
        if denom == T::zero() {
            if d_plus == T::zero() {
                closeness.push(T::one());
            } else {
                return Err(MethodError::DegenerateIdeal(dm.alternatives()[i].clone()));
            }
        } else {
            closeness.push(d_minus / denom);
        }
    }

    let mut rank = RankResult::from_scores("TOPSIS", dm.alternatives().to_vec(), &closeness)?;
    rank.extra_mut()
        .insert("topsis.similarity", scores_value(dm, &closeness))?;
    Ok(rank)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WeightedSum;

impl<T: Scalar> Decider<T> for WeightedSum {
    fn name(&self) -> String {
        "weighted_sum".into()
    }

    fn evaluate(&self, dm: &DecisionMatrix<T>) -> Result<RankResult, MethodError> {
        weighted_sum(dm)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Topsis;

impl<T: Scalar> Decider<T> for Topsis {
    fn name(&self) -> String {
        "topsis".into()
    }

    fn evaluate(&self, dm: &DecisionMatrix<T>) -> Result<RankResult, MethodError> {
        topsis(dm)
    }
}
