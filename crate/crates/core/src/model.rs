//! Decision problems: alternatives evaluated on weighted, directed criteria.
//!
//! A [`DecisionMatrix`] is an immutable value. Every operation that changes
//! it returns a new matrix, so a baseline survives any number of mutations.
//! Alternatives and criteria are addressed by name at the public surface.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    #[serde(rename = "max", alias = "maximize")]
    Maximize,
    #[serde(rename = "min", alias = "minimize")]
    Minimize,
}

impl Objective {
    /// Whether `a` is strictly better than `b` in this direction.
    pub fn better<T: Scalar>(self, a: T, b: T) -> bool {
        match self {
            Objective::Maximize => a > b,
            Objective::Minimize => a < b,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Objective::Maximize => Objective::Minimize,
            Objective::Minimize => Objective::Maximize,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Maximize => f.write_str("max"),
            Objective::Minimize => f.write_str("min"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("duplicate {kind} name {name:?}")]
    DuplicateName { kind: &'static str, name: String },
    #[error("empty {0} name")]
    EmptyName(&'static str),
    #[error("non-finite value at ({alternative}, {criterion})")]
    NonFiniteValue {
        alternative: String,
        criterion: String,
    },
    #[error("weight of criterion {criterion:?} must be positive and finite")]
    NonPositiveWeight { criterion: String },
    #[error("unknown alternative {0:?}")]
    UnknownAlternative(String),
    #[error("unknown criterion {0:?}")]
    UnknownCriterion(String),
    #[error("selection of alternatives is empty")]
    EmptySelection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMatrix<T> {
    alternatives: Vec<String>,
    criteria: Vec<String>,
    // row-major, alternatives x criteria
    values: Vec<T>,
    objectives: Vec<Objective>,
    weights: Vec<T>,
}

fn check_names(kind: &'static str, names: &[String]) -> Result<(), ModelError> {
    let mut seen = HashSet::with_capacity(names.len());
    for name in names {
        if name.is_empty() {
            return Err(ModelError::EmptyName(kind));
        }
        if !seen.insert(name.as_str()) {
            return Err(ModelError::DuplicateName {
                kind,
                name: name.clone(),
            });
        }
    }
    Ok(())
}

impl<T: Scalar> DecisionMatrix<T> {
    /// Validates and builds a matrix from per-alternative rows.
    pub fn new<A, C>(
        alternatives: impl IntoIterator<Item = A>,
        criteria: impl IntoIterator<Item = C>,
        rows: Vec<Vec<T>>,
        objectives: Vec<Objective>,
        weights: Vec<T>,
    ) -> Result<Self, ModelError>
    where
        A: Into<String>,
        C: Into<String>,
    {
        let alternatives: Vec<String> = alternatives.into_iter().map(Into::into).collect();
        let criteria: Vec<String> = criteria.into_iter().map(Into::into).collect();
        let m = criteria.len();
        if alternatives.is_empty() {
            return Err(ModelError::DimensionMismatch(
                "at least one alternative is required".into(),
            ));
        }
        if m == 0 {
            return Err(ModelError::DimensionMismatch(
                "at least one criterion is required".into(),
            ));
        }
        if rows.len() != alternatives.len() {
            return Err(ModelError::DimensionMismatch(format!(
                "{} alternatives but {} rows",
                alternatives.len(),
                rows.len()
            )));
        }
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(ModelError::DimensionMismatch(format!(
                "row {:?} has {} values, expected {}",
                alternatives[i],
                row.len(),
                m
            )));
        }
        if objectives.len() != m || weights.len() != m {
            return Err(ModelError::DimensionMismatch(format!(
                "{} criteria, {} objectives, {} weights",
                m,
                objectives.len(),
                weights.len()
            )));
        }
        Self::from_parts(
            alternatives,
            criteria,
            rows.into_iter().flatten().collect(),
            objectives,
            weights,
        )
    }

    fn from_parts(
        alternatives: Vec<String>,
        criteria: Vec<String>,
        values: Vec<T>,
        objectives: Vec<Objective>,
        weights: Vec<T>,
    ) -> Result<Self, ModelError> {
        check_names("alternative", &alternatives)?;
        check_names("criterion", &criteria)?;
        let m = criteria.len();
        debug_assert_eq!(values.len(), alternatives.len() * m);
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteValue {
                alternative: alternatives[k / m].clone(),
                criterion: criteria[k % m].clone(),
            });
        }
        if let Some(j) = weights
            .iter()
            .position(|w| !w.is_finite() || *w <= T::zero())
        {
            return Err(ModelError::NonPositiveWeight {
                criterion: criteria[j].clone(),
            });
        }
        Ok(Self {
            alternatives,
            criteria,
            values,
            objectives,
            weights,
        })
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn criteria(&self) -> &[String] {
        &self.criteria
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.objectives
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn n_alternatives(&self) -> usize {
        self.alternatives.len()
    }

    pub fn n_criteria(&self) -> usize {
        self.criteria.len()
    }

    pub fn value(&self, alternative: usize, criterion: usize) -> T {
        self.values[alternative * self.criteria.len() + criterion]
    }

    pub fn row(&self, alternative: usize) -> &[T] {
        let m = self.criteria.len();
        &self.values[alternative * m..(alternative + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.values.chunks(self.criteria.len())
    }

    pub fn column(&self, criterion: usize) -> impl Iterator<Item = T> + '_ {
        self.rows().map(move |r| r[criterion])
    }

    pub fn position(&self, alternative: &str) -> Option<usize> {
        self.alternatives.iter().position(|a| a == alternative)
    }

    pub fn criterion_position(&self, criterion: &str) -> Option<usize> {
        self.criteria.iter().position(|c| c == criterion)
    }

    pub fn row_by_name(&self, alternative: &str) -> Result<&[T], ModelError> {
        self.position(alternative)
            .map(|i| self.row(i))
            .ok_or_else(|| ModelError::UnknownAlternative(alternative.to_owned()))
    }

    /// Restricts the matrix to `keep`, preserving the original row order.
    pub fn sub_matrix<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self, ModelError> {
        if keep.is_empty() {
            return Err(ModelError::EmptySelection);
        }
        let mut selected = vec![false; self.alternatives.len()];
        for name in keep {
            let name = name.as_ref();
            let i = self
                .position(name)
                .ok_or_else(|| ModelError::UnknownAlternative(name.to_owned()))?;
            selected[i] = true;
        }
        let rows: Vec<usize> = (0..self.alternatives.len())
            .filter(|&i| selected[i])
            .collect();
        Ok(self.select_rows(&rows))
    }

    /// Keeps the rows at the given positions (must be valid and increasing).
    pub(crate) fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            alternatives: rows.iter().map(|&i| self.alternatives[i].clone()).collect(),
            criteria: self.criteria.clone(),
            values: rows
                .iter()
                .flat_map(|&i| self.row(i).iter().copied())
                .collect(),
            objectives: self.objectives.clone(),
            weights: self.weights.clone(),
        }
    }

    /// Returns a copy where only `alternative`'s row differs.
    pub fn replace_alternative(&self, alternative: &str, row: &[T]) -> Result<Self, ModelError> {
        let i = self
            .position(alternative)
            .ok_or_else(|| ModelError::UnknownAlternative(alternative.to_owned()))?;
        let m = self.criteria.len();
        if row.len() != m {
            return Err(ModelError::DimensionMismatch(format!(
                "replacement row has {} values, expected {}",
                row.len(),
                m
            )));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteValue {
                alternative: alternative.to_owned(),
                criterion: self.criteria[j].clone(),
            });
        }
        let mut out = self.clone();
        out.values[i * m..(i + 1) * m].copy_from_slice(row);
        Ok(out)
    }

    /// Copy with new weights, revalidated.
    pub fn with_weights(&self, weights: Vec<T>) -> Result<Self, ModelError> {
        if weights.len() != self.criteria.len() {
            return Err(ModelError::DimensionMismatch(format!(
                "{} weights for {} criteria",
                weights.len(),
                self.criteria.len()
            )));
        }
        Self::from_parts(
            self.alternatives.clone(),
            self.criteria.clone(),
            self.values.clone(),
            self.objectives.clone(),
            weights,
        )
    }

    /// Copy with `criterion`'s column and objective replaced, revalidated.
    pub fn with_column(
        &self,
        criterion: usize,
        column: &[T],
        objective: Objective,
    ) -> Result<Self, ModelError> {
        if column.len() != self.alternatives.len() {
            return Err(ModelError::DimensionMismatch(format!(
                "column has {} values for {} alternatives",
                column.len(),
                self.alternatives.len()
            )));
        }
        let m = self.criteria.len();
        let mut values = self.values.clone();
        for (i, v) in column.iter().enumerate() {
            values[i * m + criterion] = *v;
        }
        let mut objectives = self.objectives.clone();
        objectives[criterion] = objective;
        Self::from_parts(
            self.alternatives.clone(),
            self.criteria.clone(),
            values,
            objectives,
            self.weights.clone(),
        )
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Running fixture: three alternatives, two maximised criteria.
    pub(crate) fn m1() -> DecisionMatrix<f64> {
        DecisionMatrix::new(
            ["A", "B", "C"],
            ["c1", "c2"],
            vec![vec![10.0, 10.0], vec![8.0, 9.0], vec![5.0, 4.0]],
            vec![Objective::Maximize; 2],
            vec![0.6, 0.4],
        )
        .unwrap()
    }

    #[test]
    fn builds_m1_with_layout_preserved() {
        let dm = m1();
        assert_eq!(dm.alternatives(), ["A", "B", "C"]);
        assert_eq!(dm.criteria(), ["c1", "c2"]);
        assert_eq!(dm.row(1), [8.0, 9.0]);
        assert_eq!(dm.column(1).collect::<Vec<_>>(), vec![10.0, 9.0, 4.0]);
        assert_eq!(dm.weights(), [0.6, 0.4]);
    }

    #[test]
    fn rejects_duplicate_alternatives() {
        let err = DecisionMatrix::new(
            ["A", "A"],
            ["c1"],
            vec![vec![1.0], vec![2.0]],
            vec![Objective::Maximize],
            vec![1.0],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ModelError::DuplicateName {
                kind: "alternative",
                ..
            }
        ));
    }

    #[test]
    fn rejects_zero_weight() {
        let err = DecisionMatrix::new(
            ["A", "B"],
            ["c1", "c2"],
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            vec![Objective::Maximize; 2],
            vec![0.6, 0.0],
        )
        .unwrap_err();
        assert_eq!(
            err,
            ModelError::NonPositiveWeight {
                criterion: "c2".into()
            }
        );
    }

    #[test]
    fn rejects_non_finite_and_bad_dimensions() {
        let err = DecisionMatrix::new(
            ["A"],
            ["c1"],
            vec![vec![f64::NAN]],
            vec![Objective::Maximize],
            vec![1.0],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::NonFiniteValue { .. }));

        let err = DecisionMatrix::new(
            ["A", "B"],
            ["c1"],
            vec![vec![1.0]],
            vec![Objective::Maximize],
            vec![1.0],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::DimensionMismatch(_)));

        let err = DecisionMatrix::new(
            ["A"],
            ["c1", "c2"],
            vec![vec![1.0, 2.0]],
            vec![Objective::Maximize],
            vec![1.0, 1.0],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::DimensionMismatch(_)));
    }

    #[test]
    fn sub_matrix_projects_in_original_order() {
        let dm = m1();
        let sub = dm.sub_matrix(&["C", "A"]).unwrap();
        assert_eq!(sub.alternatives(), ["A", "C"]);
        assert_eq!(sub.row(1), [5.0, 4.0]);
        assert_eq!(sub.weights(), dm.weights());

        assert_eq!(dm.sub_matrix(&["A", "B", "C"]).unwrap(), dm);
        assert_eq!(
            dm.sub_matrix(&["X"]).unwrap_err(),
            ModelError::UnknownAlternative("X".into())
        );
        assert_eq!(
            dm.sub_matrix::<&str>(&[]).unwrap_err(),
            ModelError::EmptySelection
        );
    }

    #[test]
    fn replace_alternative_has_value_semantics() {
        let dm = m1();
        let replaced = dm.replace_alternative("B", &[7.5, 8.0]).unwrap();
        assert_eq!(replaced.row(1), [7.5, 8.0]);
        assert_eq!(replaced.row(0), dm.row(0));
        assert_eq!(dm.row(1), [8.0, 9.0]);

        assert_eq!(dm.replace_alternative("B", &[8.0, 9.0]).unwrap(), dm);
        assert_eq!(
            dm.replace_alternative("Z", &[1.0, 1.0]).unwrap_err(),
            ModelError::UnknownAlternative("Z".into())
        );
        assert!(matches!(
            dm.replace_alternative("B", &[1.0, f64::INFINITY]),
            Err(ModelError::NonFiniteValue { .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix() -> impl Strategy<Value = DecisionMatrix<f64>> {
            (1usize..7, 1usize..4).prop_flat_map(|(n, m)| {
                proptest::collection::vec(proptest::collection::vec(-50.0..50.0f64, m), n).prop_map(
                    move |rows| {
                        DecisionMatrix::new(
                            (0..n).map(|i| format!("a{i}")),
                            (0..m).map(|j| format!("c{j}")),
                            rows,
                            vec![Objective::Maximize; m],
                            vec![1.0; m],
                        )
                        .unwrap()
                    },
                )
            })
        }

        proptest! {
            #[test]
            fn sub_matrix_idempotent_and_order_preserving(
                dm in matrix(),
                mask in proptest::collection::vec(any::<bool>(), 7),
            ) {
                let keep: Vec<String> = dm
                    .alternatives()
                    .iter()
                    .zip(&mask)
                    .filter(|(_, k)| **k)
                    .map(|(a, _)| a.clone())
                    .rev()
                    .collect();
                prop_assume!(!keep.is_empty());
                let once = dm.sub_matrix(&keep).unwrap();
                let twice = once.sub_matrix(&keep).unwrap();
                prop_assert_eq!(&once, &twice);
                let positions: Vec<usize> = once
                    .alternatives()
                    .iter()
                    .map(|a| dm.position(a).unwrap())
                    .collect();
                prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
            }

            #[test]
            fn replace_then_restore_is_identity(
                dm in matrix(),
                idx in 0usize..7,
                delta in -5.0..5.0f64,
            ) {
                let name = dm.alternatives()[idx % dm.n_alternatives()].clone();
                let original: Vec<f64> = dm.row_by_name(&name).unwrap().to_vec();
                let changed: Vec<f64> = original.iter().map(|v| v + delta).collect();
                let restored = dm
                    .replace_alternative(&name, &changed)
                    .unwrap()
                    .replace_alternative(&name, &original)
                    .unwrap();
                prop_assert_eq!(restored, dm);
            }
        }
    }
}
