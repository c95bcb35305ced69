//! Tie-aware rankings and comparators over a shared alternative universe.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RankingError {
    #[error("ranking has {alternatives} alternatives but {values} rank values")]
    LengthMismatch { alternatives: usize, values: usize },
    #[error("ranking is empty")]
    Empty,
    #[error("duplicate alternative {0:?} in ranking")]
    DuplicateAlternative(String),
    #[error("rank values are not dense starting at 1: {0:?}")]
    NotDense(Vec<usize>),
    #[error("metadata key {0:?} already set")]
    ExtraKeyExists(String),
    #[error("duplicate comparator label {0:?}")]
    DuplicateLabel(String),
    #[error("ranking {label:?} covers a different alternative set than {first:?}")]
    AlternativeMismatch { label: String, first: String },
    #[error("at least {needed} rankings are required, got {got}")]
    TooFewEntries { needed: usize, got: usize },
}

/// String-keyed metadata carried alongside a ranking.
///
/// Keys are write-once: [`Extra::insert`] refuses to overwrite.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Extra(Map<String, Value>);

impl Extra {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, value: Value) -> Result<(), RankingError> {
        let key = key.into();
        if self.0.contains_key(&key) {
            return Err(RankingError::ExtraKeyExists(key));
        }
        self.0.insert(key, value);
        Ok(())
    }

    /// Serializes `value` and inserts it under `key`.
    pub fn insert_serialized<S: Serialize>(
        &mut self,
        key: impl Into<String>,
        value: &S,
    ) -> Result<(), RankingError> {
        // Our metadata types are plain data; serialization cannot fail.
        let value = serde_json::to_value(value).expect("metadata serializes to JSON");
        self.insert(key, value)
    }

    /// Adds every key of `other`; fails on the first key already present.
    pub fn merge(&mut self, other: Extra) -> Result<(), RankingError> {
        if let Some(k) = other.0.keys().find(|k| self.0.contains_key(*k)) {
            return Err(RankingError::ExtraKeyExists(k.clone()));
        }
        self.0.extend(other.0);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Deserialize)]
struct RawRankResult {
    method: String,
    alternatives: Vec<String>,
    values: Vec<usize>,
    #[serde(default)]
    extra: Extra,
}

/// Ordinal ranking of alternatives; lower values are preferred, ties share a
/// value, and distinct values always form `1..=k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRankResult")]
pub struct RankResult {
    method: String,
    alternatives: Vec<String>,
    values: Vec<usize>,
    extra: Extra,
}

impl TryFrom<RawRankResult> for RankResult {
    type Error = RankingError;

    fn try_from(raw: RawRankResult) -> Result<Self, Self::Error> {
        let mut r = RankResult::new(raw.method, raw.alternatives, raw.values)?;
        r.extra = raw.extra;
        Ok(r)
    }
}

pub(crate) fn check_dense(values: &[usize]) -> bool {
    let distinct: std::collections::BTreeSet<usize> = values.iter().copied().collect();
    distinct.iter().copied().eq(1..=distinct.len())
}

impl RankResult {
    pub fn new(
        method: impl Into<String>,
        alternatives: Vec<String>,
        values: Vec<usize>,
    ) -> Result<Self, RankingError> {
        if alternatives.len() != values.len() {
            return Err(RankingError::LengthMismatch {
                alternatives: alternatives.len(),
                values: values.len(),
            });
        }
        if alternatives.is_empty() {
            return Err(RankingError::Empty);
        }
        let mut seen = HashSet::new();
        if let Some(dup) = alternatives.iter().find(|a| !seen.insert(a.as_str())) {
            return Err(RankingError::DuplicateAlternative(dup.clone()));
        }
        if !check_dense(&values) {
            return Err(RankingError::NotDense(values));
        }
        Ok(Self {
            method: method.into(),
            alternatives,
            values,
            extra: Extra::new(),
        })
    }

    /// Dense ranking by descending score. Neighbouring sorted scores closer
    /// than [`Scalar::tie_tolerance`] share a rank.
    pub fn from_scores<T: Scalar>(
        method: impl Into<String>,
        alternatives: Vec<String>,
        scores: &[T],
    ) -> Result<Self, RankingError> {
        if alternatives.len() != scores.len() {
            return Err(RankingError::LengthMismatch {
                alternatives: alternatives.len(),
                values: scores.len(),
            });
        }
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .partial_cmp(&scores[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let tol = T::tie_tolerance();
        let mut values = vec![0; scores.len()];
        let mut rank = 0;
        let mut prev: Option<T> = None;
        for &i in &order {
            match prev {
                Some(p) if (p - scores[i]).abs() <= tol => {}
                _ => rank += 1,
            }
            values[i] = rank;
            prev = Some(scores[i]);
        }
        Self::new(method, alternatives, values)
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn extra(&self) -> &Extra {
        &self.extra
    }

    pub fn extra_mut(&mut self) -> &mut Extra {
        &mut self.extra
    }

    pub fn rank_of(&self, alternative: &str) -> Option<usize> {
        self.alternatives
            .iter()
            .position(|a| a == alternative)
            .map(|i| self.values[i])
    }

    pub fn contains(&self, alternative: &str) -> bool {
        self.alternatives.iter().any(|a| a == alternative)
    }

    /// Alternatives holding rank 1.
    pub fn best(&self) -> Vec<&str> {
        self.alternatives
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| **v == 1)
            .map(|(a, _)| a.as_str())
            .collect()
    }

    /// Strict positions `1..=n`; ties are resolved by listing order.
    pub fn untied_rank(&self) -> Vec<usize> {
        let mut out = vec![0; self.values.len()];
        for (pos, i) in self.untied_indices().into_iter().enumerate() {
            out[i] = pos + 1;
        }
        out
    }

    /// Alternatives from most to least preferred, ties in listing order.
    pub fn untied_order(&self) -> Vec<&str> {
        self.untied_indices()
            .into_iter()
            .map(|i| self.alternatives[i].as_str())
            .collect()
    }

    fn untied_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        // stable sort keeps listing order inside tie groups
        idx.sort_by_key(|&i| self.values[i]);
        idx
    }

    pub(crate) fn into_parts(self) -> (String, Vec<String>, Vec<usize>, Extra) {
        (self.method, self.alternatives, self.values, self.extra)
    }

    pub(crate) fn from_parts_unchecked(
        method: String,
        alternatives: Vec<String>,
        values: Vec<usize>,
        extra: Extra,
    ) -> Self {
        debug_assert!(check_dense(&values));
        Self {
            method,
            alternatives,
            values,
            extra,
        }
    }
}

/// Statistic computed between every pair of comparator entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correlation {
    /// Pearson correlation of untied ranks.
    Spearman,
    /// Kendall's tau on untied ranks (no ties, so tau-a = tau-b).
    Kendall,
    /// Sample covariance of rank values.
    Covariance,
    /// Squared Pearson correlation of rank values.
    R2,
    /// Sum of absolute differences of untied ranks.
    ManhattanDistance,
}

/// Rankings as rows, alternatives as lexicographically sorted columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankTable {
    pub labels: Vec<String>,
    pub alternatives: Vec<String>,
    pub values: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparatorEntry {
    pub label: String,
    pub rank: RankResult,
}

#[derive(Deserialize)]
struct RawComparator {
    entries: Vec<ComparatorEntry>,
    #[serde(default)]
    extra: Extra,
}

/// Labeled rankings over one alternative set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawComparator")]
pub struct RanksComparator {
    entries: Vec<ComparatorEntry>,
    extra: Extra,
}

impl TryFrom<RawComparator> for RanksComparator {
    type Error = RankingError;

    fn try_from(raw: RawComparator) -> Result<Self, Self::Error> {
        let mut rc =
            RanksComparator::new(raw.entries.into_iter().map(|e| (e.label, e.rank)).collect())?;
        rc.extra = raw.extra;
        Ok(rc)
    }
}

impl RanksComparator {
    pub fn new(entries: Vec<(String, RankResult)>) -> Result<Self, RankingError> {
        let mut rc = Self {
            entries: Vec::with_capacity(entries.len()),
            extra: Extra::new(),
        };
        if entries.is_empty() {
            return Err(RankingError::TooFewEntries { needed: 1, got: 0 });
        }
        for (label, rank) in entries {
            rc.push(label, rank)?;
        }
        Ok(rc)
    }

    pub fn push(&mut self, label: impl Into<String>, rank: RankResult) -> Result<(), RankingError> {
        let label = label.into();
        if self.entries.iter().any(|e| e.label == label) {
            return Err(RankingError::DuplicateLabel(label));
        }
        if let Some(first) = self.entries.first() {
            let a: HashSet<&str> = first.rank.alternatives.iter().map(String::as_str).collect();
            let b: HashSet<&str> = rank.alternatives.iter().map(String::as_str).collect();
            if a != b {
                return Err(RankingError::AlternativeMismatch {
                    label,
                    first: first.label.clone(),
                });
            }
        }
        self.entries.push(ComparatorEntry { label, rank });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ComparatorEntry] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &RankResult)> {
        self.entries.iter().map(|e| (e.label.as_str(), &e.rank))
    }

    pub fn get(&self, label: &str) -> Option<&RankResult> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| &e.rank)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.label.as_str()).collect()
    }

    pub fn extra(&self) -> &Extra {
        &self.extra
    }

    pub fn extra_mut(&mut self) -> &mut Extra {
        &mut self.extra
    }

    fn sorted_alternatives(&self) -> Vec<String> {
        let mut alts = self.entries[0].rank.alternatives.clone();
        alts.sort();
        alts
    }

    /// Per-entry vectors aligned to the sorted alternative order.
    fn aligned(&self, untied: bool) -> Vec<Vec<usize>> {
        let alts = self.sorted_alternatives();
        self.entries
            .iter()
            .map(|e| {
                let vals = if untied {
                    e.rank.untied_rank()
                } else {
                    e.rank.values.clone()
                };
                let by_name: BTreeMap<&str, usize> = e
                    .rank
                    .alternatives
                    .iter()
                    .map(String::as_str)
                    .zip(vals)
                    .collect();
                alts.iter().map(|a| by_name[a.as_str()]).collect()
            })
            .collect()
    }

    pub fn to_rank_table(&self) -> RankTable {
        RankTable {
            labels: self.entries.iter().map(|e| e.label.clone()).collect(),
            alternatives: self.sorted_alternatives(),
            values: self.aligned(false),
        }
    }

    /// Symmetric matrix of `kind` over all entry pairs.
    pub fn rank_correlation(&self, kind: Correlation) -> Result<Vec<Vec<f64>>, RankingError> {
        if self.entries.len() < 2 {
            return Err(RankingError::TooFewEntries {
                needed: 2,
                got: self.entries.len(),
            });
        }
        let untied = matches!(
            kind,
            Correlation::Spearman | Correlation::Kendall | Correlation::ManhattanDistance
        );
        let data: Vec<Vec<f64>> = self
            .aligned(untied)
            .into_iter()
            .map(|v| v.into_iter().map(|x| x as f64).collect())
            .collect();
        let k = data.len();
        let mut out = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i..k {
                let (x, y) = (&data[i], &data[j]);
                let v = match kind {
                    Correlation::Spearman => pearson(x, y),
                    Correlation::Kendall => kendall_tau(x, y),
                    Correlation::Covariance => covariance(x, y),
                    Correlation::R2 => pearson(x, y).powi(2),
                    Correlation::ManhattanDistance => {
                        x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
                    }
                };
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        Ok(out)
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn covariance(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let s: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    s / (x.len() as f64 - 1.0)
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    covariance(x, y) / (covariance(x, x) * covariance(y, y)).sqrt()
}

fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut score = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let s = (x[i] - x[j]).signum() * (y[i] - y[j]).signum();
            score += s as i64;
        }
    }
    score as f64 / (n * (n - 1) / 2) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rr(alts: &[&str], values: &[usize]) -> RankResult {
        RankResult::new(
            "test",
            alts.iter().map(|s| s.to_string()).collect(),
            values.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn untied_rank_examples() {
        assert_eq!(
            rr(&["A", "B", "C"], &[1, 1, 2]).untied_rank(),
            vec![1, 2, 3]
        );
        assert_eq!(
            rr(&["A", "B", "C"], &[1, 2, 3]).untied_rank(),
            vec![1, 2, 3]
        );
        assert_eq!(
            rr(&["A", "B", "C"], &[2, 1, 1]).untied_rank(),
            vec![3, 1, 2]
        );
        assert_eq!(
            rr(&["A", "B", "C"], &[2, 1, 1]).untied_order(),
            vec!["B", "C", "A"]
        );
    }

    #[test]
    fn rejects_gaps_duplicates_and_mismatch() {
        let alts = vec!["A".to_string(), "B".to_string()];
        assert!(matches!(
            RankResult::new("m", alts.clone(), vec![1, 3]),
            Err(RankingError::NotDense(_))
        ));
        assert!(matches!(
            RankResult::new("m", alts.clone(), vec![2, 2]),
            Err(RankingError::NotDense(_))
        ));
        assert!(matches!(
            RankResult::new("m", alts, vec![1]),
            Err(RankingError::LengthMismatch { .. })
        ));
        assert!(matches!(
            RankResult::new("m", vec!["A".into(), "A".into()], vec![1, 2]),
            Err(RankingError::DuplicateAlternative(_))
        ));
    }

    #[test]
    fn from_scores_is_dense_with_tolerance() {
        let alts: Vec<String> = ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect();
        let r = RankResult::from_scores("m", alts, &[1.0, 3.0, 3.0 + 1e-14, 0.5]).unwrap();
        assert_eq!(r.values(), [2, 1, 1, 3]);
    }

    #[test]
    fn extra_refuses_overwrite() {
        let mut e = Extra::new();
        e.insert("k", Value::from(1)).unwrap();
        assert_eq!(
            e.insert("k", Value::from(2)).unwrap_err(),
            RankingError::ExtraKeyExists("k".into())
        );
        let mut other = Extra::new();
        other.insert("k2", Value::from(3)).unwrap();
        e.merge(other.clone()).unwrap();
        assert!(e.merge(other).is_err());
        assert_eq!(e.get("k"), Some(&Value::from(1)));
    }

    #[test]
    fn comparator_rejects_mismatched_sets_and_labels() {
        let a = rr(&["A", "B", "C"], &[1, 2, 3]);
        let b = rr(&["A", "B", "D"], &[1, 2, 3]);
        assert!(matches!(
            RanksComparator::new(vec![("x".into(), a.clone()), ("y".into(), b)]),
            Err(RankingError::AlternativeMismatch { .. })
        ));
        assert!(matches!(
            RanksComparator::new(vec![("x".into(), a.clone()), ("x".into(), a.clone())]),
            Err(RankingError::DuplicateLabel(_))
        ));
        let single = RanksComparator::new(vec![("x".into(), a)]).unwrap();
        assert_eq!(
            single.rank_correlation(Correlation::Spearman).unwrap_err(),
            RankingError::TooFewEntries { needed: 2, got: 1 }
        );
    }

    #[test]
    fn rank_table_aligns_by_name() {
        let a = rr(&["A", "B", "C"], &[1, 2, 3]);
        let b = rr(&["C", "A", "B"], &[3, 1, 2]);
        let rc = RanksComparator::new(vec![("x".into(), a), ("y".into(), b)]).unwrap();
        let t = rc.to_rank_table();
        assert_eq!(t.alternatives, ["A", "B", "C"]);
        assert_eq!(t.values, vec![vec![1, 2, 3], vec![1, 2, 3]]);
    }

    #[test]
    fn correlations_on_small_cases() {
        let id = rr(&["A", "B", "C"], &[1, 2, 3]);
        let rev = rr(&["A", "B", "C"], &[3, 2, 1]);
        let swap = rr(&["A", "B", "C"], &[1, 3, 2]);
        let rc = RanksComparator::new(vec![
            ("id".into(), id.clone()),
            ("id2".into(), id),
            ("rev".into(), rev),
            ("swap".into(), swap),
        ])
        .unwrap();
        let sp = rc.rank_correlation(Correlation::Spearman).unwrap();
        assert!((sp[0][1] - 1.0).abs() < 1e-12);
        assert!((sp[0][2] + 1.0).abs() < 1e-12);
        let kt = rc.rank_correlation(Correlation::Kendall).unwrap();
        // pairs (A,B),(A,C) concordant, (B,C) discordant
        assert!((kt[0][3] - 1.0 / 3.0).abs() < 1e-12);
        let md = rc.rank_correlation(Correlation::ManhattanDistance).unwrap();
        assert_eq!(md[0][0], 0.0);
        assert_eq!(md[0][2], 4.0);
        let cov = rc.rank_correlation(Correlation::Covariance).unwrap();
        assert!((cov[0][0] - 1.0).abs() < 1e-12);
        let r2 = rc.rank_correlation(Correlation::R2).unwrap();
        assert!((r2[2][2] - 1.0).abs() < 1e-12);
        for kind in [
            Correlation::Spearman,
            Correlation::Kendall,
            Correlation::Covariance,
            Correlation::R2,
            Correlation::ManhattanDistance,
        ] {
            let m = rc.rank_correlation(kind).unwrap();
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    assert!((v - m[j][i]).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn deserialization_validates() {
        let bad = r#"{"method":"m","alternatives":["A","B"],"values":[1,3],"extra":{}}"#;
        assert!(serde_json::from_str::<RankResult>(bad).is_err());
        let good = r#"{"method":"m","alternatives":["A","B"],"values":[2,1],"extra":{"k":[1,2]}}"#;
        let r: RankResult = serde_json::from_str(good).unwrap();
        assert_eq!(r.best(), vec!["B"]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn dense_values() -> impl Strategy<Value = Vec<usize>> {
            proptest::collection::vec(0usize..5, 1..10).prop_map(|raw| {
                let mut distinct: Vec<usize> = raw.clone();
                distinct.sort();
                distinct.dedup();
                raw.iter()
                    .map(|v| distinct.binary_search(v).unwrap() + 1)
                    .collect()
            })
        }

        proptest! {
            #[test]
            fn untied_rank_is_order_compatible_bijection(values in dense_values()) {
                let alts: Vec<String> = (0..values.len()).map(|i| format!("a{i}")).collect();
                let r = RankResult::new("m", alts, values.clone()).unwrap();
                let u = r.untied_rank();
                let mut sorted = u.clone();
                sorted.sort();
                prop_assert_eq!(sorted, (1..=values.len()).collect::<Vec<_>>());
                for i in 0..values.len() {
                    for j in 0..values.len() {
                        if values[i] < values[j] || (values[i] == values[j] && i < j) {
                            prop_assert!(u[i] < u[j]);
                        }
                    }
                }
                if values.iter().collect::<HashSet<_>>().len() == values.len() {
                    prop_assert_eq!(u, values);
                }
            }
        }
    }
}
