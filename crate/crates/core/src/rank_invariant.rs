//! Rank invariance under controlled degradation of suboptimal alternatives.
//!
//! Every alternative ranked below the optimum is worsened by bounded uniform
//! noise, the method is re-run on the mutated matrix, and the optimum is
//! expected to survive. Alternatives a pipeline filters out are padded with
//! a shared worst rank so every ranking covers the full alternative set.
//!
//! Randomness is drawn from ChaCha8 substreams keyed by
//! `(seed, repetition, target position)`, so results do not depend on how
//! the mutation grid is scheduled across threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::methods::{Decider, MethodError};
use crate::model::{DecisionMatrix, ModelError, Objective};
use crate::ranking::{RankResult, RankingError, RanksComparator};
use crate::scalar::Scalar;

pub const BASELINE_LABEL: &str = "Original";
pub const RANK_INV_CHECK: &str = "rank_inv_check";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Rrt1Error {
    #[error(transparent)]
    Method(#[from] MethodError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ranking(#[from] RankingError),
    #[error("alternative {0:?} is optimal in the baseline and cannot be degraded")]
    TargetIsOptimal(String),
    #[error("Pipeline eliminated alternatives: {0:?}")]
    PipelineEliminatedAlternatives(Vec<String>),
    #[error("baseline ranking does not cover alternative {0:?}")]
    BaselineIncomplete(String),
    #[error("need at least 2 alternatives, got {0}")]
    TooFewAlternatives(usize),
    #[error("repeats must be at least 1")]
    ZeroRepeats,
    #[error("entry {0:?} carries no rank_inv_check metadata")]
    NotAnRrt1Comparator(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    #[default]
    Median,
    Mean,
}

impl Aggregator {
    pub fn apply<T: Scalar>(self, values: &[T]) -> T {
        if values.is_empty() {
            return T::zero();
        }
        let n = T::from_usize(values.len()).unwrap_or_else(T::one);
        match self {
            Aggregator::Mean => values.iter().copied().sum::<T>() / n,
            Aggregator::Median => {
                let mut v = values.to_vec();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
                let mid = v.len() / 2;
                if v.len() % 2 == 1 {
                    v[mid]
                } else {
                    (v[mid - 1] + v[mid]) / (T::one() + T::one())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rrt1Config {
    pub repeats: usize,
    pub seed: u64,
    pub allow_missing: bool,
    pub last_alternative_aggregator: Aggregator,
}

impl Default for Rrt1Config {
    fn default() -> Self {
        Self {
            repeats: 1,
            seed: 0,
            allow_missing: true,
            last_alternative_aggregator: Aggregator::Median,
        }
    }
}

/// Provenance of one mutated ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationRecord<T> {
    pub iteration: usize,
    pub mutated: String,
    /// Signed delta applied per criterion.
    pub noise: BTreeMap<String, T>,
    pub missing: Vec<String>,
    pub baseline: String,
}

/// Appends alternatives absent from `alternatives` with rank `max + 1`.
pub fn pad_missing(
    mut alternatives: Vec<String>,
    mut values: Vec<usize>,
    full_alternatives: &[String],
    allow_missing: bool,
) -> Result<(Vec<String>, Vec<usize>), Rrt1Error> {
    if let Some(extra) = alternatives.iter().find(|a| !full_alternatives.contains(a)) {
        return Err(ModelError::UnknownAlternative(extra.clone()).into());
    }
    let missing: Vec<String> = full_alternatives
        .iter()
        .filter(|a| !alternatives.contains(a))
        .cloned()
        .collect();
    if missing.is_empty() {
        return Ok((alternatives, values));
    }
    if !allow_missing {
        return Err(Rrt1Error::PipelineEliminatedAlternatives(missing));
    }
    let worst = values.iter().copied().max().unwrap_or(0) + 1;
    values.extend(std::iter::repeat_n(worst, missing.len()));
    alternatives.extend(missing);
    Ok((alternatives, values))
}

/// [`pad_missing`] applied to a ranking; also returns the padded names.
pub fn pad_rank(
    rank: RankResult,
    full_alternatives: &[String],
    allow_missing: bool,
) -> Result<(RankResult, Vec<String>), Rrt1Error> {
    let before = rank.len();
    let (method, alternatives, values, extra) = rank.into_parts();
    let (alternatives, values) =
        pad_missing(alternatives, values, full_alternatives, allow_missing)?;
    let missing = alternatives[before..].to_vec();
    Ok((
        RankResult::from_parts_unchecked(method, alternatives, values, extra),
        missing,
    ))
}

/// Baseline positions in untied order, validated against `dm`.
fn untied_positions<T: Scalar>(
    dm: &DecisionMatrix<T>,
    baseline: &RankResult,
) -> Result<Vec<usize>, Rrt1Error> {
    if let Some(a) = dm.alternatives().iter().find(|a| !baseline.contains(a)) {
        return Err(Rrt1Error::BaselineIncomplete(a.clone()));
    }
    baseline
        .untied_order()
        .into_iter()
        .map(|a| {
            dm.position(a)
                .ok_or_else(|| ModelError::UnknownAlternative(a.to_owned()).into())
        })
        .collect()
}

/// Per-criterion noise ceiling for degrading `target`.
///
/// The gap to the next-worse alternative in the untied baseline order; for
/// the worst alternative, `aggregator` over all adjacent gaps.
pub fn noise_bounds<T: Scalar>(
    dm: &DecisionMatrix<T>,
    baseline: &RankResult,
    target: &str,
    aggregator: Aggregator,
) -> Result<BTreeMap<String, T>, Rrt1Error> {
    let order = untied_positions(dm, baseline)?;
    match baseline.rank_of(target) {
        None => return Err(ModelError::UnknownAlternative(target.to_owned()).into()),
        Some(1) => return Err(Rrt1Error::TargetIsOptimal(target.to_owned())),
        Some(_) => {}
    }
    let t = dm.position(target).expect("baseline covers dm");
    let k = order.iter().position(|&i| i == t).expect("target in order");
    let gap = |a: usize, b: usize, j: usize| (dm.value(a, j) - dm.value(b, j)).abs();

    let bounds = (0..dm.n_criteria()).map(|j| {
        if k + 1 < order.len() {
            gap(order[k], order[k + 1], j)
        } else {
            let gaps: Vec<T> = order.windows(2).map(|w| gap(w[0], w[1], j)).collect();
            aggregator.apply(&gaps)
        }
    });
    Ok(dm.criteria().iter().cloned().zip(bounds).collect())
}

/// Worsens `target` by `magnitudes` (non-negative, in criteria order):
/// subtracted on maximized criteria, added on minimized ones.
pub fn apply_noise<T: Scalar>(
    dm: &DecisionMatrix<T>,
    target: &str,
    magnitudes: &[T],
) -> Result<(Vec<T>, BTreeMap<String, T>), Rrt1Error> {
    let old = dm.row_by_name(target)?;
    let mut row = Vec::with_capacity(old.len());
    let mut noise = BTreeMap::new();
    for (j, (v, eps)) in old.iter().zip(magnitudes).enumerate() {
        let delta = match dm.objectives()[j] {
            Objective::Maximize => -*eps,
            Objective::Minimize => *eps,
        };
        row.push(*v + delta);
        noise.insert(dm.criteria()[j].clone(), delta);
    }
    Ok((row, noise))
}

/// Draws `ε_c ~ U[0, bound_c]` per criterion and applies it to `target`.
pub fn degrade<T: Scalar, R: Rng + ?Sized>(
    dm: &DecisionMatrix<T>,
    target: &str,
    bounds: &BTreeMap<String, T>,
    rng: &mut R,
) -> Result<(Vec<T>, BTreeMap<String, T>), Rrt1Error> {
    let magnitudes: Vec<T> = dm
        .criteria()
        .iter()
        .map(|c| {
            let b = bounds
                .get(c)
                .copied()
                .unwrap_or_else(T::zero)
                .to_f64_lossy();
            if b > 0.0 {
                T::from_f64_lossy(rng.random_range(0.0..=b))
            } else {
                T::zero()
            }
        })
        .collect();
    apply_noise(dm, target, &magnitudes)
}

/// Independent generator for one `(repetition, target)` cell.
pub fn substream(seed: u64, repetition: usize, target_position: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((repetition as u64) << 32) | (target_position as u64 & 0xffff_ffff));
    rng
}

pub fn mutation_label(alternative: &str, iteration: usize) -> String {
    format!("M.{alternative}.{iteration}")
}

/// Baseline plus one ranking per (repetition, suboptimal alternative).
///
/// Entries are ordered by repetition, then by baseline position of the
/// mutated alternative.
pub fn run_rrt1<T, D>(
    decider: &D,
    dm: &DecisionMatrix<T>,
    config: &Rrt1Config,
) -> Result<RanksComparator, Rrt1Error>
where
    T: Scalar,
    D: Decider<T> + ?Sized,
{
    if dm.n_alternatives() < 2 {
        return Err(Rrt1Error::TooFewAlternatives(dm.n_alternatives()));
    }
    if config.repeats == 0 {
        return Err(Rrt1Error::ZeroRepeats);
    }
    let full = dm.alternatives();
    let (baseline, _) = pad_rank(decider.evaluate(dm)?, full, config.allow_missing)?;

    // (name, matrix position, per-criterion noise bounds)
    type Target<T> = (String, usize, BTreeMap<String, T>);
    let targets: Vec<Target<T>> = baseline
        .untied_order()
        .into_iter()
        .filter(|a| baseline.rank_of(a) != Some(1))
        .map(|a| {
            let bounds = noise_bounds(dm, &baseline, a, config.last_alternative_aggregator)?;
            Ok((a.to_owned(), dm.position(a).expect("covered"), bounds))
        })
        .collect::<Result<_, Rrt1Error>>()?;

    let grid: Vec<(usize, &Target<T>)> = (1..=config.repeats)
        .flat_map(|r| targets.iter().map(move |t| (r, t)))
        .collect();

    let mutated: Vec<(String, RankResult)> = grid
        .par_iter()
        .map(|&(r, (target, pos, bounds))| {
            let mut rng = substream(config.seed, r, *pos);
            let (row, noise) = degrade(dm, target, bounds, &mut rng)?;
            let dm_mut = dm.replace_alternative(target, &row)?;
            let (mut rank, missing) =
                pad_rank(decider.evaluate(&dm_mut)?, full, config.allow_missing)?;
            let record = MutationRecord {
                iteration: r,
                mutated: target.clone(),
                noise,
                missing,
                baseline: BASELINE_LABEL.to_owned(),
            };
            rank.extra_mut()
                .insert_serialized(RANK_INV_CHECK, &record)?;
            Ok((mutation_label(target, r), rank))
        })
        .collect::<Result<_, Rrt1Error>>()?;

    let mut entries = Vec::with_capacity(mutated.len() + 1);
    entries.push((BASELINE_LABEL.to_owned(), baseline));
    entries.extend(mutated);
    Ok(RanksComparator::new(entries)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationVerdict {
    pub label: String,
    pub mutated: String,
    pub iteration: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rrt1Verdict {
    pub mutations: Vec<MutationVerdict>,
    pub pass_rate: f64,
    pub passed: bool,
}

/// A mutation passes when every baseline optimum still ranks first.
///
/// The first comparator entry is taken as the baseline.
pub fn rrt1_verdict(rc: &RanksComparator) -> Result<Rrt1Verdict, Rrt1Error> {
    let mut entries = rc.iter();
    let (_, baseline) = entries.next().expect("comparator is never empty");
    let optima = baseline.best();
    let mut mutations = Vec::new();
    for (label, rank) in entries {
        let record = rank
            .extra()
            .get(RANK_INV_CHECK)
            .ok_or_else(|| Rrt1Error::NotAnRrt1Comparator(label.to_owned()))?;
        let mutated = record["mutated"].as_str().unwrap_or_default().to_owned();
        let iteration = record["iteration"].as_u64().unwrap_or_default() as usize;
        let passed = optima.iter().all(|a| rank.rank_of(a) == Some(1));
        mutations.push(MutationVerdict {
            label: label.to_owned(),
            mutated,
            iteration,
            passed,
        });
    }
    let pass_rate = if mutations.is_empty() {
        1.0
    } else {
        mutations.iter().filter(|m| m.passed).count() as f64 / mutations.len() as f64
    };
    Ok(Rrt1Verdict {
        passed: pass_rate == 1.0,
        mutations,
        pass_rate,
    })
}
