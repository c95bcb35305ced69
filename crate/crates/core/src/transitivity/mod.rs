//! Pairwise transitivity (RRT2) and recomposition consistency (RRT3).
//!
//! The decision problem is split into all `n(n−1)/2` two-alternative
//! sub-problems. Each is evaluated with the method under audit and the
//! winners form a dominance tournament. Cyclic triples in that tournament
//! are transitivity breaks; the break rate normalizes their count by the
//! largest number an n-tournament can hold.
//!
//! For recomposition the tournament (made acyclic by cycle breaking if
//! needed) is stratified into levels of zero in-degree nodes, and the
//! resulting ranking is compared with the method's own full ranking.

mod cycles;
mod graph;
mod resolve;

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::methods::{break_tie, Decider, MethodError, PairOutcome, TieBreakPolicy};
use crate::model::{DecisionMatrix, ModelError};
use crate::rank_invariant::{pad_rank, Rrt1Error};
use crate::ranking::{RankResult, RankingError, RanksComparator};
use crate::scalar::Scalar;

pub use cycles::{find_three_cycles, max_three_cycles, simple_cycles, Triplet};
pub use graph::DominanceGraph;
pub use resolve::{
    break_cycles, break_cycles_with_cap, CycleResolution, CycleStrategy, DEFAULT_CYCLE_CAP,
};

pub const RANK_TRANS_CHECK: &str = "rank_trans_check";
pub const TRANSITIVITY_CHECK: &str = "transitivity_check";
pub const TEST_CRITERION_3: &str = "test_criterion_3";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransitivityError {
    #[error(transparent)]
    Method(#[from] MethodError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ranking(#[from] RankingError),
    #[error(transparent)]
    Padding(#[from] Rrt1Error),
    #[error("graph is not a tournament")]
    NotATournament,
    #[error("at least 3 alternatives are needed, got {0}")]
    NTooSmall(usize),
    #[error("at least 2 alternatives are needed for pairwise decomposition, got {0}")]
    TooFewAlternatives(usize),
    #[error("graph is already acyclic")]
    AlreadyAcyclic,
    #[error("graph contains a cycle")]
    CycleDetected,
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("duplicate node {0:?}")]
    DuplicateNode(String),
    #[error("self-loop on {0:?}")]
    SelfLoop(String),
    #[error("at least one DAG candidate is required")]
    ZeroCandidates,
}

/// Dominance graph from every two-alternative sub-problem.
///
/// A pair member the method filters out loses the pair. If both are
/// filtered, the one listed first wins and both are reported as missing.
/// Ties go through `tie_policy`; an unresolved tie leaves the pair without
/// an edge.
pub fn pairwise_graph<T, D>(
    decider: &D,
    dm: &DecisionMatrix<T>,
    tie_policy: &TieBreakPolicy<T>,
) -> Result<(DominanceGraph, Vec<String>), TransitivityError>
where
    T: Scalar,
    D: Decider<T> + ?Sized,
{
    let n = dm.n_alternatives();
    if n < 2 {
        return Err(TransitivityError::TooFewAlternatives(n));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();

    type PairResult = (Option<(usize, usize)>, Vec<usize>);
    let results: Vec<PairResult> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<PairResult, TransitivityError> {
            let sub = dm.select_rows(&[i, j]);
            let (x, y) = (&dm.alternatives()[i], &dm.alternatives()[j]);
            let rank = match decider.evaluate(&sub) {
                Ok(r) => r,
                Err(e) if e.is_all_filtered() => return Ok((Some((i, j)), vec![i, j])),
                Err(e) => return Err(e.into()),
            };
            Ok(match (rank.contains(x), rank.contains(y)) {
                (true, true) => match break_tie((x, y), &rank, tie_policy, &sub)? {
                    PairOutcome::Winner(w) if w == *x => (Some((i, j)), vec![]),
                    PairOutcome::Winner(_) => (Some((j, i)), vec![]),
                    PairOutcome::Tie => (None, vec![]),
                },
                (true, false) => (Some((i, j)), vec![j]),
                (false, true) => (Some((j, i)), vec![i]),
                (false, false) => (Some((i, j)), vec![i, j]),
            })
        })
        .collect::<Result<_, _>>()?;

    let mut g = DominanceGraph::new(dm.alternatives().iter().cloned())?;
    let mut missing = vec![false; n];
    for (edge, gone) in results {
        if let Some((w, l)) = edge {
            g.set_edge_idx(w, l, true);
        }
        for k in gone {
            missing[k] = true;
        }
    }
    let missing = (0..n)
        .filter(|&k| missing[k])
        .map(|k| dm.alternatives()[k].clone())
        .collect();
    Ok((g, missing))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitivityReport {
    pub test_criterion_2: bool,
    pub trans_break: Vec<Triplet>,
    pub trans_break_rate: f64,
    /// Maximum possible 3-cycles; absent below three alternatives.
    pub trans_break_bound: Option<u64>,
    pub graph: DominanceGraph,
    pub missing: Vec<String>,
}

impl TransitivityReport {
    /// The break rate as an exact fraction.
    pub fn rate_exact(&self) -> Ratio<u64> {
        match self.trans_break_bound {
            Some(bound) => Ratio::new(self.trans_break.len() as u64, bound),
            None => Ratio::from_integer(0),
        }
    }
}

/// Transitivity report for a dominance graph (must be a tournament).
pub fn transitivity_report(
    graph: DominanceGraph,
    missing: Vec<String>,
) -> Result<TransitivityReport, TransitivityError> {
    let trans_break = find_three_cycles(&graph)?;
    let (bound, rate) = if graph.len() < 3 {
        (None, 0.0)
    } else {
        let bound = max_three_cycles(graph.len())?;
        (Some(bound), trans_break.len() as f64 / bound as f64)
    };
    Ok(TransitivityReport {
        test_criterion_2: trans_break.is_empty(),
        trans_break,
        trans_break_rate: rate,
        trans_break_bound: bound,
        graph,
        missing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rrt2Result {
    pub report: TransitivityReport,
    /// Full-problem ranking (padded) carrying the report under
    /// `rank_trans_check`.
    pub ranking: RankResult,
}

pub fn run_rrt2<T, D>(
    decider: &D,
    dm: &DecisionMatrix<T>,
    tie_policy: &TieBreakPolicy<T>,
) -> Result<Rrt2Result, TransitivityError>
where
    T: Scalar,
    D: Decider<T> + ?Sized,
{
    let (mut ranking, _) = pad_rank(decider.evaluate(dm)?, dm.alternatives(), true)?;
    let (graph, missing) = pairwise_graph(decider, dm, tie_policy)?;
    let report = transitivity_report(graph, missing)?;
    ranking
        .extra_mut()
        .insert_serialized(RANK_TRANS_CHECK, &report)?;
    Ok(Rrt2Result { report, ranking })
}

/// Level ranking of a DAG: rank k holds the nodes that become sources
/// after removing levels `1..k`.
pub fn recompose_ranking(dag: &DominanceGraph) -> Result<RankResult, TransitivityError> {
    let levels = dag.levels().ok_or(TransitivityError::CycleDetected)?;
    let mut values = vec![0; dag.len()];
    for (k, level) in levels.iter().enumerate() {
        for &i in level {
            values[i] = k + 1;
        }
    }
    Ok(RankResult::new(
        "Recomposition",
        dag.nodes().to_vec(),
        values,
    )?)
}

fn same_ranking(a: &RankResult, b: &RankResult) -> bool {
    a.len() == b.len()
        && a.alternatives()
            .iter()
            .zip(a.values())
            .all(|(alt, v)| b.rank_of(alt) == Some(*v))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rrt3Report {
    pub test_criterion_2: bool,
    pub test_criterion_3: bool,
    pub transitivity: TransitivityReport,
    /// "Original" followed by the recomposed rankings.
    pub comparator: RanksComparator,
    pub resolutions: Vec<CycleResolution>,
    /// Rank of each alternative in every recomposed ranking.
    pub rank_distribution: BTreeMap<String, Vec<usize>>,
}

pub fn run_rrt3<T, D>(
    decider: &D,
    dm: &DecisionMatrix<T>,
    tie_policy: &TieBreakPolicy<T>,
    candidates: usize,
    strategy: CycleStrategy,
    seed: u64,
) -> Result<Rrt3Report, TransitivityError>
where
    T: Scalar,
    D: Decider<T> + ?Sized,
{
    if candidates == 0 {
        return Err(TransitivityError::ZeroCandidates);
    }
    let Rrt2Result { report, ranking } = run_rrt2(decider, dm, tie_policy)?;
    let graph = &report.graph;

    let mut recomposed: Vec<(String, RankResult)> = Vec::new();
    let mut resolutions = Vec::new();
    let test_criterion_3;
    if graph.is_acyclic() {
        let rank = recompose_ranking(graph)?;
        test_criterion_3 = report.test_criterion_2 && same_ranking(&ranking, &rank);
        recomposed.push(("Recomposed".to_owned(), rank));
    } else {
        let resolved: Vec<(CycleResolution, RankResult)> = (0..candidates as u64)
            .into_par_iter()
            .map(|k| {
                let mut res = break_cycles(graph, strategy, seed.wrapping_add(k))?;
                res.missing = report.missing.clone();
                let mut rank = recompose_ranking(&res.acyclic_graph)?;
                rank.extra_mut()
                    .insert_serialized(TRANSITIVITY_CHECK, &res)?;
                Ok((res, rank))
            })
            .collect::<Result<_, TransitivityError>>()?;
        for (k, (res, rank)) in resolved.into_iter().enumerate() {
            recomposed.push((format!("Recomposed.{k}"), rank));
            resolutions.push(res);
        }
        test_criterion_3 = false;
    }

    let mut rank_distribution: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for alt in dm.alternatives() {
        let ranks = recomposed
            .iter()
            .map(|(_, r)| r.rank_of(alt).expect("recomposition covers all nodes"))
            .collect();
        rank_distribution.insert(alt.clone(), ranks);
    }

    let mut entries = vec![("Original".to_owned(), ranking)];
    entries.extend(recomposed);
    let mut comparator = RanksComparator::new(entries)?;
    comparator
        .extra_mut()
        .insert(TEST_CRITERION_3, Value::Bool(test_criterion_3))?;

    Ok(Rrt3Report {
        test_criterion_2: report.test_criterion_2,
        test_criterion_3,
        transitivity: report,
        comparator,
        resolutions,
        rank_distribution,
    })
}
