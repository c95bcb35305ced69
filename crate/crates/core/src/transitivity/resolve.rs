use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cycles::simple_cycles;
use super::graph::DominanceGraph;
use super::TransitivityError;

/// Upper bound on simple cycles enumerated per pass.
pub const DEFAULT_CYCLE_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleStrategy {
    /// One uniformly chosen edge from each still-intact cycle.
    Random,
    /// Repeatedly the edge shared by the most intact cycles.
    Weighted,
}

impl std::str::FromStr for CycleStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(CycleStrategy::Random),
            "weighted" => Ok(CycleStrategy::Weighted),
            other => Err(format!(
                "unknown strategy {other:?} (expected random|weighted)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleResolution {
    pub acyclic_graph: DominanceGraph,
    /// In removal order.
    pub removed_edges: Vec<(String, String)>,
    pub strategy: CycleStrategy,
    pub seed: u64,
    pub missing: Vec<String>,
}

fn cycle_edges(cycle: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..cycle.len()).map(move |k| (cycle[k], cycle[(k + 1) % cycle.len()]))
}

fn intact(g: &DominanceGraph, cycle: &[usize]) -> bool {
    cycle_edges(cycle).all(|(w, l)| g.has_edge_idx(w, l))
}

/// Removes edges until `g` is acyclic.
pub fn break_cycles(
    g: &DominanceGraph,
    strategy: CycleStrategy,
    seed: u64,
) -> Result<CycleResolution, TransitivityError> {
    break_cycles_with_cap(g, strategy, seed, DEFAULT_CYCLE_CAP)
}

/// [`break_cycles`] with an explicit enumeration cap. When the cap cuts an
/// enumeration short, the strategy runs on the cycles found and the graph
/// is re-enumerated until no cycle remains.
pub fn break_cycles_with_cap(
    g: &DominanceGraph,
    strategy: CycleStrategy,
    seed: u64,
    cap: usize,
) -> Result<CycleResolution, TransitivityError> {
    if g.is_acyclic() {
        return Err(TransitivityError::AlreadyAcyclic);
    }
    let cap = cap.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = g.clone();
    let mut removed: Vec<(usize, usize)> = Vec::new();

    while !current.is_acyclic() {
        let (cycles, _) = simple_cycles(&current, cap);
        match strategy {
            CycleStrategy::Random => {
                for cycle in &cycles {
                    if !intact(&current, cycle) {
                        continue;
                    }
                    let k = rng.random_range(0..cycle.len());
                    let edge = (cycle[k], cycle[(k + 1) % cycle.len()]);
                    current.set_edge_idx(edge.0, edge.1, false);
                    removed.push(edge);
                }
            }
            CycleStrategy::Weighted => loop {
                let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
                for cycle in cycles.iter().filter(|c| intact(&current, c)) {
                    for e in cycle_edges(cycle) {
                        *counts.entry(e).or_default() += 1;
                    }
                }
                let Some(&top) = counts.values().max() else {
                    break;
                };
                let ties: Vec<(usize, usize)> = counts
                    .iter()
                    .filter(|(_, c)| **c == top)
                    .map(|(e, _)| *e)
                    .collect();
                let edge = if ties.len() == 1 {
                    ties[0]
                } else {
                    ties[rng.random_range(0..ties.len())]
                };
                current.set_edge_idx(edge.0, edge.1, false);
                removed.push(edge);
            },
        }
    }

    Ok(CycleResolution {
        removed_edges: removed.into_iter().map(|e| g.edge_names(e)).collect(),
        acyclic_graph: current,
        strategy,
        seed,
        missing: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_cycle() -> DominanceGraph {
        DominanceGraph::from_edges(["A", "B", "C"], &[("A", "B"), ("B", "C"), ("C", "A")]).unwrap()
    }

    /// Two 3-cycles sharing the edge A→B (plus the 4-cycle through both).
    pub(crate) fn shared_edge() -> DominanceGraph {
        DominanceGraph::from_edges(
            ["A", "B", "C", "D"],
            &[
                ("A", "B"),
                ("B", "C"),
                ("C", "A"),
                ("B", "D"),
                ("D", "A"),
                ("C", "D"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_cycle_loses_one_edge() {
        for strategy in [CycleStrategy::Random, CycleStrategy::Weighted] {
            for seed in 0..20 {
                let r = break_cycles(&three_cycle(), strategy, seed).unwrap();
                assert_eq!(r.removed_edges.len(), 1);
                assert!(r.acyclic_graph.is_acyclic());
                assert_eq!(r.acyclic_graph.edge_count(), 2);
            }
        }
    }

    #[test]
    fn weighted_removes_the_shared_edge() {
        for seed in 0..20 {
            let r = break_cycles(&shared_edge(), CycleStrategy::Weighted, seed).unwrap();
            assert_eq!(r.removed_edges, vec![("A".to_string(), "B".to_string())]);
            assert!(r.acyclic_graph.is_acyclic());
        }
    }

    #[test]
    fn random_is_seed_deterministic() {
        let a = break_cycles(&shared_edge(), CycleStrategy::Random, 9).unwrap();
        let b = break_cycles(&shared_edge(), CycleStrategy::Random, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.acyclic_graph.is_acyclic());
    }

    #[test]
    fn tiny_cap_still_terminates_acyclic() {
        for strategy in [CycleStrategy::Random, CycleStrategy::Weighted] {
            let r = break_cycles_with_cap(&shared_edge(), strategy, 3, 1).unwrap();
            assert!(r.acyclic_graph.is_acyclic());
        }
    }

    #[test]
    fn acyclic_input_is_an_error() {
        let g = DominanceGraph::from_edges(["A", "B"], &[("A", "B")]).unwrap();
        assert_eq!(
            break_cycles(&g, CycleStrategy::Random, 0).unwrap_err(),
            TransitivityError::AlreadyAcyclic
        );
    }

    #[test]
    fn parses_strategy_names() {
        assert_eq!(
            "weighted".parse::<CycleStrategy>().unwrap(),
            CycleStrategy::Weighted
        );
        assert!("greedy".parse::<CycleStrategy>().is_err());
    }
}
