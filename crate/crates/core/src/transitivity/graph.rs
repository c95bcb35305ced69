use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::TransitivityError;

#[derive(Serialize, Deserialize)]
struct EdgeList {
    nodes: Vec<String>,
    edges: Vec<(String, String)>,
}

/// Directed preference graph; an edge `(w, l)` means `w` is preferred to `l`.
///
/// Serializes as a node list plus an edge list in canonical order (by node
/// position of the winner, then of the loser).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "EdgeList", try_from = "EdgeList")]
pub struct DominanceGraph {
    nodes: Vec<String>,
    adj: Vec<Vec<bool>>,
}

impl From<DominanceGraph> for EdgeList {
    fn from(g: DominanceGraph) -> Self {
        EdgeList {
            edges: g.edges(),
            nodes: g.nodes,
        }
    }
}

impl TryFrom<EdgeList> for DominanceGraph {
    type Error = TransitivityError;

    fn try_from(list: EdgeList) -> Result<Self, Self::Error> {
        DominanceGraph::from_edges(list.nodes, &list.edges)
    }
}

impl DominanceGraph {
    pub fn new<S: Into<String>>(
        nodes: impl IntoIterator<Item = S>,
    ) -> Result<Self, TransitivityError> {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        if let Some(dup) = nodes.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(TransitivityError::DuplicateNode(dup.clone()));
        }
        let n = nodes.len();
        Ok(Self {
            nodes,
            adj: vec![vec![false; n]; n],
        })
    }

    pub fn from_edges<S, E>(
        nodes: impl IntoIterator<Item = S>,
        edges: &[(E, E)],
    ) -> Result<Self, TransitivityError>
    where
        S: Into<String>,
        E: AsRef<str>,
    {
        let mut g = Self::new(nodes)?;
        for (w, l) in edges {
            g.add_edge(w.as_ref(), l.as_ref())?;
        }
        Ok(g)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, node: &str) -> Result<usize, TransitivityError> {
        self.nodes
            .iter()
            .position(|n| n == node)
            .ok_or_else(|| TransitivityError::UnknownNode(node.to_owned()))
    }

    pub fn add_edge(&mut self, winner: &str, loser: &str) -> Result<(), TransitivityError> {
        let (w, l) = (self.index_of(winner)?, self.index_of(loser)?);
        if w == l {
            return Err(TransitivityError::SelfLoop(winner.to_owned()));
        }
        self.adj[w][l] = true;
        Ok(())
    }

    pub fn remove_edge(&mut self, winner: &str, loser: &str) -> Result<bool, TransitivityError> {
        let (w, l) = (self.index_of(winner)?, self.index_of(loser)?);
        Ok(std::mem::replace(&mut self.adj[w][l], false))
    }

    pub fn has_edge(&self, winner: &str, loser: &str) -> bool {
        match (self.index_of(winner), self.index_of(loser)) {
            (Ok(w), Ok(l)) => self.adj[w][l],
            _ => false,
        }
    }

    pub fn edges(&self) -> Vec<(String, String)> {
        self.edge_indices()
            .map(|(w, l)| (self.nodes[w].clone(), self.nodes[l].clone()))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().flatten().filter(|e| **e).count()
    }

    pub fn out_degree(&self, node: &str) -> Result<usize, TransitivityError> {
        let i = self.index_of(node)?;
        Ok(self.adj[i].iter().filter(|e| **e).count())
    }

    /// Exactly one orientation per unordered pair, no self-loops.
    pub fn is_tournament(&self) -> bool {
        let n = self.nodes.len();
        (0..n).all(|i| !self.adj[i][i] && (i + 1..n).all(|j| self.adj[i][j] != self.adj[j][i]))
    }

    pub fn is_acyclic(&self) -> bool {
        self.levels().is_some()
    }

    /// Level decomposition by repeated removal of zero in-degree nodes, or
    /// `None` if a cycle blocks it.
    pub(crate) fn levels(&self) -> Option<Vec<Vec<usize>>> {
        let n = self.nodes.len();
        let mut indeg: Vec<usize> = (0..n)
            .map(|j| (0..n).filter(|&i| self.adj[i][j]).count())
            .collect();
        let mut done = vec![false; n];
        let mut levels = Vec::new();
        let mut remaining = n;
        while remaining > 0 {
            let level: Vec<usize> = (0..n).filter(|&i| !done[i] && indeg[i] == 0).collect();
            if level.is_empty() {
                return None;
            }
            for &i in &level {
                done[i] = true;
                for (d, &edge) in indeg.iter_mut().zip(&self.adj[i]) {
                    if edge {
                        *d -= 1;
                    }
                }
            }
            remaining -= level.len();
            levels.push(level);
        }
        Some(levels)
    }

    pub(crate) fn edge_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.nodes.len();
        (0..n).flat_map(move |w| (0..n).filter(move |&l| self.adj[w][l]).map(move |l| (w, l)))
    }

    pub(crate) fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i]
            .iter()
            .enumerate()
            .filter(|(_, e)| **e)
            .map(|(j, _)| j)
    }

    pub(crate) fn has_edge_idx(&self, w: usize, l: usize) -> bool {
        self.adj[w][l]
    }

    pub(crate) fn set_edge_idx(&mut self, w: usize, l: usize, present: bool) {
        self.adj[w][l] = present;
    }

    pub(crate) fn edge_names(&self, (w, l): (usize, usize)) -> (String, String) {
        (self.nodes[w].clone(), self.nodes[l].clone())
    }
}
