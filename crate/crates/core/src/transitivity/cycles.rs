use std::collections::BTreeSet;

use super::graph::DominanceGraph;
use super::TransitivityError;

/// A 3-cycle `a ≻ b ≻ c ≻ a`, rotated so the smallest name comes first.
pub type Triplet = [String; 3];

/// Maximum number of cyclic triples an n-tournament can contain:
/// `n(n²−4)/24` for even n, `n(n²−1)/24` for odd n.
pub fn max_three_cycles(n: usize) -> Result<u64, TransitivityError> {
    if n < 3 {
        return Err(TransitivityError::NTooSmall(n));
    }
    let n = n as u64;
    Ok(if n.is_multiple_of(2) {
        n * (n * n - 4) / 24
    } else {
        n * (n * n - 1) / 24
    })
}

fn canonical(a: &str, b: &str, c: &str) -> Triplet {
    let t = [a.to_owned(), b.to_owned(), c.to_owned()];
    let k = (0..3).min_by_key(|&i| &t[i]).expect("three elements");
    [t[k].clone(), t[(k + 1) % 3].clone(), t[(k + 2) % 3].clone()]
}

/// Every cyclic triple of a tournament, canonical and sorted.
///
/// Walks each edge `u → v` and closes the triangle through the successors
/// of `v` that point back to `u`.
pub fn find_three_cycles(g: &DominanceGraph) -> Result<Vec<Triplet>, TransitivityError> {
    if !g.is_tournament() {
        return Err(TransitivityError::NotATournament);
    }
    let names = g.nodes();
    let mut found = BTreeSet::new();
    for (u, v) in g.edge_indices() {
        for w in g.successors(v) {
            if g.has_edge_idx(w, u) {
                found.insert(canonical(&names[u], &names[v], &names[w]));
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// Elementary circuits by Johnson's algorithm, stopping after `cap` cycles.
///
/// Each cycle is a node-index sequence starting at its smallest index;
/// the closing edge back to the first node is implied. The flag reports
/// whether the cap was reached, in which case more cycles may exist.
pub fn simple_cycles(g: &DominanceGraph, cap: usize) -> (Vec<Vec<usize>>, bool) {
    let n = g.len();
    let succ: Vec<Vec<usize>> = (0..n).map(|i| g.successors(i).collect()).collect();
    let mut search = Johnson {
        succ: &succ,
        allowed: vec![false; n],
        blocked: vec![false; n],
        b: vec![Vec::new(); n],
        stack: Vec::new(),
        found: Vec::new(),
        cap,
    };
    for s in 0..n {
        if search.found.len() >= cap {
            return (search.found, true);
        }
        let comp = component_of(&succ, s);
        if comp.iter().filter(|&&x| x).count() < 2 {
            continue;
        }
        search.allowed = comp;
        for i in 0..n {
            search.blocked[i] = false;
            search.b[i].clear();
        }
        search.circuit(s, s);
    }
    let truncated = search.found.len() >= cap;
    (search.found, truncated)
}

/// Strongly connected component of `s` in the subgraph induced by `s..n`.
fn component_of(succ: &[Vec<usize>], s: usize) -> Vec<bool> {
    let n = succ.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            let next: Vec<usize> = if forward {
                succ[u].clone()
            } else {
                (s..n).filter(|&p| succ[p].contains(&u)).collect()
            };
            for v in next {
                if v >= s && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    };
    let fwd = reach(true);
    let bwd = reach(false);
    fwd.iter().zip(&bwd).map(|(a, b)| *a && *b).collect()
}

struct Johnson<'a> {
    succ: &'a [Vec<usize>],
    allowed: Vec<bool>,
    blocked: Vec<bool>,
    b: Vec<Vec<usize>>,
    stack: Vec<usize>,
    found: Vec<Vec<usize>>,
    cap: usize,
}

impl Johnson<'_> {
    fn unblock(&mut self, u: usize) {
        self.blocked[u] = false;
        while let Some(w) = self.b[u].pop() {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }

    fn circuit(&mut self, v: usize, s: usize) -> bool {
        let mut closed = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for &w in &self.succ[v] {
            if self.found.len() >= self.cap {
                break;
            }
            if !self.allowed[w] {
                continue;
            }
            if w == s {
                self.found.push(self.stack.clone());
                closed = true;
            } else if !self.blocked[w] && self.circuit(w, s) {
                closed = true;
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for &w in &self.succ[v] {
                if self.allowed[w] && !self.b[w].contains(&v) {
                    self.b[w].push(v);
                }
            }
        }
        self.stack.pop();
        closed
    }
}
