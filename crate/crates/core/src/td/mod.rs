//! Tree decompositions: construction from elimination orderings, validation,
//! normalization into nice form, and the PACE `.td` exchange format.

mod nice;
mod ordering;
mod pace;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;

pub use nice::{make_nice, NiceKind, NiceNode, NiceTreeDecomposition};
pub use ordering::{elimination_ordering, td_from_ordering, Heuristic};
pub use pace::{read_td, write_td};

/// Largest bag size minus one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Width(pub usize);

impl Width {
    /// Width of a decomposition whose largest bag has `max_bag` vertices.
    /// Decompositions with only empty bags have width 0.
    pub fn from_max_bag(max_bag: usize) -> Width {
        Width(max_bag.saturating_sub(1))
    }
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TdError {
    #[error("decomposition has no nodes")]
    Empty,
    #[error("tree edge ({0}, {1}) refers to a missing node")]
    BadEdge(usize, usize),
    #[error("decomposition nodes do not form a tree")]
    NotATree,
}

/// A rooted tree decomposition with arbitrary node arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    num_vertices: usize,
    bags: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl TreeDecomposition {
    /// Builds a decomposition from bags and undirected tree edges, rooted at
    /// `root`. Bags are sorted and deduplicated.
    pub fn new(
        num_vertices: usize,
        bags: Vec<Vec<usize>>,
        tree_edges: &[(usize, usize)],
        root: usize,
    ) -> Result<Self, TdError> {
        let n = bags.len();
        if n == 0 {
            return Err(TdError::Empty);
        }
        if root >= n {
            return Err(TdError::BadEdge(root, root));
        }
        if tree_edges.len() != n - 1 {
            return Err(TdError::NotATree);
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in tree_edges {
            if a >= n || b >= n || a == b {
                return Err(TdError::BadEdge(a, b));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    children[x].push(y);
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(TdError::NotATree);
        }
        for c in &mut children {
            c.sort_unstable();
        }
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        Ok(TreeDecomposition { num_vertices, bags, parent, children, root })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    pub fn bag(&self, node: usize) -> &[usize] {
        &self.bags[node]
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Tree edges as `(child, parent)` pairs.
    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        (0..self.num_nodes()).filter_map(|x| self.parent[x].map(|p| (x, p))).collect()
    }

    pub fn width(&self) -> Width {
        width(self)
    }

    /// Returns a copy with `bags[node]` replaced, for constructing invalid
    /// decompositions in tests and for external tooling.
    pub fn with_bag(mut self, node: usize, mut bag: Vec<usize>) -> Self {
        bag.sort_unstable();
        bag.dedup();
        self.bags[node] = bag;
        self
    }
}

pub fn width(td: &TreeDecomposition) -> Width {
    Width::from_max_bag(td.bags.iter().map(Vec::len).max().unwrap_or(0))
}

/// Which decomposition condition failed, with a concrete witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownVertex(usize),
    VertexNotCovered(usize),
    EdgeNotCovered(usize, usize),
    ConnectednessBroken(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownVertex(v) => write!(f, "bag mentions unknown vertex {v}"),
            Violation::VertexNotCovered(v) => write!(f, "vertex {v} occurs in no bag"),
            Violation::EdgeNotCovered(u, v) => write!(f, "edge {{{u}, {v}}} is in no bag"),
            Violation::ConnectednessBroken(v) => write!(f, "bags containing vertex {v} are not connected"),
        }
    }
}

/// Checks vertex coverage, edge coverage and connectedness, reporting the
/// first violation found.
pub fn validate_td(graph: &Graph, td: &TreeDecomposition) -> Result<(), Violation> {
    let n = graph.num_vertices();
    let mut occurrences = vec![0usize; n];
    let mut node_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (node, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return Err(Violation::UnknownVertex(v));
            }
            occurrences[v] += 1;
            node_of[v].push(node);
        }
    }
    if let Some(v) = occurrences.iter().position(|&c| c == 0) {
        return Err(Violation::VertexNotCovered(v));
    }
    for (u, v) in graph.edges() {
        let covered = node_of[u].iter().any(|&x| td.bags[x].binary_search(&v).is_ok());
        if !covered {
            return Err(Violation::EdgeNotCovered(u, v));
        }
    }
    // A vertex's nodes induce a forest; it is connected iff it has exactly
    // one fewer tree edge than nodes.
    let mut inner_edges = vec![0usize; n];
    for (x, p) in td.tree_edges() {
        for &v in &td.bags[x] {
            if td.bags[p].binary_search(&v).is_ok() {
                inner_edges[v] += 1;
            }
        }
    }
    if let Some(v) = (0..n).find(|&v| inner_edges[v] + 1 != occurrences[v]) {
        return Err(Violation::ConnectednessBroken(v));
    }
    Ok(())
}

/// How to obtain the decomposition fed to the dynamic programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecompositionOptions {
    pub heuristic: Heuristic,
    pub seed: u64,
    /// Number of seeds tried (`seed`, `seed + 1`, ...); the narrowest result
    /// wins, ties going to the lowest seed.
    pub seeds: usize,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        DecompositionOptions { heuristic: Heuristic::MinFill, seed: 0, seeds: 1 }
    }
}

/// A chosen decomposition together with the seed that produced it.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub td: TreeDecomposition,
    pub seed: u64,
}

impl Decomposition {
    pub fn width(&self) -> Width {
        self.td.width()
    }
}

/// Decomposes `graph` once per seed, possibly in parallel, and keeps the
/// lowest width (lowest seed on ties).
pub fn decompose(graph: &Graph, opts: &DecompositionOptions) -> Decomposition {
    let seeds: Vec<u64> = (0..opts.seeds.max(1) as u64).map(|i| opts.seed.wrapping_add(i)).collect();
    let mut all: Vec<Decomposition> = seeds
        .par_iter()
        .map(|&seed| {
            let order = elimination_ordering(graph, opts.heuristic, seed);
            Decomposition { td: td_from_ordering(graph, &order), seed }
        })
        .collect();
    // par_iter().collect() preserves input order.
    let best = (0..all.len()).min_by_key(|&i| (all[i].width(), i)).expect("at least one seed");
    all.swap_remove(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)])
    }

    #[test]
    fn single_bag_is_valid() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]);
        let td = TreeDecomposition::new(4, vec![vec![0, 1, 2, 3]], &[], 0).unwrap();
        assert_eq!(validate_td(&g, &td), Ok(()));
        assert_eq!(td.width(), Width(3));
    }

    #[test]
    fn missing_edge_bag() {
        let g = path3();
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], &[(0, 1)], 0).unwrap();
        assert_eq!(validate_td(&g, &td), Ok(()));
        let broken = td.with_bag(1, vec![2]);
        assert_eq!(validate_td(&g, &broken), Err(Violation::EdgeNotCovered(1, 2)));
    }

    #[test]
    fn broken_connectedness() {
        let g = path3();
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![2], vec![1, 2]], &[(0, 1), (1, 2)], 0).unwrap();
        assert_eq!(validate_td(&g, &td), Err(Violation::ConnectednessBroken(1)));
    }

    #[test]
    fn uncovered_and_unknown_vertices() {
        let g = Graph::new(2);
        let td = TreeDecomposition::new(2, vec![vec![0]], &[], 0).unwrap();
        assert_eq!(validate_td(&g, &td), Err(Violation::VertexNotCovered(1)));
        let td = TreeDecomposition::new(2, vec![vec![0, 1, 5]], &[], 0).unwrap();
        assert_eq!(validate_td(&g, &td), Err(Violation::UnknownVertex(5)));
    }

    #[test]
    fn malformed_trees() {
        assert_eq!(TreeDecomposition::new(0, vec![], &[], 0), Err(TdError::Empty));
        let cyc = TreeDecomposition::new(0, vec![vec![]; 3], &[(0, 1), (1, 0)], 0);
        assert_eq!(cyc, Err(TdError::NotATree));
        assert_eq!(TreeDecomposition::new(0, vec![vec![]; 2], &[(0, 3)], 0), Err(TdError::BadEdge(0, 3)));
    }

    #[test]
    fn decompose_picks_lowest_width_then_seed() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]);
        let opts = DecompositionOptions { heuristic: Heuristic::MinDegree, seed: 7, seeds: 5 };
        let d = decompose(&g, &opts);
        let widths: Vec<Width> = (7..12)
            .map(|s| td_from_ordering(&g, &elimination_ordering(&g, Heuristic::MinDegree, s)).width())
            .collect();
        let min = *widths.iter().min().unwrap();
        assert_eq!(d.width(), min);
        assert_eq!(d.seed, 7 + widths.iter().position(|&w| w == min).unwrap() as u64);
    }
}
