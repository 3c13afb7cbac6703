use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TreeDecomposition;
use crate::graph::Graph;

/// Greedy elimination-ordering heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heuristic {
    /// Eliminate a vertex adding the fewest fill-in edges.
    MinFill,
    /// Eliminate a vertex of minimum current degree.
    MinDegree,
}

impl Heuristic {
    pub const ALL: [Heuristic; 2] = [Heuristic::MinFill, Heuristic::MinDegree];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::MinFill => "min-fill",
            Heuristic::MinDegree => "min-degree",
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min-fill" => Ok(Heuristic::MinFill),
            "min-degree" => Ok(Heuristic::MinDegree),
            other => Err(format!("unknown heuristic `{other}`")),
        }
    }
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let ns: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &x) in ns.iter().enumerate() {
        for &y in &ns[i + 1..] {
            if !adj[x].contains(&y) {
                missing += 1;
            }
        }
    }
    missing
}

/// Greedy elimination ordering. Ties between equally scored vertices are
/// broken uniformly at random from a generator seeded with `seed`, so the
/// result is a deterministic function of `(graph, heuristic, seed)`.
pub fn elimination_ordering(graph: &Graph, heuristic: Heuristic, seed: u64) -> Vec<usize> {
    let n = graph.num_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| graph.neighbors(v).clone()).collect();
    let score_of = |adj: &[BTreeSet<usize>], v: usize| match heuristic {
        Heuristic::MinDegree => adj[v].len(),
        Heuristic::MinFill => fill_in(adj, v),
    };
    let mut score: Vec<usize> = (0..n).map(|v| score_of(&adj, v)).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut ties = Vec::new();

    for _ in 0..n {
        let best = (0..n).filter(|&v| alive[v]).map(|v| score[v]).min().expect("vertices remain");
        ties.clear();
        ties.extend((0..n).filter(|&v| alive[v] && score[v] == best));
        let v = ties[rng.gen_range(0..ties.len())];

        let ns: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &x) in ns.iter().enumerate() {
            adj[x].remove(&v);
            for &y in &ns[i + 1..] {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        adj[v].clear();
        alive[v] = false;
        order.push(v);

        let mut touched: BTreeSet<usize> = ns.iter().copied().collect();
        if heuristic == Heuristic::MinFill {
            for &x in &ns {
                touched.extend(adj[x].iter().copied());
            }
        }
        for w in touched {
            score[w] = score_of(&adj, w);
        }
    }
    order
}

/// Bucket elimination: the node of vertex `v` has bag `{v}` plus the
/// neighbours of `v` eliminated after it (in the filled graph), and hangs
/// below the node of the earliest-eliminated of those neighbours. Nodes of
/// further connected components are attached to the final node.
///
/// # Panics
/// If `ordering` is not a permutation of the vertices.
pub fn td_from_ordering(graph: &Graph, ordering: &[usize]) -> TreeDecomposition {
    let n = graph.num_vertices();
    assert_eq!(ordering.len(), n, "ordering must list every vertex");
    if n == 0 {
        return TreeDecomposition::new(0, vec![vec![]], &[], 0).expect("single node");
    }
    let mut position = vec![usize::MAX; n];
    for (i, &v) in ordering.iter().enumerate() {
        assert!(position[v] == usize::MAX, "ordering repeats vertex {v}");
        position[v] = i;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| graph.neighbors(v).clone()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n - 1);
    for (i, &v) in ordering.iter().enumerate() {
        let later: Vec<usize> = adj[v].iter().copied().collect();
        for (k, &x) in later.iter().enumerate() {
            adj[x].remove(&v);
            for &y in &later[k + 1..] {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        let mut bag = later.clone();
        bag.push(v);
        bags.push(bag);
        if i + 1 < n {
            let parent = later.iter().map(|&x| position[x]).min().unwrap_or(n - 1);
            edges.push((i, parent));
        }
    }
    TreeDecomposition::new(n, bags, &edges, n - 1).expect("bucket elimination yields a tree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::td::validate_td;
    use crate::td::Width;

    #[test]
    fn star_leaves_first_under_min_degree() {
        // Once two leaves are gone the centre and the last leaf both have
        // degree 1, so only the first two positions are forced.
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]);
        let mut centre_last = 0;
        for seed in 0..20 {
            let order = elimination_ordering(&star, Heuristic::MinDegree, seed);
            assert!(order[0] != 0 && order[1] != 0, "seed {seed}: {order:?}");
            centre_last += usize::from(order[3] == 0);
        }
        assert!(centre_last > 0);
    }

    #[test]
    fn triangle_has_width_two() {
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        for h in Heuristic::ALL {
            let td = td_from_ordering(&tri, &elimination_ordering(&tri, h, 3));
            assert_eq!(td.width(), Width(2));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let g = Graph::from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4)]);
        for h in Heuristic::ALL {
            assert_eq!(elimination_ordering(&g, h, 42), elimination_ordering(&g, h, 42));
        }
    }

    #[test]
    fn bucket_elimination_examples() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let td = td_from_ordering(&path, &[0, 2, 1]);
        assert_eq!(td.width(), Width(1));
        assert_eq!(validate_td(&path, &td), Ok(()));

        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(td_from_ordering(&k4, &[2, 0, 3, 1]).width(), Width(3));

        let empty = Graph::new(5);
        let td = td_from_ordering(&empty, &[4, 3, 2, 1, 0]);
        assert_eq!(td.width(), Width(0));
        assert_eq!(validate_td(&empty, &td), Ok(()));
    }

    #[test]
    fn zero_vertices() {
        let td = td_from_ordering(&Graph::new(0), &[]);
        assert_eq!(td.num_nodes(), 1);
        assert_eq!(td.width(), Width(0));
    }

    #[test]
    fn heuristic_names_parse() {
        for h in Heuristic::ALL {
            assert_eq!(h.name().parse::<Heuristic>(), Ok(h));
        }
        assert!("min-width".parse::<Heuristic>().is_err());
    }
}
