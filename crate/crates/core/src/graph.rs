//! Primal and incidence graphs of programs and formulas.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::cnf::CnfFormula;
use crate::program::GroundProgram;

/// Simple undirected graph on vertices `0..num_vertices`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    pub fn new(num_vertices: usize) -> Self {
        Graph { adj: vec![BTreeSet::new(); num_vertices], labels: None }
    }

    pub fn from_edges(num_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Graph::new(num_vertices);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.adj.len());
        self.labels = Some(labels);
        self
    }

    /// Adds `{u, v}`; self-loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    /// Makes `vertices` pairwise adjacent.
    pub fn add_clique(&mut self, vertices: &[usize]) {
        for (i, &u) in vertices.iter().enumerate() {
            for &v in &vertices[i + 1..] {
                self.add_edge(u, v);
            }
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.range(u + 1..).map(move |&v| (u, v)))
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    /// PACE `.gr` text: `p tw n m` followed by 1-based edges.
    pub fn to_pace(&self) -> String {
        let mut s = format!("p tw {} {}\n", self.num_vertices(), self.num_edges());
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{} {}", u + 1, v + 1);
        }
        s
    }

    /// Reads the PACE `.gr` format.
    pub fn from_pace(text: &str) -> Result<Graph, String> {
        let mut graph: Option<Graph> = None;
        for (i, line) in text.lines().enumerate() {
            let t: Vec<&str> = line.split_whitespace().collect();
            match t[..] {
                [] | ["c", ..] => {}
                ["p", "tw", n, _] => {
                    let n = n.parse().map_err(|_| format!("line {}: bad vertex count", i + 1))?;
                    graph = Some(Graph::new(n));
                }
                [u, v] => {
                    let g = graph.as_mut().ok_or("edge before header")?;
                    let parse = |x: &str| -> Result<usize, String> {
                        match x.parse::<usize>() {
                            Ok(k) if (1..=g.num_vertices()).contains(&k) => Ok(k - 1),
                            _ => Err(format!("line {}: bad vertex `{x}`", i + 1)),
                        }
                    };
                    let (u, v) = (parse(u)?, parse(v)?);
                    g.add_edge(u, v);
                }
                _ => return Err(format!("line {}: unexpected `{line}`", i + 1)),
            }
        }
        graph.ok_or_else(|| "missing `p tw` header".to_string())
    }
}

/// Atoms are vertices; the atoms of each rule form a clique.
pub fn primal_graph(program: &GroundProgram) -> Graph {
    let mut g = Graph::new(program.num_atoms());
    for rule in program.rules() {
        g.add_clique(&rule.atoms());
    }
    g.with_labels((0..program.num_atoms()).map(|a| program.atom_name(a)).collect())
}

/// Bipartite graph: vertices `0..n` are atoms, `n..n+r` are rules, and an
/// atom is adjacent to every rule it occurs in.
pub fn incidence_graph(program: &GroundProgram) -> Graph {
    let n = program.num_atoms();
    let mut g = Graph::new(n + program.rules().len());
    for (r, rule) in program.rules().iter().enumerate() {
        for a in rule.atoms() {
            g.add_edge(a, n + r);
        }
    }
    let labels = (0..n)
        .map(|a| program.atom_name(a))
        .chain((0..program.rules().len()).map(|r| format!("r{}", r + 1)))
        .collect();
    g.with_labels(labels)
}

/// Vertex `v - 1` stands for DIMACS variable `v`; clauses are cliques.
pub fn primal_graph_cnf(formula: &CnfFormula) -> Graph {
    let mut g = Graph::new(formula.num_vars());
    for clause in formula.clauses() {
        let vars: Vec<usize> = clause.iter().map(|l| l.var() - 1).collect();
        g.add_clique(&vars);
    }
    g
}

/// Bipartite graph: vertices `0..n` are variables (`v - 1` for DIMACS
/// variable `v`), `n..n+m` are clauses.
pub fn incidence_graph_cnf(formula: &CnfFormula) -> Graph {
    let n = formula.num_vars();
    let mut g = Graph::new(n + formula.clauses().len());
    for (c, clause) in formula.clauses().iter().enumerate() {
        for l in clause {
            g.add_edge(l.var() - 1, n + c);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::parse_dimacs;
    use crate::program::parse_ground_program;

    fn edges(g: &Graph) -> Vec<(usize, usize)> {
        g.edges().collect()
    }

    #[test]
    fn primal_examples() {
        let g = primal_graph(&parse_ground_program("a :- b, not c.").unwrap());
        assert_eq!(edges(&g), vec![(0, 1), (0, 2), (1, 2)]);
        let g = primal_graph(&parse_ground_program("a. b.").unwrap());
        assert_eq!((g.num_vertices(), g.num_edges()), (2, 0));
        let g = primal_graph(&parse_ground_program("a :- not b.  b :- not a.").unwrap());
        assert_eq!(edges(&g), vec![(0, 1)]);
    }

    #[test]
    fn incidence_examples() {
        let g = incidence_graph(&parse_ground_program("a :- b.").unwrap());
        assert_eq!(edges(&g), vec![(0, 2), (1, 2)]);
        assert_eq!(g.label(2), Some("r1"));
        let g = incidence_graph(&parse_ground_program("").unwrap());
        assert_eq!(g.num_vertices(), 0);
        let g = incidence_graph(&parse_ground_program("a :- b, not c.").unwrap());
        assert_eq!(edges(&g), vec![(0, 3), (1, 3), (2, 3)]);
    }

    #[test]
    fn cnf_primal_examples() {
        let g = primal_graph_cnf(&parse_dimacs("p cnf 3 1\n1 2 -3 0").unwrap());
        assert_eq!(g.num_edges(), 3);
        let g = primal_graph_cnf(&parse_dimacs("p cnf 4 0").unwrap());
        assert_eq!((g.num_vertices(), g.num_edges()), (4, 0));
        let g = primal_graph_cnf(&parse_dimacs("p cnf 3 2\n1 2 0\n2 3 0").unwrap());
        assert_eq!(edges(&g), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn pace_round_trip() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let text = g.to_pace();
        assert!(text.starts_with("p tw 4 4\n"));
        assert_eq!(Graph::from_pace(&text).unwrap(), g);
        assert!(Graph::from_pace("1 2\n").is_err());
    }
}
