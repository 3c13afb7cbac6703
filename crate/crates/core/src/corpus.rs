//! Seeded random instances for tests, batteries and benchmarks.
//!
//! Instance `i` of a corpus uses its own ChaCha stream, so corpora are
//! reproducible and any prefix of a corpus is stable under growing it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{CnfFormula, Lit};
use crate::graph::Graph;
use crate::program::{Atom, GroundProgram, MinimizeStatement, Rule, RuleShape, Sign};

/// Generator for instance `index` of the corpus seeded by `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgramShape {
    pub max_atoms: usize,
    pub max_rules: usize,
    pub max_head: usize,
    pub max_body: usize,
    pub minimize: bool,
}

impl Default for ProgramShape {
    fn default() -> Self {
        ProgramShape { max_atoms: 10, max_rules: 15, max_head: 2, max_body: 3, minimize: true }
    }
}

fn pick(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    all.truncate(k.min(n));
    all
}

/// A random ground program with atoms named `a0`, `a1`, ...
pub fn random_program(rng: &mut impl Rng, shape: &ProgramShape) -> GroundProgram {
    let n = rng.gen_range(1..=shape.max_atoms);
    let num_rules = rng.gen_range(0..=shape.max_rules);
    let mut rules = Vec::with_capacity(num_rules);
    while rules.len() < num_rules {
        // Constraints and negation are kept moderate so that most programs
        // stay consistent and many have several answer sets.
        let head_len = if rng.gen_bool(0.08) { 0 } else { rng.gen_range(1..=shape.max_head) };
        let body_len = rng.gen_range(0..=shape.max_body);
        let head = pick(rng, n, head_len);
        let body = pick(rng, n, body_len);
        let (neg, pos): (Vec<usize>, Vec<usize>) = body.into_iter().partition(|_| rng.gen_bool(0.35));
        if head.is_empty() && pos.is_empty() && neg.is_empty() {
            continue;
        }
        if let RuleShape::Rule(r) = Rule::normalize(head, pos, neg) {
            rules.push(r);
        }
    }
    let minimize = (shape.minimize && rng.gen_bool(0.5)).then(|| {
        let mut m = MinimizeStatement::new();
        let k = rng.gen_range(1..=n);
        for a in pick(rng, n, k) {
            let sign = if rng.gen_bool(0.7) { Sign::Pos } else { Sign::Neg };
            m.add(a, sign, rng.gen_range(1..=5));
        }
        m
    });
    let atoms = (0..n).map(|id| Atom { id, name: Some(format!("a{id}")) }).collect();
    GroundProgram::new(atoms, rules, minimize).expect("generated program is well formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CnfShape {
    pub max_vars: usize,
    pub max_clauses: usize,
    pub max_width: usize,
    pub weights: bool,
}

impl Default for CnfShape {
    fn default() -> Self {
        CnfShape { max_vars: 15, max_clauses: 25, max_width: 4, weights: true }
    }
}

pub fn random_cnf(rng: &mut impl Rng, shape: &CnfShape) -> CnfFormula {
    let n = rng.gen_range(1..=shape.max_vars);
    // Capping clauses relative to variables keeps most formulas satisfiable.
    let m = rng.gen_range(0..=shape.max_clauses.min(2 * n + 1));
    let clauses = (0..m)
        .map(|_| {
            let width = if rng.gen_bool(0.1) { 1 } else { rng.gen_range(2.min(shape.max_width)..=shape.max_width) };
            pick(rng, n, width)
                .into_iter()
                .map(|v| if rng.gen_bool(0.5) { Lit::positive(v + 1) } else { Lit::negative(v + 1) })
                .collect()
        })
        .collect();
    let formula = CnfFormula::new(n, clauses).expect("variables in range");
    if !shape.weights {
        return formula;
    }
    let mut weights = BTreeMap::new();
    for v in 1..=n {
        for lit in [Lit::positive(v), Lit::negative(v)] {
            if rng.gen_bool(0.8) {
                let num = rng.gen_range(0..=6);
                let den = rng.gen_range(1..=6);
                weights.insert(lit, BigRational::new(BigInt::from(num), BigInt::from(den)));
            }
        }
    }
    formula.with_weights(weights).expect("weights in range")
}

/// Each of `0..n` (shifted by `offset`) is included with probability 1/2.
pub fn random_subset(rng: &mut impl Rng, n: usize, offset: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(0.5)).map(|i| i + offset).collect()
}

/// Erdős–Rényi graph.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Uniformly labelled random recursive tree.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Graph {
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    Graph::from_edges(n, (1..n).map(|v| (label[rng.gen_range(0..v)], label[v])))
}

pub fn complete_graph(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a = random_program(&mut instance_rng(7, 3), &ProgramShape::default());
        let b = random_program(&mut instance_rng(7, 3), &ProgramShape::default());
        assert_eq!(a, b);
        let c = random_cnf(&mut instance_rng(7, 3), &CnfShape::default());
        assert_eq!(c, random_cnf(&mut instance_rng(7, 3), &CnfShape::default()));
    }

    #[test]
    fn shapes_respected() {
        for i in 0..200 {
            let p = random_program(&mut instance_rng(1, i), &ProgramShape::default());
            assert!(p.num_atoms() <= 10 && p.rules().len() <= 15);
            assert!(p.rules().iter().all(|r| r.head().len() <= 2 && r.pos().len() + r.neg().len() <= 3));
            let f = random_cnf(&mut instance_rng(1, i), &CnfShape::default());
            assert!(f.num_vars() <= 15 && f.clauses().len() <= 25);
            assert!(f.clauses().iter().all(|c| !c.is_empty() && c.len() <= 4));
        }
    }

    #[test]
    fn trees_and_cliques() {
        let t = random_tree(&mut instance_rng(2, 0), 30);
        assert_eq!(t.num_edges(), 29);
        assert_eq!(complete_graph(5).num_edges(), 10);
    }
}
