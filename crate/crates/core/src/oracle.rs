//! Exhaustive reference implementations. They share nothing with the
//! decomposition-based engines beyond the input types and are meant as
//! ground truth on tiny instances. Size guards are hard errors.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cnf::{CnfFormula, Lit};
use crate::graph::Graph;
use crate::program::{AtomId, GroundProgram};
use crate::Instance;

pub const MAX_ORACLE_SYMBOLS: usize = 20;
pub const MAX_ORACLE_VERTICES: usize = 11;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("instance too large for brute force: {size} {what} (limit {limit})")]
pub struct TooLarge {
    pub what: &'static str,
    pub size: usize,
    pub limit: usize,
}

fn guard(what: &'static str, size: usize, limit: usize) -> Result<(), TooLarge> {
    if size > limit {
        return Err(TooLarge { what, size, limit });
    }
    Ok(())
}

fn mask(atoms: &[AtomId]) -> u32 {
    atoms.iter().fold(0, |m, &a| m | (1 << a))
}

/// Answer sets as interpretations (bit `a` set iff atom `a` is true), in
/// ascending numeric order.
fn answer_set_masks(program: &GroundProgram) -> Result<Vec<u32>, TooLarge> {
    let n = program.num_atoms();
    guard("atoms", n, MAX_ORACLE_SYMBOLS)?;
    let rules: Vec<(u32, u32, u32)> =
        program.rules().iter().map(|r| (mask(r.head()), mask(r.pos()), mask(r.neg()))).collect();
    let mut out = Vec::new();
    for m in 0u32..(1 << n) {
        let model = rules.iter().all(|&(h, p, ng)| !(p & !m == 0 && ng & m == 0) || h & m != 0);
        if !model {
            continue;
        }
        let reduct: Vec<(u32, u32)> = rules.iter().filter(|r| r.2 & m == 0).map(|&(h, p, _)| (h, p)).collect();
        // Proper subsets of m, from m - 1 down to 0.
        let mut sub = m;
        let mut minimal = true;
        while sub != 0 {
            sub = (sub - 1) & m;
            if reduct.iter().all(|&(h, p)| p & !sub != 0 || h & sub != 0) {
                minimal = false;
                break;
            }
        }
        if minimal {
            out.push(m);
        }
    }
    Ok(out)
}

fn atoms_of(m: u32, n: usize) -> Vec<AtomId> {
    (0..n).filter(|&a| m >> a & 1 == 1).collect()
}

/// All answer sets (via the reduct definition), each a sorted atom list,
/// in lexicographic order.
pub fn brute_answer_sets(program: &GroundProgram) -> Result<Vec<Vec<AtomId>>, TooLarge> {
    let n = program.num_atoms();
    let mut sets: Vec<Vec<AtomId>> = answer_set_masks(program)?.into_iter().map(|m| atoms_of(m, n)).collect();
    sets.sort();
    Ok(sets)
}

/// Minimum minimize cost over all answer sets and how many attain it;
/// `(None, 0)` if there are none.
pub fn brute_optimum(program: &GroundProgram) -> Result<(Option<BigInt>, BigUint), TooLarge> {
    let mut best: Option<u64> = None;
    let mut count = 0u64;
    for m in answer_set_masks(program)? {
        let cost = program.minimize().map_or(0, |s| s.cost_of(|a| m >> a & 1 == 1));
        match best {
            Some(b) if b < cost => {}
            Some(b) if b == cost => count += 1,
            _ => {
                best = Some(cost);
                count = 1;
            }
        }
    }
    Ok((best.map(BigInt::from), BigUint::from(count)))
}

fn cnf_models(formula: &CnfFormula) -> Result<Vec<u32>, TooLarge> {
    let n = formula.num_vars();
    guard("variables", n, MAX_ORACLE_SYMBOLS)?;
    let clauses: Vec<(u32, u32)> = formula
        .clauses()
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(p, ng), l| {
                let bit = 1 << (l.var() - 1);
                if l.is_positive() {
                    (p | bit, ng)
                } else {
                    (p, ng | bit)
                }
            })
        })
        .collect();
    Ok((0u32..(1 << n)).filter(|&m| clauses.iter().all(|&(p, ng)| m & p != 0 || !m & ng != 0)).collect())
}

pub fn brute_count_models(formula: &CnfFormula) -> Result<BigUint, TooLarge> {
    Ok(BigUint::from(cnf_models(formula)?.len()))
}

pub fn brute_weighted_count(formula: &CnfFormula) -> Result<BigRational, TooLarge> {
    let n = formula.num_vars();
    let mut total = BigRational::zero();
    for m in cnf_models(formula)? {
        let mut w = BigRational::one();
        for v in 1..=n {
            w *= formula.weight(if m >> (v - 1) & 1 == 1 { Lit::positive(v) } else { Lit::negative(v) });
        }
        total += w;
    }
    Ok(total)
}

/// Number of distinct restrictions of solutions to `projection` (atom ids
/// for programs, 1-based variables for formulas).
pub fn brute_projected_count(instance: Instance<'_>, projection: &[usize]) -> Result<BigUint, TooLarge> {
    let (solutions, p) = match instance {
        Instance::Asp(program) => (answer_set_masks(program)?, projection.iter().fold(0u32, |m, &a| m | 1 << a)),
        Instance::Cnf(formula) => (cnf_models(formula)?, projection.iter().fold(0u32, |m, &v| m | 1 << (v - 1))),
    };
    let distinct: BTreeSet<u32> = solutions.into_iter().map(|m| m & p).collect();
    Ok(BigUint::from(distinct.len()))
}

/// Exact treewidth by dynamic programming over vertex subsets: the best
/// width of eliminating `S` first is `min over v in S` of the larger of the
/// best width for `S \ v` and the degree `v` has once `S \ v` is gone.
pub fn brute_treewidth(graph: &Graph) -> Result<usize, TooLarge> {
    let n = graph.num_vertices();
    guard("vertices", n, MAX_ORACLE_VERTICES)?;
    let adj: Vec<u32> = (0..n).map(|v| graph.neighbors(v).iter().fold(0, |m, &w| m | 1 << w)).collect();
    // Vertices outside `s ∪ {v}` reachable from `v` through `s`.
    let q = |s: u32, v: usize| -> u32 {
        let mut seen = 1u32 << v;
        let mut stack = vec![v];
        let mut outside = 0u32;
        while let Some(u) = stack.pop() {
            let mut nb = adj[u] & !seen;
            while nb != 0 {
                let w = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                seen |= 1 << w;
                if s >> w & 1 == 1 {
                    stack.push(w);
                } else {
                    outside += 1;
                }
            }
        }
        outside
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![i64::MAX; 1 << n];
    tw[0] = -1;
    for s in 1..=full {
        let mut best = i64::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let without = s & !(1 << v);
            best = best.min(tw[without as usize].max(q(without, v) as i64));
        }
        tw[s as usize] = best;
    }
    Ok(tw[full as usize].max(0) as usize)
}
