//! Projected counting: the number of distinct restrictions of solutions to
//! a projection set `P`.
//!
//! Runs on top of a purged counting store. For a node `t`, every projection
//! `π` (an assignment of the `P` symbols in or below the bag) that some
//! partial solution under `t` realizes is compatible with a set `Z(π)` of
//! rows of `t`: those rows whose partial solutions include one with
//! projection `π`. All rows of `Z(π)` agree on `P ∩ bag`. A [`ProjTable`]
//! maps each non-empty row set `Z` to the number of projections `π` with
//! `Z(π) = Z` exactly. Keys arise only by propagating child keys through the
//! origin links, so they never cover more than the row sets that occur.
//!
//! The number of projections compatible with at least one row of a set `O`
//! is then the sum over keys meeting `O`; by inclusion-exclusion it also
//! equals the alternating sum of the "compatible with all of `O'`" counts
//! over non-empty `O' ⊆ O`. At the purged root every row is a solution row,
//! so the projected count is the sum over all keys.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::asp;
use crate::dp::{bag_position, purge, DpTable, Mode, Origins, RowData, TableStore, TraceRecord};
use crate::pipeline::{Error, Options, Prepared};
use crate::sat;
use crate::td::{NiceKind, NiceTreeDecomposition, Width};
use crate::Instance;

/// Sorted indices into one purged table.
pub type RowSet = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjTable {
    pub node: usize,
    /// Row set ↦ number of projections compatible with exactly that set.
    pub entries: BTreeMap<RowSet, BigUint>,
}

impl ProjTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Projections compatible with at least one row of `rows`.
    pub fn value(&self, rows: &[u32]) -> BigUint {
        let wanted: BTreeSet<u32> = rows.iter().copied().collect();
        self.entries
            .iter()
            .filter(|(z, _)| z.iter().any(|r| wanted.contains(r)))
            .fold(BigUint::zero(), |acc, (_, m)| acc + m)
    }

    /// Projections compatible with every row of `rows`.
    pub fn intersection_value(&self, rows: &[u32]) -> BigUint {
        self.entries
            .iter()
            .filter(|(z, _)| rows.iter().all(|r| z.binary_search(r).is_ok()))
            .fold(BigUint::zero(), |acc, (_, m)| acc + m)
    }

    /// [`ProjTable::value`] recomputed by inclusion-exclusion over
    /// intersection counts. Exponential in `rows.len()`.
    pub fn value_by_inclusion_exclusion(&self, rows: &[u32]) -> BigUint {
        assert!(rows.len() < 32, "row set too large for inclusion-exclusion");
        let mut total = BigInt::zero();
        for subset in 1u32..(1 << rows.len()) {
            let chosen: Vec<u32> = (0..rows.len()).filter(|&i| subset >> i & 1 == 1).map(|i| rows[i]).collect();
            let term = BigInt::from(self.intersection_value(&chosen));
            if chosen.len() % 2 == 1 {
                total += term;
            } else {
                total -= term;
            }
        }
        assert!(!total.is_negative(), "inclusion-exclusion produced a negative count");
        total.to_biguint().expect("non-negative")
    }

    /// Sum of all multiplicities.
    pub fn total(&self) -> BigUint {
        self.entries.values().fold(BigUint::zero(), |acc, m| acc + m)
    }
}

fn add(entries: &mut BTreeMap<RowSet, BigUint>, key: RowSet, m: BigUint) {
    if key.is_empty() || m.is_zero() {
        return;
    }
    *entries.entry(key).or_insert_with(BigUint::zero) += m;
}

fn collect(parents: impl Iterator<Item = u32>) -> RowSet {
    let mut v: RowSet = parents.collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Pass-3 step at one node. `table` is the node's purged table, `child_tables`
/// and `child_proj` belong to its children, and `in_projection[v]` tells
/// whether vertex `v` is projected.
pub fn build_proj_table<D: RowData>(
    table: &DpTable<D>,
    child_tables: &[&DpTable<D>],
    child_proj: &[&ProjTable],
    in_projection: &[bool],
) -> ProjTable {
    let mut entries = BTreeMap::new();
    match table.kind {
        NiceKind::Leaf => {
            if !table.is_empty() {
                entries.insert(vec![0], BigUint::from(1u8));
            }
        }
        NiceKind::Introduce(_) | NiceKind::Forget(_) => {
            let mut parents_of: Vec<Vec<u32>> = vec![Vec::new(); child_tables[0].len()];
            for (r, row) in table.rows.iter().enumerate() {
                let Origins::Unary(o) = &row.origins else { unreachable!("unary node") };
                for &c in o {
                    parents_of[c as usize].push(r as u32);
                }
            }
            let split = match table.kind {
                NiceKind::Introduce(v) if in_projection[v] => Some(bag_position(&table.bag, v)),
                _ => None,
            };
            for (z, m) in &child_proj[0].entries {
                let reached = collect(z.iter().flat_map(|&c| parents_of[c as usize].iter().copied()));
                match split {
                    None => add(&mut entries, reached, m.clone()),
                    Some(bit) => {
                        let (t, f): (RowSet, RowSet) = reached
                            .into_iter()
                            .partition(|&r| table.rows[r as usize].data.assignment() >> bit & 1 == 1);
                        add(&mut entries, t, m.clone());
                        add(&mut entries, f, m.clone());
                    }
                }
            }
        }
        NiceKind::Join => {
            let mut parents_of: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
            for (r, row) in table.rows.iter().enumerate() {
                let Origins::Binary(o) = &row.origins else { unreachable!("binary node") };
                for &pair in o {
                    parents_of.entry(pair).or_default().push(r as u32);
                }
            }
            let pmask = table
                .bag
                .iter()
                .enumerate()
                .filter(|(_, &v)| in_projection[v])
                .fold(0u64, |m, (i, _)| m | 1 << i);
            let group = |t: &DpTable<D>, z: &RowSet| t.rows[z[0] as usize].data.assignment() & pmask;
            let mut right_groups: HashMap<u64, Vec<(&RowSet, &BigUint)>> = HashMap::new();
            for (z, m) in &child_proj[1].entries {
                right_groups.entry(group(child_tables[1], z)).or_default().push((z, m));
            }
            let parents_of = &parents_of;
            for (z1, m1) in &child_proj[0].entries {
                let Some(partners) = right_groups.get(&group(child_tables[0], z1)) else { continue };
                for &(z2, m2) in partners {
                    let reached = collect(z1.iter().flat_map(|&i| {
                        z2.iter().flat_map(move |&j| parents_of.get(&(i, j)).into_iter().flatten().copied())
                    }));
                    add(&mut entries, reached, m1 * m2);
                }
            }
        }
    }
    ProjTable { node: table.node, entries }
}

/// Pass 3 over a whole purged store; returns every node's table.
pub fn project_store<D: RowData>(
    ntd: &NiceTreeDecomposition,
    purged: &TableStore<D>,
    in_projection: &[bool],
) -> Vec<ProjTable> {
    let mut out: Vec<ProjTable> = Vec::with_capacity(purged.tables.len());
    for (node, table) in purged.tables.iter().enumerate() {
        let children = &ntd.node(node).children;
        let child_tables: Vec<&DpTable<D>> = children.iter().map(|&c| &purged.tables[c]).collect();
        let child_proj: Vec<&ProjTable> = children.iter().map(|&c| &out[c]).collect();
        let t = build_proj_table(table, &child_tables, &child_proj, in_projection);
        out.push(t);
    }
    out
}

/// Result of the three passes.
#[derive(Debug, Clone)]
pub struct ProjectionRun {
    pub count: BigUint,
    pub tables: Vec<ProjTable>,
    /// Sizes of the purged tables the keys range over.
    pub purged_rows: Vec<usize>,
    pub width: Width,
    /// Seed of the heuristic decomposition, `None` for a supplied one.
    pub seed: Option<u64>,
}

fn membership(n: usize, projection: &[usize], offset: usize, describe: impl Fn(usize) -> String) -> Result<Vec<bool>, Error> {
    let mut in_p = vec![false; n];
    for &s in projection {
        match s.checked_sub(offset) {
            Some(v) if v < n => in_p[v] = true,
            _ => return Err(Error::ProjectionOutOfRange(describe(s))),
        }
    }
    Ok(in_p)
}

/// Solve, purge, then project. `projection` holds atom ids for programs and
/// 1-based variables for formulas.
pub fn run_projection(
    instance: Instance<'_>,
    projection: &[usize],
    opts: &Options,
    trace: Option<&mut Vec<TraceRecord>>,
) -> Result<ProjectionRun, Error> {
    fn finish<D: RowData>(prepared: &Prepared, store: &TableStore<D>, in_p: &[bool]) -> ProjectionRun {
        let ntd = &prepared.ntd;
        let purged = purge(store);
        let tables = project_store(ntd, &purged, in_p);
        let count = tables.last().map(ProjTable::total).unwrap_or_default();
        ProjectionRun {
            count,
            tables,
            purged_rows: purged.tables.iter().map(DpTable::len).collect(),
            width: ntd.width(),
            seed: prepared.seed,
        }
    }
    match instance {
        Instance::Asp(program) => {
            let in_p = membership(program.num_atoms(), projection, 0, |a| format!("atom {a}"))?;
            let run = asp::solve(program, opts, Mode::Counting, trace)?;
            Ok(finish(&run.prepared, &run.store, &in_p))
        }
        Instance::Cnf(formula) => {
            let in_p = membership(formula.num_vars(), projection, 1, |v| format!("variable {v}"))?;
            let run = sat::solve_counting(formula, opts, trace)?;
            Ok(finish(&run.prepared, &run.store, &in_p))
        }
    }
}

pub fn projected_count(instance: Instance<'_>, projection: &[usize], opts: &Options) -> Result<BigUint, Error> {
    Ok(run_projection(instance, projection, opts, None)?.count)
}

/// Resolves atom names to ids.
pub fn atoms_by_name<S: AsRef<str>>(
    program: &crate::program::GroundProgram,
    names: &[S],
) -> Result<Vec<usize>, Error> {
    names
        .iter()
        .map(|n| program.atom_by_name(n.as_ref()).ok_or_else(|| Error::ProjectionOutOfRange(n.as_ref().to_string())))
        .collect()
}
