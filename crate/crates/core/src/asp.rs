//! Answer-set decision, counting, optimal counting and enumeration by
//! dynamic programming on a nice decomposition of the primal graph.
//!
//! A row pairs a candidate assignment of the bag atoms with the set of
//! counter-witnesses still alive for it. A counter-witness is a partial
//! interpretation below the candidate (pointwise) that satisfies every
//! reduct rule checked so far; its `strict` flag records whether it is
//! already known to differ from the candidate. A candidate is an answer set
//! iff it is a classical model and no strict counter-witness survives to
//! the root.
//!
//! Every rule is checked once, at the Forget node of its earliest-forgotten
//! atom, where all of its atoms are still in the child bag.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::dp::{
    insert_bit, purge, remove_bit, root_aggregate, traverse, Aggregate, CheckPlan, DpTable, HandlerError, Mode,
    NodeHandler, Origins, Row, RowData, TableStore, TraceRecord,
};
use crate::graph::primal_graph;
use crate::pipeline::{Error, Options, Prepared};
use crate::program::{AtomId, GroundProgram, Rule, Sign};
use crate::td::{NiceKind, NiceTreeDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Witness {
    pub sub: u64,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspRow {
    pub assignment: u64,
    /// Sorted, duplicate-free.
    pub witnesses: Vec<Witness>,
    pub count: BigUint,
    pub cost: BigInt,
}

impl AspRow {
    /// The single row of a leaf: empty candidate, non-strict self-witness.
    pub fn leaf() -> AspRow {
        AspRow {
            assignment: 0,
            witnesses: vec![Witness { sub: 0, strict: false }],
            count: BigUint::one(),
            cost: BigInt::zero(),
        }
    }

    pub fn has_strict_witness(&self) -> bool {
        self.witnesses.iter().any(|w| w.strict)
    }

    pub fn has_self_witness(&self) -> bool {
        self.witnesses.binary_search(&Witness { sub: self.assignment, strict: false }).is_ok()
    }
}

impl RowData for AspRow {
    type Key = (u64, Vec<Witness>, BigInt);
    type Count = BigUint;

    fn key(&self) -> Self::Key {
        (self.assignment, self.witnesses.clone(), self.cost.clone())
    }

    fn absorb(&mut self, other: Self) {
        self.count += other.count;
    }

    fn assignment(&self) -> u64 {
        self.assignment
    }

    fn is_solution(&self) -> bool {
        !self.has_strict_witness()
    }

    fn count(&self) -> &BigUint {
        &self.count
    }

    fn cost(&self) -> Option<&BigInt> {
        Some(&self.cost)
    }

    fn witness_count(&self) -> usize {
        self.witnesses.len()
    }
}

/// A rule as bit masks over one bag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleMask {
    pub head: u64,
    pub pos: u64,
    pub neg: u64,
}

impl RuleMask {
    /// # Panics
    /// If an atom of the rule is not in `bag`.
    pub fn new(rule: &Rule, bag: &[AtomId]) -> RuleMask {
        let mask = |atoms: &[AtomId]| {
            atoms.iter().fold(0u64, |m, a| {
                let i = bag.binary_search(a).expect("rule atom outside the bag");
                m | (1 << i)
            })
        };
        RuleMask { head: mask(rule.head()), pos: mask(rule.pos()), neg: mask(rule.neg()) }
    }

    /// Classical satisfaction by the candidate.
    pub fn satisfied(&self, candidate: u64) -> bool {
        let body = self.pos & !candidate == 0 && self.neg & candidate == 0;
        !body || self.head & candidate != 0
    }

    /// Satisfaction of the rule's reduct with respect to `candidate` by the
    /// counter-witness `sub`.
    pub fn reduct_satisfied(&self, candidate: u64, sub: u64) -> bool {
        if self.neg & candidate != 0 {
            return true;
        }
        self.pos & !sub != 0 || self.head & sub != 0
    }
}

fn canonical(mut w: Vec<Witness>) -> Vec<Witness> {
    w.sort_unstable();
    w.dedup();
    w
}

/// Row transformation when an atom enters the bag at bit `position`.
/// `true_weight` is charged when the atom is set true.
pub fn introduce_row(row: &AspRow, position: usize, true_weight: u64, out: &mut Vec<AspRow>) {
    let low = AspRow {
        assignment: insert_bit(row.assignment, position, false),
        witnesses: row
            .witnesses
            .iter()
            .map(|w| Witness { sub: insert_bit(w.sub, position, false), strict: w.strict })
            .collect(),
        count: row.count.clone(),
        cost: row.cost.clone(),
    };
    let mut high_w = Vec::with_capacity(2 * row.witnesses.len());
    for w in &row.witnesses {
        high_w.push(Witness { sub: insert_bit(w.sub, position, true), strict: w.strict });
        high_w.push(Witness { sub: insert_bit(w.sub, position, false), strict: true });
    }
    let high = AspRow {
        assignment: insert_bit(row.assignment, position, true),
        witnesses: canonical(high_w),
        count: row.count.clone(),
        cost: &row.cost + BigInt::from(true_weight),
    };
    // Inserting a bit preserves order, so `low` stays canonical.
    out.push(low);
    out.push(high);
}

/// Row transformation when the atom at child-bag bit `position` leaves the
/// bag. `due` are the rules checked here (masks over the child bag);
/// `false_weight` is charged when the atom is false.
pub fn forget_row(row: &AspRow, position: usize, due: &[RuleMask], false_weight: u64) -> Option<AspRow> {
    let a = row.assignment;
    if !due.iter().all(|r| r.satisfied(a)) {
        return None;
    }
    let witnesses = canonical(
        row.witnesses
            .iter()
            .filter(|w| due.iter().all(|r| r.reduct_satisfied(a, w.sub)))
            .map(|w| Witness { sub: remove_bit(w.sub, position), strict: w.strict })
            .collect(),
    );
    let is_false = (a >> position) & 1 == 0;
    let out = AspRow {
        assignment: remove_bit(a, position),
        witnesses,
        count: row.count.clone(),
        cost: if is_false { &row.cost + BigInt::from(false_weight) } else { row.cost.clone() },
    };
    debug_assert!(out.has_self_witness(), "a classical model satisfies its own reduct");
    Some(out)
}

/// Combines two rows over the same bag and assignment. `bag_cost` is the
/// positive-literal weight of the shared assignment, charged in both
/// operands and therefore subtracted once.
pub fn join_rows(left: &AspRow, right: &AspRow, bag_cost: u64) -> AspRow {
    debug_assert_eq!(left.assignment, right.assignment);
    let mut witnesses = Vec::new();
    let (l, r) = (&left.witnesses, &right.witnesses);
    let (mut i, mut j) = (0, 0);
    while i < l.len() && j < r.len() {
        let (bl, br) = (l[i].sub, r[j].sub);
        if bl < br {
            i += 1;
        } else if br < bl {
            j += 1;
        } else {
            let ie = i + l[i..].iter().take_while(|w| w.sub == bl).count();
            let je = j + r[j..].iter().take_while(|w| w.sub == bl).count();
            for x in &l[i..ie] {
                for y in &r[j..je] {
                    witnesses.push(Witness { sub: bl, strict: x.strict || y.strict });
                }
            }
            i = ie;
            j = je;
        }
    }
    AspRow {
        assignment: left.assignment,
        witnesses: canonical(witnesses),
        count: &left.count * &right.count,
        cost: &left.cost + &right.cost - BigInt::from(bag_cost),
    }
}

/// Introduce step over a whole table (stand-alone form of the handler).
pub fn introduce_atom(table: &DpTable<AspRow>, atom: AtomId, true_weight: u64) -> DpTable<AspRow> {
    let mut bag = table.bag.clone();
    let position = bag.binary_search(&atom).expect_err("atom already in bag");
    bag.insert(position, atom);
    let mut produced = Vec::new();
    let mut out = Vec::new();
    for (i, row) in table.rows.iter().enumerate() {
        introduce_row(&row.data, position, true_weight, &mut out);
        produced.extend(out.drain(..).map(|data| Row { data, origins: Origins::Unary(vec![i as u32]) }));
    }
    DpTable::from_rows(table.node, NiceKind::Introduce(atom), bag, vec![table.node], produced)
}

/// Forget step over a whole table: checks `due` rules, drops dead
/// witnesses, projects `atom` away and merges equal rows.
pub fn forget_atom(table: &DpTable<AspRow>, atom: AtomId, due: &[&Rule], false_weight: u64) -> DpTable<AspRow> {
    let position = table.bag.binary_search(&atom).expect("atom in bag");
    let masks: Vec<RuleMask> = due.iter().map(|r| RuleMask::new(r, &table.bag)).collect();
    let mut bag = table.bag.clone();
    bag.remove(position);
    let produced = table.rows.iter().enumerate().filter_map(|(i, row)| {
        forget_row(&row.data, position, &masks, false_weight)
            .map(|data| Row { data, origins: Origins::Unary(vec![i as u32]) })
    });
    DpTable::from_rows(table.node, NiceKind::Forget(atom), bag, vec![table.node], produced)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot join tables over bags {0:?} and {1:?}")]
pub struct BagMismatch(pub Vec<AtomId>, pub Vec<AtomId>);

/// Join step over two tables; `true_weights[i]` is the positive minimize
/// weight of `bag[i]`.
pub fn join_tables(
    t1: &DpTable<AspRow>,
    t2: &DpTable<AspRow>,
    true_weights: &[u64],
) -> Result<DpTable<AspRow>, BagMismatch> {
    if t1.bag != t2.bag {
        return Err(BagMismatch(t1.bag.clone(), t2.bag.clone()));
    }
    let mut produced = Vec::new();
    for (i, l) in t1.rows.iter().enumerate() {
        for (j, r) in t2.rows.iter().enumerate() {
            if l.data.assignment == r.data.assignment {
                let cost = bag_cost(l.data.assignment, true_weights);
                produced.push(Row {
                    data: join_rows(&l.data, &r.data, cost),
                    origins: Origins::Binary(vec![(i as u32, j as u32)]),
                });
            }
        }
    }
    Ok(DpTable::from_rows(t1.node, NiceKind::Join, t1.bag.clone(), vec![t1.node, t2.node], produced))
}

fn bag_cost(assignment: u64, true_weights: &[u64]) -> u64 {
    true_weights.iter().enumerate().filter(|(i, _)| (assignment >> i) & 1 == 1).map(|(_, w)| w).sum()
}

/// Rules checked at each Forget node, indexed by rule position in the
/// program. Empty rules are not placed; they make the leaf emit no rows.
pub type RuleCheckPlan = CheckPlan;

/// Places every non-empty rule at the Forget node of its
/// earliest-forgotten atom.
pub fn plan_rule_checks(program: &GroundProgram, ntd: &NiceTreeDecomposition) -> Result<RuleCheckPlan, Error> {
    let scopes: Vec<Vec<AtomId>> = program.rules().iter().map(Rule::atoms).collect();
    let plan = crate::dp::plan_checks(
        scopes.iter().enumerate().filter(|(_, s)| !s.is_empty()).map(|(i, s)| (i, s.as_slice())),
        ntd,
    )?;
    Ok(plan)
}

/// [`NodeHandler`] for answer sets of `program`.
pub struct AspHandler<'a> {
    program: &'a GroundProgram,
    ntd: &'a NiceTreeDecomposition,
    /// Rule masks over the child bag, per Forget node.
    due: Vec<Vec<RuleMask>>,
    charge_costs: bool,
}

impl<'a> AspHandler<'a> {
    pub fn new(program: &'a GroundProgram, ntd: &'a NiceTreeDecomposition, plan: &RuleCheckPlan, mode: Mode) -> Self {
        let due = (0..ntd.len())
            .map(|node| {
                let n = ntd.node(node);
                if n.children.len() != 1 || !matches!(n.kind, NiceKind::Forget(_)) {
                    return Vec::new();
                }
                let child_bag = &ntd.node(n.children[0]).bag;
                plan.due(node).iter().map(|&r| RuleMask::new(&program.rules()[r], child_bag)).collect()
            })
            .collect();
        AspHandler { program, ntd, due, charge_costs: mode == Mode::Optimization }
    }

    fn weight(&self, atom: AtomId, sign: Sign) -> u64 {
        match (self.charge_costs, self.program.minimize()) {
            (true, Some(m)) => m.weight(atom, sign),
            _ => 0,
        }
    }
}

impl NodeHandler for AspHandler<'_> {
    type Row = AspRow;

    fn leaf(&self, _node: usize) -> Result<Vec<AspRow>, HandlerError> {
        if self.program.has_empty_constraint() {
            return Ok(Vec::new());
        }
        Ok(vec![AspRow::leaf()])
    }

    fn introduce(
        &self,
        _node: usize,
        vertex: usize,
        position: usize,
        row: &AspRow,
        out: &mut Vec<AspRow>,
    ) -> Result<(), HandlerError> {
        introduce_row(row, position, self.weight(vertex, Sign::Pos), out);
        Ok(())
    }

    fn forget(&self, node: usize, vertex: usize, position: usize, row: &AspRow) -> Result<Option<AspRow>, HandlerError> {
        Ok(forget_row(row, position, &self.due[node], self.weight(vertex, Sign::Neg)))
    }

    fn join(&self, node: usize, left: &AspRow, right: &AspRow) -> Result<Option<AspRow>, HandlerError> {
        let bag = &self.ntd.node(node).bag;
        let cost = bag
            .iter()
            .enumerate()
            .filter(|(i, _)| (left.assignment >> i) & 1 == 1)
            .map(|(_, &a)| self.weight(a, Sign::Pos))
            .sum();
        Ok(Some(join_rows(left, right, cost)))
    }
}

/// Result of the first pass: the decomposition used and every node table.
#[derive(Debug, Clone)]
pub struct AspRun {
    pub prepared: Prepared,
    pub mode: Mode,
    pub store: TableStore<AspRow>,
}

impl AspRun {
    pub fn aggregate(&self) -> Aggregate<BigUint> {
        root_aggregate(&self.store, self.mode)
    }
}

/// Decomposes the primal graph and runs the answer-set DP in `mode`.
pub fn solve(
    program: &GroundProgram,
    opts: &Options,
    mode: Mode,
    trace: Option<&mut Vec<TraceRecord>>,
) -> Result<AspRun, Error> {
    let graph = primal_graph(program);
    let scopes: Vec<Vec<AtomId>> = program.rules().iter().map(Rule::atoms).collect();
    let prepared = Prepared::new(
        &graph,
        scopes.iter().enumerate().filter(|(_, s)| !s.is_empty()).map(|(i, s)| (i, s.as_slice())),
        opts,
    )?;
    let handler = AspHandler::new(program, &prepared.ntd, &prepared.plan, mode);
    let store = traverse(&prepared.ntd, &handler, trace)?;
    Ok(AspRun { prepared, mode, store })
}

pub fn count_answer_sets(program: &GroundProgram, opts: &Options) -> Result<BigUint, Error> {
    match solve(program, opts, Mode::Counting, None)?.aggregate() {
        Aggregate::Count(c) => Ok(c),
        _ => unreachable!(),
    }
}

pub fn is_consistent(program: &GroundProgram, opts: &Options) -> Result<bool, Error> {
    match solve(program, opts, Mode::Decision, None)?.aggregate() {
        Aggregate::Consistent(b) => Ok(b),
        _ => unreachable!(),
    }
}

/// Minimum cost and number of answer sets attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    /// `None` iff the program has no answer set.
    pub cost: Option<BigInt>,
    pub count: BigUint,
}

/// A program without minimize statement has cost 0 everywhere.
pub fn count_optimal(program: &GroundProgram, opts: &Options) -> Result<Optimum, Error> {
    match solve(program, opts, Mode::Optimization, None)?.aggregate() {
        Aggregate::Optimum { cost, count } => Ok(Optimum { cost, count }),
        _ => unreachable!(),
    }
}

/// Materializes the answer sets represented by a purged counting store by
/// following origin links from the root solution rows. Each answer set is
/// produced exactly once. Output is sorted lexicographically by atom ids
/// and cut after `limit` entries.
pub fn answer_sets_from_store(
    ntd: &NiceTreeDecomposition,
    purged: &TableStore<AspRow>,
    limit: Option<usize>,
) -> Vec<Vec<AtomId>> {
    type Partial = Vec<Vec<AtomId>>;
    let mut partial: Vec<Option<Vec<Partial>>> = vec![None; purged.tables.len()];
    for (node, table) in purged.tables.iter().enumerate() {
        let n = ntd.node(node);
        let mut child: Vec<Vec<Partial>> = n.children.iter().map(|&c| partial[c].take().expect("child done")).collect();
        let mine: Vec<Partial> = table
            .rows
            .iter()
            .map(|row| match (&row.origins, n.kind) {
                (Origins::Leaf, _) => vec![Vec::new()],
                (Origins::Unary(o), NiceKind::Forget(v)) => {
                    let child_table = &purged.tables[n.children[0]];
                    let position = child_table.bag.binary_search(&v).expect("forgotten atom in child bag");
                    let mut out = Vec::new();
                    for &i in o {
                        let is_true = (child_table.rows[i as usize].data.assignment >> position) & 1 == 1;
                        for set in &child[0][i as usize] {
                            let mut s = set.clone();
                            if is_true {
                                s.push(v);
                            }
                            out.push(s);
                        }
                    }
                    out
                }
                (Origins::Unary(o), _) => o.iter().flat_map(|&i| child[0][i as usize].iter().cloned()).collect(),
                (Origins::Binary(o), _) => {
                    let mut out = Vec::new();
                    for &(i, j) in o {
                        for l in &child[0][i as usize] {
                            for r in &child[1][j as usize] {
                                let mut s = l.clone();
                                s.extend_from_slice(r);
                                out.push(s);
                            }
                        }
                    }
                    out
                }
            })
            .collect();
        child.clear();
        partial[node] = Some(mine);
    }
    let root = partial.pop().flatten().unwrap_or_default();
    let mut sets: Vec<Vec<AtomId>> = purged
        .root()
        .rows
        .iter()
        .zip(root)
        .filter(|(row, _)| row.data.is_solution())
        .flat_map(|(_, sets)| sets)
        .map(|mut s| {
            s.sort_unstable();
            s
        })
        .collect();
    sets.sort_unstable();
    if let Some(limit) = limit {
        sets.truncate(limit);
    }
    sets
}

/// Counting pass, purge, then top-down materialization.
pub fn enumerate_answer_sets(
    program: &GroundProgram,
    limit: Option<usize>,
    opts: &Options,
) -> Result<Vec<Vec<AtomId>>, Error> {
    let run = solve(program, opts, Mode::Counting, None)?;
    let purged = purge(&run.store);
    Ok(answer_sets_from_store(&run.prepared.ntd, &purged, limit))
}
