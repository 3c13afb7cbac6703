//! Model counting and weighted model counting for CNF formulas.
//!
//! Rows are plain assignments of the bag variables. Each clause is checked
//! at the Forget node of its earliest-forgotten variable. In weighted mode a
//! variable's literal weight is multiplied in when the variable is
//! forgotten, so every variable contributes exactly once per model.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cnf::{CnfFormula, Lit};
use crate::dp::{
    insert_bit, remove_bit, root_aggregate, traverse, Aggregate, HandlerError, Mode, NodeHandler, RowData,
    TableStore, TraceRecord,
};
use crate::graph::primal_graph_cnf;
use crate::pipeline::{Error, Options, Prepared};
use crate::td::NiceKind;

/// Values a SAT row can carry: plain counts or rational weights.
pub trait SatValue: Clone + Zero + One + std::ops::Add<Output = Self> + std::ops::Mul<Output = Self> + std::fmt::Debug {}

impl SatValue for BigUint {}
impl SatValue for BigRational {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatRow<V> {
    pub assignment: u64,
    pub value: V,
}

impl<V: SatValue> RowData for SatRow<V> {
    type Key = u64;
    type Count = V;

    fn key(&self) -> u64 {
        self.assignment
    }

    fn absorb(&mut self, other: Self) {
        self.value = self.value.clone() + other.value;
    }

    fn assignment(&self) -> u64 {
        self.assignment
    }

    fn is_solution(&self) -> bool {
        true
    }

    fn count(&self) -> &V {
        &self.value
    }
}

/// A clause as bit masks over one bag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseMask {
    pub pos: u64,
    pub neg: u64,
}

impl ClauseMask {
    pub fn new(clause: &[Lit], bag: &[usize]) -> ClauseMask {
        let mut m = ClauseMask { pos: 0, neg: 0 };
        for l in clause {
            let i = bag.binary_search(&(l.var() - 1)).expect("clause variable outside the bag");
            if l.is_positive() {
                m.pos |= 1 << i;
            } else {
                m.neg |= 1 << i;
            }
        }
        m
    }

    pub fn satisfied(&self, assignment: u64) -> bool {
        assignment & self.pos != 0 || !assignment & self.neg != 0
    }
}

/// How the value of a row changes when a variable is forgotten.
trait Forgetting {
    type Value: SatValue;
    fn charge(&self, var: usize, value: bool, v: &Self::Value) -> Self::Value;
}

struct Unweighted;

impl Forgetting for Unweighted {
    type Value = BigUint;

    fn charge(&self, _: usize, _: bool, v: &BigUint) -> BigUint {
        v.clone()
    }
}

struct Weighted<'a>(&'a CnfFormula);

impl Forgetting for Weighted<'_> {
    type Value = BigRational;

    fn charge(&self, var: usize, value: bool, v: &BigRational) -> BigRational {
        let lit = if value { Lit::positive(var + 1) } else { Lit::negative(var + 1) };
        v * self.0.weight(lit)
    }
}

struct SatHandler<'a, F> {
    formula: &'a CnfFormula,
    due: Vec<Vec<ClauseMask>>,
    forgetting: F,
}

impl<'a, F> SatHandler<'a, F> {
    fn new(formula: &'a CnfFormula, prepared: &Prepared, forgetting: F) -> Self {
        let ntd = &prepared.ntd;
        let due = (0..ntd.len())
            .map(|node| {
                let n = ntd.node(node);
                if !matches!(n.kind, NiceKind::Forget(_)) {
                    return Vec::new();
                }
                let child_bag = &ntd.node(n.children[0]).bag;
                prepared.plan.due(node).iter().map(|&c| ClauseMask::new(&formula.clauses()[c], child_bag)).collect()
            })
            .collect();
        SatHandler { formula, due, forgetting }
    }
}

impl<F: Forgetting> NodeHandler for SatHandler<'_, F> {
    type Row = SatRow<F::Value>;

    fn leaf(&self, _node: usize) -> Result<Vec<Self::Row>, HandlerError> {
        if self.formula.has_empty_clause() {
            return Ok(Vec::new());
        }
        Ok(vec![SatRow { assignment: 0, value: F::Value::one() }])
    }

    fn introduce(
        &self,
        _node: usize,
        _var: usize,
        position: usize,
        row: &Self::Row,
        out: &mut Vec<Self::Row>,
    ) -> Result<(), HandlerError> {
        for bit in [false, true] {
            out.push(SatRow { assignment: insert_bit(row.assignment, position, bit), value: row.value.clone() });
        }
        Ok(())
    }

    fn forget(
        &self,
        node: usize,
        var: usize,
        position: usize,
        row: &Self::Row,
    ) -> Result<Option<Self::Row>, HandlerError> {
        if !self.due[node].iter().all(|c| c.satisfied(row.assignment)) {
            return Ok(None);
        }
        let value = self.forgetting.charge(var, (row.assignment >> position) & 1 == 1, &row.value);
        if value.is_zero() {
            return Ok(None);
        }
        Ok(Some(SatRow { assignment: remove_bit(row.assignment, position), value }))
    }

    fn join(&self, _node: usize, left: &Self::Row, right: &Self::Row) -> Result<Option<Self::Row>, HandlerError> {
        Ok(Some(SatRow { assignment: left.assignment, value: left.value.clone() * right.value.clone() }))
    }
}

/// Decomposition and every node table of one counting pass.
#[derive(Debug, Clone)]
pub struct SatRun<V> {
    pub prepared: Prepared,
    pub store: TableStore<SatRow<V>>,
}

fn prepare(formula: &CnfFormula, opts: &Options) -> Result<Prepared, Error> {
    let scopes: Vec<Vec<usize>> =
        formula.clauses().iter().map(|c| c.iter().map(|l| l.var() - 1).collect()).collect();
    Prepared::new(
        &primal_graph_cnf(formula),
        scopes.iter().enumerate().filter(|(_, s)| !s.is_empty()).map(|(i, s)| (i, s.as_slice())),
        opts,
    )
}

/// Unweighted pass; the root aggregate is the model count.
pub fn solve_counting(
    formula: &CnfFormula,
    opts: &Options,
    trace: Option<&mut Vec<TraceRecord>>,
) -> Result<SatRun<BigUint>, Error> {
    let prepared = prepare(formula, opts)?;
    let store = traverse(&prepared.ntd, &SatHandler::new(formula, &prepared, Unweighted), trace)?;
    Ok(SatRun { prepared, store })
}

/// Weighted pass; rows whose weight drops to zero are discarded.
pub fn solve_weighted(
    formula: &CnfFormula,
    opts: &Options,
    trace: Option<&mut Vec<TraceRecord>>,
) -> Result<SatRun<BigRational>, Error> {
    let prepared = prepare(formula, opts)?;
    let store = traverse(&prepared.ntd, &SatHandler::new(formula, &prepared, Weighted(formula)), trace)?;
    Ok(SatRun { prepared, store })
}

fn root_value<V: SatValue>(store: &TableStore<SatRow<V>>) -> V {
    match root_aggregate(store, Mode::Counting) {
        Aggregate::Count(c) => c,
        _ => unreachable!(),
    }
}

/// Number of assignments to all declared variables that satisfy every clause.
pub fn count_models(formula: &CnfFormula, opts: &Options) -> Result<BigUint, Error> {
    Ok(root_value(&solve_counting(formula, opts, None)?.store))
}

/// Sum over models of the product of the weights of their true literals.
/// Literals without a weight weigh 1.
pub fn weighted_count(formula: &CnfFormula, opts: &Options) -> Result<BigRational, Error> {
    Ok(root_value(&solve_weighted(formula, opts, None)?.store))
}
