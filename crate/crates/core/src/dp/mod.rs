//! Post-order dynamic programming over nice tree decompositions.
//!
//! A [`NodeHandler`] describes how rows are created at leaves and how they
//! are transformed at introduce, forget and join nodes. [`traverse`] runs
//! the handler bottom-up, merging rows with equal keys and recording for
//! every row the child rows it was derived from. Those origin links drive
//! [`purge`] (top-down removal of rows that reach no solution) and the
//! later passes built on top of purged tables.

mod bits;
mod plan;
mod trace;

use std::collections::HashMap;
use std::hash::Hash;
use std::ops::Add;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::td::{NiceKind, NiceTreeDecomposition};

pub use bits::{bag_position, insert_bit, remove_bit, MAX_BAG};
pub use plan::{plan_checks, CheckPlan, PlanError};
pub use trace::TraceRecord;

/// What the root aggregate reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Decision,
    Counting,
    Optimization,
}

/// Row payload of a concrete dynamic program.
pub trait RowData: Clone {
    /// Rows with equal keys are merged.
    type Key: Hash + Eq + Ord + Clone;
    type Count: Clone + Zero + Add<Output = Self::Count>;

    fn key(&self) -> Self::Key;
    /// Folds `other` (same key) into `self`.
    fn absorb(&mut self, other: Self);
    /// Truth values of the bag vertices; bit `i` belongs to `bag[i]`.
    fn assignment(&self) -> u64;
    /// Whether this row, at the empty root bag, represents solutions.
    fn is_solution(&self) -> bool;
    fn count(&self) -> &Self::Count;
    fn cost(&self) -> Option<&BigInt> {
        None
    }
    fn witness_count(&self) -> usize {
        0
    }
}

/// Child rows a row was derived from, as indices into the child tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origins {
    Leaf,
    Unary(Vec<u32>),
    Binary(Vec<(u32, u32)>),
}

impl Origins {
    fn merge(&mut self, other: Origins) {
        match (self, other) {
            (Origins::Leaf, Origins::Leaf) => {}
            (Origins::Unary(a), Origins::Unary(b)) => {
                a.extend(b);
                a.sort_unstable();
                a.dedup();
            }
            (Origins::Binary(a), Origins::Binary(b)) => {
                a.extend(b);
                a.sort_unstable();
                a.dedup();
            }
            _ => unreachable!("rows of one table share an origin shape"),
        }
    }

    fn remap(&self, maps: &[Vec<u32>]) -> Origins {
        match self {
            Origins::Leaf => Origins::Leaf,
            Origins::Unary(v) => Origins::Unary(v.iter().map(|&i| maps[0][i as usize]).collect()),
            Origins::Binary(v) => {
                Origins::Binary(v.iter().map(|&(i, j)| (maps[0][i as usize], maps[1][j as usize])).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row<D> {
    pub data: D,
    pub origins: Origins,
}

/// Rows of one nice-decomposition node, sorted by key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpTable<D> {
    pub node: usize,
    pub kind: NiceKind,
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
    pub rows: Vec<Row<D>>,
}

impl<D: RowData> DpTable<D> {
    /// Builds a table by merging rows with equal keys.
    pub fn from_rows(
        node: usize,
        kind: NiceKind,
        bag: Vec<usize>,
        children: Vec<usize>,
        produced: impl IntoIterator<Item = Row<D>>,
    ) -> Self {
        let mut index: HashMap<D::Key, usize> = HashMap::new();
        let mut rows: Vec<Row<D>> = Vec::new();
        for row in produced {
            match index.get(&row.data.key()) {
                Some(&i) => {
                    rows[i].data.absorb(row.data);
                    rows[i].origins.merge(row.origins);
                }
                None => {
                    index.insert(row.data.key(), rows.len());
                    rows.push(row);
                }
            }
        }
        rows.sort_by_cached_key(|r| r.data.key());
        DpTable { node, kind, bag, children, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn total_count(&self) -> D::Count {
        self.rows.iter().fold(D::Count::zero(), |acc, r| acc + r.data.count().clone())
    }

    pub fn keys_unique(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].data.key() < w[1].data.key())
    }
}

/// Tables of every node of one pass, indexed like the nice decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableStore<D> {
    pub tables: Vec<DpTable<D>>,
}

impl<D: RowData> TableStore<D> {
    pub fn root(&self) -> &DpTable<D> {
        self.tables.last().expect("store has a root table")
    }

    pub fn total_rows(&self) -> usize {
        self.tables.iter().map(DpTable::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct HandlerError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DpError {
    #[error("node {node}: {source}")]
    Handler { node: usize, source: HandlerError },
    #[error("bag of {0} vertices exceeds the supported maximum of {MAX_BAG}")]
    WidthTooLarge(usize),
}

/// Node-type specific row transformations.
pub trait NodeHandler {
    type Row: RowData;

    fn leaf(&self, node: usize) -> Result<Vec<Self::Row>, HandlerError>;

    /// Emits the rows derived from `row` when `vertex` joins the bag.
    /// `position` is the bit index of `vertex` in the new bag.
    fn introduce(
        &self,
        node: usize,
        vertex: usize,
        position: usize,
        row: &Self::Row,
        out: &mut Vec<Self::Row>,
    ) -> Result<(), HandlerError>;

    /// `position` is the bit index of `vertex` in the child bag. Returns
    /// `None` if the row is discarded.
    fn forget(
        &self,
        node: usize,
        vertex: usize,
        position: usize,
        row: &Self::Row,
    ) -> Result<Option<Self::Row>, HandlerError>;

    /// Called for every pair of child rows with equal assignments.
    fn join(&self, node: usize, left: &Self::Row, right: &Self::Row) -> Result<Option<Self::Row>, HandlerError>;
}

fn wrap(node: usize) -> impl Fn(HandlerError) -> DpError {
    move |source| DpError::Handler { node, source }
}

/// Runs `handler` at a single nice-decomposition node given its children's
/// tables.
pub fn apply_node<H: NodeHandler>(
    ntd: &NiceTreeDecomposition,
    node: usize,
    handler: &H,
    children: &[&DpTable<H::Row>],
) -> Result<DpTable<H::Row>, DpError> {
    let n = ntd.node(node);
    let err = wrap(node);
    let mut produced: Vec<Row<H::Row>> = Vec::new();
    match n.kind {
        NiceKind::Leaf => {
            for data in handler.leaf(node).map_err(&err)? {
                produced.push(Row { data, origins: Origins::Leaf });
            }
        }
        NiceKind::Introduce(v) => {
            let position = bag_position(&n.bag, v);
            let mut out = Vec::new();
            for (i, row) in children[0].rows.iter().enumerate() {
                out.clear();
                handler.introduce(node, v, position, &row.data, &mut out).map_err(&err)?;
                for data in out.drain(..) {
                    produced.push(Row { data, origins: Origins::Unary(vec![i as u32]) });
                }
            }
        }
        NiceKind::Forget(v) => {
            let position = bag_position(&children[0].bag, v);
            for (i, row) in children[0].rows.iter().enumerate() {
                if let Some(data) = handler.forget(node, v, position, &row.data).map_err(&err)? {
                    produced.push(Row { data, origins: Origins::Unary(vec![i as u32]) });
                }
            }
        }
        NiceKind::Join => {
            let mut by_assignment: HashMap<u64, Vec<u32>> = HashMap::new();
            for (j, row) in children[1].rows.iter().enumerate() {
                by_assignment.entry(row.data.assignment()).or_default().push(j as u32);
            }
            for (i, left) in children[0].rows.iter().enumerate() {
                let Some(partners) = by_assignment.get(&left.data.assignment()) else { continue };
                for &j in partners {
                    let right = &children[1].rows[j as usize];
                    if let Some(data) = handler.join(node, &left.data, &right.data).map_err(&err)? {
                        produced.push(Row { data, origins: Origins::Binary(vec![(i as u32, j)]) });
                    }
                }
            }
        }
    }
    Ok(DpTable::from_rows(node, n.kind, n.bag.clone(), n.children.clone(), produced))
}

/// Computes every node's table in post-order. When `trace` is given, one
/// record per node is appended to it.
pub fn traverse<H: NodeHandler>(
    ntd: &NiceTreeDecomposition,
    handler: &H,
    mut trace: Option<&mut Vec<TraceRecord>>,
) -> Result<TableStore<H::Row>, DpError> {
    if ntd.max_bag_size() > MAX_BAG {
        return Err(DpError::WidthTooLarge(ntd.max_bag_size()));
    }
    let mut tables: Vec<DpTable<H::Row>> = Vec::with_capacity(ntd.len());
    for node in 0..ntd.len() {
        let children: Vec<&DpTable<H::Row>> = ntd.node(node).children.iter().map(|&c| &tables[c]).collect();
        let table = apply_node(ntd, node, handler, &children)?;
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceRecord::of(&table));
        }
        tables.push(table);
    }
    Ok(TableStore { tables })
}

/// Marks, top-down, every row that takes part in deriving a root solution
/// row.
pub fn mark_reachable<D: RowData>(store: &TableStore<D>) -> Vec<Vec<bool>> {
    let mut marked: Vec<Vec<bool>> = store.tables.iter().map(|t| vec![false; t.len()]).collect();
    let root = store.tables.len() - 1;
    for (i, row) in store.tables[root].rows.iter().enumerate() {
        marked[root][i] = row.data.is_solution();
    }
    for node in (0..store.tables.len()).rev() {
        let table = &store.tables[node];
        for (i, row) in table.rows.iter().enumerate() {
            if !marked[node][i] {
                continue;
            }
            match &row.origins {
                Origins::Leaf => {}
                Origins::Unary(v) => {
                    for &o in v {
                        marked[table.children[0]][o as usize] = true;
                    }
                }
                Origins::Binary(v) => {
                    for &(l, r) in v {
                        marked[table.children[0]][l as usize] = true;
                        marked[table.children[1]][r as usize] = true;
                    }
                }
            }
        }
    }
    marked
}

/// Deletes every row that does not extend to a root solution row. Root
/// aggregates are unchanged.
pub fn purge<D: RowData>(store: &TableStore<D>) -> TableStore<D> {
    let marked = mark_reachable(store);
    let maps: Vec<Vec<u32>> = marked
        .iter()
        .map(|m| {
            let mut next = 0u32;
            m.iter()
                .map(|&keep| {
                    let id = if keep { next } else { u32::MAX };
                    next += u32::from(keep);
                    id
                })
                .collect()
        })
        .collect();
    let tables = store
        .tables
        .iter()
        .enumerate()
        .map(|(node, t)| {
            let child_maps: Vec<Vec<u32>> = t.children.iter().map(|&c| maps[c].clone()).collect();
            let rows = t
                .rows
                .iter()
                .zip(&marked[node])
                .filter(|(_, &keep)| keep)
                .map(|(r, _)| Row { data: r.data.clone(), origins: r.origins.remap(&child_maps) })
                .collect();
            DpTable { node: t.node, kind: t.kind, bag: t.bag.clone(), children: t.children.clone(), rows }
        })
        .collect();
    TableStore { tables }
}

/// True if every row of `store` lies on a derivation of a root solution.
pub fn all_rows_reachable<D: RowData>(store: &TableStore<D>) -> bool {
    mark_reachable(store).iter().all(|m| m.iter().all(|&b| b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Aggregate<C> {
    Consistent(bool),
    Count(C),
    /// `cost` is `None` when there is no solution.
    Optimum { cost: Option<BigInt>, count: C },
}

/// Reads the answer off the root table.
pub fn root_aggregate<D: RowData>(store: &TableStore<D>, mode: Mode) -> Aggregate<D::Count> {
    let solutions = store.root().rows.iter().filter(|r| r.data.is_solution());
    match mode {
        Mode::Decision => Aggregate::Consistent(solutions.count() > 0),
        Mode::Counting => Aggregate::Count(solutions.fold(D::Count::zero(), |acc, r| acc + r.data.count().clone())),
        Mode::Optimization => {
            let mut best: Option<BigInt> = None;
            let mut count = D::Count::zero();
            for row in solutions {
                let cost = row.data.cost().cloned().unwrap_or_default();
                match &best {
                    Some(b) if *b < cost => {}
                    Some(b) if *b == cost => count = count + row.data.count().clone(),
                    _ => {
                        best = Some(cost);
                        count = row.data.count().clone();
                    }
                }
            }
            Aggregate::Optimum { cost: best, count }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::td::{elimination_ordering, make_nice, td_from_ordering, Heuristic};
    use num_bigint::BigUint;
    use std::cell::RefCell;

    /// Counts all assignments; records the visiting order.
    #[derive(Debug, Clone, PartialEq, Eq)]
    struct Plain {
        a: u64,
        c: BigUint,
    }

    impl RowData for Plain {
        type Key = u64;
        type Count = BigUint;
        fn key(&self) -> u64 {
            self.a
        }
        fn absorb(&mut self, other: Self) {
            self.c += other.c;
        }
        fn assignment(&self) -> u64 {
            self.a
        }
        fn is_solution(&self) -> bool {
            true
        }
        fn count(&self) -> &BigUint {
            &self.c
        }
    }

    #[derive(Default)]
    struct Recorder {
        visited: RefCell<Vec<usize>>,
    }

    impl Recorder {
        fn visit(&self, node: usize) {
            let mut v = self.visited.borrow_mut();
            if v.last() != Some(&node) {
                v.push(node);
            }
        }
    }

    impl NodeHandler for Recorder {
        type Row = Plain;
        fn leaf(&self, node: usize) -> Result<Vec<Plain>, HandlerError> {
            self.visit(node);
            Ok(vec![Plain { a: 0, c: BigUint::from(1u8) }])
        }
        fn introduce(&self, node: usize, _: usize, pos: usize, row: &Plain, out: &mut Vec<Plain>) -> Result<(), HandlerError> {
            self.visit(node);
            for val in [false, true] {
                out.push(Plain { a: insert_bit(row.a, pos, val), c: row.c.clone() });
            }
            Ok(())
        }
        fn forget(&self, node: usize, _: usize, pos: usize, row: &Plain) -> Result<Option<Plain>, HandlerError> {
            self.visit(node);
            Ok(Some(Plain { a: remove_bit(row.a, pos), c: row.c.clone() }))
        }
        fn join(&self, node: usize, l: &Plain, r: &Plain) -> Result<Option<Plain>, HandlerError> {
            self.visit(node);
            Ok(Some(Plain { a: l.a, c: &l.c * &r.c }))
        }
    }

    fn sample_ntd() -> NiceTreeDecomposition {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5), (1, 4)]);
        make_nice(&td_from_ordering(&g, &elimination_ordering(&g, Heuristic::MinFill, 2)))
    }

    #[test]
    fn single_leaf() {
        let g = Graph::new(0);
        let ntd = make_nice(&td_from_ordering(&g, &[]));
        assert_eq!(ntd.len(), 1);
        let store = traverse(&ntd, &Recorder::default(), None).unwrap();
        assert_eq!(store.tables.len(), 1);
        assert_eq!(store.root().rows.len(), 1);
        assert_eq!(root_aggregate(&store, Mode::Counting), Aggregate::Count(BigUint::from(1u8)));
    }

    #[test]
    fn post_order_and_counting() {
        let ntd = sample_ntd();
        let rec = Recorder::default();
        let store = traverse(&ntd, &rec, None).unwrap();
        let visited = rec.visited.borrow();
        let mut seen = vec![false; ntd.len()];
        for &node in visited.iter() {
            assert!(ntd.node(node).children.iter().all(|&c| seen[c]), "node {node} before a child");
            seen[node] = true;
        }
        assert_eq!(root_aggregate(&store, Mode::Counting), Aggregate::Count(BigUint::from(64u8)));
        assert!(store.tables.iter().all(DpTable::keys_unique));
    }

    #[test]
    fn deterministic_and_purge_is_noop_when_everything_survives() {
        let ntd = sample_ntd();
        let a = traverse(&ntd, &Recorder::default(), None).unwrap();
        let b = traverse(&ntd, &Recorder::default(), None).unwrap();
        assert_eq!(a, b);
        assert_eq!(purge(&a), a);
        assert!(all_rows_reachable(&a));
    }

    #[test]
    fn trace_has_one_record_per_node() {
        let ntd = sample_ntd();
        let mut trace = Vec::new();
        traverse(&ntd, &Recorder::default(), Some(&mut trace)).unwrap();
        assert_eq!(trace.len(), ntd.len());
        for rec in &trace {
            assert!(rec.rows <= 1usize << rec.bag.len());
        }
    }

    #[test]
    fn empty_root_aggregates() {
        let store: TableStore<Plain> = TableStore {
            tables: vec![DpTable::from_rows(0, NiceKind::Leaf, vec![], vec![], Vec::new())],
        };
        assert_eq!(root_aggregate(&store, Mode::Counting), Aggregate::Count(BigUint::zero()));
        assert_eq!(root_aggregate(&store, Mode::Decision), Aggregate::Consistent(false));
        assert_eq!(
            root_aggregate(&store, Mode::Optimization),
            Aggregate::Optimum { cost: None, count: BigUint::zero() }
        );
    }

    #[test]
    fn root_counts_sum() {
        let rows = [2u8, 3].map(|c| Row { data: Plain { a: 0, c: BigUint::from(c) }, origins: Origins::Leaf });
        // Different keys so both survive merging.
        let mut rows = rows.to_vec();
        rows[1].data.a = 1;
        let store = TableStore { tables: vec![DpTable::from_rows(0, NiceKind::Leaf, vec![], vec![], rows)] };
        assert_eq!(root_aggregate(&store, Mode::Counting), Aggregate::Count(BigUint::from(5u8)));
    }
}
