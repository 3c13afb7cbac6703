//! Shared front half of every solving pipeline: graph → decomposition →
//! nice decomposition → check plan.

use crate::dp::{plan_checks, CheckPlan, DpError, PlanError, MAX_BAG};
use crate::graph::Graph;
use crate::td::{
    decompose, make_nice, validate_td, DecompositionOptions, Heuristic, NiceTreeDecomposition, TreeDecomposition,
    Violation, Width,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error("internal error: {0}")]
    Plan(#[from] PlanError),
    #[error("supplied decomposition is invalid: {0}")]
    InvalidDecomposition(Violation),
    #[error("projection mentions unknown symbol `{0}`")]
    ProjectionOutOfRange(String),
}

/// Knobs shared by all counting entry points.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub decomposition: DecompositionOptions,
    /// Use this decomposition instead of running a heuristic.
    pub external_td: Option<TreeDecomposition>,
}

impl Options {
    pub fn new(heuristic: Heuristic, seed: u64) -> Self {
        Options { decomposition: DecompositionOptions { heuristic, seed, seeds: 1 }, external_td: None }
    }
}

/// A decomposition ready for dynamic programming.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub td: TreeDecomposition,
    pub ntd: NiceTreeDecomposition,
    pub plan: CheckPlan,
    /// Seed that produced `td`; `None` for external decompositions.
    pub seed: Option<u64>,
}

impl Prepared {
    pub fn width(&self) -> Width {
        self.td.width()
    }

    /// Decomposes `graph` and places each scope (a clique of `graph`) at a
    /// Forget node.
    pub fn new<'a>(
        graph: &Graph,
        scopes: impl IntoIterator<Item = (usize, &'a [usize])>,
        opts: &Options,
    ) -> Result<Prepared, Error> {
        let (td, seed) = match &opts.external_td {
            Some(td) => {
                validate_td(graph, td).map_err(Error::InvalidDecomposition)?;
                (td.clone(), None)
            }
            None => {
                let d = decompose(graph, &opts.decomposition);
                (d.td, Some(d.seed))
            }
        };
        let ntd = make_nice(&td);
        if ntd.max_bag_size() > MAX_BAG {
            return Err(DpError::WidthTooLarge(ntd.max_bag_size()).into());
        }
        let plan = plan_checks(scopes, &ntd)?;
        Ok(Prepared { td, ntd, plan, seed })
    }
}
