use crate::td::{NiceKind, NiceTreeDecomposition};

/// Assigns each constraint (rule or clause) to the Forget node at which it
/// is evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckPlan {
    by_node: Vec<Vec<usize>>,
}

impl CheckPlan {
    /// Constraint indices due at `node`, ascending.
    pub fn due(&self, node: usize) -> &[usize] {
        &self.by_node[node]
    }

    pub fn is_empty(&self) -> bool {
        self.by_node.iter().all(Vec::is_empty)
    }

    /// `(node, constraint)` pairs.
    pub fn assignments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.by_node.iter().enumerate().flat_map(|(n, cs)| cs.iter().map(move |&c| (n, c)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("constraint {0} has no variables")]
    EmptyScope(usize),
    #[error("variables of constraint {0} share no bag below their first forget node")]
    NotCovered(usize),
}

/// Places every constraint at the Forget node of its earliest-forgotten
/// variable. Because each scope is a clique of the decomposed graph, the
/// child bag of that node still holds the whole scope; this is checked.
///
/// `scopes` yields `(constraint id, variables)` pairs.
pub fn plan_checks<'a>(
    scopes: impl IntoIterator<Item = (usize, &'a [usize])>,
    ntd: &NiceTreeDecomposition,
) -> Result<CheckPlan, PlanError> {
    let forget_at = ntd.forget_nodes();
    let mut by_node = vec![Vec::new(); ntd.len()];
    for (c, scope) in scopes {
        // Forget nodes of one clique lie on a single root path, so the
        // smallest post-order index is the lowest of them.
        let node = scope.iter().map(|&v| forget_at[v]).min().ok_or(PlanError::EmptyScope(c))?;
        let NiceKind::Forget(_) = ntd.node(node).kind else { unreachable!() };
        let child_bag = &ntd.node(ntd.node(node).children[0]).bag;
        if !scope.iter().all(|v| child_bag.binary_search(v).is_ok()) {
            return Err(PlanError::NotCovered(c));
        }
        by_node[node].push(c);
    }
    for cs in &mut by_node {
        cs.sort_unstable();
    }
    Ok(CheckPlan { by_node })
}
