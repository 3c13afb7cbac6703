//! Ground logic programs and their input formats.
//!
//! A [`GroundProgram`] is a list of disjunctive rules over densely numbered
//! atoms, plus an optional minimize statement. Programs are built either
//! from the textual grammar ([`parse_ground_program`]) or from the numeric
//! SModels subset ([`parse_smodels`]).

mod smodels;
mod text;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub use smodels::{parse_smodels, SmodelsError};
pub use text::{parse_ground_program, ProgramParseError};

/// Dense atom index, `0..program.num_atoms()`.
pub type AtomId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub id: AtomId,
    pub name: Option<String>,
}

/// A disjunctive rule `h1 | ... | hk :- p1, ..., pm, not n1, ..., not nl.`
///
/// All three atom lists are sorted, duplicate-free, and pairwise disjoint.
/// An empty head makes the rule an integrity constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    head: Vec<AtomId>,
    pos: Vec<AtomId>,
    neg: Vec<AtomId>,
}

/// Outcome of normalizing the raw literals of a rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleShape {
    Rule(Rule),
    /// The rule is satisfied by every interpretation and in every reduct
    /// (a head atom also occurs positively in the body, or an atom occurs
    /// both positively and negatively in the body).
    Tautology,
}

impl Rule {
    /// Normalizes raw head/body literals into a rule.
    ///
    /// Head atoms that also occur in the negative body are removed from the
    /// head: such an atom is false whenever the body holds, and it is never
    /// derivable through this rule in the reduct.
    pub fn normalize(
        head: impl IntoIterator<Item = AtomId>,
        pos: impl IntoIterator<Item = AtomId>,
        neg: impl IntoIterator<Item = AtomId>,
    ) -> RuleShape {
        let head = sorted_unique(head);
        let pos = sorted_unique(pos);
        let neg = sorted_unique(neg);
        if intersects(&head, &pos) || intersects(&pos, &neg) {
            return RuleShape::Tautology;
        }
        let head: Vec<AtomId> = head.into_iter().filter(|a| neg.binary_search(a).is_err()).collect();
        RuleShape::Rule(Rule { head, pos, neg })
    }

    /// Builds a rule from literals that already satisfy the disjointness
    /// invariant.
    ///
    /// # Panics
    /// If the lists are not pairwise disjoint.
    pub fn new(
        head: impl IntoIterator<Item = AtomId>,
        pos: impl IntoIterator<Item = AtomId>,
        neg: impl IntoIterator<Item = AtomId>,
    ) -> Rule {
        let head = sorted_unique(head);
        let pos = sorted_unique(pos);
        let neg = sorted_unique(neg);
        assert!(
            !intersects(&head, &pos) && !intersects(&head, &neg) && !intersects(&pos, &neg),
            "rule literals must be pairwise disjoint"
        );
        Rule { head, pos, neg }
    }

    pub fn head(&self) -> &[AtomId] {
        &self.head
    }

    pub fn pos(&self) -> &[AtomId] {
        &self.pos
    }

    pub fn neg(&self) -> &[AtomId] {
        &self.neg
    }

    /// Every atom of the rule, sorted.
    pub fn atoms(&self) -> Vec<AtomId> {
        let mut all: Vec<AtomId> = self.head.iter().chain(&self.pos).chain(&self.neg).copied().collect();
        all.sort_unstable();
        all
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    /// `:- .` — violated by every interpretation.
    pub fn is_empty(&self) -> bool {
        self.head.is_empty() && self.pos.is_empty() && self.neg.is_empty()
    }

    /// Classical satisfaction by the interpretation `holds`.
    pub fn satisfied_by(&self, holds: impl Fn(AtomId) -> bool) -> bool {
        let body = self.pos.iter().all(|&a| holds(a)) && !self.neg.iter().any(|&a| holds(a));
        !body || self.head.iter().any(|&a| holds(a))
    }
}

fn sorted_unique(atoms: impl IntoIterator<Item = AtomId>) -> Vec<AtomId> {
    let mut v: Vec<AtomId> = atoms.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn intersects(a: &[AtomId], b: &[AtomId]) -> bool {
    a.iter().any(|x| b.binary_search(x).is_ok())
}

/// Whether a minimize entry refers to the atom being true or false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MinimizeStatement {
    weights: BTreeMap<(AtomId, Sign), u64>,
}

impl MinimizeStatement {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `weight` to the literal; repeated literals accumulate.
    pub fn add(&mut self, atom: AtomId, sign: Sign, weight: u64) {
        *self.weights.entry((atom, sign)).or_insert(0) += weight;
    }

    pub fn weight(&self, atom: AtomId, sign: Sign) -> u64 {
        self.weights.get(&(atom, sign)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (AtomId, Sign, u64)> + '_ {
        self.weights.iter().map(|(&(a, s), &w)| (a, s, w))
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Total cost of the interpretation `holds`.
    pub fn cost_of(&self, holds: impl Fn(AtomId) -> bool) -> u64 {
        self.entries()
            .filter(|&(a, s, _)| holds(a) == (s == Sign::Pos))
            .map(|(_, _, w)| w)
            .sum()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ProgramError {
    #[error("atom id {0} out of range")]
    UnknownAtom(AtomId),
    #[error("duplicate atom name `{0}`")]
    DuplicateName(String),
}

/// A variable-free disjunctive logic program.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundProgram {
    atoms: Vec<Atom>,
    rules: Vec<Rule>,
    minimize: Option<MinimizeStatement>,
}

impl GroundProgram {
    pub fn new(
        atoms: Vec<Atom>,
        rules: Vec<Rule>,
        minimize: Option<MinimizeStatement>,
    ) -> Result<Self, ProgramError> {
        let mut names = HashMap::new();
        for (i, atom) in atoms.iter().enumerate() {
            if atom.id != i {
                return Err(ProgramError::UnknownAtom(atom.id));
            }
            if let Some(name) = &atom.name {
                if names.insert(name.clone(), i).is_some() {
                    return Err(ProgramError::DuplicateName(name.clone()));
                }
            }
        }
        let n = atoms.len();
        for rule in &rules {
            if let Some(&bad) = rule.atoms().iter().find(|&&a| a >= n) {
                return Err(ProgramError::UnknownAtom(bad));
            }
        }
        if let Some(min) = &minimize {
            if let Some((bad, _, _)) = min.entries().find(|&(a, _, _)| a >= n) {
                return Err(ProgramError::UnknownAtom(bad));
            }
        }
        Ok(GroundProgram { atoms, rules, minimize })
    }

    /// A program over `n` anonymous atoms.
    pub fn with_anonymous_atoms(
        n: usize,
        rules: Vec<Rule>,
        minimize: Option<MinimizeStatement>,
    ) -> Result<Self, ProgramError> {
        let atoms = (0..n).map(|id| Atom { id, name: None }).collect();
        Self::new(atoms, rules, minimize)
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn minimize(&self) -> Option<&MinimizeStatement> {
        self.minimize.as_ref()
    }

    /// Display name of an atom; anonymous atoms render as `x<id>`.
    pub fn atom_name(&self, id: AtomId) -> String {
        match &self.atoms[id].name {
            Some(name) => name.clone(),
            None => format!("x{id}"),
        }
    }

    pub fn atom_by_name(&self, name: &str) -> Option<AtomId> {
        self.atoms.iter().position(|a| a.name.as_deref() == Some(name))
    }

    /// True if some rule has neither head nor body. Such a program has no
    /// answer sets and is short-circuited before any decomposition.
    pub fn has_empty_constraint(&self) -> bool {
        self.rules.iter().any(Rule::is_empty)
    }
}

impl fmt::Display for GroundProgram {
    /// Renders the program in the textual grammar accepted by
    /// [`parse_ground_program`]. Atoms occurring in no rule are lost on
    /// reparse unless a minimize entry mentions them.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            let head: Vec<String> = rule.head.iter().map(|&a| self.atom_name(a)).collect();
            let body: Vec<String> = rule
                .pos
                .iter()
                .map(|&a| self.atom_name(a))
                .chain(rule.neg.iter().map(|&a| format!("not {}", self.atom_name(a))))
                .collect();
            write!(f, "{}", head.join(" | "))?;
            if !body.is_empty() || head.is_empty() {
                if !head.is_empty() {
                    write!(f, " ")?;
                }
                write!(f, ":-")?;
                if !body.is_empty() {
                    write!(f, " {}", body.join(", "))?;
                }
            }
            writeln!(f, ".")?;
        }
        if let Some(min) = &self.minimize {
            let items: Vec<String> = min
                .entries()
                .map(|(a, s, w)| match s {
                    Sign::Pos => format!("{w}:{}", self.atom_name(a)),
                    Sign::Neg => format!("{w}:not {}", self.atom_name(a)),
                })
                .collect();
            writeln!(f, "#minimize{{ {} }}.", items.join("; "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_drops_tautologies() {
        assert_eq!(Rule::normalize([0], [0], []), RuleShape::Tautology);
        assert_eq!(Rule::normalize([1], [0], [0]), RuleShape::Tautology);
    }

    #[test]
    fn normalize_strips_head_atoms_in_negative_body() {
        let RuleShape::Rule(r) = Rule::normalize([0, 1], [], [0]) else { panic!() };
        assert_eq!(r.head(), &[1]);
        assert_eq!(r.neg(), &[0]);
    }

    #[test]
    #[should_panic]
    fn new_asserts_disjointness() {
        Rule::new([0], [0], []);
    }

    #[test]
    fn rejects_out_of_range_atoms() {
        let err = GroundProgram::with_anonymous_atoms(1, vec![Rule::new([3], [], [])], None);
        assert_eq!(err, Err(ProgramError::UnknownAtom(3)));
    }

    #[test]
    fn minimize_cost() {
        let mut m = MinimizeStatement::new();
        m.add(0, Sign::Pos, 2);
        m.add(1, Sign::Neg, 5);
        m.add(0, Sign::Pos, 1);
        assert_eq!(m.cost_of(|a| a == 0), 3 + 5);
        assert_eq!(m.cost_of(|a| a == 1), 0);
    }
}
