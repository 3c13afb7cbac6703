//! Reader for the numeric SModels (lparse) intermediate format.
//!
//! Supported rule types are 1 (basic), 8 (disjunctive) and 6 (minimize);
//! clasp's `90 0` header line is skipped. The compute section is turned
//! into integrity constraints, except that an unnamed atom in `B-` (the
//! grounder's "false" atom) is eliminated from the rules outright.

use std::collections::{BTreeSet, HashMap};
use std::io::Read;

use super::{Atom, AtomId, GroundProgram, MinimizeStatement, Rule, RuleShape, Sign};

#[derive(Debug, thiserror::Error)]
pub enum SmodelsError {
    #[error("unsupported SModels rule type {0}")]
    UnsupportedRule(u64),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct RawRule {
    kind: u64,
    head: Vec<u64>,
    neg: Vec<u64>,
    pos: Vec<u64>,
    weights: Vec<u64>,
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, section: &str) -> Result<&'a str, SmodelsError> {
        loop {
            match self.iter.next() {
                Some((i, l)) => {
                    self.last = i + 1;
                    let l = l.trim();
                    if !l.is_empty() {
                        return Ok(l);
                    }
                }
                None => {
                    return Err(SmodelsError::Format {
                        line: self.last + 1,
                        message: format!("truncated input in {section}"),
                    })
                }
            }
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SmodelsError> {
        Err(SmodelsError::Format { line: self.last, message: message.into() })
    }
}

fn numbers(lines: &Lines<'_>, line: &str) -> Result<Vec<u64>, SmodelsError> {
    line.split_whitespace()
        .map(|t| t.parse::<u64>())
        .collect::<Result<_, _>>()
        .or_else(|_| lines.error(format!("expected non-negative integers, found `{line}`")))
}

fn parse_rule(lines: &Lines<'_>, nums: &[u64]) -> Result<Option<RawRule>, SmodelsError> {
    let kind = nums[0];
    let mut it = nums[1..].iter().copied();
    let mut take = |n: u64| -> Result<Vec<u64>, SmodelsError> {
        let v: Vec<u64> = it.by_ref().take(n as usize).collect();
        if v.len() as u64 != n {
            return lines.error(format!("rule of type {kind} is truncated"));
        }
        Ok(v)
    };
    let rule = match kind {
        90 => return Ok(None),
        1 => {
            let head = take(1)?;
            let [nb, nn] = take(2)?[..] else { unreachable!() };
            if nn > nb {
                return lines.error("negative literal count exceeds body size");
            }
            let neg = take(nn)?;
            let pos = take(nb - nn)?;
            RawRule { kind, head, neg, pos, weights: vec![] }
        }
        8 => {
            let nh = take(1)?[0];
            let head = take(nh)?;
            let [nb, nn] = take(2)?[..] else { unreachable!() };
            if nn > nb {
                return lines.error("negative literal count exceeds body size");
            }
            let neg = take(nn)?;
            let pos = take(nb - nn)?;
            RawRule { kind, head, neg, pos, weights: vec![] }
        }
        6 => {
            let [zero, nb, nn] = take(3)?[..] else { unreachable!() };
            if zero != 0 {
                return lines.error("minimize rule must start with `6 0`");
            }
            if nn > nb {
                return lines.error("negative literal count exceeds body size");
            }
            let neg = take(nn)?;
            let pos = take(nb - nn)?;
            let weights = take(nb)?;
            RawRule { kind, head: vec![], neg, pos, weights }
        }
        other => return Err(SmodelsError::UnsupportedRule(other)),
    };
    if it.next().is_some() {
        return lines.error(format!("trailing numbers after rule of type {kind}"));
    }
    Ok(Some(rule))
}

fn compute_section(lines: &mut Lines<'_>, label: &str) -> Result<Vec<u64>, SmodelsError> {
    let l = lines.next(label)?;
    if l != label {
        return lines.error(format!("expected `{label}`"));
    }
    let mut atoms = Vec::new();
    loop {
        let l = lines.next(label)?;
        let n = numbers(lines, l)?;
        match n[..] {
            [0] => return Ok(atoms),
            [a] => atoms.push(a),
            _ => return lines.error(format!("expected one atom per line in {label}")),
        }
    }
}

/// Parses SModels numeric output, e.g. from `gringo -o smodels`.
pub fn parse_smodels<R: Read>(mut reader: R) -> Result<GroundProgram, SmodelsError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut lines = Lines { iter: text.lines().enumerate(), last: 0 };

    let mut raw = Vec::new();
    loop {
        let l = lines.next("rules section")?;
        let nums = numbers(&lines, l)?;
        if nums == [0] {
            break;
        }
        if let Some(rule) = parse_rule(&lines, &nums)? {
            raw.push(rule);
        }
    }

    let mut symbols: Vec<(u64, String)> = Vec::new();
    loop {
        let l = lines.next("symbol table")?;
        if l == "0" {
            break;
        }
        let (num, name) = l.split_once(char::is_whitespace).map_or((l, ""), |(a, b)| (a, b.trim()));
        let Ok(num) = num.parse::<u64>() else {
            return lines.error(format!("bad symbol table entry `{l}`"));
        };
        if name.is_empty() {
            return lines.error(format!("symbol table entry for atom {num} has no name"));
        }
        symbols.push((num, name.to_string()));
    }
    let b_plus = compute_section(&mut lines, "B+")?;
    let b_minus = compute_section(&mut lines, "B-")?;
    // The trailing model count is optional.

    let named: HashMap<u64, &str> = symbols.iter().map(|(n, s)| (*n, s.as_str())).collect();
    let in_minimize: BTreeSet<u64> =
        raw.iter().filter(|r| r.kind == 6).flat_map(|r| r.pos.iter().chain(&r.neg).copied()).collect();
    let eliminated: BTreeSet<u64> =
        b_minus.iter().copied().filter(|a| !named.contains_key(a) && !in_minimize.contains(a)).collect();

    let mut ids: HashMap<u64, AtomId> = HashMap::new();
    let mut atoms: Vec<Atom> = Vec::new();
    let mut id_of = |n: u64| -> AtomId {
        *ids.entry(n).or_insert_with(|| {
            let id = atoms.len();
            atoms.push(Atom { id, name: named.get(&n).map(|s| s.to_string()) });
            id
        })
    };

    let mut rules = Vec::new();
    let mut minimize: Option<MinimizeStatement> = None;
    for r in &raw {
        if r.kind == 6 {
            let stmt = minimize.get_or_insert_with(MinimizeStatement::new);
            let literals = r.neg.iter().map(|&a| (a, Sign::Neg)).chain(r.pos.iter().map(|&a| (a, Sign::Pos)));
            for ((a, sign), &w) in literals.zip(&r.weights) {
                stmt.add(id_of(a), sign, w);
            }
            continue;
        }
        if r.pos.iter().any(|a| eliminated.contains(a)) {
            continue;
        }
        let head: Vec<AtomId> = r.head.iter().filter(|a| !eliminated.contains(a)).map(|&a| id_of(a)).collect();
        let neg: Vec<AtomId> = r.neg.iter().filter(|a| !eliminated.contains(a)).map(|&a| id_of(a)).collect();
        let pos: Vec<AtomId> = r.pos.iter().map(|&a| id_of(a)).collect();
        if let RuleShape::Rule(rule) = Rule::normalize(head, pos, neg) {
            rules.push(rule);
        }
    }
    for (n, _) in &symbols {
        id_of(*n);
    }
    for &a in &b_plus {
        if let RuleShape::Rule(rule) = Rule::normalize([], [], [id_of(a)]) {
            rules.push(rule);
        }
    }
    for &a in b_minus.iter().filter(|a| !eliminated.contains(a)) {
        if let RuleShape::Rule(rule) = Rule::normalize([], [id_of(a)], []) {
            rules.push(rule);
        }
    }
    GroundProgram::new(atoms, rules, minimize).map_err(|e| SmodelsError::Format { line: 0, message: e.to_string() })
}
