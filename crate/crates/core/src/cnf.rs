//! CNF formulas and the DIMACS reader.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

/// A DIMACS literal: `+v` or `-v` for `v` in `1..=num_vars`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i64);

impl Lit {
    pub fn new(dimacs: i64) -> Lit {
        assert!(dimacs != 0, "0 is not a literal");
        Lit(dimacs)
    }

    pub fn positive(var: usize) -> Lit {
        Lit(var as i64)
    }

    pub fn negative(var: usize) -> Lit {
        Lit(-(var as i64))
    }

    /// 1-based variable index.
    pub fn var(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn negated(self) -> Lit {
        Lit(-self.0)
    }

    pub fn to_dimacs(self) -> i64 {
        self.0
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    weights: Option<BTreeMap<Lit, BigRational>>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("variable {var} out of range 1..={num_vars}")]
    VariableOutOfRange { var: usize, num_vars: usize },
    #[error("negative weight for literal {0}")]
    NegativeWeight(Lit),
}

impl CnfFormula {
    /// Builds a formula; literals inside a clause are deduplicated and
    /// sorted, and clauses containing a complementary pair are dropped.
    pub fn new(num_vars: usize, clauses: Vec<Vec<Lit>>) -> Result<Self, CnfError> {
        let mut out = Vec::with_capacity(clauses.len());
        for mut clause in clauses {
            if let Some(l) = clause.iter().find(|l| l.var() > num_vars || l.var() == 0) {
                return Err(CnfError::VariableOutOfRange { var: l.var(), num_vars });
            }
            clause.sort_by_key(|l| (l.var(), !l.is_positive()));
            clause.dedup();
            if clause.windows(2).any(|w| w[0].var() == w[1].var()) {
                continue;
            }
            out.push(clause);
        }
        Ok(CnfFormula { num_vars, clauses: out, weights: None })
    }

    /// Attaches literal weights. Unlisted literals weigh 1; an empty map
    /// leaves the formula unweighted.
    pub fn with_weights(mut self, weights: BTreeMap<Lit, BigRational>) -> Result<Self, CnfError> {
        for (&l, w) in &weights {
            if l.var() > self.num_vars || l.var() == 0 {
                return Err(CnfError::VariableOutOfRange { var: l.var(), num_vars: self.num_vars });
            }
            if w.is_negative() {
                return Err(CnfError::NegativeWeight(l));
            }
        }
        self.weights = (!weights.is_empty()).then_some(weights);
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn weights(&self) -> Option<&BTreeMap<Lit, BigRational>> {
        self.weights.as_ref()
    }

    pub fn weight(&self, lit: Lit) -> BigRational {
        self.weights.as_ref().and_then(|w| w.get(&lit).cloned()).unwrap_or_else(BigRational::one)
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Vec::is_empty)
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        if let Some(weights) = &self.weights {
            for (l, w) in weights {
                writeln!(f, "w {l} {}/{} 0", w.numer(), w.denom())?;
            }
        }
        for clause in &self.clauses {
            for l in clause {
                write!(f, "{l} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("header mismatch: {0}")]
    HeaderMismatch(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

fn parse_weight(token: &str) -> Option<BigRational> {
    let (n, d) = token.split_once('/').unwrap_or((token, "1"));
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_positive() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Parses DIMACS CNF.
///
/// `c` lines are comments. Weighted instances add lines
/// `w <lit> <numerator>/<denominator> 0` (a bare integer is also accepted).
/// A final clause missing its terminating `0` is accepted.
pub fn parse_dimacs(input: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut weights: BTreeMap<Lit, BigRational> = BTreeMap::new();
    let syntax = |line: usize, message: String| DimacsError::Syntax { line, message };

    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        let mut toks = line.split_whitespace();
        if line.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line_no, "duplicate problem line".into()));
            }
            let parts: Vec<&str> = toks.collect();
            match parts[..] {
                ["p", "cnf", v, c] => match (v.parse(), c.parse()) {
                    (Ok(v), Ok(c)) => header = Some((v, c)),
                    _ => return Err(syntax(line_no, format!("bad problem line `{line}`"))),
                },
                _ => return Err(syntax(line_no, format!("bad problem line `{line}`"))),
            }
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(syntax(line_no, "clause before `p cnf` header".into()));
        };
        if line.starts_with('w') {
            toks.next();
            let parts: Vec<&str> = toks.collect();
            let (lit, weight) = match parts[..] {
                [l, w, "0"] | [l, w] => (l, w),
                _ => return Err(syntax(line_no, format!("bad weight line `{line}`"))),
            };
            let lit: i64 = lit.parse().map_err(|_| syntax(line_no, format!("bad literal `{lit}`")))?;
            if lit == 0 {
                return Err(syntax(line_no, "weight for literal 0".into()));
            }
            let lit = Lit::new(lit);
            if lit.var() > num_vars {
                return Err(DimacsError::HeaderMismatch(format!(
                    "weight for variable {} but {num_vars} declared",
                    lit.var()
                )));
            }
            let w = parse_weight(weight)
                .filter(|w| !w.is_negative())
                .ok_or_else(|| syntax(line_no, format!("bad weight `{weight}`")))?;
            weights.insert(lit, w);
            continue;
        }
        for tok in toks {
            let v: i64 = tok.parse().map_err(|_| syntax(line_no, format!("unexpected token `{tok}`")))?;
            if v == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let lit = Lit::new(v);
            if lit.var() > num_vars {
                return Err(DimacsError::HeaderMismatch(format!(
                    "variable {} used but {num_vars} declared",
                    lit.var()
                )));
            }
            current.push(lit);
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    let Some((num_vars, num_clauses)) = header else {
        return Err(syntax(1, "missing `p cnf` header".into()));
    };
    if clauses.len() != num_clauses {
        return Err(DimacsError::HeaderMismatch(format!(
            "{} clauses found, {num_clauses} declared",
            clauses.len()
        )));
    }
    let formula = CnfFormula::new(num_vars, clauses).expect("literals range-checked while parsing");
    if weights.is_empty() {
        Ok(formula)
    } else {
        Ok(formula.with_weights(weights).expect("weights range-checked while parsing"))
    }
}
