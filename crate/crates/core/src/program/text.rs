use std::collections::HashMap;

use super::{Atom, AtomId, GroundProgram, MinimizeStatement, Rule, RuleShape, Sign};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProgramParseError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: variable `{token}` in ground input")]
    NonGround { line: usize, column: usize, token: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Variable(String),
    Int(String),
    If,
    Comma,
    Bar,
    Dot,
    Semi,
    Colon,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Minimize,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(input: &str) -> Result<Vec<Spanned>, ProgramParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, message: String| ProgramParseError::Syntax { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (tok, len) = match c {
            ':' if chars.get(i + 1) == Some(&'-') => (Tok::If, 2),
            ':' => (Tok::Colon, 1),
            ',' => (Tok::Comma, 1),
            '|' => (Tok::Bar, 1),
            '.' => (Tok::Dot, 1),
            ';' => (Tok::Semi, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '#' => {
                let word: String = chars[i + 1..].iter().take_while(|c| c.is_ascii_alphabetic()).collect();
                if word != "minimize" {
                    return Err(err(l0, c0, format!("unknown directive `#{word}`")));
                }
                (Tok::Minimize, 1 + word.len())
            }
            c if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let len = 1 + chars[i + 1..].iter().take_while(|c| c.is_ascii_digit()).count();
                (Tok::Int(chars[i..i + len].iter().collect()), len)
            }
            c if c.is_alphabetic() || c == '_' => {
                let len = chars[i..].iter().take_while(|c| c.is_alphanumeric() || **c == '_' || **c == '\'').count();
                let text: String = chars[i..i + len].iter().collect();
                (if c.is_lowercase() { Tok::Ident(text) } else { Tok::Variable(text) }, len)
            }
            other => return Err(err(l0, c0, format!("unexpected character `{other}`"))),
        };
        out.push(Spanned { tok, line: l0, column: c0 });
        i += len;
        col += len;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
    names: HashMap<String, AtomId>,
    atoms: Vec<Atom>,
    rules: Vec<Rule>,
    minimize: Option<MinimizeStatement>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.eof, |s| (s.line, s.column))
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ProgramParseError> {
        let (line, column) = self.here();
        Err(ProgramParseError::Syntax { line, column, message: message.into() })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ProgramParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn intern(&mut self, name: String) -> AtomId {
        if let Some(&id) = self.names.get(&name) {
            return id;
        }
        let id = self.atoms.len();
        self.names.insert(name.clone(), id);
        self.atoms.push(Atom { id, name: Some(name) });
        id
    }

    fn variable_error<T>(&self) -> Result<T, ProgramParseError> {
        let s = &self.toks[self.pos];
        let Tok::Variable(token) = &s.tok else { unreachable!() };
        Err(ProgramParseError::NonGround { line: s.line, column: s.column, token: token.clone() })
    }

    /// `ident` or `ident(term, ...)`; returns the canonical text.
    fn term(&mut self) -> Result<String, ProgramParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if !self.eat(&Tok::LParen) {
                    return Ok(name);
                }
                let mut args = vec![self.term()?];
                while self.eat(&Tok::Comma) {
                    args.push(self.term()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(format!("{name}({})", args.join(",")))
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(n)
            }
            Some(Tok::Variable(_)) => self.variable_error(),
            _ => self.error("expected a term"),
        }
    }

    fn atom(&mut self) -> Result<AtomId, ProgramParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) if name == "not" => self.error("`not` is not an atom"),
            Some(Tok::Ident(_)) => {
                let name = self.term()?;
                Ok(self.intern(name))
            }
            Some(Tok::Variable(_)) => self.variable_error(),
            _ => self.error("expected an atom"),
        }
    }

    fn is_not(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(w)) if w == "not")
    }

    fn literal(&mut self) -> Result<(AtomId, Sign), ProgramParseError> {
        if self.is_not() {
            self.pos += 1;
            Ok((self.atom()?, Sign::Neg))
        } else {
            Ok((self.atom()?, Sign::Pos))
        }
    }

    fn rule(&mut self) -> Result<(), ProgramParseError> {
        let mut head = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        if self.peek() != Some(&Tok::If) {
            if self.peek() == Some(&Tok::Dot) {
                return self.error("empty rule");
            }
            head.push(self.atom()?);
            while self.eat(&Tok::Bar) {
                head.push(self.atom()?);
            }
        }
        if self.eat(&Tok::If) && self.peek() != Some(&Tok::Dot) {
            loop {
                match self.literal()? {
                    (a, Sign::Pos) => pos.push(a),
                    (a, Sign::Neg) => neg.push(a),
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::Dot, "`.`")?;
        if let RuleShape::Rule(rule) = Rule::normalize(head, pos, neg) {
            self.rules.push(rule);
        }
        Ok(())
    }

    fn minimize(&mut self) -> Result<(), ProgramParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut stmt = self.minimize.take().unwrap_or_default();
        if !self.eat(&Tok::RBrace) {
            loop {
                let weight = match self.peek().cloned() {
                    Some(Tok::Int(w)) => match w.parse::<u64>() {
                        Ok(w) => w,
                        Err(_) => return self.error("minimize weights must be non-negative integers"),
                    },
                    _ => return self.error("expected a weight"),
                };
                self.pos += 1;
                self.expect(Tok::Colon, "`:`")?;
                let (atom, sign) = self.literal()?;
                stmt.add(atom, sign, weight);
                if !self.eat(&Tok::Semi) {
                    break;
                }
            }
            self.expect(Tok::RBrace, "`}`")?;
        }
        self.expect(Tok::Dot, "`.`")?;
        self.minimize = Some(stmt);
        Ok(())
    }
}

/// Parses a ground program in the textual grammar
///
/// ```text
/// program = { rule | minimize }
/// rule    = [ head ] [ ":-" [ body ] ] "."
/// head    = atom { "|" atom }
/// body    = lit { "," lit }
/// lit     = [ "not" ] atom
/// minimize = "#minimize" "{" [ weight ":" lit { ";" weight ":" lit } ] "}" "."
/// ```
///
/// Atoms are lowercase-leading identifiers, optionally with a parenthesized
/// argument list of ground terms. Atom ids follow first occurrence. `%`
/// starts a line comment. Tautological rules are dropped.
pub fn parse_ground_program(input: &str) -> Result<GroundProgram, ProgramParseError> {
    let toks = lex(input)?;
    let eof = toks.last().map_or((1, 1), |s| (s.line, s.column + 1));
    let mut p = Parser {
        toks,
        pos: 0,
        eof,
        names: HashMap::new(),
        atoms: Vec::new(),
        rules: Vec::new(),
        minimize: None,
    };
    while p.pos < p.toks.len() {
        if p.eat(&Tok::Minimize) {
            p.minimize()?;
        } else {
            p.rule()?;
        }
    }
    Ok(GroundProgram::new(p.atoms, p.rules, p.minimize).expect("parser assigns dense, unique atoms"))
}
