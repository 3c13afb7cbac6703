use std::fs;
use std::io::Read;
use std::path::Path;

use clap::ValueEnum;

use tdcount_core::cnf::{parse_dimacs, CnfFormula};
use tdcount_core::program::{parse_ground_program, parse_smodels, GroundProgram};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Pick by file extension, then by content.
    Auto,
    /// Textual ground program.
    Asp,
    /// SModels numeric format.
    Smodels,
    /// DIMACS CNF, optionally with `w` weight lines.
    Dimacs,
}

pub enum Loaded {
    Program(GroundProgram),
    Formula(CnfFormula),
}

fn by_extension(path: &str) -> Option<Format> {
    match Path::new(path).extension()?.to_str()? {
        "lp" | "asp" => Some(Format::Asp),
        "smodels" | "sm" => Some(Format::Smodels),
        "cnf" | "dimacs" => Some(Format::Dimacs),
        _ => None,
    }
}

fn by_content(text: &str) -> Format {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('%'));
    match first {
        Some(l) if l.starts_with("p cnf") || l.starts_with('c') && !l.contains(":-") && !l.contains('.') => Format::Dimacs,
        Some(l) if l.starts_with(|c: char| c.is_ascii_digit()) => Format::Smodels,
        _ => Format::Asp,
    }
}

pub fn load(input: &str, format: Format) -> Result<Loaded, Failure> {
    let mut text = String::new();
    let read = if input == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(input).map(|t| text = t)
    };
    read.map_err(|e| Failure::Input(format!("{input}: {e}")))?;

    let format = match format {
        Format::Auto => by_extension(input).unwrap_or_else(|| by_content(&text)),
        f => f,
    };
    let located = |e: &dyn std::fmt::Display| Failure::Input(format!("{input}: {e}"));
    Ok(match format {
        Format::Asp => Loaded::Program(parse_ground_program(&text).map_err(|e| located(&e))?),
        Format::Smodels => Loaded::Program(parse_smodels(text.as_bytes()).map_err(Failure::from)?),
        Format::Dimacs => Loaded::Formula(parse_dimacs(&text).map_err(|e| located(&e))?),
        Format::Auto => unreachable!(),
    })
}
