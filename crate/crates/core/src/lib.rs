//! Counting answer sets and models by dynamic programming on tree
//! decompositions.

pub mod asp;
pub mod battery;
pub mod cnf;
pub mod corpus;
pub mod dp;
pub mod graph;
pub mod oracle;
pub mod pipeline;
pub mod program;
pub mod projection;
pub mod sat;
pub mod td;

pub use pipeline::{Error, Options};

/// Either kind of counting instance.
#[derive(Debug, Clone, Copy)]
pub enum Instance<'a> {
    Asp(&'a program::GroundProgram),
    Cnf(&'a cnf::CnfFormula),
}
