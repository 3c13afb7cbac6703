//! Engine-versus-oracle batteries over seeded random corpora, with a JSON
//! report whose bytes depend only on the seed and the instance count.

use rayon::prelude::*;
use serde::Serialize;

use crate::asp::{count_answer_sets, count_optimal, enumerate_answer_sets};
use crate::corpus::{instance_rng, random_cnf, random_program, random_subset, CnfShape, ProgramShape};
use crate::oracle::{brute_answer_sets, brute_count_models, brute_optimum, brute_projected_count, brute_weighted_count};
use crate::pipeline::Options;
use crate::projection::projected_count;
use crate::sat::{count_models, weighted_count};
use crate::td::Heuristic;
use crate::Instance;

/// One quantity computed by both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub engine: String,
    pub oracle: String,
}

impl Check {
    fn new(name: &'static str, engine: impl ToString, oracle: impl ToString) -> Check {
        Check { name, engine: engine.to_string(), oracle: oracle.to_string() }
    }

    pub fn agrees(&self) -> bool {
        self.engine == self.oracle
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Record {
    pub index: u64,
    pub instance: String,
    pub width: usize,
    pub checks: Vec<Check>,
}

impl Record {
    pub fn agrees(&self) -> bool {
        self.checks.iter().all(Check::agrees)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub kind: &'static str,
    pub seed: u64,
    pub records: Vec<Record>,
    pub mismatches: usize,
}

impl Report {
    fn new(kind: &'static str, seed: u64, records: Vec<Record>) -> Report {
        let mismatches = records.iter().filter(|r| !r.agrees()).count();
        Report { kind, seed, records, mismatches }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Decomposition options used for instance `index`: the heuristic
/// alternates and the seed follows the index, so the battery also exercises
/// many different decompositions.
pub fn options_for(index: u64) -> Options {
    let heuristic = Heuristic::ALL[(index % 2) as usize];
    Options::new(heuristic, index)
}

fn render_sets(sets: &[Vec<usize>]) -> String {
    let parts: Vec<String> =
        sets.iter().map(|s| format!("{{{}}}", s.iter().map(usize::to_string).collect::<Vec<_>>().join(","))).collect();
    parts.join(" ")
}

fn render_opt(cost: Option<num_bigint::BigInt>, count: num_bigint::BigUint) -> String {
    match cost {
        Some(c) => format!("cost {c} count {count}"),
        None => format!("none count {count}"),
    }
}

fn asp_record(seed: u64, index: u64) -> Record {
    let mut rng = instance_rng(seed, index);
    let program = random_program(&mut rng, &ProgramShape::default());
    let projection = random_subset(&mut rng, program.num_atoms(), 0);
    let opts = options_for(index);
    let run = crate::asp::solve(&program, &opts, crate::dp::Mode::Counting, None).expect("engine runs");
    let width = run.prepared.width().0;
    let oracle_sets = brute_answer_sets(&program).expect("within oracle guard");
    let opt = count_optimal(&program, &opts).expect("engine runs");
    let (ocost, ocount) = brute_optimum(&program).expect("within oracle guard");
    let checks = vec![
        Check::new("count", count_answer_sets(&program, &opts).expect("engine runs"), oracle_sets.len()),
        Check::new("optimum", render_opt(opt.cost, opt.count), render_opt(ocost, ocount)),
        Check::new(
            "enumerate",
            render_sets(&enumerate_answer_sets(&program, None, &opts).expect("engine runs")),
            render_sets(&oracle_sets),
        ),
        Check::new(
            "projected",
            projected_count(Instance::Asp(&program), &projection, &opts).expect("engine runs"),
            brute_projected_count(Instance::Asp(&program), &projection).expect("within oracle guard"),
        ),
    ];
    Record { index, instance: program.to_string(), width, checks }
}

fn sat_record(seed: u64, index: u64) -> Record {
    let mut rng = instance_rng(seed, index);
    let formula = random_cnf(&mut rng, &CnfShape::default());
    let projection = random_subset(&mut rng, formula.num_vars(), 1);
    let opts = options_for(index);
    let run = crate::sat::solve_counting(&formula, &opts, None).expect("engine runs");
    let checks = vec![
        Check::new(
            "count",
            count_models(&formula, &opts).expect("engine runs"),
            brute_count_models(&formula).expect("within oracle guard"),
        ),
        Check::new(
            "weighted",
            weighted_count(&formula, &opts).expect("engine runs"),
            brute_weighted_count(&formula).expect("within oracle guard"),
        ),
        Check::new(
            "projected",
            projected_count(Instance::Cnf(&formula), &projection, &opts).expect("engine runs"),
            brute_projected_count(Instance::Cnf(&formula), &projection).expect("within oracle guard"),
        ),
    ];
    Record { index, instance: formula.to_string(), width: run.prepared.width().0, checks }
}

/// Answer-set counting, optimal counting, enumeration and projected
/// counting on `count` random programs.
pub fn asp_battery(seed: u64, count: u64) -> Report {
    let records = (0..count).into_par_iter().map(|i| asp_record(seed, i)).collect();
    Report::new("asp", seed, records)
}

/// Model counting, weighted counting and projected counting on `count`
/// random formulas.
pub fn sat_battery(seed: u64, count: u64) -> Report {
    let records = (0..count).into_par_iter().map(|i| sat_record(seed, i)).collect();
    Report::new("sat", seed, records)
}
