//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.
//!
//! Run alone with `cargo test -p tdcount-core --test acceptance`.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use tdcount_core::asp;
use tdcount_core::battery::{asp_battery, sat_battery, Report};
use tdcount_core::corpus::{
    complete_graph, instance_rng, random_cnf, random_graph, random_program, random_tree, CnfShape, ProgramShape,
};
use tdcount_core::dp::{all_rows_reachable, purge, root_aggregate, Mode, RowData, TableStore, TraceRecord};
use tdcount_core::oracle::brute_treewidth;
use tdcount_core::sat;
use tdcount_core::td::{elimination_ordering, make_nice, td_from_ordering, validate_td, Heuristic};
use tdcount_core::Options;

use rand::Rng;

const SEED: u64 = 20_240_601;
const ASP_INSTANCES: u64 = 500;
const SAT_INSTANCES: u64 = 500;
const TD_GRAPHS: u64 = 200;
const TD_MAX_VERTICES: usize = 50;
const TD_SEEDS_PER_HEURISTIC: u64 = 3;
const BRUTE_MAX_VERTICES: usize = 11;
const PURGE_INSTANCES_PER_KIND: u64 = 500;
const INVARIANCE_INSTANCES_PER_KIND: u64 = 50;
const INVARIANCE_SEEDS: u64 = 5;
const SHAPE_INSTANCES_PER_KIND: u64 = 300;
const BATTERY_TIME_LIMIT: Duration = Duration::from_secs(600);

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn report_line(o: &Outcome) {
    let mut out = std::io::stdout().lock();
    let status = if o.passed { "PASS" } else { "FAIL" };
    writeln!(out, "[{status}] {}: {}", o.name, o.detail).unwrap();
    out.flush().unwrap();
}

fn first_mismatch(report: &Report) -> String {
    match report.records.iter().find(|r| !r.agrees()) {
        None => String::new(),
        Some(r) => {
            let c = r.checks.iter().find(|c| !c.agrees()).unwrap();
            format!("; first mismatch #{} {}: engine {} vs oracle {}\n{}", r.index, c.name, c.engine, c.oracle, r.instance)
        }
    }
}

fn battery_outcome(name: &'static str, report: &Report, elapsed: Duration) -> Outcome {
    let checks: usize = report.records.iter().map(|r| r.checks.len()).sum();
    Outcome {
        name,
        passed: report.mismatches == 0 && elapsed < BATTERY_TIME_LIMIT,
        detail: format!(
            "{} instances, {} checks, {} mismatching instances, {:.1}s (limit {}s){}",
            report.records.len(),
            checks,
            report.mismatches,
            elapsed.as_secs_f64(),
            BATTERY_TIME_LIMIT.as_secs(),
            first_mismatch(report)
        ),
    }
}

fn td_suite() -> Outcome {
    let failures: Vec<String> = (0..TD_GRAPHS)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut rng = instance_rng(SEED ^ 0x7d, i);
            // Every third graph is small enough for the exact oracle.
            let n = if i % 3 == 0 { rng.gen_range(1..=BRUTE_MAX_VERTICES) } else { rng.gen_range(1..=TD_MAX_VERTICES) };
            let p = if n <= BRUTE_MAX_VERTICES { rng.gen_range(0.1..0.7) } else { rng.gen_range(0.03..0.25) };
            let g = random_graph(&mut rng, n, p);
            let exact = (n <= BRUTE_MAX_VERTICES).then(|| brute_treewidth(&g).unwrap());
            let mut errs = Vec::new();
            for h in Heuristic::ALL {
                for seed in 0..TD_SEEDS_PER_HEURISTIC {
                    let td = td_from_ordering(&g, &elimination_ordering(&g, h, seed));
                    if let Err(v) = validate_td(&g, &td) {
                        errs.push(format!("graph {i} {h} seed {seed}: invalid ({v})"));
                    }
                    let nice = make_nice(&td);
                    if nice.width() != td.width() || nice.check_structure().is_err() {
                        errs.push(format!("graph {i} {h} seed {seed}: nice form changed width or is malformed"));
                    }
                    if let Some(tw) = exact {
                        if td.width().0 < tw {
                            errs.push(format!("graph {i} {h} seed {seed}: width {} below treewidth {tw}", td.width()));
                        }
                    }
                }
            }
            errs
        })
        .collect();
    let mut failures = failures;
    let mut trees = 0;
    for n in 2..=TD_MAX_VERTICES {
        let t = random_tree(&mut instance_rng(SEED ^ 0x7e, n as u64), n);
        if n <= BRUTE_MAX_VERTICES && brute_treewidth(&t).unwrap() != 1 {
            failures.push(format!("oracle width of tree on {n} vertices is not 1"));
        }
        for h in Heuristic::ALL {
            trees += 1;
            let w = td_from_ordering(&t, &elimination_ordering(&t, h, n as u64)).width().0;
            if w != 1 {
                failures.push(format!("tree on {n} vertices, {h}: width {w}"));
            }
        }
    }
    let mut cliques = 0;
    for n in 1..=20 {
        let k = complete_graph(n);
        for h in Heuristic::ALL {
            cliques += 1;
            let w = td_from_ordering(&k, &elimination_ordering(&k, h, 0)).width().0;
            if w != n - 1 {
                failures.push(format!("K_{n}, {h}: width {w}"));
            }
        }
    }
    Outcome {
        name: "tree-decomposition suite",
        passed: failures.is_empty(),
        detail: format!(
            "{TD_GRAPHS} random graphs x 2 heuristics x {TD_SEEDS_PER_HEURISTIC} seeds, {trees} tree and {cliques} clique decompositions, {} failures{}",
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    }
}

fn purge_ok<D: RowData>(store: &TableStore<D>, modes: &[Mode]) -> bool
where
    D::Count: PartialEq,
{
    let purged = purge(store);
    modes.iter().all(|&m| root_aggregate(store, m) == root_aggregate(&purged, m)) && all_rows_reachable(&purged)
}

fn purge_invariance() -> Outcome {
    let asp_fail: Vec<u64> = (0..PURGE_INSTANCES_PER_KIND)
        .into_par_iter()
        .filter(|&i| {
            let p = random_program(&mut instance_rng(SEED ^ 0x91, i), &ProgramShape::default());
            let opts = Options::new(Heuristic::MinFill, i);
            [Mode::Counting, Mode::Optimization].iter().any(|&mode| {
                let run = asp::solve(&p, &opts, mode, None).unwrap();
                !purge_ok(&run.store, &[Mode::Decision, mode])
            })
        })
        .collect();
    let sat_fail: Vec<u64> = (0..PURGE_INSTANCES_PER_KIND)
        .into_par_iter()
        .filter(|&i| {
            let f = random_cnf(&mut instance_rng(SEED ^ 0x92, i), &CnfShape::default());
            let opts = Options::new(Heuristic::MinDegree, i);
            let counting = sat::solve_counting(&f, &opts, None).unwrap();
            let weighted = sat::solve_weighted(&f, &opts, None).unwrap();
            !purge_ok(&counting.store, &[Mode::Counting]) || !purge_ok(&weighted.store, &[Mode::Counting])
        })
        .collect();
    Outcome {
        name: "purge invariance",
        passed: asp_fail.is_empty() && sat_fail.is_empty(),
        detail: format!(
            "{} instances ({PURGE_INSTANCES_PER_KIND} programs, {PURGE_INSTANCES_PER_KIND} formulas); failing programs {asp_fail:?}, failing formulas {sat_fail:?}",
            2 * PURGE_INSTANCES_PER_KIND
        ),
    }
}

fn pipelines() -> Vec<Options> {
    Heuristic::ALL.iter().flat_map(|&h| (0..INVARIANCE_SEEDS).map(move |s| Options::new(h, s))).collect()
}

fn td_invariance() -> Outcome {
    let pipes = pipelines();
    let asp_fail: Vec<u64> = (0..INVARIANCE_INSTANCES_PER_KIND)
        .into_par_iter()
        .filter(|&i| {
            let p = random_program(&mut instance_rng(SEED ^ 0xa1, i), &ProgramShape::default());
            let results: Vec<_> = pipes
                .iter()
                .map(|o| (asp::count_answer_sets(&p, o).unwrap(), asp::count_optimal(&p, o).unwrap()))
                .collect();
            results.windows(2).any(|w| w[0] != w[1])
        })
        .collect();
    let sat_fail: Vec<u64> = (0..INVARIANCE_INSTANCES_PER_KIND)
        .into_par_iter()
        .filter(|&i| {
            let f = random_cnf(&mut instance_rng(SEED ^ 0xa2, i), &CnfShape::default());
            let results: Vec<_> = pipes
                .iter()
                .map(|o| (sat::count_models(&f, o).unwrap(), sat::weighted_count(&f, o).unwrap()))
                .collect();
            results.windows(2).any(|w| w[0] != w[1])
        })
        .collect();
    Outcome {
        name: "decomposition invariance",
        passed: asp_fail.is_empty() && sat_fail.is_empty(),
        detail: format!(
            "{} instances x {} pipelines; failing programs {asp_fail:?}, failing formulas {sat_fail:?}",
            2 * INVARIANCE_INSTANCES_PER_KIND,
            pipes.len()
        ),
    }
}

fn complexity_shape() -> Outcome {
    let sat_traces: Vec<Vec<TraceRecord>> = (0..SHAPE_INSTANCES_PER_KIND)
        .into_par_iter()
        .map(|i| {
            let f = random_cnf(&mut instance_rng(SEED ^ 0xb2, i), &CnfShape::default());
            let mut trace = Vec::new();
            sat::solve_counting(&f, &Options::new(Heuristic::MinFill, i), Some(&mut trace)).unwrap();
            trace
        })
        .collect();
    let asp_traces: Vec<Vec<TraceRecord>> = (0..SHAPE_INSTANCES_PER_KIND)
        .into_par_iter()
        .map(|i| {
            let p = random_program(&mut instance_rng(SEED ^ 0xb1, i), &ProgramShape::default());
            let mut trace = Vec::new();
            asp::solve(&p, &Options::new(Heuristic::MinFill, i), Mode::Counting, Some(&mut trace)).unwrap();
            trace
        })
        .collect();
    let pow = |k: usize| 1usize << k;
    let sat_records = sat_traces.iter().flatten();
    let sat_over = sat_records.clone().filter(|r| r.rows > pow(r.bag.len())).count();
    let asp_records = asp_traces.iter().flatten();
    let witness_over = asp_records.clone().filter(|r| r.max_witnesses > pow(r.bag.len() + 1)).count();
    // Tables with more rows than bag assignments: several witness sets per
    // candidate, i.e. the regime beyond single-exponential.
    let asp_beyond = asp_records.clone().filter(|r| r.rows > pow(r.bag.len())).count();
    let sat_max_ratio = sat_records.map(|r| r.rows as f64 / pow(r.bag.len()) as f64).fold(0.0, f64::max);
    let asp_max_ratio = asp_records.map(|r| r.rows as f64 / pow(r.bag.len()) as f64).fold(0.0, f64::max);
    Outcome {
        name: "complexity shape",
        passed: sat_over == 0 && witness_over == 0 && asp_beyond > 0,
        detail: format!(
            "SAT nodes over 2^|bag| rows: {sat_over}; ASP nodes over 2^(|bag|+1) witnesses: {witness_over}; \
             ASP nodes over 2^|bag| rows: {asp_beyond}; max rows/2^|bag| SAT {sat_max_ratio:.2}, ASP {asp_max_ratio:.2}"
        ),
    }
}

fn main() {
    let mut outcomes = Vec::new();
    let mut record = |o: Outcome| {
        report_line(&o);
        outcomes.push(o);
    };

    let start = Instant::now();
    let asp1 = asp_battery(SEED, ASP_INSTANCES);
    record(battery_outcome("ASP oracle battery", &asp1, start.elapsed()));

    let start = Instant::now();
    let sat1 = sat_battery(SEED, SAT_INSTANCES);
    record(battery_outcome("SAT oracle battery", &sat1, start.elapsed()));

    record(td_suite());
    record(purge_invariance());
    record(td_invariance());
    record(complexity_shape());

    let first = format!("{}\n{}", asp1.to_json(), sat1.to_json());
    let second = format!("{}\n{}", asp_battery(SEED, ASP_INSTANCES).to_json(), sat_battery(SEED, SAT_INSTANCES).to_json());
    record(Outcome {
        name: "determinism",
        passed: first == second,
        detail: format!("two battery runs, {} bytes of JSON each, identical: {}", first.len(), first == second),
    });

    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
