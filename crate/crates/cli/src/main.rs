//! `tdcount`: answer-set and model counting on tree decompositions.

mod input;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tdcount_core::asp::{self, answer_sets_from_store};
use tdcount_core::dp::{purge, root_aggregate, Aggregate, DpError, Mode, TraceRecord};
use tdcount_core::graph::{incidence_graph, incidence_graph_cnf, primal_graph, primal_graph_cnf, Graph};
use tdcount_core::oracle::{self, TooLarge};
use tdcount_core::program::{GroundProgram, SmodelsError};
use tdcount_core::projection::{atoms_by_name, run_projection};
use tdcount_core::sat;
use tdcount_core::td::{decompose, read_td, write_td, DecompositionOptions, Heuristic, Width};
use tdcount_core::{Instance, Options};

use input::{Format, Loaded};

#[derive(Parser)]
#[command(name = "tdcount", version, about = "Answer-set and model counting by dynamic programming on tree decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count answer sets.
    Count(Common),
    /// Decide consistency; exit 10 if an answer set exists, 20 otherwise.
    Solve(Common),
    /// List answer sets in lexicographic order.
    Enumerate {
        #[command(flatten)]
        common: Common,
        /// Stop after this many answer sets.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Minimum minimize cost and the number of answer sets attaining it.
    Optcount(Common),
    /// Count answer sets projected onto the given atoms.
    Pcount {
        #[command(flatten)]
        common: Common,
        /// Comma-separated atom names.
        #[arg(long, value_delimiter = ',')]
        project: Vec<String>,
    },
    /// Count models of a CNF formula.
    Mc(Common),
    /// Weighted model count of a CNF formula.
    Wmc(Common),
    /// Count models projected onto the given variables.
    Pmc {
        #[command(flatten)]
        common: Common,
        /// Comma-separated DIMACS variable indices.
        #[arg(long = "project-vars", value_delimiter = ',')]
        project_vars: Vec<usize>,
    },
    /// Decomposition widths over several seeds.
    TdStats {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "primal")]
        graph: GraphKind,
        /// Write the graph in PACE .gr format.
        #[arg(long, value_name = "FILE")]
        write_gr: Option<PathBuf>,
        /// Write the narrowest decomposition in PACE .td format.
        #[arg(long, value_name = "FILE")]
        write_td: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Instance file, or `-` for standard input.
    #[arg(default_value = "-")]
    input: String,
    #[arg(long, value_enum, default_value = "auto")]
    format: Format,
    #[arg(long, default_value = "min-fill", value_parser = parse_heuristic)]
    heuristic: Heuristic,
    #[arg(long, env = "TDCOUNT_SEED", default_value_t = 0)]
    seed: u64,
    /// Decompose with this many consecutive seeds and keep the narrowest.
    #[arg(long)]
    seeds: Option<usize>,
    /// Use this PACE .td decomposition of the primal graph instead.
    #[arg(long, value_name = "FILE")]
    td: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    /// Write one JSON record per decomposition node.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Also run the brute-force oracle and fail on disagreement.
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphKind {
    Primal,
    Incidence,
}

fn parse_heuristic(s: &str) -> Result<Heuristic, String> {
    s.parse()
}

#[derive(Debug)]
enum Failure {
    /// Bad input or usage.
    Input(String),
    /// Valid input the tool does not handle.
    Unsupported(String),
    /// Engine and oracle disagree.
    Mismatch(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Unsupported(_) => 2,
            Failure::Mismatch(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Unsupported(m) | Failure::Mismatch(m) => m,
        }
    }
}

impl From<tdcount_core::Error> for Failure {
    fn from(e: tdcount_core::Error) -> Self {
        match e {
            tdcount_core::Error::Dp(DpError::WidthTooLarge(_)) => Failure::Unsupported(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<TooLarge> for Failure {
    fn from(e: TooLarge) -> Self {
        Failure::Unsupported(e.to_string())
    }
}

impl From<SmodelsError> for Failure {
    fn from(e: SmodelsError) -> Self {
        match e {
            SmodelsError::UnsupportedRule(_) => Failure::Unsupported(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// What a subcommand produced.
struct Outcome {
    text: String,
    result: Value,
    width: Option<Width>,
    seed: Option<u64>,
    exit: u8,
}

/// Decimal string as a JSON number of unbounded size.
fn number(digits: impl ToString) -> Value {
    serde_json::from_str(&digits.to_string()).expect("decimal integers are JSON numbers")
}

fn options(common: &Common, default_seeds: usize) -> Result<Options, Failure> {
    let external_td = match &common.td {
        None => None,
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            Some(read_td(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?)
        }
    };
    Ok(Options {
        decomposition: DecompositionOptions {
            heuristic: common.heuristic,
            seed: common.seed,
            seeds: common.seeds.unwrap_or(default_seeds),
        },
        external_td,
    })
}

fn check<T: PartialEq + std::fmt::Debug>(enabled: bool, engine: &T, oracle: impl FnOnce() -> Result<T, Failure>) -> Result<(), Failure> {
    if !enabled {
        return Ok(());
    }
    let expected = oracle()?;
    if *engine != expected {
        return Err(Failure::Mismatch(format!("oracle mismatch: engine {engine:?}, oracle {expected:?}")));
    }
    Ok(())
}

fn require_program(loaded: Loaded) -> Result<GroundProgram, Failure> {
    match loaded {
        Loaded::Program(p) => Ok(p),
        Loaded::Formula(_) => Err(Failure::Input("this subcommand needs an ASP program, got a CNF formula".into())),
    }
}

fn require_formula(loaded: Loaded) -> Result<tdcount_core::cnf::CnfFormula, Failure> {
    match loaded {
        Loaded::Formula(f) => Ok(f),
        Loaded::Program(_) => Err(Failure::Input("this subcommand needs a CNF formula, got an ASP program".into())),
    }
}

fn render_set(p: &GroundProgram, set: &[usize]) -> Vec<String> {
    set.iter().map(|&a| p.atom_name(a)).collect()
}

fn run(command: &Command, trace: &mut Vec<TraceRecord>) -> Result<(Outcome, Common), Failure> {
    let (common, default_seeds) = match command {
        Command::Count(c) | Command::Solve(c) | Command::Optcount(c) | Command::Mc(c) | Command::Wmc(c) => (c, 1),
        Command::Enumerate { common, .. } | Command::Pcount { common, .. } | Command::Pmc { common, .. } => (common, 1),
        Command::TdStats { common, .. } => (common, 5),
    };
    let opts = options(common, default_seeds)?;
    let loaded = input::load(&common.input, common.format)?;
    let oc = common.oracle_check;
    let tr = common.trace.is_some().then_some(trace);
    let outcome = match command {
        Command::Count(_) | Command::Solve(_) | Command::Optcount(_) => {
            let p = require_program(loaded)?;
            let mode = match command {
                Command::Count(_) => Mode::Counting,
                Command::Solve(_) => Mode::Decision,
                _ => Mode::Optimization,
            };
            let run = asp::solve(&p, &opts, mode, tr)?;
            let (text, result, exit) = match run.aggregate() {
                Aggregate::Count(c) => {
                    check(oc, &c, || Ok(oracle::brute_answer_sets(&p)?.len().into()))?;
                    (c.to_string(), number(&c), 0)
                }
                Aggregate::Consistent(b) => {
                    check(oc, &b, || Ok(!oracle::brute_answer_sets(&p)?.is_empty()))?;
                    let word = if b { "CONSISTENT" } else { "INCONSISTENT" };
                    (word.to_string(), json!(b), if b { 10 } else { 20 })
                }
                Aggregate::Optimum { cost, count } => {
                    check(oc, &(cost.clone(), count.clone()), || Ok(oracle::brute_optimum(&p)?))?;
                    match cost {
                        Some(c) => (format!("cost {c} count {count}"), json!({"cost": number(&c), "count": number(&count)}), 0),
                        None => ("INCONSISTENT".to_string(), json!({"cost": null, "count": number(0)}), 0),
                    }
                }
            };
            Outcome { text, result, width: Some(run.prepared.width()), seed: run.prepared.seed, exit }
        }
        Command::Enumerate { limit, .. } => {
            let p = require_program(loaded)?;
            let run = asp::solve(&p, &opts, Mode::Counting, tr)?;
            let sets = answer_sets_from_store(&run.prepared.ntd, &purge(&run.store), *limit);
            check(oc, &sets, || {
                let mut all = oracle::brute_answer_sets(&p)?;
                all.truncate(limit.unwrap_or(usize::MAX));
                Ok(all)
            })?;
            let named: Vec<Vec<String>> = sets.iter().map(|s| render_set(&p, s)).collect();
            let text = named.iter().map(|s| format!("{{{}}}", s.join(", "))).collect::<Vec<_>>().join("\n");
            Outcome { text, result: json!(named), width: Some(run.prepared.width()), seed: run.prepared.seed, exit: 0 }
        }
        Command::Pcount { project, .. } => {
            let p = require_program(loaded)?;
            let ids = atoms_by_name(&p, project)?;
            let run = run_projection(Instance::Asp(&p), &ids, &opts, tr)?;
            check(oc, &run.count, || Ok(oracle::brute_projected_count(Instance::Asp(&p), &ids)?))?;
            Outcome { text: run.count.to_string(), result: number(&run.count), width: Some(run.width), seed: run.seed, exit: 0 }
        }
        Command::Mc(_) => {
            let f = require_formula(loaded)?;
            let run = sat::solve_counting(&f, &opts, tr)?;
            let c = match root_aggregate(&run.store, Mode::Counting) {
                Aggregate::Count(c) => c,
                _ => unreachable!(),
            };
            check(oc, &c, || Ok(oracle::brute_count_models(&f)?))?;
            Outcome { text: c.to_string(), result: number(&c), width: Some(run.prepared.width()), seed: run.prepared.seed, exit: 0 }
        }
        Command::Wmc(_) => {
            let f = require_formula(loaded)?;
            let run = sat::solve_weighted(&f, &opts, tr)?;
            let w = match root_aggregate(&run.store, Mode::Counting) {
                Aggregate::Count(w) => w,
                _ => unreachable!(),
            };
            check(oc, &w, || Ok(oracle::brute_weighted_count(&f)?))?;
            Outcome { text: w.to_string(), result: json!(w.to_string()), width: Some(run.prepared.width()), seed: run.prepared.seed, exit: 0 }
        }
        Command::Pmc { project_vars, .. } => {
            let f = require_formula(loaded)?;
            let run = run_projection(Instance::Cnf(&f), project_vars, &opts, tr)?;
            check(oc, &run.count, || Ok(oracle::brute_projected_count(Instance::Cnf(&f), project_vars)?))?;
            Outcome { text: run.count.to_string(), result: number(&run.count), width: Some(run.width), seed: run.seed, exit: 0 }
        }
        Command::TdStats { graph, write_gr, write_td: td_out, .. } => td_stats(&loaded, *graph, &opts, oc, write_gr, td_out)?,
    };
    Ok((outcome, common.clone()))
}

fn td_stats(
    loaded: &Loaded,
    kind: GraphKind,
    opts: &Options,
    oracle_check: bool,
    write_gr: &Option<PathBuf>,
    write_td_path: &Option<PathBuf>,
) -> Result<Outcome, Failure> {
    let g: Graph = match (loaded, kind) {
        (Loaded::Program(p), GraphKind::Primal) => primal_graph(p),
        (Loaded::Program(p), GraphKind::Incidence) => incidence_graph(p),
        (Loaded::Formula(f), GraphKind::Primal) => primal_graph_cnf(f),
        (Loaded::Formula(f), GraphKind::Incidence) => incidence_graph_cnf(f),
    };
    let d = opts.decomposition;
    let mut lines = vec![format!("vertices {} edges {}", g.num_vertices(), g.num_edges())];
    let mut per_seed = Vec::new();
    for i in 0..d.seeds.max(1) as u64 {
        let seed = d.seed.wrapping_add(i);
        let w = decompose(&g, &DecompositionOptions { heuristic: d.heuristic, seed, seeds: 1 }).width();
        lines.push(format!("seed {seed} width {w}"));
        per_seed.push(json!({"seed": seed, "width": w.0}));
    }
    let best = decompose(&g, &d);
    lines.push(format!("best width {} seed {}", best.width(), best.seed));
    let mut result = json!({
        "graph": match kind { GraphKind::Primal => "primal", GraphKind::Incidence => "incidence" },
        "vertices": g.num_vertices(),
        "edges": g.num_edges(),
        "seeds": per_seed,
    });
    if oracle_check {
        let tw = oracle::brute_treewidth(&g)?;
        if best.width().0 < tw {
            return Err(Failure::Mismatch(format!("heuristic width {} below treewidth {tw}", best.width())));
        }
        lines.push(format!("treewidth {tw}"));
        result["treewidth"] = json!(tw);
    }
    let write = |path: &PathBuf, text: String| {
        fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    };
    if let Some(path) = write_gr {
        write(path, g.to_pace())?;
    }
    if let Some(path) = write_td_path {
        write(path, write_td(&best.td))?;
    }
    Ok(Outcome { text: lines.join("\n"), result, width: Some(best.width()), seed: Some(best.seed), exit: 0 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let start = Instant::now();
    let mut trace = Vec::new();
    match run(&cli.command, &mut trace) {
        Ok((outcome, common)) => {
            if let Some(path) = &common.trace {
                let body: String = trace.iter().map(|r| r.to_json_line() + "\n").collect();
                if let Err(e) = fs::write(path, body) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            let mut out = std::io::stdout().lock();
            let printed = if common.json {
                let doc = json!({
                    "result": outcome.result,
                    "width": outcome.width.map(|w| w.0),
                    "heuristic": common.heuristic.name(),
                    "seed": outcome.seed,
                    "elapsed_ms": start.elapsed().as_millis() as u64,
                });
                writeln!(out, "{doc}")
            } else if outcome.text.is_empty() {
                Ok(())
            } else {
                writeln!(out, "{}", outcome.text)
            };
            if printed.is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(outcome.exit)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
