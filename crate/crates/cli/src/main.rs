use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use cirquent_core::decide::count_witnesses;
use cirquent_core::oracle::{brute_force_tautology, brute_force_vc, eval_sigma2};
use cirquent_core::reduce::{vc_dropped_vertices, vc_literal_count};
use cirquent_core::scaling::{self, Family};
use cirquent_core::{
    check, decide_ccc, decide_cl5, formula_cirquent, metrics, parse, prove, tqbf_to_cl5, vc_to_cl5minus, CccDecision,
    Cirquent, Cl5Decision, Formula, Graph, Outcome, Proof, SearchBudget, Sigma2Instance, SystemId, VcInstance,
};

/// Proofs, proof search and decision procedures for cirquent calculus.
#[derive(Parser)]
#[command(name = "cirquent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and report its normal form and shape
    Parse {
        #[arg(long)]
        formula: String,
    },
    /// Render a cirquent given as a formula or a cirquent file
    RenderCirquent {
        /// Render the one-oformula cirquent of this formula
        #[arg(long, conflicts_with = "cirquent", required_unless_present = "cirquent")]
        formula: Option<String>,
        /// Cirquent file, JSON or the text form
        #[arg(long)]
        cirquent: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a proof file against a system
    Check {
        #[arg(long)]
        system: SystemId,
        #[arg(long)]
        proof: PathBuf,
    },
    /// Search for a proof of a formula
    Prove {
        #[arg(long)]
        system: SystemId,
        #[arg(long)]
        formula: String,
        /// Maximum number of search states to expand
        #[arg(long)]
        budget_nodes: Option<usize>,
        /// Write the proof found to this file
        #[arg(long)]
        emit_proof: Option<PathBuf>,
    },
    /// Decide provability semantically
    Decide {
        #[arg(long)]
        system: SystemId,
        #[arg(long)]
        formula: String,
        /// Write the witness (CL5) or proof (CL5-) to this file
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Also count every witness by exhaustive enumeration (CL5)
        #[arg(long)]
        count_witnesses: bool,
    },
    /// Reduce a vertex-cover instance to a CL5- formula
    ReduceVc {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = ReduceFormat::Json)]
        format: ReduceFormat,
    },
    /// Reduce an exists-forall QBF instance to a CL5 formula
    ReduceQbf {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ReduceFormat::Json)]
        format: ReduceFormat,
    },
    /// Run the search on a scaling family and emit CSV
    Bench {
        #[arg(long, value_enum)]
        family: BenchFamily,
        /// Number of instances, growing with the index
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        budget_nodes: Option<usize>,
    },
    /// Brute-force reference answers
    Oracle {
        #[command(subcommand)]
        query: OracleQuery,
    },
}

#[derive(Subcommand)]
enum OracleQuery {
    /// Smallest vertex cover of size at most k
    Vc {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Truth of an exists-forall instance
    Qbf {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Truth-table tautology check
    Tautology {
        #[arg(long)]
        formula: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchFamily {
    Identity,
    Vc,
    Qbf,
    All,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// How a successful run ended.
enum Status {
    Yes,
    No,
    Budget,
}

impl Status {
    fn code(self) -> ExitCode {
        match self {
            Status::Yes => ExitCode::SUCCESS,
            Status::No => ExitCode::from(1),
            Status::Budget => ExitCode::from(3),
        }
    }

    fn of(outcome: &Outcome) -> Status {
        match outcome {
            Outcome::Proved(_) => Status::Yes,
            Outcome::Refuted => Status::No,
            Outcome::BudgetExceeded => Status::Budget,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Status, CliError> {
    match command {
        Command::Parse { formula } => {
            let f = formula_arg(&formula)?;
            let atoms: Vec<String> = f.atoms().iter().map(|a| a.to_string()).collect();
            emit(&json!({
                "formula": f.to_string(),
                "length": f.length(),
                "atoms": atoms,
                "positive_occurrences": f.positive_occurrences(),
                "binary": f.is_binary(),
                "normal_binary": f.is_normal_binary(),
            }))?;
            Ok(Status::Yes)
        }
        Command::RenderCirquent { formula, cirquent, format } => {
            let c = match (formula, cirquent) {
                (Some(text), _) => formula_cirquent(formula_arg(&text)?),
                (None, Some(path)) => read_cirquent(&path)?,
                (None, None) => return Err(CliError::Usage("give --formula or --cirquent".into())),
            };
            let mut out = io::stdout().lock();
            match format {
                Format::Text => writeln!(out, "{}", c.render_text().trim_end())?,
                Format::Dot => write!(out, "{}", c.render_dot())?,
                Format::Json => writeln!(out, "{}", to_json(&c))?,
            }
            Ok(Status::Yes)
        }
        Command::Check { system, proof } => {
            let p = read_proof(&proof)?;
            match check(system, &p) {
                Ok(()) => {
                    emit(&json!({ "valid": true, "system": system, "metrics": metrics(&p) }))?;
                    Ok(Status::Yes)
                }
                Err(diagnostics) => {
                    let mut err = io::stderr().lock();
                    for d in &diagnostics {
                        writeln!(err, "{}", serde_json::to_string(d).expect("diagnostics serialize"))?;
                    }
                    emit(&json!({ "valid": false, "system": system, "errors": diagnostics.len() }))?;
                    Ok(Status::No)
                }
            }
        }
        Command::Prove { system, formula, budget_nodes, emit_proof } => {
            let f = formula_arg(&formula)?;
            let budget = budget_arg(budget_nodes)?;
            let result = prove(system, &f, &budget);
            log::info!("expanded {} states in {:?}", result.stats.nodes_expanded, result.stats.elapsed);
            if let (Some(path), Some(p)) = (&emit_proof, result.outcome.proof()) {
                write_file(path, &p.to_json_pretty())?;
            }
            let mut report = json!({
                "result": result.outcome.label(),
                "system": system,
                "formula": f.to_string(),
                "nodes_expanded": result.stats.nodes_expanded,
            });
            if let Some(p) = result.outcome.proof() {
                report["metrics"] = serde_json::to_value(metrics(p)).expect("metrics serialize");
            }
            emit(&report)?;
            Ok(Status::of(&result.outcome))
        }
        Command::Decide { system, formula, witness, count_witnesses: count } => {
            let f = formula_arg(&formula)?;
            decide(system, &f, witness.as_deref(), count)
        }
        Command::ReduceVc { graph, k, format } => {
            if k == 0 {
                return Err(CliError::Usage("--k must be at least 1".into()));
            }
            let inst = VcInstance { graph: read_graph(&graph)?, k };
            let f = vc_to_cl5minus(&inst).map_err(|e| CliError::Usage(e.to_string()))?;
            match format {
                ReduceFormat::Text => println!("{f}"),
                ReduceFormat::Json => emit(&json!({
                    "formula": f.to_string(),
                    "length": f.length(),
                    "k": k,
                    "literals": vc_literal_count(&inst),
                    "dropped_vertices": vc_dropped_vertices(&inst.graph),
                }))?,
            }
            Ok(Status::Yes)
        }
        Command::ReduceQbf { instance, format } => {
            let inst = read_sigma2(&instance)?;
            let reduction = tqbf_to_cl5(&inst).map_err(|e| CliError::Usage(e.to_string()))?;
            match format {
                ReduceFormat::Text => println!("{}", reduction.formula),
                ReduceFormat::Json => emit(&json!({
                    "formula": reduction.formula.to_string(),
                    "length": reduction.formula.length(),
                    "fresh": reduction.fresh,
                    "replacements": reduction.replacements,
                }))?,
            }
            Ok(Status::Yes)
        }
        Command::Bench { family, count, seed, budget_nodes } => {
            bench(family, count, seed, &budget_arg(budget_nodes)?)?;
            Ok(Status::Yes)
        }
        Command::Oracle { query } => oracle(query),
    }
}

fn decide(system: SystemId, f: &Formula, witness: Option<&Path>, count: bool) -> Result<Status, CliError> {
    match system {
        SystemId::Ccc => match decide_ccc(f) {
            CccDecision::Provable => {
                emit(&json!({ "result": "provable", "system": system }))?;
                Ok(Status::Yes)
            }
            CccDecision::NotProvable { countermodel } => {
                emit(&json!({ "result": "not_provable", "system": system, "countermodel": countermodel }))?;
                Ok(Status::No)
            }
        },
        SystemId::Cl5 => {
            let mut report = match decide_cl5(f) {
                Cl5Decision::Provable(w) => {
                    if let Some(path) = witness {
                        write_file(path, &to_json(&w))?;
                    }
                    json!({ "result": "provable", "system": system, "witness": w })
                }
                Cl5Decision::NotProvable => json!({ "result": "not_provable", "system": system }),
            };
            if count {
                report["witness_count"] = json!(count_witnesses(f));
            }
            let status = if report["result"] == "provable" { Status::Yes } else { Status::No };
            emit(&report)?;
            Ok(status)
        }
        SystemId::Cl5minus => {
            let result = prove(system, f, &SearchBudget::default());
            if let (Some(path), Some(p)) = (witness, result.outcome.proof()) {
                write_file(path, &p.to_json_pretty())?;
            }
            let label = match result.outcome {
                Outcome::Proved(_) => "provable",
                Outcome::Refuted => "not_provable",
                Outcome::BudgetExceeded => "budget_exceeded",
            };
            emit(&json!({ "result": label, "system": system }))?;
            Ok(Status::of(&result.outcome))
        }
    }
}

#[derive(Serialize)]
struct BenchRow {
    instance_id: String,
    k: usize,
    result: &'static str,
    rule_count: Option<usize>,
    proof_size: Option<usize>,
    max_width: Option<usize>,
    elapsed_ms: String,
}

fn bench(family: BenchFamily, count: usize, seed: u64, budget: &SearchBudget) -> Result<(), CliError> {
    let families = match family {
        BenchFamily::Identity => vec![Family::Identity],
        BenchFamily::Vc => vec![Family::Vc],
        BenchFamily::Qbf => vec![Family::Qbf],
        BenchFamily::All => vec![Family::Identity, Family::Vc, Family::Qbf],
    };
    let mut out = csv::Writer::from_writer(io::stdout().lock());
    for fam in families {
        for inst in scaling::family(fam, count, seed) {
            let result = prove(fam.system(), &inst.formula, budget);
            let m = result.outcome.proof().map(metrics);
            out.serialize(BenchRow {
                instance_id: inst.id,
                k: inst.formula.length(),
                result: result.outcome.label(),
                rule_count: m.as_ref().map(|m| m.rule_count),
                proof_size: m.as_ref().map(|m| m.size),
                max_width: m.as_ref().map(|m| m.max_width),
                elapsed_ms: format!("{:.3}", result.stats.elapsed.as_secs_f64() * 1000.0),
            })?;
        }
    }
    out.flush()?;
    Ok(())
}

fn oracle(query: OracleQuery) -> Result<Status, CliError> {
    let yes_no = |b: bool| if b { Status::Yes } else { Status::No };
    match query {
        OracleQuery::Vc { graph, k } => {
            let inst = VcInstance { graph: read_graph(&graph)?, k };
            let cover = brute_force_vc(&inst).map_err(|e| CliError::Usage(e.to_string()))?;
            emit(&json!({ "cover": cover }))?;
            Ok(yes_no(cover.is_some()))
        }
        OracleQuery::Qbf { instance } => {
            let truth = eval_sigma2(&read_sigma2(&instance)?).map_err(|e| CliError::Usage(e.to_string()))?;
            emit(&json!({ "true": truth }))?;
            Ok(yes_no(truth))
        }
        OracleQuery::Tautology { formula } => {
            let holds = brute_force_tautology(&formula_arg(&formula)?).map_err(|e| CliError::Usage(e.to_string()))?;
            emit(&json!({ "tautology": holds }))?;
            Ok(yes_no(holds))
        }
    }
}

fn budget_arg(nodes: Option<usize>) -> Result<SearchBudget, CliError> {
    match nodes {
        Some(0) => Err(CliError::Usage("--budget-nodes must be positive".into())),
        Some(n) => Ok(SearchBudget::with_nodes(n)),
        None => Ok(SearchBudget::default()),
    }
}

fn formula_arg(text: &str) -> Result<Formula, CliError> {
    parse(text).map_err(|e| CliError::Usage(format!("bad formula: {e}")))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    fs::write(path, body).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn read_cirquent(path: &Path) -> Result<Cirquent, CliError> {
    let text = read(path)?;
    let bad = |e: String| CliError::Usage(format!("{}: {e}", path.display()));
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| bad(e.to_string()))
    } else {
        Cirquent::parse_text(&text).map_err(|e| bad(e.to_string()))
    }
}

fn read_proof(path: &Path) -> Result<Proof, CliError> {
    Proof::from_json(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    Graph::parse(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_sigma2(path: &Path) -> Result<Sigma2Instance, CliError> {
    Sigma2Instance::parse(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("values serialize")
}

fn emit(value: &Value) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    writeln!(out, "{}", to_json(value))?;
    Ok(())
}
