//! Command-line front end: decide / check / saturate / tableau /
//! matrix over `.slt` fact files.
//!
//! Exit codes: 0 = proved / consistent / success, 1 = refuted or
//! independent (decide) or inconsistent (check), 2 = usage or parse
//! error, 3 = internal invariant failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use slogic::formula::SFormula;
use slogic::parser::parse_sformula;
use slogic::semantics::Evidence;
use slogic::tableau::build_systematic;
use slogic::zoodb::{
    self, check, export_dot, ingest, matrix, query_with, save_closure, saturate_db, CheckResult,
    Database, Engine, InconsistencyReport, QueryAnswer, ZooError,
};

#[derive(Parser)]
#[command(name = "slogic", version, about = "s-logic decision engine over .slt fact files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Auto,
    Tableau,
    F1,
    F2,
    Oracle,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Tableau => Engine::Tableau,
            EngineArg::F1 => Engine::F1,
            EngineArg::F2 => Engine::F2,
            EngineArg::Oracle => Engine::Oracle,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a query follows from, contradicts, or is
    /// independent of the theory.
    Decide {
        theory: PathBuf,
        /// Query s-formula, e.g. "COH =/> SRT22".
        query: String,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Emit the proof or rule trace for positive verdicts.
        #[arg(long)]
        proof: bool,
        /// Emit countermodel frames for negative verdicts.
        #[arg(long)]
        model: bool,
    },
    /// Check the theory for consistency.
    Check {
        theory: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Enumerate the strongest derivable fragment facts.
    Saturate {
        theory: PathBuf,
        /// Largest antecedent size to enumerate.
        #[arg(long, default_value_t = 2)]
        max_ante: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the digest-guarded closure report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the systematic tableau for the theory, or for the theory
    /// plus the strict negation of a query.
    Tableau {
        theory: PathBuf,
        query: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the pairwise implication matrix over the declared
    /// variables.
    Matrix {
        theory: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write a DOT rendering here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A run outcome that already knows its exit code.
enum Failure {
    /// Operator error: bad file, bad formula, bad flag combination.
    Usage(String),
    /// The engine hit an internal limit or invariant.
    Internal(String),
}

impl From<ZooError> for Failure {
    fn from(e: ZooError) -> Failure {
        match e {
            ZooError::Tableau(_) | ZooError::InconsistentDatabase => {
                Failure::Internal(e.to_string())
            }
            ZooError::NotInFragment(_, _) | ZooError::OracleLimit(_) => {
                Failure::Usage(e.to_string())
            }
        }
    }
}

fn load_db(path: &Path) -> Result<Database, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    match ingest(&text) {
        Ok((db, warnings)) => {
            for w in warnings {
                eprintln!("{}:{w}", path.display());
            }
            Ok(db)
        }
        Err(diags) => {
            let lines: Vec<String> =
                diags.iter().map(|d| format!("{}:{d}", path.display())).collect();
            Err(Failure::Usage(lines.join("\n")))
        }
    }
}

fn parse_query(text: &str) -> Result<SFormula, Failure> {
    parse_sformula(text).map_err(|e| Failure::Usage(format!("query: {e}")))
}

fn evidence_text(e: &Evidence) -> String {
    match e {
        Evidence::Tableau(proof) => proof.render_text(),
        Evidence::Trace(trace) => trace.render_text(),
        Evidence::Semantic => "established by exhaustive valuation search\n".into(),
    }
}

fn evidence_json(e: &Evidence) -> serde_json::Value {
    match e {
        Evidence::Tableau(proof) => json!({"tableau": proof.to_json()}),
        Evidence::Trace(trace) => json!({"trace": trace.to_json()}),
        Evidence::Semantic => json!({"oracle": true}),
    }
}

fn report_text(r: &InconsistencyReport) -> String {
    match r {
        InconsistencyReport::Conflict(c) => {
            format!("{c}\n{}", c.derivation.render_text())
        }
        InconsistencyReport::Refutation(proof) => {
            format!("closed tableau for the theory:\n{}", proof.render_text())
        }
    }
}

fn report_json(r: &InconsistencyReport) -> serde_json::Value {
    match r {
        InconsistencyReport::Conflict(c) => json!({
            "conflict": c.nonimp.to_string(),
            "derivation": c.derivation.to_json(),
        }),
        InconsistencyReport::Refutation(proof) => json!({"tableau": proof.to_json()}),
    }
}

fn run_decide(
    theory: &Path,
    query: &str,
    engine: Engine,
    format: Format,
    proof: bool,
    model: bool,
) -> Result<u8, Failure> {
    let db = load_db(theory)?;
    let phi = parse_query(query)?;
    let answer = query_with(&db, &phi, engine)?;
    let code = match &answer {
        QueryAnswer::Proved(_) => 0,
        _ => 1,
    };
    match format {
        Format::Text => {
            println!("{}", answer.status());
            match &answer {
                QueryAnswer::Proved(e) | QueryAnswer::Refuted(e) => {
                    if proof {
                        print!("{}", evidence_text(e));
                    }
                }
                QueryAnswer::Independent { against_query, against_negation } => {
                    if model {
                        println!("countermodel of the query: {}", against_query.to_json());
                        println!(
                            "countermodel of its negation: {}",
                            against_negation.to_json()
                        );
                    }
                }
                QueryAnswer::Inconsistent(r) => print!("{}", report_text(r)),
            }
        }
        Format::Json => {
            let mut doc = json!({"verdict": answer.status()});
            match &answer {
                QueryAnswer::Proved(e) | QueryAnswer::Refuted(e) => {
                    if proof {
                        doc["evidence"] = evidence_json(e);
                    }
                }
                QueryAnswer::Independent { against_query, against_negation } => {
                    if model {
                        doc["counterQuery"] =
                            serde_json::to_value(against_query).expect("frame serializes");
                        doc["counterNegation"] =
                            serde_json::to_value(against_negation).expect("frame serializes");
                    }
                }
                QueryAnswer::Inconsistent(r) => doc["report"] = report_json(r),
            }
            println!("{doc}");
        }
    }
    Ok(code)
}

fn run_check(theory: &Path, format: Format) -> Result<u8, Failure> {
    let db = load_db(theory)?;
    match check(&db)? {
        CheckResult::Consistent(frame) => {
            match format {
                Format::Text => {
                    println!("CONSISTENT");
                    println!("model: {}", frame.to_json());
                }
                Format::Json => println!(
                    "{}",
                    json!({
                        "verdict": "CONSISTENT",
                        "model": serde_json::to_value(&frame).expect("frame serializes"),
                    })
                ),
            }
            Ok(0)
        }
        CheckResult::Inconsistent(report) => {
            match format {
                Format::Text => {
                    println!("INCONSISTENT");
                    print!("{}", report_text(&report));
                }
                Format::Json => println!(
                    "{}",
                    json!({"verdict": "INCONSISTENT", "report": report_json(&report)})
                ),
            }
            Ok(1)
        }
    }
}

fn run_saturate(
    theory: &Path,
    max_ante: usize,
    format: Format,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let db = load_db(theory)?;
    let report = saturate_db(&db, max_ante)?;
    match format {
        Format::Text => {
            for (fact, _) in &report.facts {
                println!("{fact}");
            }
        }
        Format::Json => println!("{}", zoodb::closure_json(&db, &report)),
    }
    if let Some(path) = out {
        save_closure(path, &db, &report).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(0)
}

fn run_tableau(theory: &Path, query: Option<&str>, format: Format) -> Result<u8, Failure> {
    let db = load_db(theory)?;
    let theory = match query {
        Some(q) => db.theory().with_negated(&parse_query(q)?),
        None => db.theory(),
    };
    let tableau = build_systematic(&theory)
        .map_err(|e| Failure::Internal(e.to_string()))?;
    match format {
        Format::Text => {
            println!("{}", if tableau.closed { "CLOSED" } else { "OPEN" });
            print!("{}", tableau.render_text());
        }
        Format::Json => println!(
            "{}",
            json!({"closed": tableau.closed, "tableau": tableau.to_json()})
        ),
    }
    Ok(0)
}

fn run_matrix(theory: &Path, format: Format, out: Option<&Path>) -> Result<u8, Failure> {
    let db = load_db(theory)?;
    let m = match matrix(&db) {
        Ok(m) => m,
        Err(ZooError::InconsistentDatabase) => {
            return Err(Failure::Usage("the database is inconsistent; fix it before asking for a matrix".into()))
        }
        Err(e) => return Err(e.into()),
    };
    match format {
        Format::Text => print!("{}", m.render_text()),
        Format::Json => println!("{}", m.to_json()),
    }
    if let Some(path) = out {
        std::fs::write(path, export_dot(&m))
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Decide { theory, query, engine, format, proof, model } => {
            run_decide(theory, query, (*engine).into(), *format, *proof, *model)
        }
        Command::Check { theory, format } => run_check(theory, *format),
        Command::Saturate { theory, max_ante, format, out } => {
            run_saturate(theory, *max_ante, *format, out.as_deref())
        }
        Command::Tableau { theory, query, format } => {
            run_tableau(theory, query.as_deref(), *format)
        }
        Command::Matrix { theory, format, out } => run_matrix(theory, *format, out.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(message)) => {
            eprintln!("{message}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(message)) => {
            eprintln!("internal error: {message}");
            ExitCode::from(3)
        }
    }
}
