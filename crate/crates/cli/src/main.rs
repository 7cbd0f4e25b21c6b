use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fdes::format::{load_model, load_problem};
use fdes::model::{eff_prefix, marked_degree};
use fdes::oracle::{brute_force_check, OracleConfig};
use fdes::reach::{dump_dot, dump_tree, TreeMode};
use fdes::report::{decision_json, decision_table, render_csv, render_json, render_table};
use fdes::supervisor::{closed_loop_trace, synthesize, Supervisor};
use fdes::verify::{theorem1_decision, DecisionStatus, RowMode, VerificationReport};
use fdes::ControlProblem;

#[derive(Parser)]
#[command(name = "fdes", version, about = "Supervisory control checks for fuzzy discrete event systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum ReportFormat {
    Table,
    Csv,
    Json,
}

#[derive(Copy, Clone, ValueEnum)]
enum Rows {
    All,
    Failures,
}

impl From<Rows> for RowMode {
    fn from(r: Rows) -> RowMode {
        match r {
            Rows::All => RowMode::All,
            Rows::Failures => RowMode::Failures,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Tree {
    Paper,
    Graph,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a supervisor exists for the specification.
    Check {
        plant: PathBuf,
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        report: ReportFormat,
        #[arg(long, value_enum, default_value = "failures")]
        rows: Rows,
    },
    /// Print the reachable state pairs as a tree or graph.
    Reach {
        plant: PathBuf,
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "paper")]
        tree: Tree,
        /// Emit a DOT digraph instead of text.
        #[arg(long)]
        dot: bool,
    },
    /// Build the supervisor and write it as JSON.
    Synthesize {
        plant: PathBuf,
        spec: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run an event string through the closed loop.
    Simulate {
        plant: PathBuf,
        supervisor: PathBuf,
        /// Comma-separated event names; empty for ε.
        string: String,
        /// Also print the specification's effective prefix degree.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Check the conditions by enumerating strings up to a length bound.
    Oracle {
        plant: PathBuf,
        spec: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        /// Longest t for observability; defaults to --max-len.
        #[arg(long)]
        max_t_len: Option<usize>,
        #[arg(long, value_enum, default_value = "table")]
        report: ReportFormat,
        #[arg(long, value_enum, default_value = "failures")]
        rows: Rows,
    },
}

/// Exit code for errors in the input files or arguments.
const INPUT_ERROR: u8 = 3;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn problem(plant: &Path, spec: &Path) -> Result<ControlProblem> {
    let (g, h) = (read(plant)?, read(spec)?);
    load_problem(&g, &h).with_context(|| format!("loading {} and {}", plant.display(), spec.display()))
}

fn print_reports(reports: &[&VerificationReport], names: &[String], format: ReportFormat) {
    match format {
        ReportFormat::Table => {
            let parts: Vec<String> = reports.iter().map(|r| render_table(r, names)).collect();
            print!("{}", parts.join("\n"));
        }
        ReportFormat::Csv => print!("{}", render_csv(reports.iter().copied(), names)),
        ReportFormat::Json => {
            let parts: Vec<serde_json::Value> = reports
                .iter()
                .map(|r| serde_json::from_str(&render_json(r, names)).expect("report json"))
                .collect();
            println!("{}", serde_json::to_string_pretty(&parts).expect("json"));
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check { plant, spec, report, rows } => {
            let p = problem(&plant, &spec)?;
            let d = theorem1_decision(&p, rows.into());
            match report {
                ReportFormat::Table => print!("{}", decision_table(&d, p.names())),
                ReportFormat::Csv => print!("{}", render_csv(d.reports(), p.names())),
                ReportFormat::Json => {
                    println!("{}", serde_json::to_string_pretty(&decision_json(&d, p.names()))?)
                }
            }
            Ok(match d.status {
                DecisionStatus::Exists => 0,
                DecisionStatus::ConditionsFail => 1,
                DecisionStatus::HypothesisViolated => 2,
            })
        }
        Command::Reach { plant, spec, tree, dot } => {
            let p = problem(&plant, &spec)?;
            if dot {
                print!("{}", dump_dot(&p));
            } else {
                let mode = match tree {
                    Tree::Paper => TreeMode::Paper,
                    Tree::Graph => TreeMode::Graph,
                };
                print!("{}", dump_tree(&p, mode));
            }
            Ok(0)
        }
        Command::Synthesize { plant, spec, out } => {
            let p = problem(&plant, &spec)?;
            let sup = synthesize(&p);
            let json = sup.to_json();
            match out {
                Some(path) => fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?,
                None => println!("{json}"),
            }
            for d in &sup.divergences {
                eprintln!(
                    "note: after `{}` the consistent states ask for {} between {} and {}",
                    d.observation, d.event, d.low, d.high
                );
            }
            Ok(0)
        }
        Command::Simulate { plant, supervisor, string, spec } => {
            let g = load_model(&read(&plant)?).with_context(|| format!("loading {}", plant.display()))?;
            let sup = Supervisor::from_json(&read(&supervisor)?)
                .with_context(|| format!("loading {}", supervisor.display()))?;
            let s = sup.parse_string(&string)?;
            let h = match &spec {
                Some(path) => Some(problem(&plant, path)?),
                None => None,
            };
            let trace = closed_loop_trace(&g.automaton, &sup, &s)?;
            let mut header = String::from("prefix\trunning\tmarked");
            if h.is_some() {
                header.push_str("\tspec_prefix\tspec_marked");
            }
            println!("{header}");
            for ((prefix, running), marked) in trace.prefixes.iter().zip(&trace.running).zip(&trace.marked) {
                let mut line = format!("{}\t{running}\t{marked}", prefix.render(sup.names()));
                if let Some(p) = &h {
                    let pr = eff_prefix(&p.spec, &p.attrs, prefix)?;
                    let k = marked_degree(&p.spec, prefix)?;
                    line.push_str(&format!("\t{pr}\t{k}"));
                }
                println!("{line}");
            }
            Ok(0)
        }
        Command::Oracle { plant, spec, max_len, max_t_len, report, rows } => {
            let p = problem(&plant, &spec)?;
            let mut cfg = OracleConfig::new(max_len, max_t_len.unwrap_or(max_len));
            cfg.rows = rows.into();
            let reports = brute_force_check(&p, &cfg);
            let refs: Vec<&VerificationReport> = reports.iter().collect();
            print_reports(&refs, p.names(), report);
            Ok(if reports.iter().all(|r| r.verdict) { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
