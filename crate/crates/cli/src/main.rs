use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mtstab_cli::commands::{self, PerturbMode};
use mtstab_cli::{write_text, CliError, CliResult};
use mtstab_core::stability::{CounterexampleFamily, SuiteConfig};
use mtstab_core::{Guards, MetricId};

#[derive(Parser)]
#[command(name = "mtstab", version, about = "Merge trees, edit distances and perturbation stability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Size guards; unset flags keep the command's defaults.
#[derive(Args, Clone, Copy)]
struct GuardArgs {
    /// Node limit of the exhaustive mapping search.
    #[arg(long)]
    brute_nodes: Option<usize>,
    /// Edge limit of the deformation search.
    #[arg(long)]
    deform_edges: Option<usize>,
    /// Edge limit for enumerating branch decompositions.
    #[arg(long)]
    branch_edges: Option<usize>,
}

impl GuardArgs {
    fn over(self, base: Guards) -> Guards {
        Guards {
            brute_nodes: self.brute_nodes.unwrap_or(base.brute_nodes),
            deform_edges: self.deform_edges.unwrap_or(base.deform_edges),
            branch_edges: self.branch_edges.unwrap_or(base.branch_edges),
            ..base
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the merge tree, BDT and ordered BDT of a field as JSON.
    BuildTree { field: PathBuf },
    /// Distance matrix over all *.json field files in a directory.
    Matrix {
        dir: PathBuf,
        #[arg(long, value_parser = parse_metric)]
        metric: MetricId,
        /// CSV destination, stdout when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write the matrix with per-pair status as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        guards: GuardArgs,
    },
    /// Classify the change between two fields.
    Classify {
        #[arg(long)]
        field_a: PathBuf,
        #[arg(long)]
        field_b: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// List, apply or decompose minimal perturbations.
    Perturb {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, conflicts_with = "target")]
        vertex: Option<usize>,
        /// New value for `--vertex`; without it the candidates are listed.
        #[arg(long, requires = "vertex", allow_hyphen_values = true)]
        to: Option<f64>,
        /// Decompose the change to this field into minimal steps.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Randomized bound checks on minimal perturbations.
    StabilityRun {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Side of the square grid.
        #[arg(long, default_value_t = 4)]
        grid: usize,
        #[arg(long, default_value = "w,x,s,l,g,p,e,b", value_delimiter = ',', value_parser = parse_metric)]
        metrics: Vec<MetricId>,
        /// Also run finite perturbations of this size.
        #[arg(long)]
        eps: Option<f64>,
        /// JSON destination, stdout when absent. The summary goes to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        guards: GuardArgs,
    },
    /// Write a counterexample tree pair as JSON.
    Counterexample {
        #[arg(long)]
        family: CounterexampleFamily,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_metric(s: &str) -> Result<MetricId, String> {
    s.parse().map_err(|e: mtstab_core::Error| e.to_string())
}

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::BuildTree { field } => emit(None, &commands::build_tree(&field)?),
        Command::Matrix { dir, metric, csv, json, guards } => {
            let m = commands::matrix(&dir, metric, &guards.over(Guards::default()))?;
            if let Some(p) = json {
                write_text(&p, &serde_json::to_string_pretty(&m).expect("matrix serialises"))?;
            }
            if m.skipped() > 0 {
                eprintln!("{} pair(s) skipped by size guards", m.skipped());
            }
            match csv {
                Some(p) => write_text(&p, &m.to_csv()),
                None => {
                    print!("{}", m.to_csv());
                    Ok(())
                }
            }
        }
        Command::Classify { field_a, field_b, json } => {
            print!("{}", commands::classify(&field_a, &field_b, json)?);
            if json {
                println!();
            }
            Ok(())
        }
        Command::Perturb { field, vertex, to, target } => {
            let mode = match (vertex, to, target.as_deref()) {
                (Some(v), Some(x), _) => PerturbMode::Apply(v, x),
                (Some(v), None, _) => PerturbMode::List(v),
                (None, _, Some(t)) => PerturbMode::Decompose(t),
                (None, _, None) => return Err(CliError::Validation("give --vertex or --target".into())),
            };
            emit(None, &commands::perturb(&field, mode)?)
        }
        Command::StabilityRun { seed, trials, grid, metrics, eps, out, guards } => {
            let mut cfg = SuiteConfig::new(seed, trials, grid, metrics);
            cfg.guards = guards.over(cfg.guards);
            let (json, summary) = commands::stability_run(&cfg, eps)?;
            eprint!("{summary}");
            emit(out.as_ref(), &json)
        }
        Command::Counterexample { family, x, eps, out } => {
            emit(out.as_ref(), &commands::counterexample_pair(family, x, eps)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
