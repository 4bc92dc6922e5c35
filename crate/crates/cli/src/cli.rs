//! Argument parsing and dispatch.
//!
//! Every subcommand accepts the same experiment flags; they are mapped onto
//! configuration keys and validated through the same path as config files.
//! Exit codes: 0 pass, 1 verdict failure, 2 invalid input or runtime error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::config::{ConfigError, Document, Entry};
use crate::experiment::{run_experiment, ExperimentConfig, Kind, Outcome, RunError};

#[derive(Parser, Debug)]
#[command(name = "ergopet", version, about = "Experiments with variable polynomial ergodic averages")]
pub struct Cli {
    /// Write the CSV table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for base-point panels.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Probe whether combinations of the family are good for equidistribution.
    CheckGood(ExperimentArgs),
    /// Decide property R_k for a tuple of coefficients.
    CheckRk(ExperimentArgs),
    /// Check whether a family is super nice.
    CheckSuperNice(ExperimentArgs),
    /// Print the PET reduction trace.
    PetReduce(ExperimentArgs),
    /// Multiple ergodic averages along the family.
    Average(ExperimentArgs),
    /// Compare averages along multiples of [p(n)] with averages along multiples of n.
    CompareMc(ExperimentArgs),
    /// Multiple recurrence averages of a set.
    Recurrence(ExperimentArgs),
    /// Host–Kra seminorms on a cyclic group.
    Seminorm(ExperimentArgs),
    /// Search for polynomial configurations in a set of integers.
    FindProgressions(ExperimentArgs),
    /// Run experiment config files.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
}

#[derive(Args, Debug, Default, Clone)]
pub struct ExperimentArgs {
    /// Family as `p1; p2; ...`.
    #[arg(long)]
    pub family: Option<String>,
    /// One family member (repeatable).
    #[arg(long = "p")]
    pub p: Vec<String>,
    /// Coefficients as `c1; c2; ...`.
    #[arg(long)]
    pub coefficients: Option<String>,
    /// `rot:alpha=..`, `skew:alpha=..` or `cyclic:M=..`.
    #[arg(long)]
    pub system: Option<String>,
    /// `trig:(k)=amp,...` or `vec:a,b,...` (repeatable).
    #[arg(long)]
    pub observable: Vec<String>,
    /// `arc:start=..,length=..` or residues.
    #[arg(long)]
    pub set: Option<String>,
    /// Integers such as `1..100:2`.
    #[arg(long)]
    pub integers: Option<String>,
    #[arg(long)]
    pub bound: Option<String>,
    /// `family`, `linear` or `multiples`.
    #[arg(long)]
    pub iterates: Option<String>,
    #[arg(long)]
    pub ell: Option<String>,
    /// `positive` or `bound`.
    #[arg(long)]
    pub check: Option<String>,
    #[arg(long = "N")]
    pub n: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    /// Vectors separated by `;`, or `default`.
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub points: Option<String>,
    /// Bases of the shift samples `h_i = base^i`.
    #[arg(long)]
    pub h: Option<String>,
    /// Seminorm orders.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long = "N-min")]
    pub n_min: Option<String>,
    #[arg(long = "N-max")]
    pub n_max: Option<String>,
    #[arg(long = "m-max")]
    pub m_max: Option<String>,
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long)]
    pub tolerance: Option<String>,
    #[arg(long)]
    pub name: Option<String>,
}

impl ExperimentArgs {
    /// `(flag, section, key, value)` for every flag given.
    fn entries(&self) -> Vec<(&'static str, &'static str, &'static str, String)> {
        let mut out = Vec::new();
        let mut one = |flag, section, key, v: &Option<String>| {
            if let Some(v) = v {
                out.push((flag, section, key, v.clone()));
            }
        };
        one("--family", "family", "family", &self.family);
        one("--coefficients", "family", "coefficients", &self.coefficients);
        one("--system", "system", "spec", &self.system);
        one("--set", "system", "set", &self.set);
        one("--integers", "system", "integers", &self.integers);
        one("--bound", "system", "bound", &self.bound);
        one("--iterates", "experiment", "iterates", &self.iterates);
        one("--ell", "experiment", "ell", &self.ell);
        one("--check", "experiment", "check", &self.check);
        one("--name", "experiment", "name", &self.name);
        one("--N", "grids", "N", &self.n);
        one("--alpha", "grids", "alpha", &self.alpha);
        one("--lambda", "grids", "lambda", &self.lambda);
        one("--points", "grids", "points", &self.points);
        one("--h", "grids", "h", &self.h);
        one("--k", "grids", "k", &self.k);
        one("--N-min", "grids", "N_min", &self.n_min);
        one("--N-max", "grids", "N_max", &self.n_max);
        one("--m-max", "grids", "m_max", &self.m_max);
        one("--threshold", "tolerances", "threshold", &self.threshold);
        one("--tolerance", "tolerances", "tolerance", &self.tolerance);
        for v in &self.p {
            out.push(("--p", "family", "p", v.clone()));
        }
        for v in &self.observable {
            out.push(("--observable", "system", "observable", v.clone()));
        }
        out
    }

    /// Build a config; diagnostics name the offending flag and column.
    pub fn to_config(&self, kind: Kind) -> Result<ExperimentConfig, String> {
        let flags = self.entries();
        let mut doc = Document::default();
        doc.entries.push(Entry {
            section: "experiment".into(),
            key: "kind".into(),
            value: kind.name().into(),
            line: 0,
            key_column: 1,
            value_column: 1,
        });
        for (i, (_, section, key, value)) in flags.iter().enumerate() {
            doc.entries.push(Entry {
                section: section.to_string(),
                key: key.to_string(),
                value: value.clone(),
                line: i + 1,
                key_column: 1,
                value_column: 1,
            });
        }
        ExperimentConfig::from_document(&doc).map_err(|e: ConfigError| match e.line {
            0 => e.message,
            l => format!("{}, column {}: {}", flags[l - 1].0, e.column, e.message),
        })
    }
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> Result<(), RunError> {
    eprint!("{}", outcome.summary);
    match out {
        Some(path) => outcome.table.write_csv(fs::File::create(path)?)?,
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            outcome.table.write_csv(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn run_one(cfg: &ExperimentConfig, out: Option<&Path>) -> i32 {
    match run_experiment(cfg).and_then(|o| emit(&o, out).map(|_| o.exit_code())) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ExperimentConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run_batch(cli: &Cli, paths: &[PathBuf]) -> i32 {
    let loaded: Vec<Result<ExperimentConfig, String>> = paths.iter().map(|p| load(p)).collect();
    if let Some(Err(e)) = loaded.iter().find(|r| r.is_err()) {
        eprintln!("error: {e}");
        return 2;
    }
    let mut cfgs: Vec<ExperimentConfig> = loaded.into_iter().map(|r| r.expect("checked")).collect();
    for c in &mut cfgs {
        if let Some(seed) = cli.seed {
            c.seed = seed;
        }
    }
    let results: Vec<Result<Outcome, RunError>> = cfgs.par_iter().map(run_experiment).collect();
    let mut code = 0;
    for ((path, cfg), res) in paths.iter().zip(&cfgs).zip(results) {
        let label = cfg.name.clone().unwrap_or_else(|| path.display().to_string());
        eprintln!("== {label}");
        let out = if paths.len() == 1 { cli.out.as_deref().or(cfg.out.as_deref()) } else { cfg.out.as_deref() };
        let c = match res.and_then(|o| emit(&o, out).map(|_| o.exit_code())) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        };
        code = code.max(c);
    }
    code
}

pub fn run(cli: &Cli) -> i32 {
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: {e}");
        }
    }
    let (kind, args) = match &cli.command {
        Command::Run { configs } => return run_batch(cli, configs),
        Command::CheckGood(a) => (Kind::CheckGood, a),
        Command::CheckRk(a) => (Kind::CheckRk, a),
        Command::CheckSuperNice(a) => (Kind::CheckSuperNice, a),
        Command::PetReduce(a) => (Kind::PetReduce, a),
        Command::Average(a) => (Kind::Average, a),
        Command::CompareMc(a) => (Kind::CompareMc, a),
        Command::Recurrence(a) => (Kind::Recurrence, a),
        Command::Seminorm(a) => (Kind::Seminorm, a),
        Command::FindProgressions(a) => (Kind::FindProgressions, a),
    };
    let mut cfg = match args.to_config(kind) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    run_one(&cfg, cli.out.as_deref())
}

/// Parse `args` (including the program name) and run.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
