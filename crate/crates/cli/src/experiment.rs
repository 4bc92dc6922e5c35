//! Experiment descriptions and their execution.

use std::fmt;
use std::path::PathBuf;

use rayon::prelude::*;

use ergopet_core::coeffalg::HardyCoefficient;
use ergopet_core::combinatorics::{find_progression, recurrence_average, IntegerSet, MeasurableSet, SearchBounds};
use ergopet_core::dynsys::{base_point_panel, expected_limit, hk_seminorm, Iterates, Observable, Point, System};
use ergopet_core::equidist::{decays, default_lambda_grid, goodness_probe_with, GoodnessOptions, DEFAULT_ALPHAS, DEFAULT_NS};
use ergopet_core::pet::{pet_reduce, ReductionTrace};
use ergopet_core::polyfam::PolynomialFamily;
use ergopet_core::rprop::{has_rk, is_super_nice_with, CoefficientSequence, ShiftSample, SuperNiceOptions, SuperNiceVerdict};
use ergopet_core::{Complex64, Error};

use crate::config::{ConfigError, Document, Entry};
use crate::dsl::{self, DslError};
use crate::parallel;
use crate::report::{num, trace_text, vector, Table};
use crate::specs;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    CheckGood,
    CheckRk,
    CheckSuperNice,
    PetReduce,
    Average,
    CompareMc,
    Recurrence,
    Seminorm,
    FindProgressions,
}

impl Kind {
    pub const ALL: [Kind; 9] = [
        Kind::CheckGood,
        Kind::CheckRk,
        Kind::CheckSuperNice,
        Kind::PetReduce,
        Kind::Average,
        Kind::CompareMc,
        Kind::Recurrence,
        Kind::Seminorm,
        Kind::FindProgressions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::CheckGood => "check-good",
            Kind::CheckRk => "check-rk",
            Kind::CheckSuperNice => "check-super-nice",
            Kind::PetReduce => "pet-reduce",
            Kind::Average => "average",
            Kind::CompareMc => "compare-mc",
            Kind::Recurrence => "recurrence",
            Kind::Seminorm => "seminorm",
            Kind::FindProgressions => "find-progressions",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which exponents the averages use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IterateKind {
    /// `[p_i(n)]` for the family members.
    Family,
    /// `i·n`.
    Linear,
    /// `i·[p(n)]` for the first family member.
    Multiples,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecurrenceCheck {
    /// The final average is strictly positive.
    Positive,
    /// The final average is at least `μ(A)^{ℓ+1}`.
    Bound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub name: Option<String>,
    pub system: Option<System>,
    pub observables: Vec<Observable>,
    pub family: Option<PolynomialFamily>,
    pub coefficients: Vec<HardyCoefficient>,
    pub iterates: IterateKind,
    pub ell: Option<usize>,
    pub set: Option<MeasurableSet>,
    pub integers: Option<IntegerSet>,
    pub ns: Vec<u64>,
    pub alphas: Vec<f64>,
    pub lambdas: Option<Vec<Vec<f64>>>,
    pub points: usize,
    pub seed: u64,
    pub h_bases: Vec<i64>,
    pub orders: Vec<u32>,
    pub n_min: u64,
    pub n_max: u64,
    pub m_max: Option<u64>,
    pub threshold: f64,
    pub tolerance: f64,
    pub check: RecurrenceCheck,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(kind: Kind) -> Self {
        Self {
            kind,
            name: None,
            system: None,
            observables: Vec::new(),
            family: None,
            coefficients: Vec::new(),
            iterates: IterateKind::Family,
            ell: None,
            set: None,
            integers: None,
            ns: DEFAULT_NS.to_vec(),
            alphas: DEFAULT_ALPHAS.to_vec(),
            lambdas: None,
            points: 10,
            seed: 0,
            h_bases: vec![10, 12, 15],
            orders: vec![1, 2, 3],
            n_min: 16,
            n_max: 200,
            m_max: None,
            threshold: GoodnessOptions::default().threshold,
            tolerance: 0.05,
            check: RecurrenceCheck::Positive,
            out: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

const KEYS: &[(&str, &str)] = &[
    ("experiment", "kind"),
    ("experiment", "name"),
    ("experiment", "iterates"),
    ("experiment", "ell"),
    ("experiment", "check"),
    ("experiment", "out"),
    ("experiment", "seed"),
    ("system", "spec"),
    ("system", "observable"),
    ("system", "set"),
    ("system", "integers"),
    ("system", "bound"),
    ("family", "p"),
    ("family", "family"),
    ("family", "coefficient"),
    ("family", "coefficients"),
    ("grids", "N"),
    ("grids", "alpha"),
    ("grids", "lambda"),
    ("grids", "points"),
    ("grids", "h"),
    ("grids", "k"),
    ("grids", "N_min"),
    ("grids", "N_max"),
    ("grids", "m_max"),
    ("tolerances", "threshold"),
    ("tolerances", "tolerance"),
];

fn dsl_err(e: &Entry, err: DslError) -> ConfigError {
    e.error_at(err.offset, err.message)
}

fn int<T: std::str::FromStr>(e: &Entry, s: &str, offset: usize) -> Result<T, ConfigError> {
    s.trim().parse().map_err(|_| e.error_at(offset, format!("expected an integer, found '{}'", s.trim())))
}

fn list<T>(e: &Entry, f: impl Fn(&str, usize) -> Result<T, ConfigError>) -> Result<Vec<T>, ConfigError> {
    let out = specs::split_top(&e.value, ',')
        .into_iter()
        .map(|(piece, off)| {
            let lead = piece.len() - piece.trim_start().len();
            f(piece, off + lead)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err(e.error_at(0, "empty list"));
    }
    Ok(out)
}

fn real(e: &Entry, s: &str, off: usize) -> Result<f64, ConfigError> {
    specs::parse_real_at(s.trim(), 0).map_err(|err| e.error_at(off + err.offset, err.message))
}

fn lambdas(e: &Entry) -> Result<Option<Vec<Vec<f64>>>, ConfigError> {
    if e.value.trim() == "default" {
        return Ok(None);
    }
    let mut out = Vec::new();
    for (vec_src, off) in specs::split_top(&e.value, ';') {
        let mut v = Vec::new();
        for (x, xo) in specs::split_top(vec_src, ',') {
            let lead = x.len() - x.trim_start().len();
            v.push(real(e, x, off + xo + lead)?);
        }
        out.push(v);
    }
    Ok(Some(out))
}

impl ExperimentConfig {
    /// Build and validate from a parsed document.
    pub fn from_document(doc: &Document) -> Result<Self, ConfigError> {
        doc.check_keys(KEYS)?;
        let kind_entry = doc
            .get("experiment", "kind")?
            .ok_or(ConfigError { line: 1, column: 1, message: "missing [experiment] kind".into() })?;
        let kind = Kind::from_name(kind_entry.value.trim()).ok_or_else(|| {
            let names: Vec<&str> = Kind::ALL.iter().map(|k| k.name()).collect();
            kind_entry.error_at(0, format!("unknown kind '{}'; expected one of {}", kind_entry.value, names.join(", ")))
        })?;
        let mut cfg = Self::new(kind);
        if let Some(e) = doc.get("experiment", "name")? {
            cfg.name = Some(e.value.clone());
        }
        if let Some(e) = doc.get("experiment", "iterates")? {
            cfg.iterates = match e.value.trim() {
                "family" => IterateKind::Family,
                "linear" => IterateKind::Linear,
                "multiples" => IterateKind::Multiples,
                v => return Err(e.error_at(0, format!("iterates must be family, linear or multiples, found '{v}'"))),
            };
        }
        if let Some(e) = doc.get("experiment", "ell")? {
            let ell: usize = int(e, &e.value, 0)?;
            if ell == 0 {
                return Err(e.error_at(0, "ell must be positive"));
            }
            cfg.ell = Some(ell);
        }
        if let Some(e) = doc.get("experiment", "check")? {
            cfg.check = match e.value.trim() {
                "positive" => RecurrenceCheck::Positive,
                "bound" => RecurrenceCheck::Bound,
                v => return Err(e.error_at(0, format!("check must be positive or bound, found '{v}'"))),
            };
        }
        if let Some(e) = doc.get("experiment", "out")? {
            cfg.out = Some(PathBuf::from(e.value.trim()));
        }
        if let Some(e) = doc.get("experiment", "seed")? {
            cfg.seed = int(e, &e.value, 0)?;
        }
        if let Some(e) = doc.get("system", "spec")? {
            cfg.system = Some(specs::parse_system(&e.value).map_err(|err| dsl_err(e, err))?);
        }
        for e in doc.all("system", "observable") {
            cfg.observables.push(specs::parse_observable(&e.value).map_err(|err| dsl_err(e, err))?);
        }
        if let Some(e) = doc.get("system", "set")? {
            cfg.set = Some(specs::parse_measurable_set(&e.value).map_err(|err| dsl_err(e, err))?);
        }
        let bound = match doc.get("system", "bound")? {
            Some(e) => Some(int::<u64>(e, &e.value, 0)?),
            None => None,
        };
        if let Some(e) = doc.get("system", "integers")? {
            cfg.integers = Some(specs::parse_integer_set(&e.value, bound).map_err(|err| dsl_err(e, err))?);
        }
        let members: Vec<&Entry> = doc.all("family", "p").collect();
        let whole = doc.get("family", "family")?;
        match (members.is_empty(), whole) {
            (false, Some(e)) => return Err(e.key_error("give either 'family' or repeated 'p', not both")),
            (true, Some(e)) => cfg.family = Some(dsl::parse_family(&e.value).map_err(|err| dsl_err(e, err))?),
            (false, None) => {
                let ps = members
                    .iter()
                    .map(|e| dsl::parse_polynomial(&e.value).map_err(|err| dsl_err(e, err)))
                    .collect::<Result<Vec<_>, _>>()?;
                cfg.family = Some(PolynomialFamily::new(ps).map_err(|err| members[0].error_at(0, err.to_string()))?);
            }
            (true, None) => {}
        }
        for e in doc.all("family", "coefficient") {
            cfg.coefficients.push(dsl::parse_coefficient(&e.value).map_err(|err| dsl_err(e, err))?);
        }
        if let Some(e) = doc.get("family", "coefficients")? {
            cfg.coefficients.extend(dsl::parse_coefficients(&e.value).map_err(|err| dsl_err(e, err))?);
        }
        if let Some(e) = doc.get("grids", "N")? {
            cfg.ns = list(e, |s, o| int(e, s, o))?;
        }
        if let Some(e) = doc.get("grids", "alpha")? {
            cfg.alphas = list(e, |s, o| real(e, s, o))?;
        }
        if let Some(e) = doc.get("grids", "lambda")? {
            cfg.lambdas = lambdas(e)?;
        }
        if let Some(e) = doc.get("grids", "points")? {
            cfg.points = int(e, &e.value, 0)?;
        }
        if let Some(e) = doc.get("grids", "h")? {
            cfg.h_bases = list(e, |s, o| int(e, s, o))?;
        }
        if let Some(e) = doc.get("grids", "k")? {
            cfg.orders = list(e, |s, o| int(e, s, o))?;
        }
        if let Some(e) = doc.get("grids", "N_min")? {
            cfg.n_min = int(e, &e.value, 0)?;
        }
        if let Some(e) = doc.get("grids", "N_max")? {
            cfg.n_max = int(e, &e.value, 0)?;
        }
        if let Some(e) = doc.get("grids", "m_max")? {
            cfg.m_max = Some(int(e, &e.value, 0)?);
        }
        if let Some(e) = doc.get("tolerances", "threshold")? {
            cfg.threshold = real(e, &e.value, 0)?;
        }
        if let Some(e) = doc.get("tolerances", "tolerance")? {
            cfg.tolerance = real(e, &e.value, 0)?;
        }
        cfg.validate().map_err(|msg| kind_entry.error_at(0, msg))?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::from_document(&Document::parse(text)?)
    }

    /// Check that every input the kind needs is present.
    pub fn validate(&self) -> Result<(), String> {
        let need = |ok: bool, what: &str| if ok { Ok(()) } else { Err(format!("{} needs {what}", self.kind)) };
        if self.ns.is_empty() || self.alphas.is_empty() || self.h_bases.is_empty() || self.orders.is_empty() {
            return Err("grids must be nonempty".into());
        }
        if self.ns.contains(&0) {
            return Err("N values must be positive".into());
        }
        match self.kind {
            Kind::CheckGood | Kind::CheckSuperNice | Kind::PetReduce => need(self.family.is_some(), "a family"),
            Kind::CheckRk => need(!self.coefficients.is_empty() || self.family.is_some(), "coefficients"),
            Kind::Average | Kind::CompareMc => {
                need(self.system.is_some(), "a system")?;
                need(!self.observables.is_empty(), "observables")?;
                need(self.points > 0, "at least one base point")?;
                if self.kind == Kind::CompareMc {
                    need(self.family.is_some(), "a polynomial p")?;
                    return need(self.ell.is_some() || !self.observables.is_empty(), "ell");
                }
                self.iterate_needs(&need)
            }
            Kind::Recurrence => {
                need(self.system.is_some(), "a system")?;
                need(self.set.is_some(), "a set")?;
                self.iterate_needs(&need)
            }
            Kind::Seminorm => {
                need(matches!(self.system, Some(System::CyclicShift { .. })), "a cyclic system")?;
                need(self.observables.len() == 1, "exactly one observable")
            }
            Kind::FindProgressions => {
                need(self.integers.is_some(), "an integer set")?;
                if self.n_min == 0 || self.n_max < self.n_min {
                    return Err("N_min must be positive and at most N_max".into());
                }
                self.iterate_needs(&need)
            }
        }
    }

    fn iterate_needs(&self, need: &dyn Fn(bool, &str) -> Result<(), String>) -> Result<(), String> {
        match self.iterates {
            IterateKind::Family => need(self.family.is_some(), "a family"),
            IterateKind::Linear => need(self.ell.is_some(), "ell"),
            IterateKind::Multiples => {
                need(self.family.is_some(), "a polynomial p")?;
                need(self.ell.is_some(), "ell")
            }
        }
    }

    /// The iterates for averages, recurrence and progressions.
    pub fn build_iterates(&self) -> Result<Iterates, RunError> {
        let missing = |what: &str| RunError::Invalid(format!("{} needs {what}", self.kind));
        Ok(match self.iterates {
            IterateKind::Family => Iterates::Family(self.family.clone().ok_or_else(|| missing("a family"))?),
            IterateKind::Linear => Iterates::Linear { ell: self.ell.ok_or_else(|| missing("ell"))? },
            IterateKind::Multiples => Iterates::Multiples {
                p: self.family.as_ref().ok_or_else(|| missing("a polynomial p"))?.members()[0].clone(),
                ell: self.ell.ok_or_else(|| missing("ell"))?,
            },
        })
    }

    fn sorted_ns(&self) -> Vec<u64> {
        let mut ns = self.ns.clone();
        ns.sort_unstable();
        ns.dedup();
        ns
    }
}

/// Result of one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub table: Table,
    /// Human-readable report: verdicts, traces, certificates.
    pub summary: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn point_text(x: &Point) -> String {
    match x {
        Point::Torus(v) => vector(v),
        Point::Cyclic(r) => r.to_string(),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    cfg.validate().map_err(RunError::Invalid)?;
    match cfg.kind {
        Kind::CheckGood => check_good(cfg),
        Kind::CheckRk => check_rk(cfg),
        Kind::CheckSuperNice => check_super_nice(cfg),
        Kind::PetReduce => pet(cfg),
        Kind::Average => average(cfg),
        Kind::CompareMc => compare_mc(cfg),
        Kind::Recurrence => recurrence(cfg),
        Kind::Seminorm => seminorm(cfg),
        Kind::FindProgressions => progressions(cfg),
    }
}

fn family(cfg: &ExperimentConfig) -> &PolynomialFamily {
    cfg.family.as_ref().expect("validated")
}

fn check_good(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let fam = family(cfg);
    let lambdas = cfg.lambdas.clone().unwrap_or_else(|| default_lambda_grid(fam.len()));
    let opts = GoodnessOptions { threshold: cfg.threshold, ..GoodnessOptions::default() };
    let report = goodness_probe_with(fam, &cfg.alphas, &cfg.ns, &lambdas, &opts, &parallel::Chunked)?;
    let mut table = Table::new(&["lambda", "alpha", "N", "magnitude", "verdict"]);
    for row in &report.rows {
        let v = report.verdicts.iter().find(|v| v.lambda == row.lambda).expect("one verdict per lambda");
        let verdict = if v.degenerate { "degenerate" } else { mark(v.decaying) };
        table.push(vec![vector(&row.lambda), num(row.alpha), row.n.to_string(), num(row.magnitude), verdict.into()]);
    }
    let worst = &report.verdicts[report.worst];
    let summary = format!(
        "check-good: {} ({} combinations; worst lambda={} final magnitude={})\n",
        mark(report.passes()),
        report.verdicts.len(),
        vector(&worst.lambda),
        num(worst.final_magnitude)
    );
    Ok(Outcome { passed: report.passes(), table, summary })
}

fn check_rk(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let coeffs: Vec<HardyCoefficient> = if cfg.coefficients.is_empty() {
        family(cfg)
            .members()
            .iter()
            .map(|p| {
                p.leading()
                    .and_then(|c| c.as_hardy())
                    .ok_or_else(|| RunError::Invalid("family members need shift-free leading coefficients".into()))
            })
            .collect::<Result<_, _>>()?
    } else {
        cfg.coefficients.clone()
    };
    let seqs: Vec<CoefficientSequence> = coeffs.iter().cloned().map(CoefficientSequence::Symbolic).collect();
    let out = has_rk(&seqs);
    let mut table = Table::new(&["k", "verdict", "nodes_visited"]);
    table.push(vec![coeffs.len().to_string(), format!("{:?}", out.verdict), out.nodes_visited.to_string()]);
    let mut summary = format!("check-rk: {} (k={})\n", mark(out.holds()), coeffs.len());
    match (&out.certificate, &out.failure) {
        (Some(c), _) => summary.push_str(&c.to_text()),
        (None, Some(f)) => summary.push_str(&format!("{f}\n")),
        (None, None) => {}
    }
    Ok(Outcome { passed: out.holds(), table, summary })
}

fn check_super_nice(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let opts = SuperNiceOptions {
        samples: cfg.h_bases.iter().map(|&b| ShiftSample::Geometric(b)).collect(),
        ..SuperNiceOptions::default()
    };
    let report = is_super_nice_with(family(cfg), &opts)?;
    let passed = report.verdict == SuperNiceVerdict::SuperNice;
    let mut table = Table::new(&["branch", "sample", "k", "verdict", "nodes_visited"]);
    let mut summary = format!("check-super-nice: {}\n", report.verdict);
    if let Some(reason) = report.distinctness.failure() {
        summary.push_str(&format!("(i) fails: {reason}\n"));
    }
    for b in &report.branches {
        for s in &b.samples {
            table.push(vec![
                b.branch.to_string(),
                s.sample.to_string(),
                b.trace.k.to_string(),
                format!("{:?}", s.outcome.verdict),
                s.outcome.nodes_visited.to_string(),
            ]);
            summary.push_str(&format!("{} {} k={} {:?}\n", b.branch, s.sample, b.trace.k, s.outcome.verdict));
            if let Some(c) = &s.outcome.certificate {
                for line in c.to_text().lines() {
                    summary.push_str(&format!("  {line}\n"));
                }
            }
        }
    }
    Ok(Outcome { passed, table, summary })
}

fn trace_table(trace: &ReductionTrace) -> Table {
    let mut table = Table::new(&["step", "chose", "h", "type_before", "type_after", "members"]);
    for (k, s) in trace.steps.iter().enumerate() {
        table.push(vec![
            (k + 1).to_string(),
            (s.chosen_index + 1).to_string(),
            s.shift.to_string(),
            s.type_before.to_string(),
            s.type_after.to_string(),
            s.family_after.len().to_string(),
        ]);
    }
    table
}

fn pet(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    match pet_reduce(family(cfg)) {
        Ok(trace) => Ok(Outcome { passed: true, table: trace_table(&trace), summary: trace_text(&trace) }),
        Err(e @ (Error::BudgetExceeded(_) | Error::NoTypeReduction { .. } | Error::NotEssentiallyDistinct(_))) => Ok(Outcome {
            passed: false,
            table: Table::new(&["step", "chose", "h", "type_before", "type_after", "members"]),
            summary: format!("pet-reduce: fail: {e}\n"),
        }),
        Err(e) => Err(e.into()),
    }
}

fn panel(cfg: &ExperimentConfig, sys: &System) -> Vec<Point> {
    base_point_panel(sys, cfg.points, cfg.seed)
}

fn average(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let sys = cfg.system.as_ref().expect("validated");
    let iterates = cfg.build_iterates()?;
    let expected = expected_limit(sys, &cfg.observables)?;
    let ns = cfg.sorted_ns();
    let points = panel(cfg, sys);
    let values: Vec<Vec<Complex64>> = points
        .par_iter()
        .map(|x| ns.iter().map(|&n| parallel::average(sys, &iterates, &cfg.observables, x, n)).collect())
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["point", "N", "re", "im", "error"]);
    let mut passed = true;
    let mut worst: f64 = 0.0;
    for (x, vs) in points.iter().zip(&values) {
        let errs: Vec<f64> = vs.iter().map(|v| (v - expected).norm()).collect();
        for ((n, v), err) in ns.iter().zip(vs).zip(&errs) {
            table.push(vec![point_text(x), n.to_string(), num(v.re), num(v.im), num(*err)]);
        }
        worst = worst.max(*errs.last().unwrap());
        passed &= decays(&errs, cfg.tolerance);
    }
    let summary = format!(
        "average: {} (expected limit {}{:+}i, worst final error {} over {} points)\n",
        mark(passed),
        num(expected.re),
        expected.im,
        num(worst),
        points.len()
    );
    Ok(Outcome { passed, table, summary })
}

fn compare_mc(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let sys = cfg.system.as_ref().expect("validated");
    let ell = cfg.ell.unwrap_or(cfg.observables.len());
    let lhs_it = Iterates::Multiples { p: family(cfg).members()[0].clone(), ell };
    let rhs_it = Iterates::Linear { ell };
    let ns = cfg.sorted_ns();
    let points = panel(cfg, sys);
    let values: Vec<Vec<(Complex64, Complex64)>> = points
        .par_iter()
        .map(|x| {
            ns.iter()
                .map(|&n| {
                    Ok((
                        parallel::average(sys, &lhs_it, &cfg.observables, x, n)?,
                        parallel::average(sys, &rhs_it, &cfg.observables, x, n)?,
                    ))
                })
                .collect::<Result<Vec<_>, Error>>()
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["point", "N", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "difference"]);
    let mut passed = true;
    let mut worst: f64 = 0.0;
    for (x, vs) in points.iter().zip(&values) {
        for (n, (l, r)) in ns.iter().zip(vs) {
            table.push(vec![point_text(x), n.to_string(), num(l.re), num(l.im), num(r.re), num(r.im), num((l - r).norm())]);
        }
        let (l, r) = vs.last().unwrap();
        let d = (l - r).norm();
        worst = worst.max(d);
        passed &= d <= cfg.tolerance;
    }
    let summary = format!("compare-mc: {} (worst final difference {} over {} points)\n", mark(passed), num(worst), points.len());
    Ok(Outcome { passed, table, summary })
}

fn recurrence(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let sys = cfg.system.as_ref().expect("validated");
    let set = cfg.set.as_ref().expect("validated");
    let iterates = cfg.build_iterates()?;
    let ns = cfg.sorted_ns();
    let reports = ns.par_iter().map(|&n| recurrence_average(sys, set, &iterates, n)).collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["N", "value", "exact_numerator", "exact_denominator", "measure", "lower_bound"]);
    for (n, r) in ns.iter().zip(&reports) {
        let (a, b) = r.exact.map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
        table.push(vec![n.to_string(), num(r.value), a, b, num(r.measure), num(r.lower_bound)]);
    }
    let last = reports.last().unwrap();
    let passed = match cfg.check {
        RecurrenceCheck::Positive => last.value > 0.0,
        RecurrenceCheck::Bound => last.value >= last.lower_bound,
    };
    let trend: Vec<String> = reports.iter().map(|r| num(r.value)).collect();
    let summary = format!(
        "recurrence: {} (final value {} at N={}, mu(A)^(l+1)={}, trend {})\n",
        mark(passed),
        num(last.value),
        ns.last().unwrap(),
        num(last.lower_bound),
        trend.join(" -> ")
    );
    Ok(Outcome { passed, table, summary })
}

fn seminorm(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let Some(System::CyclicShift { modulus }) = cfg.system else { unreachable!("validated") };
    let Observable::Vector(f) = &cfg.observables[0] else {
        return Err(RunError::Invalid("seminorm needs a vec: observable".into()));
    };
    let mut orders = cfg.orders.clone();
    orders.sort_unstable();
    let values = orders.iter().map(|&k| hk_seminorm(modulus, f, k)).collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["k", "value"]);
    for (k, v) in orders.iter().zip(&values) {
        table.push(vec![k.to_string(), num(*v)]);
    }
    let passed = values.windows(2).all(|w| w[0] <= w[1] + 1e-9);
    let shown: Vec<String> = orders.iter().zip(&values).map(|(k, v)| format!("|f|_{k}={}", num(*v))).collect();
    Ok(Outcome { passed, table, summary: format!("seminorm: {} ({})\n", mark(passed), shown.join(" ")) })
}

fn progressions(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let set = cfg.integers.as_ref().expect("validated");
    let iterates = cfg.build_iterates()?;
    let bounds = SearchBounds { n_window_min: cfg.n_min, n_window_max: cfg.n_max, m_max: cfg.m_max.unwrap_or(set.bound()).max(1) };
    let found = find_progression(set, &iterates, &bounds)?;
    let mut table = Table::new(&["N", "n", "m", "values", "elements", "density"]);
    let density = num(set.density());
    let summary = match &found {
        Some(p) => {
            let values: Vec<String> = p.values.iter().map(|v| v.to_string()).collect();
            let elements: Vec<String> = p.elements.iter().map(|v| v.to_string()).collect();
            table.push(vec![p.n_window.to_string(), p.n.to_string(), p.m.to_string(), values.join(";"), elements.join(";"), density.clone()]);
            format!(
                "find-progressions: pass (N={} n={} m={} configuration {{{}}}; density |E|/M={density})\n",
                p.n_window,
                p.n,
                p.m,
                elements.join(", ")
            )
        }
        None => format!("find-progressions: fail (none in N={}..{}; density |E|/M={density})\n", cfg.n_min, cfg.n_max),
    };
    Ok(Outcome { passed: found.is_some(), table, summary })
}
