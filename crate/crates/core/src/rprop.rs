//! R₁ and R_k decisions with replayable certificates, and super-niceness.
//!
//! Derived tuples in the R_k recursion are always quotients by a single
//! common denominator, so a tuple is stored as `(den, [num_1, …, num_k])`
//! standing for the sequences `num_j / den`. The symbolic path works on
//! [`HardyCoefficient`]s; the numeric path works pointwise on sampled values.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::coeffalg::{ratio_class, HardyCoefficient, Sign};
use crate::pet::{pet_reduce_with, PetOptions, ReductionTrace};
use crate::polyfam::{essential_distinctness_report, DistinctnessReport, PolynomialFamily, ShiftAssignment};
use crate::{Error, Result};

/// Default sampling grid of the numeric probe.
pub const DEFAULT_PROBE_GRID: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];

/// Relative tolerance for detecting proportional tuples.
pub const PROPORTIONAL_TOL: f64 = 1e-12;

/// A sequence sampled on a grid of `N`s.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericSequence {
    pub grid: Vec<u64>,
    pub values: Vec<f64>,
}

impl NumericSequence {
    pub fn from_fn(grid: &[u64], f: impl Fn(u64) -> f64) -> Self {
        Self { grid: grid.to_vec(), values: grid.iter().map(|&n| f(n)).collect() }
    }

    pub fn from_coefficient(c: &HardyCoefficient, grid: &[u64]) -> Self {
        Self::from_fn(grid, |n| c.eval_at(n as f64))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientSequence {
    Symbolic(HardyCoefficient),
    Numeric(NumericSequence),
}

/// Thresholds of the numeric R₁ probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeOptions {
    /// Sampled magnitudes must stay below this.
    pub bound: f64,
    /// The tail maximum may exceed the head maximum by at most this factor.
    pub envelope_slack: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { bound: 1e6, envelope_slack: 1.1 }
    }
}

/// Verdicts behind an R₁ decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct R1Evidence {
    pub bounded: bool,
    pub sign: Sign,
    /// `|a_N|·N` increases to infinity.
    pub growth: bool,
    /// Decided by sampling rather than symbolically.
    pub heuristic: bool,
}

impl R1Evidence {
    pub fn ok(&self) -> bool {
        self.bounded && self.sign != Sign::Zero && self.growth
    }
}

impl fmt::Display for R1Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.sign {
            Sign::Positive => "+",
            Sign::Negative => "-",
            Sign::Zero => "0",
        };
        write!(
            f,
            "R1 {} sign={} growth={}",
            if self.ok() { "ok" } else { "fail" },
            sign,
            if self.growth { "ok" } else { "fail" }
        )?;
        if !self.bounded {
            f.write_str(" bounded=fail")?;
        }
        if self.heuristic {
            f.write_str(" probe")?;
        }
        Ok(())
    }
}

fn symbolic_r1(num: &HardyCoefficient, den: &HardyCoefficient) -> R1Evidence {
    match ratio_class(num, den) {
        Ok(r) => R1Evidence {
            bounded: r.bounded,
            sign: r.eventual_sign,
            growth: r.eventual_sign != Sign::Zero && r.abs_times_n_to_infinity,
            heuristic: false,
        },
        Err(_) => R1Evidence { bounded: false, sign: Sign::Zero, growth: false, heuristic: false },
    }
}

/// Numeric probe: sign constancy, strictly increasing `|a|·N`, and a
/// bounded envelope (second-half maximum within `envelope_slack` of the
/// first-half maximum). A heuristic; reports mark it as such.
pub fn probe_r1(grid: &[u64], values: &[f64], opts: &ProbeOptions) -> R1Evidence {
    let heuristic = true;
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return R1Evidence { bounded: false, sign: Sign::Zero, growth: false, heuristic };
    }
    let first = Sign::of(values[0]);
    let sign = if values.iter().all(|&v| Sign::of(v) == first) { first } else { Sign::Zero };
    let mags: Vec<f64> = values.iter().map(|v| libm::fabs(*v)).collect();
    let split = mags.len().div_ceil(2);
    let head = mags[..split].iter().copied().fold(0.0, f64::max);
    let tail = mags[split..].iter().copied().fold(0.0, f64::max);
    let bounded = head.max(tail) < opts.bound && tail <= opts.envelope_slack * head;
    let scaled: Vec<f64> = mags.iter().zip(grid).map(|(m, &n)| m * n as f64).collect();
    let growth = sign != Sign::Zero && scaled.windows(2).all(|w| w[1] > w[0]);
    R1Evidence { bounded, sign, growth, heuristic }
}

pub fn has_r1(a: &CoefficientSequence) -> R1Evidence {
    match a {
        CoefficientSequence::Symbolic(c) => symbolic_r1(c, &HardyCoefficient::constant(1.0)),
        CoefficientSequence::Numeric(s) => probe_r1(&s.grid, &s.values, &ProbeOptions::default()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    A,
    B,
    C,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::A => "a",
            Case::B => "b",
            Case::C => "c",
        })
    }
}

/// Choice made for one index `i` (all indices 0-based).
#[derive(Clone, Debug, PartialEq)]
pub struct Choice {
    pub i: usize,
    pub case: Case,
    pub j0: usize,
    pub k0: Option<usize>,
    /// R₁ evidence for `a_i − a_{j0}` in cases (b), (c).
    pub difference: Option<R1Evidence>,
    pub child: RkCertificate,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RkCertificate {
    /// `k = 1`.
    Leaf(R1Evidence),
    /// One choice per index, in index order.
    Node { r1: Vec<R1Evidence>, choices: Vec<Choice> },
    /// `a_j = c_j · r` with distinct nonzero `c_j` and `r` of class R₁.
    /// Stands for the tree in which every index takes case (a) with the
    /// first admissible `j0`; see [`RkCertificate::expand`].
    Proportional { factors: Vec<f64>, base: R1Evidence },
}

impl RkCertificate {
    /// Replace compressed proportional nodes by the explicit tree (size `k!`).
    pub fn expand(&self) -> RkCertificate {
        match self {
            RkCertificate::Leaf(e) => RkCertificate::Leaf(*e),
            RkCertificate::Node { r1, choices } => RkCertificate::Node {
                r1: r1.clone(),
                choices: choices.iter().map(|c| Choice { child: c.child.expand(), ..c.clone() }).collect(),
            },
            RkCertificate::Proportional { factors, base } => expand_proportional(factors, *base),
        }
    }

    /// Number of sequences the certificate speaks about.
    pub fn arity(&self) -> usize {
        match self {
            RkCertificate::Leaf(_) => 1,
            RkCertificate::Node { r1, .. } => r1.len(),
            RkCertificate::Proportional { factors, .. } => factors.len(),
        }
    }

    fn write_tree(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        match self {
            RkCertificate::Leaf(e) => {
                out.push_str(&format!("{pad}{e}\n"));
            }
            RkCertificate::Node { choices, .. } => {
                for c in choices {
                    out.push_str(&format!("{pad}i={} case={} j0={}", c.i + 1, c.case, c.j0 + 1));
                    if let Some(k0) = c.k0 {
                        out.push_str(&format!(" k0={}", k0 + 1));
                    }
                    out.push('\n');
                    c.child.write_tree(out, depth + 1);
                }
            }
            RkCertificate::Proportional { factors, base } => {
                out.push_str(&format!("{pad}proportional k={} base: {base} factors=", factors.len()));
                for (k, c) in factors.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push_str(&format!("{c}"));
                }
                out.push('\n');
            }
        }
    }

    /// Indented text tree, one node per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write_tree(&mut s, 0);
        s
    }
}

fn constant_evidence(c: f64) -> R1Evidence {
    R1Evidence { bounded: true, sign: Sign::of(c), growth: c != 0.0, heuristic: false }
}

fn expand_proportional(factors: &[f64], base: R1Evidence) -> RkCertificate {
    let k = factors.len();
    let scaled = |c: f64| R1Evidence { sign: if c < 0.0 { flip(base.sign) } else { base.sign }, ..base };
    if k == 1 {
        return RkCertificate::Leaf(scaled(factors[0]));
    }
    let mut choices = Vec::with_capacity(k);
    for i in 0..k {
        let j0 = if i == 0 { 1 } else { 0 };
        let child: Vec<f64> = (0..k).filter(|&j| j != j0).map(|j| (factors[j0] - factors[j]) / factors[i]).collect();
        choices.push(Choice {
            i,
            case: Case::A,
            j0,
            k0: None,
            difference: None,
            child: expand_proportional(&child, constant_evidence(1.0)),
        });
    }
    RkCertificate::Node { r1: factors.iter().map(|&c| scaled(c)).collect(), choices }
}

fn flip(s: Sign) -> Sign {
    match s {
        Sign::Positive => Sign::Negative,
        Sign::Negative => Sign::Positive,
        Sign::Zero => Sign::Zero,
    }
}

/// Operations the R_k search needs from a tuple representation.
pub trait RTuple: Sized {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn r1(&self, j: usize) -> R1Evidence;
    /// R₁ of `a_i − a_{j0}`.
    fn r1_of_difference(&self, i: usize, j0: usize) -> R1Evidence;
    /// `{(a_{j0} − a_j)/a_i : j ≠ j0}`.
    fn derive_a(&self, i: usize, j0: usize) -> Self;
    /// `{a_j/(a_i − a_{j0}) : j ≠ j0}`.
    fn derive_b(&self, i: usize, j0: usize) -> Self;
    /// `{−a_{k0}/(a_i − a_{j0})} ∪ {(a_j − a_{k0})/(a_i − a_{j0}) : j ∉ {k0, j0}}`.
    fn derive_c(&self, i: usize, j0: usize, k0: usize) -> Self;
    /// `Some((c_j, evidence for r))` when `a_j = c_j·r` with `c_j` distinct and nonzero.
    fn proportional(&self) -> Option<(Vec<f64>, R1Evidence)>;
}

fn distinct_nonzero(cs: &[f64], tol: f64) -> bool {
    cs.iter().all(|&c| c != 0.0 && c.is_finite())
        && cs.iter().enumerate().all(|(i, &a)| {
            cs[i + 1..].iter().all(|&b| libm::fabs(a - b) > tol * libm::fmax(libm::fabs(a), libm::fabs(b)))
        })
}

/// Symbolic tuple `num_j / den`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTuple {
    pub den: HardyCoefficient,
    pub nums: Vec<HardyCoefficient>,
}

impl SymTuple {
    pub fn new(seqs: Vec<HardyCoefficient>) -> Self {
        Self { den: HardyCoefficient::constant(1.0), nums: seqs }
    }

    fn pick(&self, skip: &[usize]) -> impl Iterator<Item = usize> + '_ {
        let skip = skip.to_vec();
        (0..self.nums.len()).filter(move |j| !skip.contains(j))
    }
}

impl RTuple for SymTuple {
    fn len(&self) -> usize {
        self.nums.len()
    }

    fn r1(&self, j: usize) -> R1Evidence {
        symbolic_r1(&self.nums[j], &self.den)
    }

    fn r1_of_difference(&self, i: usize, j0: usize) -> R1Evidence {
        symbolic_r1(&(&self.nums[i] - &self.nums[j0]), &self.den)
    }

    fn derive_a(&self, i: usize, j0: usize) -> Self {
        let nums = self.pick(&[j0]).map(|j| &self.nums[j0] - &self.nums[j]).collect();
        Self { den: self.nums[i].clone(), nums }
    }

    fn derive_b(&self, i: usize, j0: usize) -> Self {
        let nums = self.pick(&[j0]).map(|j| self.nums[j].clone()).collect();
        Self { den: &self.nums[i] - &self.nums[j0], nums }
    }

    fn derive_c(&self, i: usize, j0: usize, k0: usize) -> Self {
        let mut nums = alloc::vec![-&self.nums[k0]];
        nums.extend(self.pick(&[k0, j0]).map(|j| &self.nums[j] - &self.nums[k0]));
        Self { den: &self.nums[i] - &self.nums[j0], nums }
    }

    fn proportional(&self) -> Option<(Vec<f64>, R1Evidence)> {
        let base = self.nums.first()?;
        let factors: Vec<f64> = self
            .nums
            .iter()
            .map(|c| base.proportional_factor(c, PROPORTIONAL_TOL))
            .collect::<Option<_>>()?;
        if !distinct_nonzero(&factors, 0.0) {
            return None;
        }
        Some((factors, symbolic_r1(base, &self.den)))
    }
}

/// Sampled tuple `num_j(N) / den(N)` on a common grid.
#[derive(Clone, Debug, PartialEq)]
pub struct NumTuple {
    pub grid: Vec<u64>,
    pub den: Vec<f64>,
    pub nums: Vec<Vec<f64>>,
    pub probe: ProbeOptions,
}

impl NumTuple {
    pub fn new(grid: Vec<u64>, seqs: Vec<Vec<f64>>) -> Self {
        let den = alloc::vec![1.0; grid.len()];
        Self { grid, den, nums: seqs, probe: ProbeOptions::default() }
    }

    fn quotient(&self, num: &[f64], den: &[f64]) -> Vec<f64> {
        num.iter().zip(den).map(|(a, b)| a / b).collect()
    }

    fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    fn with(&self, den: Vec<f64>, nums: Vec<Vec<f64>>) -> Self {
        Self { grid: self.grid.clone(), den, nums, probe: self.probe }
    }
}

impl RTuple for NumTuple {
    fn len(&self) -> usize {
        self.nums.len()
    }

    fn r1(&self, j: usize) -> R1Evidence {
        probe_r1(&self.grid, &self.quotient(&self.nums[j], &self.den), &self.probe)
    }

    fn r1_of_difference(&self, i: usize, j0: usize) -> R1Evidence {
        let d = Self::diff(&self.nums[i], &self.nums[j0]);
        probe_r1(&self.grid, &self.quotient(&d, &self.den), &self.probe)
    }

    fn derive_a(&self, i: usize, j0: usize) -> Self {
        let nums = (0..self.len()).filter(|&j| j != j0).map(|j| Self::diff(&self.nums[j0], &self.nums[j])).collect();
        self.with(self.nums[i].clone(), nums)
    }

    fn derive_b(&self, i: usize, j0: usize) -> Self {
        let nums = (0..self.len()).filter(|&j| j != j0).map(|j| self.nums[j].clone()).collect();
        self.with(Self::diff(&self.nums[i], &self.nums[j0]), nums)
    }

    fn derive_c(&self, i: usize, j0: usize, k0: usize) -> Self {
        let mut nums = alloc::vec![self.nums[k0].iter().map(|v| -v).collect::<Vec<_>>()];
        nums.extend((0..self.len()).filter(|&j| j != j0 && j != k0).map(|j| Self::diff(&self.nums[j], &self.nums[k0])));
        self.with(Self::diff(&self.nums[i], &self.nums[j0]), nums)
    }

    fn proportional(&self) -> Option<(Vec<f64>, R1Evidence)> {
        let base = self.nums.first()?;
        if base.contains(&0.0) {
            return None;
        }
        let mut factors = Vec::with_capacity(self.len());
        for s in &self.nums {
            let c = s[0] / base[0];
            let close = s.iter().zip(base).all(|(&v, &b)| {
                let w = c * b;
                libm::fabs(v - w) <= PROPORTIONAL_TOL * libm::fmax(libm::fabs(v), libm::fabs(w))
            });
            if !close {
                return None;
            }
            factors.push(c);
        }
        if !distinct_nonzero(&factors, PROPORTIONAL_TOL) {
            return None;
        }
        Some((factors, probe_r1(&self.grid, &self.quotient(base, &self.den), &self.probe)))
    }
}

/// Limits of the case search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RkOptions {
    pub max_nodes: usize,
    /// Use the compressed certificate for proportional tuples.
    pub proportional_shortcut: bool,
}

impl Default for RkOptions {
    fn default() -> Self {
        Self { max_nodes: 2_000_000, proportional_shortcut: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RkVerdict {
    Holds,
    Fails,
    /// The search budget ran out before a decision.
    NotEstablished,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RkOutcome {
    pub verdict: RkVerdict,
    pub certificate: Option<RkCertificate>,
    /// First reason found for failure (index path is 1-based).
    pub failure: Option<String>,
    pub nodes_visited: usize,
}

impl RkOutcome {
    pub fn holds(&self) -> bool {
        self.verdict == RkVerdict::Holds
    }
}

enum Stop {
    Fail(String),
    Budget,
}

struct Search {
    nodes: usize,
    opts: RkOptions,
}

impl Search {
    fn run<T: RTuple>(&mut self, t: &T) -> core::result::Result<RkCertificate, Stop> {
        self.nodes += 1;
        if self.nodes > self.opts.max_nodes {
            return Err(Stop::Budget);
        }
        let k = t.len();
        if k == 0 {
            return Err(Stop::Fail("empty tuple".into()));
        }
        if self.opts.proportional_shortcut && k > 1 {
            if let Some((factors, base)) = t.proportional() {
                if base.ok() {
                    return Ok(RkCertificate::Proportional { factors, base });
                }
            }
        }
        let mut r1 = Vec::with_capacity(k);
        for j in 0..k {
            let e = t.r1(j);
            if !e.ok() {
                return Err(Stop::Fail(format!("sequence {} lacks R1 ({e})", j + 1)));
            }
            r1.push(e);
        }
        if k == 1 {
            return Ok(RkCertificate::Leaf(r1[0]));
        }
        let mut choices = Vec::with_capacity(k);
        for i in 0..k {
            match self.choose(t, i)? {
                Some(c) => choices.push(c),
                None => return Err(Stop::Fail(format!("no case applies for i={}", i + 1))),
            }
        }
        Ok(RkCertificate::Node { r1, choices })
    }

    /// First successful choice for index `i` in the order a, b, c.
    fn choose<T: RTuple>(&mut self, t: &T, i: usize) -> core::result::Result<Option<Choice>, Stop> {
        let k = t.len();
        for j0 in (0..k).filter(|&j| j != i) {
            match self.run(&t.derive_a(i, j0)) {
                Ok(child) => return Ok(Some(Choice { i, case: Case::A, j0, k0: None, difference: None, child })),
                Err(Stop::Budget) => return Err(Stop::Budget),
                Err(Stop::Fail(_)) => {}
            }
        }
        for j0 in (0..k).filter(|&j| j != i) {
            let d = t.r1_of_difference(i, j0);
            if !d.ok() {
                continue;
            }
            match self.run(&t.derive_b(i, j0)) {
                Ok(child) => return Ok(Some(Choice { i, case: Case::B, j0, k0: None, difference: Some(d), child })),
                Err(Stop::Budget) => return Err(Stop::Budget),
                Err(Stop::Fail(_)) => {}
            }
        }
        for j0 in (0..k).filter(|&j| j != i) {
            let d = t.r1_of_difference(i, j0);
            if !d.ok() {
                continue;
            }
            for k0 in (0..k).filter(|&x| x != i && x != j0) {
                match self.run(&t.derive_c(i, j0, k0)) {
                    Ok(child) => {
                        return Ok(Some(Choice { i, case: Case::C, j0, k0: Some(k0), difference: Some(d), child }))
                    }
                    Err(Stop::Budget) => return Err(Stop::Budget),
                    Err(Stop::Fail(_)) => {}
                }
            }
        }
        Ok(None)
    }
}

pub fn search_rk<T: RTuple>(tuple: &T, opts: &RkOptions) -> RkOutcome {
    let mut s = Search { nodes: 0, opts: *opts };
    let result = s.run(tuple);
    let nodes_visited = s.nodes;
    match result {
        Ok(cert) => RkOutcome { verdict: RkVerdict::Holds, certificate: Some(cert), failure: None, nodes_visited },
        Err(Stop::Fail(reason)) => RkOutcome { verdict: RkVerdict::Fails, certificate: None, failure: Some(reason), nodes_visited },
        Err(Stop::Budget) => RkOutcome {
            verdict: RkVerdict::NotEstablished,
            certificate: None,
            failure: Some(format!("not established: search budget of {} nodes exhausted", opts.max_nodes)),
            nodes_visited,
        },
    }
}

/// Replay a certificate node by node against recomputed derived tuples.
pub fn verify_certificate<T: RTuple>(t: &T, cert: &RkCertificate) -> bool {
    match cert {
        RkCertificate::Leaf(_) => t.len() == 1 && t.r1(0).ok(),
        RkCertificate::Proportional { factors, .. } => match t.proportional() {
            Some((f, base)) => {
                base.ok()
                    && f.len() == factors.len()
                    && f.iter().zip(factors).all(|(a, b)| libm::fabs(a - b) <= PROPORTIONAL_TOL * libm::fabs(*b).max(1.0))
            }
            None => false,
        },
        RkCertificate::Node { choices, .. } => {
            let k = t.len();
            if choices.len() != k || k < 2 || !(0..k).all(|j| t.r1(j).ok()) {
                return false;
            }
            choices.iter().enumerate().all(|(i, c)| {
                if c.i != i || c.j0 == i || c.j0 >= k {
                    return false;
                }
                let child = match (c.case, c.k0) {
                    (Case::A, None) => t.derive_a(i, c.j0),
                    (Case::B, None) if t.r1_of_difference(i, c.j0).ok() => t.derive_b(i, c.j0),
                    (Case::C, Some(k0)) if k0 < k && k0 != i && k0 != c.j0 && t.r1_of_difference(i, c.j0).ok() => {
                        t.derive_c(i, c.j0, k0)
                    }
                    _ => return false,
                };
                verify_certificate(&child, &c.child)
            })
        }
    }
}

/// R_k decision on coefficient sequences.
///
/// Symbolic inputs are decided exactly; if any input is numeric, every
/// input is sampled on that sequence's grid.
pub fn has_rk(seqs: &[CoefficientSequence]) -> RkOutcome {
    has_rk_with(seqs, &RkOptions::default())
}

pub fn has_rk_with(seqs: &[CoefficientSequence], opts: &RkOptions) -> RkOutcome {
    if seqs.is_empty() {
        return RkOutcome { verdict: RkVerdict::Fails, certificate: None, failure: Some("empty tuple".into()), nodes_visited: 0 };
    }
    let grid = seqs.iter().find_map(|s| match s {
        CoefficientSequence::Numeric(n) => Some(n.grid.clone()),
        CoefficientSequence::Symbolic(_) => None,
    });
    match grid {
        None => {
            let cs = seqs
                .iter()
                .map(|s| match s {
                    CoefficientSequence::Symbolic(c) => c.clone(),
                    CoefficientSequence::Numeric(_) => unreachable!(),
                })
                .collect();
            search_rk(&SymTuple::new(cs), opts)
        }
        Some(grid) => {
            let mut rows = Vec::with_capacity(seqs.len());
            for s in seqs {
                match s {
                    CoefficientSequence::Symbolic(c) => rows.push(NumericSequence::from_coefficient(c, &grid).values),
                    CoefficientSequence::Numeric(n) if n.grid == grid => rows.push(n.values.clone()),
                    CoefficientSequence::Numeric(_) => {
                        return RkOutcome {
                            verdict: RkVerdict::Fails,
                            certificate: None,
                            failure: Some("numeric sequences use different grids".into()),
                            nodes_visited: 0,
                        }
                    }
                }
            }
            search_rk(&NumTuple::new(grid, rows), opts)
        }
    }
}

/// How shift symbols are instantiated when checking (ii).
#[derive(Clone, Debug, PartialEq)]
pub enum ShiftSample {
    /// `h_i = base^i`.
    Geometric(i64),
    /// `h_i = values[i - 1]`.
    Explicit(Vec<i64>),
}

impl ShiftSample {
    pub fn assignment(&self, trace: &ReductionTrace) -> Result<ShiftAssignment> {
        let mut out = ShiftAssignment::new();
        for step in &trace.steps {
            let i = step.shift.0;
            let v = match self {
                ShiftSample::Geometric(b) => b
                    .checked_pow(i)
                    .ok_or_else(|| Error::InvalidArgument(format!("{b}^{i} overflows a 64-bit shift value")))?,
                ShiftSample::Explicit(vs) => {
                    *vs.get(i as usize - 1).ok_or(Error::UnboundShift(step.shift))?
                }
            };
            out.insert(step.shift, v);
        }
        Ok(out)
    }
}

impl fmt::Display for ShiftSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftSample::Geometric(b) => write!(f, "h_i={b}^i"),
            ShiftSample::Explicit(vs) => {
                f.write_str("h=")?;
                for (k, v) in vs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperNiceOptions {
    pub samples: Vec<ShiftSample>,
    pub pet: PetOptions,
    pub rk: RkOptions,
}

impl Default for SuperNiceOptions {
    fn default() -> Self {
        Self {
            samples: alloc::vec![ShiftSample::Geometric(10), ShiftSample::Geometric(12), ShiftSample::Geometric(15)],
            pet: PetOptions::default(),
            rk: RkOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Condition (ii) on the family itself.
    Original,
    /// Condition (ii)′ on the transform with this (0-based) `i0`.
    Transformed(usize),
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Original => f.write_str("(ii)"),
            Branch::Transformed(i0) => write!(f, "(ii)' i0={}", i0 + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleCheck {
    pub sample: ShiftSample,
    pub leaders: Vec<HardyCoefficient>,
    pub outcome: RkOutcome,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchCheck {
    pub branch: Branch,
    pub trace: ReductionTrace,
    pub samples: Vec<SampleCheck>,
}

impl BranchCheck {
    pub fn holds(&self) -> bool {
        self.samples.iter().all(|s| s.outcome.holds())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuperNiceVerdict {
    SuperNice,
    /// Condition (i) fails.
    NotSuperNice,
    /// (ii) or (ii)′ failed at some sampled shift values.
    NotEstablished,
}

impl fmt::Display for SuperNiceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuperNiceVerdict::SuperNice => "super nice",
            SuperNiceVerdict::NotSuperNice => "not super nice",
            SuperNiceVerdict::NotEstablished => "not established",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperNiceReport {
    pub verdict: SuperNiceVerdict,
    pub distinctness: DistinctnessReport,
    pub branches: Vec<BranchCheck>,
}

fn check_branch(family: &PolynomialFamily, branch: Branch, opts: &SuperNiceOptions) -> Result<BranchCheck> {
    let trace = pet_reduce_with(family, &opts.pet)?;
    let mut samples = Vec::with_capacity(opts.samples.len());
    for sample in &opts.samples {
        let shifts = sample.assignment(&trace)?;
        let leaders = trace
            .leading_coefficients
            .iter()
            .map(|c| c.instantiate(&shifts))
            .collect::<Result<Vec<_>>>()?;
        let seqs: Vec<CoefficientSequence> = leaders.iter().cloned().map(CoefficientSequence::Symbolic).collect();
        let outcome = has_rk_with(&seqs, &opts.rk);
        samples.push(SampleCheck { sample: sample.clone(), leaders, outcome });
    }
    Ok(BranchCheck { branch, trace, samples })
}

pub fn is_super_nice(family: &PolynomialFamily) -> Result<SuperNiceReport> {
    is_super_nice_with(family, &SuperNiceOptions::default())
}

/// Checks (i), then (ii) on the family and (ii)′ for every `i0` of maximal degree.
pub fn is_super_nice_with(family: &PolynomialFamily, opts: &SuperNiceOptions) -> Result<SuperNiceReport> {
    if opts.samples.is_empty() {
        return Err(Error::EmptyInput("shift samples"));
    }
    if family.has_shifts() {
        return Err(Error::ShiftsPresent);
    }
    let distinctness = essential_distinctness_report(family);
    if !distinctness.passes() {
        return Ok(SuperNiceReport { verdict: SuperNiceVerdict::NotSuperNice, distinctness, branches: Vec::new() });
    }
    let mut branches = alloc::vec![check_branch(family, Branch::Original, opts)?];
    let dmax = family.max_degree();
    for i0 in 0..family.len() {
        if family.members()[i0].degree() == dmax {
            branches.push(check_branch(&family.p_prime(i0)?, Branch::Transformed(i0), opts)?);
        }
    }
    let verdict = if branches.iter().all(|b| b.holds()) {
        SuperNiceVerdict::SuperNice
    } else {
        SuperNiceVerdict::NotEstablished
    };
    Ok(SuperNiceReport { verdict, distinctness, branches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffalg::GrowthSymbol;
    use alloc::vec;

    fn rec(rho: f64, num: i64, den: i64) -> HardyCoefficient {
        HardyCoefficient::reciprocal(rho, GrowthSymbol::power(num, den).unwrap())
    }

    fn sym(cs: &[HardyCoefficient]) -> Vec<CoefficientSequence> {
        cs.iter().cloned().map(CoefficientSequence::Symbolic).collect()
    }

    #[test]
    fn r1_examples() {
        assert!(has_r1(&CoefficientSequence::Symbolic(rec(1.0, 3, 10))).ok());
        assert!(!has_r1(&CoefficientSequence::Symbolic(HardyCoefficient::zero())).ok());
        let one = has_r1(&CoefficientSequence::Symbolic(HardyCoefficient::constant(1.0)));
        assert!(one.ok());
        assert_eq!(one.sign, Sign::Positive);
        let neg = has_r1(&CoefficientSequence::Symbolic(rec(-2.0, 1, 2)));
        assert!(neg.ok());
        assert_eq!(neg.sign, Sign::Negative);
    }

    #[test]
    fn linear_pair_certificate() {
        let out = has_rk(&sym(&[rec(1.0, 3, 10), rec(1.0, 3, 5)]));
        assert!(out.holds());
        let cert = out.certificate.unwrap();
        let RkCertificate::Node { choices, .. } = &cert else { panic!("expected node") };
        assert_eq!((choices[0].case, choices[0].j0), (Case::A, 1));
        assert_eq!((choices[1].case, choices[1].j0), (Case::B, 0));
        assert_eq!(
            cert.to_text(),
            "i=1 case=a j0=2\n  R1 ok sign=- growth=ok\ni=2 case=b j0=1\n  R1 ok sign=- growth=ok\n"
        );
    }

    #[test]
    fn identical_pair_fails() {
        let out = has_rk(&sym(&[rec(1.0, 3, 10), rec(1.0, 3, 10)]));
        assert_eq!(out.verdict, RkVerdict::Fails);
    }

    #[test]
    fn proportional_pair_holds_and_expands_to_search_result() {
        let seqs = sym(&[rec(1.0, 3, 10), rec(2.0, 3, 10)]);
        let fast = has_rk(&seqs);
        let slow = has_rk_with(&seqs, &RkOptions { proportional_shortcut: false, ..RkOptions::default() });
        assert!(fast.holds() && slow.holds());
        assert!(matches!(fast.certificate, Some(RkCertificate::Proportional { .. })));
        assert_eq!(fast.certificate.unwrap().expand().to_text(), slow.certificate.unwrap().to_text());
    }

    #[test]
    fn certificates_replay() {
        let cs = [rec(1.0, 3, 10), rec(1.0, 3, 5), rec(-1.0, 1, 2)];
        let out = has_rk(&sym(&cs));
        let t = SymTuple::new(cs.to_vec());
        if let Some(cert) = &out.certificate {
            assert!(verify_certificate(&t, cert));
        }
        let pair = SymTuple::new(vec![rec(1.0, 3, 10), rec(1.0, 3, 5)]);
        let cert = search_rk(&pair, &RkOptions::default()).certificate.unwrap();
        assert!(verify_certificate(&pair, &cert));
        let other = SymTuple::new(vec![rec(1.0, 3, 5), rec(1.0, 3, 10)]);
        assert!(!verify_certificate(&other, &cert));
    }

    #[test]
    fn numeric_probe_matches_symbolic_on_linear_pair() {
        let grid = DEFAULT_PROBE_GRID;
        let seqs: Vec<CoefficientSequence> = [rec(1.0, 3, 10), rec(1.0, 3, 5)]
            .iter()
            .map(|c| CoefficientSequence::Numeric(NumericSequence::from_coefficient(c, &grid)))
            .collect();
        let out = has_rk(&seqs);
        assert!(out.holds());
        let text = out.certificate.unwrap().to_text();
        assert!(text.starts_with("i=1 case=a j0=2\n"));
    }

    #[test]
    fn explicit_samples_must_cover_shifts() {
        let p = crate::polyfam::VariablePolynomial::monomial(rec(1.0, 1, 2), 2);
        let fam = PolynomialFamily::new(vec![p]).unwrap();
        let opts = SuperNiceOptions { samples: vec![ShiftSample::Explicit(vec![])], ..Default::default() };
        assert!(matches!(is_super_nice_with(&fam, &opts), Err(Error::UnboundShift(_))));
    }
}
