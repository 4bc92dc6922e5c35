//! Exponential sums, goodness probes, smoothness norms and box statistics.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::numeric::{self, ComplexSum};
use crate::polyfam::{combine, PolynomialFamily, ShiftAssignment, VariablePolynomial};
use crate::{Complex64, Error, Result};

/// Which character the exponential sum uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Convention {
    /// `e^{ix}`
    #[default]
    Unit,
    /// `e(x) = e^{2πix}`
    Turn,
}

impl Convention {
    /// Multiplier turning `α·x` into a phase measured in turns.
    fn turns_per_unit(self) -> f64 {
        match self {
            Convention::Unit => 1.0 / TAU,
            Convention::Turn => 1.0,
        }
    }
}

/// Phase coefficients `β_j` (in turns) of `α·p(n)`.
pub fn phase_coefficients(coeffs: &[f64], alpha: f64, convention: Convention) -> Vec<f64> {
    let s = alpha * convention.turns_per_unit();
    coeffs.iter().map(|c| c * s).collect()
}

/// `Σ_{n=start}^{end-1} e(Σ_j β_j n^j)`, compensated.
pub fn phase_sum_range(betas: &[f64], start: i64, end: i64) -> ComplexSum {
    let mut acc = ComplexSum::new();
    if betas.iter().all(|&b| b == 0.0) {
        // every term is exactly 1
        for _ in start..end {
            acc.add(Complex64::new(1.0, 0.0));
        }
        return acc;
    }
    for n in start..end {
        acc.add(numeric::unit_phase(numeric::phase_poly(betas, n)));
    }
    acc
}

/// `(1/N) Σ_{n=1}^{N} e^{i·α·p_N(n)}`.
pub fn exp_sum(p: &VariablePolynomial, n_window: u64, alpha: f64) -> Result<Complex64> {
    exp_sum_with(p, n_window, alpha, Convention::Unit, &ShiftAssignment::new())
}

pub fn exp_sum_with(
    p: &VariablePolynomial,
    n_window: u64,
    alpha: f64,
    convention: Convention,
    shifts: &ShiftAssignment,
) -> Result<Complex64> {
    let prepared = p.prepare(n_window, shifts)?;
    let betas = phase_coefficients(&prepared.coeffs, alpha, convention);
    Ok(phase_sum_range(&betas, 1, n_window as i64 + 1).total() / n_window as f64)
}

/// Defaults of [`goodness_probe`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoodnessOptions {
    /// Final magnitudes must fall below this.
    pub threshold: f64,
    pub convention: Convention,
}

impl Default for GoodnessOptions {
    fn default() -> Self {
        Self { threshold: 0.05, convention: Convention::Unit }
    }
}

pub const DEFAULT_ALPHAS: [f64; 3] = [1.0, core::f64::consts::SQRT_2, core::f64::consts::FRAC_PI_3];
pub const DEFAULT_NS: [u64; 3] = [10_000, 100_000, 1_000_000];

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Sixteen nonzero primitive integer vectors (fewer when `ell = 1`): the
/// axis vectors, then entries in `[-3, 3]` by increasing `ℓ¹` norm and
/// lexicographic order, with first nonzero entry positive.
pub fn default_lambda_grid(ell: usize) -> Vec<Vec<f64>> {
    const SIZE: usize = 16;
    if ell == 0 {
        return Vec::new();
    }
    let mut out: Vec<Vec<i64>> = (0..ell)
        .map(|i| {
            let mut v = vec![0; ell];
            v[i] = 1;
            v
        })
        .collect();
    let mut candidates: Vec<Vec<i64>> = Vec::new();
    let total = 7usize.pow(ell.min(6) as u32);
    for code in 0..total {
        let mut v = Vec::with_capacity(ell);
        let mut c = code;
        for _ in 0..ell {
            v.push((c % 7) as i64 - 3);
            c /= 7;
        }
        v.reverse();
        candidates.push(v);
    }
    candidates.sort_by_key(|v| (v.iter().map(|x| x.abs()).sum::<i64>(), v.clone()));
    for v in candidates {
        if out.len() >= SIZE {
            break;
        }
        let first = v.iter().find(|&&x| x != 0);
        if first.map_or(true, |&x| x < 0) || v.iter().fold(0, |g, &x| gcd(g, x)) != 1 || out.contains(&v) {
            continue;
        }
        out.push(v);
    }
    out.into_iter().map(|v| v.into_iter().map(|x| x as f64).collect()).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodnessRow {
    pub lambda: Vec<f64>,
    pub alpha: f64,
    pub n: u64,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CombinationVerdict {
    pub lambda: Vec<f64>,
    /// The combination is constant in `n`.
    pub degenerate: bool,
    pub decaying: bool,
    /// Largest magnitude at the final `N` over the α grid.
    pub final_magnitude: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodnessReport {
    pub rows: Vec<GoodnessRow>,
    pub verdicts: Vec<CombinationVerdict>,
    /// Index into `verdicts` of the combination with the largest final magnitude.
    pub worst: usize,
}

impl GoodnessReport {
    pub fn passes(&self) -> bool {
        self.verdicts.iter().all(|v| v.decaying)
    }
}

/// Envelope rule: over `N` sorted ascending, the maximum past the median
/// index does not exceed the maximum up to it, and the last value is
/// below `threshold`.
pub fn decays(magnitudes: &[f64], threshold: f64) -> bool {
    let Some(&last) = magnitudes.last() else { return false };
    let m = (magnitudes.len() - 1) / 2;
    let head = magnitudes[..=m].iter().copied().fold(0.0, f64::max);
    let tail = magnitudes[m + 1..].iter().copied().fold(0.0, f64::max);
    tail <= head && last < threshold
}

/// Shared evaluation hook so callers can parallelise the (λ, α, N) sweep.
pub trait SweepEvaluator {
    fn magnitude(&self, p: &VariablePolynomial, n: u64, alpha: f64, convention: Convention) -> Result<f64>;
}

/// Sequential evaluation.
pub struct Sequential;

impl SweepEvaluator for Sequential {
    fn magnitude(&self, p: &VariablePolynomial, n: u64, alpha: f64, convention: Convention) -> Result<f64> {
        Ok(exp_sum_with(p, n, alpha, convention, &ShiftAssignment::new())?.norm())
    }
}

pub fn goodness_probe(family: &PolynomialFamily, alphas: &[f64], ns: &[u64], lambdas: &[Vec<f64>]) -> Result<GoodnessReport> {
    goodness_probe_with(family, alphas, ns, lambdas, &GoodnessOptions::default(), &Sequential)
}

pub fn goodness_probe_with(
    family: &PolynomialFamily,
    alphas: &[f64],
    ns: &[u64],
    lambdas: &[Vec<f64>],
    opts: &GoodnessOptions,
    eval: &dyn SweepEvaluator,
) -> Result<GoodnessReport> {
    if alphas.is_empty() {
        return Err(Error::EmptyInput("alpha grid"));
    }
    if ns.is_empty() {
        return Err(Error::EmptyInput("N grid"));
    }
    if lambdas.is_empty() {
        return Err(Error::EmptyInput("lambda grid"));
    }
    if alphas.contains(&0.0) {
        return Err(Error::InvalidArgument("alpha must be nonzero".into()));
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for lambda in lambdas {
        if lambda.iter().all(|&l| l == 0.0) {
            return Err(Error::InvalidArgument("lambda vector must be nonzero".into()));
        }
        let p = combine(family, lambda)?;
        let degenerate = !p.is_nonconstant();
        let mut decaying = !degenerate;
        let mut final_magnitude: f64 = 0.0;
        for &alpha in alphas {
            let mut mags = Vec::with_capacity(ns.len());
            for &n in &ns {
                let m = if degenerate { 1.0 } else { eval.magnitude(&p, n, alpha, opts.convention)? };
                rows.push(GoodnessRow { lambda: lambda.clone(), alpha, n, magnitude: m });
                mags.push(m);
            }
            final_magnitude = final_magnitude.max(*mags.last().unwrap());
            decaying &= decays(&mags, opts.threshold);
        }
        verdicts.push(CombinationVerdict { lambda: lambda.clone(), degenerate, decaying, final_magnitude });
    }
    let worst = (0..verdicts.len())
        .max_by(|&a, &b| verdicts[a].final_magnitude.total_cmp(&verdicts[b].final_magnitude))
        .unwrap_or(0);
    Ok(GoodnessReport { rows, verdicts, worst })
}

/// `2 / (N·|1 − e^{iθ}|)` with `θ = α·a` in the given convention: the
/// closed-form bound for `|(1/N) Σ_{n≤N} e^{iθn}|`.
pub fn geometric_bound(theta_coeff: f64, alpha: f64, n_window: u64, convention: Convention) -> f64 {
    let turns = alpha * theta_coeff * convention.turns_per_unit();
    let z = numeric::unit_phase(numeric::frac(turns));
    let d = (Complex64::new(1.0, 0.0) - z).norm();
    2.0 / (n_window as f64 * d)
}

/// `max_{1≤i≤d} N^i·‖a_i‖` for `coeffs = [a_1, …, a_d]`.
pub fn smoothness_norm(coeffs: &[f64], n_window: u64) -> Result<f64> {
    if coeffs.is_empty() {
        return Err(Error::EmptyInput("smoothness coefficients"));
    }
    let nf = n_window as f64;
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(i, &a)| libm::pow(nf, (i + 1) as f64) * numeric::dist_to_int(a))
        .fold(0.0, f64::max))
}

/// An axis-parallel box `Π [lo_k, hi_k)` on the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl TorusBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::LengthMismatch { expected: lo.len(), found: hi.len() });
        }
        Ok(Self { lo, hi })
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a).max(0.0)).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *a <= *v && *v < *b)
    }
}

/// Fraction of `points` inside `bx`.
pub fn box_frequency(points: &[Vec<f64>], bx: &TorusBox) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput("point list"));
    }
    let mut inside = 0usize;
    for p in points {
        if p.len() != bx.lo.len() {
            return Err(Error::LengthMismatch { expected: bx.lo.len(), found: p.len() });
        }
        if bx.contains(p) {
            inside += 1;
        }
    }
    Ok(inside as f64 / points.len() as f64)
}

/// Cells per coordinate of the dyadic test grid.
pub const GRID_CELLS: usize = 8;
/// Coordinates beyond this are ignored by [`dyadic_deviation`].
pub const GRID_MAX_DIM: usize = 3;

/// `max |frequency − volume|` over every box with corners on the `1/8`
/// grid in the first (at most three) coordinates.
pub fn dyadic_deviation(points: &[Vec<f64>]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput("point list"));
    }
    let dim = points[0].len().min(GRID_MAX_DIM);
    if dim == 0 {
        return Err(Error::InvalidArgument("points have no coordinates".into()));
    }
    let c = GRID_CELLS;
    let side = c + 1;
    let cells = side.pow(dim as u32);
    // prefix[idx] counts points with cell coordinates < corner, per axis
    let mut prefix = vec![0u64; cells];
    let stride: Vec<usize> = (0..dim).map(|k| side.pow((dim - 1 - k) as u32)).collect();
    for p in points {
        if p.len() < dim {
            return Err(Error::LengthMismatch { expected: dim, found: p.len() });
        }
        let mut idx = 0;
        for k in 0..dim {
            let cell = ((numeric::frac(p[k]) * c as f64) as usize).min(c - 1);
            idx += (cell + 1) * stride[k];
        }
        prefix[idx] += 1;
    }
    for &s in &stride {
        for idx in 0..cells {
            if (idx / s) % side > 0 {
                prefix[idx] += prefix[idx - s];
            }
        }
    }
    let total = points.len() as f64;
    let mut worst: f64 = 0.0;
    let intervals: Vec<(usize, usize)> = (0..c).flat_map(|a| (a + 1..=c).map(move |b| (a, b))).collect();
    let mut choice = vec![0usize; dim];
    loop {
        let mut count: i64 = 0;
        for mask in 0..(1usize << dim) {
            let mut idx = 0;
            let mut sign = 1i64;
            for k in 0..dim {
                let (a, b) = intervals[choice[k]];
                if mask >> k & 1 == 1 {
                    idx += a * stride[k];
                    sign = -sign;
                } else {
                    idx += b * stride[k];
                }
            }
            count += sign * prefix[idx] as i64;
        }
        let vol: f64 = choice.iter().map(|&i| (intervals[i].1 - intervals[i].0) as f64 / c as f64).product();
        worst = worst.max(libm::fabs(count as f64 / total - vol));
        let mut k = 0;
        loop {
            if k == dim {
                return Ok(worst);
            }
            choice[k] += 1;
            if choice[k] < intervals.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// `{[p_N(n)]·θ mod 1}` for `n = 1..=N`, each product reduced exactly.
pub fn floor_orbit(p: &VariablePolynomial, n_window: u64, theta: f64) -> Result<Vec<f64>> {
    let prepared = p.prepare(n_window, &ShiftAssignment::new())?;
    Ok((1..=n_window as i64).map(|n| numeric::frac_mul(theta, prepared.floor(n) as i128)).collect())
}
