//! Concrete measure-preserving systems and ergodic averages along floored
//! variable polynomial iterates.
//!
//! Orbits are never iterated step by step: `T^m` has a closed form for every
//! shipped system, and the products `m·α` are reduced modulo one exactly.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

use crate::numeric::{self, ComplexSum};
use crate::polyfam::{PolynomialFamily, PreparedPolynomial, ShiftAssignment, VariablePolynomial};
use crate::{Complex64, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum System {
    /// `x ↦ x + α` on `T^d`, `d = alpha.len()`.
    TorusRotation { alpha: Vec<f64>, declared_ergodic: bool },
    /// `(x, y) ↦ (x + α, y + x)` on `T²`.
    SkewTorus { alpha: f64 },
    /// `x ↦ x + 1` on `Z_M`.
    CyclicShift { modulus: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Torus(Vec<f64>),
    Cyclic(u64),
}

impl System {
    pub fn rotation(alpha: Vec<f64>) -> Self {
        System::TorusRotation { alpha, declared_ergodic: true }
    }

    pub fn cyclic(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidModulus(modulus));
        }
        Ok(System::CyclicShift { modulus })
    }

    /// Torus dimension, or `None` for `Z_M`.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            System::TorusRotation { alpha, .. } => Some(alpha.len()),
            System::SkewTorus { .. } => Some(2),
            System::CyclicShift { .. } => None,
        }
    }

    pub fn check_point(&self, x: &Point) -> Result<()> {
        match (self, x) {
            (System::CyclicShift { modulus }, Point::Cyclic(v)) if v < modulus => Ok(()),
            (System::CyclicShift { modulus }, Point::Cyclic(v)) => {
                Err(Error::SpaceMismatch(format!("{v} is not a residue modulo {modulus}")))
            }
            (System::CyclicShift { .. }, Point::Torus(_)) => Err(Error::SpaceMismatch("torus point given to Z_M".into())),
            (_, Point::Cyclic(_)) => Err(Error::SpaceMismatch("residue given to a torus system".into())),
            (_, Point::Torus(v)) => {
                let d = self.dimension().unwrap_or(0);
                if v.len() == d {
                    Ok(())
                } else {
                    Err(Error::SpaceMismatch(format!("point of dimension {} on a {d}-torus", v.len())))
                }
            }
        }
    }

    /// `T^m x` on a torus, written into `out`.
    fn apply_torus(&self, m: i64, x: &[f64], out: &mut [f64]) {
        match self {
            System::TorusRotation { alpha, .. } => {
                for ((o, xi), a) in out.iter_mut().zip(x).zip(alpha) {
                    *o = numeric::frac(xi + numeric::frac_mul(*a, m as i128));
                }
            }
            System::SkewTorus { alpha } => {
                let m = m as i128;
                let tri = m * (m - 1) / 2;
                out[0] = numeric::frac(x[0] + numeric::frac_mul(*alpha, m));
                out[1] = numeric::frac(x[1] + numeric::frac_mul(x[0], m) + numeric::frac_mul(*alpha, tri));
            }
            System::CyclicShift { .. } => unreachable!("cyclic systems use residues"),
        }
    }

    fn apply_cyclic(modulus: u64, m: i64, x: u64) -> u64 {
        ((x as i128 + m as i128).rem_euclid(modulus as i128)) as u64
    }
}

pub fn power_apply(sys: &System, m: i64, x: &Point) -> Result<Point> {
    sys.check_point(x)?;
    Ok(match (sys, x) {
        (System::CyclicShift { modulus }, Point::Cyclic(v)) => Point::Cyclic(System::apply_cyclic(*modulus, m, *v)),
        (_, Point::Torus(v)) => {
            let mut out = vec![0.0; v.len()];
            sys.apply_torus(m, v, &mut out);
            Point::Torus(out)
        }
        _ => unreachable!("checked above"),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    /// `Σ amp · e(k·x)` over distinct integer frequency vectors `k`.
    Trig(Vec<(Vec<i64>, Complex64)>),
    /// Values indexed by `Z_M`.
    Vector(Vec<Complex64>),
}

impl Observable {
    pub fn trig(terms: Vec<(Vec<i64>, Complex64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyInput("trigonometric polynomial"));
        }
        let d = terms[0].0.len();
        for (k, (freq, _)) in terms.iter().enumerate() {
            if freq.len() != d {
                return Err(Error::LengthMismatch { expected: d, found: freq.len() });
            }
            if terms[..k].iter().any(|t| &t.0 == freq) {
                return Err(Error::InvalidArgument(format!("repeated frequency {freq:?}")));
            }
        }
        Ok(Observable::Trig(terms))
    }

    /// `e(k·x)`.
    pub fn character(freq: Vec<i64>) -> Self {
        Observable::Trig(vec![(freq, Complex64::new(1.0, 0.0))])
    }

    pub fn constant_on_torus(c: Complex64, dim: usize) -> Self {
        Observable::Trig(vec![(vec![0; dim], c)])
    }

    pub fn vector(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("finite vector observable"));
        }
        Ok(Observable::Vector(values))
    }

    pub fn mean(&self) -> Complex64 {
        match self {
            Observable::Trig(terms) => terms
                .iter()
                .find(|t| t.0.iter().all(|&k| k == 0))
                .map_or(Complex64::new(0.0, 0.0), |t| t.1),
            Observable::Vector(v) => {
                let mut s = ComplexSum::new();
                for z in v {
                    s.add(*z);
                }
                s.total() / v.len() as f64
            }
        }
    }

    /// Upper bound on `sup |f|` (exact for vectors).
    pub fn sup_norm(&self) -> f64 {
        match self {
            Observable::Trig(terms) => terms.iter().map(|t| t.1.norm()).sum(),
            Observable::Vector(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    fn check_space(&self, sys: &System) -> Result<()> {
        match (self, sys) {
            (Observable::Vector(v), System::CyclicShift { modulus }) if v.len() as u64 == *modulus => Ok(()),
            (Observable::Vector(v), System::CyclicShift { modulus }) => {
                Err(Error::SpaceMismatch(format!("vector of length {} on Z_{modulus}", v.len())))
            }
            (Observable::Trig(terms), _) if sys.dimension() == Some(terms[0].0.len()) => Ok(()),
            (Observable::Trig(terms), _) => Err(Error::SpaceMismatch(format!(
                "trigonometric polynomial in {} variables on {:?}",
                terms[0].0.len(),
                sys.dimension()
            ))),
            (Observable::Vector(_), _) => Err(Error::SpaceMismatch("finite vector on a torus".into())),
        }
    }

    #[inline]
    fn eval_torus(&self, y: &[f64]) -> Complex64 {
        match self {
            Observable::Trig(terms) => {
                let mut s = Complex64::new(0.0, 0.0);
                for (freq, amp) in terms {
                    let mut t = 0.0;
                    for (k, v) in freq.iter().zip(y) {
                        t += numeric::frac_mul(*v, *k as i128);
                    }
                    s += amp * numeric::unit_phase(numeric::frac(t));
                }
                s
            }
            Observable::Vector(_) => unreachable!("checked by check_space"),
        }
    }

    pub fn eval(&self, x: &Point) -> Result<Complex64> {
        match (self, x) {
            (Observable::Trig(terms), Point::Torus(y)) if terms[0].0.len() == y.len() => Ok(self.eval_torus(y)),
            (Observable::Vector(v), Point::Cyclic(i)) if (*i as usize) < v.len() => Ok(v[*i as usize]),
            _ => Err(Error::SpaceMismatch("observable and point live on different spaces".into())),
        }
    }
}

/// Exponents `a_i(n)` of the averages.
#[derive(Clone, Debug, PartialEq)]
pub enum Iterates {
    /// `a_i(n) = [p_i(n)]`.
    Family(PolynomialFamily),
    /// `a_i(n) = i·[p(n)]` for `1 <= i <= ell`.
    Multiples { p: VariablePolynomial, ell: usize },
    /// `a_i(n) = i·n` for `1 <= i <= ell`.
    Linear { ell: usize },
}

impl Iterates {
    pub fn len(&self) -> usize {
        match self {
            Iterates::Family(f) => f.len(),
            Iterates::Multiples { ell, .. } | Iterates::Linear { ell } => *ell,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn prepare(&self, n_window: u64) -> Result<PreparedIterates> {
        let none = ShiftAssignment::new();
        Ok(match self {
            Iterates::Family(f) => PreparedIterates::Family(
                f.members().iter().map(|p| p.prepare(n_window, &none)).collect::<Result<_>>()?,
            ),
            Iterates::Multiples { p, ell } => PreparedIterates::Multiples(p.prepare(n_window, &none)?, *ell),
            Iterates::Linear { ell } => PreparedIterates::Linear(*ell),
        })
    }
}

/// Iterates with coefficients evaluated at one `N`.
#[derive(Clone, Debug, PartialEq)]
pub enum PreparedIterates {
    Family(Vec<PreparedPolynomial>),
    Multiples(PreparedPolynomial, usize),
    Linear(usize),
}

impl PreparedIterates {
    #[inline]
    pub fn fill(&self, n: i64, out: &mut [i64]) {
        match self {
            PreparedIterates::Family(ps) => {
                for (o, p) in out.iter_mut().zip(ps) {
                    *o = p.floor(n);
                }
            }
            PreparedIterates::Multiples(p, ell) => {
                let base = p.floor(n);
                for (i, o) in out.iter_mut().enumerate().take(*ell) {
                    *o = base.saturating_mul(i as i64 + 1);
                }
            }
            PreparedIterates::Linear(ell) => {
                for (i, o) in out.iter_mut().enumerate().take(*ell) {
                    *o = n * (i as i64 + 1);
                }
            }
        }
    }
}

fn check_inputs(sys: &System, iterates: &Iterates, fs: &[Observable], x: &Point) -> Result<()> {
    if iterates.len() != fs.len() {
        return Err(Error::LengthMismatch { expected: iterates.len(), found: fs.len() });
    }
    sys.check_point(x)?;
    for f in fs {
        f.check_space(sys)?;
    }
    Ok(())
}

/// `Σ_{n=start}^{end-1} Π_i f_i(T^{a_i(n)} x)`; building block for chunked sums.
pub fn average_sum_range(
    sys: &System,
    iterates: &PreparedIterates,
    fs: &[Observable],
    x: &Point,
    start: i64,
    end: i64,
) -> ComplexSum {
    let mut acc = ComplexSum::new();
    let mut a = vec![0i64; fs.len()];
    match (sys, x) {
        (System::CyclicShift { modulus }, Point::Cyclic(x0)) => {
            for n in start..end {
                iterates.fill(n, &mut a);
                let mut prod = Complex64::new(1.0, 0.0);
                for (f, &m) in fs.iter().zip(&a) {
                    let Observable::Vector(v) = f else { unreachable!() };
                    prod *= v[System::apply_cyclic(*modulus, m, *x0) as usize];
                }
                acc.add(prod);
            }
        }
        (_, Point::Torus(x0)) => {
            let mut y = vec![0.0; x0.len()];
            for n in start..end {
                iterates.fill(n, &mut a);
                let mut prod = Complex64::new(1.0, 0.0);
                for (f, &m) in fs.iter().zip(&a) {
                    sys.apply_torus(m, x0, &mut y);
                    prod *= f.eval_torus(&y);
                }
                acc.add(prod);
            }
        }
        _ => unreachable!("checked by check_inputs"),
    }
    acc
}

/// `(1/N) Σ_{n=1}^{N} Π_i f_i(T^{a_i(n)} x)`.
pub fn average_along(sys: &System, iterates: &Iterates, fs: &[Observable], x: &Point, n_window: u64) -> Result<Complex64> {
    let prepared = prepare_average(sys, iterates, fs, x, n_window)?;
    Ok(average_sum_range(sys, &prepared, fs, x, 1, n_window as i64 + 1).total() / n_window as f64)
}

/// Validate inputs and prepare iterates, for callers that split the `n` range.
pub fn prepare_average(sys: &System, iterates: &Iterates, fs: &[Observable], x: &Point, n_window: u64) -> Result<PreparedIterates> {
    check_inputs(sys, iterates, fs, x)?;
    if n_window == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if n_window < crate::coeffalg::MIN_EVAL_N && !matches!(iterates, Iterates::Linear { .. }) {
        return Err(Error::Domain { n: n_window, min: crate::coeffalg::MIN_EVAL_N });
    }
    iterates.prepare(n_window.max(crate::coeffalg::MIN_EVAL_N))
}

pub fn multiple_average(sys: &System, iterates: &PolynomialFamily, fs: &[Observable], x: &Point, n_window: u64) -> Result<Complex64> {
    average_along(sys, &Iterates::Family(iterates.clone()), fs, x, n_window)
}

/// `(1/N) Σ_{n=1}^{N} Π_{i=1}^{ℓ} f_i(T^{i n} x)`.
pub fn furstenberg_average(sys: &System, ell: usize, fs: &[Observable], x: &Point, n_window: u64) -> Result<Complex64> {
    average_along(sys, &Iterates::Linear { ell }, fs, x, n_window)
}

/// Heuristic ergodicity verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct ErgodicityCheck {
    pub declared: bool,
    /// `None` when no rational relation was found.
    pub relation: Option<Vec<i64>>,
}

impl ErgodicityCheck {
    pub fn ergodic(&self) -> bool {
        self.declared && self.relation.is_none()
    }
}

/// Tolerance and coefficient bound of the integer relation search.
pub const RELATION_TOL: f64 = 1e-9;
pub const RELATION_BOUND: i64 = 12;

/// Smallest-height `(k_0, k_1, …, k_d) ≠ 0` with `|k_0 + Σ k_i α_i| < tol`
/// and `k_1..k_d` not all zero, searched up to the coefficient bound.
pub fn integer_relation(alpha: &[f64], bound: i64, tol: f64) -> Option<Vec<i64>> {
    let d = alpha.len();
    if d == 0 {
        return None;
    }
    for height in 1..=bound {
        let side = (2 * height + 1) as u64;
        let total = side.checked_pow(d as u32)?;
        for code in 0..total {
            let mut c = code;
            let mut k = Vec::with_capacity(d);
            for _ in 0..d {
                k.push((c % side) as i64 - height);
                c /= side;
            }
            if k.iter().all(|&v| v == 0) || k.iter().map(|v| v.abs()).max() != Some(height) {
                continue;
            }
            let s: f64 = k.iter().zip(alpha).map(|(&ki, &a)| ki as f64 * a).sum();
            let k0 = -libm::round(s);
            if libm::fabs(s + k0) < tol {
                let mut rel = vec![k0 as i64];
                rel.extend(k);
                if rel[1..].iter().find(|&&v| v != 0).is_some_and(|&v| v < 0) {
                    rel.iter_mut().for_each(|v| *v = -*v);
                }
                return Some(rel);
            }
        }
    }
    None
}

/// Continued-fraction test: `Some(q)` if `x` is within `tol` of `p/q` with `q <= max_den`.
pub fn rational_denominator(x: f64, max_den: u64, tol: f64) -> Option<u64> {
    let (mut h0, mut h1) = (0f64, 1f64);
    let (mut k0, mut k1) = (1f64, 0f64);
    let mut r = x;
    for _ in 0..64 {
        let a = libm::floor(r);
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den as f64 {
            return None;
        }
        if libm::fabs(x - h2 / k2) < tol {
            return Some(k2 as u64);
        }
        let frac = r - a;
        if frac == 0.0 {
            return Some(k2 as u64);
        }
        r = 1.0 / frac;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
    None
}

pub fn ergodicity(sys: &System) -> ErgodicityCheck {
    match sys {
        System::TorusRotation { alpha, declared_ergodic } => {
            let bound = if alpha.len() <= 2 { RELATION_BOUND } else { 4 };
            ErgodicityCheck { declared: *declared_ergodic, relation: integer_relation(alpha, bound, RELATION_TOL) }
        }
        System::SkewTorus { alpha } => ErgodicityCheck {
            declared: true,
            relation: rational_denominator(*alpha, 1_000_000, 1e-12).map(|q| vec![-(libm::round(alpha * q as f64) as i64), q as i64]),
        },
        System::CyclicShift { .. } => ErgodicityCheck { declared: true, relation: None },
    }
}

/// `Π ∫ f_i dμ`.
pub fn expected_limit(sys: &System, fs: &[Observable]) -> Result<Complex64> {
    let e = ergodicity(sys);
    if !e.declared {
        return Err(Error::NonErgodic("declared non-ergodic".into()));
    }
    if let Some(rel) = e.relation {
        return Err(Error::NonErgodic(format!("rational relation {rel:?} among the rotation numbers")));
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for f in fs {
        f.check_space(sys)?;
        prod *= f.mean();
    }
    Ok(prod)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// `‖f‖_k` on `Z_M` with respect to the shift (or its inverse).
pub fn hk_seminorm(modulus: u64, f: &[Complex64], k: u32) -> Result<f64> {
    hk_seminorm_dir(modulus, f, k, Direction::Forward)
}

pub fn hk_seminorm_dir(modulus: u64, f: &[Complex64], k: u32, dir: Direction) -> Result<f64> {
    if modulus < 1 {
        return Err(Error::InvalidModulus(modulus));
    }
    if f.len() as u64 != modulus {
        return Err(Error::LengthMismatch { expected: modulus as usize, found: f.len() });
    }
    if k < 1 {
        return Err(Error::InvalidArgument("seminorm order must be at least 1".into()));
    }
    let s = seminorm_power(f, k, dir);
    Ok(libm::pow(s.max(0.0), 1.0 / libm::pow(2.0, k as f64)))
}

/// `‖f‖_k^{2^k}`.
fn seminorm_power(f: &[Complex64], k: u32, dir: Direction) -> f64 {
    let m = f.len();
    if k == 1 {
        let mut s = ComplexSum::new();
        for z in f {
            s.add(*z);
        }
        return (s.total() / m as f64).norm_sqr();
    }
    let mut acc = numeric::CompensatedSum::new();
    let mut g = vec![Complex64::new(0.0, 0.0); m];
    for shift in 0..m {
        for (x, slot) in g.iter_mut().enumerate() {
            let y = match dir {
                Direction::Forward => (x + shift) % m,
                Direction::Backward => (x + m - shift) % m,
            };
            *slot = f[x].conj() * f[y];
        }
        acc.add(seminorm_power(&g, k - 1, dir));
    }
    acc.total() / m as f64
}

/// A Gaussian integer, used for exact averages on `Z_M`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Gaussian {
    pub re: i128,
    pub im: i128,
}

impl Gaussian {
    pub const ONE: Self = Self { re: 1, im: 0 };

    pub const fn new(re: i128, im: i128) -> Self {
        Self { re, im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }
}

impl Add for Gaussian {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Mul for Gaussian {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

/// The rational `sum / count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactAverage {
    pub sum: Gaussian,
    pub count: u64,
}

impl ExactAverage {
    pub fn to_complex(self) -> Complex64 {
        self.sum.to_complex() / self.count as f64
    }
}

/// Exact `(1/N) Σ_n Π_i f_i(x + a_i(n) mod M)` for Gaussian-integer vectors.
pub fn exact_average(modulus: u64, iterates: &Iterates, fs: &[Vec<Gaussian>], x: u64, n_window: u64) -> Result<ExactAverage> {
    if modulus == 0 {
        return Err(Error::InvalidModulus(modulus));
    }
    if iterates.len() != fs.len() {
        return Err(Error::LengthMismatch { expected: iterates.len(), found: fs.len() });
    }
    if x >= modulus {
        return Err(Error::SpaceMismatch(format!("{x} is not a residue modulo {modulus}")));
    }
    for f in fs {
        if f.len() as u64 != modulus {
            return Err(Error::SpaceMismatch(format!("vector of length {} on Z_{modulus}", f.len())));
        }
    }
    if n_window == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if n_window < crate::coeffalg::MIN_EVAL_N && !matches!(iterates, Iterates::Linear { .. }) {
        return Err(Error::Domain { n: n_window, min: crate::coeffalg::MIN_EVAL_N });
    }
    let prepared = iterates.prepare(n_window.max(crate::coeffalg::MIN_EVAL_N))?;
    let mut a = vec![0i64; fs.len()];
    let mut sum = Gaussian::default();
    for n in 1..=n_window as i64 {
        prepared.fill(n, &mut a);
        let mut prod = Gaussian::ONE;
        for (f, &m) in fs.iter().zip(&a) {
            prod = prod * f[System::apply_cyclic(modulus, m, x) as usize];
        }
        sum = sum + prod;
    }
    Ok(ExactAverage { sum, count: n_window })
}

/// Deterministic quasi-random base points (the `R_d` sequence) offset by `seed`.
pub fn base_point_panel(sys: &System, count: usize, seed: u64) -> Vec<Point> {
    let d = sys.dimension().unwrap_or(1);
    // φ_d: the unique positive root of x^{d+1} = x + 1
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = libm::pow(1.0 + phi, 1.0 / (d as f64 + 1.0));
    }
    let steps: Vec<f64> = (1..=d).map(|k| numeric::frac(1.0 / libm::pow(phi, k as f64))).collect();
    let offset = numeric::frac_mul(0.618_033_988_749_894_9, seed as i128);
    (1..=count)
        .map(|i| {
            let coords: Vec<f64> = steps.iter().map(|s| numeric::frac(offset + numeric::frac_mul(*s, i as i128))).collect();
            match sys {
                System::CyclicShift { modulus } => Point::Cyclic(((coords[0] * *modulus as f64) as u64).min(modulus - 1)),
                _ => Point::Torus(coords),
            }
        })
        .collect()
}
