//! Coefficients in the span of reciprocals of sublinear growth functions.
//!
//! A growth function is encoded by an exponent triple `(γ, δ, ε)` standing
//! for `x^γ·(log x)^δ·(log log x)^ε`. Comparing germs reduces to comparing
//! triples lexicographically, which is what makes `≺` and `∼` decidable.
//! A [`HardyCoefficient`] is a real constant plus a finite combination
//! `Σ ρ_i / g_i` kept in a canonical normal form.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::{Error, Result};

/// Rational exponent of `x`, `log x` or `log log x`.
pub type Exponent = Rational64;

/// Smallest `N` at which every growth symbol can be evaluated (`log log N > 0`).
pub const MIN_EVAL_N: u64 = 16;

/// An exponent triple without validity constraints; used for growth
/// symbols and for the scale of ratios (which may be growing or decaying).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentTriple {
    pub gamma: Exponent,
    pub delta: Exponent,
    pub epsilon: Exponent,
}

impl ExponentTriple {
    pub const ZERO: Self = Self::new(Rational64::new_raw(0, 1), Rational64::new_raw(0, 1), Rational64::new_raw(0, 1));
    /// The triple of the identity germ `x`.
    pub const LINEAR: Self = Self::new(Rational64::new_raw(1, 1), Rational64::new_raw(0, 1), Rational64::new_raw(0, 1));

    pub const fn new(gamma: Exponent, delta: Exponent, epsilon: Exponent) -> Self {
        Self { gamma, delta, epsilon }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    /// `x^γ·(log x)^δ·(log log x)^ε`, for `x > e`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = 1.0;
        if !self.gamma.is_zero() {
            v *= libm::pow(x, to_f64(self.gamma));
        }
        if !self.delta.is_zero() || !self.epsilon.is_zero() {
            let lx = libm::log(x);
            if !self.delta.is_zero() {
                v *= libm::pow(lx, to_f64(self.delta));
            }
            if !self.epsilon.is_zero() {
                v *= libm::pow(libm::log(lx), to_f64(self.epsilon));
            }
        }
        v
    }
}

impl Add for ExponentTriple {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.gamma + o.gamma, self.delta + o.delta, self.epsilon + o.epsilon)
    }
}

impl Sub for ExponentTriple {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.gamma - o.gamma, self.delta - o.delta, self.epsilon - o.epsilon)
    }
}

impl Neg for ExponentTriple {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.gamma, -self.delta, -self.epsilon)
    }
}

pub(crate) fn to_f64(r: Exponent) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// A sublinear growth function `g` with `1 ≺ g(x) ≺ x`.
///
/// Ordering on symbols is the growth order: `a < b` iff `a ≺ b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GrowthSymbol(ExponentTriple);

impl GrowthSymbol {
    pub fn new(gamma: Exponent, delta: Exponent, epsilon: Exponent) -> Result<Self> {
        let t = ExponentTriple::new(gamma, delta, epsilon);
        if t <= ExponentTriple::ZERO {
            return Err(Error::InvalidSymbol(alloc::format!("{t:?} does not tend to infinity")));
        }
        if gamma >= Exponent::from_integer(1) {
            return Err(Error::InvalidSymbol(alloc::format!("x-exponent {gamma} is not sublinear")));
        }
        Ok(Self(t))
    }

    /// `x^(num/den)`.
    pub fn power(num: i64, den: i64) -> Result<Self> {
        Self::new(Exponent::new(num, den), Exponent::zero(), Exponent::zero())
    }

    /// `(log x)^(num/den)`.
    pub fn log_power(num: i64, den: i64) -> Result<Self> {
        Self::new(Exponent::zero(), Exponent::new(num, den), Exponent::zero())
    }

    pub fn triple(&self) -> ExponentTriple {
        self.0
    }

    pub fn gamma(&self) -> Exponent {
        self.0.gamma
    }

    pub fn delta(&self) -> Exponent {
        self.0.delta
    }

    pub fn epsilon(&self) -> Exponent {
        self.0.epsilon
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.eval(x)
    }

    /// Display name in the polynomial DSL, e.g. `N^0.3*logN^1.5`.
    pub fn label(&self) -> alloc::string::String {
        alloc::format!("{self}")
    }

    /// Number of `*`-separated factors in the label.
    pub(crate) fn factor_count(&self) -> usize {
        [self.0.gamma, self.0.delta, self.0.epsilon].iter().filter(|e| !e.is_zero()).count()
    }
}

/// Write an exponent as an integer, a terminating decimal, or `(p/q)`.
pub fn fmt_exponent(e: Exponent, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (p, q) = (*e.numer(), *e.denom());
    if q == 1 {
        return write!(f, "{p}");
    }
    let (mut twos, mut fives, mut rest) = (0u32, 0u32, q);
    while rest % 2 == 0 {
        rest /= 2;
        twos += 1;
    }
    while rest % 5 == 0 {
        rest /= 5;
        fives += 1;
    }
    let digits = twos.max(fives);
    if rest != 1 || digits > 18 {
        return write!(f, "({p}/{q})");
    }
    let scale = 10i128.pow(digits);
    let scaled = p as i128 * (scale / q as i128);
    let sign = if scaled < 0 { "-" } else { "" };
    let a = scaled.unsigned_abs();
    let whole = a / scale as u128;
    let frac = a % scale as u128;
    write!(f, "{sign}{whole}.{frac:0width$}", width = digits as usize)
}

impl fmt::Display for GrowthSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, e) in [("N", self.0.gamma), ("logN", self.0.delta), ("loglogN", self.0.epsilon)] {
            if e.is_zero() {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "{name}^")?;
            fmt_exponent(e, f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthOrder {
    /// `g1 ≺ g2`
    Precedes,
    /// `g1 ∼ g2`
    Equivalent,
    /// `g2 ≺ g1`
    Dominates,
}

pub fn compare_growth(g1: &GrowthSymbol, g2: &GrowthSymbol) -> GrowthOrder {
    match g1.cmp(g2) {
        Ordering::Less => GrowthOrder::Precedes,
        Ordering::Equal => GrowthOrder::Equivalent,
        Ordering::Greater => GrowthOrder::Dominates,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Self {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn symbol(&self) -> char {
        match self {
            Sign::Negative => '-',
            Sign::Zero => '0',
            Sign::Positive => '+',
        }
    }
}

/// `constant + Σ ρ_i / g_i` in normal form: symbols distinct, sorted by
/// strictly decreasing growth, no zero `ρ`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HardyCoefficient {
    constant: f64,
    terms: Vec<(f64, GrowthSymbol)>,
}

fn clean(x: f64) -> f64 {
    // folds -0.0 into 0.0 so structural comparison is a total order on values
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl HardyCoefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self { constant: clean(c), terms: Vec::new() }
    }

    /// `rho / g`.
    pub fn reciprocal(rho: f64, g: GrowthSymbol) -> Self {
        Self::new(0.0, [(rho, g)])
    }

    pub fn new(constant: f64, terms: impl IntoIterator<Item = (f64, GrowthSymbol)>) -> Self {
        let mut terms: Vec<(f64, GrowthSymbol)> = terms.into_iter().collect();
        terms.sort_by_key(|t| core::cmp::Reverse(t.1));
        let mut merged: Vec<(f64, GrowthSymbol)> = Vec::with_capacity(terms.len());
        for (rho, g) in terms {
            match merged.last_mut() {
                Some(last) if last.1 == g => last.0 += rho,
                _ => merged.push((rho, g)),
            }
        }
        merged.retain(|t| t.0 != 0.0);
        Self { constant: clean(constant), terms: merged }
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &[(f64, GrowthSymbol)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.terms.is_empty()
    }

    /// True when there are no decaying terms.
    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = GrowthSymbol> + '_ {
        self.terms.iter().map(|t| t.1)
    }

    pub fn evaluate(&self, n: u64) -> Result<f64> {
        if n < MIN_EVAL_N {
            return Err(Error::Domain { n, min: MIN_EVAL_N });
        }
        Ok(self.eval_at(n as f64))
    }

    /// Evaluation at a real point; callers guarantee `x >= 16`.
    pub fn eval_at(&self, x: f64) -> f64 {
        let mut acc = crate::numeric::CompensatedSum::new();
        acc.add(self.constant);
        for (rho, g) in &self.terms {
            acc.add(rho / g.eval(x));
        }
        acc.total()
    }

    pub fn scale(&self, lambda: f64) -> Self {
        if lambda == 0.0 {
            return Self::zero();
        }
        Self::new(self.constant * lambda, self.terms.iter().map(|&(r, g)| (r * lambda, g)))
    }

    pub fn asymptotic_class(&self) -> AsymptoticClass {
        if self.constant != 0.0 {
            AsymptoticClass {
                kind: AsymptoticKind::NonzeroLimit,
                sign: Sign::of(self.constant),
                scale: ExponentTriple::ZERO,
                scalar: self.constant,
            }
        } else if let Some(&(rho, g)) = self.terms.last() {
            AsymptoticClass { kind: AsymptoticKind::Decaying, sign: Sign::of(rho), scale: g.triple(), scalar: rho }
        } else {
            AsymptoticClass { kind: AsymptoticKind::Zero, sign: Sign::Zero, scale: ExponentTriple::ZERO, scalar: 0.0 }
        }
    }

    /// Total order on normal forms; `Equal` iff the coefficients are equal.
    pub fn structural_cmp(&self, other: &Self) -> Ordering {
        self.constant.total_cmp(&other.constant).then_with(|| {
            let mut a = self.terms.iter();
            let mut b = other.terms.iter();
            loop {
                match (a.next(), b.next()) {
                    (None, None) => return Ordering::Equal,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(_), None) => return Ordering::Greater,
                    (Some(x), Some(y)) => {
                        let o = x.1.cmp(&y.1).then_with(|| x.0.total_cmp(&y.0));
                        if o != Ordering::Equal {
                            return o;
                        }
                    }
                }
            }
        })
    }

    /// `Some(c)` with `other ≈ c·self` (relative tolerance `rel_tol` per
    /// scalar), `None` if the two are not proportional or `self` is zero.
    pub fn proportional_factor(&self, other: &Self, rel_tol: f64) -> Option<f64> {
        if self.is_zero() || self.terms.len() != other.terms.len() || (self.constant == 0.0) != (other.constant == 0.0) {
            return None;
        }
        let reference = if self.constant != 0.0 {
            self.constant
        } else {
            self.terms[0].0
        };
        let target = if other.constant != 0.0 {
            other.constant
        } else {
            other.terms[0].0
        };
        let c = target / reference;
        let close = |x: f64, y: f64| libm::fabs(x - y) <= rel_tol * libm::fmax(libm::fabs(x), libm::fabs(y));
        if self.constant != 0.0 && !close(self.constant * c, other.constant) {
            return None;
        }
        for (a, b) in self.terms.iter().zip(&other.terms) {
            if a.1 != b.1 || !close(a.0 * c, b.0) {
                return None;
            }
        }
        Some(c)
    }
}

impl Add for &HardyCoefficient {
    type Output = HardyCoefficient;
    fn add(self, o: &HardyCoefficient) -> HardyCoefficient {
        HardyCoefficient::new(self.constant + o.constant, self.terms.iter().chain(&o.terms).copied())
    }
}

impl Sub for &HardyCoefficient {
    type Output = HardyCoefficient;
    fn sub(self, o: &HardyCoefficient) -> HardyCoefficient {
        HardyCoefficient::new(
            self.constant - o.constant,
            self.terms.iter().copied().chain(o.terms.iter().map(|&(r, g)| (-r, g))),
        )
    }
}

impl Neg for &HardyCoefficient {
    type Output = HardyCoefficient;
    fn neg(self) -> HardyCoefficient {
        self.scale(-1.0)
    }
}

fn fmt_real(x: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{x}")
}

impl HardyCoefficient {
    /// Items of the displayed sum: `(value, Option<symbol>)`.
    fn items(&self) -> impl Iterator<Item = (f64, Option<GrowthSymbol>)> + '_ {
        let c = (self.constant != 0.0).then_some((self.constant, None));
        c.into_iter().chain(self.terms.iter().map(|&(r, g)| (r, Some(g))))
    }

    pub(crate) fn item_count(&self) -> usize {
        usize::from(self.constant != 0.0) + self.terms.len()
    }

    pub(crate) fn fmt_item(value: f64, g: Option<GrowthSymbol>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_real(value, f)?;
        if let Some(g) = g {
            if g.factor_count() > 1 {
                write!(f, "/({g})")
            } else {
                write!(f, "/{g}")
            }
        } else {
            Ok(())
        }
    }

    /// Sum of items without surrounding parentheses, `a + b - c`.
    pub(crate) fn fmt_sum(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (v, g)) in self.items().enumerate() {
            if k == 0 {
                Self::fmt_item(v, g, f)?;
            } else if v < 0.0 {
                f.write_str(" - ")?;
                Self::fmt_item(-v, g, f)?;
            } else {
                f.write_str(" + ")?;
                Self::fmt_item(v, g, f)?;
            }
        }
        Ok(())
    }
}

/// DSL form: a bare item (`2.5`, `-31/logN^1`) or a parenthesized sum.
impl fmt::Display for HardyCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.item_count() <= 1 {
            self.fmt_sum(f)
        } else {
            f.write_str("(")?;
            self.fmt_sum(f)?;
            f.write_str(")")
        }
    }
}

pub fn linear_combine(scalars: &[f64], coeffs: &[HardyCoefficient]) -> Result<HardyCoefficient> {
    if scalars.len() != coeffs.len() {
        return Err(Error::LengthMismatch { expected: scalars.len(), found: coeffs.len() });
    }
    if scalars.is_empty() {
        return Err(Error::EmptyInput("linear combination"));
    }
    let constant = {
        let mut s = crate::numeric::CompensatedSum::new();
        s.extend(scalars.iter().zip(coeffs).map(|(l, c)| l * c.constant));
        s.total()
    };
    let terms = scalars.iter().zip(coeffs).flat_map(|(&l, c)| c.terms.iter().map(move |&(r, g)| (l * r, g)));
    Ok(HardyCoefficient::new(constant, terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymptoticKind {
    Zero,
    NonzeroLimit,
    Decaying,
}

/// Dominant behaviour: the coefficient is `∼ scalar / g_scale` (with the
/// zero triple standing for a nonzero limit).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticClass {
    pub kind: AsymptoticKind,
    pub sign: Sign,
    pub scale: ExponentTriple,
    pub scalar: f64,
}

/// Asymptotic verdicts on `num(N) / den(N)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioReport {
    pub bounded: bool,
    pub eventual_sign: Sign,
    pub tends_to_zero: bool,
    /// `|ratio|·N → ∞`
    pub abs_times_n_to_infinity: bool,
    /// Leading multiplier `ρ/σ`.
    pub scalar: f64,
    /// `ratio ∼ scalar / g` with `g` of this triple; `None` for the zero ratio.
    pub equivalent_scale: Option<ExponentTriple>,
}

pub fn ratio_class(num: &HardyCoefficient, den: &HardyCoefficient) -> Result<RatioReport> {
    let dc = den.asymptotic_class();
    if dc.kind == AsymptoticKind::Zero {
        return Err(Error::ZeroDenominator);
    }
    let nc = num.asymptotic_class();
    if nc.kind == AsymptoticKind::Zero {
        return Ok(RatioReport {
            bounded: true,
            eventual_sign: Sign::Zero,
            tends_to_zero: true,
            abs_times_n_to_infinity: false,
            scalar: 0.0,
            equivalent_scale: None,
        });
    }
    let scale = nc.scale - dc.scale;
    let scalar = nc.scalar / dc.scalar;
    Ok(RatioReport {
        bounded: scale >= ExponentTriple::ZERO,
        eventual_sign: Sign::of(scalar),
        tends_to_zero: scale > ExponentTriple::ZERO,
        abs_times_n_to_infinity: ExponentTriple::LINEAR - scale > ExponentTriple::ZERO,
        scalar,
        equivalent_scale: Some(scale),
    })
}

impl AsymptoticClass {
    pub fn is_negative(&self) -> bool {
        self.sign == Sign::Negative
    }
}

/// Absolute value of an exponent (helper for display of scales).
pub fn exponent_abs(e: Exponent) -> Exponent {
    e.abs()
}
