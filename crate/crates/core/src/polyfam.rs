//! Variable polynomials `p_N(n) = Σ_j a_{j,N} n^j` and ordered families of them.
//!
//! Coefficients are [`ExtendedCoefficient`]s: polynomials in symbolic shift
//! parameters `h₁, h₂, …` with [`HardyCoefficient`] coefficients. Families
//! handed in by users carry no shifts; the van der Corput step introduces them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use nalgebra::DMatrix;

use crate::coeffalg::{GrowthSymbol, HardyCoefficient};
use crate::numeric;
use crate::{Error, Result};

/// Symbolic shift parameter `h_k` (displayed `hk`, 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftSym(pub u32);

impl fmt::Display for ShiftSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}", self.0)
    }
}

/// Concrete integer values for shift symbols.
pub type ShiftAssignment = BTreeMap<ShiftSym, i64>;

/// A monomial `h_a^e_a · h_b^e_b ⋯` with no zero exponents, sorted by symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftPowers(Vec<(ShiftSym, u32)>);

impl ShiftPowers {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn new(powers: impl IntoIterator<Item = (ShiftSym, u32)>) -> Self {
        let mut map: BTreeMap<ShiftSym, u32> = BTreeMap::new();
        for (h, e) in powers {
            *map.entry(h).or_default() += e;
        }
        Self(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn single(h: ShiftSym, e: u32) -> Self {
        Self::new([(h, e)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn powers(&self) -> &[(ShiftSym, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.0.iter().chain(&other.0).copied())
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    /// `Π h^e` at the given values, as a float.
    pub fn value(&self, shifts: &ShiftAssignment) -> Result<f64> {
        let mut v = 1.0;
        for &(h, e) in &self.0 {
            let x = *shifts.get(&h).ok_or(Error::UnboundShift(h))?;
            v *= libm::pow(x as f64, e as f64);
        }
        Ok(v)
    }
}

impl fmt::Display for ShiftPowers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &(h, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{h}")?;
            } else {
                write!(f, "{h}^{e}")?;
            }
        }
        Ok(())
    }
}

/// `Σ c_P · P` over shift monomials `P`, with no zero `c_P`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExtendedCoefficient {
    monomials: BTreeMap<ShiftPowers, HardyCoefficient>,
}

impl From<HardyCoefficient> for ExtendedCoefficient {
    fn from(c: HardyCoefficient) -> Self {
        Self::monomial(c, ShiftPowers::one())
    }
}

impl ExtendedCoefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: HardyCoefficient, powers: ShiftPowers) -> Self {
        let mut monomials = BTreeMap::new();
        if !c.is_zero() {
            monomials.insert(powers, c);
        }
        Self { monomials }
    }

    pub fn from_monomials(items: impl IntoIterator<Item = (ShiftPowers, HardyCoefficient)>) -> Self {
        let mut out = Self::zero();
        for (p, c) in items {
            out.add_monomial(p, &c);
        }
        out
    }

    fn add_monomial(&mut self, powers: ShiftPowers, c: &HardyCoefficient) {
        if c.is_zero() {
            return;
        }
        match self.monomials.get_mut(&powers) {
            Some(existing) => {
                let sum = &*existing + c;
                if sum.is_zero() {
                    self.monomials.remove(&powers);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.monomials.insert(powers, c.clone());
            }
        }
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&ShiftPowers, &HardyCoefficient)> {
        self.monomials.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    /// The plain coefficient when no shift symbol occurs.
    pub fn as_hardy(&self) -> Option<HardyCoefficient> {
        match self.monomials.len() {
            0 => Some(HardyCoefficient::zero()),
            1 => self.monomials.get(&ShiftPowers::one()).cloned(),
            _ => None,
        }
    }

    pub fn shifts(&self) -> BTreeSet<ShiftSym> {
        self.monomials.keys().flat_map(|p| p.0.iter().map(|x| x.0)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, c) in &other.monomials {
            out.add_monomial(p.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self::from_monomials(self.monomials.iter().map(|(p, c)| (p.clone(), c.scale(lambda))))
    }

    /// `self · lambda · P`.
    pub fn mul_term(&self, lambda: f64, powers: &ShiftPowers) -> Self {
        Self::from_monomials(self.monomials.iter().map(|(p, c)| (p.mul(powers), c.scale(lambda))))
    }

    /// Substitute integers for every shift symbol.
    pub fn instantiate(&self, shifts: &ShiftAssignment) -> Result<HardyCoefficient> {
        let mut acc = HardyCoefficient::zero();
        for (p, c) in &self.monomials {
            acc = &acc + &c.scale(p.value(shifts)?);
        }
        Ok(acc)
    }

    /// Substitute a subset of the symbols, keeping the rest symbolic.
    pub fn partially_instantiate(&self, shifts: &ShiftAssignment) -> Self {
        let mut out = Self::zero();
        for (p, c) in &self.monomials {
            let mut factor = 1.0;
            let mut rest = Vec::new();
            for &(h, e) in &p.0 {
                match shifts.get(&h) {
                    Some(&x) => factor *= libm::pow(x as f64, e as f64),
                    None => rest.push((h, e)),
                }
            }
            out.add_monomial(ShiftPowers(rest), &c.scale(factor));
        }
        out
    }

    pub fn evaluate(&self, n: u64, shifts: &ShiftAssignment) -> Result<f64> {
        let c = self.instantiate(shifts)?;
        c.evaluate(n)
    }

    /// Total order on normal forms; `Equal` iff structurally equal.
    pub fn structural_cmp(&self, other: &Self) -> Ordering {
        let mut a = self.monomials.iter();
        let mut b = other.monomials.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((pa, ca)), Some((pb, cb))) => {
                    let o = pa.cmp(pb).then_with(|| ca.structural_cmp(cb));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
            }
        }
    }

    /// `Some(c)` with `other = c · self` up to the relative tolerance.
    pub fn proportional_factor(&self, other: &Self, rel_tol: f64) -> Option<f64> {
        if self.monomials.len() != other.monomials.len() || self.is_zero() {
            return None;
        }
        let mut factor: Option<f64> = None;
        for ((pa, ca), (pb, cb)) in self.monomials.iter().zip(&other.monomials) {
            if pa != pb {
                return None;
            }
            let c = ca.proportional_factor(cb, rel_tol)?;
            match factor {
                None => factor = Some(c),
                Some(f0) => {
                    if libm::fabs(f0 - c) > rel_tol * libm::fmax(libm::fabs(f0), libm::fabs(c)) {
                        return None;
                    }
                }
            }
        }
        factor
    }
}

impl fmt::Display for ExtendedCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let write_mono = |f: &mut fmt::Formatter<'_>, p: &ShiftPowers, c: &HardyCoefficient| -> fmt::Result {
            if p.is_one() {
                write!(f, "{c}")
            } else {
                write!(f, "{c}*{p}")
            }
        };
        match self.monomials.len() {
            0 => f.write_str("0"),
            1 => {
                let (p, c) = self.monomials.iter().next().unwrap();
                write_mono(f, p, c)
            }
            _ => {
                f.write_str("(")?;
                for (k, (p, c)) in self.monomials.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" + ")?;
                    }
                    write_mono(f, p, c)?;
                }
                f.write_str(")")
            }
        }
    }
}

fn binomial(m: usize, j: usize) -> f64 {
    let mut v = 1.0;
    for t in 0..j {
        v = v * (m - t) as f64 / (t + 1) as f64;
    }
    libm::round(v)
}

/// `Σ_j coeffs[j] · n^j`, with trailing zero coefficients trimmed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VariablePolynomial {
    coeffs: Vec<ExtendedCoefficient>,
}

impl VariablePolynomial {
    pub fn new(coeffs: Vec<ExtendedCoefficient>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn from_hardy(coeffs: impl IntoIterator<Item = HardyCoefficient>) -> Self {
        Self::new(coeffs.into_iter().map(ExtendedCoefficient::from).collect())
    }

    /// `c · n^power`.
    pub fn monomial(c: HardyCoefficient, power: usize) -> Self {
        let mut coeffs = alloc::vec![ExtendedCoefficient::zero(); power + 1];
        coeffs[power] = c.into();
        Self::new(coeffs)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Some coefficient of `n^j` with `j ≥ 1` is nonzero.
    pub fn is_nonconstant(&self) -> bool {
        self.coeffs.len() > 1
    }

    pub fn coeffs(&self) -> &[ExtendedCoefficient] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> ExtendedCoefficient {
        self.coeffs.get(j).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&ExtendedCoefficient> {
        self.coeffs.last()
    }

    pub fn shifts(&self) -> BTreeSet<ShiftSym> {
        self.coeffs.iter().flat_map(|c| c.shifts()).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|j| self.coeff(j).add(&other.coeff(j))).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|j| self.coeff(j).sub(&other.coeff(j))).collect())
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.scale(lambda)).collect())
    }

    /// `q(n) = p(n + h)`.
    pub fn shift(&self, h: ShiftSym) -> Self {
        let d = self.coeffs.len();
        let mut out = alloc::vec![ExtendedCoefficient::zero(); d];
        for (m, c) in self.coeffs.iter().enumerate() {
            for (j, slot) in out.iter_mut().enumerate().take(m + 1) {
                let term = c.mul_term(binomial(m, j), &ShiftPowers::single(h, (m - j) as u32));
                *slot = slot.add(&term);
            }
        }
        Self::new(out)
    }

    pub fn instantiate(&self, shifts: &ShiftAssignment) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.instantiate(shifts).map(ExtendedCoefficient::from))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs))
    }

    /// Plain coefficients, failing if any shift symbol is present.
    pub fn hardy_coeffs(&self) -> Result<Vec<HardyCoefficient>> {
        self.coeffs.iter().map(|c| c.as_hardy().ok_or(Error::ShiftsPresent)).collect()
    }

    /// Coefficient values at `N` (shifts substituted).
    pub fn prepare(&self, n_window: u64, shifts: &ShiftAssignment) -> Result<PreparedPolynomial> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.evaluate(n_window, shifts))
            .collect::<Result<Vec<_>>>()?;
        Ok(PreparedPolynomial { coeffs })
    }

    /// `(p_N(n), ⌊p_N(n)⌋)`.
    pub fn eval_floor(&self, n_window: u64, n: i64, shifts: &ShiftAssignment) -> Result<(f64, i64)> {
        let p = self.prepare(n_window, shifts)?;
        Ok((p.value(n), p.floor(n)))
    }
}

impl fmt::Display for VariablePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*n")?,
                _ => write!(f, "{c}*n^{j}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// A polynomial with coefficients evaluated at one `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedPolynomial {
    pub coeffs: Vec<f64>,
}

impl PreparedPolynomial {
    #[inline]
    pub fn value(&self, n: i64) -> f64 {
        numeric::eval_poly(&self.coeffs, n as f64)
    }

    /// `⌊p(n)⌋` from the exact binary values of the coefficients.
    #[inline]
    pub fn floor(&self, n: i64) -> i64 {
        numeric::floor_poly(&self.coeffs, n)
    }
}

/// An ordered, nonempty tuple of variable polynomials with its shift registry.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialFamily {
    members: Vec<VariablePolynomial>,
    registry: BTreeSet<ShiftSym>,
}

impl PolynomialFamily {
    pub fn new(members: Vec<VariablePolynomial>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyInput("polynomial family"));
        }
        let registry = members.iter().flat_map(|m| m.shifts()).collect();
        Ok(Self { members, registry })
    }

    /// Family with an explicit registry (a superset of the symbols in use).
    pub fn with_registry(members: Vec<VariablePolynomial>, registry: BTreeSet<ShiftSym>) -> Result<Self> {
        let mut fam = Self::new(members)?;
        fam.registry.extend(registry);
        Ok(fam)
    }

    pub fn members(&self) -> &[VariablePolynomial] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn registry(&self) -> &BTreeSet<ShiftSym> {
        &self.registry
    }

    /// A symbol not yet in the registry.
    pub fn fresh_shift(&self) -> ShiftSym {
        ShiftSym(self.registry.iter().next_back().map_or(1, |h| h.0 + 1))
    }

    pub fn has_shifts(&self) -> bool {
        self.members.iter().any(|m| !m.shifts().is_empty())
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.members.iter().filter_map(|m| m.degree()).max()
    }

    pub fn instantiate(&self, shifts: &ShiftAssignment) -> Result<Self> {
        Self::new(self.members.iter().map(|m| m.instantiate(shifts)).collect::<Result<Vec<_>>>()?)
    }

    /// Replace `p_i` by `p_i − p_{i0}` for `i ≠ i0` and `p_{i0}` by `−p_{i0}`.
    pub fn p_prime(&self, i0: usize) -> Result<Self> {
        let base = self
            .members
            .get(i0)
            .ok_or(Error::InvalidIndex { index: i0, len: self.members.len() })?;
        let members = self
            .members
            .iter()
            .enumerate()
            .map(|(i, p)| if i == i0 { p.scale(-1.0) } else { p.sub(base) })
            .collect();
        Self::with_registry(members, self.registry.clone())
    }
}

impl fmt::Display for PolynomialFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, m) in self.members.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

/// `Σ λ_i p_i`.
pub fn combine(family: &PolynomialFamily, lambdas: &[f64]) -> Result<VariablePolynomial> {
    if lambdas.len() != family.len() {
        return Err(Error::LengthMismatch { expected: family.len(), found: lambdas.len() });
    }
    let maxlen = family.members.iter().map(|m| m.coeffs.len()).max().unwrap_or(0);
    let mut coeffs = Vec::with_capacity(maxlen);
    for j in 0..maxlen {
        let mut by_powers: BTreeMap<ShiftPowers, (Vec<f64>, Vec<HardyCoefficient>)> = BTreeMap::new();
        for (lambda, m) in lambdas.iter().zip(&family.members) {
            for (p, c) in m.coeff(j).monomials() {
                let e = by_powers.entry(p.clone()).or_default();
                e.0.push(*lambda);
                e.1.push(c.clone());
            }
        }
        let mut ext = ExtendedCoefficient::zero();
        for (p, (ls, cs)) in by_powers {
            let c = crate::coeffalg::linear_combine(&ls, &cs)?;
            ext.add_monomial(p, &c);
        }
        coeffs.push(ext);
    }
    Ok(VariablePolynomial::new(coeffs))
}

/// Relative singular-value cutoff used by [`is_strongly_independent`].
pub const RANK_CUTOFF: f64 = 1e-9;

/// Coordinates of the non-constant part: one column per (power ≥ 1, basis element).
pub fn coordinate_matrix(family: &PolynomialFamily) -> Result<DMatrix<f64>> {
    if family.has_shifts() {
        return Err(Error::ShiftsPresent);
    }
    let mut columns: BTreeMap<(usize, Option<GrowthSymbol>), usize> = BTreeMap::new();
    let rows: Vec<Vec<HardyCoefficient>> = family.members.iter().map(|m| m.hardy_coeffs()).collect::<Result<_>>()?;
    for row in &rows {
        for (j, c) in row.iter().enumerate().skip(1) {
            if c.constant_term() != 0.0 {
                columns.entry((j, None)).or_default();
            }
            for g in c.symbols() {
                columns.entry((j, Some(g))).or_default();
            }
        }
    }
    for (k, v) in columns.values_mut().enumerate() {
        *v = k;
    }
    let mut a = DMatrix::zeros(rows.len(), columns.len());
    for (r, row) in rows.iter().enumerate() {
        for (j, c) in row.iter().enumerate().skip(1) {
            if c.constant_term() != 0.0 {
                a[(r, columns[&(j, None)])] = c.constant_term();
            }
            for &(rho, g) in c.terms() {
                a[(r, columns[&(j, Some(g))])] = rho;
            }
        }
    }
    Ok(a)
}

/// Numerical rank with singular values below `cutoff · σ_max` discarded.
pub fn numerical_rank(a: &DMatrix<f64>, cutoff: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > cutoff * smax).count()
}

pub fn is_strongly_independent(family: &PolynomialFamily) -> Result<bool> {
    is_strongly_independent_with(family, RANK_CUTOFF)
}

pub fn is_strongly_independent_with(family: &PolynomialFamily, cutoff: f64) -> Result<bool> {
    let a = coordinate_matrix(family)?;
    Ok(numerical_rank(&a, cutoff) == family.len())
}

/// Outcome of the essential-distinctness check.
#[derive(Clone, Debug, PartialEq)]
pub struct DistinctnessReport {
    pub degrees: Vec<Option<usize>>,
    /// Indices (0-based) of constant members.
    pub constant_members: Vec<usize>,
    /// `(i, j, degree of p_i − p_j)` for `i < j`.
    pub differences: Vec<(usize, usize, Option<usize>)>,
}

impl DistinctnessReport {
    pub fn passes(&self) -> bool {
        self.constant_members.is_empty() && self.differences.iter().all(|d| d.2.is_some_and(|x| x >= 1))
    }

    /// Human-readable reason for failure, if any.
    pub fn failure(&self) -> Option<String> {
        if let Some(i) = self.constant_members.first() {
            return Some(alloc::format!("member {} is constant", i + 1));
        }
        self.differences
            .iter()
            .find(|d| !d.2.is_some_and(|x| x >= 1))
            .map(|d| alloc::format!("p{} - p{} is constant", d.0 + 1, d.1 + 1))
    }
}

pub fn essential_distinctness_report(family: &PolynomialFamily) -> DistinctnessReport {
    let m = &family.members;
    let degrees = m.iter().map(|p| p.degree()).collect();
    let constant_members = (0..m.len()).filter(|&i| !m[i].is_nonconstant()).collect();
    let mut differences = Vec::new();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            differences.push((i, j, m[i].sub(&m[j]).degree()));
        }
    }
    DistinctnessReport { degrees, constant_members, differences }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn xp(num: i64, den: i64) -> GrowthSymbol {
        GrowthSymbol::power(num, den).unwrap()
    }

    fn mono(rho: f64, g: GrowthSymbol, power: usize) -> VariablePolynomial {
        VariablePolynomial::monomial(HardyCoefficient::reciprocal(rho, g), power)
    }

    fn fam(ms: Vec<VariablePolynomial>) -> PolynomialFamily {
        PolynomialFamily::new(ms).unwrap()
    }

    #[test]
    fn eval_floor_worked_values() {
        let p = mono(1.0, xp(1, 2), 1);
        let none = ShiftAssignment::new();
        assert_eq!(p.eval_floor(100, 35, &none).unwrap(), (3.5, 3));
        assert_eq!(p.eval_floor(100, -35, &none).unwrap(), (-3.5, -4));
        let q = mono(1.0, xp(1, 2), 2);
        assert_eq!(q.eval_floor(100, 15, &none).unwrap(), (22.5, 22));
    }

    #[test]
    fn unbound_shift_is_reported() {
        let p = mono(1.0, xp(1, 2), 2).shift(ShiftSym(1));
        assert_eq!(p.eval_floor(100, 1, &ShiftAssignment::new()), Err(Error::UnboundShift(ShiftSym(1))));
    }

    #[test]
    fn shift_expands_binomially() {
        let a = HardyCoefficient::reciprocal(1.0, xp(1, 2));
        let h = ShiftSym(1);
        let q = VariablePolynomial::monomial(a.clone(), 2).shift(h);
        assert_eq!(q.degree(), Some(2));
        assert_eq!(q.coeff(2), ExtendedCoefficient::from(a.clone()));
        assert_eq!(q.coeff(1), ExtendedCoefficient::monomial(a.scale(2.0), ShiftPowers::single(h, 1)));
        assert_eq!(q.coeff(0), ExtendedCoefficient::monomial(a.clone(), ShiftPowers::single(h, 2)));
        let r = VariablePolynomial::monomial(a.clone(), 1).shift(h);
        assert_eq!(r.coeff(0), ExtendedCoefficient::monomial(a, ShiftPowers::single(h, 1)));

        let shifts: ShiftAssignment = [(h, 5)].into_iter().collect();
        let lhs = q.eval_floor(100, 7, &shifts).unwrap().0;
        let rhs = mono(1.0, xp(1, 2), 2).eval_floor(100, 12, &ShiftAssignment::new()).unwrap().0;
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn combine_examples() {
        let p = mono(1.0, xp(1, 2), 2);
        assert!(combine(&fam(vec![p.clone(), p.scale(2.0)]), &[2.0, -1.0]).unwrap().is_zero());
        let s = combine(&fam(vec![mono(1.0, xp(3, 10), 1), mono(1.0, xp(3, 5), 1)]), &[1.0, 1.0]).unwrap();
        assert_eq!(s.degree(), Some(1));
        let expected = HardyCoefficient::new(0.0, [(1.0, xp(3, 10)), (1.0, xp(3, 5))]);
        assert_eq!(s.coeff(1), expected.into());
        let n = VariablePolynomial::monomial(HardyCoefficient::constant(1.0), 1);
        let d = combine(&fam(vec![p.add(&n), p.clone()]), &[1.0, -1.0]).unwrap();
        assert_eq!(d, n);
        assert!(combine(&fam(vec![p]), &[1.0, 2.0]).is_err());
    }

    #[test]
    fn strong_independence_examples() {
        assert!(is_strongly_independent(&fam(vec![mono(1.0, xp(3, 10), 1), mono(1.0, xp(3, 5), 1)])).unwrap());
        let p = mono(1.0, xp(1, 2), 2);
        assert!(!is_strongly_independent(&fam(vec![p.clone(), p.scale(2.0)])).unwrap());

        let g1 = xp(1, 2);
        let g2 = xp(1, 3);
        let g3 = xp(1, 4);
        let g4 = GrowthSymbol::new(0.into(), 2.into(), 0.into()).unwrap();
        let g5 = GrowthSymbol::log_power(1, 1).unwrap();
        let p1 = VariablePolynomial::from_hardy([
            HardyCoefficient::constant(1.0),
            HardyCoefficient::reciprocal(-31.0, g5),
            HardyCoefficient::zero(),
            HardyCoefficient::new(0.0, [(core::f64::consts::SQRT_2, g3), (1.0, g4)]),
        ]);
        let p2 = mono(1.0, g3, 3);
        let p3 = VariablePolynomial::monomial(HardyCoefficient::new(0.0, [(libm::sqrt(3.0), g1), (-17.0, g2)]), 2);
        assert!(is_strongly_independent(&fam(vec![p1, p2, p3])).unwrap());

        let shifted = fam(vec![p.shift(ShiftSym(1))]);
        assert_eq!(is_strongly_independent(&shifted), Err(Error::ShiftsPresent));
    }

    #[test]
    fn essential_distinctness_examples() {
        let p = mono(1.0, xp(1, 2), 2);
        let r = essential_distinctness_report(&fam(vec![p.clone(), p.scale(2.0)]));
        assert!(r.passes());
        assert_eq!(r.degrees, vec![Some(2), Some(2)]);
        assert_eq!(r.differences, vec![(0, 1, Some(2))]);

        let q = mono(1.0, xp(3, 10), 1);
        assert!(!essential_distinctness_report(&fam(vec![q.clone(), q])).passes());

        let n = VariablePolynomial::monomial(HardyCoefficient::constant(1.0), 1);
        let r = essential_distinctness_report(&fam(vec![p.add(&n), p]));
        assert!(r.passes());
        assert_eq!(r.differences[0].2, Some(1));
    }

    #[test]
    fn p_prime_is_an_involution() {
        let p = mono(1.0, xp(1, 2), 2);
        let f = fam(vec![mono(1.0, xp(1, 2), 1), p]);
        assert_eq!(f.p_prime(1).unwrap().p_prime(1).unwrap(), f);
    }

    #[test]
    fn display_uses_dsl_layout() {
        let p = VariablePolynomial::from_hardy([
            HardyCoefficient::constant(1.0),
            HardyCoefficient::reciprocal(-31.0, GrowthSymbol::log_power(1, 1).unwrap()),
        ]);
        assert_eq!(alloc::format!("{p}"), "-31/logN^1*n + 1");
        let q = mono(1.0, xp(1, 2), 2).shift(ShiftSym(3));
        assert_eq!(alloc::format!("{q}"), "1/N^0.5*n^2 + 2/N^0.5*h3*n + 1/N^0.5*h3^2");
    }
}
