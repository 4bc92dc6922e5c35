//! Recurrence averages and the arithmetic-configuration finder.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dynsys::{Iterates, PreparedIterates, System};
use crate::numeric;
use crate::{Error, Result};

/// A set of positive measure in one of the shipped systems.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasurableSet {
    /// Residues in `Z_M` (sorted, distinct).
    Residues(Vec<u64>),
    /// The arc `[start, start + length)` mod 1 on the circle.
    Arc { start: f64, length: f64 },
}

impl MeasurableSet {
    pub fn residues(mut values: Vec<u64>) -> Self {
        values.sort_unstable();
        values.dedup();
        MeasurableSet::Residues(values)
    }
}

/// Outcome of [`recurrence_average`].
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceReport {
    pub value: f64,
    /// `(numerator, denominator)` when computed with integer arithmetic.
    pub exact: Option<(u128, u128)>,
    pub measure: f64,
    /// `μ(A)^{ℓ+1}`.
    pub lower_bound: f64,
}

/// Half-open sub-intervals of `[0, 1)`.
fn arc_intervals(start: f64, length: f64) -> Vec<(f64, f64)> {
    if length >= 1.0 {
        return vec![(0.0, 1.0)];
    }
    let s = numeric::frac(start);
    let e = s + length;
    if e <= 1.0 {
        vec![(s, e)]
    } else {
        vec![(s, 1.0), (0.0, e - 1.0)]
    }
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if hi > lo {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// `(1/N) Σ_{n=1}^{N} μ(A ∩ T^{−a_1(n)}A ∩ … ∩ T^{−a_ℓ(n)}A)`.
///
/// Exact on `Z_M`; on a circle rotation the arcs are intersected directly.
pub fn recurrence_average(sys: &System, set: &MeasurableSet, iterates: &Iterates, n_window: u64) -> Result<RecurrenceReport> {
    if n_window == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let ell = iterates.len();
    let prepared = prepare(iterates, n_window)?;
    let mut a = vec![0i64; ell];
    match (sys, set) {
        (System::CyclicShift { modulus }, MeasurableSet::Residues(r)) => {
            let m = *modulus;
            if r.iter().any(|&x| x >= m) {
                return Err(Error::SpaceMismatch(format!("residue outside Z_{m}")));
            }
            if r.is_empty() {
                return Err(Error::ZeroMeasure);
            }
            let mut member = vec![false; m as usize];
            for &x in r {
                member[x as usize] = true;
            }
            let mut total: u128 = 0;
            for n in 1..=n_window as i64 {
                prepared.fill(n, &mut a);
                let shifts: Vec<usize> = a.iter().map(|&s| (s as i128).rem_euclid(m as i128) as usize).collect();
                let count = r
                    .iter()
                    .filter(|&&x| shifts.iter().all(|&s| member[(x as usize + s) % m as usize]))
                    .count();
                total += count as u128;
            }
            let den = n_window as u128 * m as u128;
            let measure = r.len() as f64 / m as f64;
            Ok(RecurrenceReport {
                value: total as f64 / den as f64,
                exact: Some((total, den)),
                measure,
                lower_bound: libm::pow(measure, ell as f64 + 1.0),
            })
        }
        (System::TorusRotation { alpha, .. }, MeasurableSet::Arc { start, length }) if alpha.len() == 1 => {
            if *length <= 0.0 {
                return Err(Error::ZeroMeasure);
            }
            let base = arc_intervals(*start, *length);
            let mut acc = numeric::CompensatedSum::new();
            for n in 1..=n_window as i64 {
                prepared.fill(n, &mut a);
                let mut cur = base.clone();
                for &s in &a {
                    // T^{-s}A = A − sα
                    let shift = numeric::frac_mul(alpha[0], s as i128);
                    cur = intersect(&cur, &arc_intervals(*start - shift, *length));
                    if cur.is_empty() {
                        break;
                    }
                }
                acc.add(cur.iter().map(|(lo, hi)| hi - lo).sum());
            }
            let measure = length.min(1.0);
            Ok(RecurrenceReport {
                value: acc.total() / n_window as f64,
                exact: None,
                measure,
                lower_bound: libm::pow(measure, ell as f64 + 1.0),
            })
        }
        _ => Err(Error::SpaceMismatch("sets are residues on Z_M or arcs on the circle".into())),
    }
}

fn prepare(iterates: &Iterates, n_window: u64) -> Result<PreparedIterates> {
    if n_window < crate::coeffalg::MIN_EVAL_N && !matches!(iterates, Iterates::Linear { .. }) {
        return Err(Error::Domain { n: n_window, min: crate::coeffalg::MIN_EVAL_N });
    }
    iterates.prepare(n_window.max(crate::coeffalg::MIN_EVAL_N))
}

/// Sorted distinct positive integers bounded by `bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSet {
    elements: Vec<u64>,
    bound: u64,
}

impl IntegerSet {
    pub fn new(mut elements: Vec<u64>, bound: u64) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.first() == Some(&0) {
            return Err(Error::InvalidArgument("elements must be positive".into()));
        }
        if elements.last().is_some_and(|&x| x > bound) {
            return Err(Error::InvalidArgument(format!("element exceeds bound {bound}")));
        }
        Ok(Self { elements, bound })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn contains(&self, x: i128) -> bool {
        x > 0 && x <= u64::MAX as i128 && self.elements.binary_search(&(x as u64)).is_ok()
    }

    /// `|E| / M`, the finite stand-in for upper density.
    pub fn density(&self) -> f64 {
        if self.bound == 0 {
            0.0
        } else {
            self.elements.len() as f64 / self.bound as f64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub n_window_min: u64,
    pub n_window_max: u64,
    /// Largest starting point `m` tried.
    pub m_max: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Progression {
    pub n_window: u64,
    pub n: u64,
    pub m: u64,
    /// The floored iterates `a_i(n)`.
    pub values: Vec<i64>,
    /// `m, m + a_1(n), …, m + a_ℓ(n)`.
    pub elements: Vec<i128>,
}

/// First `(N, n, m)` in lexicographic order with every `a_i(n) ≠ 0` and
/// `{m, m + a_1(n), …} ⊆ E`.
pub fn find_progression(set: &IntegerSet, iterates: &Iterates, bounds: &SearchBounds) -> Result<Option<Progression>> {
    if bounds.n_window_min == 0 || bounds.m_max == 0 || bounds.n_window_max < bounds.n_window_min {
        return Err(Error::InvalidArgument("search bounds must be positive and ordered".into()));
    }
    let ell = iterates.len();
    let mut a = vec![0i64; ell];
    let starts: Vec<u64> = set.elements().iter().copied().take_while(|&m| m <= bounds.m_max).collect();
    if starts.is_empty() {
        return Ok(None);
    }
    let lo = match iterates {
        Iterates::Linear { .. } => bounds.n_window_min,
        _ => bounds.n_window_min.max(crate::coeffalg::MIN_EVAL_N),
    };
    for n_window in lo..=bounds.n_window_max {
        let prepared = iterates.prepare(n_window.max(crate::coeffalg::MIN_EVAL_N))?;
        for n in 1..=n_window {
            prepared.fill(n as i64, &mut a);
            if a.contains(&0) {
                continue;
            }
            for &m in &starts {
                if a.iter().all(|&v| set.contains(m as i128 + v as i128)) {
                    let mut elements = vec![m as i128];
                    elements.extend(a.iter().map(|&v| m as i128 + v as i128));
                    return Ok(Some(Progression { n_window, n, m, values: a.clone(), elements }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffalg::{GrowthSymbol, HardyCoefficient};
    use crate::polyfam::{PolynomialFamily, VariablePolynomial};

    fn root_poly(power: usize) -> VariablePolynomial {
        VariablePolynomial::monomial(HardyCoefficient::reciprocal(1.0, GrowthSymbol::power(1, 2).unwrap()), power)
    }

    #[test]
    fn z4_diagonal_is_a_quarter() {
        let sys = System::cyclic(4).unwrap();
        let r = recurrence_average(&sys, &MeasurableSet::residues(vec![0, 1]), &Iterates::Linear { ell: 1 }, 4).unwrap();
        assert_eq!(r.exact, Some((4, 16)));
        assert_eq!(r.value, 0.25);
        assert_eq!(r.lower_bound, 0.25);
    }

    #[test]
    fn whole_space_gives_one() {
        let sys = System::cyclic(7).unwrap();
        let r = recurrence_average(&sys, &MeasurableSet::residues((0..7).collect()), &Iterates::Linear { ell: 3 }, 50).unwrap();
        assert_eq!(r.value, 1.0);
        let rot = System::rotation(vec![core::f64::consts::SQRT_2 - 1.0]);
        let arc = MeasurableSet::Arc { start: 0.0, length: 1.0 };
        let r = recurrence_average(&rot, &arc, &Iterates::Linear { ell: 2 }, 100).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn furstenberg_bound_on_z64() {
        let sys = System::cyclic(64).unwrap();
        let r = recurrence_average(&sys, &MeasurableSet::residues((0..32).collect()), &Iterates::Linear { ell: 2 }, 64).unwrap();
        assert!(r.value >= 0.125);
    }

    #[test]
    fn empty_set_is_rejected() {
        let sys = System::cyclic(4).unwrap();
        assert_eq!(recurrence_average(&sys, &MeasurableSet::residues(vec![]), &Iterates::Linear { ell: 1 }, 4), Err(Error::ZeroMeasure));
    }

    #[test]
    fn progression_in_even_numbers() {
        let evens = IntegerSet::new((1..=50).map(|k| 2 * k).collect(), 100).unwrap();
        let fam = Iterates::Family(PolynomialFamily::new(vec![root_poly(1)]).unwrap());
        let bounds = SearchBounds { n_window_min: 100, n_window_max: 100, m_max: 100 };
        let p = find_progression(&evens, &fam, &bounds).unwrap().unwrap();
        assert_eq!((p.n_window, p.n, p.m), (100, 20, 2));
        assert_eq!(p.elements, vec![2, 4]);
    }

    #[test]
    fn singleton_has_no_progression() {
        let one = IntegerSet::new(vec![1], 1).unwrap();
        let fam = Iterates::Family(PolynomialFamily::new(vec![root_poly(1), root_poly(2)]).unwrap());
        let bounds = SearchBounds { n_window_min: 16, n_window_max: 40, m_max: 1 };
        assert_eq!(find_progression(&one, &fam, &bounds).unwrap(), None);
    }
}
