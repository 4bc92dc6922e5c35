//! Type vectors, the van der Corput operation and PET reduction.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::polyfam::{essential_distinctness_report, ExtendedCoefficient, PolynomialFamily, ShiftSym, VariablePolynomial};
use crate::{Error, Result};

/// `(d, w_d, …, w_1)`, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVector {
    pub degree: usize,
    /// `counts[0] = w_d`, …, `counts[d-1] = w_1`.
    pub counts: Vec<usize>,
}

impl TypeVector {
    /// `w_i` for `1 <= i <= d`.
    pub fn weight(&self, i: usize) -> usize {
        if i == 0 || i > self.degree {
            0
        } else {
            self.counts[self.degree - i]
        }
    }
}

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.degree)?;
        for w in &self.counts {
            write!(f, ",{w}")?;
        }
        f.write_str(")")
    }
}

fn sort_distinct(mut cs: Vec<&ExtendedCoefficient>) -> Vec<&ExtendedCoefficient> {
    cs.sort_by(|a, b| a.structural_cmp(b));
    cs.dedup_by(|a, b| a.structural_cmp(b) == Ordering::Equal);
    cs
}

pub fn type_of(family: &PolynomialFamily) -> Result<TypeVector> {
    let members = family.members();
    let mut degree = 0;
    for (i, m) in members.iter().enumerate() {
        match m.degree() {
            Some(d) if d >= 1 => degree = degree.max(d),
            _ => return Err(Error::ConstantMember(i)),
        }
    }
    let mut counts = Vec::with_capacity(degree);
    for i in (1..=degree).rev() {
        let leads = members.iter().filter(|m| m.degree() == Some(i)).filter_map(|m| m.leading()).collect();
        counts.push(sort_distinct(leads).len());
    }
    Ok(TypeVector { degree, counts })
}

/// `{p_i(t+h) − p(t)} ∪ {p_i(t) − p(t)}` with `p = members[index]`, minus
/// the members of degree ≤ 0, with degree-1 members of equal leading
/// coefficient grouped into the first of them.
pub fn vdc_step(family: &PolynomialFamily, index: usize, h: ShiftSym) -> Result<PolynomialFamily> {
    let members = family.members();
    let p = members.get(index).ok_or(Error::InvalidIndex { index, len: members.len() })?;
    if !p.is_nonconstant() {
        return Err(Error::ConstantMember(index));
    }
    let shifted = members.iter().map(|q| q.shift(h).sub(p));
    let unshifted = members.iter().map(|q| q.sub(p));
    let mut out: Vec<VariablePolynomial> = Vec::with_capacity(2 * members.len());
    let mut linear_leads: Vec<ExtendedCoefficient> = Vec::new();
    for q in shifted.chain(unshifted) {
        match q.degree() {
            None | Some(0) => continue,
            Some(1) => {
                let lead = q.coeff(1);
                let seen = linear_leads.binary_search_by(|c| c.structural_cmp(&lead));
                match seen {
                    Ok(_) => continue,
                    Err(pos) => linear_leads.insert(pos, lead),
                }
                out.push(q);
            }
            Some(_) => out.push(q),
        }
    }
    let mut registry = family.registry().clone();
    registry.insert(h);
    PolynomialFamily::with_registry(out, registry)
}

/// Limits guarding against the exponential growth of PET families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PetOptions {
    pub max_steps: usize,
    pub max_members: usize,
}

impl Default for PetOptions {
    fn default() -> Self {
        Self { max_steps: 4096, max_members: 20_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionStep {
    /// 0-based index into `family_before`.
    pub chosen_index: usize,
    pub shift: ShiftSym,
    pub family_before: PolynomialFamily,
    pub family_after: PolynomialFamily,
    pub type_before: TypeVector,
    pub type_after: TypeVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub final_family: PolynomialFamily,
    pub leading_coefficients: Vec<ExtendedCoefficient>,
    pub k: usize,
}

pub fn pet_reduce(family: &PolynomialFamily) -> Result<ReductionTrace> {
    pet_reduce_with(family, &PetOptions::default())
}

pub fn pet_reduce_with(family: &PolynomialFamily, opts: &PetOptions) -> Result<ReductionTrace> {
    let report = essential_distinctness_report(family);
    if let Some(reason) = report.failure() {
        return Err(Error::NotEssentiallyDistinct(reason));
    }
    let mut current = family.clone();
    let mut ty = type_of(&current)?;
    let mut steps = Vec::new();
    while ty.degree > 1 {
        if steps.len() >= opts.max_steps {
            return Err(Error::BudgetExceeded(format!("PET reduction exceeded {} steps at type {ty}", opts.max_steps)));
        }
        // Each linear choice removes exactly one degree-1 class.
        let needed = steps.len() + ty.weight(1) + 1;
        if needed > opts.max_steps {
            return Err(Error::BudgetExceeded(format!(
                "PET reduction needs at least {needed} steps at type {ty}, limit {}",
                opts.max_steps
            )));
        }
        let min_degree = current.members().iter().filter_map(|m| m.degree()).min().unwrap_or(0);
        let h = current.fresh_shift();
        let candidates: Vec<usize> = (0..current.len()).filter(|&i| current.members()[i].degree() == Some(min_degree)).collect();
        let mut chosen = None;
        for i in candidates {
            let next = vdc_step(&current, i, h)?;
            if next.len() > opts.max_members {
                return Err(Error::BudgetExceeded(format!(
                    "PET family grew to {} members at step {}",
                    next.len(),
                    steps.len() + 1
                )));
            }
            let next_ty = type_of(&next)?;
            if next_ty < ty {
                chosen = Some((i, next, next_ty));
                break;
            }
        }
        let Some((i, next, next_ty)) = chosen else {
            return Err(Error::NoTypeReduction { step: steps.len() + 1, family: format!("{current}") });
        };
        steps.push(ReductionStep {
            chosen_index: i,
            shift: h,
            family_before: current,
            family_after: next.clone(),
            type_before: ty,
            type_after: next_ty.clone(),
        });
        current = next;
        ty = next_ty;
    }
    let leading_coefficients: Vec<ExtendedCoefficient> = current.members().iter().map(|m| m.coeff(1)).collect();
    let k = leading_coefficients.len();
    Ok(ReductionTrace { steps, final_family: current, leading_coefficients, k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffalg::{GrowthSymbol, HardyCoefficient};
    use crate::polyfam::{ShiftPowers, ShiftAssignment};
    use alloc::vec;

    fn a() -> HardyCoefficient {
        HardyCoefficient::reciprocal(1.0, GrowthSymbol::power(1, 2).unwrap())
    }

    fn mono(c: HardyCoefficient, d: usize) -> VariablePolynomial {
        VariablePolynomial::monomial(c, d)
    }

    fn one() -> HardyCoefficient {
        HardyCoefficient::constant(1.0)
    }

    fn fam(ms: Vec<VariablePolynomial>) -> PolynomialFamily {
        PolynomialFamily::new(ms).unwrap()
    }

    fn tv(degree: usize, counts: &[usize]) -> TypeVector {
        TypeVector { degree, counts: counts.to_vec() }
    }

    #[test]
    fn type_examples() {
        let f = fam(vec![mono(a(), 2), mono(a().scale(2.0), 2), mono(a(), 1)]);
        assert_eq!(type_of(&f).unwrap(), tv(2, &[2, 1]));
        assert_eq!(type_of(&fam(vec![mono(one(), 1)])).unwrap(), tv(1, &[1]));
        let g = fam(vec![mono(one(), 3), mono(one(), 3).add(&mono(one(), 2))]);
        assert_eq!(type_of(&g).unwrap(), tv(3, &[1, 0, 0]));
        assert!(tv(2, &[1, 0]) < tv(2, &[1, 1]));
        assert!(tv(1, &[40]) < tv(2, &[1, 0]));
        let c = fam(vec![VariablePolynomial::from_hardy([one()])]);
        assert_eq!(type_of(&c), Err(Error::ConstantMember(0)));
    }

    #[test]
    fn vdc_single_quadratic() {
        let h = ShiftSym(1);
        let out = vdc_step(&fam(vec![mono(a(), 2)]), 0, h).unwrap();
        assert_eq!(out.len(), 1);
        let m = &out.members()[0];
        assert_eq!(m.coeff(1), ExtendedCoefficient::monomial(a().scale(2.0), ShiftPowers::single(h, 1)));
        assert_eq!(m.coeff(0), ExtendedCoefficient::monomial(a(), ShiftPowers::single(h, 2)));
    }

    #[test]
    fn vdc_lowers_type_with_linear_choice() {
        let f = fam(vec![mono(one(), 2), mono(one(), 1)]);
        let out = vdc_step(&f, 1, ShiftSym(1)).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(type_of(&f).unwrap(), tv(2, &[1, 1]));
        assert_eq!(type_of(&out).unwrap(), tv(2, &[1, 0]));
        let h = ShiftSym(1);
        let first = &out.members()[0];
        let expect_lin = ExtendedCoefficient::from_monomials([
            (ShiftPowers::single(h, 1), one().scale(2.0)),
            (ShiftPowers::one(), one().scale(-1.0)),
        ]);
        assert_eq!(first.coeff(1), expect_lin);
        assert_eq!(first.coeff(0), ExtendedCoefficient::monomial(one(), ShiftPowers::single(h, 2)));
        assert_eq!(out.members()[1], mono(one(), 2).sub(&mono(one(), 1)));
    }

    #[test]
    fn vdc_linear_pair_keeps_difference() {
        let g3 = HardyCoefficient::reciprocal(1.0, GrowthSymbol::power(3, 10).unwrap());
        let g6 = HardyCoefficient::reciprocal(1.0, GrowthSymbol::power(3, 5).unwrap());
        let f = fam(vec![mono(g3.clone(), 1), mono(g6.clone(), 1)]);
        let out = vdc_step(&f, 0, ShiftSym(1)).unwrap();
        assert_eq!(out.len(), 1);
        let m = &out.members()[0];
        assert_eq!(m.coeff(1), ExtendedCoefficient::from(&g6 - &g3));
        assert_eq!(m.coeff(0), ExtendedCoefficient::monomial(g6, ShiftPowers::single(ShiftSym(1), 1)));
    }

    #[test]
    fn vdc_transformed_pair_matches_hand_expansion() {
        // (a n² + b n, a n² + a n) with a = 1/N^0.5, b = 1/N^0.3
        let b = HardyCoefficient::reciprocal(1.0, GrowthSymbol::power(3, 10).unwrap());
        let p1 = mono(a(), 2).add(&mono(b.clone(), 1));
        let p2 = mono(a(), 2).add(&mono(a(), 1));
        let out = vdc_step(&fam(vec![p1, p2]), 0, ShiftSym(1)).unwrap();
        let h = ShiftPowers::single(ShiftSym(1), 1);
        let leads: Vec<_> = out.members().iter().map(|m| m.coeff(1)).collect();
        assert_eq!(
            leads,
            vec![
                ExtendedCoefficient::monomial(a().scale(2.0), h.clone()),
                ExtendedCoefficient::from_monomials([(h, a().scale(2.0)), (ShiftPowers::one(), &a() - &b)]),
                ExtendedCoefficient::from(&a() - &b),
            ]
        );
    }

    #[test]
    fn pet_on_linear_family_is_a_no_op() {
        let g3 = HardyCoefficient::reciprocal(1.0, GrowthSymbol::power(3, 10).unwrap());
        let g6 = HardyCoefficient::reciprocal(1.0, GrowthSymbol::power(3, 5).unwrap());
        let t = pet_reduce(&fam(vec![mono(g3.clone(), 1), mono(g6.clone(), 1)])).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.k, 2);
        assert_eq!(t.leading_coefficients, vec![g3.into(), g6.into()]);
    }

    #[test]
    fn pet_single_quadratic() {
        let t = pet_reduce(&fam(vec![mono(a(), 2)])).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.k, 1);
        assert_eq!(t.leading_coefficients[0], ExtendedCoefficient::monomial(a().scale(2.0), ShiftPowers::single(ShiftSym(1), 1)));
    }

    #[test]
    fn pet_multiples_have_multiples_of_twice_lead() {
        let p = mono(a(), 2);
        let t = pet_reduce(&fam(vec![p.clone(), p.scale(2.0)])).unwrap();
        for w in t.steps.windows(1) {
            assert!(w[0].type_after < w[0].type_before);
        }
        for lead in &t.leading_coefficients {
            for (_, c) in lead.monomials() {
                assert_eq!(c.constant_term(), 0.0);
                let (rho, g) = c.terms()[0];
                assert_eq!(g, GrowthSymbol::power(1, 2).unwrap());
                assert_eq!((rho / 2.0).fract(), 0.0);
            }
        }
        let shifts: ShiftAssignment = [(ShiftSym(1), 7), (ShiftSym(2), 13), (ShiftSym(3), 29)].into_iter().collect();
        for lead in &t.leading_coefficients {
            assert!(!lead.instantiate(&shifts).unwrap().is_zero());
        }
    }

    #[test]
    fn pet_rejects_non_distinct_family() {
        let p = mono(a(), 2);
        assert!(matches!(pet_reduce(&fam(vec![p.clone(), p])), Err(Error::NotEssentiallyDistinct(_))));
    }
}
