use ergopet_core::coeffalg::{compare_growth, linear_combine, ratio_class, GrowthOrder, GrowthSymbol, HardyCoefficient};
use ergopet_core::polyfam::{PolynomialFamily, ShiftAssignment, ShiftSym, VariablePolynomial};
use proptest::prelude::*;

fn symbol() -> impl Strategy<Value = GrowthSymbol> {
    (1i64..10, 0i64..3, 0i64..2).prop_map(|(g, d, e)| {
        GrowthSymbol::new((g, 10).into(), (d, 2).into(), (e, 1).into()).unwrap()
    })
}

fn coefficient() -> impl Strategy<Value = HardyCoefficient> {
    (-3.0f64..3.0, prop::collection::vec((-5.0f64..5.0, symbol()), 0..4))
        .prop_map(|(c, terms)| HardyCoefficient::new(c, terms))
}

fn polynomial() -> impl Strategy<Value = VariablePolynomial> {
    prop::collection::vec(coefficient(), 1..4).prop_map(VariablePolynomial::from_hardy)
}

proptest! {
    #[test]
    fn growth_order_matches_numeric_ratio(a in symbol(), b in symbol()) {
        let r = |x: f64| a.eval(x) / b.eval(x);
        match compare_growth(&a, &b) {
            GrowthOrder::Precedes => prop_assert!(r(1e300) < r(1e200)),
            GrowthOrder::Dominates => prop_assert!(r(1e300) > r(1e200)),
            GrowthOrder::Equivalent => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn normal_form_is_sorted_and_sparse(c in coefficient()) {
        let terms = c.terms();
        prop_assert!(terms.iter().all(|(rho, _)| *rho != 0.0));
        prop_assert!(terms.windows(2).all(|w| w[0].1 > w[1].1));
    }

    #[test]
    fn linear_combine_is_pointwise(x in coefficient(), y in coefficient(), s in -4.0f64..4.0, t in -4.0f64..4.0) {
        let z = linear_combine(&[s, t], &[x.clone(), y.clone()]).unwrap();
        for n in [16u64, 1000, 123_456] {
            let expect = s * x.evaluate(n).unwrap() + t * y.evaluate(n).unwrap();
            let got = z.evaluate(n).unwrap();
            prop_assert!((got - expect).abs() <= 1e-9 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn self_ratio_is_bounded_with_positive_sign(c in coefficient()) {
        prop_assume!(!c.is_zero());
        let r = ratio_class(&c, &c).unwrap();
        prop_assert!(r.bounded);
        prop_assert!(!r.tends_to_zero);
    }

    #[test]
    fn shift_agrees_with_translation(p in polynomial(), h in -20i64..20, n in 1i64..500) {
        let sym = ShiftSym(1);
        let shifted = p.shift(sym);
        let mut at = ShiftAssignment::new();
        at.insert(sym, h);
        let big_n = 10_000u64;
        let lhs = shifted.prepare(big_n, &at).unwrap().value(n);
        let rhs = p.prepare(big_n, &ShiftAssignment::new()).unwrap().value(n + h);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn p_prime_is_an_involution(ps in prop::collection::vec(polynomial(), 1..4), pick in 0usize..4) {
        let fam = PolynomialFamily::new(ps).unwrap();
        let i0 = pick % fam.len();
        let back = fam.p_prime(i0).unwrap().p_prime(i0).unwrap();
        for (a, b) in fam.members().iter().zip(back.members()) {
            let (pa, pb) = (a.prepare(1000, &ShiftAssignment::new()).unwrap(), b.prepare(1000, &ShiftAssignment::new()).unwrap());
            for n in [1i64, 7, 99] {
                prop_assert!((pa.value(n) - pb.value(n)).abs() <= 1e-9 * (1.0 + pa.value(n).abs()));
            }
        }
    }
}
