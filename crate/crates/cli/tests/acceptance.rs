//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::cmp::Ordering;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ergopet::dsl::{parse_coefficients, parse_family, parse_polynomial};
use ergopet::parallel::{self, Chunked};
use ergopet_core::coeffalg::{GrowthSymbol, HardyCoefficient};
use ergopet_core::combinatorics::{recurrence_average, MeasurableSet};
use ergopet_core::dynsys::{base_point_panel, exact_average, hk_seminorm, Gaussian, Iterates, Observable, System};
use ergopet_core::equidist::{
    decays, default_lambda_grid, geometric_bound, goodness_probe_with, smoothness_norm, Convention, GoodnessOptions,
    DEFAULT_ALPHAS, DEFAULT_NS,
};
use ergopet_core::pet::{pet_reduce_with, type_of, PetOptions};
use ergopet_core::polyfam::{essential_distinctness_report, ExtendedCoefficient, PolynomialFamily, VariablePolynomial};
use ergopet_core::rprop::{has_rk, is_super_nice, Case, CoefficientSequence, RkCertificate, SuperNiceVerdict};
use ergopet_core::Complex64;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn family(src: &str) -> PolynomialFamily {
    parse_family(src).unwrap()
}

fn linear_pair() -> PolynomialFamily {
    family("1/N^0.3*n; 1/N^0.6*n")
}

fn root_monomials(ell: usize) -> PolynomialFamily {
    let members: Vec<String> = (1..=ell).map(|k| format!("1/N^0.5*n^{k}")).collect();
    family(&members.join("; "))
}

fn goodness_one() -> Verdict {
    let fam = linear_pair();
    let lambdas = default_lambda_grid(2);
    let grid_ok = lambdas.len() == 16
        && lambdas.contains(&vec![1.0, 0.0])
        && lambdas.contains(&vec![0.0, 1.0])
        && lambdas.contains(&vec![1.0, -1.0]);
    let opts = GoodnessOptions { threshold: 0.02, ..GoodnessOptions::default() };
    let report = goodness_probe_with(&fam, &DEFAULT_ALPHAS, &DEFAULT_NS, &lambdas, &opts, &Chunked).unwrap();
    // Oracle: a degree-one combination c·n has |(1/N)Σ e^{icαn}| ≤ 2/(N|1 − e^{icα}|).
    let mut above_bound = 0;
    for row in &report.rows {
        let n = row.n as f64;
        let c = row.lambda[0] / n.powf(0.3) + row.lambda[1] / n.powf(0.6);
        let bound = geometric_bound(c, row.alpha, row.n, Convention::Unit);
        if row.magnitude > bound * (1.0 + 1e-9) {
            above_bound += 1;
        }
    }
    let worst = report.verdicts.iter().map(|v| v.final_magnitude).fold(0.0, f64::max);
    verdict(
        grid_ok && report.passes() && above_bound == 0,
        format!(
            "{} combinations, worst |S| at N=1e6 {worst:.2e} (< 0.02), envelope ok: {}, rows above geometric bound: {above_bound}",
            report.verdicts.len(),
            report.passes()
        ),
    )
}

fn goodness_two() -> Verdict {
    let lambdas = default_lambda_grid(3);
    let report =
        goodness_probe_with(&root_monomials(3), &DEFAULT_ALPHAS, &DEFAULT_NS, &lambdas, &GoodnessOptions::default(), &Chunked)
            .unwrap();
    let worst = report.verdicts.iter().map(|v| v.final_magnitude).fold(0.0, f64::max);
    let ok = lambdas.len() == 16 && report.verdicts.iter().all(|v| !v.degenerate && v.final_magnitude < 0.05);
    verdict(ok, format!("{} combinations, worst |S| at N=1e6 {worst:.2e} (< 0.05)", report.verdicts.len()))
}

fn certificate_one() -> Verdict {
    let seqs: Vec<CoefficientSequence> =
        parse_coefficients("1/N^0.3; 1/N^0.6").unwrap().into_iter().map(CoefficientSequence::Symbolic).collect();
    let out = has_rk(&seqs);
    let Some(RkCertificate::Node { choices, .. }) = &out.certificate else {
        return verdict(false, format!("no case-tree certificate: {:?}", out.verdict));
    };
    let got: Vec<(usize, Case, usize)> = choices.iter().map(|c| (c.i + 1, c.case, c.j0 + 1)).collect();
    let ok = got == [(1, Case::A, 2), (2, Case::B, 1)];
    let text = out.certificate.as_ref().unwrap().to_text().replace('\n', " | ");
    verdict(ok, format!("certificate: {text}"))
}

/// `ρ / N^{1/2}` with `ρ/2` rational of small denominator.
fn is_multiple_of_two_over_root(c: &HardyCoefficient) -> bool {
    let root = GrowthSymbol::power(1, 2).unwrap();
    c.constant_term() == 0.0
        && matches!(c.terms(), [(rho, g)] if *g == root && (1..=64).any(|q| {
            let x = rho / 2.0 * q as f64;
            x == x.round()
        }))
}

fn super_nice() -> Verdict {
    let monomials = is_super_nice(&root_monomials(2)).unwrap();
    let multiples = family("1/N^0.5*n^2; 2/N^0.5*n^2; 3/N^0.5*n^2");
    let rep = is_super_nice(&multiples).unwrap();
    let samples = rep.branches.iter().map(|b| b.samples.len()).min().unwrap_or(0);
    let mut leaders = 0;
    let mut structural = true;
    for b in &rep.branches {
        for lead in &b.trace.leading_coefficients {
            for (_, c) in lead.monomials() {
                leaders += 1;
                structural &= is_multiple_of_two_over_root(c);
            }
        }
    }
    let ok = monomials.verdict == SuperNiceVerdict::SuperNice && rep.verdict == SuperNiceVerdict::SuperNice && samples == 3 && structural;
    verdict(
        ok,
        format!(
            "(n/N^0.5, n^2/N^0.5): {}; (p,2p,3p): {} over {} branches x {samples} h-samples; {leaders} leader monomials, all rational multiples of 2/N^0.5: {structural}",
            monomials.verdict,
            rep.verdict,
            rep.branches.len()
        ),
    )
}

fn random_family(rng: &mut ChaCha8Rng) -> PolynomialFamily {
    loop {
        let ell = rng.gen_range(1..=3);
        let members: Vec<VariablePolynomial> = (0..ell)
            .map(|_| {
                let degree = rng.gen_range(1..=3);
                let mut rho = rng.gen_range(1..=3) as f64;
                if rng.gen_bool(0.5) {
                    rho = -rho;
                }
                let exponent = rng.gen_range(1..=9);
                let c = HardyCoefficient::reciprocal(rho, GrowthSymbol::power(exponent, 10).unwrap());
                VariablePolynomial::monomial(c, degree)
            })
            .collect();
        let Ok(fam) = PolynomialFamily::new(members) else { continue };
        if essential_distinctness_report(&fam).passes() {
            return fam;
        }
    }
}

/// Nonconstant members with pairwise nonconstant differences: no two members
/// share all coefficients of `n^j`, `j ≥ 1`.
fn property_i(fam: &PolynomialFamily) -> bool {
    let mut tails: Vec<&[ExtendedCoefficient]> = fam.members().iter().map(|m| m.coeffs().get(1..).unwrap_or(&[])).collect();
    let cmp = |a: &[ExtendedCoefficient], b: &[ExtendedCoefficient]| {
        a.len().cmp(&b.len()).then_with(|| a.iter().zip(b).map(|(x, y)| x.structural_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal))
    };
    tails.sort_by(|a, b| cmp(a, b));
    tails.iter().all(|t| !t.is_empty()) && tails.windows(2).all(|w| cmp(w[0], w[1]).is_ne())
}

fn pet_mechanics() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    // The member cap bounds memory; it stops traces that the step bound has not yet ruled out.
    let opts = PetOptions { max_steps: 64, max_members: 4096 };
    let (mut terminated, mut decreasing, mut distinct) = (0, true, true);
    let (mut over_steps, mut over_members) = (Vec::new(), Vec::new());
    for _ in 0..50 {
        let fam = random_family(&mut rng);
        match pet_reduce_with(&fam, &opts) {
            Ok(trace) => {
                terminated += 1;
                for s in &trace.steps {
                    decreasing &= s.type_after < s.type_before;
                    distinct &= property_i(&s.family_after);
                }
            }
            Err(e) if e.to_string().contains("members") => over_members.push(type_of(&fam).unwrap().to_string()),
            Err(_) => over_steps.push(type_of(&fam).unwrap().to_string()),
        }
    }
    let list = |v: &mut Vec<String>| {
        v.sort();
        v.dedup();
        if v.is_empty() {
            "none".to_string()
        } else {
            v.join(" ")
        }
    };
    verdict(
        terminated == 50 && decreasing && distinct,
        format!(
            "{terminated}/50 traces terminate within 64 steps; type decreases at every recorded step: {decreasing}; (i) kept: {distinct}; \
             {} need more than 64 steps (types {}); {} outgrew 4096 members (types {})",
            over_steps.len(),
            list(&mut over_steps.clone()),
            over_members.len(),
            list(&mut over_members.clone())
        ),
    )
}

fn rotation_averages() -> Verdict {
    let sys = System::rotation(vec![2f64.sqrt() - 1.0]);
    let fs = [Observable::character(vec![1]), Observable::character(vec![-1])];
    let it = Iterates::Family(linear_pair());
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for x in base_point_panel(&sys, 10, 0) {
        let errs: Vec<f64> = DEFAULT_NS.iter().map(|&n| parallel::average(&sys, &it, &fs, &x, n).unwrap().norm()).collect();
        worst = worst.max(errs[2]);
        ok &= errs[2] < 0.05 && decays(&errs, 0.05);
    }
    verdict(ok, format!("10 base points, worst |average - 0| at N=1e6 {worst:.2e} (< 0.05), envelope decreasing: {ok}"))
}

fn mean_convergence() -> Verdict {
    let sys = System::SkewTorus { alpha: 2f64.sqrt() };
    let e_y = |k: i64| Observable::trig(vec![(vec![0, k], Complex64::new(1.0, 0.0))]).unwrap();
    let fs = [e_y(1), e_y(-1)];
    let lhs = Iterates::Multiples { p: parse_polynomial("1/N^0.5*n^2").unwrap(), ell: 2 };
    let rhs = Iterates::Linear { ell: 2 };
    let n = 1_000_000;
    let mut worst: f64 = 0.0;
    for x in base_point_panel(&sys, 10, 0) {
        let l = parallel::average(&sys, &lhs, &fs, &x, n).unwrap();
        let r = parallel::average(&sys, &rhs, &fs, &x, n).unwrap();
        worst = worst.max((l - r).norm());
    }
    verdict(worst < 0.05, format!("10 base points, worst |LHS - RHS| at N=1e6 {worst:.2e} (< 0.05)"))
}

fn half(m: u64) -> MeasurableSet {
    MeasurableSet::residues((0..m / 2).collect())
}

fn recurrence() -> Verdict {
    let z4 = recurrence_average(&System::cyclic(4).unwrap(), &MeasurableSet::residues(vec![0, 1]), &Iterates::Linear { ell: 1 }, 4)
        .unwrap();
    let quarter = z4.exact.is_some_and(|(a, b)| 4 * a == b) && brute_recurrence(4, &[0, 1], &|n| vec![n], 4) == (4, 16);
    let z64 = recurrence_average(&System::cyclic(64).unwrap(), &half(64), &Iterates::Linear { ell: 2 }, 10_000).unwrap();
    let z128 = recurrence_average(&System::cyclic(128).unwrap(), &half(128), &Iterates::Family(root_monomials(2)), 10_000).unwrap();
    verdict(
        quarter && z64.value >= 0.125 && z128.value > 0.0,
        format!(
            "Z4: {:?} (= 1/4: {quarter}); Z64 half, l=2: {:.4} (>= 0.125); Z128 half, (n/N^0.5, n^2/N^0.5): {:.4} (> 0)",
            z4.exact, z64.value, z128.value
        ),
    )
}

fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    (0..m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn seminorms() -> Verdict {
    let f = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
    let z2 = (hk_seminorm(2, &f, 1).unwrap(), hk_seminorm(2, &f, 2).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut monotone, mut invariant, mut homogeneous) = (true, true, true);
    for _ in 0..100 {
        let f = random_vector(&mut rng, 16);
        let norms: Vec<f64> = (1..=3).map(|k| hk_seminorm(16, &f, k).unwrap()).collect();
        monotone &= norms.windows(2).all(|w| w[0] <= w[1] + 1e-9);
        let mut shifted = f.clone();
        shifted.rotate_left(rng.gen_range(1..16));
        let c = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let scaled: Vec<Complex64> = f.iter().map(|z| z * c).collect();
        for k in 1..=3u32 {
            let v = norms[k as usize - 1];
            invariant &= (hk_seminorm(16, &shifted, k).unwrap() - v).abs() <= 1e-9;
            homogeneous &= (hk_seminorm(16, &scaled, k).unwrap() - c.norm() * v).abs() <= 1e-9;
        }
    }
    verdict(
        z2 == (0.0, 1.0) && monotone && invariant && homogeneous,
        format!("Z2 (|f|_1, |f|_2) = {z2:?}; 100 vectors on Z16: monotone {monotone}, shift invariant {invariant}, homogeneous {homogeneous}"),
    )
}

fn smoothness() -> Verdict {
    let got = [
        smoothness_norm(&[0.3, 0.6], 10).unwrap(),
        smoothness_norm(&[3.0, -2.0, 7.0], 12345).unwrap(),
        smoothness_norm(&[0.5], 4).unwrap(),
    ];
    verdict(got == [40.0, 0.0, 2.0], format!("{got:?}"))
}

/// Floors of `n^k / s` for `n^k/N^0.5` at `N = s²`, in integer arithmetic.
fn root_monomial_floors(s: i64, ell: usize) -> impl Fn(i64) -> Vec<i64> {
    move |n| (1..=ell as u32).map(|k| n.pow(k).div_euclid(s)).collect()
}

fn brute_average(m: u64, a: &dyn Fn(i64) -> Vec<i64>, fs: &[Vec<Gaussian>], x: u64, n_window: u64) -> (Gaussian, u64) {
    let mut sum = Gaussian::default();
    for n in 1..=n_window as i64 {
        let mut prod = Gaussian::ONE;
        for (f, shift) in fs.iter().zip(a(n)) {
            prod = prod * f[(x as i64 + shift).rem_euclid(m as i64) as usize];
        }
        sum = sum + prod;
    }
    (sum, n_window)
}

fn brute_recurrence(m: u64, set: &[u64], a: &dyn Fn(i64) -> Vec<i64>, n_window: u64) -> (u128, u128) {
    let inside = |y: i64| set.contains(&(y.rem_euclid(m as i64) as u64));
    let mut count = 0u128;
    for n in 1..=n_window as i64 {
        let shifts = a(n);
        count += (0..m as i64).filter(|&x| inside(x) && shifts.iter().all(|&s| inside(x + s))).count() as u128;
    }
    (count, n_window as u128 * m as u128)
}

fn oracle_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for &m in &[2u64, 5, 16, 64] {
        for &s in &[10i64, 50, 100] {
            let n_window = (s * s) as u64;
            let ell = 2;
            let fs: Vec<Vec<Gaussian>> = (0..ell)
                .map(|_| (0..m).map(|_| Gaussian::new(rng.gen_range(-3..=3), rng.gen_range(-3..=3))).collect())
                .collect();
            let x = rng.gen_range(0..m);
            let set: Vec<u64> = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
            let set = if set.is_empty() { vec![0] } else { set };
            let floors = root_monomial_floors(s, ell);
            let linear = |n: i64| vec![n, 2 * n];
            let sys = System::cyclic(m).unwrap();
            let runs: [(&str, Iterates, &dyn Fn(i64) -> Vec<i64>); 2] =
                [("multiple", Iterates::Family(root_monomials(ell)), &floors), ("furstenberg", Iterates::Linear { ell }, &linear)];
            for (label, it, oracle) in runs {
                cases += 2;
                let got = exact_average(m, &it, &fs, x, n_window).unwrap();
                if (got.sum, got.count) != brute_average(m, oracle, &fs, x, n_window) {
                    mismatches.push(format!("{label} M={m} N={n_window}"));
                }
                let rec = recurrence_average(&sys, &MeasurableSet::residues(set.clone()), &it, n_window).unwrap();
                let (a, b) = brute_recurrence(m, &set, oracle, n_window);
                if !rec.exact.is_some_and(|(p, q)| p * b == a * q) || rec.value != a as f64 / b as f64 {
                    mismatches.push(format!("recurrence/{label} M={m} N={n_window}"));
                }
            }
        }
    }
    verdict(
        mismatches.is_empty(),
        format!(
            "{cases} exact comparisons (M <= 64, N <= 1e4); mismatches: {}",
            if mismatches.is_empty() { "none".into() } else { mismatches.join(", ") }
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("goodness of (n/N^0.3, n/N^0.6)", goodness_one),
        ("goodness of (n^k/N^0.5), k <= 3", goodness_two),
        ("R_2 certificate of (1/N^0.3, 1/N^0.6)", certificate_one),
        ("super-niceness", super_nice),
        ("PET mechanics on random families", pet_mechanics),
        ("multiple averages on a rotation", rotation_averages),
        ("mean convergence on the skew torus", mean_convergence),
        ("recurrence on Z_M", recurrence),
        ("seminorms on Z_M", seminorms),
        ("smoothness norm", smoothness),
        ("oracle equivalence in exact mode", oracle_equivalence),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let label = if v.ok { "PASS" } else { "FAIL" };
        failed += usize::from(!v.ok);
        println!("criterion {:>2} {label} {name} [{:.1}s]: {}", k + 1, start.elapsed().as_secs_f64(), v.detail);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
