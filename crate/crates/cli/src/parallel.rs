//! Chunked parallel summation.
//!
//! The `n` range is cut into fixed-size chunks whose compensated partial sums
//! are merged in chunk order, so results do not depend on the thread count.

use rayon::prelude::*;

use ergopet_core::dynsys::{average_sum_range, prepare_average, Iterates, Observable, Point, System};
use ergopet_core::equidist::{phase_coefficients, phase_sum_range, Convention, SweepEvaluator};
use ergopet_core::numeric::ComplexSum;
use ergopet_core::polyfam::{ShiftAssignment, VariablePolynomial};
use ergopet_core::{Complex64, Result};

pub const CHUNK: i64 = 1 << 16;

fn chunks(start: i64, end: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut a = start;
    while a < end {
        let b = (a + CHUNK).min(end);
        out.push((a, b));
        a = b;
    }
    out
}

fn merge(parts: Vec<ComplexSum>) -> ComplexSum {
    let mut acc = ComplexSum::new();
    for p in &parts {
        acc.merge(p);
    }
    acc
}

/// Exponential sums evaluated chunk-parallel.
pub struct Chunked;

impl SweepEvaluator for Chunked {
    fn magnitude(&self, p: &VariablePolynomial, n: u64, alpha: f64, convention: Convention) -> Result<f64> {
        let prepared = p.prepare(n, &ShiftAssignment::new())?;
        let betas = phase_coefficients(&prepared.coeffs, alpha, convention);
        let parts: Vec<ComplexSum> =
            chunks(1, n as i64 + 1).into_par_iter().map(|(a, b)| phase_sum_range(&betas, a, b)).collect();
        Ok((merge(parts).total() / n as f64).norm())
    }
}

/// `(1/N) Σ_n Π_i f_i(T^{a_i(n)} x)`, chunk-parallel.
pub fn average(sys: &System, iterates: &Iterates, fs: &[Observable], x: &Point, n_window: u64) -> Result<Complex64> {
    let prepared = prepare_average(sys, iterates, fs, x, n_window)?;
    let parts: Vec<ComplexSum> = chunks(1, n_window as i64 + 1)
        .into_par_iter()
        .map(|(a, b)| average_sum_range(sys, &prepared, fs, x, a, b))
        .collect();
    Ok(merge(parts).total() / n_window as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ergopet_core::dynsys::average_along;

    #[test]
    fn chunking_matches_sequential() {
        let sys = System::rotation(vec![2f64.sqrt() - 1.0]);
        let fs = [Observable::character(vec![1]), Observable::character(vec![-2])];
        let x = Point::Torus(vec![0.3]);
        let it = Iterates::Linear { ell: 2 };
        let n = 3 * CHUNK as u64 + 17;
        let a = average(&sys, &it, &fs, &x, n).unwrap();
        let b = average_along(&sys, &it, &fs, &x, n).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}
