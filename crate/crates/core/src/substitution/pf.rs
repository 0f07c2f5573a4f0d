use std::cmp::Ordering;

use num_bigint::BigInt;
use serde::Serialize;

use super::system::SubstitutionSystem;
use crate::error::{Error, Result};
use crate::exactnum::{QuadRational, Rational};

/// Perron–Frobenius data of a primitive substitution.
#[derive(Clone, Debug, Serialize)]
pub struct PFData {
    pub inflation: f64,
    /// Lengths normalized so that the first letter has length 1.
    pub lengths: Vec<f64>,
    /// Letter frequencies summing to 1.
    pub frequencies: Vec<f64>,
    #[serde(skip)]
    pub exact: Option<ExactPF>,
}

/// Exact eigen-data in `ℚ(√2)` (which includes the rational case).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPF {
    pub inflation: QuadRational,
    pub lengths: Vec<QuadRational>,
    pub frequencies: Vec<QuadRational>,
}

const TOL: f64 = 1e-12;
const MAX_ITER: usize = 100_000;

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Power iteration from the all-ones vector; returns `(λ, v)` with `‖v‖₁ = 1`.
pub fn power_iteration(m: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let n = m.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda = 0.0;
    for _ in 0..MAX_ITER {
        let w = mat_vec(m, &v);
        let s: f64 = w.iter().sum();
        lambda = s;
        let w: Vec<f64> = w.iter().map(|x| x / s).collect();
        let diff: f64 = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = w;
        if diff < TOL * 1e-2 {
            break;
        }
    }
    (lambda, v)
}

fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

/// Residual `‖Mv − λv‖_∞`.
pub fn eigen_residual(m: &[Vec<f64>], lambda: f64, v: &[f64]) -> f64 {
    mat_vec(m, v).iter().zip(v).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max)
}

/// Perron–Frobenius data; rejects non-primitive systems.
pub fn pf_data(s: &SubstitutionSystem) -> Result<PFData> {
    if !s.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let m: Vec<Vec<f64>> = s.matrix().iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let (lambda, freq) = power_iteration(&m);
    let (_, left) = power_iteration(&transpose(&m));
    let lengths: Vec<f64> = left.iter().map(|x| x / left[0]).collect();
    let exact = exact_pf(s, lambda);
    let (inflation, lengths, frequencies) = match &exact {
        Some(e) => (
            e.inflation.to_f64(),
            e.lengths.iter().map(QuadRational::to_f64).collect(),
            e.frequencies.iter().map(QuadRational::to_f64).collect(),
        ),
        None => (lambda, lengths, freq),
    };
    Ok(PFData { inflation, lengths, frequencies, exact })
}

fn quad_matrix(s: &SubstitutionSystem, lambda: &QuadRational, transpose: bool) -> Vec<Vec<QuadRational>> {
    let m = s.matrix();
    let n = m.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = if transpose { m[j][i] } else { m[i][j] };
                    let q = QuadRational::from_rational(Rational::from_integer(BigInt::from(x)));
                    if i == j {
                        &q - lambda
                    } else {
                        q
                    }
                })
                .collect()
        })
        .collect()
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(a: &mut [Vec<QuadRational>]) -> Vec<usize> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("nonzero pivot");
        for j in 0..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[i][j] = &a[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// A basis vector of the kernel when it is one-dimensional.
fn kernel_vector(mut a: Vec<Vec<QuadRational>>) -> Option<Vec<QuadRational>> {
    let n = a.len();
    let pivots = rref(&mut a);
    if pivots.len() + 1 != n {
        return None;
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut v = vec![QuadRational::zero(); n];
    v[free] = QuadRational::one();
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -&a[row][free];
    }
    Some(v)
}

fn candidates(lambda: f64) -> Vec<QuadRational> {
    let half = |k: i64| Rational::new(BigInt::from(k), BigInt::from(2));
    let mut out = vec![QuadRational::from_rational(Rational::from_integer(BigInt::from(lambda.round() as i64)))];
    for b2 in 1..=400i64 {
        for sign in [1, -1] {
            let b = sign * b2;
            let a2 = (2.0 * (lambda - b as f64 / 2.0 * std::f64::consts::SQRT_2)).round() as i64;
            let q = QuadRational::new(half(a2), half(b));
            if (q.to_f64() - lambda).abs() < 1e-6 {
                out.push(q);
            }
        }
    }
    out
}

/// Exact PF data when the inflation lies in `ℚ(√2)`.
pub fn exact_pf(s: &SubstitutionSystem, lambda: f64) -> Option<ExactPF> {
    for cand in candidates(lambda) {
        let Some(right) = kernel_vector(quad_matrix(s, &cand, false)) else { continue };
        let left = kernel_vector(quad_matrix(s, &cand, true))?;
        let total = right.iter().fold(QuadRational::zero(), |acc, x| &acc + x);
        let frequencies: Vec<QuadRational> = right.iter().map(|x| x.div(&total)).collect::<Option<_>>()?;
        let lengths: Vec<QuadRational> = left.iter().map(|x| x.div(&left[0])).collect::<Option<_>>()?;
        let positive = |v: &[QuadRational]| v.iter().all(|x| x.signum() == Ordering::Greater);
        if positive(&frequencies) && positive(&lengths) {
            return Some(ExactPF { inflation: cand, lengths, frequencies });
        }
    }
    None
}
