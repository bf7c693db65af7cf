//! Dense reference computations for tests and benchmarks.

use std::collections::BTreeSet;

use num_complex::Complex;
use num_traits::Zero;

use crate::dft::{Signal, SparseVector};
use crate::{lit, SfftFloat};

/// Quadratic-time DFT straight from the defining sums (orthonormal
/// convention); the independence oracle for the fast transforms.
pub fn dft_direct<T: SfftFloat>(values: &[Complex<T>], inverse: bool) -> Vec<Complex<T>> {
    let n = values.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let scale = T::one() / lit::<T>(n as f64).sqrt();
    (0..n)
        .map(|f| {
            let mut acc = Complex::<T>::zero();
            for (i, v) in values.iter().enumerate() {
                let angle = lit::<T>(sign * 2.0)
                    * T::PI()
                    * lit::<T>((i as u64 * f as u64 % n as u64) as f64)
                    / lit::<T>(n as f64);
                acc += *v * Complex::from_polar(T::one(), angle);
            }
            acc * scale
        })
        .collect()
}

/// Ground-truth quantities of a time-domain signal at sparsity `k`:
/// best `k`-sparse approximation error, per-coordinate noise level, the
/// head set, and the top-`k` projection. Magnitude ties at the `k`-th
/// largest break toward the lower index.
#[derive(Debug, Clone)]
pub struct GroundTruth<T> {
    pub k: usize,
    pub err_k: T,
    pub mu: T,
    /// `{ i : |x_i| > mu }`.
    pub head_set: BTreeSet<usize>,
    pub top_k: SparseVector<T>,
}

pub fn compute_ground_truth<T: SfftFloat>(x: &Signal<T>, k: usize) -> GroundTruth<T> {
    let n = x.n();
    let k = k.min(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        x.values[b]
            .norm()
            .partial_cmp(&x.values[a].norm())
            .expect("non-NaN magnitudes")
            .then(a.cmp(&b))
    });
    let top: Vec<usize> = order[..k].to_vec();
    let tail_sq: T = order[k..]
        .iter()
        .map(|&i| x.values[i].norm_sqr())
        .fold(T::zero(), |a, b| a + b);
    let err_k = tail_sq.sqrt();
    let mu = if k == 0 {
        T::zero()
    } else {
        err_k / lit::<T>(k as f64).sqrt()
    };
    let head_set: BTreeSet<usize> = (0..n).filter(|&i| x.values[i].norm() > mu).collect();
    let top_k = SparseVector::from_pairs(n, top.iter().map(|&i| (i, x.values[i])));
    GroundTruth {
        k,
        err_k,
        mu,
        head_set,
        top_k,
    }
}

/// Recovery error of an estimate: `absolute = ||x - chi||_2`, and when
/// `err_k > 0` also the squared ratio against the best `k`-sparse error.
#[derive(Debug, Clone, Copy)]
pub struct L2L2Error<T> {
    pub absolute: T,
    pub relative_sq: Option<T>,
}

pub fn l2l2_error<T: SfftFloat>(x: &Signal<T>, chi: &SparseVector<T>, k: usize) -> L2L2Error<T> {
    let gt = compute_ground_truth(x, k);
    let mut diff_sq = T::zero();
    for (i, v) in x.values.iter().enumerate() {
        diff_sq += (*v - chi.get(i)).norm_sqr();
    }
    let absolute = diff_sq.sqrt();
    let relative_sq = if gt.err_k > T::zero() {
        Some(diff_sq / (gt.err_k * gt.err_k))
    } else {
        None
    };
    L2L2Error {
        absolute,
        relative_sq,
    }
}
