//! Exact evaluators for the per-coordinate error functionals.
//!
//! These are deliberately slow (`O(n |S|)` or worse) reference
//! computations used by the property and acceptance suites; the recovery
//! hot path never calls them.

use std::collections::BTreeSet;

use num_complex::Complex;
use num_traits::Zero;

use crate::dft::omega_pow;
use crate::hashing::Hashing;
use crate::{lit, Result, SfftError, SfftFloat};

/// The `ceil(f*s)`-th largest element: `quant^1` is the minimum,
/// `quant^{1/s}` the maximum.
pub fn quant<T: SfftFloat>(values: &[T], f: f64) -> Result<T> {
    if values.is_empty() {
        return Err(SfftError::EmptyInput("quant over empty list"));
    }
    if !(f > 0.0 && f <= 1.0) {
        return Err(SfftError::InvalidQuantile(f));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("non-NaN values"));
    let rank = (f * values.len() as f64).ceil() as usize;
    Ok(sorted[rank.clamp(1, values.len()) - 1])
}

/// Head-interference functional:
/// `e_head_i(H, x') = G_{o_i(i)}^{-1} * sum_{j in S\{i}} G_{o_i(j)} |x'_j|`.
pub fn e_head<T: SfftFloat>(
    i: usize,
    hashing: &Hashing<T>,
    x: &[Complex<T>],
    head: &BTreeSet<usize>,
) -> T {
    let gain = hashing.own_gain(i);
    let mut acc = T::zero();
    for &j in head {
        if j == i {
            continue;
        }
        acc += hashing.filter().eval_g(hashing.offset(i, j)) * x[j].norm();
    }
    acc / gain
}

/// Tail-noise functional at one evaluation point:
/// `e_tail_i(H, z, x) = |G_{o_i(i)}^{-1} * sum_{j notin S∪{i}} G_{o_i(j)} x_j omega^{z sigma (j-i)}|`.
pub fn e_tail<T: SfftFloat>(
    i: usize,
    hashing: &Hashing<T>,
    z: usize,
    x: &[Complex<T>],
    head: &BTreeSet<usize>,
) -> T {
    let n = hashing.n();
    let nq = n as u64;
    let sigma = hashing.perm().sigma() as u64;
    let zs = z as u64 % nq * sigma % nq;
    let mut acc = Complex::<T>::zero();
    for (j, xv) in x.iter().enumerate() {
        if j == i || head.contains(&j) || xv.is_zero() {
            continue;
        }
        let diff = (j as u64 + nq - i as u64) % nq;
        let phase = omega_pow::<T>(zs * diff % nq, n);
        acc += *xv * hashing.filter().eval_g(hashing.offset(i, j)) * phase;
    }
    (acc / hashing.own_gain(i)).norm()
}

/// Quantile form over several evaluation points for a fixed hashing:
/// `quant^{1/5}_z e_tail_i(H, z, x)`.
pub fn e_tail_quant<T: SfftFloat>(
    i: usize,
    hashing: &Hashing<T>,
    zs: &[usize],
    x: &[Complex<T>],
    head: &BTreeSet<usize>,
) -> Result<T> {
    let vals: Vec<T> = zs.iter().map(|&z| e_tail(i, hashing, z, x, head)).collect();
    quant(&vals, 0.2)
}

/// Per-coordinate second moment of bucket noise:
/// `mu^2_{H,i}(x) = G_{o_i(i)}^{-2} * sum_{j != i} |x_j|^2 G_{o_i(j)}^2`.
pub fn mu_sq<T: SfftFloat>(i: usize, hashing: &Hashing<T>, x: &[Complex<T>]) -> T {
    let gain = hashing.own_gain(i);
    let mut acc = T::zero();
    for (j, xv) in x.iter().enumerate() {
        if j == i || xv.is_zero() {
            continue;
        }
        let g = hashing.filter().eval_g(hashing.offset(i, j));
        acc += xv.norm_sqr() * g * g;
    }
    acc / (gain * gain)
}

/// As [`mu_sq`] but with the head coordinates (and `i`) masked out, so
/// the result captures tail energy only.
pub fn mu_sq_tail<T: SfftFloat>(
    i: usize,
    hashing: &Hashing<T>,
    x: &[Complex<T>],
    head: &BTreeSet<usize>,
) -> T {
    let gain = hashing.own_gain(i);
    let mut acc = T::zero();
    for (j, xv) in x.iter().enumerate() {
        if j == i || head.contains(&j) || xv.is_zero() {
            continue;
        }
        let g = hashing.filter().eval_g(hashing.offset(i, j));
        acc += xv.norm_sqr() * g * g;
    }
    acc / (gain * gain)
}

/// Location-noise functional over a shift family:
/// `40 mu_{H,i} + sum_{w in H} | e_tail_i(H, {alpha + w beta}) - 40 mu_{H,i} |_+`,
/// with `mu_{H,i}` taken on the tail of the signal (zero whenever the
/// signal is supported on the head set plus `i`).
pub fn e_tail_h<T: SfftFloat>(
    i: usize,
    hashing: &Hashing<T>,
    pairs: &[(usize, usize)],
    x: &[Complex<T>],
    head: &BTreeSet<usize>,
    shifts: &[u64],
) -> Result<T> {
    if pairs.is_empty() {
        return Err(SfftError::EmptyInput("evaluation-point set"));
    }
    let n = hashing.n() as u64;
    let mu40 = lit::<T>(40.0) * mu_sq_tail(i, hashing, x, head).sqrt();
    let mut acc = mu40;
    for &w in shifts {
        let zs: Vec<usize> = pairs
            .iter()
            .map(|&(alpha, beta)| ((alpha as u64 + w % n * (beta as u64) % n) % n) as usize)
            .collect();
        let et = e_tail_quant(i, hashing, &zs, x, head)?;
        let excess = et - mu40;
        if excess > T::zero() {
            acc += excess;
        }
    }
    Ok(acc)
}

/// True iff `|x_i| <= |y_i|` for every `i` in `S`.
pub fn is_majorant<T: SfftFloat>(
    y: &[Complex<T>],
    x: &[Complex<T>],
    head: &BTreeSet<usize>,
) -> bool {
    debug_assert_eq!(x.len(), y.len());
    head.iter().all(|&i| x[i].norm() <= y[i].norm())
}
