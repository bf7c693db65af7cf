//! Dense orthonormal DFT and the semi-equispaced transform.
//!
//! Convention: the forward transform divides by `sqrt(n)` and uses the
//! negative-exponent kernel, the inverse divides by `sqrt(n)` with the
//! positive kernel, so both directions are isometries (Parseval holds
//! exactly up to rounding).

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;

use crate::{lit, Result, SfftError, SfftFloat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Time,
    Frequency,
}

/// Dense complex signal of power-of-two length, tagged with the domain
/// its values live in.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    pub values: Vec<Complex<T>>,
    pub domain: Domain,
}

impl<T: SfftFloat> Signal<T> {
    pub fn new(values: Vec<Complex<T>>, domain: Domain) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(SfftError::InvalidLength(values.len()));
        }
        Ok(Self { values, domain })
    }

    pub fn zeros(n: usize, domain: Domain) -> Result<Self> {
        Self::new(vec![Complex::zero(); n], domain)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn l2(&self) -> T {
        self.values
            .iter()
            .map(|v| v.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }
}

/// Unit root phase `exp(2*pi*i * num / den)`.
pub(crate) fn unit_phase<T: SfftFloat>(num: i64, den: u64) -> Complex<T> {
    let angle = lit::<T>(2.0) * T::PI() * lit::<T>(num as f64) / lit::<T>(den as f64);
    Complex::from_polar(T::one(), angle)
}

/// `omega^e` with `omega = exp(2*pi*i/n)` and `e` reduced mod `n` first.
pub(crate) fn omega_pow<T: SfftFloat>(e: u64, n: usize) -> Complex<T> {
    unit_phase((e % n as u64) as i64, n as u64)
}

/// In-place radix-2 FFT without normalisation. `inverse` selects the
/// positive-exponent kernel. Twiddles come from a freshly built table so
/// rounding does not accumulate along butterfly chains.
pub(crate) fn fft_in_place<T: SfftFloat>(v: &mut [Complex<T>], inverse: bool) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }

    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            v.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let table: Vec<Complex<T>> = (0..n / 2)
        .map(|k| {
            let angle = lit::<T>(sign * 2.0) * T::PI() * lit::<T>(k as f64) / lit::<T>(n as f64);
            Complex::from_polar(T::one(), angle)
        })
        .collect();

    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = table[k * stride];
                let a = v[start + k];
                let b = v[start + k + len / 2] * w;
                v[start + k] = a + b;
                v[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Orthonormal forward DFT of a time-domain signal.
pub fn forward_dft<T: SfftFloat>(x: &Signal<T>) -> Result<Signal<T>> {
    if x.domain != Domain::Time {
        return Err(SfftError::DomainMismatch { expected: "time" });
    }
    Ok(Signal {
        values: transform(&x.values, false),
        domain: Domain::Frequency,
    })
}

/// Orthonormal inverse DFT of a frequency-domain signal.
pub fn inverse_dft<T: SfftFloat>(xf: &Signal<T>) -> Result<Signal<T>> {
    if xf.domain != Domain::Frequency {
        return Err(SfftError::DomainMismatch {
            expected: "frequency",
        });
    }
    Ok(Signal {
        values: transform(&xf.values, true),
        domain: Domain::Time,
    })
}

pub(crate) fn transform<T: SfftFloat>(values: &[Complex<T>], inverse: bool) -> Vec<Complex<T>> {
    let mut out = values.to_vec();
    fft_in_place(&mut out, inverse);
    let scale = T::one() / lit::<T>(values.len() as f64).sqrt();
    for v in &mut out {
        *v = *v * scale;
    }
    out
}

/// Sparse vector over `[0, n)`: the container for partially recovered
/// estimates. Explicit zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<T> {
    n: usize,
    entries: BTreeMap<usize, Complex<T>>,
}

impl<T: SfftFloat> SparseVector<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, Complex<T>)>) -> Self {
        let mut v = Self::new(n);
        for (i, c) in pairs {
            v.set(i, c);
        }
        v
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Complex<T> {
        *self.entries.get(&i).unwrap_or(&Complex::zero())
    }

    pub fn set(&mut self, i: usize, v: Complex<T>) {
        assert!(i < self.n, "index {i} out of range for length {}", self.n);
        if v.is_zero() {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, v);
        }
    }

    pub fn add_entry(&mut self, i: usize, v: Complex<T>) {
        let cur = self.get(i);
        self.set(i, cur + v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        self.entries.iter().map(|(&i, &v)| (i, v))
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn l2(&self) -> T {
        self.entries
            .values()
            .map(|v| v.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// `self - other`, entrywise.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (i, v) in other.iter() {
            out.add_entry(i, -v);
        }
        out
    }

    /// `self + other`, entrywise.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (i, v) in other.iter() {
            out.add_entry(i, v);
        }
        out
    }

    pub fn to_dense(&self, domain: Domain) -> Signal<T> {
        let mut values = vec![Complex::zero(); self.n];
        for (i, v) in self.iter() {
            values[i] = v;
        }
        Signal { values, domain }
    }

    /// Prunes entries with magnitude strictly below `threshold`.
    pub fn prune_below(&mut self, threshold: T) {
        self.entries.retain(|_, v| v.norm() >= threshold);
    }
}

/// Values of the semi-equispaced transform on the arithmetic progression
/// `{ sigma*j' + shift mod n : |j'| <= k/2 }`.
#[derive(Debug, Clone)]
pub struct SemiEquiValues<T> {
    n: usize,
    sigma: usize,
    shift: usize,
    half: usize,
    /// `values[t]` holds the result for `j' = t - half`.
    values: Vec<Complex<T>>,
}

impl<T: SfftFloat> SemiEquiValues<T> {
    pub fn half(&self) -> usize {
        self.half
    }

    /// Value approximating `xhat[sigma*j' + shift mod n]`, `|j'| <= half`.
    pub fn at_offset(&self, jp: i64) -> Complex<T> {
        debug_assert!(jp.unsigned_abs() as usize <= self.half);
        self.values[(jp + self.half as i64) as usize]
    }

    pub fn target_index(&self, jp: i64) -> usize {
        let n = self.n as i64;
        let j = (self.sigma as i64 * jp.rem_euclid(n) + self.shift as i64).rem_euclid(n);
        j as usize
    }
}

/// Semi-equispaced FFT: evaluates the orthonormal spectrum of a sparse
/// time-domain vector on the progression `sigma*j' + shift`, `|j'| <= k/2`,
/// to accuracy `delta * ||x||_2`.
///
/// Uses Gaussian-gridding onto an oversampled grid followed by a small
/// dense FFT; once the oversampled grid would reach the full length the
/// dense transform is used directly (and the result is exact).
pub fn semi_equi_fft<T: SfftFloat>(
    x: &SparseVector<T>,
    k: usize,
    delta: f64,
    sigma: usize,
    shift: usize,
) -> Result<SemiEquiValues<T>> {
    let n = x.n();
    if !n.is_power_of_two() {
        return Err(SfftError::InvalidLength(n));
    }
    if sigma % 2 == 0 {
        return Err(SfftError::InvalidPermutation(sigma));
    }
    if k > n {
        return Err(SfftError::InvalidParameter(format!(
            "semi-equispaced width k={k} exceeds n={n}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(SfftError::InvalidParameter(format!(
            "semi-equispaced precision delta={delta} outside (0,1)"
        )));
    }

    let half = k / 2;
    let width = 2 * half + 1;

    // Remap so the target progression becomes plain low frequencies:
    // xhat[sigma*j' + shift] equals the spectrum at j' of the signal with
    // value x_i * omega^{-i*shift} placed at position sigma*i mod n.
    let remapped: Vec<(usize, Complex<T>)> = x
        .iter()
        .map(|(i, v)| {
            let p = (sigma as u64 * i as u64 % n as u64) as usize;
            let tw = omega_pow::<T>((n as u64 - (i as u64 * (shift as u64 % n as u64)) % n as u64) % n as u64, n);
            (p, v * tw)
        })
        .collect();

    let m = (4 * width.max(16)).next_power_of_two();
    let values = if m >= n {
        dense_lowband(&remapped, n, half)
    } else {
        gridded_lowband(&remapped, n, m, half, delta)
    };

    Ok(SemiEquiValues {
        n,
        sigma,
        shift,
        half,
        values,
    })
}

fn dense_lowband<T: SfftFloat>(
    remapped: &[(usize, Complex<T>)],
    n: usize,
    half: usize,
) -> Vec<Complex<T>> {
    let mut dense = vec![Complex::zero(); n];
    for &(p, v) in remapped {
        dense[p] += v;
    }
    fft_in_place(&mut dense, false);
    let scale = T::one() / lit::<T>(n as f64).sqrt();
    (-(half as i64)..=half as i64)
        .map(|jp| dense[jp.rem_euclid(n as i64) as usize] * scale)
        .collect()
}

fn gridded_lowband<T: SfftFloat>(
    remapped: &[(usize, Complex<T>)],
    n: usize,
    m: usize,
    half: usize,
    delta: f64,
) -> Vec<Complex<T>> {
    // Spreading width and Gaussian shape chosen so that truncation and
    // aliasing errors balance at exp(-1.36*taps); the +4 pad absorbs the
    // deconvolution growth at the edge of the output band.
    let taps = ((1.0 / delta).ln() / 1.3).ceil() as usize + 4;
    let width_frac = (2 * half + 1) as f64 / m as f64;
    let tau = std::f64::consts::PI * taps as f64 / (2.0 * (m as f64).powi(2) * (1.0 - width_frac).sqrt());

    let mut grid = vec![Complex::<T>::zero(); m];
    let ratio = (n / m) as f64;
    let two_pi_over_m = 2.0 * std::f64::consts::PI / m as f64;
    for &(p, v) in remapped {
        let t = p as f64 / ratio;
        let c0 = t.floor() as i64 - (taps as i64) / 2;
        for dc in 0..=taps as i64 {
            let c = c0 + dc;
            let x_off = two_pi_over_m * (c as f64 - t);
            let w = lit::<T>((-x_off * x_off / (4.0 * tau)).exp());
            let idx = c.rem_euclid(m as i64) as usize;
            grid[idx] += v * w;
        }
    }

    fft_in_place(&mut grid, false);

    let base = 2.0 * std::f64::consts::PI / (m as f64 * (4.0 * std::f64::consts::PI * tau).sqrt() * (n as f64).sqrt());
    (-(half as i64)..=half as i64)
        .map(|jp| {
            let corr = lit::<T>(base * ((jp * jp) as f64 * tau).exp());
            grid[jp.rem_euclid(m as i64) as usize] * corr
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground_truth::dft_direct;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signal(n: usize, seed: u64) -> Signal<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Signal::new(values, Domain::Time).unwrap()
    }

    #[test]
    fn delta_transforms_to_constant() {
        let n = 8;
        let mut x = Signal::zeros(n, Domain::Time).unwrap();
        x.values[0] = Complex::new(1.0, 0.0);
        let xf = forward_dft(&x).unwrap();
        let expect = 1.0 / (n as f64).sqrt();
        for v in &xf.values {
            assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn all_ones_transforms_to_delta() {
        let n = 8;
        let x = Signal::new(vec![Complex::new(1.0, 0.0); n], Domain::Time).unwrap();
        let xf = forward_dft(&x).unwrap();
        assert!((xf.values[0].re - (n as f64).sqrt()).abs() < 1e-12);
        for v in &xf.values[1..] {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn forward_matches_direct_summation() {
        let x = random_signal(16, 7);
        let fast = forward_dft(&x).unwrap();
        let slow = dft_direct(&x.values, false);
        for (a, b) in fast.values.iter().zip(slow.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn inverse_matches_direct_summation() {
        let mut xf = random_signal(16, 8);
        xf.domain = Domain::Frequency;
        let fast = inverse_dft(&xf).unwrap();
        let slow = dft_direct(&xf.values, true);
        for (a, b) in fast.values.iter().zip(slow.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn inverse_delta_is_constant() {
        let n = 16;
        let mut xf = Signal::zeros(n, Domain::Frequency).unwrap();
        xf.values[0] = Complex::new(1.0, 0.0);
        let x = inverse_dft(&xf).unwrap();
        let expect = 1.0 / (n as f64).sqrt();
        for v in &x.values {
            assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_identity() {
        let x = random_signal(32, 3);
        let back = inverse_dft(&forward_dft(&x).unwrap()).unwrap();
        for (a, b) in x.values.iter().zip(back.values.iter()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn parseval_across_sizes() {
        for (case, exp) in (0..100).zip((4..=12).cycle()) {
            let n = 1usize << exp;
            let x = random_signal(n, 1000 + case);
            let xf = forward_dft(&x).unwrap();
            let rel = (x.l2() - xf.l2()).abs() / x.l2();
            assert!(rel < 1e-9, "Parseval violated at n={n}: rel={rel}");
        }
    }

    #[test]
    fn convolution_identity() {
        // F^{-1}(xhat * yhat)_i = (1/sqrt(n)) sum_f x_f y_{i-f}
        let n = 64;
        let x = random_signal(n, 11);
        let y = random_signal(n, 12);
        let xf = forward_dft(&x).unwrap();
        let yf = forward_dft(&y).unwrap();
        let prod = Signal::new(
            xf.values
                .iter()
                .zip(yf.values.iter())
                .map(|(a, b)| a * b)
                .collect(),
            Domain::Frequency,
        )
        .unwrap();
        let lhs = inverse_dft(&prod).unwrap();
        let scale = 1.0 / (n as f64).sqrt();
        for i in 0..n {
            let mut acc = Complex::new(0.0, 0.0);
            for f in 0..n {
                acc += x.values[f] * y.values[(i + n - f) % n];
            }
            acc *= scale;
            assert!((lhs.values[i] - acc).norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Signal::<f64>::new(vec![Complex::new(1.0, 0.0); 6], Domain::Time).is_err());
    }

    #[test]
    fn semi_equi_single_tone() {
        let n = 64;
        let mut x = SparseVector::new(n);
        x.set(0, Complex::new(1.0, 0.0));
        let vals = semi_equi_fft(&x, 8, 1e-9, 1, 0).unwrap();
        let expect = 1.0 / (n as f64).sqrt();
        for jp in -4i64..=4 {
            let v = vals.at_offset(jp);
            assert!((v.re - expect).abs() < 1e-9 && v.im.abs() < 1e-9);
        }
    }

    #[test]
    fn semi_equi_zero_input() {
        let x = SparseVector::<f64>::new(256);
        let vals = semi_equi_fft(&x, 16, 1e-9, 3, 5).unwrap();
        for jp in -8i64..=8 {
            assert_eq!(vals.at_offset(jp).norm(), 0.0);
        }
    }

    #[test]
    fn semi_equi_matches_dense_oracle() {
        let n = 1usize << 12;
        let k = 64;
        let delta = 1e-8;
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
            let mut x = SparseVector::new(n);
            for _ in 0..16 {
                let i = rng.gen_range(0..n);
                x.set(
                    i,
                    Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
            let sigma = 2 * rng.gen_range(0..n / 2) + 1;
            let shift = rng.gen_range(0..n);
            let dense = forward_dft(&x.to_dense(Domain::Time)).unwrap();
            let vals = semi_equi_fft(&x, k, delta, sigma, shift).unwrap();
            let budget = delta * x.l2();
            for jp in -(k as i64 / 2)..=(k as i64 / 2) {
                let target = dense.values[vals.target_index(jp)];
                let got = vals.at_offset(jp);
                assert!(
                    (target - got).norm() <= budget,
                    "seed {seed} jp {jp}: err {} > {budget}",
                    (target - got).norm()
                );
            }
        }
    }

    #[test]
    fn semi_equi_rejects_even_sigma() {
        let x = SparseVector::<f64>::new(64);
        assert!(matches!(
            semi_equi_fft(&x, 8, 1e-9, 2, 0),
            Err(SfftError::InvalidPermutation(2))
        ));
    }
}
