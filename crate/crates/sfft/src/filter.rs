//! Flat frequency-domain filters with `B` buckets and sharpness `F`.
//!
//! The frequency response `G` is ~1 on one bucket width around zero and
//! decays polynomially of order `F-1` outside it, while the time-domain
//! coefficients occupy a window of `O(F*B)` taps. Construction: a
//! Dirichlet-kernel power (the spectrum of an `F`-fold boxcar
//! self-convolution in time, hence exactly compact in time) is averaged
//! over a plateau window in frequency. Any construction is acceptable as
//! long as the flatness/decay conditions verify, so they are checked
//! exhaustively before a filter is returned.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex;

use crate::dft::fft_in_place;
use crate::{lit, Result, SfftError, SfftFloat};

/// Default time-window budget multiplier: taps fit in `C_F * F * B`.
pub const DEFAULT_C_F: usize = 10;

#[derive(Debug, Clone)]
pub struct FlatFilter<T> {
    n: usize,
    b: usize,
    f: usize,
    c_f: usize,
    /// Frequency response, length `n`, `g[j]` indexed mod n.
    g: Vec<T>,
    /// Time-domain taps; tap `t` sits at time index `tap_offset + t`.
    taps: Vec<T>,
    tap_offset: i64,
}

impl<T: SfftFloat> FlatFilter<T> {
    /// Builds and verifies an `(n, B, F)`-flat filter with window budget
    /// constant `c_f` (taps never exceed `min(c_f*F*B, n)`).
    pub fn build(n: usize, b: usize, f: usize, c_f: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < 4 {
            return Err(SfftError::InvalidLength(n));
        }
        if !b.is_power_of_two() || b < 2 || b > n / 2 {
            return Err(SfftError::InvalidBucketing { b, n });
        }
        if f < 2 || f % 2 != 0 {
            return Err(SfftError::InvalidSharpness(f));
        }
        if c_f < 2 {
            return Err(SfftError::InvalidParameter(format!(
                "filter window constant c_f={c_f} too small"
            )));
        }

        // Boxcar length for the kernel: c_f=10 gives L = 8B+1, keeping the
        // F-fold self-convolution inside the declared window with margin.
        let l = {
            let want = (4 * c_f / 5) * b + 1;
            let mut l = want.min(n - 1);
            if l % 2 == 0 {
                l -= 1;
            }
            l.max(3)
        };

        // Frequency kernel: normalised Dirichlet power. F even => K >= 0.
        let mut kernel: Vec<T> = (0..n)
            .map(|j| dirichlet::<T>(j, l, n).powi(f as i32))
            .collect();
        let total: T = kernel.iter().copied().sum();
        for v in &mut kernel {
            *v = *v / total;
        }

        let plateau_half = (3 * n / (4 * b)).clamp(1, n / 2 - 1);
        let mut g = box_convolve(&kernel, plateau_half);
        for v in &mut g {
            *v = v.min(T::one()).max(T::zero());
        }

        // Time taps: exact support is F*(L-1)+1 when that fits in n; the
        // rest of the transform output is rounding dust and is cut off.
        let spread = f * (l - 1) + 1;
        let window = (c_f * f * b).min(n);
        let (tap_offset, tap_len) = if spread >= n || window >= n {
            (0i64, n)
        } else {
            let half = spread / 2;
            (-(half as i64), 2 * half + 1)
        };

        let mut time: Vec<Complex<T>> = g.iter().map(|&v| Complex::new(v, T::zero())).collect();
        fft_in_place(&mut time, false);
        let scale = T::one() / lit::<T>(n as f64).sqrt();
        let taps: Vec<T> = (0..tap_len)
            .map(|t| {
                let idx = (tap_offset + t as i64).rem_euclid(n as i64) as usize;
                time[idx].re * scale
            })
            .collect();

        let filter = Self {
            n,
            b,
            f,
            c_f,
            g,
            taps,
            tap_offset,
        };
        filter.verify()?;
        Ok(filter)
    }

    fn verify(&self) -> Result<()> {
        let (n, b, f) = (self.n, self.b, self.f);
        let fail = |j: usize| SfftError::FilterVerification { n, b, f, j };
        for j in 0..n {
            let v = self.g[j];
            if v < T::zero() || v > T::one() {
                return Err(fail(j));
            }
            let js = j.min(n - j);
            if js <= n / (2 * b) {
                let floor = T::one() - lit::<T>(0.25f64.powi(f as i32 - 1));
                if v < floor {
                    return Err(fail(j));
                }
            }
            if js >= n / b {
                let bound = lit::<T>(
                    (0.25 * n as f64 / (b as f64 * js as f64)).powi(f as i32 - 1),
                );
                if v > bound {
                    return Err(fail(j));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn buckets(&self) -> usize {
        self.b
    }

    pub fn sharpness(&self) -> usize {
        self.f
    }

    pub fn c_f(&self) -> usize {
        self.c_f
    }

    /// Frequency response at a circular offset.
    pub fn eval_g(&self, offset: i64) -> T {
        self.g[offset.rem_euclid(self.n as i64) as usize]
    }

    /// Number of time-domain taps (= spectrum samples per measurement).
    pub fn window_len(&self) -> usize {
        self.taps.len()
    }

    /// Iterates `(time index, tap value)` over the compact support.
    pub fn taps(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.taps
            .iter()
            .enumerate()
            .map(move |(t, &v)| (self.tap_offset + t as i64, v))
    }

    /// Truncation radius (in buckets) at which the decay bound pushes a
    /// unit contribution below `target`; used when accumulating sparse
    /// residual corrections bucket-locally.
    pub fn bucket_radius_for(&self, target: f64) -> usize {
        let fm1 = (self.f - 1) as f64;
        let c = ((1.0 / target).powf(1.0 / fm1) + 2.0) / 4.0;
        (c.ceil() as usize + 1).min(self.b / 2)
    }
}

fn dirichlet<T: SfftFloat>(j: usize, l: usize, n: usize) -> T {
    if j == 0 {
        return T::one();
    }
    let x = lit::<T>(j as f64) * T::PI() / lit::<T>(n as f64);
    let num = (lit::<T>(l as f64) * x).sin();
    let den = lit::<T>(l as f64) * x.sin();
    num / den
}

/// Circular convolution of `kernel` with the indicator of `[-m, m]`.
/// Direct summation resolves arbitrarily deep tails and is used while
/// affordable; wide windows fall back to compensated prefix sums, whose
/// ~2eps absolute error the later verification still has to accept (wide
/// windows mean few buckets, where the decay bounds sit far above eps).
fn box_convolve<T: SfftFloat>(kernel: &[T], m: usize) -> Vec<T> {
    let n = kernel.len();
    let width = 2 * m + 1;
    if n.saturating_mul(width) <= 1 << 27 {
        (0..n)
            .map(|j| {
                let mut acc = T::zero();
                for u in 0..width {
                    let idx = (j + n + m - u) % n;
                    acc += kernel[idx];
                }
                acc
            })
            .collect()
    } else {
        // Neumaier-compensated running sums.
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(T::zero());
        let mut run = T::zero();
        let mut comp = T::zero();
        for &v in kernel {
            let t = run + v;
            comp += if run.abs() >= v.abs() {
                (run - t) + v
            } else {
                (v - t) + run
            };
            run = t;
            prefix.push(run + comp);
        }
        let total = run + comp;
        let range_sum = |lo: usize, hi: usize| -> T {
            // inclusive circular [lo, hi]
            if lo <= hi {
                prefix[hi + 1] - prefix[lo]
            } else {
                total - (prefix[lo] - prefix[hi + 1])
            }
        };
        (0..n)
            .map(|j| {
                let lo = (j + n - m) % n;
                let hi = (j + m) % n;
                range_sum(lo, hi).min(total).max(T::zero())
            })
            .collect()
    }
}

/// Process-wide cache of built filters, keyed by `(n, B, F, c_f)`. Filter
/// construction is deterministic, so sharing across runs and threads is
/// sound.
pub struct FilterBank<T> {
    inner: Mutex<HashMap<(usize, usize, usize, usize), Arc<FlatFilter<T>>>>,
}

impl<T: SfftFloat> FilterBank<T> {
    pub fn new() -> Self {
        Self {
            inner: Mutex::new(HashMap::new()),
        }
    }

    pub fn get(&self, n: usize, b: usize, f: usize, c_f: usize) -> Result<Arc<FlatFilter<T>>> {
        let mut map = self.inner.lock().expect("filter bank poisoned");
        if let Some(hit) = map.get(&(n, b, f, c_f)) {
            return Ok(hit.clone());
        }
        let built = Arc::new(FlatFilter::build(n, b, f, c_f)?);
        map.insert((n, b, f, c_f), built.clone());
        Ok(built)
    }
}

impl<T: SfftFloat> Default for FilterBank<T> {
    fn default() -> Self {
        Self::new()
    }
}
