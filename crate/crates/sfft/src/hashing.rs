//! Spectrum permutations, bucketed measurements, and the sample ledger.
//!
//! All reads of the signal's spectrum go through [`hash_to_bins`]: it
//! evaluates one hashing of the residual signal at one modulation point,
//! reading exactly the filter-window taps from the spectrum source and
//! never touching the spectrum on behalf of the recovered estimate
//! (whose contribution comes from the semi-equispaced transform).

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use rand::Rng;

use crate::dft::{fft_in_place, omega_pow, semi_equi_fft, Signal, SparseVector};
use crate::filter::FlatFilter;
use crate::{Result, SfftError, SfftFloat};

/// Pseudorandom spectrum permutation `pi(i) = sigma*(i - q) mod n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Permutation {
    sigma: usize,
    q: usize,
    n: usize,
}

impl Permutation {
    pub fn new(sigma: usize, q: usize, n: usize) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(SfftError::InvalidLength(n));
        }
        if sigma % 2 == 0 {
            return Err(SfftError::InvalidPermutation(sigma));
        }
        Ok(Self {
            sigma: sigma % n,
            q: q % n,
            n,
        })
    }

    pub fn random(rng: &mut impl Rng, n: usize, q: Option<usize>) -> Self {
        let sigma = 2 * rng.gen_range(0..n / 2) + 1;
        let q = q.unwrap_or_else(|| rng.gen_range(0..n));
        Self { sigma, q, n }
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `pi(i) = sigma*(i - q) mod n`.
    pub fn apply(&self, i: usize) -> usize {
        let n = self.n as u64;
        let shifted = (i as u64 + n - self.q as u64 % n) % n;
        (self.sigma as u64 * shifted % n) as usize
    }

    /// Multiplicative inverse of sigma mod n (n a power of two, sigma odd).
    pub fn sigma_inverse(&self) -> usize {
        inverse_mod_pow2(self.sigma as u64, self.n as u64) as usize
    }
}

pub(crate) fn inverse_mod_pow2(a: u64, n: u64) -> u64 {
    debug_assert!(a % 2 == 1 && n.is_power_of_two());
    // Newton iteration doubles correct bits each round.
    let mut x = 1u64;
    for _ in 0..n.trailing_zeros().max(1) {
        x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
    }
    (x % n + n) % n
}

/// Applies `P_{sigma,a,q}` to a frequency-domain signal:
/// `(P xhat)_i = xhat[sigma*(i-a)] * omega^{i*sigma*q}`.
pub fn apply_p<T: SfftFloat>(
    xhat: &Signal<T>,
    sigma: usize,
    a: usize,
    q: usize,
) -> Result<Signal<T>> {
    if sigma % 2 == 0 {
        return Err(SfftError::InvalidPermutation(sigma));
    }
    if xhat.domain != crate::dft::Domain::Frequency {
        return Err(SfftError::DomainMismatch {
            expected: "frequency",
        });
    }
    let n = xhat.n();
    let nq = n as u64;
    let sq = sigma as u64 * q as u64 % nq;
    let values = (0..n)
        .map(|i| {
            let src = (sigma as u64 * ((i as u64 + nq - a as u64 % nq) % nq) % nq) as usize;
            xhat.values[src] * omega_pow::<T>(i as u64 * sq % nq, n)
        })
        .collect();
    Signal::new(values, crate::dft::Domain::Frequency)
}

static HASHING_IDS: AtomicU64 = AtomicU64::new(1);

/// A hashing `H = (pi, B, F)`: permutation plus filter, defining how the
/// spectrum folds into `B` buckets.
#[derive(Debug, Clone)]
pub struct Hashing<T> {
    perm: Permutation,
    filter: Arc<FlatFilter<T>>,
    id: u64,
}

impl<T: SfftFloat> Hashing<T> {
    pub fn new(perm: Permutation, filter: Arc<FlatFilter<T>>) -> Result<Self> {
        if filter.n() != perm.n() {
            return Err(SfftError::InvalidParameter(format!(
                "filter length {} does not match permutation length {}",
                filter.n(),
                perm.n()
            )));
        }
        Ok(Self {
            perm,
            filter,
            id: HASHING_IDS.fetch_add(1, Ordering::Relaxed),
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn filter(&self) -> &FlatFilter<T> {
        &self.filter
    }

    pub fn n(&self) -> usize {
        self.perm.n()
    }

    pub fn buckets(&self) -> usize {
        self.filter.buckets()
    }

    /// Bucket of index `i`: round-half-up of `(B/n) * pi(i)`, reduced mod B.
    pub fn bucket_of(&self, i: usize) -> usize {
        self.bucket_of_position(self.perm.apply(i))
    }

    pub fn bucket_of_position(&self, pos: usize) -> usize {
        let n = self.n() as u64;
        let b = self.buckets() as u64;
        (((pos as u64 * b + n / 2) / n) % b) as usize
    }

    /// Signed circular offset of `j` relative to `i`'s bucket center:
    /// `o_i(j) = pi(j) - (n/B) * h(i)`.
    pub fn offset(&self, i: usize, j: usize) -> i64 {
        let n = self.n() as i64;
        let center = (self.n() / self.buckets() * self.bucket_of(i)) as i64;
        let raw = self.perm.apply(j) as i64 - center;
        signed_mod(raw, n)
    }

    /// Filter gain at `i`'s own offset, `G_{o_i(i)}`.
    pub fn own_gain(&self, i: usize) -> T {
        self.filter.eval_g(self.offset(i, i))
    }
}

pub(crate) fn signed_mod(x: i64, n: i64) -> i64 {
    let m = x.rem_euclid(n);
    if m > n / 2 {
        m - n
    } else {
        m
    }
}

/// `B` bucket values of one hashing evaluated at modulation point `a`.
#[derive(Debug, Clone)]
pub struct Measurement<T> {
    pub values: Vec<Complex<T>>,
    pub a: usize,
    pub hashing_id: u64,
}

/// Ledger phases; the CSV output groups cleanup with estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Location,
    Estimation,
    Cleanup,
}

/// Counts spectrum accesses. A `hash_to_bins` call requests exactly the
/// filter-window taps, so each call adds `window_len` to its phase;
/// requests served by a measurement cache are not re-counted.
#[derive(Debug, Default)]
pub struct SampleLedger {
    location: AtomicU64,
    estimation: AtomicU64,
    cleanup: AtomicU64,
    budget: Option<u64>,
}

impl SampleLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_budget(budget: u64) -> Self {
        Self {
            budget: Some(budget),
            ..Self::default()
        }
    }

    pub fn record(&self, phase: Phase, count: u64) -> Result<()> {
        let slot = match phase {
            Phase::Location => &self.location,
            Phase::Estimation => &self.estimation,
            Phase::Cleanup => &self.cleanup,
        };
        slot.fetch_add(count, Ordering::Relaxed);
        if let Some(budget) = self.budget {
            let total = self.total();
            if total > budget {
                return Err(SfftError::BudgetExceeded {
                    phase,
                    budget,
                    requested: total,
                });
            }
        }
        Ok(())
    }

    pub fn phase_count(&self, phase: Phase) -> u64 {
        match phase {
            Phase::Location => self.location.load(Ordering::Relaxed),
            Phase::Estimation => self.estimation.load(Ordering::Relaxed),
            Phase::Cleanup => self.cleanup.load(Ordering::Relaxed),
        }
    }

    pub fn total(&self) -> u64 {
        self.phase_count(Phase::Location)
            + self.phase_count(Phase::Estimation)
            + self.phase_count(Phase::Cleanup)
    }
}

/// Read-only access to the spectrum of the signal under recovery.
pub trait FrequencySource<T>: Sync {
    fn n(&self) -> usize;
    fn sample(&self, idx: usize) -> Complex<T>;
}

/// Dense in-memory spectrum (the desk-scale source).
pub struct DenseSpectrum<T> {
    values: Vec<Complex<T>>,
}

impl<T: SfftFloat> DenseSpectrum<T> {
    pub fn new(xhat: Signal<T>) -> Result<Self> {
        if xhat.domain != crate::dft::Domain::Frequency {
            return Err(SfftError::DomainMismatch {
                expected: "frequency",
            });
        }
        Ok(Self {
            values: xhat.values,
        })
    }
}

impl<T: SfftFloat> FrequencySource<T> for DenseSpectrum<T> {
    fn n(&self) -> usize {
        self.values.len()
    }

    fn sample(&self, idx: usize) -> Complex<T> {
        self.values[idx]
    }
}

/// Evaluates the hashing of `x - chi` at modulation point `a` by reading
/// the spectrum on the filter window. The recovered part `chi` enters
/// through its semi-equispaced transform only. Bucket `s` receives
/// `sum_j G[pi(j) - (n/B)s] (x-chi)_j omega^{a sigma j}` up to
/// `delta_semi * ||chi||_2`.
pub fn hash_to_bins<T: SfftFloat, S: FrequencySource<T> + ?Sized>(
    source: &S,
    chi: &SparseVector<T>,
    hashing: &Hashing<T>,
    a: usize,
    delta_semi: f64,
    ledger: &SampleLedger,
    phase: Phase,
) -> Result<Measurement<T>> {
    let n = hashing.n();
    if source.n() != n || chi.n() != n {
        return Err(SfftError::InvalidParameter(
            "source/chi length mismatch with hashing".into(),
        ));
    }
    let filter = hashing.filter();
    let b = filter.buckets();
    let sigma = hashing.perm().sigma();
    let q = hashing.perm().q();
    let nq = n as u64;

    ledger.record(phase, filter.window_len() as u64)?;

    // chi's spectrum on the window, via the semi-equispaced transform at
    // (sigma, shift = -sigma*a): window tap i needs chi_hat[sigma*(i-a)].
    let chi_window = if chi.is_empty() {
        None
    } else {
        let shift = (nq - sigma as u64 * a as u64 % nq) % nq;
        let k_se = if filter.window_len() >= n {
            n
        } else {
            filter.window_len() + 1
        };
        Some(semi_equi_fft(chi, k_se, delta_semi, sigma, shift as usize)?)
    };

    let sq = sigma as u64 * q as u64 % nq;
    let mut folded = vec![Complex::<T>::zero(); b];
    for (i, tap) in filter.taps() {
        let iu = i.rem_euclid(n as i64) as u64;
        let src_idx = (sigma as u64 * ((iu + nq - a as u64 % nq) % nq) % nq) as usize;
        let mut val = source.sample(src_idx);
        if let Some(ref win) = chi_window {
            let jp = if i > n as i64 / 2 { i - n as i64 } else { i };
            val -= win.at_offset(jp);
        }
        let y = val * tap * omega_pow::<T>(iu * sq % nq, n);
        folded[(iu % b as u64) as usize] += y;
    }

    // u_j = sqrt(n) * F^{-1}(y')_{(n/B) j} = unnormalised B-point inverse
    // transform of the aliased window.
    fft_in_place(&mut folded, true);

    Ok(Measurement {
        values: folded,
        a,
        hashing_id: hashing.id(),
    })
}

/// Exact `O(nB)` reference for [`hash_to_bins`]: evaluates the defining
/// sum of a measurement on the dense time-domain signal.
pub fn direct_measurement_oracle<T: SfftFloat>(
    x: &Signal<T>,
    chi: &SparseVector<T>,
    hashing: &Hashing<T>,
    a: usize,
) -> Result<Measurement<T>> {
    if x.domain != crate::dft::Domain::Time {
        return Err(SfftError::DomainMismatch { expected: "time" });
    }
    let n = hashing.n();
    let b = hashing.buckets();
    let filter = hashing.filter();
    let sigma = hashing.perm().sigma();
    let nq = n as u64;
    let sa = sigma as u64 * a as u64 % nq;
    let mut values = vec![Complex::<T>::zero(); b];
    for j in 0..n {
        let resid = x.values[j] - chi.get(j);
        if resid.is_zero() {
            continue;
        }
        let pj = hashing.perm().apply(j) as i64;
        let tw = omega_pow::<T>(j as u64 * sa % nq, n);
        let contrib = resid * tw;
        for (s, slot) in values.iter_mut().enumerate() {
            let off = pj - (n / b * s) as i64;
            *slot += contrib * filter.eval_g(off);
        }
    }
    Ok(Measurement {
        values,
        a,
        hashing_id: hashing.id(),
    })
}

/// Measurement of a sparse vector alone, by direct bucket accumulation:
/// each entry contributes to the buckets within the filter's truncation
/// radius for `delta_semi` (all of them when the radius covers `B`).
/// Used to correct raw measurements to residual measurements without
/// touching the spectrum source.
pub fn sparse_measurement<T: SfftFloat>(
    chi: &SparseVector<T>,
    hashing: &Hashing<T>,
    a: usize,
    delta_semi: f64,
) -> Measurement<T> {
    let n = hashing.n();
    let b = hashing.buckets();
    let filter = hashing.filter();
    let sigma = hashing.perm().sigma();
    let nq = n as u64;
    let sa = sigma as u64 * a as u64 % nq;

    let mut values = vec![Complex::<T>::zero(); b];
    if chi.is_empty() {
        return Measurement {
            values,
            a,
            hashing_id: hashing.id(),
        };
    }
    let per_bucket = delta_semi / (chi.nnz() as f64).sqrt().max(1.0);
    let radius = filter.bucket_radius_for(per_bucket);
    let full = 2 * radius + 1 >= b;
    for (j, v) in chi.iter() {
        let pj = hashing.perm().apply(j) as i64;
        let contrib = v * omega_pow::<T>(j as u64 * sa % nq, n);
        if full {
            for (s, slot) in values.iter_mut().enumerate() {
                let off = pj - (n / b * s) as i64;
                *slot += contrib * filter.eval_g(off);
            }
        } else {
            let hj = hashing.bucket_of_position(pj as usize) as i64;
            for db in -(radius as i64)..=(radius as i64) {
                let s = (hj + db).rem_euclid(b as i64) as usize;
                let off = pj - (n / b * s) as i64;
                values[s] += contrib * filter.eval_g(off);
            }
        }
    }
    Measurement {
        values,
        a,
        hashing_id: hashing.id(),
    }
}

/// Cache of raw measurements `m(x, H, a)` keyed by `(hashing id, a)`:
/// repeated requests for the same key do not re-read the spectrum.
#[derive(Default)]
pub struct MeasurementStore<T> {
    map: HashMap<(u64, usize), Arc<Measurement<T>>>,
}

impl<T: SfftFloat> MeasurementStore<T> {
    pub fn new() -> Self {
        Self {
            map: HashMap::new(),
        }
    }

    pub fn raw<S: FrequencySource<T> + ?Sized>(
        &mut self,
        source: &S,
        hashing: &Hashing<T>,
        a: usize,
        delta_semi: f64,
        ledger: &SampleLedger,
        phase: Phase,
    ) -> Result<Arc<Measurement<T>>> {
        let key = (hashing.id(), a);
        if let Some(hit) = self.map.get(&key) {
            return Ok(hit.clone());
        }
        let empty = SparseVector::new(hashing.n());
        let m = Arc::new(hash_to_bins(
            source, &empty, hashing, a, delta_semi, ledger, phase,
        )?);
        self.map.insert(key, m.clone());
        Ok(m)
    }
}
