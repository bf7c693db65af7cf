//! Signal location and full sparse recovery.
//!
//! `sparse_fft` takes two measurement families up front — a structured
//! one for location (per hashing, a set of evaluation-point pairs swept
//! across a geometric ladder of modulation shifts) and an unstructured
//! one for estimation — then runs the SNR reduction loop entirely on
//! stored measurements. A constant-SNR cleanup routine finishes the
//! recovery; its internals follow published prior work rather than
//! anything specific to this library's analysis and are validated purely
//! by their Monte-Carlo behaviour.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dft::SparseVector;
use crate::estimation::{estimate_values, MeasurementBundle, SampleCounts};
use crate::filter::{FilterBank, DEFAULT_C_F};
use crate::hashing::{
    hash_to_bins, sparse_measurement, FrequencySource, Hashing, Measurement, Permutation, Phase,
    SampleLedger,
};
use crate::partition::PartitionSchedule;
use crate::{lit, Result, SfftError, SfftFloat};

/// Digit-decoding geometry: base `Delta`, periodic extension length `N`,
/// and the ladder of modulation shifts `N * Delta^{-g}`.
#[derive(Debug, Clone)]
pub struct LocationGeometry {
    pub n: usize,
    pub delta: usize,
    pub big_n: u64,
    pub shifts: Vec<u64>,
}

impl LocationGeometry {
    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < 4 {
            return Err(SfftError::InvalidLength(n));
        }
        let loglog = (n as f64).log2().log2();
        let delta = 1usize << ((loglog / 2.0).floor() as u32).max(1);
        let mut big_n = 1u64;
        let mut levels = 0usize;
        while big_n < n as u64 {
            big_n *= delta as u64;
            levels += 1;
        }
        let shifts = (1..=levels)
            .map(|g| big_n / (delta as u64).pow(g as u32))
            .collect();
        Ok(Self {
            n,
            delta,
            big_n,
            shifts,
        })
    }

    pub fn levels(&self) -> usize {
        self.shifts.len()
    }
}

/// Draws `size` evaluation-point pairs uniformly with replacement.
pub fn random_eval_pairs(rng: &mut impl Rng, n: usize, size: usize) -> Vec<(usize, usize)> {
    (0..size)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect()
}

/// Exact check of the balance condition: for every `r` in `[1, Delta)`,
/// at least 49/100 of `{omega_Delta^{r beta}}` lie in the closed left
/// halfplane.
pub fn check_balanced(pairs: &[(usize, usize)], delta: usize) -> bool {
    if pairs.is_empty() {
        return false;
    }
    for r in 1..delta {
        let count = pairs
            .iter()
            .filter(|&&(_, beta)| {
                let m = r as u64 * beta as u64 % delta as u64;
                4 * m >= delta as u64 && 4 * m <= 3 * delta as u64
            })
            .count();
        if 100 * count < 49 * pairs.len() {
            return false;
        }
    }
    true
}

/// Stored location measurements for one hashing: the evaluation pairs,
/// the base measurement at each `alpha`, and one measurement per ladder
/// shift per pair.
pub struct LocationMeasurements<T> {
    pub pairs: Vec<(usize, usize)>,
    pub base: Vec<Arc<Measurement<T>>>,
    /// `per_shift[g-1][pair]` measured at `alpha + shifts[g-1] * beta`.
    pub per_shift: Vec<Vec<Arc<Measurement<T>>>>,
}

/// Decodes one candidate frequency per bucket from the stored
/// measurements of `x`, corrected to the residual at `chi`. Digits are
/// accepted only when a unique residue passes the ratio test on at least
/// 3/5 of the evaluation pairs; an ambiguous digit is skipped (the bucket
/// then emits a candidate that estimation later discards). A bucket whose
/// base measurements all vanish emits nothing.
pub fn locate_signal<T: SfftFloat>(
    chi: &SparseVector<T>,
    hashing: &Hashing<T>,
    meas: &LocationMeasurements<T>,
    geometry: &LocationGeometry,
    delta_semi: f64,
) -> Vec<usize> {
    let n = hashing.n();
    let b = hashing.buckets();
    let delta = geometry.delta as u64;
    let levels = geometry.levels();
    let pairs = &meas.pairs;

    // Residual corrections, one per stored measurement point.
    let correct = |m: &Measurement<T>| -> Vec<Complex<T>> {
        if chi.is_empty() {
            return m.values.clone();
        }
        let c = sparse_measurement(chi, hashing, m.a, delta_semi);
        m.values
            .iter()
            .zip(c.values.iter())
            .map(|(a, b)| a - b)
            .collect()
    };
    let base: Vec<Vec<Complex<T>>> = meas.base.iter().map(|m| correct(m)).collect();
    let per_shift: Vec<Vec<Vec<Complex<T>>>> = meas
        .per_shift
        .iter()
        .map(|level| level.iter().map(|m| correct(m)).collect())
        .collect();

    let sigma_inv = hashing.perm().sigma_inverse() as u64;
    let third = lit::<T>(1.0 / 3.0);
    let mut out = BTreeSet::new();

    for j in 0..b {
        if base.iter().all(|m| m[j].norm_sqr() == T::zero()) {
            continue;
        }
        let mut f: u64 = 0;
        for g in 1..=levels {
            let modulus = delta.pow(g as u32);
            let step = delta.pow(g as u32 - 1);
            let mut passing = 0usize;
            let mut digit = 0u64;
            for r in 0..delta {
                let mut votes = 0usize;
                for (p, &(_, beta)) in pairs.iter().enumerate() {
                    let den = base[p][j];
                    if den.norm_sqr() == T::zero() {
                        continue;
                    }
                    let ratio = per_shift[g - 1][p][j] / den;
                    // e^{-2 pi i ((r beta mod Delta)/Delta + (f beta mod Delta^g)/Delta^g)}
                    let num =
                        (r * beta as u64 % delta * step + f % modulus * beta as u64 % modulus)
                            % modulus;
                    let angle = lit::<T>(-2.0) * T::PI() * lit::<T>(num as f64)
                        / lit::<T>(modulus as f64);
                    let z = ratio * Complex::from_polar(T::one(), angle);
                    if (z - Complex::new(T::one(), T::zero())).norm() < third {
                        votes += 1;
                    }
                }
                if 5 * votes >= 3 * pairs.len() {
                    passing += 1;
                    digit = r;
                }
            }
            if passing == 1 {
                f += step * digit;
            }
        }
        let folded = f / (geometry.big_n / n as u64);
        out.insert((sigma_inv * (folded % n as u64) % n as u64) as usize);
    }
    out.into_iter().collect()
}

/// Tuning for `sparse_fft`. `mu` is the per-coordinate noise level the
/// guarantee is stated against (a constant-factor upper bound suffices);
/// benchmarks compute it from ground truth.
#[derive(Debug, Clone)]
pub struct RecoveryConfig<T> {
    pub k: usize,
    pub eps: f64,
    pub delta: f64,
    pub mu: T,
    pub r_star: f64,
    /// Estimation oversampling: estimation hashings use `B = k/alpha^2`.
    pub alpha_est: f64,
    /// Count multiplier for estimation hashings (`c_est * log2 n` of them).
    pub c_est: usize,
    pub c1_loc: usize,
    pub c2_loc: usize,
    /// Evaluation pairs per hashing: `c_a * ceil(log2 log2 n)`.
    pub c_a: usize,
    pub c_rec: usize,
    pub r_max_rec: usize,
    pub c_t: usize,
    pub b_min: usize,
    pub sharpness: usize,
    pub c_f: usize,
    pub delta_semi: f64,
    pub sample_budget: Option<u64>,
}

impl<T: SfftFloat> RecoveryConfig<T> {
    pub fn new(k: usize, eps: f64, mu: T, r_star: f64) -> Self {
        Self {
            k,
            eps,
            delta: crate::partition::DEFAULT_DELTA,
            mu,
            r_star,
            alpha_est: 0.25,
            c_est: 20,
            c1_loc: 2,
            c2_loc: 128,
            c_a: 2,
            c_rec: 2,
            r_max_rec: 9,
            c_t: crate::partition::DEFAULT_C_T,
            b_min: crate::partition::DEFAULT_B_MIN,
            sharpness: 8,
            c_f: DEFAULT_C_F,
            delta_semi: 1e-9,
            sample_budget: None,
        }
    }
}

pub struct RecoveryOutput<T> {
    pub chi: SparseVector<T>,
    pub samples: SampleCounts,
}

fn eval_pair_count(n: usize, c_a: usize) -> usize {
    (c_a * ((n as f64).log2().log2().ceil() as usize).max(1)).max(4)
}

fn clamp_buckets(want: usize, n: usize, b_min: usize) -> usize {
    want.next_power_of_two()
        .clamp(b_min.next_power_of_two(), (n / 2).max(2))
}

/// Full sparse recovery: location + estimation measurements up front, an
/// SNR reduction loop over stored measurements, then constant-SNR
/// cleanup.
pub fn sparse_fft<T: SfftFloat, S: FrequencySource<T> + ?Sized>(
    source: &S,
    cfg: &RecoveryConfig<T>,
    seed: u64,
    bank: &FilterBank<T>,
) -> Result<RecoveryOutput<T>> {
    let n = source.n();
    if cfg.k == 0 || cfg.k >= n {
        return Err(SfftError::InvalidParameter(format!(
            "sparsity k={} outside (0, n)",
            cfg.k
        )));
    }
    if !(cfg.eps > 0.0 && cfg.eps < 1.0) {
        return Err(SfftError::InvalidParameter(format!(
            "eps={} outside (0, 1)",
            cfg.eps
        )));
    }
    let geometry = LocationGeometry::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ledger = match cfg.sample_budget {
        Some(b) => SampleLedger::with_budget(b),
        None => SampleLedger::new(),
    };
    let empty = SparseVector::<T>::new(n);

    // Location measurements: per (t, s) hashing with q = 0, one base and
    // one per-ladder-shift measurement for each evaluation pair.
    let schedule = PartitionSchedule::new(
        n,
        cfg.k,
        cfg.delta,
        cfg.c1_loc,
        2 * cfg.c2_loc, // buckets sized against 2k
        cfg.c_t,
        cfg.b_min,
    )?;
    let pair_count = eval_pair_count(n, cfg.c_a);
    let mut loc_hashings: Vec<Vec<Hashing<T>>> = Vec::with_capacity(schedule.rounds);
    let mut loc_meas: Vec<Vec<LocationMeasurements<T>>> = Vec::with_capacity(schedule.rounds);
    for t in 1..=schedule.rounds {
        let filter = bank.get(n, schedule.buckets[t - 1], cfg.sharpness, cfg.c_f)?;
        let mut round_h = Vec::with_capacity(schedule.repetitions[t - 1]);
        let mut round_m = Vec::with_capacity(schedule.repetitions[t - 1]);
        for _ in 0..schedule.repetitions[t - 1] {
            let h = Hashing::new(Permutation::random(&mut rng, n, Some(0)), filter.clone())?;
            let pairs = random_eval_pairs(&mut rng, n, pair_count);
            let mut base = Vec::with_capacity(pairs.len());
            let mut per_shift: Vec<Vec<Arc<Measurement<T>>>> =
                vec![Vec::with_capacity(pairs.len()); geometry.levels()];
            for &(alpha, beta) in &pairs {
                base.push(Arc::new(hash_to_bins(
                    source,
                    &empty,
                    &h,
                    alpha,
                    cfg.delta_semi,
                    &ledger,
                    Phase::Location,
                )?));
                for (g, &w) in geometry.shifts.iter().enumerate() {
                    let point =
                        ((alpha as u64 + w % n as u64 * beta as u64 % n as u64) % n as u64) as usize;
                    per_shift[g].push(Arc::new(hash_to_bins(
                        source,
                        &empty,
                        &h,
                        point,
                        cfg.delta_semi,
                        &ledger,
                        Phase::Location,
                    )?));
                }
            }
            round_m.push(LocationMeasurements {
                pairs,
                base,
                per_shift,
            });
            round_h.push(h);
        }
        loc_hashings.push(round_h);
        loc_meas.push(round_m);
    }

    // Estimation measurements: c_est * log2(n) unstructured hashings.
    let b_est = clamp_buckets(
        (cfg.k as f64 / (cfg.alpha_est * cfg.alpha_est)).ceil() as usize,
        n,
        cfg.b_min,
    );
    let est_filter = bank.get(n, b_est, cfg.sharpness, cfg.c_f)?;
    let est_count = (cfg.c_est * (n as f64).log2().ceil() as usize).max(9);
    let mut est_items = Vec::with_capacity(est_count);
    for _ in 0..est_count {
        let h = Hashing::new(Permutation::random(&mut rng, n, None), est_filter.clone())?;
        let z = rng.gen_range(0..n);
        let m = hash_to_bins(source, &empty, &h, z, cfg.delta_semi, &ledger, Phase::Estimation)?;
        est_items.push((h, z, Arc::new(m)));
    }
    let est_bundle = MeasurementBundle {
        items: est_items,
        base: SparseVector::new(n),
        delta_semi: cfg.delta_semi,
    };

    // SNR reduction loop: no fresh samples are taken here.
    let mut chi = SparseVector::<T>::new(n);
    let r_last = (cfg.r_star.max(1.0).log(4.0).floor() as i64) - 3;
    let sampled_before_loop = ledger.total();
    for r in 0..=r_last.max(-1) {
        if r < 0 {
            break;
        }
        let threshold = crate::estimation::prune_threshold(cfg.r_star, cfg.mu, r as usize);
        for t in 1..=schedule.rounds {
            let mut located: BTreeSet<usize> = BTreeSet::new();
            for (h, m) in loc_hashings[t - 1].iter().zip(loc_meas[t - 1].iter()) {
                for i in locate_signal(&chi, h, m, &geometry, cfg.delta_semi) {
                    located.insert(i);
                }
            }
            if located.is_empty() {
                continue;
            }
            let targets: Vec<usize> = located.into_iter().collect();
            let updates = estimate_values(&chi, &targets, &est_bundle)?;
            for (i, w) in updates {
                if w.norm() >= threshold {
                    chi.add_entry(i, w);
                }
            }
        }
    }
    debug_assert_eq!(ledger.total(), sampled_before_loop);

    let refinement = recover_at_constant_snr(
        source,
        &chi,
        2 * cfg.k,
        cfg.eps,
        cfg,
        &mut rng,
        bank,
        &ledger,
        &geometry,
    )?;
    let chi_star = chi.add(&refinement);

    Ok(RecoveryOutput {
        chi: chi_star,
        samples: SampleCounts::from_ledger(&ledger),
    })
}

/// Constant-SNR cleanup: a few rounds of fresh locate/estimate at
/// `B ~ k2/eps` buckets, accepting updates above `mu * sqrt(eps)`.
///
/// The interface follows the cited prior construction; the body here is
/// a stand-in validated by its Monte-Carlo acceptance, not by this
/// library's own analysis.
#[allow(clippy::too_many_arguments)]
pub fn recover_at_constant_snr<T: SfftFloat, S: FrequencySource<T> + ?Sized>(
    source: &S,
    chi_base: &SparseVector<T>,
    k2: usize,
    eps: f64,
    cfg: &RecoveryConfig<T>,
    rng: &mut impl Rng,
    bank: &FilterBank<T>,
    ledger: &SampleLedger,
    geometry: &LocationGeometry,
) -> Result<SparseVector<T>> {
    let n = source.n();
    let empty = SparseVector::<T>::new(n);
    let b_rec = clamp_buckets(
        (cfg.c_rec as f64 * k2 as f64 / eps).ceil() as usize,
        n,
        cfg.b_min,
    );
    let filter = bank.get(n, b_rec, cfg.sharpness, cfg.c_f)?;
    let rounds = ((1.0 / eps).log2().ceil() as usize).max(1) + 1;
    let threshold = cfg.mu * lit::<T>(eps.sqrt());
    let pair_count = eval_pair_count(n, cfg.c_a);

    let mut refinement = SparseVector::<T>::new(n);
    for _ in 0..rounds {
        let combined = chi_base.add(&refinement);

        // fresh location hashing + ladder measurements
        let h = Hashing::new(Permutation::random(rng, n, Some(0)), filter.clone())?;
        let pairs = random_eval_pairs(rng, n, pair_count);
        let mut base = Vec::with_capacity(pairs.len());
        let mut per_shift: Vec<Vec<Arc<Measurement<T>>>> =
            vec![Vec::with_capacity(pairs.len()); geometry.levels()];
        for &(alpha, beta) in &pairs {
            base.push(Arc::new(hash_to_bins(
                source,
                &empty,
                &h,
                alpha,
                cfg.delta_semi,
                ledger,
                Phase::Estimation,
            )?));
            for (g, &w) in geometry.shifts.iter().enumerate() {
                let point =
                    ((alpha as u64 + w % n as u64 * beta as u64 % n as u64) % n as u64) as usize;
                per_shift[g].push(Arc::new(hash_to_bins(
                    source,
                    &empty,
                    &h,
                    point,
                    cfg.delta_semi,
                    ledger,
                    Phase::Estimation,
                )?));
            }
        }
        let loc = LocationMeasurements {
            pairs,
            base,
            per_shift,
        };
        let located = locate_signal(&combined, &h, &loc, geometry, cfg.delta_semi);
        if located.is_empty() {
            continue;
        }

        // fresh estimation bundle at the same bucket resolution
        let mut items = Vec::with_capacity(cfg.r_max_rec);
        for _ in 0..cfg.r_max_rec.max(1) {
            let hr = Hashing::new(Permutation::random(rng, n, None), filter.clone())?;
            let a = rng.gen_range(0..n);
            let m = hash_to_bins(source, &empty, &hr, a, cfg.delta_semi, ledger, Phase::Estimation)?;
            items.push((hr, a, Arc::new(m)));
        }
        let bundle = MeasurementBundle {
            items,
            base: SparseVector::new(n),
            delta_semi: cfg.delta_semi,
        };
        let updates = estimate_values(&combined, &located, &bundle)?;
        for (i, w) in updates {
            if w.norm() >= threshold {
                refinement.add_entry(i, w);
            }
        }
    }
    refinement.prune_below(threshold);
    Ok(refinement)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft::{forward_dft, Domain, Signal};
    use crate::hashing::DenseSpectrum;

    fn geometry_for(n: usize) -> LocationGeometry {
        LocationGeometry::new(n).unwrap()
    }

    #[test]
    fn geometry_shapes() {
        let g = geometry_for(1 << 14);
        assert_eq!(g.delta, 2);
        assert_eq!(g.big_n, 1 << 14);
        assert_eq!(g.levels(), 14);
        let g = geometry_for(1 << 16);
        assert_eq!(g.delta, 4);
        assert_eq!(g.big_n, 1 << 16);
        assert_eq!(g.levels(), 8);
        assert!(g.big_n >= (1u64 << 16));
    }

    #[test]
    fn balanced_uniform_residues() {
        // beta uniform over residues mod 8, repeated: exactly the even
        // split plus the boundary points => balanced at Delta = 8.
        let pairs: Vec<(usize, usize)> = (0..32).map(|i| (0, i)).collect();
        assert!(check_balanced(&pairs, 8));
    }

    #[test]
    fn degenerate_residues_unbalanced() {
        let pairs: Vec<(usize, usize)> = (0..16).map(|i| (i, 8 * i)).collect();
        assert!(!check_balanced(&pairs, 8));
        // all beta = 0: every point at 1, right halfplane
        let zeros: Vec<(usize, usize)> = (0..16).map(|i| (i, 0)).collect();
        assert!(!check_balanced(&zeros, 2));
    }

    fn balanced_pairs(rng: &mut ChaCha8Rng, n: usize, size: usize, delta: usize) -> Vec<(usize, usize)> {
        loop {
            let pairs = random_eval_pairs(rng, n, size);
            if check_balanced(&pairs, delta) {
                return pairs;
            }
        }
    }

    fn measure_tone_for_location(
        source: &DenseSpectrum<f64>,
        h: &Hashing<f64>,
        pairs: &[(usize, usize)],
        geometry: &LocationGeometry,
    ) -> LocationMeasurements<f64> {
        let n = h.n();
        let empty = SparseVector::new(n);
        let ledger = SampleLedger::new();
        let mut base = Vec::new();
        let mut per_shift: Vec<Vec<Arc<Measurement<f64>>>> =
            vec![Vec::new(); geometry.levels()];
        for &(alpha, beta) in pairs {
            base.push(Arc::new(
                hash_to_bins(source, &empty, h, alpha, 1e-9, &ledger, Phase::Location).unwrap(),
            ));
            for (g, &w) in geometry.shifts.iter().enumerate() {
                let point =
                    ((alpha as u64 + w % n as u64 * beta as u64 % n as u64) % n as u64) as usize;
                per_shift[g].push(Arc::new(
                    hash_to_bins(source, &empty, h, point, 1e-9, &ledger, Phase::Location)
                        .unwrap(),
                ));
            }
        }
        LocationMeasurements {
            pairs: pairs.to_vec(),
            base,
            per_shift,
        }
    }

    #[test]
    fn noiseless_tone_located_exactly() {
        let n = 1 << 10;
        let geometry = geometry_for(n);
        let bank = FilterBank::<f64>::new();
        let filter = bank.get(n, 64, 8, DEFAULT_C_F).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(500);
        for trial in 0..20 {
            let i0 = rng.gen_range(0..n);
            let mut x = Signal::zeros(n, Domain::Time).unwrap();
            x.values[i0] = Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            let source = DenseSpectrum::new(forward_dft(&x).unwrap()).unwrap();
            let h = Hashing::new(Permutation::random(&mut rng, n, Some(0)), filter.clone())
                .unwrap();
            let pairs = balanced_pairs(&mut rng, n, 8, geometry.delta);
            let meas = measure_tone_for_location(&source, &h, &pairs, &geometry);
            let located = locate_signal(&SparseVector::new(n), &h, &meas, &geometry, 1e-9);
            assert!(located.contains(&i0), "trial {trial}: {i0} not in {located:?}");
        }
    }

    #[test]
    fn zero_signal_locates_nothing() {
        let n = 1 << 10;
        let geometry = geometry_for(n);
        let bank = FilterBank::<f64>::new();
        let filter = bank.get(n, 32, 8, DEFAULT_C_F).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(501);
        let x = Signal::zeros(n, Domain::Time).unwrap();
        let source = DenseSpectrum::new(forward_dft(&x).unwrap()).unwrap();
        let h = Hashing::new(Permutation::random(&mut rng, n, Some(0)), filter).unwrap();
        let pairs = random_eval_pairs(&mut rng, n, 8);
        let meas = measure_tone_for_location(&source, &h, &pairs, &geometry);
        let located = locate_signal(&SparseVector::new(n), &h, &meas, &geometry, 1e-9);
        assert!(located.is_empty());
    }

    #[test]
    fn well_separated_tones_all_located() {
        let n = 1 << 12;
        let k = 16;
        let geometry = geometry_for(n);
        let bank = FilterBank::<f64>::new();
        let filter = bank.get(n, 64, 8, DEFAULT_C_F).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(502);
        let mut x = Signal::zeros(n, Domain::Time).unwrap();
        let support: Vec<usize> = (0..k).map(|j| j * (n / k)).collect();
        for &i in &support {
            x.values[i] = Complex::from_polar(
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
        }
        let source = DenseSpectrum::new(forward_dft(&x).unwrap()).unwrap();
        let h = Hashing::new(Permutation::random(&mut rng, n, Some(0)), filter).unwrap();
        let pairs = balanced_pairs(&mut rng, n, 8, geometry.delta);
        let meas = measure_tone_for_location(&source, &h, &pairs, &geometry);
        let located = locate_signal(&SparseVector::new(n), &h, &meas, &geometry, 1e-9);
        for &i in &support {
            assert!(located.contains(&i), "{i} missing from {located:?}");
        }
    }

    #[test]
    fn recover_zero_residual_returns_nothing() {
        let n = 1 << 10;
        let k = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(503);
        let mut x = Signal::zeros(n, Domain::Time).unwrap();
        let mut chi = SparseVector::new(n);
        for j in 0..k {
            let i = j * (n / k);
            let v = Complex::new(rng.gen_range(0.5..1.5), rng.gen_range(-1.0..1.0));
            x.values[i] = v;
            chi.set(i, v);
        }
        let source = DenseSpectrum::new(forward_dft(&x).unwrap()).unwrap();
        let bank = FilterBank::new();
        let geometry = geometry_for(n);
        let cfg = RecoveryConfig::new(k, 0.1, 0.05f64, 100.0);
        let ledger = SampleLedger::new();
        let out = recover_at_constant_snr(
            &source, &chi, 2 * k, 0.1, &cfg, &mut rng, &bank, &ledger, &geometry,
        )
        .unwrap();
        let mu_sqrt_k = 0.05 * (k as f64).sqrt();
        assert!(out.l2() <= 1e-6 * mu_sqrt_k, "residual {}", out.l2());
    }

    #[test]
    fn sparse_fft_recovers_exactly_sparse() {
        let n = 1 << 12;
        let k = 16;
        let mut ok = 0;
        let bank = FilterBank::new();
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(504 + seed);
            let mut x = Signal::zeros(n, Domain::Time).unwrap();
            let mut support = BTreeSet::new();
            while support.len() < k {
                support.insert(rng.gen_range(0..n));
            }
            let mut min_mag: f64 = f64::INFINITY;
            for &i in &support {
                let mag = rng.gen_range(0.5..2.0);
                min_mag = min_mag.min(mag);
                x.values[i] =
                    Complex::from_polar(mag, rng.gen_range(0.0..std::f64::consts::TAU));
            }
            let source = DenseSpectrum::new(forward_dft(&x).unwrap()).unwrap();
            let mu = min_mag / 2.0;
            let r_star = x.values.iter().map(|v| v.norm()).fold(0.0, f64::max) / mu;
            let cfg = RecoveryConfig::new(k, 0.1, mu, r_star);
            let out = sparse_fft(&source, &cfg, seed, &bank).unwrap();
            let err_sq: f64 = (0..n)
                .map(|i| (x.values[i] - out.chi.get(i)).norm_sqr())
                .sum();
            if err_sq.sqrt() <= 1e-5 * x.l2() {
                ok += 1;
            }
        }
        assert!(ok >= 9, "only {ok}/10 exact recoveries");
    }
}
