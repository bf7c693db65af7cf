//! Value estimation from reused measurements and the sample-optimal
//! `estimate` routine.
//!
//! `estimate` takes all its measurements up front (geometrically more
//! repetitions into geometrically fewer buckets per round), constructs an
//! isolating partition of the target set, then runs a double loop that
//! re-decodes the same measurements against the shrinking residual. A
//! final cleanup round with `~k/eps` buckets converts the l1 bound on the
//! residual into the l2 guarantee.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dft::{omega_pow, SparseVector};
use crate::filter::{FilterBank, DEFAULT_C_F};
use crate::hashing::{
    hash_to_bins, sparse_measurement, FrequencySource, Hashing, Measurement, Permutation, Phase,
    SampleLedger,
};
use crate::partition::{construct_partition, sample_hashings, PartitionSchedule};
use crate::{lit, Result, SfftError, SfftFloat};

/// Measurements of one signal against a list of hashings, each at one
/// evaluation point. `base` records the estimate that was already
/// subtracted when the measurements were taken (zero for raw
/// measurements), so decoding against a later estimate `chi` corrects by
/// the measurement of `chi - base` only.
pub struct MeasurementBundle<T> {
    pub items: Vec<(Hashing<T>, usize, Arc<Measurement<T>>)>,
    pub base: SparseVector<T>,
    pub delta_semi: f64,
}

/// Tuning for `estimate`. The defaults are calibrated at desk scale
/// (n up to 2^16); everything is overridable.
#[derive(Debug, Clone)]
pub struct EstimateConfig {
    pub k: usize,
    pub eps: f64,
    pub delta: f64,
    /// Upper bound on the signal-to-noise ratio; drives the loop length.
    pub r_star: f64,
    pub c1: usize,
    pub c2: usize,
    pub c_loop: usize,
    pub c_t: usize,
    pub b_min: usize,
    pub c_cleanup: usize,
    pub r_max_cleanup: usize,
    pub sharpness: usize,
    pub c_f: usize,
    pub delta_semi: f64,
    pub sample_budget: Option<u64>,
    pub partition_retries: usize,
}

pub const DEFAULT_ESTIMATE_C1: usize = 5;
pub const DEFAULT_ESTIMATE_C2: usize = 4096;

impl EstimateConfig {
    pub fn new(n: usize, k: usize, eps: f64) -> Self {
        Self {
            k,
            eps,
            delta: crate::partition::DEFAULT_DELTA,
            r_star: (n as f64).powi(3),
            c1: DEFAULT_ESTIMATE_C1,
            c2: DEFAULT_ESTIMATE_C2,
            c_loop: 1,
            c_t: crate::partition::DEFAULT_C_T,
            b_min: crate::partition::DEFAULT_B_MIN,
            c_cleanup: 2,
            r_max_cleanup: 9,
            sharpness: 8,
            c_f: DEFAULT_C_F,
            delta_semi: 1e-9,
            sample_budget: None,
            partition_retries: 3,
        }
    }

    pub fn schedule(&self, n: usize) -> Result<PartitionSchedule> {
        PartitionSchedule::new(n, self.k, self.delta, self.c1, self.c2, self.c_t, self.b_min)
    }
}

/// Per-run accounting returned beside the estimate.
#[derive(Debug, Clone, Copy, Default)]
pub struct SampleCounts {
    pub location: u64,
    pub estimation: u64,
    pub cleanup: u64,
}

impl SampleCounts {
    pub fn from_ledger(ledger: &SampleLedger) -> Self {
        Self {
            location: ledger.phase_count(Phase::Location),
            estimation: ledger.phase_count(Phase::Estimation),
            cleanup: ledger.phase_count(Phase::Cleanup),
        }
    }

    pub fn total(&self) -> u64 {
        self.location + self.estimation + self.cleanup
    }
}

/// Decodes per-coordinate estimates of `(x - chi)` restricted to `targets`
/// from a measurement bundle: one twisted bucket value per measurement,
/// combined by a coordinatewise median (lower median on even counts).
pub fn estimate_values<T: SfftFloat>(
    chi: &SparseVector<T>,
    targets: &[usize],
    bundle: &MeasurementBundle<T>,
) -> Result<Vec<(usize, Complex<T>)>> {
    if bundle.items.is_empty() {
        return Err(SfftError::EmptyInput("measurement bundle"));
    }
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    let n = bundle.items[0].0.n();
    for &i in targets {
        if i >= n {
            return Err(SfftError::IndexOutOfRange { index: i, n });
        }
    }

    let correction = chi.sub(&bundle.base);
    let mut per_target: Vec<(Vec<T>, Vec<T>)> =
        vec![(Vec::with_capacity(bundle.items.len()), Vec::with_capacity(bundle.items.len())); targets.len()];

    for (hashing, a, raw) in &bundle.items {
        let nq = hashing.n() as u64;
        let corr = sparse_measurement(&correction, hashing, *a, bundle.delta_semi);
        let sigma = hashing.perm().sigma() as u64;
        let sa = sigma * (*a as u64) % nq;
        for (slot, &i) in targets.iter().enumerate() {
            let bucket = hashing.bucket_of(i);
            let value = raw.values[bucket] - corr.values[bucket];
            let gain = hashing.own_gain(i);
            let tw = omega_pow::<T>((nq - sa * (i as u64) % nq) % nq, hashing.n());
            let est = value * tw / gain;
            per_target[slot].0.push(est.re);
            per_target[slot].1.push(est.im);
        }
    }

    Ok(targets
        .iter()
        .zip(per_target.into_iter())
        .map(|(&i, (mut re, mut im))| {
            (i, Complex::new(lower_median(&mut re), lower_median(&mut im)))
        })
        .collect())
}

fn lower_median<T: SfftFloat>(values: &mut [T]) -> T {
    let mid = (values.len() - 1) / 2;
    values
        .select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).expect("non-NaN estimates"))
        .1
        .to_owned()
}

pub struct EstimateOutput<T> {
    pub chi: SparseVector<T>,
    pub samples: SampleCounts,
    pub partition_attempts: usize,
}

/// Sample-optimal estimation of `x` on a known support `S`.
pub fn estimate<T: SfftFloat, S: FrequencySource<T> + ?Sized>(
    source: &S,
    head: &[usize],
    cfg: &EstimateConfig,
    seed: u64,
    bank: &FilterBank<T>,
) -> Result<EstimateOutput<T>> {
    estimate_with_observer(source, head, cfg, seed, bank, |_, _| {})
}

/// As [`estimate`], invoking `observer(r, chi)` after each outer round of
/// the l1-reduction loop (used by the property suite to watch residual
/// decay).
pub fn estimate_with_observer<T: SfftFloat, S: FrequencySource<T> + ?Sized>(
    source: &S,
    head: &[usize],
    cfg: &EstimateConfig,
    seed: u64,
    bank: &FilterBank<T>,
    mut observer: impl FnMut(usize, &SparseVector<T>),
) -> Result<EstimateOutput<T>> {
    let n = source.n();
    if head.is_empty() {
        return Err(SfftError::EmptyInput("target support"));
    }
    let head_set: BTreeSet<usize> = head.iter().copied().collect();
    for &i in &head_set {
        if i >= n {
            return Err(SfftError::IndexOutOfRange { index: i, n });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ledger = match cfg.sample_budget {
        Some(b) => SampleLedger::with_budget(b),
        None => SampleLedger::new(),
    };
    let schedule = cfg.schedule(n)?;

    // Phase 1+2: measurements, then an isolating partition of S; on
    // partition failure everything is resampled.
    let mut attempt = 0;
    let (hashings, points, bundles, partition) = loop {
        attempt += 1;
        let hashings = sample_hashings(
            &schedule,
            n,
            cfg.sharpness,
            cfg.c_f,
            bank,
            &mut rng,
            None,
        )?;
        let mut points: Vec<Vec<usize>> = Vec::with_capacity(schedule.rounds);
        let mut bundles: Vec<MeasurementBundle<T>> = Vec::with_capacity(schedule.rounds);
        for round in &hashings {
            let mut round_points = Vec::with_capacity(round.len());
            let mut items = Vec::with_capacity(round.len());
            for h in round {
                let a = rng.gen_range(0..n);
                round_points.push(a);
                let m = hash_to_bins(
                    source,
                    &SparseVector::new(n),
                    h,
                    a,
                    cfg.delta_semi,
                    &ledger,
                    Phase::Estimation,
                )?;
                items.push((h.clone(), a, Arc::new(m)));
            }
            points.push(round_points);
            bundles.push(MeasurementBundle {
                items,
                base: SparseVector::new(n),
                delta_semi: cfg.delta_semi,
            });
        }
        match construct_partition(&head_set, &schedule, &hashings) {
            Ok(p) => break (hashings, points, bundles, p),
            Err(SfftError::PartitionFailure { .. }) if attempt <= cfg.partition_retries => {
                continue;
            }
            Err(e) => return Err(e),
        }
    };
    let _ = (&hashings, &points);

    // Phase 3: l1-reduction double loop over the reused measurements.
    let outer_rounds = cfg.c_loop * (cfg.r_star.max(1.0).log(4.0).ceil() as usize).max(1);
    let mut chi = SparseVector::<T>::new(n);
    for r in 0..=outer_rounds {
        for t in 1..=schedule.rounds {
            let set = &partition.sets[t - 1];
            if set.is_empty() {
                continue;
            }
            let targets: Vec<usize> = set.iter().copied().collect();
            let updates = estimate_values(&chi, &targets, &bundles[t - 1])?;
            for (i, w) in updates {
                chi.add_entry(i, w);
            }
        }
        observer(r, &chi);
    }

    // Phase 4: cleanup at B ~ k/eps buckets with fresh residual
    // measurements.
    let b_cleanup = ((cfg.c_cleanup as f64 * cfg.k as f64 / cfg.eps).ceil() as usize)
        .next_power_of_two()
        .clamp(cfg.b_min.next_power_of_two(), (n / 2).max(2));
    let filter = bank.get(n, b_cleanup, cfg.sharpness, cfg.c_f)?;
    let mut items = Vec::with_capacity(cfg.r_max_cleanup);
    for _ in 0..cfg.r_max_cleanup.max(1) {
        let perm = Permutation::random(&mut rng, n, None);
        let h = Hashing::new(perm, filter.clone())?;
        let a = rng.gen_range(0..n);
        let m = hash_to_bins(source, &chi, &h, a, cfg.delta_semi, &ledger, Phase::Cleanup)?;
        items.push((h, a, Arc::new(m)));
    }
    let cleanup_bundle = MeasurementBundle {
        items,
        base: chi.clone(),
        delta_semi: cfg.delta_semi,
    };
    let targets: Vec<usize> = head_set.iter().copied().collect();
    let updates = estimate_values(&chi, &targets, &cleanup_bundle)?;
    for (i, w) in updates {
        chi.add_entry(i, w);
    }

    Ok(EstimateOutput {
        chi,
        samples: SampleCounts::from_ledger(&ledger),
        partition_attempts: attempt,
    })
}

/// Residual l1 norm on a set, against a dense reference signal.
pub fn residual_l1_on<T: SfftFloat>(
    x: &[Complex<T>],
    chi: &SparseVector<T>,
    set: &BTreeSet<usize>,
) -> T {
    set.iter()
        .map(|&i| (x[i] - chi.get(i)).norm())
        .fold(T::zero(), |a, b| a + b)
}

/// Convenience: magnitude-descending threshold schedule value
/// `(1/16) R* mu (1/4)^r` used by the recovery loop's pruning.
pub fn prune_threshold<T: SfftFloat>(r_star: f64, mu: T, round: usize) -> T {
    lit::<T>(r_star / 16.0 * 0.25f64.powi(round as i32)) * mu
}
