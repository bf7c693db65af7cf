//! Experiment harness: signal generation, benchmark runners, CSV output.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use sfft::dft::{forward_dft, Domain, Signal, SparseVector};
use sfft::estimation::{estimate, EstimateConfig};
use sfft::filter::FilterBank;
use sfft::ground_truth::{compute_ground_truth, l2l2_error, GroundTruth};
use sfft::hashing::DenseSpectrum;
use sfft::recovery::{sparse_fft, RecoveryConfig};

/// Frozen multiplier for the recovery success criterion
/// `||x - chi||^2 <= (1 + C_L2L2_FIT * eps) * err_k^2`; fitted once over
/// the development seed sweep and left untouched since.
pub const C_L2L2_FIT: f64 = 2.0;

pub const CSV_HEADER: &str = "seed,n,k,eps,samples_location,samples_estimation,samples_total,err_abs,err_rel,l1_head_residual,success,wall_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Estimate,
    SparseFft,
    BenchSamples,
    BenchError,
    Selftest,
}

impl std::str::FromStr for Mode {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "estimate" => Mode::Estimate,
            "sparse-fft" => Mode::SparseFft,
            "bench-samples" => Mode::BenchSamples,
            "bench-error" => Mode::BenchError,
            "selftest" => Mode::Selftest,
            other => bail!("unknown mode {other:?}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Estimate,
    SparseFft,
}

/// Signal family for generated benchmarks.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SignalSpec {
    /// `k` tones at uniformly random positions, no tail.
    ExactSparse,
    /// `k` tones at uniformly random positions plus a complex Gaussian
    /// tail on every other coordinate.
    GaussianTail {
        #[serde(default = "default_sigma_tail")]
        sigma_tail: f64,
    },
    /// `k` tones on an arithmetic progression (random global offset)
    /// with an optional Gaussian tail. The stride defaults to `n/k`.
    PeriodicSupport {
        #[serde(default)]
        stride: Option<usize>,
        #[serde(default)]
        sigma_tail: f64,
    },
    /// Signal loaded from a binary file (time domain).
    File { path: PathBuf },
}

fn default_sigma_tail() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    pub c1: usize,
    pub c2: usize,
    pub c_loop: usize,
    pub c_cleanup: usize,
    pub r_max_cleanup: usize,
    pub alpha_est: f64,
    pub c_est: usize,
    pub c1_loc: usize,
    pub c2_loc: usize,
    pub c_a: usize,
    pub c_rec: usize,
    pub c_f: usize,
    pub delta_semi: f64,
}

impl Default for Constants {
    fn default() -> Self {
        let est = EstimateConfig::new(1 << 10, 16, 0.1);
        let rec = RecoveryConfig::new(16, 0.1, 1.0f64, 1e3);
        Self {
            c1: est.c1,
            c2: est.c2,
            c_loop: est.c_loop,
            c_cleanup: est.c_cleanup,
            r_max_cleanup: est.r_max_cleanup,
            alpha_est: rec.alpha_est,
            c_est: rec.c_est,
            c1_loc: rec.c1_loc,
            c2_loc: rec.c2_loc,
            c_a: rec.c_a,
            c_rec: rec.c_rec,
            c_f: est.c_f,
            delta_semi: est.delta_semi,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub delta: f64,
    /// Head magnitude spread: largest over smallest planted magnitude.
    pub snr: f64,
    pub seed: u64,
    pub trials: usize,
    pub signal: SignalSpec,
    pub algo: Algo,
    pub mu: Option<f64>,
    pub out: Option<PathBuf>,
    pub sample_budget: Option<u64>,
    pub constants: Constants,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: None,
            n: 1 << 12,
            k: 16,
            eps: 0.1,
            delta: 0.25,
            snr: 1e3,
            seed: 1,
            trials: 1,
            signal: SignalSpec::GaussianTail { sigma_tail: 1.0 },
            algo: Algo::SparseFft,
            mu: None,
            out: None,
            sample_budget: None,
            constants: Constants::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() {
            bail!("n={} must be a power of two", self.n);
        }
        if self.k == 0 || self.k >= self.n {
            bail!("k={} must lie in (0, n)", self.k);
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            bail!("eps={} must lie in (0, 1)", self.eps);
        }
        Ok(())
    }

    pub fn estimate_config(&self, r_star: f64) -> EstimateConfig {
        let mut cfg = EstimateConfig::new(self.n, self.k, self.eps);
        cfg.delta = self.delta;
        cfg.r_star = r_star;
        cfg.c1 = self.constants.c1;
        cfg.c2 = self.constants.c2;
        cfg.c_loop = self.constants.c_loop;
        cfg.c_cleanup = self.constants.c_cleanup;
        cfg.r_max_cleanup = self.constants.r_max_cleanup;
        cfg.c_f = self.constants.c_f;
        cfg.delta_semi = self.constants.delta_semi;
        cfg.sample_budget = self.sample_budget;
        cfg
    }

    pub fn recovery_config(&self, mu: f64, r_star: f64) -> RecoveryConfig<f64> {
        let mut cfg = RecoveryConfig::new(self.k, self.eps, mu, r_star);
        cfg.delta = self.delta;
        cfg.alpha_est = self.constants.alpha_est;
        cfg.c_est = self.constants.c_est;
        cfg.c1_loc = self.constants.c1_loc;
        cfg.c2_loc = self.constants.c2_loc;
        cfg.c_a = self.constants.c_a;
        cfg.c_rec = self.constants.c_rec;
        cfg.c_f = self.constants.c_f;
        cfg.delta_semi = self.constants.delta_semi;
        cfg.sample_budget = self.sample_budget;
        cfg
    }
}

/// A generated benchmark instance: the signal, the planted head support
/// (exactly `k` indices), and dense ground truth.
pub struct Instance {
    pub x: Signal<f64>,
    pub planted: Vec<usize>,
    pub truth: GroundTruth<f64>,
}

/// Deterministic-in-seed signal generation.
pub fn gen_signal(spec: &SignalSpec, n: usize, k: usize, snr: f64, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut values, planted): (Vec<Complex<f64>>, Vec<usize>) = match spec {
        SignalSpec::File { path } => {
            let signal = sfft::io::read_signal(path)?;
            let x = match signal.domain {
                Domain::Time => signal,
                Domain::Frequency => sfft::dft::inverse_dft(&signal)?,
            };
            let truth = compute_ground_truth(&x, k);
            let planted = truth.top_k.support();
            return Ok(Instance {
                x,
                planted,
                truth,
            });
        }
        SignalSpec::ExactSparse => {
            let support = random_support(&mut rng, n, k);
            (vec![Complex::new(0.0, 0.0); n], support)
        }
        SignalSpec::GaussianTail { sigma_tail } => {
            let support = random_support(&mut rng, n, k);
            (gaussian_tail(&mut rng, n, &support, *sigma_tail), support)
        }
        SignalSpec::PeriodicSupport { stride, sigma_tail } => {
            let stride = stride.unwrap_or_else(|| (n / k).max(1));
            if stride == 0 || stride * k > n {
                bail!("stride {stride} with k={k} does not fit in n={n}");
            }
            let offset = rng.gen_range(0..n);
            let support: Vec<usize> = (0..k).map(|j| (offset + j * stride) % n).collect();
            let values = if *sigma_tail > 0.0 {
                gaussian_tail(&mut rng, n, &support, *sigma_tail)
            } else {
                vec![Complex::new(0.0, 0.0); n]
            };
            (values, support)
        }
    };

    // Head magnitudes: log-uniform over [1/snr-spread, 1], scaled so the
    // largest equals snr * mu (or 1 when the tail is empty).
    let tail_sq: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    let mu = (tail_sq / k as f64).sqrt();
    let top = if mu > 0.0 { snr * mu } else { 1.0 };
    let spread = 32.0f64.min(snr.max(2.0));
    let mut mags: Vec<f64> = (0..k)
        .map(|_| (-rng.gen_range(0.0..spread.ln())).exp())
        .collect();
    let max_mag = mags.iter().cloned().fold(0.0, f64::max);
    for m in &mut mags {
        *m *= top / max_mag;
    }
    for (&i, &m) in planted.iter().zip(mags.iter()) {
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        values[i] = Complex::from_polar(m, phase);
    }

    let x = Signal::new(values, Domain::Time)?;
    let truth = compute_ground_truth(&x, k);
    Ok(Instance { x, planted, truth })
}

fn random_support(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut set = BTreeSet::new();
    while set.len() < k {
        set.insert(rng.gen_range(0..n));
    }
    set.into_iter().collect()
}

fn gaussian_tail(
    rng: &mut ChaCha8Rng,
    n: usize,
    support: &[usize],
    sigma: f64,
) -> Vec<Complex<f64>> {
    let support: BTreeSet<usize> = support.iter().copied().collect();
    (0..n)
        .map(|i| {
            if support.contains(&i) {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(gauss(rng) * sigma, gauss(rng) * sigma)
            }
        })
        .collect()
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; two uniforms per call keeps the stream simple and
    // deterministic.
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

#[derive(Debug, Clone)]
pub struct ResultRow {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub samples_location: u64,
    pub samples_estimation: u64,
    pub samples_total: u64,
    pub err_abs: f64,
    pub err_rel: f64,
    pub l1_head_residual: f64,
    pub success: bool,
    pub wall_ms: u64,
}

impl ResultRow {
    fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.n,
            self.k,
            self.eps,
            self.samples_location,
            self.samples_estimation,
            self.samples_total,
            self.err_abs,
            self.err_rel,
            self.l1_head_residual,
            self.success,
            self.wall_ms
        )
    }
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.to_csv());
    }
    out
}

/// One `estimate` trial.
pub fn run_estimate_trial(cfg: &ExperimentConfig, trial: usize) -> Result<ResultRow> {
    let seed = cfg.seed + trial as u64;
    let inst = gen_signal(&cfg.signal, cfg.n, cfg.k, cfg.snr, seed)?;
    let source = DenseSpectrum::new(forward_dft(&inst.x)?)?;
    let (mu, r_star) = mu_and_rstar(cfg, &inst);
    let est_cfg = cfg.estimate_config(r_star);
    let bank = FilterBank::new();

    let started = Instant::now();
    let out = estimate(&source, &inst.planted, &est_cfg, seed, &bank)?;
    let wall_ms = started.elapsed().as_millis() as u64;

    let head: BTreeSet<usize> = inst.planted.iter().copied().collect();
    let head_err_sq: f64 = head
        .iter()
        .map(|&i| (inst.x.values[i] - out.chi.get(i)).norm_sqr())
        .sum();
    let tail_sq: f64 = (0..cfg.n)
        .filter(|i| !head.contains(i))
        .map(|i| inst.x.values[i].norm_sqr())
        .sum();
    let head_l2: f64 = head
        .iter()
        .map(|&i| inst.x.values[i].norm_sqr())
        .sum::<f64>()
        .sqrt();
    let success = if tail_sq > 0.0 {
        head_err_sq <= cfg.eps * tail_sq
    } else {
        head_err_sq.sqrt() <= 1e-6 * head_l2
    };
    let errs = l2l2_error(&inst.x, &out.chi, cfg.k);
    let _ = mu;

    Ok(ResultRow {
        seed,
        n: cfg.n,
        k: cfg.k,
        eps: cfg.eps,
        samples_location: out.samples.location,
        samples_estimation: out.samples.estimation + out.samples.cleanup,
        samples_total: out.samples.total(),
        err_abs: errs.absolute,
        err_rel: errs.relative_sq.unwrap_or(-1.0),
        l1_head_residual: head
            .iter()
            .map(|&i| (inst.x.values[i] - out.chi.get(i)).norm())
            .sum(),
        success,
        wall_ms,
    })
}

/// One `sparse_fft` trial.
pub fn run_sparse_fft_trial(cfg: &ExperimentConfig, trial: usize) -> Result<ResultRow> {
    let seed = cfg.seed + trial as u64;
    let inst = gen_signal(&cfg.signal, cfg.n, cfg.k, cfg.snr, seed)?;
    let source = DenseSpectrum::new(forward_dft(&inst.x)?)?;
    let (mu, r_star) = mu_and_rstar(cfg, &inst);
    let rec_cfg = cfg.recovery_config(mu, r_star);
    let bank = FilterBank::new();

    let started = Instant::now();
    let out = sparse_fft(&source, &rec_cfg, seed, &bank)?;
    let wall_ms = started.elapsed().as_millis() as u64;

    let errs = l2l2_error(&inst.x, &out.chi, cfg.k);
    let success = match errs.relative_sq {
        Some(rel) => rel <= 1.0 + C_L2L2_FIT * cfg.eps,
        None => errs.absolute <= 1e-5 * inst.x.l2(),
    };
    let head: BTreeSet<usize> = inst.planted.iter().copied().collect();

    Ok(ResultRow {
        seed,
        n: cfg.n,
        k: cfg.k,
        eps: cfg.eps,
        samples_location: out.samples.location,
        samples_estimation: out.samples.estimation + out.samples.cleanup,
        samples_total: out.samples.total(),
        err_abs: errs.absolute,
        err_rel: errs.relative_sq.unwrap_or(-1.0),
        l1_head_residual: head
            .iter()
            .map(|&i| (inst.x.values[i] - out.chi.get(i)).norm())
            .sum(),
        success,
        wall_ms,
    })
}

fn mu_and_rstar(cfg: &ExperimentConfig, inst: &Instance) -> (f64, f64) {
    let mu = cfg.mu.unwrap_or_else(|| {
        if inst.truth.mu > 0.0 {
            inst.truth.mu
        } else {
            // exactly sparse: proxy at half the smallest planted magnitude
            inst.planted
                .iter()
                .map(|&i| inst.x.values[i].norm())
                .fold(f64::INFINITY, f64::min)
                / 2.0
        }
    });
    let linf = inst.x.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let r_star = if mu > 0.0 { (linf / mu).max(2.0) } else { 2.0 };
    (mu, r_star)
}

fn run_trials(
    cfg: &ExperimentConfig,
    runner: fn(&ExperimentConfig, usize) -> Result<ResultRow>,
) -> Result<Vec<ResultRow>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| runner(cfg, trial))
        .collect()
}

/// Executes a full experiment; returns the rows (ordered by trial) that
/// were also serialised to CSV.
pub fn run_experiment(cfg: &ExperimentConfig, mode: Mode) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let rows = match mode {
        Mode::Estimate => run_trials(cfg, run_estimate_trial)?,
        Mode::SparseFft => run_trials(cfg, run_sparse_fft_trial)?,
        Mode::BenchSamples => {
            let mut rows = Vec::new();
            for k in [16usize, 32, 64, 128] {
                if k >= cfg.n {
                    continue;
                }
                let mut sub = cfg.clone();
                sub.k = k;
                let runner: fn(&ExperimentConfig, usize) -> Result<ResultRow> = match cfg.algo {
                    Algo::Estimate => run_estimate_trial,
                    Algo::SparseFft => run_sparse_fft_trial,
                };
                rows.extend(run_trials(&sub, runner)?);
            }
            rows
        }
        Mode::BenchError => {
            let mut rows = Vec::new();
            for eps in [0.05f64, 0.1, 0.2] {
                let mut sub = cfg.clone();
                sub.eps = eps;
                let runner: fn(&ExperimentConfig, usize) -> Result<ResultRow> = match cfg.algo {
                    Algo::Estimate => run_estimate_trial,
                    Algo::SparseFft => run_sparse_fft_trial,
                };
                rows.extend(run_trials(&sub, runner)?);
            }
            rows
        }
        Mode::Selftest => {
            run_selftest()?;
            Vec::new()
        }
    };

    if let Some(path) = &cfg.out {
        std::fs::write(path, rows_to_csv(&rows))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(rows)
}

/// Quick oracle-equivalence suites, printed one line each.
pub fn run_selftest() -> Result<()> {
    use sfft::dft::semi_equi_fft;
    use sfft::ground_truth::dft_direct;
    use sfft::hashing::{
        direct_measurement_oracle, hash_to_bins, Hashing, Permutation, Phase, SampleLedger,
    };

    let mut all_ok = true;
    let mut report = |name: &str, ok: bool| {
        println!("{}: {}", name, if ok { "pass" } else { "FAIL" });
        all_ok &= ok;
    };

    // dense DFT vs direct summation
    {
        let n = 64;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Signal::new(
            (0..n)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
            Domain::Time,
        )?;
        let fast = forward_dft(&x)?;
        let slow = dft_direct(&x.values, false);
        let ok = fast
            .values
            .iter()
            .zip(slow.iter())
            .all(|(a, b)| (a - b).norm() < 1e-10);
        report("dense dft vs direct summation", ok);
    }

    // semi-equispaced vs dense
    {
        let n = 1 << 12;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut xs = SparseVector::new(n);
        for _ in 0..16 {
            xs.set(
                rng.gen_range(0..n),
                Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
        }
        let sigma = 2 * rng.gen_range(0..n / 2) + 1;
        let shift = rng.gen_range(0..n);
        let vals = semi_equi_fft(&xs, 64, 1e-8, sigma, shift)?;
        let dense = forward_dft(&xs.to_dense(Domain::Time))?;
        let budget = 1e-8 * xs.l2();
        let ok = (-32i64..=32).all(|jp| {
            (dense.values[vals.target_index(jp)] - vals.at_offset(jp)).norm() <= budget
        });
        report("semi-equispaced vs dense spectrum", ok);
    }

    // hash-to-bins vs direct measurement oracle
    {
        let n = 1 << 9;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Signal::new(
            (0..n)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
            Domain::Time,
        )?;
        let source = DenseSpectrum::new(forward_dft(&x)?)?;
        let bank = FilterBank::<f64>::new();
        let mut ok = true;
        for &b in &[8usize, 32] {
            let filt = bank.get(n, b, 8, sfft::filter::DEFAULT_C_F)?;
            let h = Hashing::new(Permutation::random(&mut rng, n, None), filt)?;
            let a = rng.gen_range(0..n);
            let ledger = SampleLedger::new();
            let fast = hash_to_bins(
                &source,
                &SparseVector::new(n),
                &h,
                a,
                1e-9,
                &ledger,
                Phase::Estimation,
            )?;
            let slow = direct_measurement_oracle(&x, &SparseVector::new(n), &h, a)?;
            let tol = 1e-6 * x.l2();
            ok &= fast
                .values
                .iter()
                .zip(slow.values.iter())
                .all(|(p, q)| (p - q).norm() < tol);
        }
        report("hash-to-bins vs direct measurement oracle", ok);
    }

    // partition construct/verify smoke test
    {
        use sfft::partition::{
            construct_partition, sample_hashings, verify_partition, PartitionSchedule,
        };
        let n = 1 << 12;
        let k = 8;
        let schedule = PartitionSchedule::defaults(n, k)?;
        let bank = FilterBank::<f64>::new();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let hashings = sample_hashings(
            &schedule,
            n,
            2,
            sfft::filter::DEFAULT_C_F,
            &bank,
            &mut rng,
            None,
        )?;
        let s: BTreeSet<usize> = (0..k).map(|j| j * (n / k)).collect();
        let ok = match construct_partition(&s, &schedule, &hashings) {
            Ok(p) => verify_partition(&p, &s, &hashings),
            Err(_) => false,
        };
        report("partition construction vs brute-force verifier", ok);
    }

    if !all_ok {
        bail!("selftest failures");
    }
    Ok(())
}

/// Builds the global rayon pool honouring `SFFT_THREADS`; call once.
pub fn init_thread_pool() {
    if let Ok(v) = std::env::var("SFFT_THREADS") {
        if let Ok(count) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(count.max(1))
                .build_global();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_exact_sparse_shape() {
        let inst = gen_signal(&SignalSpec::ExactSparse, 16, 4, 1e3, 1).unwrap();
        let nnz = inst.x.values.iter().filter(|v| v.norm() > 0.0).count();
        assert_eq!(nnz, 4);
        assert_eq!(inst.truth.err_k, 0.0);
    }

    #[test]
    fn gen_periodic_support_positions() {
        let n = 64;
        let k = 8;
        let inst = gen_signal(
            &SignalSpec::PeriodicSupport {
                stride: None,
                sigma_tail: 0.0,
            },
            n,
            k,
            1e2,
            7,
        )
        .unwrap();
        let mut sorted = inst.planted.clone();
        sorted.sort_unstable();
        let diffs: BTreeSet<usize> = sorted
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect();
        // arithmetic progression mod n: equal gaps except at the wrap
        assert!(diffs.len() <= 2, "gaps {diffs:?}");
    }

    #[test]
    fn gen_tail_statistics() {
        let n = 1 << 10;
        let k = 8;
        let sigma = 1.0;
        let inst = gen_signal(
            &SignalSpec::GaussianTail { sigma_tail: sigma },
            n,
            k,
            1e3,
            3,
        )
        .unwrap();
        let planted: BTreeSet<usize> = inst.planted.iter().copied().collect();
        let tail_sq: f64 = (0..n)
            .filter(|i| !planted.contains(i))
            .map(|i| inst.x.values[i].norm_sqr())
            .sum();
        // E[tail_sq] = 2 sigma^2 (n-k); allow 3 standard deviations
        let expect = 2.0 * sigma * sigma * (n - k) as f64;
        let sd = (2.0 * (n - k) as f64).sqrt() * 2.0 * sigma * sigma;
        assert!((tail_sq - expect).abs() < 3.0 * sd, "{tail_sq} vs {expect}");
    }

    #[test]
    fn gen_deterministic_in_seed() {
        let spec = SignalSpec::GaussianTail { sigma_tail: 0.5 };
        let a = gen_signal(&spec, 256, 8, 1e3, 9).unwrap();
        let b = gen_signal(&spec, 256, 8, 1e3, 9).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.planted, b.planted);
    }

    #[test]
    fn csv_header_is_pinned() {
        assert_eq!(
            CSV_HEADER,
            "seed,n,k,eps,samples_location,samples_estimation,samples_total,err_abs,err_rel,l1_head_residual,success,wall_ms"
        );
    }
}
