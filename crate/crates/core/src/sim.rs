//! Synthetic sample-efficiency experiment: an agent trained on convergent
//! failure cases against one trained on diverse success trajectories.
//!
//! Protocol per seed:
//!
//! 1. `n_patterns` centers are drawn in an `m_dim`-dimensional subspace of
//!    an `ds_dim` ambient space, scaled so that the expected squared
//!    separation does not depend on `m_dim`.
//! 2. Failure cases are cluster members whose variation spans `m_dim`
//!    coordinates. Success trajectories are members of the same clusters
//!    whose variation spans all `ds_dim` coordinates.
//! 3. Each agent is a nearest-centroid classifier fit to its own `n`
//!    samples (labels assigned round-robin, so every pattern is seen).
//! 4. Both agents face the same `eval_size` shocked scenarios, each a
//!    pattern draw plus an alignment flag. Each agent sees the scenario
//!    through its own view. A correct classification avoids the failure
//!    (reward 1, penalty 0); a miss earns reward 0 and penalty equal to the
//!    alignment flag. Utility is mean reward minus mean penalty.
//!
//! With `m_dim == ds_dim` the two agents face identically distributed
//! problems, which is the null control.
//!
//! Randomness is `ChaCha8Rng::seed_from_u64(seed)` with one stream per role.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RNG_NAME: &str = "ChaCha8Rng/seed_from_u64/streams{centers:0,failure_train:1,success_train:2,failure_eval:3,success_eval:4,scenarios:5}";
pub const BOOTSTRAP_SEED: u64 = 0x5eed_b007;

const STREAM_CENTERS: u64 = 0;
const STREAM_FAILURE_TRAIN: u64 = 1;
const STREAM_SUCCESS_TRAIN: u64 = 2;
const STREAM_FAILURE_EVAL: u64 = 3;
const STREAM_SUCCESS_EVAL: u64 = 4;
const STREAM_SCENARIOS: u64 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Sample sizes to try, ascending.
    pub grid: Vec<usize>,
    pub target_utility: f64,
    /// Number of leading seeds averaged at each grid point.
    pub seeds: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            grid: vec![10, 20, 40, 80, 160, 320, 640, 1280],
            target_utility: 0.7,
            seeds: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Effective dimension of the failure space.
    pub m_dim: usize,
    /// Effective dimension of the success space (and the ambient space).
    pub ds_dim: usize,
    pub n_samples: usize,
    pub n_patterns: usize,
    pub noise_sigma: f64,
    pub center_separation: f64,
    pub seeds: Vec<u64>,
    pub eval_size: usize,
    pub bootstrap_resamples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            m_dim: 5,
            ds_dim: 50,
            n_samples: 200,
            n_patterns: 5,
            noise_sigma: 1.0,
            center_separation: 3.0,
            seeds: (0..100).collect(),
            eval_size: 2000,
            bootstrap_resamples: 2000,
            sweep: None,
        }
    }
}

impl SimConfig {
    pub fn check(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.m_dim == 0 || self.ds_dim == 0 {
            return fail("dimensions must be positive".into());
        }
        if self.m_dim > self.ds_dim {
            return fail(format!(
                "m_dim {} exceeds ds_dim {}",
                self.m_dim, self.ds_dim
            ));
        }
        if self.n_samples < 10 {
            return fail(format!(
                "n_samples must be at least 10, got {}",
                self.n_samples
            ));
        }
        if self.n_patterns == 0 || self.n_patterns > self.n_samples {
            return fail("n_patterns must be in 1..=n_samples".into());
        }
        if !(self.noise_sigma > 0.0 && self.noise_sigma.is_finite()) {
            return fail("noise_sigma must be positive".into());
        }
        if !(self.center_separation > 0.0 && self.center_separation.is_finite()) {
            return fail("center_separation must be positive".into());
        }
        if self.eval_size == 0 {
            return fail("eval_size must be positive".into());
        }
        if let Some(s) = &self.sweep {
            if s.grid.is_empty() || s.grid.iter().any(|&n| n < 10 || n < self.n_patterns) {
                return fail("sweep grid entries must be at least max(10, n_patterns)".into());
            }
            if s.seeds == 0 {
                return fail("sweep needs at least one seed".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialOutcome {
    pub u_failure: f64,
    pub u_success: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedOutcome {
    pub seed: u64,
    pub u_failure: f64,
    pub u_success: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub n: usize,
    pub u_failure: f64,
    pub u_success: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepResult {
    pub target_utility: f64,
    pub points: Vec<SweepPoint>,
    pub n_failure: Option<usize>,
    pub n_success: Option<usize>,
    /// `n_failure / n_success` when both agents reach the target.
    pub sample_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimResult {
    pub per_seed: Vec<SeedOutcome>,
    pub mean_gap: f64,
    pub gap_positive_fraction: f64,
    /// Half-width of the 95% percentile bootstrap interval of the mean gap.
    pub bootstrap_half_width: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepResult>,
    pub rng: String,
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

struct World {
    centers: Vec<Vec<f64>>,
    ambient: usize,
}

impl World {
    fn new(cfg: &SimConfig, seed: u64) -> Self {
        let mut r = rng(seed, STREAM_CENTERS);
        let scale = cfg.center_separation / libm::sqrt(cfg.m_dim as f64);
        let centers = (0..cfg.n_patterns)
            .map(|_| {
                let mut c = vec![0.0; cfg.ds_dim];
                for x in &mut c[..cfg.m_dim] {
                    *x = scale * r.sample::<f64, _>(StandardNormal);
                }
                c
            })
            .collect();
        World {
            centers,
            ambient: cfg.ds_dim,
        }
    }

    /// A member of cluster `label` whose noise spans the first `span` axes.
    fn draw(&self, label: usize, span: usize, sigma: f64, r: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x = self.centers[label].clone();
        for v in &mut x[..span] {
            *v += sigma * r.sample::<f64, _>(StandardNormal);
        }
        x
    }
}

#[derive(Debug, Clone)]
pub struct NearestCentroid {
    centroids: Vec<Vec<f64>>,
}

impl NearestCentroid {
    /// Fits per-label means. Every label in `0..n_labels` must occur.
    pub fn fit(samples: &[Vec<f64>], labels: &[usize], n_labels: usize) -> Self {
        let dim = samples.first().map_or(0, Vec::len);
        let mut sums = vec![vec![0.0; dim]; n_labels];
        let mut counts = vec![0usize; n_labels];
        for (x, &l) in samples.iter().zip(labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(x) {
                *s += v;
            }
        }
        for (s, &c) in sums.iter_mut().zip(&counts) {
            debug_assert!(c > 0, "label without samples");
            for v in s.iter_mut() {
                *v /= c as f64;
            }
        }
        NearestCentroid { centroids: sums }
    }

    /// Index of the closest centroid; ties go to the lower index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, c) in self.centroids.iter().enumerate() {
            let d: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }
}

fn train(
    world: &World,
    cfg: &SimConfig,
    n: usize,
    span: usize,
    r: &mut ChaCha8Rng,
) -> NearestCentroid {
    let labels: Vec<usize> = (0..n).map(|i| i % cfg.n_patterns).collect();
    let samples: Vec<Vec<f64>> = labels
        .iter()
        .map(|&l| world.draw(l, span, cfg.noise_sigma, r))
        .collect();
    NearestCentroid::fit(&samples, &labels, cfg.n_patterns)
}

fn trial_with_n(cfg: &SimConfig, seed: u64, n: usize) -> TrialOutcome {
    let world = World::new(cfg, seed);
    debug_assert_eq!(world.ambient, cfg.ds_dim);
    let failure = train(
        &world,
        cfg,
        n,
        cfg.m_dim,
        &mut rng(seed, STREAM_FAILURE_TRAIN),
    );
    let success = train(
        &world,
        cfg,
        n,
        cfg.ds_dim,
        &mut rng(seed, STREAM_SUCCESS_TRAIN),
    );

    let mut scen = rng(seed, STREAM_SCENARIOS);
    let mut f_eval = rng(seed, STREAM_FAILURE_EVAL);
    let mut s_eval = rng(seed, STREAM_SUCCESS_EVAL);
    let (mut f_score, mut s_score) = (0.0, 0.0);
    for _ in 0..cfg.eval_size {
        let pattern = scen.gen_range(0..cfg.n_patterns);
        let alignment = if scen.gen_bool(0.5) { 1.0 } else { 0.0 };
        let fx = world.draw(pattern, cfg.m_dim, cfg.noise_sigma, &mut f_eval);
        let sx = world.draw(pattern, cfg.ds_dim, cfg.noise_sigma, &mut s_eval);
        f_score += score(failure.predict(&fx) == pattern, alignment);
        s_score += score(success.predict(&sx) == pattern, alignment);
    }
    let m = cfg.eval_size as f64;
    TrialOutcome {
        u_failure: f_score / m,
        u_success: s_score / m,
    }
}

/// Reward minus penalty for one scenario.
fn score(avoided: bool, alignment: f64) -> f64 {
    if avoided {
        1.0
    } else {
        -alignment
    }
}

/// One deterministic trial at the configured sample size.
pub fn run_trial(cfg: &SimConfig, seed: u64) -> Result<TrialOutcome> {
    cfg.check()?;
    Ok(trial_with_n(cfg, seed, cfg.n_samples))
}

pub fn efficiency_experiment(cfg: &SimConfig) -> Result<SimResult> {
    cfg.check()?;
    if cfg.seeds.is_empty() {
        return Err(Error::Config("at least one seed is required".into()));
    }
    let mut seeds = cfg.seeds.clone();
    seeds.sort_unstable();

    let per_seed: Vec<SeedOutcome> = seeds
        .iter()
        .map(|&seed| {
            let t = trial_with_n(cfg, seed, cfg.n_samples);
            SeedOutcome {
                seed,
                u_failure: t.u_failure,
                u_success: t.u_success,
                gap: t.u_failure - t.u_success,
            }
        })
        .collect();
    let gaps: Vec<f64> = per_seed.iter().map(|s| s.gap).collect();
    let k = gaps.len() as f64;
    let mean_gap = gaps.iter().sum::<f64>() / k;
    let gap_positive_fraction = gaps.iter().filter(|&&g| g > 0.0).count() as f64 / k;
    let bootstrap_half_width = bootstrap_half_width(&gaps, cfg.bootstrap_resamples);

    let sweep = cfg.sweep.as_ref().map(|s| run_sweep(cfg, s, &seeds));

    Ok(SimResult {
        per_seed,
        mean_gap,
        gap_positive_fraction,
        bootstrap_half_width,
        sweep,
        rng: RNG_NAME.into(),
    })
}

fn run_sweep(cfg: &SimConfig, sweep: &SweepConfig, seeds: &[u64]) -> SweepResult {
    let seeds = &seeds[..sweep.seeds.min(seeds.len())];
    let mut grid = sweep.grid.clone();
    grid.sort_unstable();
    grid.dedup();
    let points: Vec<SweepPoint> = grid
        .iter()
        .map(|&n| {
            let (mut f, mut s) = (0.0, 0.0);
            for &seed in seeds {
                let t = trial_with_n(cfg, seed, n);
                f += t.u_failure;
                s += t.u_success;
            }
            let k = seeds.len() as f64;
            SweepPoint {
                n,
                u_failure: f / k,
                u_success: s / k,
            }
        })
        .collect();
    let first = |u: fn(&SweepPoint) -> f64| {
        points
            .iter()
            .find(|p| u(p) >= sweep.target_utility)
            .map(|p| p.n)
    };
    let n_failure = first(|p| p.u_failure);
    let n_success = first(|p| p.u_success);
    let sample_ratio = match (n_failure, n_success) {
        (Some(f), Some(s)) => Some(f as f64 / s as f64),
        _ => None,
    };
    SweepResult {
        target_utility: sweep.target_utility,
        points,
        n_failure,
        n_success,
        sample_ratio,
    }
}

/// Half-width of the 95% percentile bootstrap interval of the mean.
pub fn bootstrap_half_width(values: &[f64], resamples: usize) -> f64 {
    if values.len() < 2 || resamples == 0 {
        return 0.0;
    }
    let mut r = ChaCha8Rng::seed_from_u64(BOOTSTRAP_SEED);
    let n = values.len();
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| values[r.gen_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let at = |q: f64| means[((resamples - 1) as f64 * q) as usize];
    (at(0.975) - at(0.025)) / 2.0
}
