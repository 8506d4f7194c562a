//! Semiparametric mixed-data clustering that balances continuous and
//! categorical contributions without a tuning weight.
//!
//! Continuous coordinates enter through a radial kernel density built from
//! the pooled minimum centroid distances of the current iteration, so the
//! continuous model adapts its shape to the data instead of assuming
//! Gaussian balls. Categorical coordinates enter through per-cluster
//! multinomial log-likelihoods. Both contributions are log-densities, which
//! is what keeps either side from dominating by scale alone.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{z_standardize, MixedDataset, Partition};
use crate::error::{Error, Result};
use crate::util::{derive_seed, ln_gamma_half, quantile_sorted};

/// Density floor before taking logs.
const DENSITY_FLOOR: f64 = 1e-12;
/// Radius floor inside the directional correction term.
const RADIUS_FLOOR: f64 = 1e-10;
/// Number of kernel density grid points.
const GRID_POINTS: usize = 512;

/// Options for [`kamila_fit`].
#[derive(Debug, Clone, Copy)]
pub struct KamilaOptions {
    /// Number of random restarts (at least 1).
    pub starts: usize,
    /// Iteration cap per restart.
    pub max_iter: usize,
    /// Master seed; restart `r` derives its own stream from `(seed, r)`.
    pub seed: u64,
    /// Additive smoothing for the multinomial level estimates.
    pub smoothing: f64,
}

impl KamilaOptions {
    pub fn new(starts: usize, seed: u64) -> Self {
        Self {
            starts,
            max_iter: 25,
            seed,
            smoothing: 0.025,
        }
    }
}

/// Fitted model state.
#[derive(Debug, Clone)]
pub struct KamilaFit {
    pub partition: Partition,
    /// `k x p_r` centroid matrix in the internally standardized space.
    pub centroids: DMatrix<f64>,
    /// `theta[l][j][h]`: smoothed probability of level `h` of categorical
    /// column `j` in cluster `l`.
    pub theta: Vec<Vec<Vec<f64>>>,
    /// Kernel bandwidth of the final iteration (0 with no continuous part).
    pub bandwidth: f64,
    /// Sum of winning log-scores at convergence (higher is better).
    pub objective: f64,
    pub objective_trace: Vec<f64>,
}

/// Gaussian kernel density estimate tabulated on an even grid.
///
/// The bandwidth follows the classic rule of thumb `0.9 min(sd, IQR/1.349)
/// n^{-1/5}`, falling back to the standard deviation, then the first
/// absolute value, then 1 when the preferred spread measures vanish. The
/// grid spans the data extended by three bandwidths; queries interpolate
/// linearly and are clamped to the grid ends.
#[derive(Debug, Clone)]
pub struct KdeGrid {
    lo: f64,
    step: f64,
    density: Vec<f64>,
    bandwidth: f64,
}

impl KdeGrid {
    pub fn fit(samples: &[f64]) -> Self {
        assert!(!samples.is_empty(), "kernel density needs data");
        let bandwidth = rule_of_thumb_bandwidth(samples);
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = min - 3.0 * bandwidth;
        let hi = max + 3.0 * bandwidth;
        let step = (hi - lo) / (GRID_POINTS - 1) as f64;
        let norm = 1.0 / (samples.len() as f64 * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
        let density: Vec<f64> = (0..GRID_POINTS)
            .map(|g| {
                let x = lo + step * g as f64;
                let mut s = 0.0;
                for &v in samples {
                    let t = (x - v) / bandwidth;
                    s += (-0.5 * t * t).exp();
                }
                s * norm
            })
            .collect();
        Self {
            lo,
            step,
            density,
            bandwidth,
        }
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Linearly interpolated density, clamped to the grid and floored away
    /// from zero.
    pub fn density_at(&self, x: f64) -> f64 {
        let pos = ((x - self.lo) / self.step).clamp(0.0, (GRID_POINTS - 1) as f64);
        let idx = (pos.floor() as usize).min(GRID_POINTS - 2);
        let frac = pos - idx as f64;
        let d = self.density[idx] * (1.0 - frac) + self.density[idx + 1] * frac;
        d.max(DENSITY_FLOOR)
    }

    pub fn log_density_at(&self, x: f64) -> f64 {
        self.density_at(x).ln()
    }
}

/// Rule-of-thumb kernel bandwidth with the standard fallback chain.
pub fn rule_of_thumb_bandwidth(samples: &[f64]) -> f64 {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let mut lo = sd.min(iqr / 1.349);
    if lo <= 0.0 {
        lo = sd;
    }
    if lo <= 0.0 {
        lo = samples[0].abs();
    }
    if lo <= 0.0 {
        lo = 1.0;
    }
    0.9 * lo * (n as f64).powf(-0.2)
}

/// Log-density of an observation at distance `r` from its cluster center,
/// given the log-density `log_fr` of the pooled radius distribution at `r`
/// and the continuous dimension `p`. The correction spreads the radial mass
/// uniformly over the sphere of radius `r`:
/// `log f = log f_R(r) + ln Gamma(p/2 + 1) - ln p - (p - 1) ln r -
/// (p/2) ln pi`.
pub fn radial_log_density(r: f64, log_fr: f64, p: usize) -> f64 {
    debug_assert!(p >= 1);
    let pf = p as f64;
    let r = r.max(RADIUS_FLOOR);
    log_fr + ln_gamma_half(p + 2)
        - pf.ln()
        - (pf - 1.0) * r.ln()
        - 0.5 * pf * std::f64::consts::PI.ln()
}

/// Fits the semiparametric mixed-data model.
///
/// Continuous columns are z-standardized internally; `centroids` in the
/// result live in that space. Each restart alternates: (1) pool the minimum
/// centroid distances and fit their kernel density, (2) assign every
/// observation to the cluster with the highest radial-plus-multinomial
/// log-score (lowest slot on ties), reseeding any emptied cluster at the
/// worst-fitting multi-member observation, (3) update means and smoothed
/// level probabilities. A restart stops when consecutive assignments agree
/// or after `max_iter` sweeps; the restart with the highest final total
/// log-score wins.
///
/// # Errors
///
/// [`Error::KTooLarge`] for an out-of-range cluster count and
/// [`Error::ConstantColumn`] from the internal standardization.
pub fn kamila_fit(data: &MixedDataset, k: usize, opts: &KamilaOptions) -> Result<KamilaFit> {
    let n = data.n();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    let std = if data.p_r() > 0 {
        z_standardize(data)?.0
    } else {
        data.clone()
    };
    let p_r = std.p_r();
    let p_c = std.p_c();
    let x = std.continuous();
    let mut best: Option<KamilaFit> = None;
    for r in 0..opts.starts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, &[r as u64]));
        let fit = kamila_single(&std, x, p_r, p_c, k, opts, &mut rng);
        let better = match &best {
            None => true,
            Some(b) => fit.objective > b.objective + 1e-12,
        };
        if better {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn kamila_single(
    data: &MixedDataset,
    x: &DMatrix<f64>,
    p_r: usize,
    p_c: usize,
    k: usize,
    opts: &KamilaOptions,
    rng: &mut ChaCha8Rng,
) -> KamilaFit {
    let n = data.n();
    let mut centroids = DMatrix::<f64>::zeros(k, p_r);
    for (slot, i) in rand::seq::index::sample(rng, n, k).into_iter().enumerate() {
        for j in 0..p_r {
            centroids[(slot, j)] = x[(i, j)];
        }
    }
    // Random initial level probabilities, normalized per column.
    let mut theta: Vec<Vec<Vec<f64>>> = (0..k)
        .map(|_| {
            data.levels()
                .iter()
                .map(|&c| {
                    let raw: Vec<f64> = (0..c).map(|_| rng.random::<f64>() + 0.05).collect();
                    let s: f64 = raw.iter().sum();
                    raw.into_iter().map(|v| v / s).collect()
                })
                .collect()
        })
        .collect();
    let mut assign = vec![0usize; n];
    let mut prev: Option<Vec<usize>> = None;
    let mut trace = Vec::new();
    let mut bandwidth = 0.0;
    let mut dist = DMatrix::<f64>::zeros(n, k);
    for _ in 0..opts.max_iter.max(1) {
        // Distances and the pooled radius density.
        let kde = if p_r > 0 {
            for i in 0..n {
                for l in 0..k {
                    let mut s = 0.0;
                    for j in 0..p_r {
                        let diff = x[(i, j)] - centroids[(l, j)];
                        s += diff * diff;
                    }
                    dist[(i, l)] = s.sqrt();
                }
            }
            let radii: Vec<f64> = (0..n)
                .map(|i| (0..k).map(|l| dist[(i, l)]).fold(f64::INFINITY, f64::min))
                .collect();
            let kde = KdeGrid::fit(&radii);
            bandwidth = kde.bandwidth();
            Some(kde)
        } else {
            None
        };
        // Assignment by total log-score.
        let mut winning = vec![f64::NEG_INFINITY; n];
        for i in 0..n {
            let mut best_slot = 0;
            let mut best_score = f64::NEG_INFINITY;
            for l in 0..k {
                let mut score = 0.0;
                if let Some(kde) = &kde {
                    let r = dist[(i, l)];
                    score += radial_log_density(r, kde.log_density_at(r), p_r);
                }
                for j in 0..p_c {
                    score += theta[l][j][data.cat_column(j)[i]].ln();
                }
                if score > best_score {
                    best_score = score;
                    best_slot = l;
                }
            }
            assign[i] = best_slot;
            winning[i] = best_score;
        }
        // Reseed empty clusters at the worst-fitting movable observation.
        loop {
            let mut counts = vec![0usize; k];
            for &a in &assign {
                counts[a] += 1;
            }
            let Some(empty) = counts.iter().position(|&c| c == 0) else {
                break;
            };
            let mut worst_i = usize::MAX;
            let mut worst_score = f64::INFINITY;
            for i in 0..n {
                if counts[assign[i]] <= 1 {
                    continue;
                }
                if winning[i] < worst_score {
                    worst_score = winning[i];
                    worst_i = i;
                }
            }
            if worst_i == usize::MAX {
                break;
            }
            for j in 0..p_r {
                centroids[(empty, j)] = x[(worst_i, j)];
            }
            assign[worst_i] = empty;
            winning[worst_i] = f64::INFINITY; // cannot be picked again
        }
        // Update means and smoothed level probabilities.
        let mut counts = vec![0usize; k];
        let mut sums = DMatrix::<f64>::zeros(k, p_r);
        let mut level_counts: Vec<Vec<Vec<usize>>> = (0..k)
            .map(|_| data.levels().iter().map(|&c| vec![0usize; c]).collect())
            .collect();
        for i in 0..n {
            let a = assign[i];
            counts[a] += 1;
            for j in 0..p_r {
                sums[(a, j)] += x[(i, j)];
            }
            for j in 0..p_c {
                level_counts[a][j][data.cat_column(j)[i]] += 1;
            }
        }
        for l in 0..k {
            if counts[l] == 0 {
                continue;
            }
            for j in 0..p_r {
                centroids[(l, j)] = sums[(l, j)] / counts[l] as f64;
            }
            for j in 0..p_c {
                let c = data.levels()[j];
                let denom = counts[l] as f64 + opts.smoothing * c as f64;
                for h in 0..c {
                    theta[l][j][h] = (level_counts[l][j][h] as f64 + opts.smoothing) / denom;
                }
            }
        }
        let objective: f64 = winning.iter().filter(|s| s.is_finite()).sum();
        trace.push(objective);
        if prev.as_deref() == Some(assign.as_slice()) {
            break;
        }
        prev = Some(assign.clone());
    }
    let objective = *trace.last().expect("at least one sweep");
    KamilaFit {
        partition: Partition::new(assign, k).expect("slots in range"),
        centroids,
        theta,
        bandwidth,
        objective,
        objective_trace: trace,
    }
}
