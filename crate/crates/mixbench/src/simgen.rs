//! Synthetic mixed-data generator with calibrated cluster separation.
//!
//! Datasets are drawn from a K-component Gaussian mixture whose difficulty
//! is controlled by one number: the mean pairwise overlap, defined for a
//! component pair as the sum of the two directed Bayes misclassification
//! probabilities. Component means, shapes, and weights are drawn first;
//! a global covariance multiplier is then calibrated by bisection until the
//! Monte Carlo overlap estimate hits the requested target. Categorical
//! columns are produced afterwards by cutting designated coordinates at
//! their sample quartiles, so the categorical signal degrades gracefully
//! with the same overlap knob.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::MixedDataset;
use crate::error::{Error, Result};
use crate::util::{derive_seed, quantile_sorted};

/// Relative tolerance of the bisection stage.
const BISECT_REL_TOL: f64 = 0.02;
/// Relative tolerance a final independent estimate must meet.
const ACCEPT_REL_TOL: f64 = 0.05;
/// Mixture redraw attempts before giving up.
const MAX_ATTEMPTS: usize = 10;
/// Number of levels produced by quartile discretization.
pub const DISCRETE_LEVELS: usize = 4;

/// Cluster-size profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    /// All mixing weights equal.
    Equal,
    /// First component holds 10% of the mass, the rest split evenly.
    OneSmall10,
}

/// Component shape profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sphericity {
    /// Scalar covariances `sigma^2 I` with `sigma^2 ~ U(0.5, 1.5)`.
    Spherical,
    /// Random rotations of eigenvalues drawn from `U(0.2, 1.5)`.
    Ellipsoidal,
}

/// One cell of the generator's factorial design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    /// Number of mixture components.
    pub k: usize,
    /// Observations per dataset.
    pub n: usize,
    /// Total coordinates (continuous plus to-be-discretized).
    pub p: usize,
    /// Target mean pairwise overlap in `(0, 1)`.
    pub overlap: f64,
    /// Fraction of coordinates discretized into categorical columns.
    pub pct_categorical: f64,
    pub density: Density,
    pub sphericity: Sphericity,
    /// Replicate index; each replicate redraws the whole mixture.
    pub replicate: usize,
    /// Master seed of the experiment.
    pub master_seed: u64,
}

impl ScenarioConfig {
    /// Number of coordinates that become categorical columns.
    pub fn categorical_count(&self) -> usize {
        (self.p as f64 * self.pct_categorical).ceil() as usize
    }

    /// Deterministic per-cell seed folding every factor level.
    pub fn dataset_seed(&self) -> u64 {
        derive_seed(
            self.master_seed,
            &[
                self.k as u64,
                self.n as u64,
                self.p as u64,
                self.overlap.to_bits(),
                self.pct_categorical.to_bits(),
                match self.density {
                    Density::Equal => 0,
                    Density::OneSmall10 => 1,
                },
                match self.sphericity {
                    Sphericity::Spherical => 0,
                    Sphericity::Ellipsoidal => 1,
                },
                self.replicate as u64,
            ],
        )
    }

    /// # Errors
    ///
    /// [`Error::ConfigInvalid`] describing the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::ConfigInvalid(format!(
                "need at least 2 components, got {}",
                self.k
            )));
        }
        if self.n < self.k {
            return Err(Error::ConfigInvalid(format!(
                "n = {} cannot hold {} components",
                self.n, self.k
            )));
        }
        if self.p == 0 {
            return Err(Error::ConfigInvalid("p must be positive".into()));
        }
        if !(self.overlap > 0.0 && self.overlap < 1.0) {
            return Err(Error::ConfigInvalid(format!(
                "overlap target must lie in (0, 1), got {}",
                self.overlap
            )));
        }
        if !(0.0..=1.0).contains(&self.pct_categorical) {
            return Err(Error::ConfigInvalid(format!(
                "categorical fraction must lie in [0, 1], got {}",
                self.pct_categorical
            )));
        }
        Ok(())
    }
}

/// A fully calibrated mixture.
#[derive(Debug, Clone)]
pub struct MixtureSpec {
    pub weights: Vec<f64>,
    pub means: Vec<DVector<f64>>,
    /// Covariances with the calibration multiplier already applied.
    pub covariances: Vec<DMatrix<f64>>,
    pub target_overlap: f64,
    /// Independent post-calibration overlap estimate.
    pub achieved_overlap: f64,
    /// Symmetric matrix of pairwise overlaps (zero diagonal).
    pub pairwise: DMatrix<f64>,
    /// The accepted covariance multiplier.
    pub scale: f64,
}

impl MixtureSpec {
    /// Checks weights, dimensions, and positive definiteness.
    ///
    /// # Errors
    ///
    /// [`Error::ConfigInvalid`] or [`Error::NotPositiveDefinite`].
    pub fn validate(&self) -> Result<()> {
        let k = self.weights.len();
        if k < 2 || self.means.len() != k || self.covariances.len() != k {
            return Err(Error::ConfigInvalid(
                "weights, means, and covariances must agree on k >= 2".into(),
            ));
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || self.weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::ConfigInvalid(
                "weights must be positive and sum to 1".into(),
            ));
        }
        let p = self.means[0].len();
        for (l, (m, c)) in self.means.iter().zip(&self.covariances).enumerate() {
            if m.len() != p || c.nrows() != p || c.ncols() != p {
                return Err(Error::ConfigInvalid(format!(
                    "component {l} has inconsistent dimensions"
                )));
            }
            if Cholesky::new(c.clone()).is_none() {
                return Err(Error::NotPositiveDefinite(l));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn p(&self) -> usize {
        self.means[0].len()
    }
}

/// Mixing weights for a size profile.
pub fn mixing_weights(k: usize, density: Density) -> Vec<f64> {
    match density {
        Density::Equal => vec![1.0 / k as f64; k],
        Density::OneSmall10 => {
            let rest = 0.9 / (k - 1) as f64;
            let mut w = vec![rest; k];
            w[0] = 0.1;
            w
        }
    }
}

/// Deterministic cluster sizes matching the mixing weights: the small
/// component (if any) gets `ceil(0.1 n)`; remaining observations are split
/// evenly with earlier components absorbing the remainder.
pub fn cluster_sizes(n: usize, k: usize, density: Density) -> Vec<usize> {
    match density {
        Density::Equal => even_split(n, k, 0),
        Density::OneSmall10 => {
            let small = ((n as f64) * 0.1).ceil() as usize;
            let mut sizes = vec![small];
            sizes.extend(even_split(n - small, k - 1, 0));
            sizes
        }
    }
}

fn even_split(n: usize, k: usize, offset: usize) -> Vec<usize> {
    let base = n / k;
    let extra = n % k;
    (0..k)
        .map(|l| base + usize::from((l + offset) < extra))
        .collect()
}

/// Haar-distributed random orthogonal matrix (QR of a Gaussian matrix with
/// the sign of the R diagonal folded into Q).
fn haar_orthogonal(p: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(p, p, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            for i in 0..p {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

fn draw_covariance(p: usize, sphericity: Sphericity, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    match sphericity {
        Sphericity::Spherical => {
            let s2 = rng.random_range(0.5..1.5);
            DMatrix::<f64>::identity(p, p) * s2
        }
        Sphericity::Ellipsoidal => {
            let lambda: Vec<f64> = (0..p).map(|_| rng.random_range(0.2..1.5)).collect();
            let q = haar_orthogonal(p, rng);
            let mut d = DMatrix::<f64>::zeros(p, p);
            for (j, &l) in lambda.iter().enumerate() {
                d[(j, j)] = l;
            }
            let m = &q * d * q.transpose();
            // Symmetrize away rounding asymmetry.
            (&m + m.transpose()) * 0.5
        }
    }
}

/// Monte Carlo matrix of pairwise overlaps.
///
/// Entry `(i, j)` (for `i != j`) is the sum of the two directed
/// misclassification probabilities of the Bayes rule restricted to
/// components `i` and `j`, estimated with `samples` draws per direction.
/// Each direction has its own substream of `seed`, so repeated calls with
/// the same seed reuse identical draws.
///
/// # Errors
///
/// [`Error::NotPositiveDefinite`] when a covariance has no Cholesky factor.
pub fn pairwise_overlap_mc(
    weights: &[f64],
    means: &[DVector<f64>],
    covariances: &[DMatrix<f64>],
    samples: usize,
    seed: u64,
) -> Result<DMatrix<f64>> {
    let k = weights.len();
    let chols: Vec<Cholesky<f64, Dyn>> = covariances
        .iter()
        .enumerate()
        .map(|(l, c)| Cholesky::new(c.clone()).ok_or(Error::NotPositiveDefinite(l)))
        .collect::<Result<_>>()?;
    let log_dets: Vec<f64> = chols
        .iter()
        .map(|c| {
            2.0 * (0..c.l_dirty().nrows())
                .map(|i| c.l_dirty()[(i, i)].ln())
                .sum::<f64>()
        })
        .collect();
    let mut out = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let p = directed_misclassification(
                weights,
                means,
                &chols,
                &log_dets,
                i,
                j,
                samples,
                derive_seed(seed, &[i as u64, j as u64]),
            );
            out[(i, j)] += p;
            out[(j, i)] += p;
        }
    }
    Ok(out)
}

/// Probability that a draw from component `i` scores higher under
/// component `j` (weighted log-densities, strict inequality).
#[allow(clippy::too_many_arguments)]
fn directed_misclassification(
    weights: &[f64],
    means: &[DVector<f64>],
    chols: &[Cholesky<f64, Dyn>],
    log_dets: &[f64],
    i: usize,
    j: usize,
    samples: usize,
    seed: u64,
) -> f64 {
    let p = means[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l_i = chols[i].l_dirty();
    let l_j = chols[j].l_dirty();
    let d_ij = &means[i] - &means[j];
    let mut misses = 0usize;
    let mut z = DVector::<f64>::zeros(p);
    for _ in 0..samples {
        for t in 0..p {
            z[t] = rng.sample(StandardNormal);
        }
        // Draw from component i: x = mu_i + L_i z, so the own-component
        // quadratic form is just |z|^2.
        let qf_i = z.dot(&z);
        let v = &d_ij + l_i * &z;
        let w = l_j
            .solve_lower_triangular(&v)
            .expect("cholesky factor is nonsingular");
        let qf_j = w.dot(&w);
        let score_i = weights[i].ln() - 0.5 * (qf_i + log_dets[i]);
        let score_j = weights[j].ln() - 0.5 * (qf_j + log_dets[j]);
        if score_j > score_i {
            misses += 1;
        }
    }
    misses as f64 / samples as f64
}

/// Mean of the upper-triangle entries of a pairwise overlap matrix.
pub fn mean_overlap(pairwise: &DMatrix<f64>) -> f64 {
    let k = pairwise.nrows();
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..k {
        for j in (i + 1)..k {
            sum += pairwise[(i, j)];
            count += 1;
        }
    }
    sum / count as f64
}

/// Monte Carlo draws per direction for a given design: enough that the
/// standard error of the mean overlap is a small fraction of the target.
fn overlap_samples(pairs: usize, target: f64) -> usize {
    let raw = (6400.0 / (pairs as f64 * target)).ceil() as usize;
    raw.clamp(20_000, 400_000)
}

/// Draws a mixture and calibrates a global covariance multiplier until the
/// mean pairwise overlap hits the configured target.
///
/// Each attempt draws fresh means (uniform on the unit cube) and shapes,
/// then bisects the multiplier against a common-random-numbers overlap
/// estimate; the candidate is accepted only if an independent estimate
/// lands within 5% (relative) of the target, and up to ten attempts are
/// made.
///
/// # Errors
///
/// [`Error::ConfigInvalid`] from config validation, or
/// [`Error::CalibrationFailed`] when no attempt can be calibrated.
pub fn calibrate_mixture(cfg: &ScenarioConfig) -> Result<MixtureSpec> {
    cfg.validate()?;
    let seed = cfg.dataset_seed();
    let weights = mixing_weights(cfg.k, cfg.density);
    let pairs = cfg.k * (cfg.k - 1) / 2;
    let samples = overlap_samples(pairs, cfg.overlap);
    let mut last_failure = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[1, attempt as u64]));
        let means: Vec<DVector<f64>> = (0..cfg.k)
            .map(|_| DVector::from_fn(cfg.p, |_, _| rng.random_range(0.0..1.0)))
            .collect();
        let bases: Vec<DMatrix<f64>> = (0..cfg.k)
            .map(|_| draw_covariance(cfg.p, cfg.sphericity, &mut rng))
            .collect();
        let mc_seed = derive_seed(seed, &[2, attempt as u64]);
        let overlap_at = |scale: f64| -> Result<f64> {
            let scaled: Vec<DMatrix<f64>> = bases.iter().map(|b| b * scale).collect();
            let m = pairwise_overlap_mc(&weights, &means, &scaled, samples, mc_seed)?;
            Ok(mean_overlap(&m))
        };
        match bisect_scale(&overlap_at, cfg.overlap) {
            Ok(scale) => {
                // Fresh draws decide acceptance; the bisection stream never
                // sees them.
                let final_covs: Vec<DMatrix<f64>> = bases.iter().map(|b| b * scale).collect();
                let check_seed = derive_seed(seed, &[3, attempt as u64]);
                let pairwise =
                    pairwise_overlap_mc(&weights, &means, &final_covs, samples, check_seed)?;
                let achieved = mean_overlap(&pairwise);
                if (achieved - cfg.overlap).abs() <= ACCEPT_REL_TOL * cfg.overlap {
                    let spec = MixtureSpec {
                        weights,
                        means,
                        covariances: final_covs,
                        target_overlap: cfg.overlap,
                        achieved_overlap: achieved,
                        pairwise,
                        scale,
                    };
                    spec.validate()?;
                    return Ok(spec);
                }
                last_failure = format!(
                    "attempt {attempt}: independent estimate {achieved:.5} missed target {:.5}",
                    cfg.overlap
                );
            }
            Err(msg) => {
                last_failure = format!("attempt {attempt}: {msg}");
            }
        }
    }
    Err(Error::CalibrationFailed(format!(
        "no mixture calibrated after {MAX_ATTEMPTS} attempts ({last_failure})"
    )))
}

/// Bisection on the covariance multiplier. The overlap estimate uses common
/// random numbers, so the objective is a fixed, near-monotone function of
/// the scale.
fn bisect_scale(
    overlap_at: &dyn Fn(f64) -> Result<f64>,
    target: f64,
) -> std::result::Result<f64, String> {
    let eval = |c: f64| overlap_at(c).map_err(|e| e.to_string());
    let mut lo = 1.0;
    let mut hi = 1.0;
    let mut f_lo = eval(lo)?;
    // Expand downward until the overlap falls below target.
    let mut guard = 0;
    while f_lo > target {
        lo /= 4.0;
        f_lo = eval(lo)?;
        guard += 1;
        if guard > 20 {
            return Err(format!(
                "overlap stuck at {f_lo:.5} above target even with near-degenerate spread"
            ));
        }
    }
    let mut f_hi = eval(hi)?;
    guard = 0;
    while f_hi < target {
        hi *= 4.0;
        f_hi = eval(hi)?;
        guard += 1;
        if guard > 20 {
            return Err(format!(
                "overlap saturates at {f_hi:.5} below target {target:.5}"
            ));
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let f_mid = eval(mid)?;
        if (f_mid - target).abs() <= BISECT_REL_TOL * target {
            return Ok(mid);
        }
        if f_mid < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-9 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Cuts a column at its sample quartiles into four ordinal levels; values
/// equal to a cut point go to the lower level.
pub fn quartile_discretize(column: &[f64]) -> Vec<usize> {
    let mut sorted = column.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let cuts = [
        quantile_sorted(&sorted, 0.25),
        quantile_sorted(&sorted, 0.50),
        quantile_sorted(&sorted, 0.75),
    ];
    column
        .iter()
        .map(|&x| cuts.iter().filter(|&&c| x > c).count())
        .collect()
}

/// Samples one labeled dataset from a calibrated mixture.
///
/// Rows are grouped by component (deterministic sizes from
/// [`cluster_sizes`]); the last `categorical_count` coordinates are
/// discretized at their sample quartiles into 4-level categorical columns;
/// the remaining coordinates stay continuous. The returned dataset carries
/// the generating labels as its reference partition.
///
/// # Errors
///
/// [`Error::NotPositiveDefinite`] when a covariance has no Cholesky factor,
/// or [`Error::ConfigInvalid`] when the mixture shape disagrees with the
/// scenario configuration.
pub fn sample_dataset(cfg: &ScenarioConfig, spec: &MixtureSpec) -> Result<MixedDataset> {
    cfg.validate()?;
    if spec.k() != cfg.k || spec.p() != cfg.p {
        return Err(Error::ConfigInvalid(format!(
            "mixture has k = {}, p = {} but the scenario needs k = {}, p = {}",
            spec.k(),
            spec.p(),
            cfg.k,
            cfg.p
        )));
    }
    let sizes = cluster_sizes(cfg.n, cfg.k, cfg.density);
    let seed = cfg.dataset_seed();
    let mut raw = DMatrix::<f64>::zeros(cfg.n, cfg.p);
    let mut truth = Vec::with_capacity(cfg.n);
    let mut row = 0usize;
    for (l, &n_l) in sizes.iter().enumerate() {
        let chol =
            Cholesky::new(spec.covariances[l].clone()).ok_or(Error::NotPositiveDefinite(l))?;
        let l_mat = chol.l();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[7, l as u64]));
        let mut z = DVector::<f64>::zeros(cfg.p);
        for _ in 0..n_l {
            for t in 0..cfg.p {
                z[t] = rng.sample(StandardNormal);
            }
            let x = &spec.means[l] + &l_mat * &z;
            for j in 0..cfg.p {
                raw[(row, j)] = x[j];
            }
            truth.push(l);
            row += 1;
        }
    }
    let q = cfg.categorical_count();
    let p_r = cfg.p - q;
    let cont = raw.columns(0, p_r).into_owned();
    let mut cats = Vec::with_capacity(q);
    for j in p_r..cfg.p {
        let column: Vec<f64> = (0..cfg.n).map(|i| raw[(i, j)]).collect();
        cats.push(quartile_discretize(&column));
    }
    let levels = vec![DISCRETE_LEVELS; q];
    MixedDataset::new(cont, cats, levels, Some(truth))
}

/// Calibrates and samples in one call.
///
/// # Errors
///
/// Any error from [`calibrate_mixture`] or [`sample_dataset`].
pub fn generate_scenario(cfg: &ScenarioConfig) -> Result<(MixedDataset, MixtureSpec)> {
    let spec = calibrate_mixture(cfg)?;
    let data = sample_dataset(cfg, &spec)?;
    Ok((data, spec))
}
