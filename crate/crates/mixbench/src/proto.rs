//! Prototype-based partitioning: K-Means on real matrices, K-Prototypes on
//! mixed data, and the weighted K-Means with a brute-force weight search.
//!
//! The three solvers share one Lloyd-style skeleton: sample distinct seed
//! points, then alternate nearest-prototype assignment with prototype
//! updates until the assignment stabilizes. Restart `r` always draws from a
//! child seed of `(seed, r)`, so solvers given the same options visit the
//! same initializations; with no categorical contribution the mixed solvers
//! reproduce K-Means label for label.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{categorical_variance, dummy_code, z_standardize, MixedDataset, Partition};
use crate::error::{Error, Result};
use crate::util::derive_seed;

/// Restart, iteration, and seeding options shared by the iterative solvers.
#[derive(Debug, Clone, Copy)]
pub struct IterOptions {
    /// Number of random restarts (at least 1).
    pub starts: usize,
    /// Maximum update sweeps per restart.
    pub max_iter: usize,
    /// Master seed; restart `r` uses a child seed derived from `(seed, r)`.
    pub seed: u64,
}

impl IterOptions {
    /// `starts` restarts with the default iteration cap of 100.
    pub fn new(starts: usize, seed: u64) -> Self {
        Self {
            starts,
            max_iter: 100,
            seed,
        }
    }
}

/// How a mixed-distance weight was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaProvenance {
    /// Ratio of mean continuous variance to mean categorical variance.
    VarianceRatio,
    /// Winner of a brute-force grid search.
    GridSearch,
    /// Supplied by the caller.
    Fixed,
}

/// A categorical/continuous trade-off weight and where it came from.
#[derive(Debug, Clone, Copy)]
pub struct GammaWeight {
    pub value: f64,
    pub provenance: GammaProvenance,
}

/// Categorical part of a cluster prototype.
#[derive(Debug, Clone)]
pub enum CategoricalPrototype {
    /// Per-column modal level.
    Modes(Vec<usize>),
    /// Per-column mean indicator vector (entries in `[0, 1]`, summing to 1).
    DummyMeans(Vec<Vec<f64>>),
}

/// A cluster prototype: continuous center plus a categorical summary.
#[derive(Debug, Clone)]
pub struct Prototype {
    pub continuous: Vec<f64>,
    pub categorical: CategoricalPrototype,
}

/// K-Means result.
#[derive(Debug, Clone)]
pub struct KmeansFit {
    pub partition: Partition,
    /// `k x p` matrix of cluster means.
    pub centroids: DMatrix<f64>,
    /// Total within-cluster sum of squared distances.
    pub wcss: f64,
    /// Objective after every update sweep of the winning restart.
    pub objective_trace: Vec<f64>,
}

/// K-Prototypes result.
#[derive(Debug, Clone)]
pub struct KPrototypesFit {
    pub partition: Partition,
    pub prototypes: Vec<Prototype>,
    pub gamma: GammaWeight,
    /// Mixed cost: squared Euclidean plus `gamma` times mismatch count.
    pub cost: f64,
    pub objective_trace: Vec<f64>,
}

/// Weighted K-Means (continuous squared Euclidean plus weighted cosine
/// dissimilarity on the indicator block) result.
#[derive(Debug, Clone)]
pub struct ModhaSpanglerFit {
    pub partition: Partition,
    pub prototypes: Vec<Prototype>,
    pub gamma: GammaWeight,
    /// Generalized distortion ratio of the winning weight.
    pub distortion_ratio: f64,
    /// `(gamma, ratio)` for every grid value, in grid order.
    pub ratios: Vec<(f64, f64)>,
    pub cost: f64,
    pub objective_trace: Vec<f64>,
}

/// Default brute-force weight grid: ten coefficients from the uniformly
/// spaced interior sweep `w in {1/11, ..., 10/11}` of the two-block convex
/// combination, expressed as the coefficient `gamma = (1 - w) / w` on the
/// categorical term.
pub fn default_ms_grid() -> Vec<f64> {
    (1..=10)
        .map(|i| {
            let w = i as f64 / 11.0;
            (1.0 - w) / w
        })
        .collect()
}

/// Coarse five-point preset `{1/6, ..., 5/6}`.
pub fn coarse_ms_grid() -> Vec<f64> {
    (1..=5).map(|i| i as f64 / 6.0).collect()
}

/// Lloyd's K-Means on the rows of a real matrix.
///
/// Seeds are `k` distinct rows; ties in assignment go to the lowest cluster
/// slot; a cluster that empties is reseeded at the observation farthest from
/// its current centroid. The best of `starts` restarts (lowest final WCSS)
/// is returned.
///
/// # Errors
///
/// [`Error::KTooLarge`] when `k` is zero or exceeds the number of rows.
pub fn kmeans(points: &DMatrix<f64>, k: usize, opts: &IterOptions) -> Result<KmeansFit> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    let p = points.ncols();
    let dist = |i: usize, c: &DMatrix<f64>, slot: usize| -> f64 {
        let mut s = 0.0;
        for j in 0..p {
            let diff = points[(i, j)] - c[(slot, j)];
            s += diff * diff;
        }
        s
    };
    let mut best: Option<KmeansFit> = None;
    for r in 0..opts.starts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, &[r as u64]));
        let seeds = rand::seq::index::sample(&mut rng, n, k).into_vec();
        let mut centroids = DMatrix::<f64>::zeros(k, p);
        for (slot, &i) in seeds.iter().enumerate() {
            for j in 0..p {
                centroids[(slot, j)] = points[(i, j)];
            }
        }
        let mut assign = vec![0usize; n];
        let mut prev: Option<Vec<usize>> = None;
        let mut trace = Vec::new();
        for _ in 0..opts.max_iter.max(1) {
            for (i, a) in assign.iter_mut().enumerate() {
                let mut best_slot = 0;
                let mut best_d = f64::INFINITY;
                for slot in 0..k {
                    let d = dist(i, &centroids, slot);
                    if d < best_d {
                        best_d = d;
                        best_slot = slot;
                    }
                }
                *a = best_slot;
            }
            // Reseed empty clusters at the point farthest from its centroid.
            loop {
                let mut counts = vec![0usize; k];
                for &a in &assign {
                    counts[a] += 1;
                }
                let Some(empty) = counts.iter().position(|&c| c == 0) else {
                    break;
                };
                let mut far_i = usize::MAX;
                let mut far_d = f64::NEG_INFINITY;
                for i in 0..n {
                    if counts[assign[i]] <= 1 {
                        continue;
                    }
                    let d = dist(i, &centroids, assign[i]);
                    if d > far_d {
                        far_d = d;
                        far_i = i;
                    }
                }
                if far_i == usize::MAX {
                    break;
                }
                for j in 0..p {
                    centroids[(empty, j)] = points[(far_i, j)];
                }
                assign[far_i] = empty;
            }
            // Update step: means of the assigned members.
            let mut counts = vec![0usize; k];
            let mut sums = DMatrix::<f64>::zeros(k, p);
            for i in 0..n {
                counts[assign[i]] += 1;
                for j in 0..p {
                    sums[(assign[i], j)] += points[(i, j)];
                }
            }
            for slot in 0..k {
                if counts[slot] > 0 {
                    for j in 0..p {
                        centroids[(slot, j)] = sums[(slot, j)] / counts[slot] as f64;
                    }
                }
            }
            let cost: f64 = (0..n).map(|i| dist(i, &centroids, assign[i])).sum();
            trace.push(cost);
            if prev.as_deref() == Some(assign.as_slice()) {
                break;
            }
            prev = Some(assign.clone());
        }
        let wcss = *trace.last().expect("at least one sweep");
        let fit = KmeansFit {
            partition: Partition::new(assign, k).expect("slots in range"),
            centroids,
            wcss,
            objective_trace: trace,
        };
        let better = match &best {
            None => true,
            Some(b) => fit.wcss < b.wcss - 1e-12,
        };
        if better {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Mixed-variance weight: mean continuous sample variance over mean
/// categorical variance. On z-scored data each continuous variance is 1, so
/// the weight is the reciprocal mean categorical variance.
fn variance_ratio_gamma(data: &MixedDataset) -> Result<f64> {
    if data.p_c() == 0 {
        return Ok(0.0);
    }
    let cat_vars: Vec<f64> = (0..data.p_c())
        .map(|j| categorical_variance(data.cat_column(j), data.levels()[j]))
        .collect();
    let mean_cat = cat_vars.iter().sum::<f64>() / cat_vars.len() as f64;
    if data.p_r() == 0 {
        // Pure categorical data: any positive weight yields the same
        // mismatch-count geometry; 1 is the canonical choice.
        if mean_cat <= 0.0 {
            return Err(Error::AllConstant);
        }
        return Ok(1.0);
    }
    if mean_cat <= 0.0 {
        // Constant categorical columns contribute nothing; fall back to the
        // continuous-only distance.
        return Ok(0.0);
    }
    let n = data.n();
    let cont_vars: Vec<f64> = (0..data.p_r())
        .map(|j| {
            let col: Vec<f64> = (0..n).map(|i| data.continuous()[(i, j)]).collect();
            crate::util::sample_variance(&col)
        })
        .collect();
    let mean_cont = cont_vars.iter().sum::<f64>() / cont_vars.len() as f64;
    Ok(mean_cont / mean_cat)
}

/// K-Prototypes with the variance-ratio weight computed from the data.
///
/// Continuous columns are z-standardized first; the weight is then the mean
/// continuous variance (1 after scaling) over the mean categorical variance.
///
/// # Errors
///
/// [`Error::KTooLarge`], [`Error::ConstantColumn`] (standardization), or
/// [`Error::AllConstant`] when no column carries any variation.
pub fn k_prototypes(data: &MixedDataset, k: usize, opts: &IterOptions) -> Result<KPrototypesFit> {
    let std = standardize_if_continuous(data)?;
    let gamma = variance_ratio_gamma(&std)?;
    k_prototypes_on(&std, k, opts, gamma, GammaProvenance::VarianceRatio)
}

/// K-Prototypes with a caller-supplied weight (still z-standardizes).
///
/// # Errors
///
/// Same as [`k_prototypes`]; additionally rejects negative weights.
pub fn k_prototypes_with_gamma(
    data: &MixedDataset,
    k: usize,
    opts: &IterOptions,
    gamma: f64,
) -> Result<KPrototypesFit> {
    if gamma < 0.0 || !gamma.is_finite() {
        return Err(Error::ConfigInvalid(format!(
            "gamma must be finite and nonnegative, got {gamma}"
        )));
    }
    let std = standardize_if_continuous(data)?;
    k_prototypes_on(&std, k, opts, gamma, GammaProvenance::Fixed)
}

fn standardize_if_continuous(data: &MixedDataset) -> Result<MixedDataset> {
    if data.p_r() == 0 {
        Ok(data.clone())
    } else {
        Ok(z_standardize(data)?.0)
    }
}

fn k_prototypes_on(
    data: &MixedDataset,
    k: usize,
    opts: &IterOptions,
    gamma: f64,
    provenance: GammaProvenance,
) -> Result<KPrototypesFit> {
    let n = data.n();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    let p_r = data.p_r();
    let p_c = data.p_c();
    let dist = |i: usize, cont: &DMatrix<f64>, modes: &[Vec<usize>], slot: usize| -> f64 {
        let mut s = 0.0;
        for j in 0..p_r {
            let diff = data.continuous()[(i, j)] - cont[(slot, j)];
            s += diff * diff;
        }
        for (j, &m) in modes[slot].iter().enumerate() {
            if data.cat_column(j)[i] != m {
                s += gamma;
            }
        }
        s
    };
    let mut best: Option<KPrototypesFit> = None;
    for r in 0..opts.starts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, &[r as u64]));
        let seeds = rand::seq::index::sample(&mut rng, n, k).into_vec();
        let mut cont = DMatrix::<f64>::zeros(k, p_r);
        let mut modes = vec![vec![0usize; p_c]; k];
        for (slot, &i) in seeds.iter().enumerate() {
            for j in 0..p_r {
                cont[(slot, j)] = data.continuous()[(i, j)];
            }
            for (j, m) in modes[slot].iter_mut().enumerate() {
                *m = data.cat_column(j)[i];
            }
        }
        let mut assign = vec![0usize; n];
        let mut prev: Option<Vec<usize>> = None;
        let mut trace = Vec::new();
        for _ in 0..opts.max_iter.max(1) {
            for (i, a) in assign.iter_mut().enumerate() {
                let mut best_slot = 0;
                let mut best_d = f64::INFINITY;
                for slot in 0..k {
                    let d = dist(i, &cont, &modes, slot);
                    if d < best_d {
                        best_d = d;
                        best_slot = slot;
                    }
                }
                *a = best_slot;
            }
            loop {
                let mut counts = vec![0usize; k];
                for &a in &assign {
                    counts[a] += 1;
                }
                let Some(empty) = counts.iter().position(|&c| c == 0) else {
                    break;
                };
                let mut far_i = usize::MAX;
                let mut far_d = f64::NEG_INFINITY;
                for i in 0..n {
                    if counts[assign[i]] <= 1 {
                        continue;
                    }
                    let d = dist(i, &cont, &modes, assign[i]);
                    if d > far_d {
                        far_d = d;
                        far_i = i;
                    }
                }
                if far_i == usize::MAX {
                    break;
                }
                for j in 0..p_r {
                    cont[(empty, j)] = data.continuous()[(far_i, j)];
                }
                for (j, m) in modes[empty].iter_mut().enumerate() {
                    *m = data.cat_column(j)[far_i];
                }
                assign[far_i] = empty;
            }
            // Means for the continuous part, modes for the categorical part.
            let mut counts = vec![0usize; k];
            let mut sums = DMatrix::<f64>::zeros(k, p_r);
            let mut level_counts: Vec<Vec<Vec<usize>>> = (0..k)
                .map(|_| data.levels().iter().map(|&c| vec![0usize; c]).collect())
                .collect();
            for i in 0..n {
                let a = assign[i];
                counts[a] += 1;
                for j in 0..p_r {
                    sums[(a, j)] += data.continuous()[(i, j)];
                }
                for j in 0..p_c {
                    level_counts[a][j][data.cat_column(j)[i]] += 1;
                }
            }
            for slot in 0..k {
                if counts[slot] == 0 {
                    continue;
                }
                for j in 0..p_r {
                    cont[(slot, j)] = sums[(slot, j)] / counts[slot] as f64;
                }
                for j in 0..p_c {
                    // Lowest level wins ties.
                    let mut best_level = 0;
                    let mut best_count = 0usize;
                    for (lvl, &c) in level_counts[slot][j].iter().enumerate() {
                        if c > best_count {
                            best_count = c;
                            best_level = lvl;
                        }
                    }
                    modes[slot][j] = best_level;
                }
            }
            let cost: f64 = (0..n).map(|i| dist(i, &cont, &modes, assign[i])).sum();
            trace.push(cost);
            if prev.as_deref() == Some(assign.as_slice()) {
                break;
            }
            prev = Some(assign.clone());
        }
        let cost = *trace.last().expect("at least one sweep");
        let prototypes = (0..k)
            .map(|slot| Prototype {
                continuous: (0..p_r).map(|j| cont[(slot, j)]).collect(),
                categorical: CategoricalPrototype::Modes(modes[slot].clone()),
            })
            .collect();
        let fit = KPrototypesFit {
            partition: Partition::new(assign, k).expect("slots in range"),
            prototypes,
            gamma: GammaWeight {
                value: gamma,
                provenance,
            },
            cost,
            objective_trace: trace,
        };
        let better = match &best {
            None => true,
            Some(b) => fit.cost < b.cost - 1e-12,
        };
        if better {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Weighted K-Means over a brute-force weight grid.
///
/// For each grid weight the solver clusters with distance `||x_con -
/// q_con||^2 + gamma (1 - cos(x_ind, q_ind))` over the full indicator span
/// (restarts shared across weights). The returned solution minimizes the
/// generalized distortion ratio: the product of average within-cluster
/// dispersions over the product of between-cluster dispersions, computed
/// separately for the continuous and categorical parts.
///
/// # Errors
///
/// [`Error::KTooLarge`], [`Error::ConstantColumn`] (standardization), or
/// [`Error::ConfigInvalid`] for an empty or negative grid.
pub fn modha_spangler(
    data: &MixedDataset,
    k: usize,
    opts: &IterOptions,
    grid: &[f64],
) -> Result<ModhaSpanglerFit> {
    let n = data.n();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    if grid.is_empty() {
        return Err(Error::ConfigInvalid("weight grid is empty".into()));
    }
    if let Some(&bad) = grid.iter().find(|&&g| g < 0.0 || !g.is_finite()) {
        return Err(Error::ConfigInvalid(format!(
            "weight grid entries must be finite and nonnegative, got {bad}"
        )));
    }
    let std = standardize_if_continuous(data)?;
    let (coded, coding) = dummy_code(&std, None)?;
    let p_r = std.p_r();
    let p_star = coding.p_star;
    let cat_norm_x = (std.p_c() as f64).sqrt();

    let mut candidates: Vec<(f64, MsSolution)> = Vec::with_capacity(grid.len());
    for &gamma in grid {
        let sol = ms_single_gamma(&coded, p_r, p_star, cat_norm_x, k, opts, gamma)?;
        candidates.push((gamma, sol));
    }
    let grand = column_means(&coded);
    let mut ratios = Vec::with_capacity(candidates.len());
    let mut best_idx = 0;
    let mut best_ratio = f64::INFINITY;
    for (idx, (gamma, sol)) in candidates.iter().enumerate() {
        let ratio = distortion_ratio(
            &coded,
            p_r,
            p_star,
            cat_norm_x,
            &sol.assign,
            &sol.centers,
            &grand,
        );
        ratios.push((*gamma, ratio));
        if ratio < best_ratio {
            best_ratio = ratio;
            best_idx = idx;
        }
    }
    let (gamma, sol) = candidates.swap_remove(best_idx);
    let prototypes = (0..k)
        .map(|slot| {
            let continuous = (0..p_r).map(|j| sol.centers[(slot, j)]).collect();
            let means = coding
                .blocks
                .iter()
                .map(|&(start, width)| {
                    (start..start + width)
                        .map(|j| sol.centers[(slot, j)])
                        .collect()
                })
                .collect();
            Prototype {
                continuous,
                categorical: CategoricalPrototype::DummyMeans(means),
            }
        })
        .collect();
    Ok(ModhaSpanglerFit {
        partition: Partition::new(sol.assign, k).expect("slots in range"),
        prototypes,
        gamma: GammaWeight {
            value: gamma,
            provenance: GammaProvenance::GridSearch,
        },
        distortion_ratio: best_ratio,
        ratios,
        cost: sol.cost,
        objective_trace: sol.trace,
    })
}

struct MsSolution {
    assign: Vec<usize>,
    centers: DMatrix<f64>,
    cost: f64,
    trace: Vec<f64>,
}

/// Squared Euclidean on the continuous span plus `gamma` times cosine
/// dissimilarity on the indicator span; rows of `coded` are observations.
#[allow(clippy::too_many_arguments)]
fn ms_distance(
    coded: &DMatrix<f64>,
    centers: &DMatrix<f64>,
    p_r: usize,
    p_star: usize,
    cat_norm_x: f64,
    gamma: f64,
    i: usize,
    slot: usize,
) -> f64 {
    let mut s = 0.0;
    for j in 0..p_r {
        let diff = coded[(i, j)] - centers[(slot, j)];
        s += diff * diff;
    }
    if p_star > p_r && gamma > 0.0 {
        let mut dot = 0.0;
        let mut qq = 0.0;
        for j in p_r..p_star {
            dot += coded[(i, j)] * centers[(slot, j)];
            qq += centers[(slot, j)] * centers[(slot, j)];
        }
        let denom = cat_norm_x * qq.sqrt();
        let cos = if denom > 0.0 { dot / denom } else { 0.0 };
        s += gamma * (1.0 - cos);
    }
    s
}

fn ms_single_gamma(
    coded: &DMatrix<f64>,
    p_r: usize,
    p_star: usize,
    cat_norm_x: f64,
    k: usize,
    opts: &IterOptions,
    gamma: f64,
) -> Result<MsSolution> {
    let n = coded.nrows();
    let mut best: Option<MsSolution> = None;
    for r in 0..opts.starts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, &[r as u64]));
        let seeds = rand::seq::index::sample(&mut rng, n, k).into_vec();
        let mut centers = DMatrix::<f64>::zeros(k, p_star);
        for (slot, &i) in seeds.iter().enumerate() {
            for j in 0..p_star {
                centers[(slot, j)] = coded[(i, j)];
            }
        }
        let mut assign = vec![0usize; n];
        let mut prev: Option<Vec<usize>> = None;
        let mut trace = Vec::new();
        for _ in 0..opts.max_iter.max(1) {
            for (i, a) in assign.iter_mut().enumerate() {
                let mut best_slot = 0;
                let mut best_d = f64::INFINITY;
                for slot in 0..k {
                    let d = ms_distance(coded, &centers, p_r, p_star, cat_norm_x, gamma, i, slot);
                    if d < best_d {
                        best_d = d;
                        best_slot = slot;
                    }
                }
                *a = best_slot;
            }
            loop {
                let mut counts = vec![0usize; k];
                for &a in &assign {
                    counts[a] += 1;
                }
                let Some(empty) = counts.iter().position(|&c| c == 0) else {
                    break;
                };
                let mut far_i = usize::MAX;
                let mut far_d = f64::NEG_INFINITY;
                for i in 0..n {
                    if counts[assign[i]] <= 1 {
                        continue;
                    }
                    let d = ms_distance(
                        coded, &centers, p_r, p_star, cat_norm_x, gamma, i, assign[i],
                    );
                    if d > far_d {
                        far_d = d;
                        far_i = i;
                    }
                }
                if far_i == usize::MAX {
                    break;
                }
                for j in 0..p_star {
                    centers[(empty, j)] = coded[(far_i, j)];
                }
                assign[far_i] = empty;
            }
            let mut counts = vec![0usize; k];
            let mut sums = DMatrix::<f64>::zeros(k, p_star);
            for i in 0..n {
                counts[assign[i]] += 1;
                for j in 0..p_star {
                    sums[(assign[i], j)] += coded[(i, j)];
                }
            }
            for slot in 0..k {
                if counts[slot] > 0 {
                    for j in 0..p_star {
                        centers[(slot, j)] = sums[(slot, j)] / counts[slot] as f64;
                    }
                }
            }
            let cost: f64 = (0..n)
                .map(|i| {
                    ms_distance(
                        coded, &centers, p_r, p_star, cat_norm_x, gamma, i, assign[i],
                    )
                })
                .sum();
            trace.push(cost);
            if prev.as_deref() == Some(assign.as_slice()) {
                break;
            }
            prev = Some(assign.clone());
        }
        let cost = *trace.last().expect("at least one sweep");
        let sol = MsSolution {
            assign,
            centers,
            cost,
            trace,
        };
        let better = match &best {
            None => true,
            Some(b) => sol.cost < b.cost - 1e-12,
        };
        if better {
            best = Some(sol);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn column_means(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows() as f64;
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)]).sum::<f64>() / n)
        .collect()
}

fn cosine_dissim(a: impl Iterator<Item = (f64, f64)> + Clone) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    let denom = (na * nb).sqrt();
    if denom > 0.0 {
        1.0 - dot / denom
    } else {
        1.0
    }
}

/// Product of within-cluster dispersions over product of between-cluster
/// dispersions, continuous and categorical parts treated separately.
fn distortion_ratio(
    coded: &DMatrix<f64>,
    p_r: usize,
    p_star: usize,
    _cat_norm_x: f64,
    assign: &[usize],
    centers: &DMatrix<f64>,
    grand: &[f64],
) -> f64 {
    let n = coded.nrows();
    let k = centers.nrows();
    let mut counts = vec![0usize; k];
    for &a in assign {
        counts[a] += 1;
    }
    let mut w_con = 0.0;
    let mut w_cat = 0.0;
    for i in 0..n {
        let slot = assign[i];
        for j in 0..p_r {
            let diff = coded[(i, j)] - centers[(slot, j)];
            w_con += diff * diff;
        }
        if p_star > p_r {
            w_cat += cosine_dissim((p_r..p_star).map(|j| (coded[(i, j)], centers[(slot, j)])));
        }
    }
    let mut b_con = 0.0;
    let mut b_cat = 0.0;
    for slot in 0..k {
        if counts[slot] == 0 {
            continue;
        }
        let w = counts[slot] as f64;
        for j in 0..p_r {
            let diff = centers[(slot, j)] - grand[j];
            b_con += w * diff * diff;
        }
        if p_star > p_r {
            b_cat += w * cosine_dissim((p_r..p_star).map(|j| (centers[(slot, j)], grand[j])));
        }
    }
    let (num, den) = if p_star > p_r && p_r > 0 {
        (w_con * w_cat, b_con * b_cat)
    } else if p_r > 0 {
        (w_con, b_con)
    } else {
        (w_cat, b_cat)
    };
    if den <= f64::EPSILON || !den.is_finite() {
        return f64::INFINITY;
    }
    num / den
}
