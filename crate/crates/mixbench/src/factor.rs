//! Factor-space clustering: a mixed-data principal component projection
//! followed by K-Means (tandem analysis), and a reduced K-Means that
//! optimizes the subspace and the partition jointly.
//!
//! Both build on the same standardized design matrix: continuous columns are
//! centered and scaled to unit *population* variance, and each categorical
//! level contributes an indicator column centered at its frequency and
//! divided by the square root of that frequency. Under this scaling the
//! variance explained by a component equals the sum of its squared
//! correlations with the continuous columns plus its correlation ratios with
//! the categorical columns, which is what makes the projection a faithful
//! mixed-data analogue of ordinary principal components.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{MixedDataset, Partition};
use crate::error::{Error, Result};
use crate::proto::{kmeans, IterOptions, KmeansFit};
use crate::util::derive_seed;

/// Scores and explained variances of a mixed-data principal projection.
#[derive(Debug, Clone)]
pub struct FamdProjection {
    /// `n x dims` principal coordinates (column `k` has population variance
    /// equal to `eigenvalues[k]`).
    pub scores: DMatrix<f64>,
    /// Explained variances of the retained components, descending.
    pub eigenvalues: Vec<f64>,
    /// The full positive spectrum, descending.
    pub spectrum: Vec<f64>,
}

/// Tandem fit: projection followed by K-Means in score space.
#[derive(Debug, Clone)]
pub struct FamdKmeansFit {
    pub partition: Partition,
    pub projection: FamdProjection,
    pub kmeans: KmeansFit,
}

/// Options for the reduced K-Means solver.
#[derive(Debug, Clone, Copy)]
pub struct RkmOptions {
    pub iter: IterOptions,
    /// Subspace dimension; defaults to `min(k - 1, columns)` when `None`.
    pub dims: Option<usize>,
}

impl RkmOptions {
    pub fn new(starts: usize, seed: u64) -> Self {
        Self {
            iter: IterOptions::new(starts, seed),
            dims: None,
        }
    }
}

/// Reduced K-Means fit.
#[derive(Debug, Clone)]
pub struct RkmFit {
    pub partition: Partition,
    /// Orthonormal `q x d` loading matrix.
    pub loadings: DMatrix<f64>,
    /// `k x d` centroid matrix in score space.
    pub centroids: DMatrix<f64>,
    /// Residual Frobenius objective `||X - Z G B^T||^2`.
    pub objective: f64,
    pub objective_trace: Vec<f64>,
}

/// Builds the standardized design matrix described in the module docs.
///
/// Unobserved categorical levels produce all-zero columns (they carry no
/// variance and cannot perturb the projection).
///
/// # Errors
///
/// [`Error::ConstantColumn`] when a continuous column has zero variance.
pub fn famd_standardized_matrix(data: &MixedDataset) -> Result<DMatrix<f64>> {
    let n = data.n();
    let p_r = data.p_r();
    let q: usize = p_r + data.levels().iter().sum::<usize>();
    let mut m = DMatrix::<f64>::zeros(n, q);
    for j in 0..p_r {
        let col: Vec<f64> = (0..n).map(|i| data.continuous()[(i, j)]).collect();
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        if var <= 0.0 {
            return Err(Error::ConstantColumn(j));
        }
        let sd = var.sqrt();
        for i in 0..n {
            m[(i, j)] = (col[i] - mean) / sd;
        }
    }
    let mut offset = p_r;
    for j in 0..data.p_c() {
        let levels = data.levels()[j];
        let col = data.cat_column(j);
        let mut counts = vec![0usize; levels];
        for &x in col {
            counts[x] += 1;
        }
        for h in 0..levels {
            let q_h = counts[h] as f64 / n as f64;
            if q_h > 0.0 {
                let root = q_h.sqrt();
                for i in 0..n {
                    let ind = if col[i] == h { 1.0 } else { 0.0 };
                    m[(i, offset + h)] = (ind - q_h) / root;
                }
            }
        }
        offset += levels;
    }
    Ok(m)
}

/// Projects mixed data onto its leading `dims` principal components.
///
/// Scores are principal coordinates: the population variance of score
/// column `k` equals the component's explained variance. Component signs
/// are fixed so the largest-magnitude loading entry is positive.
///
/// # Errors
///
/// [`Error::ConstantColumn`] via the standardization, or
/// [`Error::RankDeficient`] when fewer than `dims` components carry
/// variance.
pub fn famd_project(data: &MixedDataset, dims: usize) -> Result<FamdProjection> {
    let m = famd_standardized_matrix(data)?;
    let n = m.nrows() as f64;
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let tol = svd.singular_values.max() * 1e-12 * (m.nrows().max(m.ncols()) as f64);
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if dims == 0 || dims > rank {
        return Err(Error::RankDeficient {
            requested: dims,
            rank,
        });
    }
    let spectrum: Vec<f64> = svd
        .singular_values
        .iter()
        .take(rank)
        .map(|&s| s * s / n)
        .collect();
    let mut scores = DMatrix::<f64>::zeros(m.nrows(), dims);
    for k in 0..dims {
        // Sign fix: orient each component so its largest-magnitude loading
        // is positive.
        let mut max_abs = 0.0;
        let mut sign = 1.0;
        for j in 0..vt.ncols() {
            let v = vt[(k, j)];
            if v.abs() > max_abs {
                max_abs = v.abs();
                sign = if v >= 0.0 { 1.0 } else { -1.0 };
            }
        }
        let s = svd.singular_values[k];
        for i in 0..m.nrows() {
            scores[(i, k)] = sign * u[(i, k)] * s;
        }
    }
    Ok(FamdProjection {
        scores,
        eigenvalues: spectrum.iter().take(dims).copied().collect(),
        spectrum,
    })
}

/// Squared correlation plus correlation-ratio mass of one score vector
/// against all columns of the dataset: `sum_j r^2(score, x_j) + sum_j
/// eta^2(score, c_j)`. For scores produced by [`famd_project`] this equals
/// the component's explained variance.
///
/// # Errors
///
/// [`Error::LengthMismatch`] when the score length differs from `n`;
/// [`Error::ZeroVariance`] when the score vector is constant.
pub fn famd_criterion(data: &MixedDataset, score: &[f64]) -> Result<f64> {
    let n = data.n();
    if score.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: score.len(),
        });
    }
    let z_mean = score.iter().sum::<f64>() / n as f64;
    let z_var = score
        .iter()
        .map(|z| (z - z_mean) * (z - z_mean))
        .sum::<f64>()
        / n as f64;
    if z_var <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let mut total = 0.0;
    for j in 0..data.p_r() {
        let col: Vec<f64> = (0..n).map(|i| data.continuous()[(i, j)]).collect();
        let x_mean = col.iter().sum::<f64>() / n as f64;
        let x_var = col.iter().map(|x| (x - x_mean) * (x - x_mean)).sum::<f64>() / n as f64;
        if x_var <= 0.0 {
            return Err(Error::ConstantColumn(j));
        }
        let cov = col
            .iter()
            .zip(score)
            .map(|(x, z)| (x - x_mean) * (z - z_mean))
            .sum::<f64>()
            / n as f64;
        total += cov * cov / (x_var * z_var);
    }
    for j in 0..data.p_c() {
        let col = data.cat_column(j);
        let levels = data.levels()[j];
        let mut sums = vec![0.0f64; levels];
        let mut counts = vec![0usize; levels];
        for i in 0..n {
            sums[col[i]] += score[i];
            counts[col[i]] += 1;
        }
        let mut ss_between = 0.0;
        for h in 0..levels {
            if counts[h] > 0 {
                let mean_h = sums[h] / counts[h] as f64;
                ss_between += counts[h] as f64 * (mean_h - z_mean) * (mean_h - z_mean);
            }
        }
        total += ss_between / (n as f64 * z_var);
    }
    Ok(total)
}

/// Tandem clustering: project onto `k - 1` mixed principal components (at
/// least one, capped at the rank), then run K-Means on the scores.
pub fn famd_kmeans(data: &MixedDataset, k: usize, opts: &IterOptions) -> Result<FamdKmeansFit> {
    let n = data.n();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    // Probe the rank with a 1-component projection, then retake.
    let probe = famd_project(data, 1)?;
    let rank = probe.spectrum.len();
    let dims = k.saturating_sub(1).clamp(1, rank);
    let projection = famd_project(data, dims)?;
    let fit = kmeans(&projection.scores, k, opts)?;
    Ok(FamdKmeansFit {
        partition: fit.partition.clone(),
        projection,
        kmeans: fit,
    })
}

/// Reduced K-Means: alternating least squares on `||X - Z G B^T||_F^2`
/// over the partition `Z`, score-space centroids `G`, and an orthonormal
/// `q x d` loading matrix `B`, with `X` the standardized design matrix.
///
/// Each sweep (a) takes `B` as the leading eigenvectors of the
/// between-cluster scatter, (b) recomputes centroids, (c) reassigns points
/// in score space, reseeding any emptied cluster at the largest-residual
/// point of a multi-member cluster. Every step is non-increasing in the
/// objective. A restart stops when the objective stalls (relative change
/// below `1e-8`) or after `max_iter` sweeps.
pub fn mixed_rkm(data: &MixedDataset, k: usize, opts: &RkmOptions) -> Result<RkmFit> {
    let x = famd_standardized_matrix(data)?;
    let n = x.nrows();
    let q = x.ncols();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    let dims = match opts.dims {
        Some(d) => {
            if d == 0 || d > q {
                return Err(Error::RankDeficient {
                    requested: d,
                    rank: q,
                });
            }
            d
        }
        None => k.saturating_sub(1).clamp(1, q),
    };
    let total_ss: f64 = x.iter().map(|v| v * v).sum();
    let mut best: Option<RkmFit> = None;
    for r in 0..opts.iter.starts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.iter.seed, &[r as u64]));
        let fit = rkm_single(&x, k, dims, total_ss, opts.iter.max_iter.max(1), &mut rng);
        let better = match &best {
            None => true,
            Some(b) => fit.objective < b.objective - 1e-12,
        };
        if better {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn rkm_single(
    x: &DMatrix<f64>,
    k: usize,
    dims: usize,
    total_ss: f64,
    max_iter: usize,
    rng: &mut ChaCha8Rng,
) -> RkmFit {
    let n = x.nrows();
    let q = x.ncols();
    // Random partition init; force every cluster non-empty by seeding one
    // distinct row into each slot.
    let mut assign: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    for (slot, i) in rand::seq::index::sample(rng, n, k).into_iter().enumerate() {
        assign[i] = slot;
    }
    let mut b = DMatrix::<f64>::zeros(q, dims);
    let mut g = DMatrix::<f64>::zeros(k, dims);
    let mut trace: Vec<f64> = Vec::new();
    let mut prev_obj = f64::INFINITY;
    for _ in 0..max_iter {
        // B-step: leading eigenvectors of the between-cluster scatter
        // sum_l n_l m_l m_l^T.
        let mut counts = vec![0usize; k];
        let mut means = DMatrix::<f64>::zeros(k, q);
        for i in 0..n {
            counts[assign[i]] += 1;
            for j in 0..q {
                means[(assign[i], j)] += x[(i, j)];
            }
        }
        let mut scatter = DMatrix::<f64>::zeros(q, q);
        for l in 0..k {
            if counts[l] == 0 {
                continue;
            }
            let w = counts[l] as f64;
            let m_l = DVector::from_iterator(q, (0..q).map(|j| means[(l, j)] / w));
            scatter.syger(w, &m_l, &m_l, 1.0);
        }
        b = top_eigenvectors(&scatter, dims);
        // Scores and centroids under the new subspace.
        let s = x * &b;
        g.fill(0.0);
        for i in 0..n {
            for d in 0..dims {
                g[(assign[i], d)] += s[(i, d)];
            }
        }
        for l in 0..k {
            if counts[l] > 0 {
                for d in 0..dims {
                    g[(l, d)] /= counts[l] as f64;
                }
            }
        }
        // Z-step: nearest centroid in score space, lowest slot on ties.
        for i in 0..n {
            let mut best_slot = 0;
            let mut best_d = f64::INFINITY;
            for l in 0..k {
                let mut d2 = 0.0;
                for d in 0..dims {
                    let diff = s[(i, d)] - g[(l, d)];
                    d2 += diff * diff;
                }
                if d2 < best_d {
                    best_d = d2;
                    best_slot = l;
                }
            }
            assign[i] = best_slot;
        }
        // Reseed empties at the largest residual of a multi-member cluster.
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
                let mut d2 = 0.0;
                for d in 0..dims {
                    let diff = s[(i, d)] - g[(assign[i], d)];
                    d2 += diff * diff;
                }
                if d2 > far_d {
                    far_d = d2;
                    far_i = i;
                }
            }
            if far_i == usize::MAX {
                break;
            }
            for d in 0..dims {
                g[(empty, d)] = s[(far_i, d)];
            }
            assign[far_i] = empty;
        }
        // Final centroid refresh and objective via the orthonormal-subspace
        // identity: ||X - Z G B^T||^2 = ||X||^2 - ||XB||^2 + ||XB - ZG||^2.
        let mut counts = vec![0usize; k];
        g.fill(0.0);
        for i in 0..n {
            counts[assign[i]] += 1;
            for d in 0..dims {
                g[(assign[i], d)] += s[(i, d)];
            }
        }
        for l in 0..k {
            if counts[l] > 0 {
                for d in 0..dims {
                    g[(l, d)] /= counts[l] as f64;
                }
            }
        }
        let score_ss: f64 = s.iter().map(|v| v * v).sum();
        let mut within = 0.0;
        for i in 0..n {
            for d in 0..dims {
                let diff = s[(i, d)] - g[(assign[i], d)];
                within += diff * diff;
            }
        }
        let objective = total_ss - score_ss + within;
        trace.push(objective);
        if (prev_obj - objective).abs() <= 1e-8 * prev_obj.abs().max(1.0) {
            break;
        }
        prev_obj = objective;
    }
    let objective = *trace.last().expect("at least one sweep");
    RkmFit {
        partition: Partition::new(assign, k).expect("slots in range"),
        loadings: b,
        centroids: g,
        objective,
        objective_trace: trace,
    }
}

/// Leading `dims` eigenvectors of a symmetric PSD matrix, descending by
/// eigenvalue, each column oriented so its largest-magnitude entry is
/// positive.
fn top_eigenvectors(scatter: &DMatrix<f64>, dims: usize) -> DMatrix<f64> {
    let eig = scatter.clone().symmetric_eigen();
    let q = scatter.nrows();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let mut b = DMatrix::<f64>::zeros(q, dims);
    for (d, &idx) in order.iter().take(dims).enumerate() {
        let mut max_abs = 0.0;
        let mut sign = 1.0;
        for j in 0..q {
            let v = eig.eigenvectors[(j, idx)];
            if v.abs() > max_abs {
                max_abs = v.abs();
                sign = if v >= 0.0 { 1.0 } else { -1.0 };
            }
        }
        for j in 0..q {
            b[(j, d)] = sign * eig.eigenvectors[(j, idx)];
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::oracle::pca_scores_population_scaled;
    use approx::assert_abs_diff_eq;

    fn mixed_fixture(seed: u64, n_half: usize) -> MixedDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cont = DMatrix::from_fn(2 * n_half, 3, |i, _| {
            let center = if i < n_half { 0.0 } else { 3.0 };
            center + rng.random::<f64>()
        });
        let cats: Vec<usize> = (0..2 * n_half)
            .map(|i| {
                if i < n_half {
                    rng.random_range(0..2)
                } else {
                    2 + rng.random_range(0..2)
                }
            })
            .collect();
        MixedDataset::new(cont, vec![cats], vec![4], None).unwrap()
    }

    #[test]
    fn pure_continuous_projection_matches_pca_up_to_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let raw = DMatrix::from_fn(40, 4, |_, j| rng.random::<f64>() * (j + 1) as f64);
        let data = MixedDataset::from_continuous(raw.clone()).unwrap();
        let proj = famd_project(&data, 3).unwrap();
        // The oracle runs plain PCA on the same population-scaled columns.
        let n = raw.nrows() as f64;
        let mut scaled = raw.clone();
        for j in 0..raw.ncols() {
            let mean: f64 = raw.column(j).iter().sum::<f64>() / n;
            let var: f64 = raw
                .column(j)
                .iter()
                .map(|x| (x - mean) * (x - mean))
                .sum::<f64>()
                / n;
            let sd = var.sqrt();
            for i in 0..raw.nrows() {
                scaled[(i, j)] = (raw[(i, j)] - mean) / sd;
            }
        }
        let oracle = pca_scores_population_scaled(&scaled, 3);
        for d in 0..3 {
            let dot: f64 = (0..raw.nrows())
                .map(|i| proj.scores[(i, d)] * oracle[(i, d)])
                .sum();
            let sign = if dot >= 0.0 { 1.0 } else { -1.0 };
            for i in 0..raw.nrows() {
                assert_abs_diff_eq!(proj.scores[(i, d)], sign * oracle[(i, d)], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn criterion_equals_explained_variance() {
        let data = mixed_fixture(7, 20);
        let proj = famd_project(&data, 3).unwrap();
        for d in 0..3 {
            let score: Vec<f64> = (0..data.n()).map(|i| proj.scores[(i, d)]).collect();
            let crit = famd_criterion(&data, &score).unwrap();
            assert_abs_diff_eq!(crit, proj.eigenvalues[d], epsilon = 1e-8);
        }
    }

    #[test]
    fn spectrum_sums_to_total_inertia() {
        let data = mixed_fixture(9, 15);
        let proj = famd_project(&data, 1).unwrap();
        // Continuous columns contribute 1 each; a categorical column with c
        // observed levels contributes c - 1.
        let expected = 3.0 + (4.0 - 1.0);
        assert_abs_diff_eq!(proj.spectrum.iter().sum::<f64>(), expected, epsilon = 1e-8);
    }

    #[test]
    fn score_variance_matches_eigenvalue() {
        let data = mixed_fixture(11, 18);
        let proj = famd_project(&data, 2).unwrap();
        let n = data.n() as f64;
        for d in 0..2 {
            let col: Vec<f64> = (0..data.n()).map(|i| proj.scores[(i, d)]).collect();
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            assert_abs_diff_eq!(var, proj.eigenvalues[d], epsilon = 1e-8);
        }
    }

    #[test]
    fn unobserved_level_is_harmless() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let cont = DMatrix::from_fn(12, 2, |_, _| rng.random::<f64>());
        let cats: Vec<usize> = (0..12).map(|i| i % 2).collect();
        // Three declared levels, only two observed.
        let data = MixedDataset::new(cont, vec![cats], vec![3], None).unwrap();
        let proj = famd_project(&data, 2).unwrap();
        assert!(proj.scores.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn projection_rejects_excessive_dims() {
        let data = mixed_fixture(15, 10);
        // Rank is at most 3 + 3 = 6.
        assert!(matches!(
            famd_project(&data, 50),
            Err(Error::RankDeficient { .. })
        ));
        assert!(matches!(
            famd_project(&data, 0),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn constant_continuous_column_is_rejected() {
        let cont = DMatrix::from_element(8, 1, 2.5);
        let data =
            MixedDataset::new(cont, vec![(0..8).map(|i| i % 2).collect()], vec![2], None).unwrap();
        assert!(matches!(
            famd_standardized_matrix(&data),
            Err(Error::ConstantColumn(0))
        ));
    }

    #[test]
    fn projection_is_deterministic() {
        let data = mixed_fixture(17, 12);
        let a = famd_project(&data, 2).unwrap();
        let b = famd_project(&data, 2).unwrap();
        for i in 0..data.n() {
            for d in 0..2 {
                assert_eq!(a.scores[(i, d)].to_bits(), b.scores[(i, d)].to_bits());
            }
        }
    }

    #[test]
    fn tandem_recovers_separated_groups() {
        let data = mixed_fixture(19, 25);
        let fit = famd_kmeans(&data, 2, &IterOptions::new(5, 3)).unwrap();
        let l = fit.partition.labels();
        let first = l[0];
        let agree = l.iter().take(25).filter(|&&x| x == first).count()
            + l.iter().skip(25).filter(|&&x| x != first).count();
        assert!(agree >= 48, "only {agree}/50 consistent");
        assert_eq!(fit.projection.scores.ncols(), 1);
    }

    #[test]
    fn rkm_objective_is_monotone() {
        for seed in 0..20u64 {
            let data = mixed_fixture(200 + seed, 15);
            let mut opts = RkmOptions::new(1, seed);
            opts.iter.max_iter = 40;
            let fit = mixed_rkm(&data, 3, &opts).unwrap();
            for w in fit.objective_trace.windows(2) {
                assert!(
                    w[1] <= w[0] + 1e-9,
                    "trace rose at seed {seed}: {:?}",
                    fit.objective_trace
                );
            }
        }
    }

    #[test]
    fn rkm_loadings_are_orthonormal() {
        let data = mixed_fixture(23, 15);
        let fit = mixed_rkm(&data, 3, &RkmOptions::new(2, 5)).unwrap();
        let gram = fit.loadings.transpose() * &fit.loadings;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gram[(i, j)], expect, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn rkm_objective_matches_direct_residual() {
        let data = mixed_fixture(29, 12);
        let fit = mixed_rkm(&data, 2, &RkmOptions::new(3, 8)).unwrap();
        let x = famd_standardized_matrix(&data).unwrap();
        let mut residual = 0.0;
        for i in 0..x.nrows() {
            let slot = fit.partition.labels()[i];
            for j in 0..x.ncols() {
                // Reconstruction: (G B^T) row for the assigned cluster.
                let mut recon = 0.0;
                for d in 0..fit.loadings.ncols() {
                    recon += fit.centroids[(slot, d)] * fit.loadings[(j, d)];
                }
                let diff = x[(i, j)] - recon;
                residual += diff * diff;
            }
        }
        assert_abs_diff_eq!(fit.objective, residual, epsilon = 1e-6);
    }

    #[test]
    fn rkm_recovers_separated_groups() {
        let data = mixed_fixture(31, 25);
        let fit = mixed_rkm(&data, 2, &RkmOptions::new(5, 2)).unwrap();
        let l = fit.partition.labels();
        let first = l[0];
        let agree = l.iter().take(25).filter(|&&x| x == first).count()
            + l.iter().skip(25).filter(|&&x| x != first).count();
        assert!(agree >= 48, "only {agree}/50 consistent");
    }

    #[test]
    fn rkm_rejects_excessive_dims() {
        let data = mixed_fixture(37, 8);
        let opts = RkmOptions {
            iter: IterOptions::new(1, 0),
            dims: Some(100),
        };
        assert!(matches!(
            mixed_rkm(&data, 2, &opts),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn rkm_is_reproducible() {
        let data = mixed_fixture(41, 14);
        let opts = RkmOptions::new(4, 77);
        let a = mixed_rkm(&data, 3, &opts).unwrap();
        let b = mixed_rkm(&data, 3, &opts).unwrap();
        assert_eq!(a.partition.labels(), b.partition.labels());
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }
}
