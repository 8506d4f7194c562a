//! Independent cross-check oracles and the `validate` self-test suite.
//!
//! Everything under [`oracle`] is deliberately written from first principles
//! (pair enumeration, exhaustive search, textbook formulas) and shares no
//! code with the implementations it checks.

use nalgebra::DMatrix;

pub mod oracle {
    use super::*;

    /// Adjusted Rand index by brute-force enumeration of all observation
    /// pairs, with no contingency table.
    pub fn ari_pair_enumeration(u: &[usize], v: &[usize]) -> f64 {
        assert_eq!(u.len(), v.len());
        let n = u.len();
        let (mut ss, mut sd, mut ds, mut dd) = (0f64, 0f64, 0f64, 0f64);
        for i in 0..n {
            for j in (i + 1)..n {
                match (u[i] == u[j], v[i] == v[j]) {
                    (true, true) => ss += 1.0,
                    (true, false) => sd += 1.0,
                    (false, true) => ds += 1.0,
                    (false, false) => dd += 1.0,
                }
            }
        }
        let denom = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd);
        if denom == 0.0 {
            return 1.0;
        }
        2.0 * (ss * dd - sd * ds) / denom
    }

    /// Maximum of `P(sigma | A) - P(sigma | B)` over every subset `sigma` of
    /// category indices, found by enumerating all `2^c` subsets.
    pub fn exhaustive_best_subset(pa: &[f64], pb: &[f64]) -> f64 {
        assert_eq!(pa.len(), pb.len());
        let c = pa.len();
        assert!(c <= 20, "exhaustive subset search is exponential");
        let mut best = 0.0f64;
        for mask in 0u32..(1 << c) {
            let mut diff = 0.0;
            for t in 0..c {
                if mask & (1 << t) != 0 {
                    diff += pa[t] - pb[t];
                }
            }
            best = best.max(diff);
        }
        best
    }

    /// Best medoid set by exhaustive search over all `C(n, k)` subsets.
    /// Returns the (lexicographically first) optimal medoid indices and
    /// their total assignment cost.
    pub fn exhaustive_medoid_search(d: &DMatrix<f64>, k: usize) -> (Vec<usize>, f64) {
        let n = d.nrows();
        assert!(k >= 1 && k <= n);
        let mut best_cost = f64::INFINITY;
        let mut best: Vec<usize> = Vec::new();
        let mut current = vec![0usize; k];
        #[allow(clippy::too_many_arguments)]
        fn rec(
            d: &DMatrix<f64>,
            n: usize,
            k: usize,
            depth: usize,
            from: usize,
            current: &mut Vec<usize>,
            best_cost: &mut f64,
            best: &mut Vec<usize>,
        ) {
            if depth == k {
                let mut cost = 0.0;
                for i in 0..n {
                    let mut m = f64::INFINITY;
                    for &c in current.iter() {
                        m = m.min(d[(i, c)]);
                    }
                    cost += m;
                }
                if cost < *best_cost {
                    *best_cost = cost;
                    *best = current.clone();
                }
                return;
            }
            for c in from..n {
                current[depth] = c;
                rec(d, n, k, depth + 1, c + 1, current, best_cost, best);
            }
        }
        rec(d, n, k, 0, 0, &mut current, &mut best_cost, &mut best);
        (best, best_cost)
    }

    /// Plain principal component scores of a real matrix: center and scale
    /// columns by the population standard deviation, then take the top
    /// eigenvectors of the covariance matrix. An independent reference for
    /// the factor projection on purely continuous data.
    pub fn pca_scores_population_scaled(points: &DMatrix<f64>, dims: usize) -> DMatrix<f64> {
        let n = points.nrows();
        let p = points.ncols();
        assert!(dims <= p);
        let mut m = points.clone();
        for j in 0..p {
            let mean: f64 = (0..n).map(|i| m[(i, j)]).sum::<f64>() / n as f64;
            let var: f64 = (0..n).map(|i| (m[(i, j)] - mean).powi(2)).sum::<f64>() / n as f64;
            let sd = var.sqrt();
            assert!(sd > 0.0, "constant column in PCA oracle");
            for i in 0..n {
                m[(i, j)] = (m[(i, j)] - mean) / sd;
            }
        }
        let cov = m.transpose() * &m / n as f64;
        let eig = nalgebra::SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let mut v = DMatrix::zeros(p, dims);
        for (col, &idx) in order.iter().take(dims).enumerate() {
            for r in 0..p {
                v[(r, col)] = eig.eigenvectors[(r, idx)];
            }
        }
        m * v
    }

    /// Standard normal CDF through the Abramowitz-Stegun 7.1.26 error
    /// function approximation (absolute error below 2e-7).
    pub fn normal_cdf(x: f64) -> f64 {
        0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
    }

    fn erf(x: f64) -> f64 {
        let sign = if x < 0.0 { -1.0 } else { 1.0 };
        let x = x.abs();
        let p = 0.327_591_1;
        let a = [
            0.254_829_592,
            -0.284_496_736,
            1.421_413_741,
            -1.453_152_027,
            1.061_405_429,
        ];
        let t = 1.0 / (1.0 + p * x);
        let mut poly = 0.0;
        let mut tp = t;
        for &coef in &a {
            poly += coef * tp;
            tp *= t;
        }
        sign * (1.0 - poly * (-x * x).exp())
    }

    /// Closed-form overlap of two equally weighted univariate unit-variance
    /// normals whose means sit `2 * delta` apart: `2 * Phi(-delta)`.
    pub fn univariate_equal_weight_overlap(delta: f64) -> f64 {
        2.0 * normal_cdf(-delta)
    }
}

/// Outcome of one self-test.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Measured values backing the verdict.
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult {
            name,
            passed,
            detail,
        }
    }
}

/// Runs the oracle cross-checks against the production implementations and
/// reports one result per check. `quick` trades Monte Carlo resolution for
/// speed; the full suite tightens tolerances and sample counts.
pub fn run_suite(quick: bool) -> Vec<CheckResult> {
    vec![
        check_ari_against_pair_enumeration(),
        check_subset_delta_against_exhaustive(),
        check_pam_against_exhaustive(),
        check_factor_projection_against_pca(),
        check_zero_weight_prototypes_match_kmeans(),
        check_overlap_against_univariate_formula(quick),
        check_objective_traces_monotone(if quick { 5 } else { 25 }),
        check_score_label_invariance(),
    ]
}

fn check_ari_against_pair_enumeration() -> CheckResult {
    use crate::data::Partition;
    use crate::metrics::adjusted_rand_index;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let n = 40;
        let u: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let v: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
        let fast = adjusted_rand_index(&Partition::from_labels(&u), &Partition::from_labels(&v))
            .expect("equal lengths");
        let slow = oracle::ari_pair_enumeration(&u, &v);
        worst = worst.max((fast - slow).abs());
    }
    CheckResult::new(
        "ari-matches-pair-enumeration",
        worst < 1e-12,
        format!("max |difference| = {worst:.2e} over 5 random label pairs"),
    )
}

fn check_subset_delta_against_exhaustive() -> CheckResult {
    use crate::dissimilarity::best_subset_delta;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let c = rng.random_range(2..=8);
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
            let raw: Vec<f64> = (0..c).map(|_| rng.random::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        let pa = draw(&mut rng);
        let pb = draw(&mut rng);
        let fast = best_subset_delta(&pa, &pb);
        let slow = oracle::exhaustive_best_subset(&pa, &pb);
        worst = worst.max((fast - slow).abs());
    }
    CheckResult::new(
        "greedy-subset-delta-matches-exhaustive",
        worst < 1e-12,
        format!("max |difference| = {worst:.2e} over 20 random conditional pairs"),
    )
}

fn check_pam_against_exhaustive() -> CheckResult {
    use crate::dissimilarity::DissimilarityMatrix;
    use crate::medoids::{pam, PamInit};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
    let mut worst_ratio = 0.0f64;
    for trial in 0..5 {
        let n = 14;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random::<f64>() * 4.0, rng.random::<f64>() * 4.0))
            .collect();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let dx = pts[i].0 - pts[j].0;
            let dy = pts[i].1 - pts[j].1;
            (dx * dx + dy * dy).sqrt()
        });
        let d = DissimilarityMatrix::from_matrix(m).expect("valid distances");
        let state = pam(
            &d,
            3,
            PamInit::RandomStarts {
                starts: 5,
                seed: 40 + trial,
            },
        )
        .expect("pam runs");
        let (_, best_cost) = oracle::exhaustive_medoid_search(d.as_matrix(), 3);
        let ratio = if best_cost > 0.0 {
            (state.cost - best_cost) / best_cost
        } else {
            0.0
        };
        worst_ratio = worst_ratio.max(ratio);
    }
    CheckResult::new(
        "pam-within-5pct-of-exhaustive",
        worst_ratio < 0.05,
        format!(
            "worst excess cost = {:.3}% over 5 geometries",
            worst_ratio * 100.0
        ),
    )
}

fn check_factor_projection_against_pca() -> CheckResult {
    use crate::data::MixedDataset;
    use crate::factor::famd_project;
    use rand::SeedableRng;
    use rand_distr::StandardNormal;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
    let n = 60;
    let p = 4;
    let points = DMatrix::from_fn(n, p, |i, j| {
        let base: f64 = rand::Rng::sample(&mut rng, StandardNormal);
        base + (i as f64 * 0.01) * (j as f64 + 1.0)
    });
    let data = MixedDataset::from_continuous(points.clone()).expect("valid data");
    let proj = famd_project(&data, 2).expect("projection runs");
    let reference = oracle::pca_scores_population_scaled(&points, 2);
    let mut worst = 0.0f64;
    for c in 0..2 {
        let mut direct = 0.0f64;
        let mut flipped = 0.0f64;
        for r in 0..n {
            direct = direct.max((proj.scores[(r, c)] - reference[(r, c)]).abs());
            flipped = flipped.max((proj.scores[(r, c)] + reference[(r, c)]).abs());
        }
        worst = worst.max(direct.min(flipped));
    }
    CheckResult::new(
        "factor-projection-matches-pca",
        worst < 1e-8,
        format!("max |score difference| = {worst:.2e} up to column sign"),
    )
}

fn check_zero_weight_prototypes_match_kmeans() -> CheckResult {
    use crate::data::z_standardize;
    use crate::data::MixedDataset;
    use crate::proto::{k_prototypes, kmeans, IterOptions};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(15);
    let n = 80;
    let points = DMatrix::from_fn(n, 3, |i, _| {
        let shift = if i < n / 2 { -2.0 } else { 2.0 };
        shift + rng.random::<f64>()
    });
    let data = MixedDataset::from_continuous(points).expect("valid data");
    let opts = IterOptions::new(3, 77);
    let proto = k_prototypes(&data, 2, &opts).expect("prototypes run");
    let (standardized, _) = z_standardize(&data).expect("non-constant");
    let km = kmeans(standardized.continuous(), 2, &opts).expect("kmeans runs");
    let same = proto.partition.labels() == km.partition.labels();
    CheckResult::new(
        "prototypes-without-categories-match-kmeans",
        same,
        if same {
            "identical labels under a shared seed".to_string()
        } else {
            "label vectors diverged".to_string()
        },
    )
}

fn check_overlap_against_univariate_formula(quick: bool) -> CheckResult {
    use crate::simgen::{mean_overlap, pairwise_overlap_mc};
    use nalgebra::DVector;
    let delta = 1.2816;
    let (samples, tol) = if quick {
        (30_000, 0.02)
    } else {
        (100_000, 0.01)
    };
    let weights = [0.5, 0.5];
    let means = [
        DVector::from_vec(vec![-delta]),
        DVector::from_vec(vec![delta]),
    ];
    let covs = [DMatrix::identity(1, 1), DMatrix::identity(1, 1)];
    let mc = pairwise_overlap_mc(&weights, &means, &covs, samples, 900).map(|m| mean_overlap(&m));
    match mc {
        Ok(est) => {
            let truth = oracle::univariate_equal_weight_overlap(delta);
            let err = (est - truth).abs();
            CheckResult::new(
                "overlap-estimator-matches-normal-formula",
                err < tol,
                format!("estimate {est:.4} vs closed form {truth:.4} ({samples} draws)"),
            )
        }
        Err(e) => CheckResult::new(
            "overlap-estimator-matches-normal-formula",
            false,
            format!("estimator failed: {e}"),
        ),
    }
}

fn check_objective_traces_monotone(instances: usize) -> CheckResult {
    use crate::data::MixedDataset;
    use crate::dissimilarity::gower_matrix;
    use crate::factor::{mixed_rkm, RkmOptions};
    use crate::medoids::{pam, PamInit};
    use crate::proto::{k_prototypes, kmeans, modha_spangler, IterOptions};
    use rand::{Rng, SeedableRng};
    let tol = 1e-9;
    let mut violators: Vec<String> = Vec::new();
    let mut checked = 0usize;
    for inst in 0..instances {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(600 + inst as u64);
        let n = 60;
        let points = DMatrix::from_fn(n, 2, |i, _| {
            let shift = if i % 2 == 0 { -1.0 } else { 1.0 };
            shift + rng.random::<f64>()
        });
        let cats: Vec<Vec<usize>> = vec![(0..n).map(|_| rng.random_range(0..3)).collect()];
        let data = MixedDataset::new(points, cats, vec![3], None).expect("valid data");
        let seed = 700 + inst as u64;
        let descending = |t: &[f64]| t.windows(2).all(|w| w[1] <= w[0] + tol);
        let km = kmeans(data.continuous(), 2, &IterOptions::new(1, seed)).expect("runs");
        checked += 1;
        if !descending(&km.objective_trace) {
            violators.push(format!("kmeans@{inst}"));
        }
        let kp = k_prototypes(&data, 2, &IterOptions::new(1, seed)).expect("runs");
        checked += 1;
        if !descending(&kp.objective_trace) {
            violators.push(format!("k-prototypes@{inst}"));
        }
        let ms = modha_spangler(&data, 2, &IterOptions::new(1, seed), &[1.0]).expect("runs");
        checked += 1;
        if !descending(&ms.objective_trace) {
            violators.push(format!("modha-spangler@{inst}"));
        }
        let rkm = mixed_rkm(&data, 2, &RkmOptions::new(1, seed)).expect("runs");
        checked += 1;
        if !descending(&rkm.objective_trace) {
            violators.push(format!("mixed-rkm@{inst}"));
        }
        let d = gower_matrix(&data, None).expect("distances");
        let pm = pam(&d, 2, PamInit::RandomStarts { starts: 1, seed }).expect("runs");
        checked += 1;
        if !descending(&pm.cost_trace) {
            violators.push(format!("pam@{inst}"));
        }
    }
    CheckResult::new(
        "objective-traces-monotone",
        violators.is_empty(),
        if violators.is_empty() {
            format!("0 violations in {checked} traces (tolerance {tol:.0e})")
        } else {
            format!(
                "{} violations in {checked} traces (tolerance {tol:.0e}): {}",
                violators.len(),
                violators.join(", ")
            )
        },
    )
}

fn check_score_label_invariance() -> CheckResult {
    use crate::data::Partition;
    use crate::metrics::{adjusted_mutual_information, adjusted_rand_index};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(16);
    let n = 50;
    let u: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
    let v: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
    // Relabel clusters of v by a fixed permutation; scores must not move.
    let permuted: Vec<usize> = v.iter().map(|&l| [2, 0, 1][l]).collect();
    let pu = Partition::from_labels(&u);
    let pv = Partition::from_labels(&v);
    let pw = Partition::from_labels(&permuted);
    let d_ari =
        (adjusted_rand_index(&pu, &pv).unwrap() - adjusted_rand_index(&pu, &pw).unwrap()).abs();
    let d_ami = (adjusted_mutual_information(&pu, &pv).unwrap()
        - adjusted_mutual_information(&pu, &pw).unwrap())
    .abs();
    let worst = d_ari.max(d_ami);
    CheckResult::new(
        "scores-invariant-to-relabeling",
        worst < 1e-12,
        format!("max score shift under relabeling = {worst:.2e}"),
    )
}

#[cfg(test)]
mod tests {
    use super::oracle;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quick_suite_passes_every_check() {
        let results = super::run_suite(true);
        assert_eq!(results.len(), 8);
        for r in &results {
            assert!(r.passed, "check {} failed: {}", r.name, r.detail);
        }
    }

    #[test]
    fn normal_cdf_matches_reference_values() {
        assert_abs_diff_eq!(oracle::normal_cdf(0.0), 0.5, epsilon = 1e-7);
        assert_abs_diff_eq!(oracle::normal_cdf(1.0), 0.841_344_746, epsilon = 1e-6);
        assert_abs_diff_eq!(oracle::normal_cdf(-1.2816), 0.099_925, epsilon = 1e-4);
    }

    #[test]
    fn subset_search_handles_simple_tables() {
        // Disjoint supports: the best subset captures all of A's mass.
        let best = oracle::exhaustive_best_subset(&[0.5, 0.5, 0.0], &[0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(best, 1.0, epsilon = 1e-12);
        // Identical conditionals: nothing separates A from B.
        let none = oracle::exhaustive_best_subset(&[0.25, 0.75], &[0.25, 0.75]);
        assert_abs_diff_eq!(none, 0.0, epsilon = 1e-12);
    }
}
