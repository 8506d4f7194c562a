//! Pairwise dissimilarity matrices for mixed data.
//!
//! Three constructions are provided:
//!
//! * [`gower_matrix`]: weighted average of per-variable similarities
//!   (range-normalized Manhattan for continuous columns, matching indicator
//!   for categorical ones), subtracted from 1.
//! * [`hl_scaled_matrix`]: Euclidean distance on z-scored continuous columns
//!   joined with indicator blocks rescaled so that each categorical variable
//!   contributes the same expected squared difference as a continuous one.
//! * [`ahmad_dey_matrix`]: squared Euclidean on weighted continuous columns
//!   plus squared co-occurrence distances between categorical levels, both
//!   learned from the data by [`ahmad_dey_model`].

use nalgebra::DMatrix;

use crate::data::{z_standardize, MixedDataset};
use crate::error::{Error, Result};

/// A symmetric nonnegative dissimilarity matrix with zero diagonal.
#[derive(Debug, Clone)]
pub struct DissimilarityMatrix {
    d: DMatrix<f64>,
}

impl DissimilarityMatrix {
    /// Validates symmetry (within `1e-10`), a zero diagonal, and
    /// nonnegativity, then wraps the matrix.
    pub fn from_matrix(d: DMatrix<f64>) -> Result<Self> {
        if d.nrows() != d.ncols() {
            return Err(Error::LengthMismatch {
                expected: d.nrows(),
                actual: d.ncols(),
            });
        }
        for i in 0..d.nrows() {
            if d[(i, i)] != 0.0 {
                return Err(Error::ConfigInvalid(format!(
                    "dissimilarity diagonal entry {i} is {} (must be 0)",
                    d[(i, i)]
                )));
            }
            for j in 0..i {
                let a = d[(i, j)];
                let b = d[(j, i)];
                if (a - b).abs() > 1e-10 {
                    return Err(Error::ConfigInvalid(format!(
                        "dissimilarity asymmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
                if a < 0.0 {
                    return Err(Error::ConfigInvalid(format!(
                        "negative dissimilarity at ({i}, {j}): {a}"
                    )));
                }
            }
        }
        Ok(Self { d })
    }

    /// Builds from a closure giving the entry for `i < j`; symmetry and the
    /// zero diagonal hold by construction.
    pub(crate) fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                d[(i, j)] = v;
                d[(j, i)] = v;
            }
        }
        Self { d }
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.d.nrows()
    }

    /// Dissimilarity between observations `i` and `j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[(i, j)]
    }

    /// The underlying dense matrix.
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.d
    }
}

/// Gower dissimilarity: `1 - sum_j w_j s_j / sum_j w_j` with per-variable
/// similarities `s_j`. Weights follow column order: continuous columns first,
/// then categorical; `None` means equal weights. Entries lie in `[0, 1]`.
///
/// # Errors
///
/// [`Error::ConstantColumn`] when a continuous column has zero range,
/// [`Error::NonpositiveWeight`] for a non-positive weight, and
/// [`Error::LengthMismatch`] when the weight vector has the wrong length.
pub fn gower_matrix(data: &MixedDataset, weights: Option<&[f64]>) -> Result<DissimilarityMatrix> {
    let p = data.p();
    if let Some(w) = weights {
        if w.len() != p {
            return Err(Error::LengthMismatch {
                expected: p,
                actual: w.len(),
            });
        }
        if let Some(j) = w.iter().position(|&x| x <= 0.0 || !x.is_finite()) {
            return Err(Error::NonpositiveWeight(j));
        }
    }
    let w: Vec<f64> = weights.map_or_else(|| vec![1.0; p], <[f64]>::to_vec);
    let w_total: f64 = w.iter().sum();
    let n = data.n();
    let p_r = data.p_r();
    let mut ranges = Vec::with_capacity(p_r);
    for j in 0..p_r {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let x = data.continuous()[(i, j)];
            lo = lo.min(x);
            hi = hi.max(x);
        }
        let range = hi - lo;
        if range <= 0.0 {
            return Err(Error::ConstantColumn(j));
        }
        ranges.push(range);
    }
    let mat = DissimilarityMatrix::from_fn(n, |i, j| {
        let mut sim = 0.0;
        for c in 0..p_r {
            let diff = (data.continuous()[(i, c)] - data.continuous()[(j, c)]).abs();
            sim += w[c] * (1.0 - diff / ranges[c]);
        }
        for c in 0..data.p_c() {
            if data.cat_column(c)[i] == data.cat_column(c)[j] {
                sim += w[p_r + c];
            }
        }
        // Clamp tiny negative round-off so entries stay in [0, 1].
        (1.0 - sim / w_total).max(0.0)
    });
    Ok(mat)
}

/// Scale factor for one categorical variable's indicator block so that the
/// expected squared difference between two independent draws equals 1 (the
/// value a unit-variance continuous column attains): `1 / sqrt(2 (1 - sum
/// q_h^2))` for observed level proportions `q_h`.
pub fn hl_scale_factor(proportions: &[f64]) -> f64 {
    let gini: f64 = 1.0 - proportions.iter().map(|q| q * q).sum::<f64>();
    1.0 / (2.0 * gini).sqrt()
}

/// Euclidean distance on the variance-matched joint representation: z-scored
/// continuous columns next to indicator blocks scaled by [`hl_scale_factor`].
/// On purely continuous data this is exactly the Euclidean distance of the
/// z-scored matrix.
///
/// # Errors
///
/// [`Error::ConstantColumn`] when a continuous column has zero variance or a
/// categorical column has a single observed level (the scaling equation then
/// has no solution).
pub fn hl_scaled_matrix(data: &MixedDataset) -> Result<DissimilarityMatrix> {
    let (std, params) = z_standardize(data)?;
    let mut scales = Vec::with_capacity(data.p_c());
    for (j, props) in params.proportions.iter().enumerate() {
        let gini: f64 = 1.0 - props.iter().map(|q| q * q).sum::<f64>();
        if gini <= 0.0 {
            return Err(Error::ConstantColumn(data.p_r() + j));
        }
        scales.push(hl_scale_factor(props));
    }
    let n = data.n();
    let p_r = data.p_r();
    let mat = DissimilarityMatrix::from_fn(n, |i, j| {
        let mut s = 0.0;
        for c in 0..p_r {
            let diff = std.continuous()[(i, c)] - std.continuous()[(j, c)];
            s += diff * diff;
        }
        for (c, scale) in scales.iter().enumerate() {
            if data.cat_column(c)[i] != data.cat_column(c)[j] {
                // Two scaled indicator columns differ by the block scale.
                s += 2.0 * scale * scale;
            }
        }
        s.sqrt()
    });
    Ok(mat)
}

/// Co-occurrence distance model: per-column tables of distances between
/// category levels, learned from how levels co-distribute with every other
/// column, plus derived weights for continuous columns.
#[derive(Debug, Clone)]
pub struct CooccurrenceModel {
    p_r: usize,
    levels: Vec<usize>,
    bins: usize,
    /// `delta_j(A, B)` tables for categorical columns, `c_j x c_j` each.
    cat_tables: Vec<DMatrix<f64>>,
    /// Significance weight `w_j` per continuous column.
    con_weights: Vec<f64>,
    /// Interior bin edges per continuous column, on the standardized scale.
    bin_edges: Vec<Vec<f64>>,
    /// Standardization applied before discretization and distances.
    means: Vec<f64>,
    sds: Vec<f64>,
}

impl CooccurrenceModel {
    /// Distance between levels `a` and `b` of categorical column `j`.
    pub fn cat_distance(&self, j: usize, a: usize, b: usize) -> f64 {
        self.cat_tables[j][(a, b)]
    }

    /// Weight of continuous column `j`.
    pub fn continuous_weight(&self, j: usize) -> f64 {
        self.con_weights[j]
    }

    /// All continuous weights.
    pub fn continuous_weights(&self) -> &[f64] {
        &self.con_weights
    }

    /// Interior bin edges used to discretize continuous column `j`.
    pub fn bin_edges(&self, j: usize) -> &[f64] {
        &self.bin_edges[j]
    }

    /// Number of discretization bins.
    pub fn bins(&self) -> usize {
        self.bins
    }

    fn check_schema(&self, data: &MixedDataset) -> Result<()> {
        if data.p_r() != self.p_r || data.levels() != self.levels.as_slice() {
            return Err(Error::SchemaMismatch(format!(
                "model built for p_r = {} levels {:?}, dataset has p_r = {} levels {:?}",
                self.p_r,
                self.levels,
                data.p_r(),
                data.levels()
            )));
        }
        Ok(())
    }
}

/// `max_sigma [P(sigma | A) - P(sigma | B)]`, attained by the subset of
/// categories where `P(t | A) > P(t | B)`.
pub fn best_subset_delta(pa: &[f64], pb: &[f64]) -> f64 {
    let mut s = 0.0;
    for (a, b) in pa.iter().zip(pb) {
        if a > b {
            s += a - b;
        }
    }
    s
}

/// Discretized view of every column: categorical columns keep their codes,
/// continuous ones are cut into `bins` equal-width intervals.
struct DiscretizedColumns {
    codes: Vec<Vec<usize>>,
    sizes: Vec<usize>,
}

/// Learns a [`CooccurrenceModel`] from the data.
///
/// Continuous columns are z-standardized and cut into `bins` equal-width
/// intervals. For every ordered level pair `(A, B)` of a column `j` and
/// every other column `j'`, the distance contribution is the best-subset
/// probability difference of the conditional distributions of `j'` given `A`
/// versus `B`; `delta_j(A, B)` averages these over all `j' != j`. Continuous
/// column weights average `delta` over the bin pairs of the column itself.
///
/// A level with zero support gets uniform conditionals, so distances that
/// involve only unobserved levels are 0. With a single column overall there
/// is no co-occurrence evidence and the level distance falls back to the
/// 0/1 indicator.
///
/// # Errors
///
/// [`Error::ConstantColumn`] when a continuous column cannot be standardized.
pub fn ahmad_dey_model(data: &MixedDataset, bins: usize) -> Result<CooccurrenceModel> {
    assert!(bins >= 2, "need at least two discretization bins");
    let (std, params) = z_standardize_allow_empty(data)?;
    let n = data.n();
    let p_r = data.p_r();
    let p_c = data.p_c();
    let p = p_r + p_c;

    let mut codes: Vec<Vec<usize>> = Vec::with_capacity(p);
    let mut sizes: Vec<usize> = Vec::with_capacity(p);
    let mut bin_edges: Vec<Vec<f64>> = Vec::with_capacity(p_r);
    for j in 0..p_r {
        let col: Vec<f64> = (0..n).map(|i| std.continuous()[(i, j)]).collect();
        let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (1..bins).map(|b| lo + width * b as f64).collect();
        let coded: Vec<usize> = col
            .iter()
            .map(|&x| {
                let mut lvl = 0;
                for &e in &edges {
                    if x > e {
                        lvl += 1;
                    }
                }
                lvl
            })
            .collect();
        codes.push(coded);
        sizes.push(bins);
        bin_edges.push(edges);
    }
    for j in 0..p_c {
        codes.push(data.cat_column(j).to_vec());
        sizes.push(data.levels()[j]);
    }
    let disc = DiscretizedColumns { codes, sizes };

    let mut tables: Vec<DMatrix<f64>> = Vec::with_capacity(p);
    for j in 0..p {
        tables.push(column_delta_table(&disc, j, n));
    }
    let cat_tables: Vec<DMatrix<f64>> = tables[p_r..].to_vec();
    let con_weights: Vec<f64> = tables[..p_r]
        .iter()
        .map(|t| {
            let c = t.nrows();
            let mut sum = 0.0;
            let mut cnt = 0usize;
            for a in 0..c {
                for b in (a + 1)..c {
                    sum += t[(a, b)];
                    cnt += 1;
                }
            }
            if cnt == 0 {
                0.0
            } else {
                sum / cnt as f64
            }
        })
        .collect();

    Ok(CooccurrenceModel {
        p_r,
        levels: data.levels().to_vec(),
        bins,
        cat_tables,
        con_weights,
        bin_edges,
        means: params.0,
        sds: params.1,
    })
}

/// Per-column means and standard deviations, in column order.
type ColumnMoments = (Vec<f64>, Vec<f64>);

/// Standardization that tolerates `p_r == 0` and reports means and sds.
fn z_standardize_allow_empty(data: &MixedDataset) -> Result<(MixedDataset, ColumnMoments)> {
    if data.p_r() == 0 {
        return Ok((data.clone(), (Vec::new(), Vec::new())));
    }
    let (std, params) = z_standardize(data)?;
    Ok((std, (params.means, params.sds)))
}

fn column_delta_table(disc: &DiscretizedColumns, j: usize, n: usize) -> DMatrix<f64> {
    let c = disc.sizes[j];
    let p = disc.codes.len();
    let mut table = DMatrix::zeros(c, c);
    // Conditional distributions of every other column given each level of j.
    let mut level_counts = vec![0usize; c];
    for &code in &disc.codes[j] {
        level_counts[code] += 1;
    }
    let others: Vec<usize> = (0..p).filter(|&o| o != j).collect();
    if others.is_empty() {
        // No co-occurrence evidence: fall back to the 0/1 indicator.
        for a in 0..c {
            for b in 0..c {
                if a != b {
                    table[(a, b)] = 1.0;
                }
            }
        }
        return table;
    }
    for &o in &others {
        let co = disc.sizes[o];
        // cond[a][t] = P(column o takes level t | column j takes level a).
        let mut cond = vec![vec![0.0f64; co]; c];
        for i in 0..n {
            cond[disc.codes[j][i]][disc.codes[o][i]] += 1.0;
        }
        for a in 0..c {
            if level_counts[a] == 0 {
                // Unobserved level: uniform conditionals.
                cond[a].fill(1.0 / co as f64);
            } else {
                for v in cond[a].iter_mut() {
                    *v /= level_counts[a] as f64;
                }
            }
        }
        for a in 0..c {
            for b in (a + 1)..c {
                let d = best_subset_delta(&cond[a], &cond[b]);
                table[(a, b)] += d;
                table[(b, a)] += d;
            }
        }
    }
    table / others.len() as f64
}

/// Squared-distance matrix under a learned co-occurrence model:
/// `sum_j (w_j (z_ij - z_i'j))^2 + sum_j delta_j(x_ij, x_i'j)^2` with
/// z-scored continuous values.
///
/// # Errors
///
/// [`Error::SchemaMismatch`] when the dataset's shape or level counts differ
/// from those the model was built on, and [`Error::ConstantColumn`] when a
/// continuous column cannot be standardized.
pub fn ahmad_dey_matrix(
    data: &MixedDataset,
    model: &CooccurrenceModel,
) -> Result<DissimilarityMatrix> {
    model.check_schema(data)?;
    let n = data.n();
    let p_r = data.p_r();
    // Standardize with the model's own parameters so model and data agree.
    let mut z = data.continuous().clone();
    for j in 0..p_r {
        let sd = model.sds[j];
        if sd <= 0.0 {
            return Err(Error::ConstantColumn(j));
        }
        for i in 0..n {
            z[(i, j)] = (z[(i, j)] - model.means[j]) / sd;
        }
    }
    let mat = DissimilarityMatrix::from_fn(n, |i, j| {
        let mut s = 0.0;
        for c in 0..p_r {
            let diff = model.con_weights[c] * (z[(i, c)] - z[(j, c)]);
            s += diff * diff;
        }
        for c in 0..data.p_c() {
            let d = model.cat_tables[c][(data.cat_column(c)[i], data.cat_column(c)[j])];
            s += d * d;
        }
        s
    });
    Ok(mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::MixedDataset;
    use crate::validate::oracle;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn mixed_toy() -> MixedDataset {
        let cont = DMatrix::from_row_slice(4, 2, &[0.0, 1.0, 1.0, 3.0, 2.0, 5.0, 4.0, 9.0]);
        MixedDataset::new(
            cont,
            vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]],
            vec![2, 2],
            None,
        )
        .unwrap()
    }

    #[test]
    fn gower_single_mismatch_among_four_variables() {
        // Two rows equal everywhere except one categorical column: 1/4.
        let cont = DMatrix::from_row_slice(3, 2, &[0.0, 1.0, 0.0, 1.0, 4.0, 5.0]);
        let data =
            MixedDataset::new(cont, vec![vec![0, 1, 1], vec![1, 1, 0]], vec![2, 2], None).unwrap();
        let d = gower_matrix(&data, None).unwrap();
        assert_abs_diff_eq!(d.get(0, 1), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn gower_identical_rows_have_zero_distance() {
        let cont = DMatrix::from_row_slice(3, 1, &[1.0, 1.0, 2.0]);
        let data = MixedDataset::new(cont, vec![vec![0, 0, 1]], vec![2], None).unwrap();
        let d = gower_matrix(&data, None).unwrap();
        assert_abs_diff_eq!(d.get(0, 1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gower_all_categorical_is_weighted_mismatch_rate() {
        let data = MixedDataset::new(
            DMatrix::zeros(3, 0),
            vec![vec![0, 1, 0], vec![0, 0, 1], vec![2, 2, 0]],
            vec![2, 2, 3],
            None,
        )
        .unwrap();
        let d = gower_matrix(&data, None).unwrap();
        // Rows 0 and 1 differ only in the first column: 1/3.
        assert_abs_diff_eq!(d.get(0, 1), 1.0 / 3.0, epsilon = 1e-12);
        // Weighted: give that column weight 2 of total 4.
        let dw = gower_matrix(&data, Some(&[2.0, 1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(dw.get(0, 1), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn gower_rejects_bad_weights() {
        let data = mixed_toy();
        assert!(matches!(
            gower_matrix(&data, Some(&[1.0, 1.0, 0.0, 1.0])),
            Err(Error::NonpositiveWeight(2))
        ));
        assert!(matches!(
            gower_matrix(&data, Some(&[1.0])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn gower_rejects_constant_continuous_column() {
        let cont = DMatrix::from_row_slice(3, 1, &[2.0, 2.0, 2.0]);
        let data = MixedDataset::from_continuous(cont).unwrap();
        assert!(matches!(
            gower_matrix(&data, None),
            Err(Error::ConstantColumn(0))
        ));
    }

    #[test]
    fn scale_factor_for_balanced_binary_is_one() {
        // Solve 2 c^2 * 2 q (1 - q) = 1 at q = 1/2: c = 1.
        assert_abs_diff_eq!(hl_scale_factor(&[0.5, 0.5]), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn scale_factor_for_four_equiprobable_levels() {
        // sqrt(I / (2 (I - 1))) at I = 4.
        assert_abs_diff_eq!(
            hl_scale_factor(&[0.25; 4]),
            (4.0f64 / 6.0).sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn hl_reduces_to_euclidean_on_continuous_data() {
        let cont =
            DMatrix::from_row_slice(5, 2, &[0.0, 1.0, 1.0, 0.5, 2.0, 3.0, 3.0, 2.0, 4.0, 4.5]);
        let data = MixedDataset::from_continuous(cont).unwrap();
        let d = hl_scaled_matrix(&data).unwrap();
        let (std, _) = z_standardize(&data).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let mut s = 0.0;
                for c in 0..2 {
                    let diff = std.continuous()[(i, c)] - std.continuous()[(j, c)];
                    s += diff * diff;
                }
                assert_abs_diff_eq!(d.get(i, j), s.sqrt(), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn hl_categorical_mismatch_uses_block_scale() {
        // Balanced binary column alone: scale 1, mismatch distance
        // sqrt(2 * 1^2) = sqrt(2).
        let data =
            MixedDataset::new(DMatrix::zeros(4, 0), vec![vec![0, 0, 1, 1]], vec![2], None).unwrap();
        let d = hl_scaled_matrix(&data).unwrap();
        assert_abs_diff_eq!(d.get(0, 2), 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(d.get(0, 1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn hl_rejects_single_level_categorical() {
        let data =
            MixedDataset::new(DMatrix::zeros(3, 0), vec![vec![0, 0, 0]], vec![2], None).unwrap();
        assert!(matches!(
            hl_scaled_matrix(&data),
            Err(Error::ConstantColumn(0))
        ));
    }

    #[test]
    fn greedy_subset_matches_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let c = rng.random_range(2..=6);
            let draw = |rng: &mut ChaCha8Rng| {
                let mut v: Vec<f64> = (0..c).map(|_| rng.random::<f64>()).collect();
                let s: f64 = v.iter().sum();
                v.iter_mut().for_each(|x| *x /= s);
                v
            };
            let pa = draw(&mut rng);
            let pb = draw(&mut rng);
            assert_abs_diff_eq!(
                best_subset_delta(&pa, &pb),
                oracle::exhaustive_best_subset(&pa, &pb),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn perfectly_associated_columns_have_unit_delta() {
        // Column 1 determines column 0 exactly: conditional supports are
        // disjoint, so delta = 1 for the level pair.
        let data = MixedDataset::new(
            DMatrix::zeros(6, 0),
            vec![vec![0, 0, 0, 1, 1, 1], vec![0, 0, 0, 1, 1, 1]],
            vec![2, 2],
            None,
        )
        .unwrap();
        let model = ahmad_dey_model(&data, 4).unwrap();
        assert_abs_diff_eq!(model.cat_distance(0, 0, 1), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn independent_columns_have_zero_delta() {
        // Column 1 is balanced within each level of column 0.
        let data = MixedDataset::new(
            DMatrix::zeros(8, 0),
            vec![vec![0, 0, 0, 0, 1, 1, 1, 1], vec![0, 0, 1, 1, 0, 0, 1, 1]],
            vec![2, 2],
            None,
        )
        .unwrap();
        let model = ahmad_dey_model(&data, 4).unwrap();
        assert_abs_diff_eq!(model.cat_distance(0, 0, 1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_column_falls_back_to_indicator() {
        let data =
            MixedDataset::new(DMatrix::zeros(4, 0), vec![vec![0, 1, 0, 1]], vec![2], None).unwrap();
        let model = ahmad_dey_model(&data, 4).unwrap();
        let d = ahmad_dey_matrix(&data, &model).unwrap();
        let delta = model.cat_distance(0, 0, 1);
        assert_abs_diff_eq!(d.get(0, 1), delta * delta, epsilon = 1e-12);
        assert_abs_diff_eq!(d.get(0, 2), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn unobserved_level_gets_zero_distance_to_other_unobserved() {
        // Declare 3 levels but only observe two; distances touching the
        // unobserved level use uniform conditionals.
        let data = MixedDataset::new(
            DMatrix::zeros(6, 0),
            vec![vec![0, 0, 0, 1, 1, 1], vec![0, 1, 0, 1, 0, 1]],
            vec![3, 2],
            None,
        )
        .unwrap();
        let model = ahmad_dey_model(&data, 4).unwrap();
        // Level 2 of column 0 is unobserved; its conditionals are uniform,
        // and a finite distance to the observed levels still results.
        let d02 = model.cat_distance(0, 0, 2);
        assert!(d02.is_finite() && d02 >= 0.0);
    }

    #[test]
    fn model_schema_is_enforced() {
        let data = mixed_toy();
        let model = ahmad_dey_model(&data, 4).unwrap();
        let other = MixedDataset::new(
            DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
            vec![vec![0, 1]],
            vec![2],
            None,
        )
        .unwrap();
        assert!(matches!(
            ahmad_dey_matrix(&other, &model),
            Err(Error::SchemaMismatch(_))
        ));
    }

    #[test]
    fn mixed_matrix_combines_weighted_parts() {
        let data = mixed_toy();
        let model = ahmad_dey_model(&data, 2).unwrap();
        let d = ahmad_dey_matrix(&data, &model).unwrap();
        // Entry (0, 1) recomputed by hand from the model pieces.
        let (std, _) = z_standardize(&data).unwrap();
        let mut expect = 0.0;
        for c in 0..2 {
            let diff =
                model.continuous_weight(c) * (std.continuous()[(0, c)] - std.continuous()[(1, c)]);
            expect += diff * diff;
        }
        let d1 = model.cat_distance(1, 0, 1);
        expect += d1 * d1;
        assert_abs_diff_eq!(d.get(0, 1), expect, epsilon = 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        // Gower entries always stay inside [0, 1] and the matrix validates.
        #[test]
        fn gower_entries_bounded(
            seed in 0u64..1000,
            n in 3usize..12,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cont = DMatrix::from_fn(n, 2, |_, _| rng.random::<f64>() * 10.0 - 5.0);
            let cats: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let data = MixedDataset::new(cont, vec![cats], vec![3], None);
            prop_assume!(data.is_ok());
            let d = gower_matrix(&data.unwrap(), None);
            prop_assume!(d.is_ok());
            let d = d.unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert!(d.get(i, j) >= 0.0 && d.get(i, j) <= 1.0 + 1e-12);
                }
            }
            prop_assert!(DissimilarityMatrix::from_matrix(d.as_matrix().clone()).is_ok());
        }

        // The co-occurrence distance matrix is symmetric and nonnegative.
        #[test]
        fn mixed_matrix_validates(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 10;
            let cont = DMatrix::from_fn(n, 1, |_, _| rng.random::<f64>());
            let cats: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let data = MixedDataset::new(cont, vec![cats], vec![3], None).unwrap();
            let model = ahmad_dey_model(&data, 3);
            prop_assume!(model.is_ok());
            let d = ahmad_dey_matrix(&data, &model.unwrap()).unwrap();
            prop_assert!(DissimilarityMatrix::from_matrix(d.as_matrix().clone()).is_ok());
        }
    }
}
