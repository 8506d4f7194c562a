//! Core containers for mixed continuous/categorical data and partitions.
//!
//! A [`MixedDataset`] stores the continuous block as an `n x p_r` matrix and
//! each categorical column as dense level codes `0..c_j`. All containers are
//! immutable after construction; transformations return new values.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::util;

/// A dataset with `p_r` continuous and `p_c` categorical columns.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedDataset {
    n: usize,
    continuous: DMatrix<f64>,
    categorical: Vec<Vec<usize>>,
    levels: Vec<usize>,
    truth: Option<Vec<usize>>,
}

impl MixedDataset {
    /// Builds a dataset and validates its invariants: consistent column
    /// lengths, finite continuous entries, categorical codes inside their
    /// declared level counts, and at least one column overall.
    pub fn new(
        continuous: DMatrix<f64>,
        categorical: Vec<Vec<usize>>,
        levels: Vec<usize>,
        truth: Option<Vec<usize>>,
    ) -> Result<Self> {
        if categorical.len() != levels.len() {
            return Err(Error::LengthMismatch {
                expected: categorical.len(),
                actual: levels.len(),
            });
        }
        let n = if continuous.ncols() > 0 || continuous.nrows() > 0 {
            continuous.nrows()
        } else {
            categorical.first().map_or(0, Vec::len)
        };
        if n == 0 || (continuous.ncols() == 0 && categorical.is_empty()) {
            return Err(Error::ConfigInvalid(
                "dataset needs at least one observation and one column".into(),
            ));
        }
        if continuous.ncols() > 0 && continuous.nrows() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: continuous.nrows(),
            });
        }
        if continuous.iter().any(|x| !x.is_finite()) {
            return Err(Error::ConfigInvalid(
                "continuous entries must be finite (no missing values)".into(),
            ));
        }
        for (j, col) in categorical.iter().enumerate() {
            if col.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: col.len(),
                });
            }
            if levels[j] == 0 {
                return Err(Error::ConfigInvalid(format!(
                    "categorical column {j} declares zero levels"
                )));
            }
            if let Some(&bad) = col.iter().find(|&&v| v >= levels[j]) {
                return Err(Error::ConfigInvalid(format!(
                    "categorical column {j} holds code {bad} but declares {} levels",
                    levels[j]
                )));
            }
        }
        if let Some(t) = &truth {
            if t.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: t.len(),
                });
            }
        }
        Ok(Self {
            n,
            continuous,
            categorical,
            levels,
            truth,
        })
    }

    /// Builds a purely continuous dataset.
    pub fn from_continuous(continuous: DMatrix<f64>) -> Result<Self> {
        Self::new(continuous, Vec::new(), Vec::new(), None)
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of continuous columns.
    pub fn p_r(&self) -> usize {
        self.continuous.ncols()
    }

    /// Number of categorical columns.
    pub fn p_c(&self) -> usize {
        self.categorical.len()
    }

    /// Total number of columns.
    pub fn p(&self) -> usize {
        self.p_r() + self.p_c()
    }

    /// The continuous block, `n x p_r`.
    pub fn continuous(&self) -> &DMatrix<f64> {
        &self.continuous
    }

    /// Level codes of categorical column `j`.
    pub fn cat_column(&self, j: usize) -> &[usize] {
        &self.categorical[j]
    }

    /// Declared level counts per categorical column.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Ground-truth component labels, when the dataset was generated.
    pub fn truth(&self) -> Option<&[usize]> {
        self.truth.as_deref()
    }

    /// Returns a copy with the given truth labels attached.
    pub fn with_truth(&self, truth: Vec<usize>) -> Result<Self> {
        Self::new(
            self.continuous.clone(),
            self.categorical.clone(),
            self.levels.clone(),
            Some(truth),
        )
    }

    /// Observed level proportions of categorical column `j` (length `c_j`).
    pub fn level_proportions(&self, j: usize) -> Vec<f64> {
        let col = &self.categorical[j];
        let mut counts = vec![0usize; self.levels[j]];
        for &v in col {
            counts[v] += 1;
        }
        counts
            .into_iter()
            .map(|c| c as f64 / col.len() as f64)
            .collect()
    }
}

/// A hard assignment of `n` observations to `k` clusters.
///
/// Empty clusters are representable (a degenerate but queryable state);
/// algorithms either repair them or surface the condition to the caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assign: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Validates that every label is below `k`.
    pub fn new(assign: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::KTooLarge { k, n: assign.len() });
        }
        if let Some(&bad) = assign.iter().find(|&&a| a >= k) {
            return Err(Error::ConfigInvalid(format!(
                "label {bad} out of range for {k} clusters"
            )));
        }
        Ok(Self { assign, k })
    }

    /// Builds a partition from arbitrary labels by densely re-coding them in
    /// order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map: Vec<usize> = Vec::new();
        let mut assign = Vec::with_capacity(labels.len());
        for &l in labels {
            match map.iter().position(|&m| m == l) {
                Some(idx) => assign.push(idx),
                None => {
                    map.push(l);
                    assign.push(map.len() - 1);
                }
            }
        }
        let k = map.len().max(1);
        Self { assign, k }
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.assign.len()
    }

    /// Number of cluster slots (some may be empty).
    pub fn k(&self) -> usize {
        self.k
    }

    /// The label vector.
    pub fn labels(&self) -> &[usize] {
        &self.assign
    }

    /// Cluster sizes by slot.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0usize; self.k];
        for &a in &self.assign {
            c[a] += 1;
        }
        c
    }

    /// True when at least one cluster slot has no members.
    pub fn has_empty_cluster(&self) -> bool {
        self.counts().contains(&0)
    }
}

/// Column statistics captured when standardizing a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizationParams {
    /// Per-continuous-column mean.
    pub means: Vec<f64>,
    /// Per-continuous-column sample standard deviation (divisor `n - 1`).
    pub sds: Vec<f64>,
    /// Per-continuous-column minimum.
    pub mins: Vec<f64>,
    /// Per-continuous-column maximum.
    pub maxs: Vec<f64>,
    /// Observed level proportions per categorical column.
    pub proportions: Vec<Vec<f64>>,
}

/// Centers and scales every continuous column to sample mean 0 and sample
/// variance 1 (unbiased, divisor `n - 1`). Categorical columns pass through.
///
/// # Errors
///
/// [`Error::ConstantColumn`] when any continuous column has zero variance.
pub fn z_standardize(data: &MixedDataset) -> Result<(MixedDataset, StandardizationParams)> {
    let n = data.n();
    let p_r = data.p_r();
    let mut means = Vec::with_capacity(p_r);
    let mut sds = Vec::with_capacity(p_r);
    let mut mins = Vec::with_capacity(p_r);
    let mut maxs = Vec::with_capacity(p_r);
    let mut out = data.continuous().clone();
    for j in 0..p_r {
        let col: Vec<f64> = (0..n).map(|i| data.continuous()[(i, j)]).collect();
        let m = util::mean(&col);
        let var = util::sample_variance(&col);
        if var <= 0.0 {
            return Err(Error::ConstantColumn(j));
        }
        let sd = var.sqrt();
        for i in 0..n {
            out[(i, j)] = (col[i] - m) / sd;
        }
        means.push(m);
        sds.push(sd);
        mins.push(col.iter().cloned().fold(f64::INFINITY, f64::min));
        maxs.push(col.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    }
    let proportions = (0..data.p_c()).map(|j| data.level_proportions(j)).collect();
    let standardized = MixedDataset::new(
        out,
        data.categorical.clone(),
        data.levels.clone(),
        data.truth.clone(),
    )?;
    Ok((
        standardized,
        StandardizationParams {
            means,
            sds,
            mins,
            maxs,
            proportions,
        },
    ))
}

/// Layout of a dummy-coded matrix: continuous columns first, then one block
/// of `c_j` indicator columns per categorical column.
#[derive(Debug, Clone, PartialEq)]
pub struct DummyCoding {
    /// `(start, width)` of each categorical block inside the coded matrix.
    pub blocks: Vec<(usize, usize)>,
    /// Total width `p_r + sum(c_j)`.
    pub p_star: usize,
    /// Scale factor applied to each block (1 when `scales` was `None`).
    pub scales: Vec<f64>,
}

/// Expands categorical columns into 0/1 indicator blocks, optionally scaling
/// each block by a per-column factor. Continuous columns are copied verbatim.
///
/// # Errors
///
/// [`Error::LengthMismatch`] when `scales` is provided with the wrong length.
pub fn dummy_code(
    data: &MixedDataset,
    scales: Option<&[f64]>,
) -> Result<(DMatrix<f64>, DummyCoding)> {
    let p_c = data.p_c();
    if let Some(s) = scales {
        if s.len() != p_c {
            return Err(Error::LengthMismatch {
                expected: p_c,
                actual: s.len(),
            });
        }
    }
    let scales: Vec<f64> = match scales {
        Some(s) => s.to_vec(),
        None => vec![1.0; p_c],
    };
    let n = data.n();
    let p_r = data.p_r();
    let p_star = p_r + data.levels().iter().sum::<usize>();
    let mut coded = DMatrix::zeros(n, p_star);
    for j in 0..p_r {
        for i in 0..n {
            coded[(i, j)] = data.continuous()[(i, j)];
        }
    }
    let mut blocks = Vec::with_capacity(p_c);
    let mut start = p_r;
    for (j, &scale) in scales.iter().enumerate() {
        let width = data.levels()[j];
        for (i, &code) in data.cat_column(j).iter().enumerate() {
            coded[(i, start + code)] = scale;
        }
        blocks.push((start, width));
        start += width;
    }
    Ok((
        coded,
        DummyCoding {
            blocks,
            p_star,
            scales,
        },
    ))
}

/// Variance of a categorical column under the frequency estimate:
/// `1 - sum_h p_h^2`, where `p_h` are observed level proportions.
///
/// The value lies in `[0, 1 - 1/c]` and is maximal for equiprobable levels.
pub fn categorical_variance(column: &[usize], c: usize) -> f64 {
    assert!(!column.is_empty(), "categorical variance of empty column");
    assert!(c >= 1);
    let mut counts = vec![0usize; c];
    for &v in column {
        assert!(v < c, "level code out of range");
        counts[v] += 1;
    }
    let n = column.len() as f64;
    1.0 - counts
        .iter()
        .map(|&k| {
            let p = k as f64 / n;
            p * p
        })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn toy() -> MixedDataset {
        let cont = DMatrix::from_row_slice(4, 2, &[1.0, 10.0, 2.0, 20.0, 3.0, 30.0, 4.0, 40.0]);
        MixedDataset::new(cont, vec![vec![0, 1, 0, 1]], vec![2], None).unwrap()
    }

    #[test]
    fn standardizes_known_column() {
        // Column (1, 2, 3) has mean 2 and unbiased sd 1, so it maps to (-1, 0, 1).
        let cont = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let data = MixedDataset::from_continuous(cont).unwrap();
        let (std, params) = z_standardize(&data).unwrap();
        let got: Vec<f64> = (0..3).map(|i| std.continuous()[(i, 0)]).collect();
        assert_abs_diff_eq!(got[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(got[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(got[2], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(params.means[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(params.sds[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(params.mins[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(params.maxs[0], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn standardization_is_idempotent() {
        let (once, _) = z_standardize(&toy()).unwrap();
        let (twice, _) = z_standardize(&once).unwrap();
        for i in 0..once.n() {
            for j in 0..once.p_r() {
                assert_abs_diff_eq!(
                    once.continuous()[(i, j)],
                    twice.continuous()[(i, j)],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn constant_column_is_rejected() {
        let cont = DMatrix::from_column_slice(3, 1, &[5.0, 5.0, 5.0]);
        let data = MixedDataset::from_continuous(cont).unwrap();
        assert!(matches!(
            z_standardize(&data),
            Err(Error::ConstantColumn(0))
        ));
    }

    #[test]
    fn single_observation_cannot_standardize() {
        let cont = DMatrix::from_column_slice(1, 1, &[5.0]);
        let data = MixedDataset::from_continuous(cont).unwrap();
        assert!(matches!(
            z_standardize(&data),
            Err(Error::ConstantColumn(0))
        ));
    }

    #[test]
    fn dummy_rows_are_one_hot() {
        let (coded, coding) = dummy_code(&toy(), None).unwrap();
        assert_eq!(coding.p_star, 2 + 2);
        assert_eq!(coding.blocks, vec![(2, 2)]);
        for i in 0..4 {
            let s: f64 = (2..4).map(|j| coded[(i, j)]).sum();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dummy_scaling_applies_per_block() {
        let (coded, coding) = dummy_code(&toy(), Some(&[2.0])).unwrap();
        assert_eq!(coding.scales, vec![2.0]);
        for i in 0..4 {
            let s: f64 = (2..4).map(|j| coded[(i, j)]).sum();
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn uniform_four_level_variance() {
        // Four equiprobable levels: 1 - 4 * (1/4)^2 = 0.75.
        let col = vec![0, 1, 2, 3, 0, 1, 2, 3];
        assert_abs_diff_eq!(categorical_variance(&col, 4), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_single_level_has_zero_variance() {
        let col = vec![0, 0, 0, 0];
        assert_abs_diff_eq!(categorical_variance(&col, 1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn partition_rejects_out_of_range_labels() {
        assert!(Partition::new(vec![0, 1, 2], 2).is_err());
        let p = Partition::new(vec![0, 1, 0], 3).unwrap();
        assert!(p.has_empty_cluster());
        assert_eq!(p.counts(), vec![2, 1, 0]);
    }

    #[test]
    fn from_labels_recode_is_dense() {
        let p = Partition::from_labels(&[7, 7, 3, 9]);
        assert_eq!(p.labels(), &[0, 0, 1, 2]);
        assert_eq!(p.k(), 3);
    }

    proptest! {
        // Variance of a categorical column never exceeds the equiprobable bound.
        #[test]
        fn categorical_variance_is_bounded(codes in prop::collection::vec(0usize..4, 1..60)) {
            let v = categorical_variance(&codes, 4);
            prop_assert!(v >= -1e-12);
            prop_assert!(v <= 0.75 + 1e-12);
        }

        // Dummy rows always sum to the number of categorical columns.
        #[test]
        fn dummy_row_sums_equal_block_count(
            a in prop::collection::vec(0usize..3, 5),
            b in prop::collection::vec(0usize..2, 5),
        ) {
            let cont = DMatrix::zeros(5, 0);
            let data = MixedDataset::new(cont, vec![a, b], vec![3, 2], None).unwrap();
            let (coded, _) = dummy_code(&data, None).unwrap();
            for i in 0..5 {
                let s: f64 = (0..coded.ncols()).map(|j| coded[(i, j)]).sum();
                prop_assert!((s - 2.0).abs() < 1e-12);
            }
        }
    }
}
