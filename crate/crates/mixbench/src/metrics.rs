//! External cluster-recovery indices: adjusted Rand and adjusted mutual
//! information.
//!
//! Both indices are chance-corrected: random independent partitions score
//! near zero, identical partitions score 1, and cluster labels carry no
//! meaning (any relabeling leaves the value unchanged).

use crate::data::Partition;
use crate::error::{Error, Result};
use crate::util::ln_factorial_table;

/// Cross-tabulation of two partitions over the same observations.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    counts: Vec<Vec<usize>>,
    row_sums: Vec<usize>,
    col_sums: Vec<usize>,
    n: usize,
}

impl ContingencyTable {
    /// Tabulates `u` against `v`.
    ///
    /// # Errors
    ///
    /// [`Error::LengthMismatch`] when the partitions cover different numbers
    /// of observations.
    pub fn new(u: &Partition, v: &Partition) -> Result<Self> {
        if u.n() != v.n() {
            return Err(Error::LengthMismatch {
                expected: u.n(),
                actual: v.n(),
            });
        }
        let mut counts = vec![vec![0usize; v.k()]; u.k()];
        for (&a, &b) in u.labels().iter().zip(v.labels()) {
            counts[a][b] += 1;
        }
        let row_sums: Vec<usize> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<usize> = (0..v.k())
            .map(|j| counts.iter().map(|r| r[j]).sum())
            .collect();
        Ok(Self {
            counts,
            row_sums,
            col_sums,
            n: u.n(),
        })
    }

    /// Cell count for row cluster `i`, column cluster `j`.
    pub fn count(&self, i: usize, j: usize) -> usize {
        self.counts[i][j]
    }

    /// Row marginals (sizes of `u`'s clusters).
    pub fn row_sums(&self) -> &[usize] {
        &self.row_sums
    }

    /// Column marginals (sizes of `v`'s clusters).
    pub fn col_sums(&self) -> &[usize] {
        &self.col_sums
    }

    /// Total number of observations.
    pub fn n(&self) -> usize {
        self.n
    }

    fn occupied_rows(&self) -> usize {
        self.row_sums.iter().filter(|&&s| s > 0).count()
    }

    fn occupied_cols(&self) -> usize {
        self.col_sums.iter().filter(|&&s| s > 0).count()
    }
}

fn comb2(x: usize) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Adjusted Rand index of two partitions.
///
/// Computed from the contingency table as
/// `(Index - ExpectedIndex) / (MaxIndex - ExpectedIndex)` over pair counts.
/// Degenerate agreement (both partitions all-singletons or both a single
/// cluster) makes the denominator vanish; those partitions are identical, so
/// the index is 1 by convention.
///
/// # Errors
///
/// [`Error::LengthMismatch`] when the partitions differ in length.
pub fn adjusted_rand_index(u: &Partition, v: &Partition) -> Result<f64> {
    let table = ContingencyTable::new(u, v)?;
    let index: f64 = table
        .counts
        .iter()
        .flat_map(|row| row.iter().map(|&c| comb2(c)))
        .sum();
    let sum_a: f64 = table.row_sums.iter().map(|&a| comb2(a)).sum();
    let sum_b: f64 = table.col_sums.iter().map(|&b| comb2(b)).sum();
    let total = comb2(table.n);
    if total == 0.0 {
        // A single observation: both partitions are trivially identical.
        return Ok(1.0);
    }
    let expected = sum_a * sum_b / total;
    let max_index = 0.5 * (sum_a + sum_b);
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((index - expected) / denom)
}

/// Normalizer for the adjusted mutual information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmiNormalizer {
    /// `max(H(U), H(V))` (the default).
    #[default]
    Max,
    /// `sqrt(H(U) * H(V))`.
    Sqrt,
}

/// Adjusted mutual information with the default `max` normalizer.
///
/// # Errors
///
/// [`Error::LengthMismatch`] when the partitions differ in length.
pub fn adjusted_mutual_information(u: &Partition, v: &Partition) -> Result<f64> {
    adjusted_mutual_information_with(u, v, AmiNormalizer::Max)
}

/// Adjusted mutual information `(MI - E[MI]) / (normalizer - E[MI])` with the
/// expectation taken exactly over the permutation model.
///
/// All logarithms are natural. When both partitions consist of a single
/// cluster the value is 1 by convention (they are identical); when exactly
/// one partition is trivial the value is 0.
///
/// # Errors
///
/// [`Error::LengthMismatch`] when the partitions differ in length.
pub fn adjusted_mutual_information_with(
    u: &Partition,
    v: &Partition,
    normalizer: AmiNormalizer,
) -> Result<f64> {
    let table = ContingencyTable::new(u, v)?;
    if table.occupied_rows() <= 1 && table.occupied_cols() <= 1 {
        return Ok(1.0);
    }
    let n = table.n as f64;
    let h_u = entropy(&table.row_sums, n);
    let h_v = entropy(&table.col_sums, n);
    let mi = mutual_information(&table);
    let emi = expected_mutual_information(&table);
    let norm = match normalizer {
        AmiNormalizer::Max => h_u.max(h_v),
        AmiNormalizer::Sqrt => (h_u * h_v).sqrt(),
    };
    let denom = norm - emi;
    if denom.abs() < f64::EPSILON {
        return Ok(0.0);
    }
    Ok((mi - emi) / denom)
}

fn entropy(sums: &[usize], n: f64) -> f64 {
    sums.iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn mutual_information(table: &ContingencyTable) -> f64 {
    let n = table.n as f64;
    let mut mi = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let p = c as f64 / n;
            let a = table.row_sums[i] as f64 / n;
            let b = table.col_sums[j] as f64 / n;
            mi += p * (p / (a * b)).ln();
        }
    }
    mi
}

/// Exact expectation of the mutual information under the permutation model:
/// a sum of hypergeometric terms per marginal pair, accumulated through
/// log-factorials so the factorials never overflow.
fn expected_mutual_information(table: &ContingencyTable) -> f64 {
    let n = table.n;
    let nf = n as f64;
    let lf = ln_factorial_table(n);
    let mut emi = 0.0;
    for &a in &table.row_sums {
        if a == 0 {
            continue;
        }
        for &b in &table.col_sums {
            if b == 0 {
                continue;
            }
            let lo = 1.max((a + b).saturating_sub(n));
            let hi = a.min(b);
            for nij in lo..=hi {
                let log_w = lf[a] + lf[b] + lf[n - a] + lf[n - b]
                    - lf[n]
                    - lf[nij]
                    - lf[a - nij]
                    - lf[b - nij]
                    - lf[(n + nij) - a - b];
                let term = (nij as f64 / nf) * ((nf * nij as f64) / (a as f64 * b as f64)).ln();
                emi += log_w.exp() * term;
            }
        }
    }
    emi
}
