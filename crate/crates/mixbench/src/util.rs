//! Small numeric helpers shared across modules.

/// One round of the splitmix64 output function.
pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives a child seed from a master seed and a list of coordinates.
///
/// Used everywhere a reproducible stream must be split (per restart, per
/// scenario, per replicate) so that tasks stay independent of execution order.
pub(crate) fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut acc = splitmix64(master);
    for &p in parts {
        acc = splitmix64(acc ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    }
    acc
}

/// Mean of a slice. Empty input returns 0.
pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (divisor `n - 1`). Fewer than two values give 0.
pub(crate) fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Linear-interpolation quantile on a sorted slice (R type 7).
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    assert!((0.0..=1.0).contains(&q));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

/// Table of ln(k!) for k in 0..=n.
pub(crate) fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for k in 1..=n {
        t[k] = t[k - 1] + (k as f64).ln();
    }
    t
}

/// ln Gamma(m / 2) for positive integer m, computed exactly from factorials.
///
/// Even m = 2k: Gamma(k) = (k-1)!. Odd m = 2k+1: Gamma(k + 1/2) =
/// (2k)! sqrt(pi) / (4^k k!).
pub(crate) fn ln_gamma_half(m: usize) -> f64 {
    assert!(m >= 1);
    if m.is_multiple_of(2) {
        let k = m / 2;
        ln_factorial(k.saturating_sub(1))
    } else {
        let k = m / 2;
        ln_factorial(2 * k) + 0.5 * std::f64::consts::PI.ln()
            - (k as f64) * 4f64.ln()
            - ln_factorial(k)
    }
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Pearson correlation of two equal-length slices; NaN when either is constant.
pub(crate) fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    if xs.is_empty() {
        return f64::NAN;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..xs.len() {
        let dx = xs[i] - mx;
        let dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let _ = n;
    if sxx <= 0.0 || syy <= 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quantiles_match_linear_interpolation() {
        let xs: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        assert_abs_diff_eq!(quantile_sorted(&xs, 0.25), 2.75, epsilon = 1e-12);
        assert_abs_diff_eq!(quantile_sorted(&xs, 0.5), 4.5, epsilon = 1e-12);
        assert_abs_diff_eq!(quantile_sorted(&xs, 0.75), 6.25, epsilon = 1e-12);
        assert_abs_diff_eq!(quantile_sorted(&xs, 0.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(quantile_sorted(&xs, 1.0), 8.0, epsilon = 1e-12);
    }

    #[test]
    fn half_integer_gamma_matches_known_values() {
        // Gamma(1/2) = sqrt(pi), Gamma(3/2) = sqrt(pi)/2, Gamma(3) = 2.
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert_abs_diff_eq!(ln_gamma_half(1), sqrt_pi.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(ln_gamma_half(3), (sqrt_pi / 2.0).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(ln_gamma_half(6), 2f64.ln(), epsilon = 1e-12);
        // Gamma(9/2) = 105 sqrt(pi) / 16.
        assert_abs_diff_eq!(
            ln_gamma_half(9),
            (105.0 * sqrt_pi / 16.0).ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn seed_derivation_is_order_sensitive() {
        let a = derive_seed(1, &[2, 3]);
        let b = derive_seed(1, &[3, 2]);
        assert_ne!(a, b);
        assert_eq!(a, derive_seed(1, &[2, 3]));
    }

    #[test]
    fn pearson_of_identical_vectors_is_one() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        assert_abs_diff_eq!(pearson(&xs, &xs), 1.0, epsilon = 1e-12);
    }
}
