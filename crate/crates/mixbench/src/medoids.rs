//! Partitioning around medoids on a precomputed dissimilarity matrix.
//!
//! [`pam`] runs the classic BUILD seeding followed by exhaustive SWAP
//! improvement, or repeats SWAP from random seedings. [`fast_kmedoids`]
//! alternates nearest-medoid assignment with in-cluster medoid updates,
//! which is much cheaper per iteration and relies on restarts for quality.
//! All tie-breaks resolve to the lowest index so runs are reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Partition;
use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::util::derive_seed;

/// Improvements smaller than this are treated as noise so SWAP cannot cycle.
const SWAP_EPS: f64 = 1e-12;

/// A medoid clustering: chosen observation indices, the induced nearest-
/// medoid partition, its total cost, and the cost after every accepted
/// improvement step of the winning start.
#[derive(Debug, Clone)]
pub struct MedoidState {
    /// Observation indices serving as cluster centers, one per cluster slot.
    pub medoids: Vec<usize>,
    /// Nearest-medoid assignment (ties to the lowest cluster slot).
    pub assign: Partition,
    /// Sum of dissimilarities from each observation to its medoid.
    pub cost: f64,
    /// Cost trace of the winning start, beginning at the initial seeding.
    pub cost_trace: Vec<f64>,
}

impl MedoidState {
    /// Recomputes the cost from scratch; used to assert bookkeeping stays
    /// within `1e-9` of the tracked value.
    pub fn recomputed_cost(&self, d: &DissimilarityMatrix) -> f64 {
        self.assign
            .labels()
            .iter()
            .enumerate()
            .map(|(i, &l)| d.get(i, self.medoids[l]))
            .sum()
    }
}

/// Seeding strategy for [`pam`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PamInit {
    /// Greedy BUILD seeding followed by one SWAP descent.
    Build,
    /// `starts` random distinct seedings, each followed by SWAP; the best
    /// final cost wins (ties to the lowest start index).
    RandomStarts { starts: usize, seed: u64 },
}

/// Partitioning around medoids.
///
/// # Errors
///
/// [`Error::KTooLarge`] when `k` is zero or exceeds the number of
/// observations.
pub fn pam(d: &DissimilarityMatrix, k: usize, init: PamInit) -> Result<MedoidState> {
    let n = d.n();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    match init {
        PamInit::Build => {
            let medoids = build_seeding(d, k);
            Ok(swap_descent(d, medoids))
        }
        PamInit::RandomStarts { starts, seed } => {
            let starts = starts.max(1);
            let mut best: Option<MedoidState> = None;
            for s in 0..starts {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[s as u64]));
                let medoids = rand::seq::index::sample(&mut rng, n, k).into_vec();
                let state = swap_descent(d, medoids);
                let better = match &best {
                    None => true,
                    Some(b) => state.cost < b.cost - SWAP_EPS,
                };
                if better {
                    best = Some(state);
                }
            }
            Ok(best.expect("at least one start"))
        }
    }
}

/// Greedy BUILD: first medoid minimizes the total dissimilarity; each later
/// medoid maximizes the resulting cost reduction.
fn build_seeding(d: &DissimilarityMatrix, k: usize) -> Vec<usize> {
    let n = d.n();
    let mut selected = Vec::with_capacity(k);
    let mut first = 0;
    let mut first_cost = f64::INFINITY;
    for j in 0..n {
        let total: f64 = (0..n).map(|i| d.get(i, j)).sum();
        if total < first_cost {
            first_cost = total;
            first = j;
        }
    }
    selected.push(first);
    let mut nearest: Vec<f64> = (0..n).map(|i| d.get(i, first)).collect();
    while selected.len() < k {
        let mut best_gain = f64::NEG_INFINITY;
        let mut best = usize::MAX;
        for o in 0..n {
            if selected.contains(&o) {
                continue;
            }
            let gain: f64 = (0..n).map(|i| (nearest[i] - d.get(i, o)).max(0.0)).sum();
            if gain > best_gain + SWAP_EPS {
                best_gain = gain;
                best = o;
            }
        }
        selected.push(best);
        for (i, near) in nearest.iter_mut().enumerate() {
            *near = near.min(d.get(i, best));
        }
    }
    selected
}

/// Nearest and second-nearest medoid bookkeeping for O(n) swap evaluation.
struct Neighbors {
    nearest_slot: Vec<usize>,
    nearest_d: Vec<f64>,
    second_d: Vec<f64>,
}

fn neighbors(d: &DissimilarityMatrix, medoids: &[usize]) -> Neighbors {
    let n = d.n();
    let mut nearest_slot = vec![0usize; n];
    let mut nearest_d = vec![f64::INFINITY; n];
    let mut second_d = vec![f64::INFINITY; n];
    for i in 0..n {
        for (slot, &m) in medoids.iter().enumerate() {
            let dist = d.get(i, m);
            if dist < nearest_d[i] {
                second_d[i] = nearest_d[i];
                nearest_d[i] = dist;
                nearest_slot[i] = slot;
            } else if dist < second_d[i] {
                second_d[i] = dist;
            }
        }
    }
    Neighbors {
        nearest_slot,
        nearest_d,
        second_d,
    }
}

/// Applies the best strictly improving swap until none remains.
fn swap_descent(d: &DissimilarityMatrix, mut medoids: Vec<usize>) -> MedoidState {
    let n = d.n();
    let k = medoids.len();
    let mut nb = neighbors(d, &medoids);
    let mut cost: f64 = nb.nearest_d.iter().sum();
    let mut trace = vec![cost];
    if k < n {
        loop {
            let mut best_delta = -SWAP_EPS;
            let mut best_swap: Option<(usize, usize)> = None;
            for slot in 0..k {
                for o in 0..n {
                    if medoids.contains(&o) {
                        continue;
                    }
                    let mut delta = 0.0;
                    for i in 0..n {
                        let d_io = d.get(i, o);
                        if nb.nearest_slot[i] == slot {
                            delta += d_io.min(nb.second_d[i]) - nb.nearest_d[i];
                        } else if d_io < nb.nearest_d[i] {
                            delta += d_io - nb.nearest_d[i];
                        }
                    }
                    if delta < best_delta {
                        best_delta = delta;
                        best_swap = Some((slot, o));
                    }
                }
            }
            match best_swap {
                Some((slot, o)) => {
                    medoids[slot] = o;
                    nb = neighbors(d, &medoids);
                    cost = nb.nearest_d.iter().sum();
                    trace.push(cost);
                }
                None => break,
            }
        }
    }
    let assign = Partition::new(nb.nearest_slot, k).expect("slots in range");
    MedoidState {
        medoids,
        assign,
        cost,
        cost_trace: trace,
    }
}

/// Alternating k-medoids: assign to the nearest medoid, then move each
/// medoid to the in-cluster cost minimizer, until the medoid set is stable.
/// Runs `starts` random initializations and keeps the cheapest result.
/// An emptied cluster is reseeded at the observation farthest from its
/// current medoid.
///
/// # Errors
///
/// [`Error::KTooLarge`] when `k` is zero or exceeds the number of
/// observations.
pub fn fast_kmedoids(
    d: &DissimilarityMatrix,
    k: usize,
    starts: usize,
    seed: u64,
) -> Result<MedoidState> {
    let n = d.n();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    let starts = starts.max(1);
    let max_iter = 100;
    let mut best: Option<MedoidState> = None;
    for s in 0..starts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[s as u64]));
        let mut medoids = rand::seq::index::sample(&mut rng, n, k).into_vec();
        let mut trace = Vec::new();
        let mut assign = vec![0usize; n];
        for _ in 0..max_iter {
            assign_nearest(d, &medoids, &mut assign);
            repair_empty(d, &mut medoids, &mut assign, k);
            let mut next = medoids.clone();
            for (slot, chosen) in next.iter_mut().enumerate() {
                let members: Vec<usize> = (0..n).filter(|&i| assign[i] == slot).collect();
                let mut best_j = *chosen;
                let mut best_cost = f64::INFINITY;
                for &j in &members {
                    let c: f64 = members.iter().map(|&i| d.get(i, j)).sum();
                    if c < best_cost - SWAP_EPS {
                        best_cost = c;
                        best_j = j;
                    }
                }
                *chosen = best_j;
            }
            let cost: f64 = (0..n).map(|i| d.get(i, medoids[assign[i]])).sum();
            trace.push(cost);
            if next == medoids {
                break;
            }
            medoids = next;
        }
        assign_nearest(d, &medoids, &mut assign);
        let cost: f64 = (0..n).map(|i| d.get(i, medoids[assign[i]])).sum();
        trace.push(cost);
        let state = MedoidState {
            medoids,
            assign: Partition::new(assign.clone(), k).expect("slots in range"),
            cost,
            cost_trace: trace,
        };
        let better = match &best {
            None => true,
            Some(b) => state.cost < b.cost - SWAP_EPS,
        };
        if better {
            best = Some(state);
        }
    }
    Ok(best.expect("at least one start"))
}

fn assign_nearest(d: &DissimilarityMatrix, medoids: &[usize], assign: &mut [usize]) {
    for (i, a) in assign.iter_mut().enumerate() {
        let mut best_slot = 0;
        let mut best_d = f64::INFINITY;
        for (slot, &m) in medoids.iter().enumerate() {
            let dist = d.get(i, m);
            if dist < best_d {
                best_d = dist;
                best_slot = slot;
            }
        }
        *a = best_slot;
    }
}

/// Moves the observation farthest from its medoid into each empty slot.
fn repair_empty(d: &DissimilarityMatrix, medoids: &mut [usize], assign: &mut [usize], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        for &a in assign.iter() {
            counts[a] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut far_i = usize::MAX;
        let mut far_d = f64::NEG_INFINITY;
        for i in 0..assign.len() {
            if medoids.contains(&i) || counts[assign[i]] <= 1 {
                continue;
            }
            let dist = d.get(i, medoids[assign[i]]);
            if dist > far_d {
                far_d = dist;
                far_i = i;
            }
        }
        if far_i == usize::MAX {
            return;
        }
        medoids[empty] = far_i;
        assign[far_i] = empty;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::oracle;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_metricish(n: usize, seed: u64) -> DissimilarityMatrix {
        // Distances between random points on a line: a genuine metric.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 10.0).collect();
        DissimilarityMatrix::from_matrix(DMatrix::from_fn(n, n, |i, j| (xs[i] - xs[j]).abs()))
            .unwrap()
    }

    fn two_blocks() -> DissimilarityMatrix {
        // Observations 0-2 and 3-4 form tight blocks far apart.
        let xs: [f64; 5] = [0.0, 0.1, 0.2, 10.0, 10.1];
        DissimilarityMatrix::from_matrix(DMatrix::from_fn(5, 5, |i, j| (xs[i] - xs[j]).abs()))
            .unwrap()
    }

    #[test]
    fn two_blocks_find_their_medoids() {
        let d = two_blocks();
        let state = pam(&d, 2, PamInit::Build).unwrap();
        let (oracle_medoids, oracle_cost) = oracle::exhaustive_medoid_search(d.as_matrix(), 2);
        let mut got = state.medoids.clone();
        got.sort_unstable();
        assert_eq!(got, oracle_medoids);
        assert_abs_diff_eq!(state.cost, oracle_cost, epsilon = 1e-12);
        // The assignment splits exactly into the two blocks.
        let labels = state.assign.labels();
        assert_eq!(labels[0], labels[1]);
        assert_eq!(labels[1], labels[2]);
        assert_eq!(labels[3], labels[4]);
        assert_ne!(labels[0], labels[3]);
    }

    #[test]
    fn k_equals_one_picks_row_sum_minimizer() {
        let d = random_metricish(9, 3);
        let state = pam(&d, 1, PamInit::Build).unwrap();
        let mut best = 0;
        let mut best_sum = f64::INFINITY;
        for j in 0..9 {
            let s: f64 = (0..9).map(|i| d.get(i, j)).sum();
            if s < best_sum {
                best_sum = s;
                best = j;
            }
        }
        assert_eq!(state.medoids, vec![best]);
        assert_abs_diff_eq!(state.cost, best_sum, epsilon = 1e-12);
    }

    #[test]
    fn k_equals_n_is_free() {
        let d = random_metricish(6, 4);
        let state = pam(&d, 6, PamInit::Build).unwrap();
        assert_abs_diff_eq!(state.cost, 0.0, epsilon = 1e-12);
        let mut m = state.medoids.clone();
        m.sort_unstable();
        assert_eq!(m, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn k_too_large_is_rejected() {
        let d = random_metricish(4, 5);
        assert!(matches!(
            pam(&d, 5, PamInit::Build),
            Err(Error::KTooLarge { k: 5, n: 4 })
        ));
        assert!(matches!(
            fast_kmedoids(&d, 0, 1, 0),
            Err(Error::KTooLarge { .. })
        ));
    }

    #[test]
    fn pam_is_near_exhaustive_on_small_instances() {
        // SWAP is a local search; require it within 5% of the global optimum.
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let n = rng.random_range(6..=10);
            let k = rng.random_range(2..=3);
            let d = random_metricish(n, seed * 7 + 1);
            let state = pam(&d, k, PamInit::Build).unwrap();
            let (_, best_cost) = oracle::exhaustive_medoid_search(d.as_matrix(), k);
            assert!(
                state.cost <= best_cost * 1.05 + 1e-9,
                "seed {seed}: pam {} vs optimal {}",
                state.cost,
                best_cost
            );
        }
    }

    #[test]
    fn swap_trace_is_strictly_decreasing() {
        for seed in 0..20u64 {
            let d = random_metricish(20, 100 + seed);
            let state = pam(&d, 3, PamInit::RandomStarts { starts: 1, seed }).unwrap();
            for w in state.cost_trace.windows(2) {
                assert!(
                    w[1] < w[0] + 1e-9,
                    "trace not decreasing: {:?}",
                    state.cost_trace
                );
            }
        }
    }

    #[test]
    fn tracked_cost_matches_recomputation() {
        let d = random_metricish(25, 42);
        for init in [PamInit::Build, PamInit::RandomStarts { starts: 5, seed: 9 }] {
            let state = pam(&d, 4, init).unwrap();
            assert_abs_diff_eq!(state.cost, state.recomputed_cost(&d), epsilon = 1e-9);
        }
        let state = fast_kmedoids(&d, 4, 5, 9).unwrap();
        assert_abs_diff_eq!(state.cost, state.recomputed_cost(&d), epsilon = 1e-9);
    }

    #[test]
    fn random_starts_reproduce_bitwise() {
        let d = random_metricish(30, 77);
        let init = PamInit::RandomStarts { starts: 8, seed: 5 };
        let a = pam(&d, 3, init).unwrap();
        let b = pam(&d, 3, init).unwrap();
        assert_eq!(a.medoids, b.medoids);
        assert_eq!(a.assign.labels(), b.assign.labels());
        assert_eq!(a.cost.to_bits(), b.cost.to_bits());
    }

    #[test]
    fn fast_kmedoids_recovers_blocks() {
        let d = two_blocks();
        let state = fast_kmedoids(&d, 2, 5, 11).unwrap();
        let labels = state.assign.labels();
        assert_eq!(labels[0], labels[1]);
        assert_eq!(labels[1], labels[2]);
        assert_eq!(labels[3], labels[4]);
        assert_ne!(labels[0], labels[3]);
    }

    #[test]
    fn fast_kmedoids_trace_is_non_increasing() {
        for seed in 0..20u64 {
            let d = random_metricish(30, 500 + seed);
            let state = fast_kmedoids(&d, 4, 1, seed).unwrap();
            for w in state.cost_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9);
            }
        }
    }

    #[test]
    fn duplicated_observations_stay_together() {
        // Duplicate points have zero distance; they must share a cluster
        // whenever k < number of distinct sites.
        let xs: [f64; 6] = [0.0, 0.0, 0.0, 5.0, 5.0, 9.0];
        let d =
            DissimilarityMatrix::from_matrix(DMatrix::from_fn(6, 6, |i, j| (xs[i] - xs[j]).abs()))
                .unwrap();
        let state = pam(&d, 3, PamInit::Build).unwrap();
        let l = state.assign.labels();
        assert_eq!(l[0], l[1]);
        assert_eq!(l[1], l[2]);
        assert_eq!(l[3], l[4]);
    }
}
