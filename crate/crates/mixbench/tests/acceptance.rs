//! Acceptance gate: one test per claim the toolkit must uphold, each
//! printing a single `criterion N ...: PASS/FAIL` line (visible under
//! `--nocapture`) before asserting.
//!
//! The first two criteria share one benchmark run of the desk preset, so
//! the first of them to execute pays its cost.

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mixbench::bench::{read_records, run_benchmark, BenchConfig, BenchmarkRecord, Method};
use mixbench::data::{MixedDataset, Partition};
use mixbench::dissimilarity::{best_subset_delta, gower_matrix, DissimilarityMatrix};
use mixbench::factor::{famd_project, mixed_rkm, RkmOptions};
use mixbench::medoids::{pam, PamInit};
use mixbench::metrics::{adjusted_mutual_information, adjusted_rand_index};
use mixbench::proto::{k_prototypes, kmeans, modha_spangler, IterOptions};
use mixbench::simgen::{
    calibrate_mixture, mean_overlap, pairwise_overlap_mc, Density, ScenarioConfig, Sphericity,
};
use mixbench::validate::oracle;

// Pinned tolerances and thresholds.
const DESK_RUNTIME_LIMIT: Duration = Duration::from_secs(30 * 60);
const KAMILA_FLOOR_AT_TIGHTEST_OVERLAP: f64 = 0.55;
const GROUP_GAP: f64 = 0.10;
const SPHERICITY_GAP: f64 = 0.03;
const CALIBRATION_REL_TOL: f64 = 0.05;
const UNIVARIATE_ORACLE_TOL: f64 = 0.01;
const EXACT_TOL: f64 = 1e-12;
const PAM_EXCESS_TOL: f64 = 0.05;
const FAMD_PCA_TOL: f64 = 1e-8;
const MONOTONE_TOL: f64 = 1e-9;
const AMI_NULL_BAND: f64 = 0.1;

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "{criterion}: {} — {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "{criterion} failed: {detail}");
}

struct DeskRun {
    records: Vec<BenchmarkRecord>,
    wall: Duration,
}

fn desk_run() -> &'static DeskRun {
    static RUN: OnceLock<DeskRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let dir = tempfile::tempdir().expect("tempdir");
        let out = dir.path().join("desk.csv");
        let config = BenchConfig::desk_preset();
        let start = Instant::now();
        let rep = run_benchmark(&config, &out, None).expect("desk preset runs");
        let wall = start.elapsed();
        assert_eq!(rep.failed, 0, "desk preset must produce no error rows");
        DeskRun {
            records: read_records(&out).expect("results parse"),
            wall,
        }
    })
}

fn method_mean_at(records: &[BenchmarkRecord], method: &str, overlap: f64) -> f64 {
    let vals: Vec<f64> = records
        .iter()
        .filter(|r| r.method == method && (r.overlap - overlap).abs() < 1e-12)
        .map(|r| r.ari)
        .collect();
    assert!(
        !vals.is_empty(),
        "no rows for {method} at overlap {overlap}"
    );
    vals.iter().sum::<f64>() / vals.len() as f64
}

#[test]
fn criterion_1_mean_ari_strictly_decreases_in_overlap() {
    let run = desk_run();
    let overlaps = [0.01, 0.05, 0.10, 0.15, 0.20];
    let mut violations = Vec::new();
    for method in Method::ALL {
        let means: Vec<f64> = overlaps
            .iter()
            .map(|&o| method_mean_at(&run.records, method.name(), o))
            .collect();
        for w in 0..overlaps.len() - 1 {
            // A NaN mean must register as a violation, so test the strict
            // decrease itself and negate.
            let strictly_decreasing = means[w + 1] < means[w];
            if !strictly_decreasing {
                violations.push(format!(
                    "{} not decreasing between overlap {} ({:.4}) and {} ({:.4})",
                    method.name(),
                    overlaps[w],
                    means[w],
                    overlaps[w + 1],
                    means[w + 1]
                ));
            }
        }
    }
    let kamila_at_tightest = method_mean_at(&run.records, "kamila", 0.01);
    let runtime_ok = run.wall <= DESK_RUNTIME_LIMIT;
    let passed = violations.is_empty()
        && kamila_at_tightest >= KAMILA_FLOOR_AT_TIGHTEST_OVERLAP
        && runtime_ok;
    report(
        "criterion 1 (ordinal overlap effect)",
        passed,
        &format!(
            "monotone violations: [{}]; kamila mean ARI at 0.01 = {:.4} (floor {}); \
             runtime {:.0}s (limit {}s)",
            violations.join("; "),
            kamila_at_tightest,
            KAMILA_FLOOR_AT_TIGHTEST_OVERLAP,
            run.wall.as_secs_f64(),
            DESK_RUNTIME_LIMIT.as_secs()
        ),
    );
}

#[test]
fn criterion_2_strong_methods_beat_gower_pam_when_separated() {
    let run = desk_run();
    let gower = method_mean_at(&run.records, "gower-pam", 0.01);
    let mut lines = Vec::new();
    let mut passed = true;
    for method in ["kamila", "famd-kmeans", "k-prototypes"] {
        let m = method_mean_at(&run.records, method, 0.01);
        let ok = m >= gower + GROUP_GAP;
        passed &= ok;
        lines.push(format!(
            "{method} {:.4} vs gower-pam {:.4} (gap {:+.4})",
            m,
            gower,
            m - gower
        ));
    }
    report(
        "criterion 2 (method grouping)",
        passed,
        &format!("required gap {GROUP_GAP}; {}", lines.join("; ")),
    );
}

#[test]
fn criterion_3_spherical_scenarios_score_higher_than_ellipsoidal() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path().join("sphericity.csv");
    let config = BenchConfig::sphericity_preset();
    let rep = run_benchmark(&config, &out, None).expect("sphericity preset runs");
    assert_eq!(rep.failed, 0);
    let records = read_records(&out).expect("results parse");
    let pooled = |shape: &str| {
        let vals: Vec<f64> = records
            .iter()
            .filter(|r| r.sphericity == shape && r.status == "ok")
            .map(|r| r.ari)
            .collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    let spherical = pooled("spherical");
    let ellipsoidal = pooled("ellipsoidal");
    let passed = spherical - ellipsoidal >= SPHERICITY_GAP;
    report(
        "criterion 3 (sphericity effect)",
        passed,
        &format!(
            "pooled mean ARI spherical {spherical:.4} vs ellipsoidal {ellipsoidal:.4} \
             (gap {:+.4}, required {SPHERICITY_GAP})",
            spherical - ellipsoidal
        ),
    );
}

#[test]
fn criterion_4_overlap_calibration_hits_its_targets() {
    // 20 seeded calibrations split over the three targets, plus the
    // closed-form univariate oracle.
    let plan = [(0.01, 7usize), (0.10, 7), (0.20, 6)];
    let mut worst_rel = 0.0f64;
    let mut worst_case = String::new();
    for (target, count) in plan {
        for replicate in 0..count {
            let cfg = ScenarioConfig {
                k: 3,
                n: 100,
                p: 4,
                overlap: target,
                pct_categorical: 0.5,
                density: Density::Equal,
                sphericity: if replicate % 2 == 0 {
                    Sphericity::Spherical
                } else {
                    Sphericity::Ellipsoidal
                },
                replicate,
                master_seed: 515,
            };
            let spec = calibrate_mixture(&cfg).expect("calibration converges");
            let rel = (spec.achieved_overlap - target).abs() / target;
            if rel > worst_rel {
                worst_rel = rel;
                worst_case = format!("target {target}, replicate {replicate}");
            }
        }
    }

    let delta = 1.2816;
    let means = [
        DVector::from_vec(vec![-delta]),
        DVector::from_vec(vec![delta]),
    ];
    let covs = [DMatrix::identity(1, 1), DMatrix::identity(1, 1)];
    let est = mean_overlap(
        &pairwise_overlap_mc(&[0.5, 0.5], &means, &covs, 100_000, 81).expect("estimator runs"),
    );
    let oracle_err = (est - oracle::univariate_equal_weight_overlap(delta)).abs();

    let passed = worst_rel <= CALIBRATION_REL_TOL && oracle_err <= UNIVARIATE_ORACLE_TOL;
    report(
        "criterion 4 (overlap calibration)",
        passed,
        &format!(
            "worst relative miss {:.2}% ({worst_case}) over 20 calibrations \
             (limit {:.0}%); univariate oracle error {oracle_err:.4} (limit {UNIVARIATE_ORACLE_TOL})",
            worst_rel * 100.0,
            CALIBRATION_REL_TOL * 100.0
        ),
    );
}

#[test]
fn criterion_5_oracle_equivalences() {
    let mut failures = Vec::new();

    // ARI vs pair enumeration: 50 random cases at n <= 12, exact.
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for case in 0..50 {
        let n = rng.random_range(4..=12);
        let u: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let v: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let fast =
            adjusted_rand_index(&Partition::from_labels(&u), &Partition::from_labels(&v)).unwrap();
        let slow = oracle::ari_pair_enumeration(&u, &v);
        if (fast - slow).abs() > EXACT_TOL {
            failures.push(format!("ari case {case}: {fast} vs {slow}"));
        }
    }

    // Greedy subset delta vs exhaustive: exact for c <= 6.
    for case in 0..50 {
        let c = rng.random_range(2..=6);
        let draw = |rng: &mut ChaCha8Rng| {
            let raw: Vec<f64> = (0..c).map(|_| rng.random::<f64>() + 1e-3).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        let pa = draw(&mut rng);
        let pb = draw(&mut rng);
        if (best_subset_delta(&pa, &pb) - oracle::exhaustive_best_subset(&pa, &pb)).abs()
            > EXACT_TOL
        {
            failures.push(format!("subset case {case}"));
        }
    }

    // PAM vs exhaustive medoids at n <= 10: cost within 5%.
    for case in 0..10 {
        let n = 10;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random::<f64>() * 3.0, rng.random::<f64>() * 3.0))
            .collect();
        let m = DMatrix::from_fn(n, n, |i, j| {
            ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()
        });
        let d = DissimilarityMatrix::from_matrix(m).unwrap();
        let state = pam(
            &d,
            2,
            PamInit::RandomStarts {
                starts: 5,
                seed: 60 + case,
            },
        )
        .unwrap();
        let (_, best) = oracle::exhaustive_medoid_search(d.as_matrix(), 2);
        if state.cost > best * (1.0 + PAM_EXCESS_TOL) {
            failures.push(format!("pam case {case}: {:.4} vs {best:.4}", state.cost));
        }
    }

    // Factor projection vs plain PCA on continuous-only data.
    let points = DMatrix::from_fn(40, 3, |i, j| {
        let base: f64 = rng.random::<f64>() - 0.5;
        base + 0.05 * (i as f64) * (j as f64 + 1.0)
    });
    let data = MixedDataset::from_continuous(points.clone()).unwrap();
    let proj = famd_project(&data, 2).unwrap();
    let reference = oracle::pca_scores_population_scaled(&points, 2);
    for c in 0..2 {
        let mut direct = 0.0f64;
        let mut flipped = 0.0f64;
        for r in 0..points.nrows() {
            direct = direct.max((proj.scores[(r, c)] - reference[(r, c)]).abs());
            flipped = flipped.max((proj.scores[(r, c)] + reference[(r, c)]).abs());
        }
        if direct.min(flipped) > FAMD_PCA_TOL {
            failures.push(format!("factor axis {c}: {:.2e}", direct.min(flipped)));
        }
    }

    // Mixed prototypes without categorical columns reduce to k-means under
    // a shared seed.
    let mut shifted = DMatrix::from_fn(60, 2, |_, _| rng.random::<f64>());
    for i in 0..30 {
        shifted[(i, 0)] += 4.0;
    }
    let data = MixedDataset::from_continuous(shifted).unwrap();
    let opts = IterOptions::new(4, 71);
    let kp = k_prototypes(&data, 2, &opts).unwrap();
    let (standardized, _) = mixbench::data::z_standardize(&data).unwrap();
    let km = kmeans(standardized.continuous(), 2, &opts).unwrap();
    if kp.partition.labels() != km.partition.labels() {
        failures.push("gamma-zero prototypes diverged from k-means".into());
    }

    report(
        "criterion 5 (oracle equivalence suite)",
        failures.is_empty(),
        &format!(
            "ari x50, subset x50, pam x10, factor-vs-pca, gamma-zero; failures: [{}]",
            failures.join("; ")
        ),
    );
}

#[test]
fn criterion_6_objectives_never_increase_within_a_run() {
    let mut violations = Vec::new();
    let mut traces = 0usize;
    for inst in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + inst);
        let n = 40 + (inst as usize % 3) * 10;
        let k = 2 + (inst as usize % 2);
        let points = DMatrix::from_fn(n, 2, |i, _| {
            let shift = if i % k == 0 { -1.5 } else { 1.0 };
            shift + rng.random::<f64>()
        });
        let cats: Vec<Vec<usize>> = vec![(0..n).map(|_| rng.random_range(0..3)).collect()];
        let data = MixedDataset::new(points, cats, vec![3], None).unwrap();
        let seed = 8000 + inst;
        let mut check = |name: &str, trace: &[f64]| {
            traces += 1;
            if !trace.windows(2).all(|w| w[1] <= w[0] + MONOTONE_TOL) {
                violations.push(format!("{name}@{inst}"));
            }
        };
        let opts = IterOptions::new(1, seed);
        check(
            "kmeans",
            &kmeans(data.continuous(), k, &opts).unwrap().objective_trace,
        );
        check(
            "k-prototypes",
            &k_prototypes(&data, k, &opts).unwrap().objective_trace,
        );
        check(
            "modha-spangler",
            &modha_spangler(&data, k, &opts, &[1.0])
                .unwrap()
                .objective_trace,
        );
        check(
            "mixed-rkm",
            &mixed_rkm(&data, k, &RkmOptions::new(1, seed))
                .unwrap()
                .objective_trace,
        );
        let d = gower_matrix(&data, None).unwrap();
        check(
            "pam-swap",
            &pam(&d, k, PamInit::RandomStarts { starts: 1, seed })
                .unwrap()
                .cost_trace,
        );
    }
    report(
        "criterion 6 (objective monotonicity)",
        violations.is_empty(),
        &format!(
            "{traces} traces over 100 instances, tolerance {MONOTONE_TOL:.0e}; violations: [{}]",
            violations.join(", ")
        ),
    );
}

#[test]
fn criterion_7_score_invariance_and_null_behavior() {
    // 50 random relabelings leave both scores unchanged.
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    let n = 80;
    let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
    let pt = Partition::from_labels(&truth);
    let pl = Partition::from_labels(&labels);
    let base_ari = adjusted_rand_index(&pt, &pl).unwrap();
    let base_ami = adjusted_mutual_information(&pt, &pl).unwrap();
    let mut worst_shift = 0.0f64;
    for _ in 0..50 {
        let mut perm: Vec<usize> = (0..4).collect();
        for i in (1..4).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        let relabeled: Vec<usize> = labels.iter().map(|&l| perm[l]).collect();
        let pr = Partition::from_labels(&relabeled);
        worst_shift = worst_shift
            .max((adjusted_rand_index(&pt, &pr).unwrap() - base_ari).abs())
            .max((adjusted_mutual_information(&pt, &pr).unwrap() - base_ami).abs());
    }

    // Independent partitions: AMI averages near zero.
    let mut sum = 0.0;
    for seed in 0..100u64 {
        let mut r = ChaCha8Rng::seed_from_u64(9000 + seed);
        let a: Vec<usize> = (0..60).map(|_| r.random_range(0..3)).collect();
        let b: Vec<usize> = (0..60).map(|_| r.random_range(0..3)).collect();
        sum +=
            adjusted_mutual_information(&Partition::from_labels(&a), &Partition::from_labels(&b))
                .unwrap();
    }
    let mean_ami = sum / 100.0;

    let passed = worst_shift <= EXACT_TOL && mean_ami.abs() <= AMI_NULL_BAND;
    report(
        "criterion 7 (metric properties)",
        passed,
        &format!(
            "max score shift over 50 relabelings {worst_shift:.2e} (limit {EXACT_TOL:.0e}); \
             mean AMI of independent partitions {mean_ami:+.4} (band ±{AMI_NULL_BAND})"
        ),
    );
}

fn mask_runtime_column(text: &str) -> String {
    text.lines()
        .map(|line| {
            if line.starts_with('#') || line.starts_with("k,") {
                line.to_string()
            } else {
                let mut fields: Vec<&str> = line.split(',').collect();
                if fields.len() == 15 {
                    fields[12] = "-";
                }
                fields.join(",")
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn cli() -> std::process::Command {
    std::process::Command::new(env!("CARGO_BIN_EXE_mixbench"))
}

#[test]
fn criterion_8_cli_runs_are_byte_deterministic() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config_path = dir.path().join("tiny.toml");
    std::fs::write(
        &config_path,
        r#"master_seed = 2024
starts = 2
methods = ["gower-pam", "k-prototypes", "kamila"]

[grid]
k = [2]
n = [200]
p = [2]
overlap = [0.1]
pct_categorical = [0.5]
density = ["equal"]
sphericity = ["spherical"]
replicates = 2
"#,
    )
    .unwrap();
    let run = |out: &PathBuf, threads: &str| {
        let status = cli()
            .args(["run", "--config"])
            .arg(&config_path)
            .arg("--out")
            .arg(out)
            .args(["--threads", threads])
            .status()
            .expect("binary runs");
        assert!(status.success());
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run(&a, "1");
    run(&b, "2"); // different worker count must not change the bytes
    let text_a = std::fs::read_to_string(&a).unwrap();
    let text_b = std::fs::read_to_string(&b).unwrap();
    let passed = mask_runtime_column(&text_a) == mask_runtime_column(&text_b);
    report(
        "criterion 8 (determinism)",
        passed,
        "two CLI runs (1 vs 2 worker threads) byte-identical modulo the runtime column",
    );
}

#[test]
fn cli_resume_completes_a_truncated_run() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config_path = dir.path().join("tiny.toml");
    std::fs::write(
        &config_path,
        r#"master_seed = 77
starts = 2
methods = ["gower-pam", "famd-kmeans"]

[grid]
k = [2]
n = [200]
p = [2]
overlap = [0.05]
pct_categorical = [0.5]
density = ["equal"]
sphericity = ["spherical"]
replicates = 3
"#,
    )
    .unwrap();
    let out = dir.path().join("results.csv");
    let status = cli()
        .args(["run", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let full = std::fs::read_to_string(&out).unwrap();

    // Drop the last two data rows, as if the run had been interrupted.
    let kept: Vec<&str> = full.trim_end().lines().collect();
    let truncated = kept[..kept.len() - 2].join("\n") + "\n";
    let partial = dir.path().join("partial.csv");
    std::fs::write(&partial, &truncated).unwrap();
    let status = cli()
        .args(["run", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&partial)
        .status()
        .unwrap();
    assert!(status.success());
    let resumed = std::fs::read_to_string(&partial).unwrap();
    assert_eq!(
        mask_runtime_column(&resumed),
        mask_runtime_column(&full),
        "resume must reproduce exactly the missing rows"
    );
}
