//! Medoid clustering on the variance-matched mixed distance: continuous
//! columns are z-scored, categorical mismatches are rescaled so one
//! mismatch carries the same squared-distance weight as one standard
//! deviation of a continuous gap, and the combined distance is Euclidean.
//!
//! Compare the result against plain Gower weighting on the same data.

use mixbench::data::Partition;
use mixbench::dissimilarity::{gower_matrix, hl_scale_factor, hl_scaled_matrix};
use mixbench::medoids::{pam, PamInit};
use mixbench::metrics::adjusted_rand_index;
use mixbench::simgen::{generate_scenario, Density, ScenarioConfig, Sphericity};

fn main() -> mixbench::Result<()> {
    let cfg = ScenarioConfig {
        k: 3,
        n: 300,
        p: 4,
        overlap: 0.10,
        pct_categorical: 0.5,
        density: Density::Equal,
        sphericity: Sphericity::Spherical,
        replicate: 0,
        master_seed: 12,
    };
    let (data, _) = generate_scenario(&cfg)?;
    let truth = Partition::from_labels(data.truth().expect("labeled"));

    for j in 0..data.p_c() {
        let props = data.level_proportions(j);
        println!(
            "categorical column {j}: level proportions {:?} -> mismatch scale {:.4}",
            props
                .iter()
                .map(|p| (p * 1000.0).round() / 1000.0)
                .collect::<Vec<_>>(),
            hl_scale_factor(&props)
        );
    }

    let init = PamInit::RandomStarts { starts: 5, seed: 2 };
    let hl = pam(&hl_scaled_matrix(&data)?, cfg.k, init)?;
    let gower = pam(&gower_matrix(&data, None)?, cfg.k, init)?;

    println!(
        "variance-matched distance: ARI {:.4}",
        adjusted_rand_index(&truth, &hl.assign)?
    );
    println!(
        "Gower distance:            ARI {:.4}",
        adjusted_rand_index(&truth, &gower.assign)?
    );
    Ok(())
}
