//! Distance-based partitioning of mixed continuous/categorical data.
//!
//! The crate bundles eight clustering pipelines that all consume the same
//! [`data::MixedDataset`], a synthetic Gaussian-mixture generator whose
//! pairwise cluster overlap is calibrated by Monte Carlo search, external
//! cluster-recovery indices, and a factorial benchmark harness with a thin
//! `mixbench` command-line front end.
//!
//! The primary interface is the `examples/` directory; each example is a
//! runnable walkthrough of one capability:
//!
//! ```text
//! cargo run --release -p mixbench --example generate_dataset
//! cargo run --release -p mixbench --example gower_pam
//! cargo run --release -p mixbench --example hennig_liao_pam
//! cargo run --release -p mixbench --example mixed_kmeans
//! cargo run --release -p mixbench --example kprototypes
//! cargo run --release -p mixbench --example modha_spangler
//! cargo run --release -p mixbench --example famd_kmeans
//! cargo run --release -p mixbench --example mixed_rkm
//! cargo run --release -p mixbench --example kamila
//! cargo run --release -p mixbench --example compare_methods
//! cargo run --release -p mixbench --example mini_benchmark
//! ```

pub mod bench;
pub mod data;
pub mod dissimilarity;
pub mod error;
pub mod factor;
pub mod io;
pub mod kamila;
pub mod medoids;
pub mod metrics;
pub mod plot;
pub mod proto;
pub mod simgen;
pub mod validate;

mod util;

pub use error::{Error, Result};
