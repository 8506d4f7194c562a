//! A complete miniature benchmark: enumerate a small factorial design,
//! run every method on every generated dataset, then print the summary
//! tables and render the SVG charts — the same pipeline the `mixbench`
//! binary drives, at a size that finishes in well under a minute.

use std::fs;
use std::path::Path;

use mixbench::bench::{read_records, run_benchmark, summarize, BenchConfig, BenchGrid, Method};
use mixbench::plot::emit_plots;

fn main() -> mixbench::Result<()> {
    let config = BenchConfig {
        master_seed: 424242,
        starts: 3,
        methods: Method::ALL.iter().map(|m| m.name().to_string()).collect(),
        grid: BenchGrid {
            k: vec![2],
            n: vec![200],
            p: vec![2],
            overlap: vec![0.05, 0.30],
            pct_categorical: vec![0.5],
            density: vec!["equal".into()],
            sphericity: vec!["spherical".into()],
            replicates: 2,
        },
    };
    config.validate(false)?;

    let out_dir = Path::new("target/example-output");
    fs::create_dir_all(out_dir)?;
    let results = out_dir.join("mini_results.csv");
    if results.exists() {
        fs::remove_file(&results)?; // start fresh each run
    }
    let report = run_benchmark(&config, &results, None)?;
    println!(
        "{} tasks executed ({} failed), results in {}\n",
        report.executed,
        report.failed,
        results.display()
    );

    let records = read_records(&results)?;
    let summary = summarize(&records);
    print!("{}", summary.to_text());

    let plots = emit_plots(&summary, &out_dir.join("mini_plots"))?;
    println!();
    for p in &plots {
        println!("wrote {}", p.display());
    }
    Ok(())
}
