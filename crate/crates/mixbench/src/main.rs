//! Thin command-line front end over the library: dataset generation,
//! benchmark execution, summaries, plots, and the oracle self-test suite.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mixbench::bench::{
    read_records, run_benchmark, summarize, BenchConfig, RESULTS_HEADER_COMMENT,
};
use mixbench::error::Error;
use mixbench::io::{write_dataset_csv, write_dataset_meta, write_mixture_audit};
use mixbench::plot::emit_plots;
use mixbench::simgen::{generate_scenario, Density, ScenarioConfig, Sphericity};
use mixbench::validate::run_suite;

#[derive(Parser)]
#[command(
    name = "mixbench",
    about = "Cluster-recovery benchmarks for mixed continuous/categorical data",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one synthetic mixed-type dataset with calibrated overlap.
    Generate(GenerateArgs),
    /// Run (or resume) a benchmark over a factorial design.
    Run(RunArgs),
    /// Aggregate a results file into method and factor tables.
    Summarize(SummarizeArgs),
    /// Render SVG charts from a results file.
    Plot(PlotArgs),
    /// Cross-check the implementations against independent oracles.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of mixture components.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Observations.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Total variables before discretization.
    #[arg(long, default_value_t = 4)]
    p: usize,
    /// Mean pairwise overlap target in (0, 1).
    #[arg(long, default_value_t = 0.05)]
    overlap: f64,
    /// Fraction of variables to discretize into 4 levels.
    #[arg(long, default_value_t = 0.5)]
    pct_categorical: f64,
    /// Cluster size profile: equal | one-small-10.
    #[arg(long, default_value = "equal")]
    density: String,
    /// Covariance shape: spherical | ellipsoidal.
    #[arg(long, default_value = "spherical")]
    sphericity: String,
    /// Replicate number (varies the dataset under one master seed).
    #[arg(long, default_value_t = 0)]
    replicate: usize,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path; `<out>.meta` and `<out>.audit` are written beside it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Benchmark configuration TOML; omit to use a preset.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in design: desk | sphericity | full.
    #[arg(long, default_value = "desk")]
    preset: String,
    /// Accept factor levels outside the standard study design.
    #[arg(long)]
    free_grid: bool,
    /// Results CSV (appended to when it already exists).
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: MIXBENCH_THREADS or all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Write the effective configuration to this TOML path and exit.
    #[arg(long)]
    emit_config: Option<PathBuf>,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Results CSV produced by `run`.
    #[arg(long)]
    results: PathBuf,
    /// Optional long-format CSV output for the summary itself.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Results CSV produced by `run`.
    #[arg(long)]
    results: PathBuf,
    /// Directory for the SVG files.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Smaller Monte Carlo budgets and fewer instances.
    #[arg(long)]
    quick: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own exit code for usage errors is 2; reserve 2 for
            // partial benchmark failures and report usage problems as 1
            // (help and version remain success).
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> mixbench::error::Result<ExitCode> {
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Run(args) => run(args),
        Command::Summarize(args) => summarize_cmd(args),
        Command::Plot(args) => plot(args),
        Command::Validate(args) => validate(args),
    }
}

fn parse_density(s: &str) -> mixbench::error::Result<Density> {
    match s {
        "equal" => Ok(Density::Equal),
        "one-small-10" => Ok(Density::OneSmall10),
        other => Err(Error::ConfigInvalid(format!(
            "unknown density {other:?} (expected equal | one-small-10)"
        ))),
    }
}

fn parse_sphericity(s: &str) -> mixbench::error::Result<Sphericity> {
    match s {
        "spherical" => Ok(Sphericity::Spherical),
        "ellipsoidal" => Ok(Sphericity::Ellipsoidal),
        other => Err(Error::ConfigInvalid(format!(
            "unknown sphericity {other:?} (expected spherical | ellipsoidal)"
        ))),
    }
}

fn generate(args: GenerateArgs) -> mixbench::error::Result<ExitCode> {
    let cfg = ScenarioConfig {
        k: args.k,
        n: args.n,
        p: args.p,
        overlap: args.overlap,
        pct_categorical: args.pct_categorical,
        density: parse_density(&args.density)?,
        sphericity: parse_sphericity(&args.sphericity)?,
        replicate: args.replicate,
        master_seed: args.seed,
    };
    let (data, spec) = generate_scenario(&cfg)?;
    write_dataset_csv(&args.out, &data)?;
    write_dataset_meta(&args.out, &data, cfg.dataset_seed())?;
    let mut audit = args.out.clone().into_os_string();
    audit.push(".audit");
    write_mixture_audit(Path::new(&audit), &cfg, &spec)?;
    println!(
        "wrote {} ({} rows, {} continuous + {} categorical), achieved overlap {:.4}",
        args.out.display(),
        data.n(),
        data.p_r(),
        data.p_c(),
        spec.achieved_overlap
    );
    Ok(ExitCode::SUCCESS)
}

fn load_config(args: &RunArgs) -> mixbench::error::Result<BenchConfig> {
    if let Some(path) = &args.config {
        return BenchConfig::from_toml_file(path);
    }
    match args.preset.as_str() {
        "desk" => Ok(BenchConfig::desk_preset()),
        "sphericity" => Ok(BenchConfig::sphericity_preset()),
        "full" => Ok(BenchConfig::full_preset()),
        other => Err(Error::ConfigInvalid(format!(
            "unknown preset {other:?} (expected desk | sphericity | full)"
        ))),
    }
}

fn run(args: RunArgs) -> mixbench::error::Result<ExitCode> {
    let config = load_config(&args)?;
    config.validate(args.free_grid)?;
    if let Some(path) = &args.emit_config {
        config.to_toml_file(path)?;
        println!("wrote {}", path.display());
        return Ok(ExitCode::SUCCESS);
    }
    let report = run_benchmark(&config, &args.out, args.threads)?;
    println!(
        "{} tasks: {} executed, {} resumed, {} failed -> {}",
        report.total,
        report.executed,
        report.skipped,
        report.failed,
        args.out.display()
    );
    if report.failed > 0 {
        eprintln!("{} task(s) recorded an error status", report.failed);
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn summarize_cmd(args: SummarizeArgs) -> mixbench::error::Result<ExitCode> {
    let records = read_records(&args.results)?;
    if records.is_empty() {
        return Err(Error::ConfigInvalid(format!(
            "{} holds no records (expected a {RESULTS_HEADER_COMMENT} file)",
            args.results.display()
        )));
    }
    let summary = summarize(&records);
    print!("{}", summary.to_text());
    if let Some(out) = &args.out {
        summary.write_csv(out)?;
        println!("\nwrote {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn plot(args: PlotArgs) -> mixbench::error::Result<ExitCode> {
    let records = read_records(&args.results)?;
    if records.is_empty() {
        return Err(Error::ConfigInvalid(format!(
            "{} holds no records",
            args.results.display()
        )));
    }
    let summary = summarize(&records);
    let written = emit_plots(&summary, &args.out_dir)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(args: ValidateArgs) -> mixbench::error::Result<ExitCode> {
    let results = run_suite(args.quick);
    let mut failed = 0usize;
    for r in &results {
        let verdict = if r.passed { "pass" } else { "FAIL" };
        println!("{verdict}  {:<42} {}", r.name, r.detail);
        if !r.passed {
            failed += 1;
        }
    }
    println!(
        "{} of {} checks passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
