use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use genresub::config::RunConfig;
use genresub::harness::{run_experiment, timing_ordering, write_stats_csv, write_timing_csv};
use genresub::io::{read_dataset_file, write_dataset_file};
use genresub::AppError;
use genresub_core::calibration::calibrate_kappa;
use genresub_core::classifiers::train;
use genresub_core::dataset::generate_synthetic;
use genresub_core::estimators::EstimationContext;
use genresub_core::LabeledDataset;

/// Generalized resubstitution error estimation.
#[derive(Debug, Parser)]
#[command(name = "genresub", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a synthetic dataset and write it as CSV.
    Generate(CommonArgs),
    /// Train a rule on a dataset and print one error estimate.
    Estimate(CommonArgs),
    /// Repeated-trial bias/variance/RMS benchmark; writes stats.csv and timing.csv.
    Benchmark(CommonArgs),
    /// Search the kernel-width multiplier; writes calibration.csv.
    Calibrate(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Flat TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for benchmark trials.
    #[arg(long)]
    workers: Option<usize>,
    /// Config override, `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

struct Loaded {
    cfg: RunConfig,
    text: String,
}

fn load(args: &CommonArgs) -> Result<Loaded, AppError> {
    let text = match &args.config {
        Some(p) => {
            fs::read_to_string(p).map_err(|e| AppError::Io(format!("{}: {e}", p.display())))?
        }
        None => String::new(),
    };
    let mut cfg = RunConfig::parse(&text, &args.overrides)?;
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    Ok(Loaded { cfg, text })
}

fn prepare_out(dir: &Path) -> Result<(), AppError> {
    fs::create_dir_all(dir).map_err(|e| AppError::Io(format!("{}: {e}", dir.display())))
}

fn write_manifest(
    dir: &Path,
    command: &str,
    args: &CommonArgs,
    loaded: &Loaded,
    result: &str,
) -> Result<(), AppError> {
    let mut m = format!(
        "# genresub {command}\n# seed = {}\n",
        loaded.cfg.seed.unwrap_or(0)
    );
    for o in &args.overrides {
        m.push_str(&format!("# override: {o}\n"));
    }
    for line in result.lines() {
        m.push_str(&format!("# result: {line}\n"));
    }
    m.push_str(&loaded.text);
    fs::write(dir.join("manifest.txt"), m)?;
    Ok(())
}

fn input_dataset(cfg: &RunConfig) -> Result<LabeledDataset, AppError> {
    match &cfg.input {
        Some(p) => read_dataset_file(p, 2),
        None => {
            let n = cfg
                .n
                .ok_or_else(|| AppError::Config("set `input` or `n`".into()))?;
            Ok(generate_synthetic(&cfg.model_spec()?, n, cfg.seed())?)
        }
    }
}

fn generate(args: &CommonArgs) -> Result<(), AppError> {
    let loaded = load(args)?;
    let cfg = &loaded.cfg;
    let n = cfg
        .n
        .ok_or_else(|| AppError::Config("`n` is required for generate".into()))?;
    let spec = cfg.model_spec()?;
    let ds =
        generate_synthetic(&spec, n, cfg.seed()).map_err(|e| AppError::Config(e.to_string()))?;
    prepare_out(&args.out)?;
    let path = args.out.join("dataset.csv");
    write_dataset_file(&ds, &path)?;
    write_manifest(
        &args.out,
        "generate",
        args,
        &loaded,
        &format!("dataset.csv rows={n}"),
    )?;
    println!("wrote {} ({n} rows, {} features)", path.display(), ds.dim());
    Ok(())
}

fn estimate(args: &CommonArgs) -> Result<(), AppError> {
    let loaded = load(args)?;
    let cfg = &loaded.cfg;
    let name = cfg
        .estimator
        .clone()
        .ok_or_else(|| AppError::Config("`estimator` is required".into()))?;
    let spec = cfg.estimator_spec(&name)?;
    let config = cfg.training_config()?;
    let ds = input_dataset(cfg)?;
    let test = cfg
        .test_input
        .as_deref()
        .map(|p| read_dataset_file(p, ds.class_count()))
        .transpose()?;
    let clf = train(&config, &ds)?;
    let ctx = EstimationContext {
        config: &config,
        classifier: &clf,
        train: &ds,
        test: test.as_ref(),
        seed: cfg.seed(),
    };
    let est = spec.evaluate(&ctx)?;
    let line = format!(
        "estimator={} value={:?} seed={}",
        est.estimator.name(),
        est.value,
        cfg.seed().0
    );
    println!("{line}");
    if args.out != Path::new(".") {
        prepare_out(&args.out)?;
        write_manifest(&args.out, "estimate", args, &loaded, &line)?;
    }
    Ok(())
}

fn benchmark(args: &CommonArgs) -> Result<(), AppError> {
    let loaded = load(args)?;
    let cfg = &loaded.cfg;
    let configs = cfg.training_configs()?;
    prepare_out(&args.out)?;
    let mut reports = Vec::new();
    for config in configs {
        let spec = cfg.experiment_spec(config)?;
        let report = run_experiment(&spec)?;
        let dir = if cfg.rules.as_ref().is_some_and(|r| r.len() > 1) {
            let d = args.out.join(report.classifier);
            prepare_out(&d)?;
            d
        } else {
            args.out.clone()
        };
        let f = fs::File::create(dir.join("stats.csv"))?;
        write_stats_csv(&report, std::io::BufWriter::new(f))?;
        for s in &report.summaries {
            if let Some(st) = &s.stats {
                println!(
                    "{:<10} {:<13} n={:<4} bias={:+.4} var_dev={:.5} rms={:.4} T={}",
                    report.classifier,
                    s.estimator.name(),
                    s.n,
                    st.bias,
                    st.deviation_variance,
                    st.rms,
                    st.trials
                );
            }
        }
        reports.push(report);
    }
    let f = fs::File::create(args.out.join("timing.csv"))?;
    write_timing_csv(&reports, std::io::BufWriter::new(f))?;
    for r in &reports {
        for line in timing_ordering(r) {
            println!("timing (informational): {line}");
        }
    }
    write_manifest(
        &args.out,
        "benchmark",
        args,
        &loaded,
        "stats.csv timing.csv",
    )?;
    Ok(())
}

fn calibrate(args: &CommonArgs) -> Result<(), AppError> {
    let loaded = load(args)?;
    let cfg = &loaded.cfg;
    let config = cfg.training_config()?;
    let cspec = cfg.calibration_spec()?;
    let ds = input_dataset(cfg)?;
    let outcome = calibrate_kappa(
        &config,
        &ds,
        cfg.kernel_family()?,
        cfg.mc_samples.unwrap_or(100),
        &cspec,
    )?;
    prepare_out(&args.out)?;
    let mut w = csv::Writer::from_path(args.out.join("calibration.csv"))?;
    w.write_record(["kappa", "rough_bias"])?;
    for (k, b) in &outcome.trace {
        w.write_record([format!("{k:?}"), format!("{b:?}")])?;
    }
    w.flush()?;
    let line = format!(
        "kappa_star={:?} truncated={}",
        outcome.kappa, outcome.truncated
    );
    if outcome.truncated {
        eprintln!("warning: kappa search stopped at its bound");
    }
    println!("{line}");
    write_manifest(&args.out, "calibrate", args, &loaded, &line)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Estimate(a) => estimate(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Calibrate(a) => calibrate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("genresub: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
