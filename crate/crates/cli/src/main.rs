use clap::{Args, Parser, Subcommand, ValueEnum};
use pairdiff_cli::{
    analyze, coverage, emit_plots, ingest_csv, json, AnalyzeConfig, BinStrategy, CliError,
    ColumnMap, Format,
};
use pairdiff_core::cumulative;
use pairdiff_core::hilbert::{self, HilbertConfig, TieMode};
use pairdiff_core::synth::{self, Noise, Profile, SynthSpec};
use std::fs;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "pairdiff", version)]
#[command(about = "Cumulative-difference analysis of matched pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis: curve, scalar metrics, reliability diagrams
    Analyze(AnalyzeArgs),
    /// Reliability diagrams only
    Reliability(AnalyzeArgs),
    /// Emit the Hilbert-curve score of each row
    HilbertScore(HilbertScoreArgs),
    /// Generate a synthetic dataset with known ground truth
    Synth(SynthArgs),
    /// Monte-Carlo coverage of the 2-sigma band under the null
    Coverage(CoverageArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TieModeArg {
    Aggregate,
    Perturb,
}

impl From<TieModeArg> for TieMode {
    fn from(v: TieModeArg) -> Self {
        match v {
            TieModeArg::Aggregate => TieMode::Aggregate,
            TieModeArg::Perturb => TieMode::Perturb,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BinStrategyArg {
    Equispaced,
    Equivariance,
    Both,
}

impl From<BinStrategyArg> for BinStrategy {
    fn from(v: BinStrategyArg) -> Self {
        match v {
            BinStrategyArg::Equispaced => BinStrategy::Equispaced,
            BinStrategyArg::Equivariance => BinStrategy::Equivariance,
            BinStrategyArg::Both => BinStrategy::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Svg,
    Json,
    Both,
}

impl From<FormatArg> for Format {
    fn from(v: FormatArg) -> Self {
        match v {
            FormatArg::Svg => Format::Svg,
            FormatArg::Json => Format::Json,
            FormatArg::Both => Format::Both,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input CSV file with a header row
    input: PathBuf,

    /// Covariate column names, in order (the order changes the scores)
    #[arg(long, value_delimiter = ',', required = true)]
    covariates: Vec<String>,

    /// Column with the first population's response
    #[arg(long)]
    q: String,

    /// Column with the second population's response
    #[arg(long)]
    r: String,

    /// Optional weight column; absent means unit weights
    #[arg(long)]
    weight: Option<String>,

    /// How to handle equal scores
    #[arg(long, value_enum, default_value = "aggregate")]
    tie_mode: TieModeArg,

    /// Seed for the perturbation tie mode
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Relative size of tie-breaking perturbations
    #[arg(long, default_value_t = 1e-8)]
    perturb_scale: f64,

    /// Hilbert bits per covariate (default: floor(64 / #covariates))
    #[arg(long)]
    bits: Option<u32>,

    /// Reliability-diagram bin counts
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 100])]
    bins: Vec<usize>,

    /// Binning strategy for the reliability diagrams
    #[arg(long, value_enum, default_value = "both")]
    bin_strategy: BinStrategyArg,

    /// Output format
    #[arg(long, value_enum, default_value = "both")]
    format: FormatArg,

    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct HilbertScoreArgs {
    /// Input CSV file with a header row
    input: PathBuf,

    /// Covariate column names, in order
    #[arg(long, value_delimiter = ',', required = true)]
    covariates: Vec<String>,

    /// Hilbert bits per covariate (default: floor(64 / #covariates))
    #[arg(long)]
    bits: Option<u32>,

    /// Output CSV file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of records
    #[arg(long, default_value_t = 4000)]
    n: usize,

    /// Number of distinct scores
    #[arg(long, default_value_t = 1000)]
    m: usize,

    /// Expected-difference profile
    #[arg(long, value_enum, default_value = "jump")]
    profile: ProfileArg,

    /// Response noise model
    #[arg(long, value_enum, default_value = "gaussian")]
    noise: NoiseArg,

    /// Gaussian noise standard deviation
    #[arg(long, default_value_t = 0.1)]
    sigma_noise: f64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Null,
    FlatMiddle,
    Jump,
    Oscillating,
}

impl From<ProfileArg> for Profile {
    fn from(v: ProfileArg) -> Self {
        match v {
            ProfileArg::Null => Profile::Null,
            ProfileArg::FlatMiddle => Profile::FlatMiddle,
            ProfileArg::Jump => Profile::Jump,
            ProfileArg::Oscillating => Profile::Oscillating,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Gaussian,
    Bernoulli,
}

#[derive(Args)]
struct CoverageArgs {
    /// Number of Monte-Carlo trials (1000+ for a stable estimate)
    #[arg(long, default_value_t = 20_000)]
    trials: usize,

    /// Records per trial
    #[arg(long, default_value_t = 400)]
    n: usize,

    /// Distinct scores per trial
    #[arg(long, default_value_t = 100)]
    m: usize,

    /// Gaussian noise standard deviation
    #[arg(long, default_value_t = 0.1)]
    sigma_noise: f64,

    /// Master seed; per-trial seeds derive from it by counter
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run_analyze(args: &AnalyzeArgs, diagrams_only: bool) -> Result<(), CliError> {
    let map = ColumnMap {
        covariate_columns: args.covariates.clone(),
        q_column: args.q.clone(),
        r_column: args.r.clone(),
        weight_column: args.weight.clone(),
    };
    let ingested = ingest_csv(&args.input, &map)?;
    let mut config = AnalyzeConfig::new(args.covariates.clone());
    config.q_name = args.q.clone();
    config.r_name = args.r.clone();
    config.weight_name = args.weight.clone();
    config.tie_mode = args.tie_mode.into();
    config.seed = args.seed;
    config.perturb_scale = args.perturb_scale;
    config.bits_per_dim = args.bits;
    config.bin_counts = args.bins.clone();
    config.bin_strategy = args.bin_strategy.into();
    config.dropped_rows = ingested.dropped;

    let bundle = analyze(&ingested.dataset, &ingested.covariates, &config)?;

    if diagrams_only {
        fs::create_dir_all(&args.out)?;
        let format: Format = args.format.into();
        if matches!(format, Format::Json | Format::Both) {
            fs::write(args.out.join("reliability.json"), json::diagrams_to_json(&bundle))?;
        }
        if matches!(format, Format::Svg | Format::Both) {
            for entry in &bundle.diagrams {
                fs::write(
                    args.out.join(format!(
                        "reliability_{}_{}.svg",
                        entry.strategy, entry.bins_requested
                    )),
                    pairdiff_cli::svg::reliability_svg(entry),
                )?;
            }
        }
        println!(
            "wrote reliability diagrams for {} rows ({} dropped) to {}",
            bundle.provenance.n_records,
            bundle.provenance.dropped_rows,
            args.out.display()
        );
        return Ok(());
    }

    let written = emit_plots(&bundle, args.format.into(), &args.out)?;
    let m = &bundle.metrics;
    let ratio = |r: Option<f64>| match r {
        Some(v) => format!("{v:.4}"),
        None => "undefined".into(),
    };
    println!(
        "n = {}, m = {} ({} rows dropped)",
        bundle.provenance.n_records, bundle.provenance.m_groups, bundle.provenance.dropped_rows
    );
    println!(
        "kuiper = {:.6} ({} sigma), ks = {:.6} ({} sigma)",
        m.kuiper,
        ratio(m.kuiper_over_sigma),
        m.kolmogorov_smirnov,
        ratio(m.ks_over_sigma)
    );
    println!("avg_diff = {:.6}, sigma = {:.6}", m.average_difference, m.sigma);
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_hilbert_score(args: &HilbertScoreArgs) -> Result<(), CliError> {
    let ingested = ingest_csv_covariates_only(&args.input, &args.covariates)?;
    let dims = args.covariates.len();
    let config = match args.bits {
        Some(bits) => HilbertConfig::with_bits(dims, bits)?,
        None => HilbertConfig::new(dims)?,
    };
    let normalized = hilbert::normalize_covariates(&ingested.0)?;
    let scores = hilbert::score_batch(&normalized, &config)?;

    let mut out = String::from("row,score\n");
    for (row, score) in ingested.1.iter().zip(&scores) {
        out.push_str(&format!("{row},{}\n", json::fmt_f64(*score)));
    }
    match &args.out {
        Some(path) => fs::write(path, out)?,
        None => print!("{out}"),
    }
    Ok(())
}

/// Covariates-only ingestion for `hilbert-score`: returns the covariate
/// rows and their original 0-based data-row indices (dropped rows skip).
fn ingest_csv_covariates_only(
    path: &std::path::Path,
    covariates: &[String],
) -> Result<(Vec<Vec<f64>>, Vec<usize>), CliError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let idx: Vec<usize> = covariates
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| CliError::Schema(format!("column {name:?} not found in header")))
        })
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    let mut kept = Vec::new();
    for (row_no, row) in reader.records().enumerate() {
        let row = row?;
        let covs: Option<Vec<f64>> = idx
            .iter()
            .map(|&i| {
                row.get(i)
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .and_then(|s| s.parse::<f64>().ok())
                    .filter(|v| v.is_finite())
            })
            .collect();
        if let Some(covs) = covs {
            rows.push(covs);
            kept.push(row_no);
        }
    }
    if rows.is_empty() {
        return Err(CliError::EmptyInput);
    }
    Ok((rows, kept))
}

fn run_synth(args: &SynthArgs) -> Result<(), CliError> {
    let noise = match args.noise {
        NoiseArg::Gaussian => Noise::Gaussian(args.sigma_noise),
        NoiseArg::Bernoulli => Noise::Bernoulli,
    };
    let spec = SynthSpec {
        n: args.n,
        m: args.m,
        profile: args.profile.into(),
        noise,
        seed: args.seed,
    };
    let (dataset, expected) = synth::generate(&spec)?;
    fs::create_dir_all(&args.out)?;

    let mut csv_out = String::from("score,q,r,weight\n");
    for rec in &dataset.records {
        csv_out.push_str(&format!(
            "{},{},{},{}\n",
            json::fmt_f64(rec.score),
            json::fmt_f64(rec.q),
            json::fmt_f64(rec.r),
            json::fmt_f64(rec.weight)
        ));
    }
    let data_path = args.out.join("synthetic.csv");
    fs::write(&data_path, csv_out)?;

    let curve = synth::expected_curve(&expected);
    let metrics = cumulative::metrics(&expected);
    let expected_path = args.out.join("expected.json");
    fs::write(&expected_path, json::expected_to_json(&curve, &metrics))?;

    println!("wrote {}", data_path.display());
    println!("wrote {}", expected_path.display());
    Ok(())
}

fn run_coverage(args: &CoverageArgs) -> Result<(), CliError> {
    let spec = SynthSpec {
        n: args.n,
        m: args.m,
        profile: Profile::Null,
        noise: Noise::Gaussian(args.sigma_noise),
        seed: 0,
    };
    let fraction = coverage(args.trials, &spec, args.seed)?;
    let hits = (fraction * args.trials as f64).round() as u64;
    println!(
        "coverage {} ({hits}/{} trials with |avg_diff| <= 2 sigma)",
        json::fmt_f64(fraction),
        args.trials
    );
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(args) => run_analyze(args, false),
        Command::Reliability(args) => run_analyze(args, true),
        Command::HilbertScore(args) => run_hilbert_score(args),
        Command::Synth(args) => run_synth(args),
        Command::Coverage(args) => run_coverage(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
