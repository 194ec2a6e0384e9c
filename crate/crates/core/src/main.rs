use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand_distr::{Distribution, StandardNormal};

use hfts::depth::{depths, depths_oracle, DepthKind};
use hfts::evaluate::{functional_boxplot, level_report, outliergram, scale_curve};
use hfts::forecast::{hierarchical_forecast, rolling_backtest, ForecastConfig, ForecastMethod};
use hfts::io::{load_hierarchy, write_atomic, write_hierarchy, LoadedHierarchy, RunParams};
use hfts::series::FunctionalSample;
use hfts::simulate::{build_hierarchy_dataset, RngSeed, SimulationSpec};
use hfts::{Error, Grid, Result};

/// Robust forecasting of hierarchical functional time series with aggregated
/// moving functional medians.
///
/// Depth choice: GBD suits data whose outliers are mainly shape outliers,
/// MBD suits data whose outliers are mainly magnitude outliers.
#[derive(Parser)]
#[command(name = "hfts", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic hierarchy (FAR(1) or scaled-Wiener leaves) as node CSV files.
    Simulate(SimulateArgs),
    /// One-step forecasts at every node from the first N observations.
    Forecast(ForecastArgs),
    /// Rolling one-step backtest with per-node and per-level MAFE/MAD.
    Backtest(BacktestArgs),
    /// Functional boxplot, outliergram and scale curve of one node.
    Diagnose(DiagnoseArgs),
    /// Time the optimized MBD against brute-force band enumeration.
    Bench(BenchArgs),
}

#[derive(Args)]
struct MethodArgs {
    /// Moving window length k [config or 10].
    #[arg(long)]
    k: Option<usize>,
    /// Band depth: mbd or gbd [config or mbd].
    #[arg(long)]
    depth: Option<DepthKind>,
    /// aggregated-median or moving-mean [config or aggregated-median].
    #[arg(long)]
    method: Option<ForecastMethod>,
}

impl MethodArgs {
    fn resolve(&self, params: &RunParams) -> ForecastConfig {
        ForecastConfig::new(
            self.k.unwrap_or(params.window),
            self.depth.unwrap_or(params.depth),
            self.method.unwrap_or(params.method),
        )
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON simulation spec; defaults to the 27-node FAR(1) setup.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, env = "HFTS_SEED", default_value_t = 0)]
    seed: u64,
    /// Replication index; each index draws an independent dataset.
    #[arg(long, default_value_t = 0)]
    replication: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ForecastArgs {
    #[arg(long)]
    config: PathBuf,
    /// Number of observations used; forecasts target observation n+1 [default: all].
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    method: MethodArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BacktestArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    method: MethodArgs,
    /// CSV report, one row per level and per node.
    #[arg(long)]
    out: PathBuf,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    node: String,
    /// Diagnose backtest forecast errors (actual - forecast) instead of the observed curves.
    #[arg(long)]
    errors: bool,
    #[command(flatten)]
    method: MethodArgs,
    /// Whisker fence factor.
    #[arg(long, default_value_t = 1.5)]
    fence: f64,
    /// Central-region proportions for the scale curve.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5, 0.75, 0.9, 1.0])]
    alphas: Vec<f64>,
    /// Output directory for boxplot.csv, outliergram.csv and scale_curve.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Sample size.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Grid points.
    #[arg(long, default_value_t = 100)]
    m: usize,
    #[arg(long, env = "HFTS_SEED", default_value_t = 0)]
    seed: u64,
    /// Also time a full rolling backtest of this hierarchy.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Forecast(a) => forecast(a),
        Command::Backtest(a) => backtest(a),
        Command::Diagnose(a) => diagnose(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let cat = e.category();
            eprintln!("error[{}]: {e}", cat.as_str());
            ExitCode::from(cat.exit_code() as u8)
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let spec: SimulationSpec = match &args.spec {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            serde_json::from_str(&text).map_err(|e| Error::Parse {
                path: path.clone(),
                message: e.to_string(),
            })?
        }
        None => SimulationSpec::default(),
    };
    let seed = RngSeed(args.seed).replication(args.replication);
    let ds = build_hierarchy_dataset(&spec, seed)?;
    let params = RunParams {
        seed: Some(args.seed),
        min_children: 1,
        ..RunParams::default()
    };
    let config = write_hierarchy(&args.out, &ds.data, &params)?;
    let planted = serde_json::to_string_pretty(&ds.planted).expect("planted map serializes");
    write_atomic(&args.out.join("planted.json"), planted.as_bytes())?;
    println!(
        "wrote {} node files and {}",
        ds.data.spec().len(),
        config.display()
    );
    Ok(())
}

fn load(path: &Path) -> Result<LoadedHierarchy> {
    load_hierarchy(path)
}

fn forecast(args: ForecastArgs) -> Result<()> {
    let loaded = load(&args.config)?;
    let config = args.method.resolve(&loaded.params);
    let n = args.n.unwrap_or(loaded.data.len());
    let result = hierarchical_forecast(&loaded.data, n, &config)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["node".to_string()];
    header.extend(loaded.data.grid().points().iter().map(|t| t.to_string()));
    w.write_record(&header).map_err(csv_err)?;
    for id in loaded.data.spec().ids() {
        let curve = &result.forecasts[id];
        let mut row = vec![id.clone()];
        row.extend(curve.values().iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
    write_atomic(&args.out, &bytes)?;
    println!(
        "forecast of observation {} written to {}",
        n + 1,
        args.out.display()
    );
    Ok(())
}

fn backtest(args: BacktestArgs) -> Result<()> {
    let loaded = load(&args.config)?;
    let config = args.method.resolve(&loaded.params);
    let bt = rolling_backtest(&loaded.data, &config)?;
    let report = level_report(&bt, loaded.data.spec())?;
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    write_atomic(&args.out, &buf)?;
    if let Some(json) = &args.json {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        write_atomic(json, text.as_bytes())?;
    }
    for l in &report.levels {
        println!("{:<14} MAFE {:.6}", l.label, l.mafe);
    }
    Ok(())
}

fn diagnose(args: DiagnoseArgs) -> Result<()> {
    let loaded = load(&args.config)?;
    let series = loaded.data.series(&args.node)?;
    let config = args.method.resolve(&loaded.params);
    let sample = if args.errors {
        let bt = rolling_backtest(&loaded.data, &config)?;
        FunctionalSample::new(series.grid().clone(), bt.node_errors(&args.node)?)?
    } else {
        series.as_sample().clone()
    };

    fs::create_dir_all(&args.out).map_err(|e| io_err(&args.out, e))?;
    let boxplot = functional_boxplot(&sample, config.depth, args.fence)?;
    let mut buf = Vec::new();
    boxplot.write_csv(&mut buf)?;
    write_atomic(&args.out.join("boxplot.csv"), &buf)?;

    let og = outliergram(&sample)?;
    let mut buf = Vec::new();
    og.write_csv(&mut buf)?;
    write_atomic(&args.out.join("outliergram.csv"), &buf)?;

    let sc = scale_curve(&sample, config.depth, &args.alphas)?;
    let mut buf = Vec::new();
    sc.write_csv(&mut buf)?;
    write_atomic(&args.out.join("scale_curve.csv"), &buf)?;

    println!(
        "{} curves: {} magnitude outlier(s) {:?}, {} shape outlier(s) {:?}",
        sample.len(),
        boxplot.outliers.len(),
        boxplot.outliers,
        og.flagged.len(),
        og.flagged
    );
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let grid = Grid::unit(args.m)?;
    let mut rng = RngSeed(args.seed).stream("bench");
    let rows: Vec<Vec<f64>> = (0..args.n)
        .map(|_| {
            (0..args.m)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect()
        })
        .collect();
    let sample = FunctionalSample::from_rows(grid, rows)?;

    let start = Instant::now();
    let fast = depths(&sample, DepthKind::Mbd)?;
    let fast_time = start.elapsed();
    let start = Instant::now();
    let slow = depths_oracle(&sample, DepthKind::Mbd)?;
    let slow_time = start.elapsed();
    let max_diff = fast
        .values()
        .iter()
        .zip(slow.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    println!("mbd optimized  {:>12.3} ms", fast_time.as_secs_f64() * 1e3);
    println!("mbd oracle     {:>12.3} ms", slow_time.as_secs_f64() * 1e3);
    println!(
        "speedup        {:>12.1}x",
        slow_time.as_secs_f64() / fast_time.as_secs_f64().max(1e-12)
    );
    println!("max |diff|     {max_diff:>12.3e}");

    if let Some(path) = &args.config {
        let loaded = load(path)?;
        let config = loaded.params.forecast_config();
        let start = Instant::now();
        let bt = rolling_backtest(&loaded.data, &config)?;
        println!(
            "backtest       {:>12.3} ms ({} occasions, {} nodes)",
            start.elapsed().as_secs_f64() * 1e3,
            bt.len(),
            loaded.data.spec().len()
        );
    }
    Ok(())
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Domain(format!("csv write failed: {e}"))
}
