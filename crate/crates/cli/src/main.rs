//! Command-line pipeline: ingest -> distances -> flows -> tests -> report.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cultmig::analysis::report::{build_report, format_p, write_report};
use cultmig::analysis::{Analysis, Direction};
use cultmig::country::CountryCode;
use cultmig::culture::default_overrides;
use cultmig::ingest::worldbank::{fetch_population, write_population_csv, DEFAULT_BASE_URL};
use cultmig::ingest::{resolve_data_dir, validate_corpus, Corpus, IngestError};

use config::{parse_threshold_mode, RunConfig};

#[derive(Parser)]
#[command(name = "cultmig", version, about = "Cultural distance and migration analysis pipeline")]
struct Cli {
    /// Directory with the input tables (falls back to $CULTMIG_DATA_DIR,
    /// then ./data)
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    /// key = value configuration file; command-line flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for report files
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Proximity threshold source
    #[arg(long, global = true, value_name = "recompute|paper")]
    thresholds: Option<String>,
    /// Stock-to-flow estimator
    #[arg(long, global = true, value_name = "positive-diff|signed-diff")]
    flow_estimator: Option<String>,
    /// Disable the sparse-group rule (merge of the mid group into a sparse
    /// extreme before testing)
    #[arg(long, global = true)]
    no_sparse_rule: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write every table and figure dataset
    Reproduce,
    /// Print distances and proximity class for one country pair
    Pair { country_a: String, country_b: String },
    /// Run one per-country test battery
    Test(TestArgs),
    /// Fetch population series from the World Bank API into a local cache
    FetchPopulation {
        /// Countries to fetch (defaults to the whole corpus)
        codes: Vec<String>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Override the API endpoint (useful against a local stub)
        #[arg(long, default_value = DEFAULT_BASE_URL)]
        base_url: String,
    },
    /// Load and validate the corpus, printing the observation counts
    Validate,
}

#[derive(Args)]
struct TestArgs {
    /// Host (destination) country for immigration / geotrend batteries
    #[arg(long, conflicts_with = "origin")]
    host: Option<String>,
    /// Origin country for the emigration battery
    #[arg(long)]
    origin: Option<String>,
    #[arg(value_enum)]
    battery: Battery,
}

#[derive(Clone, Copy, ValueEnum)]
enum Battery {
    Immigration,
    Emigration,
    Geotrend,
}

/// Failures that indicate bad input data or arguments (exit 2) as opposed to
/// I/O problems (exit 3).
#[derive(Debug)]
enum CliFailure {
    Validation(String),
    Io(String),
}

impl std::fmt::Display for CliFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliFailure::Validation(m) | CliFailure::Io(m) => f.write_str(m),
        }
    }
}

fn classify(err: anyhow::Error) -> CliFailure {
    for cause in err.chain() {
        if let Some(ingest) = cause.downcast_ref::<IngestError>() {
            return match ingest {
                IngestError::Io { .. } => CliFailure::Io(format!("{err:#}")),
                _ => CliFailure::Validation(format!("{err:#}")),
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return CliFailure::Io(format!("{err:#}"));
        }
    }
    CliFailure::Validation(format!("{err:#}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            match failure {
                CliFailure::Validation(_) => ExitCode::from(2),
                CliFailure::Io(_) => ExitCode::from(3),
            }
        }
    }
}

fn run(cli: Cli) -> std::result::Result<(), CliFailure> {
    let mut config = RunConfig::default();
    if let Some(path) = &cli.config {
        config.load_file(path).map_err(classify)?;
    }
    if let Some(dir) = &cli.data_dir {
        config.data_dir = Some(dir.clone());
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Some(mode) = &cli.thresholds {
        config.threshold_mode = parse_threshold_mode(mode).map_err(classify)?;
    }
    if let Some(est) = &cli.flow_estimator {
        config.estimator = est
            .parse()
            .map_err(|e: String| CliFailure::Validation(e))?;
    }
    if cli.no_sparse_rule {
        config.sparse_rule = false;
    }
    dispatch(cli.command, config).map_err(classify)
}

fn load_corpus(config: &RunConfig) -> Result<Corpus> {
    let dir = resolve_data_dir(config.data_dir.as_deref());
    let (corpus, diagnostics) = Corpus::load(&dir, &default_overrides())?;
    for line in &diagnostics.excluded_profiles {
        eprintln!("note: excluded profile {line}");
    }
    if diagnostics.dropped_stock_rows > 0 {
        eprintln!(
            "note: dropped {} stock rows for countries outside the corpus",
            diagnostics.dropped_stock_rows
        );
    }
    Ok(corpus)
}

fn parse_code(raw: &str) -> Result<CountryCode> {
    raw.parse::<CountryCode>().map_err(|e| anyhow!(e))
}

fn dispatch(command: Command, config: RunConfig) -> Result<()> {
    match command {
        Command::Reproduce => cmd_reproduce(&config),
        Command::Pair { country_a, country_b } => cmd_pair(&config, &country_a, &country_b),
        Command::Test(args) => cmd_test(&config, args),
        Command::FetchPopulation {
            codes,
            cache_dir,
            base_url,
        } => cmd_fetch_population(&config, codes, cache_dir, &base_url),
        Command::Validate => cmd_validate(&config),
    }
}

fn cmd_reproduce(config: &RunConfig) -> Result<()> {
    let corpus = load_corpus(config)?;
    validate_corpus(&corpus, true)?;
    let analysis = Analysis::run(&corpus, config.analysis_config())?;
    let report = build_report(&analysis)?;
    write_report(&config.out_dir, &report, &analysis.flows)
        .with_context(|| format!("writing report to {}", config.out_dir.display()))?;

    let g = &report.grand_medians;
    println!(
        "countries={} oecd={} pairs={} universe={}",
        report.counts.countries,
        report.counts.oecd_members,
        report.counts.total_flow_pairs,
        report.counts.analysis_pair_universe,
    );
    println!(
        "thresholds close_max={:.2} distant_min={:.2}",
        report.thresholds.close_max, report.thresholds.distant_min
    );
    println!(
        "grand_median_inflow={:.2} (close={:.2} mid={:.2} distant={:.2})",
        g.inflow_grand, g.inflow_close, g.inflow_mid, g.inflow_distant
    );
    println!(
        "grand_median_outflow={:.2} (close={:.2} mid={:.2} distant={:.2})",
        g.outflow_grand, g.outflow_close, g.outflow_mid, g.outflow_distant
    );
    println!(
        "grand_median_geodesic_km={:.0} (close={:.0} mid={:.0} distant={:.0})",
        g.geodesic_grand_km, g.geodesic_close_km, g.geodesic_mid_km, g.geodesic_distant_km
    );
    println!("report written to {}", config.out_dir.display());
    Ok(())
}

fn cmd_pair(config: &RunConfig, a: &str, b: &str) -> Result<()> {
    let corpus = load_corpus(config)?;
    let a = parse_code(a)?;
    let b = parse_code(b)?;
    for code in [a, b] {
        if !corpus.profiles.contains_key(&code) {
            bail!("unknown country {code}");
        }
    }
    let analysis = Analysis::run(&corpus, config.analysis_config())?;
    let m = analysis.pairs.metrics(a, b);
    println!(
        "CD={:.2} GD={:.0}km class={}",
        m.cd,
        m.gd_km,
        match m.proximity {
            cultmig::analysis::ProximityClass::Close => "close",
            cultmig::analysis::ProximityClass::MidDistant => "mid-distant",
            cultmig::analysis::ProximityClass::Distant => "distant",
        }
    );
    Ok(())
}

fn cmd_test(config: &RunConfig, args: TestArgs) -> Result<()> {
    let corpus = load_corpus(config)?;
    let analysis = Analysis::run(&corpus, config.analysis_config())?;

    let result = match args.battery {
        Battery::Immigration | Battery::Geotrend => {
            let host = parse_code(
                args.host
                    .as_deref()
                    .ok_or_else(|| anyhow!("this battery needs --host"))?,
            )?;
            if !corpus.oecd_members.contains(&host) {
                bail!("host {host} is not an OECD member");
            }
            match args.battery {
                Battery::Immigration => analysis.immigration_bias_test(host)?,
                _ => analysis.geodesic_trend_test(host)?,
            }
        }
        Battery::Emigration => {
            let origin = parse_code(
                args.origin
                    .as_deref()
                    .ok_or_else(|| anyhow!("the emigration battery needs --origin"))?,
            )?;
            if !corpus.profiles.contains_key(&origin) {
                bail!("unknown country {origin}");
            }
            analysis.emigration_bias_test(origin)?
        }
    };

    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
    println!(
        "medians close={} mid={} distant={}",
        fmt(result.medians.close),
        fmt(result.medians.mid),
        fmt(result.medians.distant)
    );
    match &result.test {
        Some(t) => println!(
            "U={:.1} p={} direction={} significance={}",
            t.statistic,
            format_p(t.p_value),
            direction_label(result.direction, matches!(args.battery, Battery::Geotrend)),
            t.significance.as_str(),
        ),
        None => println!(
            "direction={} (no test: an extreme group was empty)",
            result.direction.as_str()
        ),
    }
    if let Some(merge) = result.sparse_rule_applied {
        println!("sparse rule applied: {merge:?}");
    }
    Ok(())
}

/// The geotrend battery reads more naturally as a trend of geodesic distance
/// in cultural distance.
fn direction_label(direction: Direction, geotrend: bool) -> &'static str {
    if geotrend {
        match direction {
            Direction::TowardDistant => "increasing",
            Direction::TowardClose => "decreasing",
            Direction::None => "none",
            Direction::NoTest => "no_test",
        }
    } else {
        direction.as_str()
    }
}

fn cmd_fetch_population(
    config: &RunConfig,
    codes: Vec<String>,
    cache_dir: Option<PathBuf>,
    base_url: &str,
) -> Result<()> {
    let codes: Vec<CountryCode> = if codes.is_empty() {
        let corpus = load_corpus(config)?;
        corpus.countries().collect()
    } else {
        codes
            .iter()
            .map(|c| parse_code(c))
            .collect::<Result<Vec<_>>>()?
    };
    let cache = cache_dir.unwrap_or_else(|| {
        resolve_data_dir(config.data_dir.as_deref()).join("worldbank_cache")
    });
    let series = fetch_population(&codes, &cache, base_url)?;
    std::fs::create_dir_all(&config.out_dir)?;
    let out_path = config.out_dir.join("population_fetched.csv");
    write_population_csv(&out_path, &series)?;
    println!(
        "fetched {} series ({} years total) -> {}",
        series.len(),
        series.values().map(|s| s.by_year.len()).sum::<usize>(),
        out_path.display()
    );
    Ok(())
}

fn cmd_validate(config: &RunConfig) -> Result<()> {
    let corpus = load_corpus(config)?;
    let stats = validate_corpus(&corpus, true)?;
    println!(
        "countries={} oecd={} non_oecd={}",
        stats.countries, stats.oecd_members, stats.non_oecd
    );
    println!(
        "flow pairs: non_oecd->oecd={} oecd->oecd={} total={}",
        stats.non_oecd_to_oecd_pairs, stats.oecd_to_oecd_pairs, stats.total_flow_pairs
    );
    println!("distance pair universe={}", stats.analysis_pair_universe);
    Ok(())
}
