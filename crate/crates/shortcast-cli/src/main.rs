//! Command-line front end: load CSV exports from a directory, forecast
//! shortages for one area, backtest the pipeline, or run the statistical
//! self-checks.
//!
//! Exit codes: 0 success; 1 a self-check property failed; 2 unusable
//! invocation (unknown area, no product file, bad split year, unwritable
//! output); 3 data was read but not a single product could be modeled.

use std::fmt::Display;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shortcast::evaluation::{backtest_all, BacktestReport, DEFAULT_TRAIN_END_YEAR};
use shortcast::ingest::{self, ColumnKind, SeriesTable, TaggedRecords};
use shortcast::selftest::{run_all, SelftestConfig};
use shortcast::shortage::{rank_shortages, trend_series, ShortageEntry};
use shortcast::var::{
    fit_all_products, forecast, Forecast, PipelineOptions, ProductFit, DEFAULT_VAR_LAG,
};
use shortcast::{Error, Warning};

#[derive(Parser)]
#[command(
    name = "shortcast",
    version,
    about = "Forecast agricultural shortages from emission and production series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit models and write a ranked shortage report.
    Forecast(ForecastArgs),
    /// Hold out recent years and score the pipeline against them.
    Evaluate(EvaluateArgs),
    /// Run the seeded Monte Carlo self-checks.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Area (e.g. a country) whose records are used, case-insensitive.
    #[arg(long)]
    area: String,
    /// Directory holding emissions.csv / production.csv / forestry.csv.
    #[arg(long, value_name = "DIR")]
    data_dir: PathBuf,
    /// Requested autoregression order (reduced automatically when the
    /// sample is too small).
    #[arg(long, default_value_t = DEFAULT_VAR_LAG)]
    lag: usize,
    /// Exclude emissions that fail the predictive gate instead of only
    /// reporting the scan.
    #[arg(long)]
    granger_filter: bool,
    /// Output directory, created if absent.
    #[arg(long, default_value = "out", value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct ForecastArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Years to forecast past the end of the data.
    #[arg(long, default_value_t = 10)]
    horizon: usize,
    /// Maximum number of flagged products in the report.
    #[arg(long, default_value_t = 5)]
    top_k: usize,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Last training year; later rows are held out and scored.
    #[arg(long, default_value_t = DEFAULT_TRAIN_END_YEAR)]
    train_end: i32,
}

#[derive(Args)]
struct SelftestArgs {
    /// Master seed for the simulations.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Simulated datasets per property.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Length of each simulated series.
    #[arg(long, default_value_t = 200)]
    series_len: usize,
}

/// Stderr verbosity, from the `SHORTCAST_LOG` environment variable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum LogLevel {
    Quiet,
    Info,
    Debug,
}

struct Logger {
    level: LogLevel,
}

impl Logger {
    fn from_env() -> Logger {
        let level = match std::env::var("SHORTCAST_LOG").ok().as_deref() {
            Some("quiet") => LogLevel::Quiet,
            Some("debug") => LogLevel::Debug,
            None | Some("info") => LogLevel::Info,
            Some(other) => {
                eprintln!("warning: unknown SHORTCAST_LOG level `{other}`, using info");
                LogLevel::Info
            }
        };
        Logger { level }
    }

    fn info(&self, msg: impl Display) {
        if self.level >= LogLevel::Info {
            eprintln!("{msg}");
        }
    }

    fn debug(&self, msg: impl Display) {
        if self.level >= LogLevel::Debug {
            eprintln!("{msg}");
        }
    }
}

/// A command failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    /// Exit 2: the invocation cannot be satisfied as given.
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    /// Exit 3: inputs were readable but yielded nothing to report.
    fn no_products(message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let logger = Logger::from_env();
    let result = match cli.command {
        Command::Forecast(args) => cmd_forecast(&args, &logger),
        Command::Evaluate(args) => cmd_evaluate(&args, &logger),
        Command::Selftest(args) => cmd_selftest(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

// ---------------------------------------------------------------------------
// Data loading
// ---------------------------------------------------------------------------

const DATA_FILES: [(&str, ColumnKind); 3] = [
    ("emissions.csv", ColumnKind::Emission),
    ("production.csv", ColumnKind::Production),
    ("forestry.csv", ColumnKind::Forestry),
];

struct LoadedData {
    table: SeriesTable,
    warnings: Vec<Warning>,
}

/// Reads whichever of the three known files exist, filters to one area,
/// prunes derivable records, and pivots everything into one year table.
fn load_table(data_dir: &Path, area: &str, logger: &Logger) -> Result<LoadedData, Failure> {
    if !data_dir.is_dir() {
        return Err(Failure::usage(format!(
            "data directory {} does not exist",
            data_dir.display()
        )));
    }
    let mut groups = Vec::new();
    let mut warnings = Vec::new();
    let mut area_found = false;
    let mut product_file_present = false;

    for (file, kind) in DATA_FILES {
        let path = data_dir.join(file);
        if !path.exists() {
            logger.debug(format!("{}: not present, skipped", path.display()));
            continue;
        }
        if kind != ColumnKind::Emission {
            product_file_present = true;
        }
        let reader = File::open(&path)
            .map_err(|e| Failure::usage(format!("cannot open {}: {e}", path.display())))?;
        let parsed = ingest::parse_csv(reader)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        logger.debug(format!(
            "{file}: {} records read ({} rows skipped, {} values unreadable)",
            parsed.records.len(),
            parsed.skipped_rows,
            parsed.malformed_values
        ));
        if parsed.skipped_rows > 0 || parsed.malformed_values > 0 {
            warnings.push(Warning::new(
                "ingest",
                file,
                format!(
                    "{} rows skipped, {} values unreadable",
                    parsed.skipped_rows, parsed.malformed_values
                ),
                "the remaining records are unaffected",
            ));
        }
        match ingest::drop_unwanted_features(&parsed.records, area) {
            Ok(records) => {
                area_found = true;
                let outcome = ingest::drop_redundant_records(&records);
                warnings.extend(outcome.warnings);
                logger.debug(format!(
                    "{file}: {} records for {area} after redundancy pruning",
                    outcome.records.len()
                ));
                groups.push(TaggedRecords {
                    kind,
                    records: outcome.records,
                });
            }
            Err(Error::AreaNotFound(_)) => {
                logger.debug(format!("{file}: no records for area {area}"));
            }
            Err(e) => return Err(Failure::usage(format!("{file}: {e}"))),
        }
    }

    if !product_file_present {
        return Err(Failure::usage(format!(
            "no product data: neither production.csv nor forestry.csv exists in {}",
            data_dir.display()
        )));
    }
    if !area_found {
        return Err(Failure::usage(format!(
            "area `{area}` does not appear in any input file"
        )));
    }

    let pivoted = ingest::pivot(&groups)
        .map_err(|e| Failure::usage(format!("building the year table: {e}")))?;
    let table = ingest::scrape_nan_columns(&pivoted)
        .map_err(|e| Failure::usage(format!("removing gap columns: {e}")))?;
    for dropped in pivoted.columns.iter().filter(|c| table.column(&c.name).is_none()) {
        warnings.push(Warning::new(
            "ingest",
            dropped.name.clone(),
            "column dropped: the series has gaps inside the year span",
            "fill or trim the source data to a contiguous span of years",
        ));
    }
    logger.debug(format!(
        "table: {} years x {} columns after gap removal",
        table.n_rows(),
        table.n_cols()
    ));
    Ok(LoadedData { table, warnings })
}

fn pipeline_options(data: &DataArgs) -> Result<PipelineOptions, Failure> {
    if data.lag == 0 {
        return Err(Failure::usage("--lag must be at least 1"));
    }
    Ok(PipelineOptions {
        lag: data.lag,
        granger_filter: data.granger_filter,
        ..PipelineOptions::default()
    })
}

// ---------------------------------------------------------------------------
// forecast
// ---------------------------------------------------------------------------

fn cmd_forecast(args: &ForecastArgs, logger: &Logger) -> Result<(), Failure> {
    if args.horizon == 0 {
        return Err(Failure::usage("--horizon must be at least 1"));
    }
    let LoadedData { table, mut warnings } = load_table(&args.data.data_dir, &args.data.area, logger)?;
    let opts = pipeline_options(&args.data)?;

    let report = fit_all_products(&table, &opts);
    warnings.extend(report.warnings.iter().cloned());

    let fits: Vec<&ProductFit> = report.successes().collect();
    let mut forecasts: Vec<(String, Forecast)> = Vec::new();
    for fit in &fits {
        let fc = forecast(&fit.model, args.horizon);
        if fc.clamped {
            warnings.push(Warning::new(
                "var",
                fit.product.clone(),
                "forecast hit the saturation guard; values at this horizon are not meaningful",
                "the fitted recursion is unstable, see the spectral radius in diagnostics",
            ));
        }
        forecasts.push((fit.product.clone(), fc));
    }

    create_out_dir(&args.data.out)?;
    let diagnostics = render_fit_diagnostics(&table, &report.outcomes, &warnings, None);
    write_text(&args.data.out.join("diagnostics.txt"), &diagnostics)?;

    if fits.is_empty() {
        return Err(Failure::no_products(
            "no product could be modeled; see diagnostics.txt for per-product reasons",
        ));
    }

    let entries = rank_shortages(&forecasts, &table, args.top_k)
        .map_err(|e| Failure::usage(format!("ranking shortages: {e}")))?;
    write_shortage_report(&args.data.out.join("shortage_report.csv"), &entries)?;

    for (product, fc) in &forecasts {
        let trend = trend_series(&table, product, fc)
            .map_err(|e| Failure::usage(format!("building trend for {product}: {e}")))?;
        let path = args
            .data
            .out
            .join(format!("trend_{}.csv", sanitize_filename(product)));
        let mut wtr = csv_writer(&path)?;
        write_row(&mut wtr, &path, ["year", "observed", "projected"])?;
        for (i, year) in trend.years.iter().enumerate() {
            write_row(
                &mut wtr,
                &path,
                [
                    year.to_string(),
                    opt_to_string(trend.observed[i]),
                    opt_to_string(trend.projected[i]),
                ],
            )?;
        }
        finish_writer(wtr, &path)?;
    }

    print_shortage_table(&entries, args.top_k);
    logger.info(format!(
        "modeled {} of {} products; {} flagged; outputs in {}",
        fits.len(),
        report.outcomes.len(),
        entries.len(),
        args.data.out.display()
    ));
    Ok(())
}

fn print_shortage_table(entries: &[ShortageEntry], top_k: usize) {
    println!("flagged products (top {top_k}):");
    if entries.is_empty() {
        println!("  (none)");
        return;
    }
    let name_width = entries
        .iter()
        .map(|e| e.product.len())
        .max()
        .unwrap_or(0)
        .max("product".len());
    println!(
        "  {:<name_width$}  {:>16}  {:>16}  {:>16}",
        "product", "recent_forecast", "historical_mean", "deviation"
    );
    for e in entries {
        println!(
            "  {:<name_width$}  {:>16.3}  {:>16.3}  {:>16.3}",
            e.product, e.recent_forecast, e.historical_mean, e.deviation
        );
    }
}

fn write_shortage_report(path: &Path, entries: &[ShortageEntry]) -> Result<(), Failure> {
    let mut wtr = csv_writer(path)?;
    write_row(
        &mut wtr,
        path,
        ["product", "recent_forecast", "historical_mean", "deviation"],
    )?;
    for e in entries {
        write_row(
            &mut wtr,
            path,
            [
                e.product.clone(),
                e.recent_forecast.to_string(),
                e.historical_mean.to_string(),
                e.deviation.to_string(),
            ],
        )?;
    }
    finish_writer(wtr, path)
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

fn cmd_evaluate(args: &EvaluateArgs, logger: &Logger) -> Result<(), Failure> {
    let LoadedData { table, mut warnings } = load_table(&args.data.data_dir, &args.data.area, logger)?;
    let opts = pipeline_options(&args.data)?;

    let report = backtest_all(&table, args.train_end, &opts).map_err(|e| match e {
        Error::DegenerateSplit {
            train_rows,
            test_rows,
        } => Failure::usage(format!(
            "--train-end {} leaves {train_rows} training and {test_rows} held-out rows; \
             both sides need at least one",
            args.train_end
        )),
        other => Failure::usage(format!("splitting the table: {other}")),
    })?;
    warnings.extend(report.warnings.iter().cloned());

    create_out_dir(&args.data.out)?;
    let fit_outcomes: Vec<(String, Result<&ProductFit, &Error>)> = report
        .outcomes
        .iter()
        .map(|o| {
            (
                o.product.clone(),
                o.result.as_ref().map(|r| &r.fit),
            )
        })
        .collect();
    let diagnostics = render_eval_diagnostics(
        &table,
        &fit_outcomes,
        &warnings,
        report.train_rows,
        report.test_rows,
    );
    write_text(&args.data.out.join("diagnostics.txt"), &diagnostics)?;

    let successes: Vec<&BacktestReport> = report
        .outcomes
        .iter()
        .filter_map(|o| o.result.as_ref().ok())
        .collect();
    if successes.is_empty() {
        return Err(Failure::no_products(
            "no product could be backtested; see diagnostics.txt for per-product reasons",
        ));
    }

    let metrics_path = args.data.out.join("metrics.csv");
    let mut wtr = csv_writer(&metrics_path)?;
    write_row(&mut wtr, &metrics_path, ["product", "space", "mae", "mse", "rmse"])?;
    for bt in &successes {
        for row in &bt.metrics {
            write_row(
                &mut wtr,
                &metrics_path,
                [
                    row.product.clone(),
                    row.space.as_str().to_string(),
                    row.mae.to_string(),
                    row.mse.to_string(),
                    row.rmse.to_string(),
                ],
            )?;
        }
    }
    finish_writer(wtr, &metrics_path)?;

    for bt in &successes {
        let path = args
            .data
            .out
            .join(format!("eval_trend_{}.csv", sanitize_filename(&bt.product)));
        let mut wtr = csv_writer(&path)?;
        write_row(&mut wtr, &path, ["year", "actual", "predicted"])?;
        for (i, year) in bt.trend.years.iter().enumerate() {
            write_row(
                &mut wtr,
                &path,
                [
                    year.to_string(),
                    bt.trend.actual[i].to_string(),
                    opt_to_string(bt.trend.predicted[i]),
                ],
            )?;
        }
        finish_writer(wtr, &path)?;
    }

    print_metrics_table(&successes, report.train_rows, report.test_rows);
    logger.info(format!(
        "backtested {} of {} products; outputs in {}",
        successes.len(),
        report.outcomes.len(),
        args.data.out.display()
    ));
    Ok(())
}

fn print_metrics_table(reports: &[&BacktestReport], train_rows: usize, test_rows: usize) {
    println!("backtest metrics ({train_rows} training rows, {test_rows} held-out rows):");
    let name_width = reports
        .iter()
        .map(|r| r.product.len())
        .max()
        .unwrap_or(0)
        .max("product".len());
    println!(
        "  {:<name_width$}  {:<11}  {:>12}  {:>12}  {:>12}",
        "product", "space", "mae", "mse", "rmse"
    );
    for bt in reports {
        for row in &bt.metrics {
            println!(
                "  {:<name_width$}  {:<11}  {:>12.4}  {:>12.4}  {:>12.4}",
                row.product,
                row.space.as_str(),
                row.mae,
                row.mse,
                row.rmse
            );
        }
    }
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

fn cmd_selftest(args: &SelftestArgs) -> Result<(), Failure> {
    let config = SelftestConfig {
        seed: args.seed,
        trials: args.trials,
        series_len: args.series_len,
    };
    println!(
        "selftest: seed={} trials={} series-len={}",
        config.seed, config.trials, config.series_len
    );
    let mut failed = 0usize;
    let reports = run_all(&config);
    for report in &reports {
        let verdict = if report.skipped {
            "SKIP"
        } else if report.passed {
            "PASS"
        } else {
            failed += 1;
            "FAIL"
        };
        println!("{verdict} {}: {}", report.name, report.detail);
    }
    if failed > 0 {
        Err(Failure {
            code: 1,
            message: format!("{failed} of {} properties failed", reports.len()),
        })
    } else {
        println!("result: ok ({} properties)", reports.len());
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Diagnostics rendering
// ---------------------------------------------------------------------------

fn render_fit_diagnostics(
    table: &SeriesTable,
    outcomes: &[shortcast::var::ProductOutcome],
    warnings: &[Warning],
    split: Option<(usize, usize)>,
) -> String {
    let pairs: Vec<(String, Result<&ProductFit, &Error>)> = outcomes
        .iter()
        .map(|o| (o.product.clone(), o.result.as_ref()))
        .collect();
    render_diagnostics_inner(table, &pairs, warnings, split)
}

fn render_eval_diagnostics(
    table: &SeriesTable,
    outcomes: &[(String, Result<&ProductFit, &Error>)],
    warnings: &[Warning],
    train_rows: usize,
    test_rows: usize,
) -> String {
    render_diagnostics_inner(table, outcomes, warnings, Some((train_rows, test_rows)))
}

fn render_diagnostics_inner(
    table: &SeriesTable,
    outcomes: &[(String, Result<&ProductFit, &Error>)],
    warnings: &[Warning],
    split: Option<(usize, usize)>,
) -> String {
    let mut out = String::new();
    let emissions = table.emission_columns().count();
    let products = table.product_columns().count();
    out.push_str(&format!(
        "table: {} years ({}..{}), {} columns ({emissions} emission, {products} product)\n",
        table.n_rows(),
        table.years.first().copied().unwrap_or(0),
        table.years.last().copied().unwrap_or(0),
        table.n_cols(),
    ));
    if let Some((train_rows, test_rows)) = split {
        out.push_str(&format!(
            "split: {train_rows} training rows, {test_rows} held-out rows\n"
        ));
    }

    for (product, outcome) in outcomes {
        out.push_str(&format!("\n== {product} ==\n"));
        match outcome {
            Ok(fit) => {
                out.push_str("status: modeled\n");
                out.push_str(&format!("lag used: {}\n", fit.model.lag));
                out.push_str(&format!(
                    "deterministic continuation: {}\n",
                    if fit.degenerate { "yes" } else { "no" }
                ));
                out.push_str("model columns:\n");
                for (i, name) in fit.model.variables.iter().enumerate() {
                    let meta = &fit.model.diff_meta[i];
                    out.push_str(&format!(
                        "  {name}: differencing order {}{}\n",
                        meta.order,
                        if meta.achieved_stationarity {
                            ""
                        } else {
                            " (still non-stationary at the cap)"
                        }
                    ));
                }
                if fit.dropped_columns.is_empty() {
                    out.push_str("dropped columns: (none)\n");
                } else {
                    out.push_str(&format!(
                        "dropped columns: {}\n",
                        fit.dropped_columns.join(", ")
                    ));
                }
                if !fit.degenerate {
                    out.push_str(&format!(
                        "spectral radius: {:.4}{}\n",
                        fit.model.spectral.value,
                        if fit.model.spectral.converged {
                            ""
                        } else {
                            " (estimate did not converge)"
                        }
                    ));
                }
                match (&fit.granger, &fit.gated_predictors) {
                    (Some(matrix), Some(gate)) => {
                        out.push_str("predictive scan (min p-value over lags):\n");
                        out.push_str(&matrix.render_table());
                        if gate.is_empty() {
                            out.push_str("gate: no emission cleared the threshold\n");
                        } else {
                            out.push_str(&format!("gate: {}\n", gate.join(", ")));
                        }
                    }
                    _ => {
                        out.push_str("predictive scan: not run\n");
                    }
                }
            }
            Err(e) => {
                out.push_str(&format!("status: not modeled ({e})\n"));
            }
        }
    }

    out.push_str("\nwarnings:\n");
    if warnings.is_empty() {
        out.push_str("  (none)\n");
    } else {
        for w in warnings {
            out.push_str(&format!("  {w}\n"));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

/// Maps a column name to a safe file stem: every non-alphanumeric byte
/// becomes `_`.
fn sanitize_filename(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn opt_to_string(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn create_out_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))
}

fn write_text(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, Failure> {
    csv::Writer::from_path(path)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn write_row<I, T>(wtr: &mut csv::Writer<File>, path: &Path, row: I) -> Result<(), Failure>
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    wtr.write_record(row)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn finish_writer(wtr: csv::Writer<File>, path: &Path) -> Result<(), Failure> {
    wtr.into_inner()
        .map_err(|e| Failure::usage(format!("cannot flush {}: {e}", path.display())))?
        .sync_all()
        .ok();
    Ok(())
}
