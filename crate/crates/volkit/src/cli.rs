//! Command-line pipeline orchestration with stable file outputs.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error,
//! 3 numerical failure. Every error path prints one machine-parsable line
//! to stderr (`error[usage|data|numeric]: reason`). All randomness flows
//! through `--seed` (default 42); identical invocations write byte-identical
//! files.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use crate::error::{Error, ErrorCategory, Result};
use crate::estimator::{fit, FitOptions};
use crate::forecast::{forecast_fixed, forecast_mobile};
use crate::garch::{Family, GarchModel, ParamVector};
use crate::ingest::{
    generate_fixture, load_option_chain, load_price_series, slice_window, write_price_series,
    OptionChain, PriceSeries,
};
use crate::msgarch::{fit_ms, ms_forecast};
use crate::options::{implied_vol, IvStatus, OptionKind, PricingInputs};
use crate::report;
use crate::selection::{grid_search, Convention, Criterion};
use crate::stats::{
    adf_test, arch_lm_test, describe, historical_volatility, jarque_bera, ljung_box_squared,
    log_returns, t_test_zero_mean, ReturnSeries,
};
use crate::surface::{build_temporal_surface, compute_smiles, spread_report, SurfaceConfig};

#[derive(Debug, Parser)]
#[command(
    name = "volkit",
    version,
    about = "Volatility analytics: historical, GARCH-forecast, and implied"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct PriceInput {
    /// Price series CSV (`date,price`)
    #[arg(long)]
    input: PathBuf,
    /// Window start (inclusive, YYYY-MM-DD)
    #[arg(long)]
    from: Option<NaiveDate>,
    /// Window end (inclusive, YYYY-MM-DD)
    #[arg(long)]
    to: Option<NaiveDate>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Descriptive statistics and diagnostic tests of log returns
    Stats {
        #[command(flatten)]
        prices: PriceInput,
        /// Lag order of the unit-root regression
        #[arg(long, default_value_t = 1)]
        adf_lags: usize,
        /// Lag count of the ARCH-LM regression
        #[arg(long, default_value_t = 5)]
        arch_lags: usize,
        /// Lag count of the portmanteau test on squared returns
        #[arg(long, default_value_t = 10)]
        lb_lags: usize,
        #[arg(long, default_value = "stats-report.json")]
        output: PathBuf,
    },
    /// Rolling historical volatility of log returns
    Histvol {
        #[command(flatten)]
        prices: PriceInput,
        /// Trailing window length in observations
        #[arg(long, default_value_t = 30)]
        window: usize,
        #[arg(long, default_value = "histvol.csv")]
        output: PathBuf,
    },
    /// Fit one variance model by maximum likelihood
    Fit {
        #[command(flatten)]
        prices: PriceInput,
        /// sgarch, igarch, gjr, egarch, aparch, or msgarch
        #[arg(long, default_value = "sgarch")]
        family: String,
        /// Variance (β) lags
        #[arg(short, long, default_value_t = 1)]
        p: usize,
        /// Shock (α) lags
        #[arg(short, long, default_value_t = 1)]
        q: usize,
        /// Report path (`fit-report.json`, or `msfit-report.json` for msgarch)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Grid search over families and orders with information criteria
    Select {
        #[command(flatten)]
        prices: PriceInput,
        /// Comma-separated families to scan
        #[arg(long, default_value = "sgarch,igarch,gjr,egarch,aparch")]
        families: String,
        #[arg(long, default_value_t = 3)]
        max_order: usize,
        /// Criterion naming the reported winner
        #[arg(long, default_value = "bic")]
        criterion: Criterion,
        /// raw or per-observation
        #[arg(long, default_value = "per-observation")]
        convention: Convention,
        #[arg(long, default_value = "grid-report.csv")]
        output_csv: PathBuf,
        #[arg(long, default_value = "grid-report.json")]
        output_json: PathBuf,
    },
    /// Multi-step volatility forecast from a fitted model
    Forecast {
        #[command(flatten)]
        prices: PriceInput,
        /// sgarch, igarch, gjr, egarch, aparch, or msgarch
        #[arg(long, default_value = "sgarch")]
        family: String,
        #[arg(short, long, default_value_t = 1)]
        p: usize,
        #[arg(short, long, default_value_t = 1)]
        q: usize,
        /// Forecast horizon in trading steps
        #[arg(long, default_value_t = 365)]
        horizon: usize,
        /// Mobile window: refit on pseudo-returns as the horizon advances
        #[arg(long)]
        mobile: bool,
        /// Steps between refits in mobile mode
        #[arg(long, default_value_t = 21)]
        refit_every: usize,
        /// Add a 365-day annualized column
        #[arg(long)]
        annualize: bool,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "forecast.csv")]
        output: PathBuf,
    },
    /// Invert one option quote into implied volatility
    Iv {
        #[arg(long)]
        spot: f64,
        #[arg(long)]
        strike: f64,
        /// Observed option price
        #[arg(long)]
        price: f64,
        /// Time to expiry as a year fraction
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 0.0)]
        rate: f64,
        #[arg(long, default_value = "call")]
        kind: OptionKind,
        /// Optional JSON output path (the result always prints to stdout)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Per-maturity implied-volatility smiles for one quote date
    Smiles {
        /// Option chain CSV
        #[arg(long)]
        options: PathBuf,
        /// Quote date to slice
        #[arg(long)]
        date: NaiveDate,
        /// Spot price of the underlying on that date
        #[arg(long)]
        spot: f64,
        #[arg(long, default_value_t = 0.0)]
        rate: f64,
        #[arg(long, default_value_t = 0)]
        min_open_interest: u64,
        #[arg(long, default_value = "smiles.csv")]
        output: PathBuf,
    },
    /// Bid-ask spread and open-interest report for one quote date
    Spreads {
        #[arg(long)]
        options: PathBuf,
        #[arg(long)]
        date: NaiveDate,
        #[arg(long, default_value = "spreads.csv")]
        output: PathBuf,
    },
    /// Bucketed temporal implied-volatility surface for a maturity band
    Surface {
        #[arg(long)]
        options: PathBuf,
        /// Price series supplying per-date spots
        #[arg(long)]
        prices: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        rate: f64,
        #[arg(long, default_value_t = 180)]
        maturity_days: i64,
        #[arg(long, default_value_t = 45)]
        maturity_tolerance: i64,
        #[arg(long, default_value_t = 38)]
        buckets: usize,
        #[arg(long, default_value_t = 1000.0)]
        strike_round: f64,
        #[arg(long, default_value_t = 0)]
        min_open_interest: u64,
        #[arg(long, default_value = "surface.csv")]
        output: PathBuf,
    },
    /// Generate a synthetic price fixture from a variance model
    Simulate {
        /// sgarch, igarch, gjr, egarch, or aparch
        #[arg(long, default_value = "sgarch")]
        family: Family,
        #[arg(long, default_value_t = 1e-4)]
        omega: f64,
        /// Comma-separated shock loadings (their count sets q)
        #[arg(long, default_value = "0.05", value_delimiter = ',')]
        alpha: Vec<f64>,
        /// Comma-separated variance loadings (their count sets p)
        #[arg(long, default_value = "0.9", value_delimiter = ',')]
        beta: Vec<f64>,
        /// Asymmetry loadings, one per alpha (gjr/egarch/aparch)
        #[arg(long, value_delimiter = ',')]
        gamma: Option<Vec<f64>>,
        /// Power exponent (aparch)
        #[arg(long)]
        delta: Option<f64>,
        /// Number of prices to emit
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100.0)]
        start_price: f64,
        #[arg(long, default_value = "prices.csv")]
        output: PathBuf,
    },
}

/// Run the CLI on explicit arguments and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return 0;
            }
            eprintln!("error[usage]: {}", first_line(&err.to_string()));
            return 1;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            let (label, code) = match err.category() {
                ErrorCategory::Data => ("data", 2),
                ErrorCategory::Numerical => ("numeric", 3),
            };
            eprintln!("error[{label}]: {}", first_line(&err.to_string()));
            code
        }
    }
}

fn first_line(message: &str) -> String {
    message.lines().next().unwrap_or_default().to_string()
}

fn load_windowed_prices(input: &PriceInput) -> Result<PriceSeries> {
    let file = fs::File::open(&input.input)?;
    let series = load_price_series(std::io::BufReader::new(file))?;
    match (input.from, input.to) {
        (None, None) => Ok(series),
        (from, to) => slice_window(
            &series,
            from.unwrap_or_else(|| series.first_date()),
            to.unwrap_or_else(|| series.last_date()),
        ),
    }
}

fn load_chain(path: &Path) -> Result<OptionChain> {
    let file = fs::File::open(path)?;
    load_option_chain(std::io::BufReader::new(file))
}

fn windowed_returns(input: &PriceInput) -> Result<ReturnSeries> {
    Ok(log_returns(&load_windowed_prices(input)?))
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}

enum ModelChoice {
    OneRegime(Family),
    Switching,
}

fn parse_model_choice(name: &str) -> Result<ModelChoice> {
    if name.eq_ignore_ascii_case("msgarch") {
        return Ok(ModelChoice::Switching);
    }
    name.parse::<Family>().map(ModelChoice::OneRegime).map_err(Error::InvalidSpec)
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Stats { prices, adf_lags, arch_lags, lb_lags, output } => {
            let returns = windowed_returns(&prices)?;
            let summary = describe(&returns)?;
            let tests = report::StatsTests {
                jarque_bera: jarque_bera(&returns)?,
                t_test_zero_mean: t_test_zero_mean(&returns)?,
                adf: adf_test(&returns, adf_lags)?,
                arch_lm: arch_lm_test(&returns, arch_lags)?,
                ljung_box_squared: ljung_box_squared(&returns, lb_lags)?,
            };
            write_output(&output, &report::stats_report_json(&summary, &tests))?;
            Ok(0)
        }
        Command::Histvol { prices, window, output } => {
            let returns = windowed_returns(&prices)?;
            let vol = historical_volatility(&returns, window)?;
            write_output(&output, &report::histvol_csv(&vol))?;
            Ok(0)
        }
        Command::Fit { prices, family, p, q, output } => {
            let returns = windowed_returns(&prices)?;
            match parse_model_choice(&family)? {
                ModelChoice::OneRegime(family) => {
                    let result = fit(family, p, q, &returns, &FitOptions::default())?;
                    let path = output.unwrap_or_else(|| PathBuf::from("fit-report.json"));
                    write_output(&path, &report::fit_report_json(&result))?;
                }
                ModelChoice::Switching => {
                    let result = fit_ms(&returns, &FitOptions::default())?;
                    let path = output.unwrap_or_else(|| PathBuf::from("msfit-report.json"));
                    write_output(&path, &report::msfit_report_json(&result))?;
                }
            }
            Ok(0)
        }
        Command::Select {
            prices,
            families,
            max_order,
            criterion,
            convention,
            output_csv,
            output_json,
        } => {
            let returns = windowed_returns(&prices)?;
            let families: Vec<Family> = families
                .split(',')
                .map(|name| name.trim().parse::<Family>().map_err(Error::InvalidSpec))
                .collect::<Result<_>>()?;
            let grid = grid_search(&families, &returns, max_order, convention, &FitOptions::default())?;
            write_output(&output_csv, &report::grid_report_csv(&grid))?;
            write_output(&output_json, &report::grid_report_json(&grid))?;
            let label = match criterion {
                Criterion::Aic => "aic",
                Criterion::Bic => "bic",
            };
            match grid.best(criterion) {
                Some(row) => {
                    println!("best by {label}: {} (p={}, q={})", row.family, row.p, row.q)
                }
                None => println!("best by {label}: none (no converged cell)"),
            }
            Ok(0)
        }
        Command::Forecast {
            prices,
            family,
            p,
            q,
            horizon,
            mobile,
            refit_every,
            annualize,
            seed,
            output,
        } => {
            let returns = windowed_returns(&prices)?;
            let options = FitOptions::default();
            let path = match parse_model_choice(&family)? {
                ModelChoice::OneRegime(family) => {
                    if mobile {
                        forecast_mobile(family, p, q, &returns, horizon, refit_every, seed, &options)?
                    } else {
                        let fitted = fit(family, p, q, &returns, &options)?;
                        forecast_fixed(&fitted.model, &returns, horizon, seed)?
                    }
                }
                ModelChoice::Switching => {
                    if mobile {
                        return Err(Error::InvalidSpec(
                            "mobile-window forecasting applies to one-regime families".into(),
                        ));
                    }
                    let fitted = fit_ms(&returns, &options)?;
                    ms_forecast(&fitted, horizon)?
                }
            };
            write_output(&output, &report::forecast_csv(&path, annualize))?;
            Ok(0)
        }
        Command::Iv { spot, strike, price, tau, rate, kind, output } => {
            let inputs = PricingInputs::new(spot, strike, rate, tau)?;
            let result = implied_vol(price, &inputs, kind);
            let rendered = report::iv_json(&result);
            print!("{rendered}");
            if let Some(path) = output {
                fs::write(&path, &rendered)?;
            }
            if result.status == IvStatus::Ok {
                Ok(0)
            } else {
                // Representable, but fatal for a single-quote query.
                eprintln!("error[numeric]: inversion failed with status {}", result.status);
                Ok(3)
            }
        }
        Command::Smiles { options, date, spot, rate, min_open_interest, output } => {
            let chain = load_chain(&options)?;
            let curves = compute_smiles(&chain, date, spot, rate, min_open_interest)?;
            write_output(&output, &report::smiles_csv(&curves))?;
            Ok(0)
        }
        Command::Spreads { options, date, output } => {
            let chain = load_chain(&options)?;
            let rows = spread_report(&chain, date)?;
            write_output(&output, &report::spreads_csv(&rows))?;
            Ok(0)
        }
        Command::Surface {
            options,
            prices,
            rate,
            maturity_days,
            maturity_tolerance,
            buckets,
            strike_round,
            min_open_interest,
            output,
        } => {
            let chain = load_chain(&options)?;
            let spot_file = fs::File::open(&prices)?;
            let spots: BTreeMap<NaiveDate, f64> =
                load_price_series(std::io::BufReader::new(spot_file))?.spot_map();
            let config = SurfaceConfig {
                rate,
                maturity_days,
                maturity_tolerance_days: maturity_tolerance,
                buckets,
                strike_round,
                min_open_interest,
            };
            let surface = build_temporal_surface(&chain, &spots, &config)?;
            write_output(&output, &report::surface_csv(&surface))?;
            Ok(0)
        }
        Command::Simulate {
            family,
            omega,
            alpha,
            beta,
            gamma,
            delta,
            n,
            seed,
            start_price,
            output,
        } => {
            let q = alpha.len();
            let p = beta.len();
            let params = ParamVector {
                omega,
                alpha,
                beta,
                gamma: gamma.unwrap_or_else(|| {
                    if family.has_gamma() {
                        vec![0.0; q]
                    } else {
                        Vec::new()
                    }
                }),
                delta: delta.or(if family.has_delta() { Some(2.0) } else { None }),
            };
            let model = GarchModel::new(family, p, q, params)?;
            let series = generate_fixture(&model, n, seed, start_price)?;
            let mut buffer = Vec::new();
            write_price_series(&series, &mut buffer)?;
            let contents = String::from_utf8(buffer).expect("ascii csv");
            write_output(&output, &contents)?;
            Ok(0)
        }
    }
}
