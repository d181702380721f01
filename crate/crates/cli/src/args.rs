use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tempodisc", version, about = "Time-average intertemporal choice toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Label for one period, e.g. "year". Recorded in the output metadata.
    #[arg(long, default_value = "period", global = true)]
    pub period_length: String,

    /// Seed for sampled quantities. TEMPODISC_SEED takes precedence.
    #[arg(long, default_value_t = 1, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Choose between an early and a late payment.
    Decide(DecideArgs),
    /// Tabulate the q-exponential discount factor.
    Curve(CurveArgs),
    /// Time averages of M after n periods against 2M after n + 1.
    Reversal(ReversalArgs),
    /// Decibel contrast between early and late time averages.
    Contrast(ContrastArgs),
    /// Simulate a discounter in a lottery-prize experiment.
    Thaler(ThalerArgs),
    /// Fit discount models to observed factors or amounts.
    Fit(FitArgs),
    /// Rate dispersion across a Pareto-distributed population.
    Population(PopulationArgs),
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    #[arg(long, value_parser = positive)]
    pub wealth: f64,
    #[arg(long, value_parser = non_negative)]
    pub early_amount: f64,
    #[arg(long, value_parser = non_negative)]
    pub late_amount: f64,
    #[arg(long, value_parser = probability)]
    pub p_early: f64,
    #[arg(long, value_parser = probability)]
    pub p_late: f64,
    /// Contrasts at or below this are reported as indifferent.
    #[arg(long, value_parser = non_negative, default_value_t = 0.65)]
    pub threshold_db: f64,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_parser = q_index)]
    pub q: f64,
    #[arg(long, value_parser = non_negative)]
    pub rho: f64,
    #[arg(long, value_parser = probability, default_value_t = 1.0)]
    pub p_m: f64,
    #[arg(long, value_parser = non_negative)]
    pub n_max: f64,
    #[arg(long, value_parser = positive, default_value_t = 1.0)]
    pub step: f64,
}

#[derive(Debug, Args)]
pub struct ReversalArgs {
    /// Growth rate of the early payment, M / wealth.
    #[arg(long, value_parser = positive)]
    pub rate: f64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(2..))]
    pub n_max: u32,
    /// Size of the late payment as a multiple of the early one.
    #[arg(long, value_parser = above_one, default_value_t = 2.0)]
    pub multiple: f64,
    /// Extra periods the late payment waits.
    #[arg(long, value_parser = positive, default_value_t = 1.0)]
    pub lag: f64,
}

#[derive(Debug, Args)]
pub struct ContrastArgs {
    #[arg(long, value_parser = non_negative)]
    pub xm: f64,
    #[arg(long, value_parser = q_index, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, value_parser = probability, default_value_t = 1.0)]
    pub p_m: f64,
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u32).range(1..))]
    pub n_max: u32,
    #[arg(long, value_parser = positive, default_value_t = 0.65)]
    pub threshold_db: f64,
}

#[derive(Debug, Args)]
pub struct ThalerArgs {
    /// JSON scenario file.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with header `n,value` and an optional `kind` column
    /// (`factor` or `amount`).
    #[arg(long)]
    pub data: PathBuf,
    /// Fit a single model with q held at this value.
    #[arg(long, value_parser = q_index)]
    pub pin_q: Option<f64>,
    /// Also fit the payment probability.
    #[arg(long)]
    pub fit_pm: bool,
    /// Wealth used to convert amounts into factors.
    #[arg(long, value_parser = positive)]
    pub wealth: Option<f64>,
    /// Prize paid at n = 0, for amount rows.
    #[arg(long, value_parser = non_negative, default_value_t = 0.0)]
    pub m0: f64,
    /// Minimise squared log residuals instead of raw residuals.
    #[arg(long)]
    pub log_space: bool,
}

#[derive(Debug, Args)]
pub struct PopulationArgs {
    #[arg(long, value_parser = above_one)]
    pub exponent: f64,
    #[arg(long, value_parser = positive)]
    pub wmin: f64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub size: u64,
    #[arg(long, value_parser = non_negative, default_value_t = 0.0)]
    pub m0: f64,
    #[arg(long, value_parser = non_negative)]
    pub m: f64,
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v)
}

fn finite(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if !v.is_finite() {
        return Err("must be finite".into());
    }
    Ok(v)
}

fn positive(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v <= 0.0 {
        return Err(format!("must be > 0, got {v}"));
    }
    Ok(v)
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v < 0.0 {
        return Err(format!("must be >= 0, got {v}"));
    }
    Ok(v)
}

fn probability(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("must lie in [0, 1], got {v}"));
    }
    Ok(v)
}

fn q_index(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v < 1.0 {
        return Err(format!("must be >= 1, got {v}"));
    }
    Ok(v)
}

/// Greater than one; `inf` is accepted.
fn above_one(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v <= 1.0 {
        return Err(format!("must be > 1, got {v}"));
    }
    Ok(v)
}
