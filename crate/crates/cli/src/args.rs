use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quotient_mi::curve::MiMethod;
use quotient_mi::mutualinfo::db_to_linear;
use quotient_mi::{ChannelConfig, QuadratureSpec, Result};

#[derive(Debug, Parser)]
#[command(
    name = "quotient-mi",
    version,
    about = "Eigenvalue and mutual-information laws of the two-user MIMO MAC quotient ensemble"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-eigenvalue marginal density R1/n.
    Marginal(CurveArgs),
    /// Laws of the smallest and largest eigenvalue.
    Extremes {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, value_enum, default_value_t = ExtremeKind::MaxCdf)]
        kind: ExtremeKind,
    },
    /// Density of the mutual information I_A.
    MiPdf {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        method: MethodArgs,
    },
    /// Outage probability P(I_A < R), at one rate or on a grid.
    Outage {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        method: MethodArgs,
        /// Single target rate in bits/s/Hz (overrides the grid).
        #[arg(long = "R", short = 'R', allow_negative_numbers = true)]
        rate: Option<f64>,
    },
    /// Rate achievable at a given outage level.
    OutageRate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
        eps: f64,
    },
    /// Mean and variance of I_A.
    Moments(CommonArgs),
    /// Analytic curve against the Monte Carlo oracle on a shared grid.
    McCompare {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, value_enum, default_value_t = CompareQuantity::MiCdf)]
        quantity: CompareQuantity,
        /// Analytic route for mutual-information curves.
        #[arg(long, value_parser = parse_method)]
        method: Option<MiMethod>,
        /// Acceptance band for the sup-distance (default depends on the quantity).
        #[arg(long)]
        band: Option<f64>,
    },
    /// Outage rate over a range of user-A power ratios.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExtremeKind {
    MinSf,
    MaxCdf,
    MinPdf,
    MaxPdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompareQuantity {
    MiCdf,
    EigMinSf,
    EigMaxCdf,
    EigMarginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Receive antennas at the base station.
    #[arg(long)]
    pub n: u32,
    /// Transmit antennas of user A.
    #[arg(long = "na", default_value_t = 4)]
    pub n_a: u32,
    /// Transmit antennas of user B.
    #[arg(long = "nb", default_value_t = 5)]
    pub n_b: u32,
    #[command(flatten)]
    pub powers: PowerArgs,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Per-antenna power ratio of user A (SNR_A / nA).
    #[arg(long, conflicts_with = "a_db", allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// `a` in dB.
    #[arg(long = "a-db", allow_negative_numbers = true)]
    pub a_db: Option<f64>,
    /// Per-antenna power ratio of user B (SNR_B / nB).
    #[arg(long, conflicts_with = "b_db", allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// `b` in dB.
    #[arg(long = "b-db", allow_negative_numbers = true)]
    pub b_db: Option<f64>,
}

impl PowerArgs {
    pub fn a(&self) -> f64 {
        self.a.or(self.a_db.map(db_to_linear)).unwrap_or(1.0)
    }

    pub fn b(&self) -> f64 {
        self.b.or(self.b_db.map(db_to_linear)).unwrap_or(1.0 / 3.0)
    }
}

impl ChannelArgs {
    pub fn config(&self) -> Result<ChannelConfig> {
        ChannelConfig::new(self.n, self.n_a, self.n_b, self.powers.a(), self.powers.b())
    }
}

#[derive(Debug, Args)]
pub struct QuadratureArgs {
    /// Relative tolerance of every adaptive integral.
    #[arg(long, env = "QUOTIENT_MI_RTOL")]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance of every adaptive integral.
    #[arg(long, env = "QUOTIENT_MI_ATOL")]
    pub abs_tol: Option<f64>,
    /// Subdivision budget per integral.
    #[arg(long, env = "QUOTIENT_MI_MAX_SUBDIVISIONS")]
    pub max_subdivisions: Option<usize>,
}

impl QuadratureArgs {
    /// Applies the overrides on top of the context defaults.
    pub fn apply(&self, base: &QuadratureSpec, scale: f64) -> Result<QuadratureSpec> {
        let mut spec = base.with_tolerances(
            self.rel_tol.unwrap_or(base.rel_tol),
            self.abs_tol.unwrap_or(base.abs_tol),
        );
        if self.abs_tol.is_some() {
            spec = spec.with_exponential_tail(scale);
        }
        if let Some(m) = self.max_subdivisions {
            spec.max_subdivisions = m;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = quotient_mi::montecarlo::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = quotient_mi::montecarlo::DEFAULT_COUNT)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Explicit comma-separated abscissae.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["lo", "hi", "points"])]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct MethodArgs {
    /// direct, laplace, gaussian or mc; exact default depends on n.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<MiMethod>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Receive-antenna counts to sweep.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub ns: Vec<u32>,
    #[arg(long = "na", default_value_t = 4)]
    pub n_a: u32,
    #[arg(long = "nb", default_value_t = 5)]
    pub n_b: u32,
    #[arg(long, conflicts_with = "b_db", allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long = "b-db", allow_negative_numbers = true)]
    pub b_db: Option<f64>,
    #[arg(long = "a-db-lo", default_value_t = 0.0, allow_negative_numbers = true)]
    pub a_db_lo: f64,
    #[arg(
        long = "a-db-hi",
        default_value_t = 30.0,
        allow_negative_numbers = true
    )]
    pub a_db_hi: f64,
    #[arg(long = "a-db-step", default_value_t = 1.0)]
    pub a_db_step: f64,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub eps: f64,
    #[arg(long, value_parser = parse_method, default_value = "gaussian")]
    pub method: MiMethod,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_method(s: &str) -> std::result::Result<MiMethod, String> {
    s.parse().map_err(|e: quotient_mi::Error| e.to_string())
}
