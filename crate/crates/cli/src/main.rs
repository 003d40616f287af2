//! `railcross` command-line front end.
//!
//! Exit status: 0 on success or pass, 1 when a coverage or compliance check
//! fails, 2 on any input error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "railcross",
    version,
    about = "Grade-crossing warning antenna toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Scenario file with key=value lines
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Directory for output files
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Format for tabular output
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Synthesis resolution in degrees (at most 0.573°, i.e. 0.01 rad)
    #[arg(long, global = true, value_name = "FLOAT")]
    pub resolution_deg: Option<f64>,

    /// Intersection angle between railway and road, degrees
    #[arg(long, global = true, value_name = "FLOAT")]
    pub delta_deg: Option<f64>,

    /// Path-loss exponent(s), comma separated
    #[arg(long = "n", global = true, value_name = "LIST")]
    pub n: Option<FloatList>,

    /// Lead time(s) in seconds, comma separated
    #[arg(long = "lead-s", global = true, value_name = "LIST")]
    pub lead_s: Option<FloatList>,

    /// Pattern CSV (theta_deg,gain_dbi)
    #[arg(long, global = true, value_name = "PATH")]
    pub pattern: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stopping-distance and notification-distance tables
    Requirements {
        /// Vehicle speeds in mph; defaults to the stopping table rows
        #[arg(long, value_name = "LIST")]
        vehicle_speeds: Option<FloatList>,
    },
    /// Required azimuth envelope plus sizing metrics
    Synthesize,
    /// Smallest antenna for every (lead time, exponent) pair
    Size,
    /// Brute-force coverage check of a pattern CSV
    Verify {
        #[arg(long, default_value_t = 500)]
        train_samples: usize,
        #[arg(long, default_value_t = 500)]
        vehicle_samples: usize,
    },
    /// Uniform linear array pattern graded against the envelope
    Array {
        /// Element count; estimated from --target-dbi when omitted
        #[arg(long)]
        elements: Option<usize>,
        /// Element spacing in meters; defaults to half a wavelength
        #[arg(long)]
        spacing_m: Option<f64>,
        #[arg(long, default_value_t = 12.0, allow_negative_numbers = true)]
        element_dbi: f64,
        /// Gain the array must reach; defaults to the envelope peak
        #[arg(long, allow_negative_numbers = true)]
        target_dbi: Option<f64>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Comma-separated floats; the empty string is an empty list.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| format!("{t:?} is not a number"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(FloatList)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
