//! `mk`: compute Macdonald–Koornwinder polynomials, Gram residuals and ground
//! states, and run the rank-one quantum symmetric pair checks.
//!
//! Exit status: 0 when every check passes, 1 on a failed check or a
//! computation error (the report carries an `error` object), 2 on bad flags.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use report::{Failure, Report};

#[derive(Parser, Debug)]
#[command(name = "mk", version, about = "Macdonald-Koornwinder polynomials and rank-one spherical function checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    /// Only for `gram`.
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    F64,
    Hp,
    /// Rational arithmetic; only for `rosengren`.
    Exact,
}

#[derive(Args, Debug, Clone)]
pub struct NumericArgs {
    /// Points per circle of the quadrature grid; overrides --auto-grid.
    #[arg(long)]
    pub grid: Option<usize>,

    /// Choose the grid by doubling until the Gram matrix settles (default when --grid is absent).
    #[arg(long)]
    pub auto_grid: bool,

    /// Relative Gram change that stops --auto-grid.
    #[arg(long, default_value_t = commands::DEFAULT_GRID_TOL)]
    pub grid_tol: f64,

    /// Tail tolerance for truncated infinite q-products.
    #[arg(long)]
    pub trunc_eps: Option<f64>,

    /// Maximum number of factors in a truncated q-product.
    #[arg(long)]
    pub max_terms: Option<usize>,

    #[arg(long, value_enum, default_value_t = Precision::F64)]
    pub precision: Precision,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The monic polynomial P_λ.
    Compute {
        #[arg(long)]
        n: usize,
        /// Comma-separated partition, e.g. "2,1".
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// a,b,c,d,t,q
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[command(flatten)]
        numeric: NumericArgs,
    },
    /// Normalized orthogonality residuals of all P_λ with |λ| ≤ max-deg.
    Gram {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_deg: i64,
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        /// Largest admissible off-diagonal residual.
        #[arg(long, default_value_t = commands::DEFAULT_GRAM_THRESHOLD)]
        threshold: f64,
        #[command(flatten)]
        numeric: NumericArgs,
    },
    /// Closed-form restricted ground state and the matching Koornwinder parameters.
    Groundstate {
        /// n,κ1,κ2,κ,σ,τ,q
        #[arg(long, allow_hyphen_values = true)]
        labels: String,
        #[command(flatten)]
        numeric: NumericArgs,
    },
    /// Rank-one check: restricted spherical functions against P_μ.
    AwVerify {
        #[arg(long)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long)]
        k1: i64,
        #[arg(long, allow_hyphen_values = true)]
        k2: i64,
        #[arg(long, default_value_t = 0)]
        k: i64,
        #[arg(long)]
        max_mu: usize,
        #[arg(long, default_value_t = commands::DEFAULT_AW_THRESHOLD)]
        threshold: f64,
        #[command(flatten)]
        numeric: NumericArgs,
    },
    /// Residual of x_σ B̂ = B x_σ on L_(m,-m).
    Rosengren {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long, default_value = "0.5")]
        q: String,
        /// Defaults to 0 in exact mode.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, value_enum, default_value_t = Precision::F64)]
        precision: Precision,
    },
    /// Eigenvalues of B^σ on L_(m,-m) against s_l.
    Spectrum {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long, default_value = "0.5")]
        q: String,
        #[arg(long, default_value_t = commands::DEFAULT_SPECTRUM_THRESHOLD)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = Precision::F64)]
        precision: Precision,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if cli.format == Format::Csv && !matches!(cli.command, Command::Gram { .. }) {
        eprintln!("error: --format csv is only available for `gram`");
        return ExitCode::from(2);
    }
    let report = match commands::run(&cli.command) {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Compute(e)) => {
            // errors before a report skeleton exists
            Report::new(commands::name(&cli.command), Value::Null, Value::Null).fail_with(&e)
        }
    };
    let text = if cli.format == Format::Csv && report.error.is_none() {
        commands::gram_csv(&report)
    } else {
        let mut s = serde_json::to_string_pretty(&report.to_json(&commands::defaults())).expect("report serializes");
        s.push('\n');
        s
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        if let Some(err) = &report.error {
            eprintln!("error: {}", err["message"].as_str().unwrap_or("computation failed"));
        }
        ExitCode::from(1)
    }
}
