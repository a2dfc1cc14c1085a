//! `sjcm`: photon statistics, Rabi dynamics, and atom-field mutual entropy
//! for a two-level atom resonantly coupled to a squeezed coherent field.
//!
//! Exit codes: 0 success, 1 I/O or internal inconsistency, 2 usage or
//! parameter validation, 3 numeric-domain rejection (e.g. a closed-form
//! eigenvalue outside [0, 1]), 4 truncation budget exhausted.

mod commands;
mod config;

use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand};

use commands::SweepOptions;
use sjcm::TimeSpec;

#[derive(Parser)]
#[command(
    name = "sjcm",
    version,
    about = "Squeezed-field Jaynes-Cummings model: distributions, dynamics, entanglement",
    after_help = "Numbers are emitted with 17 significant digits and re-parse bit-exactly.\n\
                  Config file keys mirror the long flag names (key = value, '#' comments);\n\
                  precedence: defaults < config file < SJCM_WORKERS < flags."
)]
struct Cli {
    #[command(flatten)]
    overrides: config::Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Photon-number distribution P(n) as CSV (n, p).
    Pn,

    /// Transition probabilities c(t), s(t) on a time grid as CSV (t, c, s).
    Ct {
        /// End of the time grid.
        #[arg(long, default_value_t = 25.0)]
        t_max: f64,
        /// Number of uniform intervals in [0, t_max].
        #[arg(long, default_value_t = 500)]
        steps: usize,
        /// Use compensated (Kahan) summation for the series.
        #[arg(long)]
        kahan: bool,
    },

    /// Degree of entanglement at one time point as JSON.
    Dem {
        /// Evaluation time; defaults to the revival time 2 pi |theta| / g.
        #[arg(long)]
        t: Option<f64>,
        /// Cross-check the exact mode against a dense-matrix path (cutoff <= 64).
        #[arg(long)]
        verify_dense: bool,
    },

    /// Closed-form vs exact entanglement over a time grid as CSV.
    Compare {
        /// End of the time grid.
        #[arg(long, default_value_t = 25.0)]
        t_max: f64,
        /// Number of uniform intervals in [0, t_max].
        #[arg(long, default_value_t = 500)]
        steps: usize,
        /// Use compensated (Kahan) summation for the series.
        #[arg(long)]
        kahan: bool,
    },

    /// Entanglement over a (lambda1, r) grid; CSV, JSON, or gnuplot matrix.
    Sweep {
        /// Comma-separated lambda1 grid (default: 0 to 1, step 0.05).
        #[arg(long)]
        lambda1_grid: Option<String>,
        /// Comma-separated r grid (default: 0 to 3, step 0.25).
        #[arg(long)]
        r_grid: Option<String>,
        /// Time specification: 'revival', 'fixed:T', or 'grid:0..T_MAX:STEPS'.
        #[arg(long)]
        time: Option<String>,
        /// Emit a gnuplot nonuniform-matrix surface instead of rows.
        #[arg(long)]
        gnuplot: bool,
        /// Recompute with 1 worker and fail unless outputs are byte-identical.
        #[arg(long)]
        verify_deterministic: bool,
    },

    /// Preset: c(t) curves for r = 0, 1, 2 as CSV (t, c_r0, c_r1, c_r2).
    Fig1 {
        /// End of the time grid.
        #[arg(long, default_value_t = 25.0)]
        t_max: f64,
        /// Number of uniform intervals in [0, t_max].
        #[arg(long, default_value_t = 500)]
        steps: usize,
    },

    /// Preset: P(n) profiles for r = 0, 1, 2 as CSV (n, p_r0, p_r1, p_r2).
    Fig2 {
        /// Last photon number of the window.
        #[arg(long, default_value_t = 30)]
        n_max: usize,
    },

    /// Preset: the entanglement surface at the revival time (sweep output).
    Fig3 {
        /// Emit a gnuplot nonuniform-matrix surface instead of rows.
        #[arg(long)]
        gnuplot: bool,
        /// Recompute with 1 worker and fail unless outputs are byte-identical.
        #[arg(long)]
        verify_deterministic: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(code) = run(cli) {
        std::process::exit(code);
    }
}

/// Execute the parsed command; on failure print the error and map it to the
/// documented exit code.
fn run(cli: Cli) -> Result<(), i32> {
    let fail = |e: sjcm::Error| -> i32 {
        eprintln!("error: {e}");
        match e {
            sjcm::Error::Domain(_) => 2,
            sjcm::Error::NumericDomain(_) => 3,
            sjcm::Error::Truncation { .. } => 4,
            sjcm::Error::Inconsistency(_) => 1,
        }
    };

    let cfg = config::resolve(cli.overrides).map_err(fail)?;
    let bytes = match cli.command {
        Command::Pn => commands::pn(&cfg),
        Command::Ct { t_max, steps, kahan } => commands::ct(&cfg, t_max, steps, kahan),
        Command::Dem { t, verify_dense } => commands::dem(&cfg, t, verify_dense),
        Command::Compare { t_max, steps, kahan } => commands::compare(&cfg, t_max, steps, kahan),
        Command::Sweep { lambda1_grid, r_grid, time, gnuplot, verify_deterministic } => {
            let lambda1_grid = lambda1_grid.as_deref().map(commands::parse_grid).transpose();
            let r_grid = r_grid.as_deref().map(commands::parse_grid).transpose();
            let time = time
                .as_deref()
                .map(|s| s.parse::<TimeSpec>())
                .transpose();
            match (lambda1_grid, r_grid, time) {
                (Ok(l), Ok(r), Ok(t)) => commands::sweep(
                    &cfg,
                    l,
                    r,
                    t,
                    &SweepOptions { gnuplot, verify_deterministic },
                ),
                (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => Err(e),
            }
        }
        Command::Fig1 { t_max, steps } => commands::fig1(&cfg, t_max, steps),
        Command::Fig2 { n_max } => commands::fig2(&cfg, n_max),
        Command::Fig3 { gnuplot, verify_deterministic } => {
            commands::fig3(&cfg, &SweepOptions { gnuplot, verify_deterministic })
        }
    }
    .map_err(fail)?;

    write_output(cfg.output.as_deref(), &bytes).map_err(|e| {
        eprintln!("error: cannot write output: {e}");
        1
    })
}

/// Write to stdout, or atomically to a file: the bytes land in a temporary
/// file in the destination directory and are renamed into place, so a
/// partially written output file can never be observed.
fn write_output(path: Option<&Path>, bytes: &[u8]) -> std::io::Result<()> {
    match path {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(parent) if !parent.as_os_str().is_empty() => parent,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}
