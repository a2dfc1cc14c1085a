//! Run configuration: hard defaults, overridden by a key=value config file,
//! overridden by the `SJCM_WORKERS` environment variable (worker count only),
//! overridden by command-line flags.

use std::path::PathBuf;

use num_complex::Complex64;
use sjcm::{
    Error, LogBase, ModelParams, Result, SweepMode, DEFAULT_MAX_CUTOFF, DEFAULT_TAIL_EPS,
};

/// Default displacement magnitude: sqrt 5, frozen at full 17-digit precision.
#[allow(clippy::excessive_precision)]
pub const DEFAULT_THETA: f64 = 2.23606797749978969;

/// Output encodings for commands that support more than one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::domain(format!(
                "unknown format '{other}' (expected 'csv' or 'json')"
            ))),
        }
    }
}

/// Optional settings collected from one layer (file, environment, or flags).
/// `None` means "not set at this layer"; later layers win field-by-field.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Real part of the coherent displacement amplitude.
    #[arg(long, global = true)]
    pub theta: Option<f64>,

    /// Imaginary part of the coherent displacement amplitude.
    #[arg(long, global = true)]
    pub theta_im: Option<f64>,

    /// Squeeze magnitude (r = 0 is a coherent state).
    #[arg(long, global = true)]
    pub r: Option<f64>,

    /// Squeeze direction angle in radians.
    #[arg(long, global = true)]
    pub squeeze_phase: Option<f64>,

    /// Initial excited-state weight of the atom, in [0, 1].
    #[arg(long, global = true)]
    pub lambda1: Option<f64>,

    /// Atom-field coupling constant.
    #[arg(long, global = true)]
    pub g: Option<f64>,

    /// Atomic level splitting (= field frequency on resonance).
    #[arg(long, global = true)]
    pub omega0: Option<f64>,

    /// Entanglement computation mode: paper, exact, or both.
    #[arg(long, global = true)]
    pub mode: Option<SweepMode>,

    /// Entropy logarithm base: e (nats) or 2 (bits).
    #[arg(long, global = true)]
    pub base: Option<LogBase>,

    /// Truncation tolerance: admissible probability mass beyond the cutoff.
    #[arg(long, global = true)]
    pub tail_eps: Option<f64>,

    /// Hard ceiling on the Fock-space cutoff.
    #[arg(long, global = true)]
    pub max_cutoff: Option<usize>,

    /// Output encoding where a choice exists (sweep, fig3): csv or json.
    #[arg(long, global = true)]
    pub format: Option<OutputFormat>,

    /// Write output to this file (atomically) instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    /// Worker thread count for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Read defaults from a key=value file (flag names as keys).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl Overrides {
    /// Merge `next` on top of `self`: any field set in `next` wins.
    fn layered_under(mut self, next: Overrides) -> Overrides {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if next.$field.is_some() { self.$field = next.$field; })*
            };
        }
        take!(
            theta, theta_im, r, squeeze_phase, lambda1, g, omega0, mode, base, tail_eps,
            max_cutoff, format, output, workers, config
        );
        self
    }
}

/// Parse the flat `key = value` config file format. Blank lines and lines
/// starting with `#` are skipped; keys are the long flag names.
pub fn parse_config_text(text: &str) -> Result<Overrides> {
    let mut layer = Overrides::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::domain(format!("config line {}: expected key=value, got '{line}'", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |e: Error| Error::domain(format!("config line {}: {e}", lineno + 1));
        match key {
            "theta" => layer.theta = Some(parse_f64(value).map_err(bad)?),
            "theta-im" => layer.theta_im = Some(parse_f64(value).map_err(bad)?),
            "r" => layer.r = Some(parse_f64(value).map_err(bad)?),
            "squeeze-phase" => layer.squeeze_phase = Some(parse_f64(value).map_err(bad)?),
            "lambda1" => layer.lambda1 = Some(parse_f64(value).map_err(bad)?),
            "g" => layer.g = Some(parse_f64(value).map_err(bad)?),
            "omega0" => layer.omega0 = Some(parse_f64(value).map_err(bad)?),
            "mode" => layer.mode = Some(value.parse().map_err(bad)?),
            "base" => layer.base = Some(value.parse().map_err(bad)?),
            "tail-eps" => layer.tail_eps = Some(parse_f64(value).map_err(bad)?),
            "max-cutoff" => layer.max_cutoff = Some(parse_usize(value).map_err(bad)?),
            "format" => layer.format = Some(value.parse().map_err(bad)?),
            "workers" => layer.workers = Some(parse_usize(value).map_err(bad)?),
            other => {
                return Err(Error::domain(format!(
                    "config line {}: unknown key '{other}'",
                    lineno + 1
                )))
            }
        }
    }
    Ok(layer)
}

fn parse_f64(value: &str) -> Result<f64> {
    sjcm::parse_float(value)
}

fn parse_usize(value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|e| Error::domain(format!("bad integer '{value}': {e}")))
}

/// Fully resolved configuration; every field has a value except where the
/// command itself supplies the default (mode) or output falls back to stdout.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub theta: Complex64,
    pub r: f64,
    pub squeeze_phase: f64,
    pub lambda1: f64,
    pub params: ModelParams,
    /// None when neither the config file nor the flags chose a mode; each
    /// command then applies its own default.
    pub mode: Option<SweepMode>,
    pub base: LogBase,
    pub tail_eps: f64,
    pub max_cutoff: usize,
    /// None when unspecified; each command then uses its native encoding.
    pub format: Option<OutputFormat>,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// Resolve the precedence chain for the given command-line layer.
///
/// Reads the config file if `--config` was given, applies `SJCM_WORKERS`
/// from the environment, then the flags, then fills hard defaults. Numeric
/// preconditions are validated here, before any computation starts.
pub fn resolve(cli_layer: Overrides) -> Result<RunConfig> {
    let mut merged = Overrides::default();
    if let Some(path) = &cli_layer.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::domain(format!("cannot read config file {}: {e}", path.display()))
        })?;
        merged = merged.layered_under(parse_config_text(&text)?);
    }
    if let Ok(value) = std::env::var("SJCM_WORKERS") {
        merged.workers = Some(parse_usize(&value).map_err(|e| {
            Error::domain(format!("bad SJCM_WORKERS value '{value}': {e}"))
        })?);
    }
    merged = merged.layered_under(cli_layer);

    let theta = Complex64::new(
        merged.theta.unwrap_or(DEFAULT_THETA),
        merged.theta_im.unwrap_or(0.0),
    );
    let r = merged.r.unwrap_or(1.0);
    let squeeze_phase = merged.squeeze_phase.unwrap_or(0.0);
    let lambda1 = merged.lambda1.unwrap_or(0.5);
    let params = ModelParams::new(merged.g.unwrap_or(1.0), merged.omega0.unwrap_or(1.0))?;
    let tail_eps = merged.tail_eps.unwrap_or(DEFAULT_TAIL_EPS);
    let max_cutoff = merged.max_cutoff.unwrap_or(DEFAULT_MAX_CUTOFF);

    // Fail early on values the library would reject later anyway.
    sjcm::SqueezedField::new(theta, r, squeeze_phase)?;
    sjcm::AtomMixture::from_excited_weight(lambda1)?;
    if let Some(0) = merged.workers {
        return Err(Error::domain("workers must be at least 1".to_string()));
    }

    Ok(RunConfig {
        theta,
        r,
        squeeze_phase,
        lambda1,
        params,
        mode: merged.mode,
        base: merged.base.unwrap_or(LogBase::E),
        tail_eps,
        max_cutoff,
        format: merged.format,
        output: merged.output,
        workers: merged.workers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parses_and_rejects() {
        let layer = parse_config_text(
            "# comment\n\ntheta = 1.5\nmode=exact\nmax-cutoff = 512\nworkers=2\n",
        )
        .unwrap();
        assert_eq!(layer.theta, Some(1.5));
        assert_eq!(layer.mode, Some(SweepMode::Exact));
        assert_eq!(layer.max_cutoff, Some(512));
        assert_eq!(layer.workers, Some(2));

        assert!(parse_config_text("nonsense").is_err());
        assert!(parse_config_text("frobnicate = 3").is_err());
        assert!(parse_config_text("theta = eleven").is_err());
    }

    #[test]
    fn later_layers_win_fieldwise() {
        let file = parse_config_text("r = 0.25\nlambda1 = 0.1\n").unwrap();
        let cli = Overrides { r: Some(2.0), ..Overrides::default() };
        let merged = Overrides::default().layered_under(file).layered_under(cli);
        assert_eq!(merged.r, Some(2.0));
        assert_eq!(merged.lambda1, Some(0.1));
    }
}
