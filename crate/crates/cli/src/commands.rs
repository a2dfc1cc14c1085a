//! Subcommand implementations. Each command renders its full output into a
//! byte buffer and returns it, so nothing is written when a computation
//! fails partway.

use sjcm::{
    dem_exact_dense, dem_exact_with_cutoff, dem_paper, distribution_figure_rows, fmt_float,
    lifted_coefficients_with, photon_distribution, pn_rows, revival_time, run_sweep_with_workers,
    surface_sweep_spec, sweep_json, transition_c_with, transition_figure_rows, transition_s_with,
    write_compare_csv, write_ct_csv, write_distribution_figure_csv, write_gnuplot_matrix,
    write_pn_csv, write_sweep_csv, write_transition_figure_csv, AtomMixture, CommentPairs,
    CompareRow, DemInputs, DemPoint, DemReport, Error, Mode, Result, SqueezedField, SweepMode,
    SweepResult, SweepSpec, Summation, TimeSpec, TransitionRow,
};

use crate::config::{OutputFormat, RunConfig};

fn field_of(cfg: &RunConfig) -> Result<SqueezedField> {
    SqueezedField::new(cfg.theta, cfg.r, cfg.squeeze_phase)
}

fn atom_of(cfg: &RunConfig) -> Result<AtomMixture> {
    AtomMixture::from_excited_weight(cfg.lambda1)
}

fn summation(kahan: bool) -> Summation {
    if kahan {
        Summation::Compensated
    } else {
        Summation::Plain
    }
}

/// Commands with a single native encoding reject an explicit request for the
/// other one rather than silently emitting something unexpected.
fn require_format(cfg: &RunConfig, native: OutputFormat, command: &str) -> Result<()> {
    if cfg.format.unwrap_or(native) == native {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{command} only supports {} output",
            match native {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            }
        )))
    }
}

fn base_comments(cfg: &RunConfig) -> CommentPairs {
    vec![
        ("theta".to_string(), format!("{} {}", fmt_float(cfg.theta.re), fmt_float(cfg.theta.im))),
        ("squeeze_phase".to_string(), fmt_float(cfg.squeeze_phase)),
        ("g".to_string(), fmt_float(cfg.params.g)),
        ("omega0".to_string(), fmt_float(cfg.params.omega0)),
        ("tail_eps".to_string(), fmt_float(cfg.tail_eps)),
        ("max_cutoff".to_string(), cfg.max_cutoff.to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ]
}

fn to_core(e: std::io::Error) -> Error {
    Error::domain(format!("serialization failed: {e}"))
}

/// `pn`: the photon-number distribution of the configured field.
pub fn pn(cfg: &RunConfig) -> Result<Vec<u8>> {
    require_format(cfg, OutputFormat::Csv, "pn")?;
    let dist = photon_distribution(&field_of(cfg)?, cfg.tail_eps, cfg.max_cutoff)?;
    let mut comments = base_comments(cfg);
    comments.insert(1, ("r".to_string(), fmt_float(cfg.r)));
    comments.push(("cutoff".to_string(), dist.cutoff.to_string()));
    comments.push(("tail_mass".to_string(), fmt_float(dist.tail_mass)));
    let mut out = Vec::new();
    write_pn_csv(&mut out, &pn_rows(&dist), &comments).map_err(to_core)?;
    Ok(out)
}

/// `ct`: excited/ground probabilities on a uniform time grid.
pub fn ct(cfg: &RunConfig, t_max: f64, steps: usize, kahan: bool) -> Result<Vec<u8>> {
    require_format(cfg, OutputFormat::Csv, "ct")?;
    let dist = photon_distribution(&field_of(cfg)?, cfg.tail_eps, cfg.max_cutoff)?;
    let times = TimeSpec::Grid { t_max, steps }.times(cfg.theta.norm(), cfg.params.g)?;
    let acc = summation(kahan);
    let rows: Vec<TransitionRow> = times
        .into_iter()
        .map(|t| TransitionRow {
            t,
            c: transition_c_with(&dist, &cfg.params, t, acc),
            s: transition_s_with(&dist, &cfg.params, t, acc),
        })
        .collect();
    let mut comments = base_comments(cfg);
    comments.insert(1, ("r".to_string(), fmt_float(cfg.r)));
    let mut out = Vec::new();
    write_ct_csv(&mut out, &rows, &comments).map_err(to_core)?;
    Ok(out)
}

/// `dem`: mutual entropy at one time point, as a JSON report covering the
/// requested mode(s). `t = None` means the revival time.
pub fn dem(cfg: &RunConfig, t: Option<f64>, verify_dense: bool) -> Result<Vec<u8>> {
    require_format(cfg, OutputFormat::Json, "dem")?;
    let t = match t {
        Some(t) => t,
        None => revival_time(cfg.theta.norm(), cfg.params.g)?,
    };
    let field = field_of(cfg)?;
    let atom = atom_of(cfg)?;
    let dist = photon_distribution(&field, cfg.tail_eps, cfg.max_cutoff)?;
    let mode = cfg.mode.unwrap_or(SweepMode::Both);

    let mut results = Vec::new();
    for &m in mode.modes() {
        let computed = match m {
            Mode::Paper => {
                let coeffs =
                    lifted_coefficients_with(&dist, &atom, &cfg.params, t, Summation::Plain);
                dem_paper(&coeffs, cfg.base)?
            }
            Mode::Exact => {
                dem_exact_with_cutoff(&field, &atom, &cfg.params, dist.cutoff, t, cfg.base)?
            }
        };
        let dense_gap = if verify_dense && m == Mode::Exact {
            let dense =
                dem_exact_dense(&field, &atom, &cfg.params, dist.cutoff, t, cfg.base)?;
            Some((computed.dem - dense.dem).abs())
        } else {
            None
        };
        results.push(DemPoint {
            mode: m,
            dem: computed.dem,
            s_atom: computed.s_atom,
            s_field: computed.s_field,
            s_joint: computed.s_joint,
            kappa_plus: computed.kappa_plus,
            kappa_minus: computed.kappa_minus,
            tail_mass: dist.tail_mass,
            cutoff: dist.cutoff,
            dense_gap,
        });
    }

    let report = DemReport {
        inputs: DemInputs {
            theta: cfg.theta,
            squeeze_phase: cfg.squeeze_phase,
            r: cfg.r,
            lambda1: cfg.lambda1,
            g: cfg.params.g,
            omega0: cfg.params.omega0,
            t,
            tail_eps: cfg.tail_eps,
            max_cutoff: cfg.max_cutoff,
            base: cfg.base,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        results,
    };
    Ok(sjcm::dem_json(&report).into_bytes())
}

/// `compare`: closed-form and exact mutual entropies over a time grid.
/// Unlike `sweep`, a failure at any grid point aborts the command: the
/// comparison is meaningless with holes.
pub fn compare(cfg: &RunConfig, t_max: f64, steps: usize, kahan: bool) -> Result<Vec<u8>> {
    require_format(cfg, OutputFormat::Csv, "compare")?;
    let field = field_of(cfg)?;
    let atom = atom_of(cfg)?;
    let dist = photon_distribution(&field, cfg.tail_eps, cfg.max_cutoff)?;
    let times = TimeSpec::Grid { t_max, steps }.times(cfg.theta.norm(), cfg.params.g)?;
    let acc = summation(kahan);
    let rows: Vec<CompareRow> = times
        .into_iter()
        .map(|t| {
            let coeffs = lifted_coefficients_with(&dist, &atom, &cfg.params, t, acc);
            let paper = dem_paper(&coeffs, cfg.base)?;
            let exact =
                dem_exact_with_cutoff(&field, &atom, &cfg.params, dist.cutoff, t, cfg.base)?;
            Ok(CompareRow {
                t,
                dem_paper: paper.dem,
                dem_exact: exact.dem,
                gap: paper.dem - exact.dem,
            })
        })
        .collect::<Result<_>>()?;
    let mut comments = base_comments(cfg);
    comments.insert(1, ("r".to_string(), fmt_float(cfg.r)));
    comments.insert(2, ("lambda1".to_string(), fmt_float(cfg.lambda1)));
    let mut out = Vec::new();
    write_compare_csv(&mut out, &rows, &comments).map_err(to_core)?;
    Ok(out)
}

/// Options shared by `sweep` and `fig3`.
pub struct SweepOptions {
    pub gnuplot: bool,
    pub verify_deterministic: bool,
}

fn render_sweep(cfg: &RunConfig, result: &SweepResult, gnuplot: bool) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    if gnuplot {
        if cfg.format == Some(OutputFormat::Json) {
            return Err(Error::domain(
                "--gnuplot is its own output layout; drop --format json".to_string(),
            ));
        }
        write_gnuplot_matrix(&mut out, result)?;
    } else {
        match cfg.format.unwrap_or(OutputFormat::Csv) {
            OutputFormat::Csv => write_sweep_csv(&mut out, result).map_err(to_core)?,
            OutputFormat::Json => out = sweep_json(result).into_bytes(),
        }
    }
    Ok(out)
}

fn run_and_render(cfg: &RunConfig, spec: &SweepSpec, opts: &SweepOptions) -> Result<Vec<u8>> {
    let result = run_sweep_with_workers(spec, cfg.workers)?;
    let rendered = render_sweep(cfg, &result, opts.gnuplot)?;
    if opts.verify_deterministic {
        let single = run_sweep_with_workers(spec, Some(1))?;
        let reference = render_sweep(cfg, &single, opts.gnuplot)?;
        if rendered != reference {
            return Err(Error::Inconsistency(
                "sweep output differs between 1 worker and the configured worker count"
                    .to_string(),
            ));
        }
    }
    Ok(rendered)
}

/// `sweep`: grid evaluation with caller-controlled grids and time spec.
pub fn sweep(
    cfg: &RunConfig,
    lambda1_grid: Option<Vec<f64>>,
    r_grid: Option<Vec<f64>>,
    time: Option<TimeSpec>,
    opts: &SweepOptions,
) -> Result<Vec<u8>> {
    let mut spec = surface_sweep_spec(
        cfg.theta,
        cfg.params,
        cfg.mode.unwrap_or(SweepMode::Paper),
        cfg.base,
        cfg.tail_eps,
        cfg.max_cutoff,
    );
    spec.squeeze_phase = cfg.squeeze_phase;
    if let Some(grid) = lambda1_grid {
        spec.lambda1_grid = grid;
    }
    if let Some(grid) = r_grid {
        spec.r_grid = grid;
    }
    if let Some(time_spec) = time {
        spec.time_spec = time_spec;
    }
    run_and_render(cfg, &spec, opts)
}

/// `fig1`: transition-probability curves for r = 0, 1, 2.
pub fn fig1(cfg: &RunConfig, t_max: f64, steps: usize) -> Result<Vec<u8>> {
    require_format(cfg, OutputFormat::Csv, "fig1")?;
    let rows =
        transition_figure_rows(cfg.theta, &cfg.params, t_max, steps, cfg.tail_eps, cfg.max_cutoff)?;
    let mut comments = base_comments(cfg);
    comments.insert(1, ("r_values".to_string(), "0 1 2".to_string()));
    let mut out = Vec::new();
    write_transition_figure_csv(&mut out, &rows, &comments).map_err(to_core)?;
    Ok(out)
}

/// `fig2`: photon-number profiles for r = 0, 1, 2 on a fixed n-window.
pub fn fig2(cfg: &RunConfig, n_max: usize) -> Result<Vec<u8>> {
    require_format(cfg, OutputFormat::Csv, "fig2")?;
    let rows = distribution_figure_rows(cfg.theta, n_max, cfg.tail_eps, cfg.max_cutoff)?;
    let mut comments = base_comments(cfg);
    comments.insert(1, ("r_values".to_string(), "0 1 2".to_string()));
    let mut out = Vec::new();
    write_distribution_figure_csv(&mut out, &rows, &comments).map_err(to_core)?;
    Ok(out)
}

/// `fig3`: the mutual-entropy surface over (lambda1, r) at the revival time.
pub fn fig3(cfg: &RunConfig, opts: &SweepOptions) -> Result<Vec<u8>> {
    let mut spec = surface_sweep_spec(
        cfg.theta,
        cfg.params,
        cfg.mode.unwrap_or(SweepMode::Paper),
        cfg.base,
        cfg.tail_eps,
        cfg.max_cutoff,
    );
    spec.squeeze_phase = cfg.squeeze_phase;
    run_and_render(cfg, &spec, opts)
}

/// Parse a comma-separated list of grid values.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(sjcm::parse_float)
        .collect::<Result<Vec<f64>>>()
        .map_err(|e| Error::domain(format!("bad grid '{text}': {e}")))
}
