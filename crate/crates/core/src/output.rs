//! Serialization of results: CSV tables with provenance comments, JSON
//! reports, and a gnuplot matrix export for the entanglement surface.
//!
//! Every float is written with 17 significant digits so any emitted value
//! re-parses to the identical bit pattern; each emitter has a matching parser
//! and the pair is round-trip tested. JSON is emitted by hand (the shapes are
//! small and fixed) and parsed back through `serde_json` so the round trip
//! also validates well-formedness against an independent implementation.

use std::io::{self, Write};

use num_complex::Complex64;

use crate::entanglement::{LogBase, Mode};
use crate::error::{Error, Result};
use crate::photon::PhotonDistribution;
use crate::sweep::{Provenance, SweepMode, SweepResult, SweepRow, TimeSpec};

/// Format a finite float with 17 significant digits (round-trip exact).
pub fn fmt_float(x: f64) -> String {
    debug_assert!(x.is_finite(), "refusing to serialize non-finite value");
    format!("{x:.16e}")
}

/// Parse a float serialized by [`fmt_float`] (or any finite decimal).
pub fn parse_float(s: &str) -> Result<f64> {
    let value: f64 =
        s.trim().parse().map_err(|e| Error::domain(format!("bad float '{s}': {e}")))?;
    if !value.is_finite() {
        return Err(Error::domain(format!("non-finite value '{s}' not allowed here")));
    }
    Ok(value)
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|e| Error::domain(format!("bad integer '{s}': {e}")))
}

fn parse_optional_float(s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_float(s).map(Some)
    }
}

fn optional_float(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

fn csv_to_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io_err) => io_err,
        other => io::Error::other(format!("csv: {other:?}")),
    }
}

fn csv_parse_error(e: csv::Error) -> Error {
    Error::domain(format!("csv parse: {e}"))
}

/// Ordered `key = value` pairs written as `#`-prefixed comment lines ahead of
/// a CSV header; parsers skip them.
pub type CommentPairs = Vec<(String, String)>;

fn write_comments<W: Write>(mut w: W, comments: &CommentPairs) -> io::Result<()> {
    for (key, value) in comments {
        writeln!(w, "# {key} = {value}")?;
    }
    Ok(())
}

/// The provenance block shared by all sweep-shaped outputs.
pub fn provenance_comments(p: &Provenance) -> CommentPairs {
    vec![
        ("theta".to_string(), format!("{} {}", fmt_float(p.theta.re), fmt_float(p.theta.im))),
        ("squeeze_phase".to_string(), fmt_float(p.squeeze_phase)),
        ("g".to_string(), fmt_float(p.g)),
        ("omega0".to_string(), fmt_float(p.omega0)),
        (
            "lambda1_grid".to_string(),
            p.lambda1_grid.iter().map(|&v| fmt_float(v)).collect::<Vec<_>>().join(" "),
        ),
        (
            "r_grid".to_string(),
            p.r_grid.iter().map(|&v| fmt_float(v)).collect::<Vec<_>>().join(" "),
        ),
        ("time_spec".to_string(), p.time_spec.to_string()),
        ("mode".to_string(), p.mode.to_string()),
        ("tail_eps".to_string(), fmt_float(p.tail_eps)),
        ("max_cutoff".to_string(), p.max_cutoff.to_string()),
        ("base".to_string(), p.base.to_string()),
        ("version".to_string(), p.version.clone()),
    ]
}

// ---------------------------------------------------------------------------
// Photon distribution: CSV `n,p`.
// ---------------------------------------------------------------------------

/// One photon-number row.
#[derive(Debug, Clone, PartialEq)]
pub struct PnRow {
    /// Photon number.
    pub n: usize,
    /// Probability P(n).
    pub p: f64,
}

/// Rows of a truncated distribution.
pub fn pn_rows(dist: &PhotonDistribution) -> Vec<PnRow> {
    dist.probs.iter().enumerate().map(|(n, &p)| PnRow { n, p }).collect()
}

/// Write `n,p` CSV with leading provenance comments.
pub fn write_pn_csv<W: Write>(mut w: W, rows: &[PnRow], comments: &CommentPairs) -> io::Result<()> {
    write_comments(&mut w, comments)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["n", "p"]).map_err(csv_to_io)?;
    for row in rows {
        csv.write_record([row.n.to_string(), fmt_float(row.p)]).map_err(csv_to_io)?;
    }
    csv.flush()
}

/// Parse `n,p` CSV (comments tolerated).
pub fn parse_pn_csv(text: &str) -> Result<Vec<PnRow>> {
    read_csv(text, &["n", "p"])?
        .into_iter()
        .map(|record| Ok(PnRow { n: parse_usize(&record[0])?, p: parse_float(&record[1])? }))
        .collect()
}

// ---------------------------------------------------------------------------
// Transition probability series: CSV `t,c,s`.
// ---------------------------------------------------------------------------

/// One time point of the transition series.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    /// Time.
    pub t: f64,
    /// Probability of finding the atom excited.
    pub c: f64,
    /// Probability of finding the atom in the ground state.
    pub s: f64,
}

/// Write `t,c,s` CSV with leading provenance comments.
pub fn write_ct_csv<W: Write>(
    mut w: W,
    rows: &[TransitionRow],
    comments: &CommentPairs,
) -> io::Result<()> {
    write_comments(&mut w, comments)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["t", "c", "s"]).map_err(csv_to_io)?;
    for row in rows {
        csv.write_record([fmt_float(row.t), fmt_float(row.c), fmt_float(row.s)])
            .map_err(csv_to_io)?;
    }
    csv.flush()
}

/// Parse `t,c,s` CSV.
pub fn parse_ct_csv(text: &str) -> Result<Vec<TransitionRow>> {
    read_csv(text, &["t", "c", "s"])?
        .into_iter()
        .map(|record| {
            Ok(TransitionRow {
                t: parse_float(&record[0])?,
                c: parse_float(&record[1])?,
                s: parse_float(&record[2])?,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Mode comparison: CSV `t,dem_paper,dem_exact,gap`.
// ---------------------------------------------------------------------------

/// Closed-form and exact entanglement degrees at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    /// Time.
    pub t: f64,
    /// Closed-form value.
    pub dem_paper: f64,
    /// Exact value.
    pub dem_exact: f64,
    /// dem_paper - dem_exact.
    pub gap: f64,
}

/// Write `t,dem_paper,dem_exact,gap` CSV with leading provenance comments.
pub fn write_compare_csv<W: Write>(
    mut w: W,
    rows: &[CompareRow],
    comments: &CommentPairs,
) -> io::Result<()> {
    write_comments(&mut w, comments)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["t", "dem_paper", "dem_exact", "gap"]).map_err(csv_to_io)?;
    for row in rows {
        csv.write_record([
            fmt_float(row.t),
            fmt_float(row.dem_paper),
            fmt_float(row.dem_exact),
            fmt_float(row.gap),
        ])
        .map_err(csv_to_io)?;
    }
    csv.flush()
}

/// Parse `t,dem_paper,dem_exact,gap` CSV.
pub fn parse_compare_csv(text: &str) -> Result<Vec<CompareRow>> {
    read_csv(text, &["t", "dem_paper", "dem_exact", "gap"])?
        .into_iter()
        .map(|record| {
            Ok(CompareRow {
                t: parse_float(&record[0])?,
                dem_paper: parse_float(&record[1])?,
                dem_exact: parse_float(&record[2])?,
                gap: parse_float(&record[3])?,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Figure presets: CSV `t,c_r0,c_r1,c_r2` and `n,p_r0,p_r1,p_r2`.
// ---------------------------------------------------------------------------

/// Write the three-curve transition figure.
pub fn write_transition_figure_csv<W: Write>(
    mut w: W,
    rows: &[crate::sweep::TransitionFigureRow],
    comments: &CommentPairs,
) -> io::Result<()> {
    write_comments(&mut w, comments)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["t", "c_r0", "c_r1", "c_r2"]).map_err(csv_to_io)?;
    for row in rows {
        csv.write_record([
            fmt_float(row.t),
            fmt_float(row.c[0]),
            fmt_float(row.c[1]),
            fmt_float(row.c[2]),
        ])
        .map_err(csv_to_io)?;
    }
    csv.flush()
}

/// Parse the three-curve transition figure.
pub fn parse_transition_figure_csv(text: &str) -> Result<Vec<crate::sweep::TransitionFigureRow>> {
    read_csv(text, &["t", "c_r0", "c_r1", "c_r2"])?
        .into_iter()
        .map(|record| {
            Ok(crate::sweep::TransitionFigureRow {
                t: parse_float(&record[0])?,
                c: [
                    parse_float(&record[1])?,
                    parse_float(&record[2])?,
                    parse_float(&record[3])?,
                ],
            })
        })
        .collect()
}

/// Write the three-profile distribution figure.
pub fn write_distribution_figure_csv<W: Write>(
    mut w: W,
    rows: &[crate::sweep::DistributionFigureRow],
    comments: &CommentPairs,
) -> io::Result<()> {
    write_comments(&mut w, comments)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["n", "p_r0", "p_r1", "p_r2"]).map_err(csv_to_io)?;
    for row in rows {
        csv.write_record([
            row.n.to_string(),
            fmt_float(row.p[0]),
            fmt_float(row.p[1]),
            fmt_float(row.p[2]),
        ])
        .map_err(csv_to_io)?;
    }
    csv.flush()
}

/// Parse the three-profile distribution figure.
pub fn parse_distribution_figure_csv(
    text: &str,
) -> Result<Vec<crate::sweep::DistributionFigureRow>> {
    read_csv(text, &["n", "p_r0", "p_r1", "p_r2"])?
        .into_iter()
        .map(|record| {
            Ok(crate::sweep::DistributionFigureRow {
                n: parse_usize(&record[0])?,
                p: [
                    parse_float(&record[1])?,
                    parse_float(&record[2])?,
                    parse_float(&record[3])?,
                ],
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Sweep: CSV and JSON.
// ---------------------------------------------------------------------------

const SWEEP_HEADER: [&str; 13] = [
    "lambda1",
    "r",
    "t",
    "dem",
    "mode",
    "s_atom",
    "s_field",
    "s_joint",
    "kappa_plus",
    "kappa_minus",
    "tail_mass",
    "cutoff",
    "error",
];

/// Write sweep rows as CSV, provenance as leading comments. Error rows carry
/// empty value columns and the message in the last column.
pub fn write_sweep_csv<W: Write>(mut w: W, result: &SweepResult) -> io::Result<()> {
    write_comments(&mut w, &provenance_comments(&result.provenance))?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(SWEEP_HEADER).map_err(csv_to_io)?;
    for row in &result.rows {
        csv.write_record([
            fmt_float(row.lambda1),
            fmt_float(row.r),
            fmt_float(row.t),
            optional_float(row.dem),
            row.mode.to_string(),
            optional_float(row.s_atom),
            optional_float(row.s_field),
            optional_float(row.s_joint),
            optional_float(row.kappa_plus),
            optional_float(row.kappa_minus),
            optional_float(row.tail_mass),
            row.cutoff.map(|c| c.to_string()).unwrap_or_default(),
            row.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_to_io)?;
    }
    csv.flush()
}

/// Parse sweep rows from CSV (provenance comments are skipped, not
/// reconstructed; use the JSON format when provenance must round-trip).
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    read_csv(text, &SWEEP_HEADER)?
        .into_iter()
        .map(|record| {
            let error = record[12].to_string();
            Ok(SweepRow {
                lambda1: parse_float(&record[0])?,
                r: parse_float(&record[1])?,
                t: parse_float(&record[2])?,
                dem: parse_optional_float(&record[3])?,
                mode: record[4].parse()?,
                s_atom: parse_optional_float(&record[5])?,
                s_field: parse_optional_float(&record[6])?,
                s_joint: parse_optional_float(&record[7])?,
                kappa_plus: parse_optional_float(&record[8])?,
                kappa_minus: parse_optional_float(&record[9])?,
                tail_mass: parse_optional_float(&record[10])?,
                cutoff: if record[11].is_empty() {
                    None
                } else {
                    Some(parse_usize(&record[11])?)
                },
                error: if error.is_empty() { None } else { Some(error) },
            })
        })
        .collect()
}

/// Serialize a sweep as JSON: `{"provenance": {...}, "rows": [...]}`.
pub fn sweep_json(result: &SweepResult) -> String {
    let mut out = String::from("{\n  \"provenance\": ");
    out.push_str(&provenance_json(&result.provenance, "  "));
    out.push_str(",\n  \"rows\": [\n");
    for (i, row) in result.rows.iter().enumerate() {
        out.push_str("    {");
        push_json_field(&mut out, "lambda1", &json_number(row.lambda1), true);
        push_json_field(&mut out, "r", &json_number(row.r), false);
        push_json_field(&mut out, "t", &json_number(row.t), false);
        push_json_field(&mut out, "mode", &json_string(&row.mode.to_string()), false);
        push_json_field(&mut out, "dem", &json_optional_number(row.dem), false);
        push_json_field(&mut out, "s_atom", &json_optional_number(row.s_atom), false);
        push_json_field(&mut out, "s_field", &json_optional_number(row.s_field), false);
        push_json_field(&mut out, "s_joint", &json_optional_number(row.s_joint), false);
        push_json_field(&mut out, "kappa_plus", &json_optional_number(row.kappa_plus), false);
        push_json_field(&mut out, "kappa_minus", &json_optional_number(row.kappa_minus), false);
        push_json_field(&mut out, "tail_mass", &json_optional_number(row.tail_mass), false);
        push_json_field(
            &mut out,
            "cutoff",
            &row.cutoff.map(|c| c.to_string()).unwrap_or_else(|| "null".to_string()),
            false,
        );
        push_json_field(
            &mut out,
            "error",
            &row.error.as_deref().map(json_string).unwrap_or_else(|| "null".to_string()),
            false,
        );
        out.push('}');
        if i + 1 < result.rows.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

fn provenance_json(p: &Provenance, indent: &str) -> String {
    let mut out = String::from("{");
    push_json_field(&mut out, "theta_re", &json_number(p.theta.re), true);
    push_json_field(&mut out, "theta_im", &json_number(p.theta.im), false);
    push_json_field(&mut out, "squeeze_phase", &json_number(p.squeeze_phase), false);
    push_json_field(&mut out, "g", &json_number(p.g), false);
    push_json_field(&mut out, "omega0", &json_number(p.omega0), false);
    push_json_field(&mut out, "lambda1_grid", &json_number_array(&p.lambda1_grid), false);
    push_json_field(&mut out, "r_grid", &json_number_array(&p.r_grid), false);
    push_json_field(&mut out, "time_spec", &json_string(&p.time_spec.to_string()), false);
    push_json_field(&mut out, "mode", &json_string(&p.mode.to_string()), false);
    push_json_field(&mut out, "tail_eps", &json_number(p.tail_eps), false);
    push_json_field(&mut out, "max_cutoff", &p.max_cutoff.to_string(), false);
    push_json_field(&mut out, "base", &json_string(&p.base.to_string()), false);
    push_json_field(&mut out, "version", &json_string(&p.version), false);
    out.push('}');
    let _ = indent;
    out
}

/// Parse the JSON produced by [`sweep_json`] back into a [`SweepResult`].
pub fn parse_sweep_json(text: &str) -> Result<SweepResult> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::domain(format!("json parse: {e}")))?;
    let p = &value["provenance"];
    let provenance = Provenance {
        theta: Complex64::new(json_f64(p, "theta_re")?, json_f64(p, "theta_im")?),
        squeeze_phase: json_f64(p, "squeeze_phase")?,
        g: json_f64(p, "g")?,
        omega0: json_f64(p, "omega0")?,
        lambda1_grid: json_f64_array(p, "lambda1_grid")?,
        r_grid: json_f64_array(p, "r_grid")?,
        time_spec: json_str(p, "time_spec")?.parse::<TimeSpec>()?,
        mode: json_str(p, "mode")?.parse::<SweepMode>()?,
        tail_eps: json_f64(p, "tail_eps")?,
        max_cutoff: json_usize(p, "max_cutoff")?,
        base: json_str(p, "base")?.parse::<LogBase>()?,
        version: json_str(p, "version")?,
    };
    let rows = value["rows"]
        .as_array()
        .ok_or_else(|| Error::domain("json: rows is not an array".to_string()))?
        .iter()
        .map(|row| {
            Ok(SweepRow {
                lambda1: json_f64(row, "lambda1")?,
                r: json_f64(row, "r")?,
                t: json_f64(row, "t")?,
                mode: json_str(row, "mode")?.parse::<Mode>()?,
                dem: json_opt_f64(row, "dem")?,
                s_atom: json_opt_f64(row, "s_atom")?,
                s_field: json_opt_f64(row, "s_field")?,
                s_joint: json_opt_f64(row, "s_joint")?,
                kappa_plus: json_opt_f64(row, "kappa_plus")?,
                kappa_minus: json_opt_f64(row, "kappa_minus")?,
                tail_mass: json_opt_f64(row, "tail_mass")?,
                cutoff: json_opt_usize(row, "cutoff")?,
                error: json_opt_str(row, "error"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { provenance, rows })
}

/// Gnuplot "nonuniform matrix" export of a single-time, single-mode DEM
/// surface: first row is the column count followed by the r grid, each data
/// row is lambda1 followed by DEM values; failed points print NaN (which
/// gnuplot treats as missing data).
pub fn write_gnuplot_matrix<W: Write>(mut w: W, result: &SweepResult) -> Result<()> {
    let p = &result.provenance;
    if matches!(p.mode, SweepMode::Both) {
        return Err(Error::domain(
            "matrix export needs a single mode; rerun with mode paper or exact".to_string(),
        ));
    }
    let times: std::collections::BTreeSet<u64> =
        result.rows.iter().map(|row| row.t.to_bits()).collect();
    if times.len() != 1 {
        return Err(Error::domain(
            "matrix export needs a single time point per (lambda1, r)".to_string(),
        ));
    }
    let (n_l, n_r) = (p.lambda1_grid.len(), p.r_grid.len());
    if result.rows.len() != n_l * n_r {
        return Err(Error::Inconsistency(format!(
            "matrix export: {} rows do not tile a {n_l} x {n_r} grid",
            result.rows.len()
        )));
    }

    let io_err = |e: io::Error| Error::domain(format!("write failed: {e}"));
    for (key, value) in provenance_comments(p) {
        writeln!(w, "# {key} = {value}").map_err(io_err)?;
    }
    write!(w, "{}", n_r).map_err(io_err)?;
    for &r in &p.r_grid {
        write!(w, " {}", fmt_float(r)).map_err(io_err)?;
    }
    writeln!(w).map_err(io_err)?;
    for (li, &lambda1) in p.lambda1_grid.iter().enumerate() {
        write!(w, "{}", fmt_float(lambda1)).map_err(io_err)?;
        for ri in 0..n_r {
            match result.rows[li * n_r + ri].dem {
                Some(dem) => write!(w, " {}", fmt_float(dem)).map_err(io_err)?,
                None => write!(w, " NaN").map_err(io_err)?,
            }
        }
        writeln!(w).map_err(io_err)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Single-point DEM report: JSON.
// ---------------------------------------------------------------------------

/// Input echo of a single-point entanglement computation.
#[derive(Debug, Clone, PartialEq)]
pub struct DemInputs {
    /// Field displacement amplitude.
    pub theta: Complex64,
    /// Squeeze direction angle.
    pub squeeze_phase: f64,
    /// Squeeze magnitude.
    pub r: f64,
    /// Excited-state weight of the initial atom.
    pub lambda1: f64,
    /// Coupling constant.
    pub g: f64,
    /// Atomic level splitting.
    pub omega0: f64,
    /// Evaluation time.
    pub t: f64,
    /// Truncation tolerance.
    pub tail_eps: f64,
    /// Truncation ceiling.
    pub max_cutoff: usize,
    /// Entropy log base.
    pub base: LogBase,
    /// Library version.
    pub version: String,
}

/// One computed mode within a DEM report.
#[derive(Debug, Clone, PartialEq)]
pub struct DemPoint {
    /// Computation mode.
    pub mode: Mode,
    /// Entanglement degree.
    pub dem: f64,
    /// Atom-side entropy term.
    pub s_atom: f64,
    /// Field entropy (exact mode).
    pub s_field: Option<f64>,
    /// Joint entropy (exact mode).
    pub s_joint: Option<f64>,
    /// Larger closed-form eigenvalue (paper mode).
    pub kappa_plus: Option<f64>,
    /// Smaller closed-form eigenvalue (paper mode).
    pub kappa_minus: Option<f64>,
    /// Truncation tail of the distribution used.
    pub tail_mass: f64,
    /// Truncation cutoff of the distribution used.
    pub cutoff: usize,
    /// |dem - dense-path dem| when dense verification ran (exact mode only).
    pub dense_gap: Option<f64>,
}

/// A single-point entanglement report: inputs plus one entry per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct DemReport {
    /// Echo of the inputs.
    pub inputs: DemInputs,
    /// Computed values, one per requested mode.
    pub results: Vec<DemPoint>,
}

/// Serialize a DEM report as JSON.
pub fn dem_json(report: &DemReport) -> String {
    let inputs = &report.inputs;
    let mut out = String::from("{\n  \"inputs\": {");
    push_json_field(&mut out, "theta_re", &json_number(inputs.theta.re), true);
    push_json_field(&mut out, "theta_im", &json_number(inputs.theta.im), false);
    push_json_field(&mut out, "squeeze_phase", &json_number(inputs.squeeze_phase), false);
    push_json_field(&mut out, "r", &json_number(inputs.r), false);
    push_json_field(&mut out, "lambda1", &json_number(inputs.lambda1), false);
    push_json_field(&mut out, "g", &json_number(inputs.g), false);
    push_json_field(&mut out, "omega0", &json_number(inputs.omega0), false);
    push_json_field(&mut out, "t", &json_number(inputs.t), false);
    push_json_field(&mut out, "tail_eps", &json_number(inputs.tail_eps), false);
    push_json_field(&mut out, "max_cutoff", &inputs.max_cutoff.to_string(), false);
    push_json_field(&mut out, "base", &json_string(&inputs.base.to_string()), false);
    push_json_field(&mut out, "version", &json_string(&inputs.version), false);
    out.push_str("},\n  \"results\": [\n");
    for (i, point) in report.results.iter().enumerate() {
        out.push_str("    {");
        push_json_field(&mut out, "mode", &json_string(&point.mode.to_string()), true);
        push_json_field(&mut out, "dem", &json_number(point.dem), false);
        push_json_field(&mut out, "s_atom", &json_number(point.s_atom), false);
        push_json_field(&mut out, "s_field", &json_optional_number(point.s_field), false);
        push_json_field(&mut out, "s_joint", &json_optional_number(point.s_joint), false);
        push_json_field(&mut out, "kappa_plus", &json_optional_number(point.kappa_plus), false);
        push_json_field(&mut out, "kappa_minus", &json_optional_number(point.kappa_minus), false);
        push_json_field(&mut out, "tail_mass", &json_number(point.tail_mass), false);
        push_json_field(&mut out, "cutoff", &point.cutoff.to_string(), false);
        push_json_field(&mut out, "dense_gap", &json_optional_number(point.dense_gap), false);
        out.push('}');
        if i + 1 < report.results.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

/// Parse the JSON produced by [`dem_json`].
pub fn parse_dem_json(text: &str) -> Result<DemReport> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::domain(format!("json parse: {e}")))?;
    let i = &value["inputs"];
    let inputs = DemInputs {
        theta: Complex64::new(json_f64(i, "theta_re")?, json_f64(i, "theta_im")?),
        squeeze_phase: json_f64(i, "squeeze_phase")?,
        r: json_f64(i, "r")?,
        lambda1: json_f64(i, "lambda1")?,
        g: json_f64(i, "g")?,
        omega0: json_f64(i, "omega0")?,
        t: json_f64(i, "t")?,
        tail_eps: json_f64(i, "tail_eps")?,
        max_cutoff: json_usize(i, "max_cutoff")?,
        base: json_str(i, "base")?.parse::<LogBase>()?,
        version: json_str(i, "version")?,
    };
    let results = value["results"]
        .as_array()
        .ok_or_else(|| Error::domain("json: results is not an array".to_string()))?
        .iter()
        .map(|point| {
            Ok(DemPoint {
                mode: json_str(point, "mode")?.parse::<Mode>()?,
                dem: json_f64(point, "dem")?,
                s_atom: json_f64(point, "s_atom")?,
                s_field: json_opt_f64(point, "s_field")?,
                s_joint: json_opt_f64(point, "s_joint")?,
                kappa_plus: json_opt_f64(point, "kappa_plus")?,
                kappa_minus: json_opt_f64(point, "kappa_minus")?,
                tail_mass: json_f64(point, "tail_mass")?,
                cutoff: json_usize(point, "cutoff")?,
                dense_gap: json_opt_f64(point, "dense_gap")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DemReport { inputs, results })
}

// ---------------------------------------------------------------------------
// Shared helpers.
// ---------------------------------------------------------------------------

/// Read a CSV body, skipping `#` comments, checking the header matches.
fn read_csv(text: &str, expected_header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_parse_error)?;
    let found: Vec<&str> = header.iter().collect();
    if found != expected_header {
        return Err(Error::domain(format!(
            "csv header mismatch: expected {expected_header:?}, found {found:?}"
        )));
    }
    reader.records().map(|r| r.map_err(csv_parse_error)).collect()
}

fn json_number(x: f64) -> String {
    fmt_float(x)
}

fn json_optional_number(x: Option<f64>) -> String {
    x.map(json_number).unwrap_or_else(|| "null".to_string())
}

fn json_number_array(values: &[f64]) -> String {
    let inner: Vec<String> = values.iter().map(|&v| json_number(v)).collect();
    format!("[{}]", inner.join(", "))
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn push_json_field(out: &mut String, key: &str, rendered_value: &str, first: bool) {
    if !first {
        out.push_str(", ");
    }
    out.push('"');
    out.push_str(key);
    out.push_str("\": ");
    out.push_str(rendered_value);
}

fn json_f64(value: &serde_json::Value, key: &str) -> Result<f64> {
    value[key]
        .as_f64()
        .ok_or_else(|| Error::domain(format!("json: '{key}' is not a number")))
}

fn json_f64_array(value: &serde_json::Value, key: &str) -> Result<Vec<f64>> {
    value[key]
        .as_array()
        .ok_or_else(|| Error::domain(format!("json: '{key}' is not an array")))?
        .iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| Error::domain(format!("json: '{key}' has a non-number entry")))
        })
        .collect()
}

fn json_opt_f64(value: &serde_json::Value, key: &str) -> Result<Option<f64>> {
    match &value[key] {
        serde_json::Value::Null => Ok(None),
        v => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| Error::domain(format!("json: '{key}' is not a number or null"))),
    }
}

fn json_usize(value: &serde_json::Value, key: &str) -> Result<usize> {
    value[key]
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::domain(format!("json: '{key}' is not an unsigned integer")))
}

fn json_opt_usize(value: &serde_json::Value, key: &str) -> Result<Option<usize>> {
    match &value[key] {
        serde_json::Value::Null => Ok(None),
        v => v
            .as_u64()
            .map(|v| Some(v as usize))
            .ok_or_else(|| Error::domain(format!("json: '{key}' is not an integer or null"))),
    }
}

fn json_str(value: &serde_json::Value, key: &str) -> Result<String> {
    value[key]
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::domain(format!("json: '{key}' is not a string")))
}

fn json_opt_str(value: &serde_json::Value, key: &str) -> Option<String> {
    value[key].as_str().map(str::to_string)
}
