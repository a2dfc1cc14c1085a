//! Shared fixtures for the criterion benchmarks.

// The displacement fixture is frozen at full 17-significant-digit precision.
#![allow(clippy::excessive_precision)]

use num_complex::Complex64;
use sjcm::{LogBase, ModelParams, SqueezedField, SweepMode, SweepSpec, TimeSpec};

/// The displacement magnitude used across every benchmark: sqrt 5.
pub const THETA: f64 = 2.23606797749978969;

/// Field preparation at the benchmark displacement.
pub fn field(r: f64) -> SqueezedField {
    SqueezedField::new(Complex64::new(THETA, 0.0), r, 0.0).expect("valid field")
}

/// A small but representative sweep: 5 x 5 grid, single revival-time point.
pub fn small_sweep(mode: SweepMode) -> SweepSpec {
    SweepSpec {
        lambda1_grid: (0..5).map(|i| 0.125 + 0.1875 * i as f64).collect(),
        r_grid: (0..5).map(|i| 0.5 * i as f64).collect(),
        time_spec: TimeSpec::Revival,
        theta: Complex64::new(THETA, 0.0),
        squeeze_phase: 0.0,
        params: ModelParams::default(),
        mode,
        tail_eps: 1e-12,
        max_cutoff: 8192,
        base: LogBase::E,
    }
}
