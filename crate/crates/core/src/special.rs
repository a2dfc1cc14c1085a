//! Numerically stable Hermite polynomials and log-factorials.
//!
//! The squeezed-field photon distribution needs |H_n(x)|^2 for degrees in the
//! thousands, where the raw polynomial values overflow `f64` (roughly past
//! n = 150 for arguments of order one). Values are therefore carried in
//! log-magnitude/phase form: the recurrence itself runs on ordinary doubles
//! and is rescaled whenever the magnitudes approach the representable range.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Rescale once the running recurrence values exceed this magnitude.
const RESCALE_ABOVE: f64 = 1e120;
/// ... or once both drop below this magnitude (without being exactly zero).
const RESCALE_BELOW: f64 = 1e-120;

/// A physicists' Hermite polynomial value H_n(x) in log-magnitude/phase form.
///
/// The represented value is `phase * exp(log_magnitude)`. Exact zeros (for
/// example H_n(0) at odd n) are encoded as `log_magnitude = -inf` with
/// `phase = 1`, so that squared magnitudes are exactly zero rather than tiny.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledHermite {
    /// Polynomial degree.
    pub n: usize,
    /// Natural log of |H_n(x)|; `-inf` encodes an exact zero.
    pub log_magnitude: f64,
    /// Unit-modulus factor; exactly `1` or `-1` for real arguments.
    pub phase: Complex64,
}

impl ScaledHermite {
    /// Reconstruct the plain value. Overflows to infinity for large degrees;
    /// intended for small-degree checks and diagnostics.
    pub fn value(&self) -> Complex64 {
        self.phase * self.log_magnitude.exp()
    }

    /// Natural log of |H_n(x)|^2, with exact zeros mapping to `-inf`.
    pub fn log_squared_magnitude(&self) -> f64 {
        2.0 * self.log_magnitude
    }
}

/// State of the rescaled three-term recurrence.
struct Recurrence {
    x2: Complex64,
    prev: Complex64,
    cur: Complex64,
    log_scale: f64,
    degree: usize,
}

impl Recurrence {
    fn new(x: Complex64) -> Self {
        Recurrence {
            x2: 2.0 * x,
            prev: Complex64::new(0.0, 0.0),
            cur: Complex64::new(1.0, 0.0),
            log_scale: 0.0,
            degree: 0,
        }
    }

    /// H_{k+1} = 2x H_k - 2k H_{k-1}, then rescale if needed.
    fn advance(&mut self) {
        let k = self.degree as f64;
        let next = self.x2 * self.cur - 2.0 * k * self.prev;
        self.prev = self.cur;
        self.cur = next;
        self.degree += 1;

        let mag = self.cur.norm().max(self.prev.norm());
        if mag > RESCALE_ABOVE || (mag > 0.0 && mag < RESCALE_BELOW) {
            self.prev /= mag;
            self.cur /= mag;
            self.log_scale += mag.ln();
        }
    }

    /// Snapshot of the current degree in log/phase form.
    fn emit(&self) -> ScaledHermite {
        let mag = self.cur.norm();
        if mag == 0.0 {
            return ScaledHermite {
                n: self.degree,
                log_magnitude: f64::NEG_INFINITY,
                phase: Complex64::new(1.0, 0.0),
            };
        }
        // Real arguments keep the recurrence exactly real; report the phase
        // as an exact sign instead of a rounded re/|z| quotient.
        let phase = if self.cur.im == 0.0 {
            Complex64::new(self.cur.re.signum(), 0.0)
        } else {
            self.cur / mag
        };
        ScaledHermite {
            n: self.degree,
            log_magnitude: mag.ln() + self.log_scale,
            phase,
        }
    }
}

fn check_finite(x: Complex64) -> Result<()> {
    if x.re.is_finite() && x.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("hermite argument must be finite, got {x}")))
    }
}

/// Evaluate H_n(x) in scaled form.
///
/// Stable for degrees well past 2000; the recurrence is rescaled in place so
/// the working values never overflow.
pub fn hermite(n: usize, x: Complex64) -> Result<ScaledHermite> {
    check_finite(x)?;
    let mut rec = Recurrence::new(x);
    while rec.degree < n {
        rec.advance();
    }
    Ok(rec.emit())
}

/// Evaluate H_0(x) ..= H_{n_max}(x) in one pass.
///
/// The photon distribution consumes every degree up to the cutoff, so a
/// single sweep of the recurrence is preferred over `n_max` restarts.
pub fn hermite_sequence(n_max: usize, x: Complex64) -> Result<Vec<ScaledHermite>> {
    check_finite(x)?;
    let mut rec = Recurrence::new(x);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(rec.emit());
    while rec.degree < n_max {
        rec.advance();
        out.push(rec.emit());
    }
    Ok(out)
}

/// ln(n!) by cumulative summation; exact 0 for n = 0 and n = 1.
pub fn log_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// ln(k!) for k = 0 ..= n_max as a table, for callers that need every degree.
pub fn log_factorial_table(n_max: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    table.push(acc);
    for k in 1..=n_max {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}
