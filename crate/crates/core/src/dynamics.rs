//! Resonant Jaynes-Cummings dynamics: Rabi frequencies, the excited/ground
//! transition probabilities c(t) and s(t), and the four time-dependent
//! coefficients of the closed-form joint-state expression used by the
//! closed-form entanglement measure.
//!
//! All sums run in fixed ascending photon-number order so identical inputs
//! produce bit-identical results regardless of how callers parallelize around
//! this module. Compensated (Kahan) accumulation is available behind a flag
//! but off by default: reproducibility of recorded fixtures outweighs the
//! last few ulps here.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::photon::PhotonDistribution;

/// Coupling and frequency parameters of the resonant model (hbar = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Atom-field coupling constant (inverse time); must be positive.
    pub g: f64,
    /// Shared atom/field frequency (inverse time). It cancels out of every
    /// population, coefficient, and entropy this crate computes, but is kept
    /// so the evolved amplitudes carry physically complete phases.
    pub omega0: f64,
}

impl ModelParams {
    /// Validate and build; `g` must be finite and positive, `omega0` finite.
    pub fn new(g: f64, omega0: f64) -> Result<Self> {
        if !g.is_finite() || g <= 0.0 {
            return Err(Error::domain(format!("coupling g must be finite and positive, got {g}")));
        }
        if !omega0.is_finite() {
            return Err(Error::domain(format!("omega0 must be finite, got {omega0}")));
        }
        Ok(ModelParams { g, omega0 })
    }
}

impl Default for ModelParams {
    /// g = 1, omega0 = 1: time measured in units of the coupling.
    fn default() -> Self {
        ModelParams { g: 1.0, omega0: 1.0 }
    }
}

/// Diagonal initial atom state: weight `lambda0` on the ground state and
/// `lambda1` on the excited state, no coherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomMixture {
    /// Ground-state weight.
    pub lambda0: f64,
    /// Excited-state weight.
    pub lambda1: f64,
}

impl AtomMixture {
    /// Validate both weights and their sum (must be 1 within 1e-12).
    pub fn new(lambda0: f64, lambda1: f64) -> Result<Self> {
        for (name, v) in [("lambda0", lambda0), ("lambda1", lambda1)] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if (lambda0 + lambda1 - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "atom weights must sum to 1, got {lambda0} + {lambda1}"
            )));
        }
        Ok(AtomMixture { lambda0, lambda1 })
    }

    /// Build from the excited-state weight alone.
    pub fn from_excited_weight(lambda1: f64) -> Result<Self> {
        if !lambda1.is_finite() || !(0.0..=1.0).contains(&lambda1) {
            return Err(Error::domain(format!("lambda1 must lie in [0, 1], got {lambda1}")));
        }
        AtomMixture::new(1.0 - lambda1, lambda1)
    }
}

/// The four time-dependent scalars of the closed-form joint-state block.
///
/// `e1` and `e4` are the population-like entries; `e2` and `e3` are the
/// purely imaginary coherences with `e3 = -e2` identically. The formulas are
/// reproduced literally from their published form, including the known quirk
/// that `e1 + e4` need not equal 1 (see `lifted_coefficients`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftedCoefficients {
    /// Evaluation time.
    pub t: f64,
    /// First diagonal entry.
    pub e1: f64,
    /// Second diagonal entry.
    pub e4: f64,
    /// Off-diagonal coherence (purely imaginary).
    pub e2: Complex64,
    /// Mirror coherence, exactly `-e2`.
    pub e3: Complex64,
}

impl LiftedCoefficients {
    /// The product e2*e3 = |e2|^2, a nonnegative real.
    pub fn coherence_squared(&self) -> f64 {
        self.e2.norm_sqr()
    }
}

/// Accumulation strategy for the photon-number sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    /// Plain ascending accumulation; the default, pinned by recorded fixtures.
    #[default]
    Plain,
    /// Kahan compensated accumulation for callers chasing the last ulps.
    Compensated,
}

/// Running sum in either plain or compensated mode.
struct Accumulator {
    mode: Summation,
    sum: f64,
    carry: f64,
}

impl Accumulator {
    fn new(mode: Summation) -> Self {
        Accumulator { mode, sum: 0.0, carry: 0.0 }
    }

    fn add(&mut self, x: f64) {
        match self.mode {
            Summation::Plain => self.sum += x,
            Summation::Compensated => {
                let y = x - self.carry;
                let t = self.sum + y;
                self.carry = (t - self.sum) - y;
                self.sum = t;
            }
        }
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// Rabi frequency of the n-photon sector: g * sqrt(n + 1).
pub fn rabi_frequency(params: &ModelParams, n: usize) -> f64 {
    params.g * ((n as f64) + 1.0).sqrt()
}

/// Probability of remaining excited at time t, starting excited:
/// c(t) = sum_n P(n) cos^2(Omega_n t). At t = 0 this is the retained mass
/// of the truncated distribution (1 minus the tail).
pub fn transition_c(dist: &PhotonDistribution, params: &ModelParams, t: f64) -> f64 {
    transition_c_with(dist, params, t, Summation::Plain)
}

/// [`transition_c`] with an explicit accumulation strategy.
pub fn transition_c_with(
    dist: &PhotonDistribution,
    params: &ModelParams,
    t: f64,
    summation: Summation,
) -> f64 {
    let mut acc = Accumulator::new(summation);
    for (n, p) in dist.probs.iter().enumerate() {
        let (_, cos) = (rabi_frequency(params, n) * t).sin_cos();
        acc.add(p * (cos * cos));
    }
    acc.value()
}

/// Probability of having flipped to the ground state at time t:
/// s(t) = sum_n P(n) sin^2(Omega_n t).
pub fn transition_s(dist: &PhotonDistribution, params: &ModelParams, t: f64) -> f64 {
    transition_s_with(dist, params, t, Summation::Plain)
}

/// [`transition_s`] with an explicit accumulation strategy.
pub fn transition_s_with(
    dist: &PhotonDistribution,
    params: &ModelParams,
    t: f64,
    summation: Summation,
) -> f64 {
    let mut acc = Accumulator::new(summation);
    for (n, p) in dist.probs.iter().enumerate() {
        let (sin, _) = (rabi_frequency(params, n) * t).sin_cos();
        acc.add(p * (sin * sin));
    }
    acc.value()
}

/// The four closed-form joint-state coefficients at time t:
///
/// e1 = sum_n [ lambda0 P(n+1) sin^2(Omega_n t) + lambda1 P(n) cos^2(Omega_n t) ]
/// e2 = (i/2) sum_n sin(2 Omega_n t) [ lambda1 P(n) - lambda0 P(n+1) ]
/// e3 = -e2
/// e4 = sum_n [ lambda0 P(n) sin^2(Omega_n t) + lambda1 P(n+1) cos^2(Omega_n t) ]
///
/// These are implemented exactly as published, with no correction. Note the
/// published e4 is *not* the physical ground population: at t = 0 it gives
/// lambda1 (1 - P(0)) rather than lambda0, so e1 + e4 != 1 in general. The
/// exact-evolution oracle provides the physically consistent populations;
/// this function is deliberately left faithful to the printed form.
pub fn lifted_coefficients(
    dist: &PhotonDistribution,
    atom: &AtomMixture,
    params: &ModelParams,
    t: f64,
) -> LiftedCoefficients {
    lifted_coefficients_with(dist, atom, params, t, Summation::Plain)
}

/// [`lifted_coefficients`] with an explicit accumulation strategy.
pub fn lifted_coefficients_with(
    dist: &PhotonDistribution,
    atom: &AtomMixture,
    params: &ModelParams,
    t: f64,
    summation: Summation,
) -> LiftedCoefficients {
    let mut e1 = Accumulator::new(summation);
    let mut e4 = Accumulator::new(summation);
    let mut w = Accumulator::new(summation);
    for (n, &p) in dist.probs.iter().enumerate() {
        let p_next = dist.prob(n + 1);
        let (sin, cos) = (rabi_frequency(params, n) * t).sin_cos();
        let (sin_sq, cos_sq) = (sin * sin, cos * cos);
        let sin_two = 2.0 * sin * cos;
        e1.add(atom.lambda0 * p_next * sin_sq + atom.lambda1 * p * cos_sq);
        e4.add(atom.lambda0 * p * sin_sq + atom.lambda1 * p_next * cos_sq);
        w.add(sin_two * (atom.lambda1 * p - atom.lambda0 * p_next));
    }
    let half_w = 0.5 * w.value();
    let e2 = Complex64::new(0.0, half_w);
    LiftedCoefficients { t, e1: e1.value(), e4: e4.value(), e2, e3: -e2 }
}
