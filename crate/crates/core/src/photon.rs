//! Photon-number statistics of a squeezed coherent field state.
//!
//! The distribution is evaluated entirely in the log domain: each term
//! combines a scaled Hermite magnitude, a log-factorial, and a real exponent,
//! so no intermediate can overflow even at cutoffs in the thousands. The
//! truncation tail is never renormalized away — it is bounded explicitly and
//! carried on the result so downstream sums see exactly how much mass the
//! cutoff discarded.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{hermite_sequence, log_factorial_table};

/// Below this squeeze magnitude the analytic coherent (Poisson) limit is used
/// instead of the squeezed formula, which divides by sqrt(2*mu*nu) and loses
/// all precision as nu -> 0.
pub const COHERENT_CROSSOVER: f64 = 1e-8;

/// Default bound on the probability mass a truncation may discard.
pub const DEFAULT_TAIL_EPS: f64 = 1e-12;

/// Default ceiling for the truncation search. Large enough for squeeze
/// magnitudes up to r = 3 at the default displacement under the default
/// tail bound.
pub const DEFAULT_MAX_CUTOFF: usize = 8192;

/// Smallest truncation the cutoff search will start from.
const MIN_START_CUTOFF: usize = 16;

/// Preparation of a squeezed coherent field state.
///
/// `theta` is the coherent displacement amplitude, `r` the squeeze magnitude,
/// and `squeeze_phase` the squeeze direction (an independent angle; the
/// displacement phase lives in `theta` itself). The derived quantities are
/// mu = cosh r, nu = e^{i phase} sinh r, beta = mu theta + nu conj(theta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedField {
    theta: Complex64,
    r: f64,
    squeeze_phase: f64,
}

impl SqueezedField {
    /// Build a field preparation, validating finiteness and r >= 0.
    /// The squeeze phase is reduced into [0, 2*pi).
    pub fn new(theta: Complex64, r: f64, squeeze_phase: f64) -> Result<Self> {
        if !(theta.re.is_finite() && theta.im.is_finite()) {
            return Err(Error::domain(format!("coherent amplitude must be finite, got {theta}")));
        }
        if !r.is_finite() || r < 0.0 {
            return Err(Error::domain(format!(
                "squeeze magnitude must be finite and non-negative, got {r}"
            )));
        }
        if !squeeze_phase.is_finite() {
            return Err(Error::domain("squeeze phase must be finite".to_string()));
        }
        Ok(SqueezedField {
            theta,
            r,
            squeeze_phase: squeeze_phase.rem_euclid(std::f64::consts::TAU),
        })
    }

    /// Coherent state |theta>: the r = 0 special case.
    pub fn coherent(theta: Complex64) -> Result<Self> {
        SqueezedField::new(theta, 0.0, 0.0)
    }

    /// Coherent displacement amplitude.
    pub fn theta(&self) -> Complex64 {
        self.theta
    }

    /// Squeeze magnitude.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Squeeze direction in [0, 2*pi).
    pub fn squeeze_phase(&self) -> f64 {
        self.squeeze_phase
    }

    /// mu = cosh r.
    pub fn mu(&self) -> f64 {
        self.r.cosh()
    }

    /// nu = e^{i phase} sinh r.
    pub fn nu(&self) -> Complex64 {
        Complex64::from_polar(self.r.sinh(), self.squeeze_phase)
    }

    /// beta = mu theta + nu conj(theta).
    pub fn beta(&self) -> Complex64 {
        self.mu() * self.theta + self.nu() * self.theta.conj()
    }

    /// Mean photon number |theta|^2 + sinh^2 r.
    pub fn mean_photon_number(&self) -> f64 {
        self.theta.norm_sqr() + self.r.sinh().powi(2)
    }

    /// Photon-number variance |mu theta - nu conj(theta)|^2 + 2 mu^2 |nu|^2.
    pub fn photon_number_variance(&self) -> f64 {
        let spread = self.mu() * self.theta - self.nu() * self.theta.conj();
        spread.norm_sqr() + 2.0 * (self.mu() * self.r.sinh()).powi(2)
    }

    /// Real exponent of the distribution's Gaussian prefactor:
    /// -|beta|^2 + Re(conj(nu) beta^2)/mu. Shared by the probability formula
    /// and the amplitude expansion (where half of it seeds the recurrence).
    /// The conjugate matters only for a nonzero squeeze phase; with plain nu
    /// the distribution loses normalization entirely off the real axis.
    pub(crate) fn log_prefactor_exponent(&self) -> f64 {
        let beta = self.beta();
        -beta.norm_sqr() + (self.nu().conj() * beta * beta).re / self.mu()
    }
}

/// A photon-number distribution truncated at a finite cutoff.
///
/// `probs[n]` is P(n) for n = 0..=cutoff, raw (not renormalized); `tail_mass`
/// is an upper bound on the probability discarded beyond the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    /// P(0) ..= P(cutoff), every entry >= 0.
    pub probs: Vec<f64>,
    /// Highest photon number retained.
    pub cutoff: usize,
    /// Upper bound on the mass beyond `cutoff`.
    pub tail_mass: f64,
}

impl PhotonDistribution {
    /// Sum of the retained probabilities (ascending order, fixed).
    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Retained mass plus the tail bound; 1 up to evaluation error.
    pub fn total_mass(&self) -> f64 {
        self.sum() + self.tail_mass
    }

    /// P(n), with photon numbers beyond the cutoff reading as zero.
    pub fn prob(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }
}

fn validate_truncation_request(tail_eps: f64, max_cutoff: usize) -> Result<()> {
    if !(tail_eps > 0.0 && tail_eps < 1.0) {
        return Err(Error::domain(format!("tail_eps must lie in (0, 1), got {tail_eps}")));
    }
    if max_cutoff < MIN_START_CUTOFF {
        return Err(Error::domain(format!(
            "max_cutoff must be at least {MIN_START_CUTOFF}, got {max_cutoff}"
        )));
    }
    Ok(())
}

/// Photon-number distribution of a squeezed coherent state.
///
/// The cutoff starts near mean + 10 sigma and doubles until the tail bound
/// drops below `tail_eps`; exhausting `max_cutoff` first is a truncation
/// error carrying the achieved tail. Squeeze magnitudes below
/// [`COHERENT_CROSSOVER`] route to [`coherent_distribution`].
pub fn photon_distribution(
    field: &SqueezedField,
    tail_eps: f64,
    max_cutoff: usize,
) -> Result<PhotonDistribution> {
    photon_distribution_with_floor(field, tail_eps, max_cutoff, MIN_START_CUTOFF)
}

/// [`photon_distribution`] with a floor on the starting cutoff, for callers
/// that must cover a fixed index window (e.g. a figure's n-axis) even when
/// the adaptive policy would truncate earlier.
pub(crate) fn photon_distribution_with_floor(
    field: &SqueezedField,
    tail_eps: f64,
    max_cutoff: usize,
    floor: usize,
) -> Result<PhotonDistribution> {
    validate_truncation_request(tail_eps, max_cutoff)?;
    if floor > max_cutoff {
        return Err(Error::domain(format!(
            "cutoff floor {floor} exceeds max_cutoff {max_cutoff}"
        )));
    }
    if field.r() < COHERENT_CROSSOVER {
        return coherent_distribution_with_floor(field.theta(), tail_eps, max_cutoff, floor);
    }

    let sigma = field.photon_number_variance().sqrt();
    let start = (field.mean_photon_number() + 10.0 * sigma).ceil() as usize;
    let mut cutoff = start.clamp(MIN_START_CUTOFF.max(floor), max_cutoff);
    loop {
        let probs = squeezed_probs(field, cutoff)?;
        let tail = squeezed_tail_bound(&probs, field.r());
        if tail < tail_eps {
            return Ok(PhotonDistribution { probs, cutoff, tail_mass: tail });
        }
        if cutoff == max_cutoff {
            return Err(Error::Truncation { tail_mass: tail, cutoff, tail_eps });
        }
        cutoff = (cutoff * 2).min(max_cutoff);
    }
}

/// Poisson distribution with mean |theta|^2, same truncation contract as the
/// squeezed evaluator.
pub fn coherent_distribution(
    theta: Complex64,
    tail_eps: f64,
    max_cutoff: usize,
) -> Result<PhotonDistribution> {
    coherent_distribution_with_floor(theta, tail_eps, max_cutoff, MIN_START_CUTOFF)
}

fn coherent_distribution_with_floor(
    theta: Complex64,
    tail_eps: f64,
    max_cutoff: usize,
    floor: usize,
) -> Result<PhotonDistribution> {
    validate_truncation_request(tail_eps, max_cutoff)?;
    if floor > max_cutoff {
        return Err(Error::domain(format!(
            "cutoff floor {floor} exceeds max_cutoff {max_cutoff}"
        )));
    }
    if !(theta.re.is_finite() && theta.im.is_finite()) {
        return Err(Error::domain(format!("coherent amplitude must be finite, got {theta}")));
    }
    let mean = theta.norm_sqr();
    if mean == 0.0 && floor <= MIN_START_CUTOFF {
        // Vacuum: exactly P(0) = 1 with no tail.
        return Ok(PhotonDistribution { probs: vec![1.0], cutoff: 0, tail_mass: 0.0 });
    }
    if mean == 0.0 {
        // Vacuum padded to a requested window.
        let mut probs = vec![0.0; floor + 1];
        probs[0] = 1.0;
        return Ok(PhotonDistribution { probs, cutoff: floor, tail_mass: 0.0 });
    }

    let start = (mean + 10.0 * mean.sqrt()).ceil() as usize;
    let mut cutoff = start.clamp(MIN_START_CUTOFF.max(floor), max_cutoff);
    loop {
        let log_fact = log_factorial_table(cutoff);
        let log_mean = mean.ln();
        let probs: Vec<f64> = (0..=cutoff)
            .map(|n| (-mean + (n as f64) * log_mean - log_fact[n]).exp())
            .collect();
        // Beyond the mean the term ratio mean/(n+1) decreases monotonically,
        // so a one-step geometric series bounds the discarded mass.
        let ratio = mean / (cutoff as f64 + 1.0);
        let tail = if ratio < 1.0 {
            probs[cutoff] * ratio / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        if tail < tail_eps {
            return Ok(PhotonDistribution { probs, cutoff, tail_mass: tail });
        }
        if cutoff == max_cutoff {
            return Err(Error::Truncation { tail_mass: tail, cutoff, tail_eps });
        }
        cutoff = (cutoff * 2).min(max_cutoff);
    }
}

/// Log-domain evaluation of the squeezed photon probabilities up to `cutoff`:
/// ln P(n) = -ln mu - ln n! + n ln(|nu| / (2 mu)) + 2 ln|H_n(beta / sqrt(2 mu nu))|
///           - |beta|^2 + Re(nu beta^2)/mu.
fn squeezed_probs(field: &SqueezedField, cutoff: usize) -> Result<Vec<f64>> {
    let mu = field.mu();
    let nu = field.nu();
    let argument = field.beta() / (2.0 * mu * nu).sqrt();
    let exponent = field.log_prefactor_exponent();
    let log_ratio = (nu.norm() / (2.0 * mu)).ln();
    let log_mu = mu.ln();

    let hermites = hermite_sequence(cutoff, argument)?;
    let log_fact = log_factorial_table(cutoff);
    Ok((0..=cutoff)
        .map(|n| {
            let log_p = -log_mu - log_fact[n]
                + (n as f64) * log_ratio
                + hermites[n].log_squared_magnitude()
                + exponent;
            log_p.exp()
        })
        .collect())
}

/// Upper-bound the probability mass beyond the last retained entry.
///
/// The far tail of a squeezed distribution is geometric — the amplitude
/// recurrence gives |c_{n+1}| ~ tanh(r) |c_{n-1}|, so probabilities decay with
/// per-step envelope ratio approaching tanh(r) from below — but individual
/// entries oscillate (phase-space interference) and can dip arbitrarily close
/// to zero, so point ratios are useless as decay estimates. Instead: anchor
/// an envelope at the maximum M over a boundary window (a window-wide maximum
/// is immune to dips), measure the average per-step decay of the window-half
/// sums, floor it with the asymptotic ratio tanh(r), and sum the geometric
/// envelope through M past the cutoff. Infinity means "no decaying envelope
/// visible here" and makes the caller enlarge the cutoff.
fn squeezed_tail_bound(probs: &[f64], r: f64) -> f64 {
    let len = probs.len();
    let window = (len / 4).clamp(8, 64).min(len);
    let start = len - window;
    // Envelope anchor: last index attaining the window maximum.
    let mut peak = start;
    for i in start..len {
        if probs[i] >= probs[peak] {
            peak = i;
        }
    }
    let anchor = probs[peak];
    if anchor == 0.0 {
        // The entire window underflowed; anything beyond it is below the
        // smallest subnormal times the envelope ratio.
        return 0.0;
    }
    let half = window / 2;
    let lower: f64 = probs[start..start + half].iter().sum();
    let upper: f64 = probs[start + half..].iter().sum();
    if lower <= 0.0 {
        // Mass rising out of an underflowed region: no trustworthy envelope.
        return f64::INFINITY;
    }
    let measured = (upper / lower).powf(1.0 / half as f64);
    let q = r.tanh().max(measured);
    if q >= 1.0 || q.is_nan() {
        return f64::INFINITY;
    }
    anchor * q.powi((len - peak) as i32) / (1.0 - q)
}

/// Mean and variance of the truncated vector (raw sums, no renormalization).
pub fn distribution_moments(dist: &PhotonDistribution) -> (f64, f64) {
    let mean: f64 = dist.probs.iter().enumerate().map(|(n, p)| (n as f64) * p).sum();
    let variance: f64 = dist
        .probs
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let d = n as f64 - mean;
            d * d * p
        })
        .sum();
    (mean, variance)
}

/// Interior local maxima of `values[window_lo ..= window_hi]` with topographic
/// prominence above `min_prominence`.
///
/// A candidate rises strictly from the left and does not rise to the right
/// (the first index of a flat plateau counts once). Prominence is measured
/// against the higher of the two key saddles found by walking outward until
/// strictly higher ground.
pub fn interior_local_maxima(
    values: &[f64],
    window_lo: usize,
    window_hi: usize,
    min_prominence: f64,
) -> Vec<usize> {
    let hi = window_hi.min(values.len().saturating_sub(1));
    if window_lo >= hi {
        return Vec::new();
    }
    let v = &values[window_lo..=hi];
    let mut out = Vec::new();
    for i in 1..v.len() - 1 {
        if !(v[i] > v[i - 1] && v[i] >= v[i + 1]) {
            continue;
        }
        let mut min_left = v[i];
        let mut j = i;
        while j > 0 && v[j - 1] <= v[i] {
            j -= 1;
            min_left = min_left.min(v[j]);
        }
        let mut min_right = v[i];
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] <= v[i] {
            j += 1;
            min_right = min_right.min(v[j]);
        }
        let prominence = v[i] - min_left.max(min_right);
        if prominence > min_prominence {
            out.push(window_lo + i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT5: f64 = 2.23606797749978969;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn field_invariants() {
        let f = SqueezedField::new(re(SQRT5), 1.3, 0.0).unwrap();
        // mu^2 - |nu|^2 = 1 (hyperbolic identity).
        let defect = (f.mu().powi(2) - f.nu().norm_sqr() - 1.0).abs();
        assert!(defect <= 1e-12);
        // r = 0 makes beta collapse to theta exactly.
        let c = SqueezedField::coherent(re(SQRT5)).unwrap();
        assert_eq!(c.beta(), c.theta());
    }

    #[test]
    fn field_rejects_bad_inputs() {
        assert!(SqueezedField::new(re(1.0), -0.5, 0.0).is_err());
        assert!(SqueezedField::new(re(f64::NAN), 0.0, 0.0).is_err());
        assert!(SqueezedField::new(re(1.0), 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn squeeze_phase_wraps_into_principal_range() {
        let f = SqueezedField::new(re(1.0), 1.0, 7.0).unwrap();
        assert!((0.0..std::f64::consts::TAU).contains(&f.squeeze_phase()));
        assert!((f.squeeze_phase() - (7.0 - std::f64::consts::TAU)).abs() <= 1e-15);
    }

    #[test]
    fn coherent_limit_is_poisson() {
        let f = SqueezedField::coherent(re(SQRT5)).unwrap();
        let dist = photon_distribution(&f, 1e-12, 8192).unwrap();
        // P(0) = e^{-5}.
        let p0 = 6.73794699908546700e-3;
        assert!((dist.probs[0] - p0).abs() <= 1e-12);
        // P(5) = e^{-5} 5^5 / 5!.
        let p5 = 1.75467369767850712e-1;
        assert!((dist.probs[5] - p5).abs() <= 1e-12);
        let (mean, variance) = distribution_moments(&dist);
        assert!((mean - 5.0).abs() <= 1e-9);
        assert!((variance - 5.0).abs() <= 1e-5);
    }

    #[test]
    fn vacuum_is_exact() {
        let dist = coherent_distribution(re(0.0), 1e-12, 64).unwrap();
        assert_eq!(dist.probs, vec![1.0]);
        assert_eq!(dist.cutoff, 0);
        assert_eq!(dist.tail_mass, 0.0);
    }

    #[test]
    fn squeezed_vacuum_parity_and_mean() {
        let f = SqueezedField::new(re(0.0), 1.0, 0.0).unwrap();
        let dist = photon_distribution(&f, 1e-12, 8192).unwrap();
        for (n, p) in dist.probs.iter().enumerate() {
            if n % 2 == 1 {
                assert_eq!(*p, 0.0, "P({n}) must vanish exactly");
            }
        }
        let (mean, _) = distribution_moments(&dist);
        let sinh1_sq = 1.38109784554181547e0;
        assert!((mean - sinh1_sq).abs() <= 1e-8);
    }

    #[test]
    fn complex_squeeze_phase_matches_operator_oracle() {
        // Frozen from a truncated matrix-exponential construction of the
        // state (apply the squeeze then the displacement to the vacuum in a
        // 500-level space); exercises the Gaussian prefactor off the real
        // axis, where the conjugate in the exponent is load-bearing.
        let f = SqueezedField::new(Complex64::new(1.0, 0.7), 0.9, 1.3).unwrap();
        let dist = photon_distribution(&f, 1e-12, 8192).unwrap();
        let expected = [
            (0, 5.426784039426880e-2),
            (1, 2.378276840802299e-1),
            (2, 3.647182978153967e-1),
            (3, 1.978129368292009e-1),
            (5, 4.002645762137962e-2),
        ];
        for (n, p) in expected {
            assert!(
                (dist.prob(n) - p).abs() <= 1e-10 * p,
                "P({n}) = {}, oracle {p}",
                dist.prob(n)
            );
        }
        assert!((dist.total_mass() - 1.0).abs() <= 1e-9);

        let g = SqueezedField::new(
            Complex64::new(2.249042316085656, 0.0),
            1.404726529549328,
            2.047007407189995,
        )
        .unwrap();
        let dist = photon_distribution(&g, 1e-12, 8192).unwrap();
        assert!((dist.prob(0) - 2.298313439231661e-2).abs() <= 1e-10 * 2.3e-2);
        assert!((dist.total_mass() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn normalization_with_tail_bound() {
        for theta in [0.0, 1.0, SQRT5] {
            for r in [0.0, 0.5, 1.0, 2.0, 3.0] {
                let f = SqueezedField::new(re(theta), r, 0.0).unwrap();
                let dist = photon_distribution(&f, 1e-12, 8192)
                    .unwrap_or_else(|e| panic!("theta={theta} r={r}: {e}"));
                let total = dist.total_mass();
                assert!(
                    (total - 1.0).abs() <= 1e-9,
                    "theta={theta} r={r}: sum+tail = {total}"
                );
                assert!(dist.tail_mass < 1e-12);
                assert!(dist.probs.iter().all(|p| *p >= 0.0));
            }
        }
    }

    #[test]
    fn insufficient_cutoff_is_a_truncation_error() {
        let f = SqueezedField::new(re(SQRT5), 3.0, 0.0).unwrap();
        // r = 3 needs a cutoff beyond 4096 at this tolerance.
        match photon_distribution(&f, 1e-12, 4096) {
            Err(Error::Truncation { tail_mass, cutoff, .. }) => {
                assert_eq!(cutoff, 4096);
                assert!(tail_mass >= 1e-12);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn crossover_routes_to_poisson_and_stays_continuous() {
        let theta = re(SQRT5);
        let below = SqueezedField::new(theta, 1e-9, 0.0).unwrap();
        let at_zero = SqueezedField::coherent(theta).unwrap();
        let d_below = photon_distribution(&below, 1e-12, 8192).unwrap();
        let d_zero = photon_distribution(&at_zero, 1e-12, 8192).unwrap();
        assert_eq!(d_below, d_zero);

        // Just above the crossover the squeezed formula is used; the
        // distributions must approach the Poisson limit as r shrinks.
        let mut previous_gap = f64::INFINITY;
        for r in [1e-4, 1e-6] {
            let f = SqueezedField::new(theta, r, 0.0).unwrap();
            let d = photon_distribution(&f, 1e-12, 8192).unwrap();
            let gap = d
                .probs
                .iter()
                .enumerate()
                .map(|(n, p)| (p - d_zero.prob(n)).abs())
                .fold(0.0, f64::max);
            assert!(gap < previous_gap, "gap must shrink as r -> 0");
            previous_gap = gap;
        }
        assert!(previous_gap <= 1e-5);
    }

    #[test]
    fn squeezed_moments_match_closed_forms() {
        let f = SqueezedField::new(re(SQRT5), 2.0, 0.0).unwrap();
        let dist = photon_distribution(&f, 1e-12, 8192).unwrap();
        let (mean, variance) = distribution_moments(&dist);
        assert!((mean - f.mean_photon_number()).abs() <= 1e-6 * f.mean_photon_number());
        assert!(
            (variance - f.photon_number_variance()).abs()
                <= 1e-6 * f.photon_number_variance()
        );
    }

    #[test]
    fn oscillatory_distribution_has_multiple_maxima() {
        let f = SqueezedField::new(re(SQRT5), 2.0, 0.0).unwrap();
        let dist = photon_distribution(&f, 1e-12, 8192).unwrap();
        let maxima = interior_local_maxima(&dist.probs, 0, 30, 1e-4);
        assert!(maxima.len() >= 2, "expected oscillations, found {maxima:?}");

        let coherent = photon_distribution(&SqueezedField::coherent(re(SQRT5)).unwrap(), 1e-12, 8192)
            .unwrap();
        let single = interior_local_maxima(&coherent.probs, 0, 30, 1e-4);
        // Poisson mean 5 has a plateau at n = 4, 5; the plateau counts once.
        assert_eq!(single, vec![4]);
    }

    #[test]
    fn rejects_bad_truncation_parameters() {
        let f = SqueezedField::coherent(re(1.0)).unwrap();
        assert!(photon_distribution(&f, 0.0, 4096).is_err());
        assert!(photon_distribution(&f, 1.5, 4096).is_err());
        assert!(photon_distribution(&f, 1e-12, 8).is_err());
    }
}
