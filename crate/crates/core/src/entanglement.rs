//! Atom-field mutual-entropy computations, in two independent modes.
//!
//! *Closed-form mode* (`dem_paper`) evaluates the published aggregate
//! expression: the four coefficients from [`crate::dynamics`] form a single
//! 2x2 block whose eigenvalues kappa+- combine with the diagonal entries into
//! the entanglement degree. The expression is reproduced literally, including
//! its known quirks (it does not vanish at t = 0 for mixed atoms).
//!
//! *Exact mode* (`dem_exact`) evolves the true joint state and computes
//! I = S(atom) + S(field) - S(joint) from reduced spectra. The joint state is
//! a rank-<=2 mixture of two orthogonal pure branches, and the field reduction
//! has rank <= 4, so everything reduces to tiny Gram matrices; the full
//! density matrix is never materialized except in an optional dense
//! verification path for small cutoffs.

use num_complex::Complex64;

use crate::dynamics::{rabi_frequency, AtomMixture, LiftedCoefficients, ModelParams};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_spectrum, hermitian_spectrum_small};
use crate::photon::{photon_distribution, SqueezedField, DEFAULT_MAX_CUTOFF, DEFAULT_TAIL_EPS};

/// Spectrum entries in [-EIGENVALUE_CLAMP, 0) are treated as exact zeros;
/// anything more negative is reported instead of hidden.
const EIGENVALUE_CLAMP: f64 = 1e-12;
/// Largest admissible eigenvalue of a (sub-)normalized block.
const EIGENVALUE_CEILING: f64 = 1.0 + 1e-9;
/// An evolved branch whose boundary amplitude exceeds this was truncated too
/// aggressively to trust.
const BOUNDARY_AMPLITUDE_LIMIT: f64 = 1e-6;

/// Logarithm base for entropies: natural log (nats) by default, base 2 (bits)
/// on request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    /// Natural logarithm; entropies in nats.
    #[default]
    E,
    /// Base-2 logarithm; entropies in bits.
    Two,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::E => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

impl std::fmt::Display for LogBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LogBase::E => write!(f, "e"),
            LogBase::Two => write!(f, "2"),
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "nat" | "nats" => Ok(LogBase::E),
            "2" | "bit" | "bits" => Ok(LogBase::Two),
            other => Err(Error::domain(format!("unknown log base '{other}' (expected 'e' or '2')"))),
        }
    }
}

/// Which computation produced a [`DemResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Closed-form aggregate expression.
    Paper,
    /// Exact branch evolution with reduced-spectrum entropies.
    Exact,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Paper => write!(f, "paper"),
            Mode::Exact => write!(f, "exact"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Mode::Paper),
            "exact" => Ok(Mode::Exact),
            other => Err(Error::domain(format!("unknown mode '{other}' (expected 'paper' or 'exact')"))),
        }
    }
}

/// An entanglement-degree value with its intermediate quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemResult {
    /// Computation mode that produced this value.
    pub mode: Mode,
    /// The entanglement degree (mutual entropy), in units of `base`.
    pub dem: f64,
    /// Atom-side entropy term. In paper mode this is the diagonal marginal
    /// entropy -(e1 log e1 + e4 log e4); in exact mode the von Neumann
    /// entropy of the reduced atom state.
    pub s_atom: f64,
    /// Field reduced entropy (exact mode only).
    pub s_field: Option<f64>,
    /// Joint-state entropy (exact mode only).
    pub s_joint: Option<f64>,
    /// Larger closed-form block eigenvalue (paper mode only).
    pub kappa_plus: Option<f64>,
    /// Smaller closed-form block eigenvalue (paper mode only).
    pub kappa_minus: Option<f64>,
    /// Evaluation time.
    pub t: f64,
}

/// x log x with the continuity convention 0 log 0 = 0. Entries in
/// [-1e-12, 0) clamp to zero; anything more negative is an error.
fn x_log_x(x: f64, base: LogBase, context: &str) -> Result<f64> {
    if x < -EIGENVALUE_CLAMP {
        return Err(Error::numeric(format!("{context}: negative weight {x:.6e}")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok(x * base.log(x))
}

/// Shannon entropy -sum p_i log p_i of a (sub-)normalized weight vector.
///
/// Entries in [-1e-12, 0) are clamped to zero; more negative entries and
/// sums beyond 1 + 1e-9 are domain errors.
pub fn shannon_entropy(p: &[f64], base: LogBase) -> Result<f64> {
    let mut sum = 0.0;
    let mut entropy = 0.0;
    for (i, &x) in p.iter().enumerate() {
        if x < -EIGENVALUE_CLAMP {
            return Err(Error::domain(format!("entropy input entry {i} is negative: {x:.6e}")));
        }
        if x > 0.0 {
            sum += x;
            entropy -= x * base.log(x);
        }
    }
    if sum > EIGENVALUE_CEILING {
        return Err(Error::domain(format!("entropy input sums to {sum}, above 1 + 1e-9")));
    }
    Ok(entropy)
}

/// Entropy of an internally produced spectrum (Gram or reduced-state
/// eigenvalues); negativity beyond the clamp means a broken reduction, which
/// is an internal-consistency error rather than a caller mistake.
fn entropy_from_spectrum(eigs: &[f64], base: LogBase, context: &str) -> Result<f64> {
    let mut entropy = 0.0;
    for &x in eigs {
        if x < -EIGENVALUE_CLAMP {
            return Err(Error::Inconsistency(format!(
                "{context}: spectrum entry {x:.6e} below the -1e-12 clamp"
            )));
        }
        if x > 0.0 {
            entropy -= x * base.log(x);
        }
    }
    Ok(entropy)
}

/// The closed-form entanglement degree from the four aggregate coefficients:
///
/// kappa+- = ((e1 + e4) +- sqrt((e1 + e4)^2 - 4 (e1 e4 - e2 e3))) / 2
/// DEM     = -2 (e1 log e1 + e4 log e4) + kappa+ log kappa+ + kappa- log kappa-
///
/// Implemented verbatim. A discriminant below -1e-12 or a kappa outside
/// [-1e-12, 1 + 1e-9] is a numeric-domain error reporting the offending
/// coefficients; a discriminant within [-1e-12, 0] clamps to zero.
pub fn dem_paper(coeffs: &LiftedCoefficients, base: LogBase) -> Result<DemResult> {
    let LiftedCoefficients { t, e1, e4, e2, e3 } = *coeffs;
    let cross = e2 * e3;
    if cross.im.abs() > 1e-12 {
        return Err(Error::numeric(format!(
            "e2*e3 must be real, got {cross} (e2={e2}, e3={e3})"
        )));
    }
    let discriminant = (e1 + e4).powi(2) - 4.0 * (e1 * e4 - cross.re);
    if discriminant < -EIGENVALUE_CLAMP {
        return Err(Error::numeric(format!(
            "negative discriminant {discriminant:.6e} for e1={e1}, e4={e4}, e2={e2}"
        )));
    }
    let root = discriminant.max(0.0).sqrt();
    let kappa_plus = 0.5 * ((e1 + e4) + root);
    let kappa_minus = 0.5 * ((e1 + e4) - root);
    for (name, kappa) in [("kappa_plus", kappa_plus), ("kappa_minus", kappa_minus)] {
        if !(-EIGENVALUE_CLAMP..=EIGENVALUE_CEILING).contains(&kappa) {
            return Err(Error::numeric(format!(
                "{name} = {kappa:.12} outside [-1e-12, 1 + 1e-9] \
                 (e1={e1}, e4={e4}, e2={e2}, t={t})"
            )));
        }
    }

    let marginal = x_log_x(e1, base, "e1")? + x_log_x(e4, base, "e4")?;
    let dem = -2.0 * marginal
        + x_log_x(kappa_plus, base, "kappa_plus")?
        + x_log_x(kappa_minus, base, "kappa_minus")?;
    Ok(DemResult {
        mode: Mode::Paper,
        dem,
        s_atom: -marginal,
        s_field: None,
        s_joint: None,
        kappa_plus: Some(kappa_plus),
        kappa_minus: Some(kappa_minus),
        t,
    })
}

/// Which atom state a branch evolution starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomStart {
    /// Atom starts in the ground state.
    Ground,
    /// Atom starts in the excited state.
    Excited,
}

/// A pure joint atom-field state evolved from `start (x) field`.
///
/// `ground_amplitudes[n]` multiplies |ground, n photons> and
/// `excited_amplitudes[n]` multiplies |excited, n photons>; both vectors run
/// one slot past the field cutoff because the top sector couples photon
/// numbers N and N+1.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    /// Initial atom state of this branch.
    pub start: AtomStart,
    /// Amplitudes on the atom ground state, indexed by photon number.
    pub ground_amplitudes: Vec<Complex64>,
    /// Amplitudes on the atom excited state, indexed by photon number.
    pub excited_amplitudes: Vec<Complex64>,
}

impl BranchState {
    /// Total squared norm; 1 minus the truncated field tail.
    pub fn norm_sqr(&self) -> f64 {
        self.ground_population() + self.excited_population()
    }

    /// Probability of finding the atom excited.
    pub fn excited_population(&self) -> f64 {
        self.excited_amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of finding the atom in the ground state.
    pub fn ground_population(&self) -> f64 {
        self.ground_amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Fock-space amplitudes c_n of the squeezed coherent state, n = 0..=cutoff.
///
/// Uses the two-term recurrence
/// c_{n+1} = (beta c_n - nu sqrt(n) c_{n-1}) / (mu sqrt(n+1)),
/// seeded with the positive root c_0 = sqrt(P(0)). Unlike the probability
/// formula, the recurrence has no singularity at r = 0 (the nu term simply
/// vanishes), so it is used across the whole parameter range; agreement of
/// |c_n|^2 with the probability route is covered by tests.
pub fn field_amplitudes(field: &SqueezedField, cutoff: usize) -> Vec<Complex64> {
    let mu = field.mu();
    let nu = field.nu();
    let beta = field.beta();
    let log_p0 = -mu.ln() + field.log_prefactor_exponent();

    let mut amps = Vec::with_capacity(cutoff + 1);
    amps.push(Complex64::new((0.5 * log_p0).exp(), 0.0));
    if cutoff >= 1 {
        amps.push(beta * amps[0] / mu);
    }
    for n in 1..cutoff {
        let next = (beta * amps[n] - nu * (n as f64).sqrt() * amps[n - 1])
            / (mu * ((n as f64) + 1.0).sqrt());
        amps.push(next);
    }
    amps
}

/// Evolve `start (x) squeezed field` for time t under the resonant coupling.
///
/// Each two-dimensional sector span{|excited, n>, |ground, n+1>} rotates as
/// cos(Omega_n t) / -i sin(Omega_n t) under a global phase e^{-i omega0 (n + 1/2) t};
/// the uncoupled |ground, 0> component only acquires the phase e^{+i omega0 t / 2}.
/// Errors if the boundary amplitude |c_cutoff| exceeds 1e-6, since then the
/// rotation at the top sector would leak outside the truncated space.
pub fn evolve_branch(
    field: &SqueezedField,
    params: &ModelParams,
    start: AtomStart,
    cutoff: usize,
    t: f64,
) -> Result<BranchState> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain(format!("time must be finite and non-negative, got {t}")));
    }
    let amps = field_amplitudes(field, cutoff);
    let boundary = amps[cutoff].norm();
    if boundary > BOUNDARY_AMPLITUDE_LIMIT {
        return Err(Error::Truncation {
            tail_mass: boundary * boundary,
            cutoff,
            tail_eps: BOUNDARY_AMPLITUDE_LIMIT * BOUNDARY_AMPLITUDE_LIMIT,
        });
    }

    let dim = cutoff + 2;
    let mut ground = vec![Complex64::new(0.0, 0.0); dim];
    let mut excited = vec![Complex64::new(0.0, 0.0); dim];
    match start {
        AtomStart::Excited => {
            // |excited, n> sits in sector n alongside |ground, n+1>.
            for (n, &c) in amps.iter().enumerate() {
                let omega = rabi_frequency(params, n);
                let phase = Complex64::from_polar(1.0, -params.omega0 * ((n as f64) + 0.5) * t);
                let (sin, cos) = (omega * t).sin_cos();
                excited[n] = c * phase * cos;
                ground[n + 1] = c * phase * Complex64::new(0.0, -sin);
            }
        }
        AtomStart::Ground => {
            // |ground, 0> is uncoupled; |ground, k> for k >= 1 sits in
            // sector k - 1 alongside |excited, k - 1>.
            ground[0] = amps[0] * Complex64::from_polar(1.0, 0.5 * params.omega0 * t);
            for (k, &c) in amps.iter().enumerate().skip(1) {
                let omega = rabi_frequency(params, k - 1);
                let phase = Complex64::from_polar(1.0, -params.omega0 * ((k as f64) - 0.5) * t);
                let (sin, cos) = (omega * t).sin_cos();
                ground[k] = c * phase * cos;
                excited[k - 1] += c * phase * Complex64::new(0.0, -sin);
            }
        }
    }
    Ok(BranchState { start, ground_amplitudes: ground, excited_amplitudes: excited })
}

/// Gram matrix of weighted multi-component vectors: entry (i, j) is
/// w_i w_j <v_i, v_j> with the inner product summed over all components.
fn weighted_gram(vectors: &[(f64, Vec<&[Complex64]>)]) -> Vec<Vec<Complex64>> {
    let k = vectors.len();
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    for i in 0..k {
        for j in i..k {
            let mut dot = Complex64::new(0.0, 0.0);
            for (a, b) in vectors[i].1.iter().zip(vectors[j].1.iter()) {
                for (x, y) in a.iter().zip(b.iter()) {
                    dot += x.conj() * y;
                }
            }
            let weighted = vectors[i].0 * vectors[j].0 * dot;
            gram[i][j] = weighted;
            gram[j][i] = weighted.conj();
        }
    }
    gram
}

/// Exact entanglement degree at time t with an explicit field cutoff.
///
/// Computes I = S(atom) + S(field) - S(joint) from the two evolved branches:
/// the joint spectrum comes from the 2x2 Gram of the weighted branch vectors,
/// the atom state is an explicit 2x2 matrix, and the field spectrum comes
/// from the 4x4 Gram of the weighted per-atom-component field vectors.
pub fn dem_exact_with_cutoff(
    field: &SqueezedField,
    atom: &AtomMixture,
    params: &ModelParams,
    cutoff: usize,
    t: f64,
    base: LogBase,
) -> Result<DemResult> {
    let ground_branch = evolve_branch(field, params, AtomStart::Ground, cutoff, t)?;
    let excited_branch = evolve_branch(field, params, AtomStart::Excited, cutoff, t)?;
    let w0 = atom.lambda0.sqrt();
    let w1 = atom.lambda1.sqrt();

    // Joint state: rank <= 2 mixture of the two (orthogonal) branches.
    let joint_gram = weighted_gram(&[
        (
            w0,
            vec![
                ground_branch.ground_amplitudes.as_slice(),
                ground_branch.excited_amplitudes.as_slice(),
            ],
        ),
        (
            w1,
            vec![
                excited_branch.ground_amplitudes.as_slice(),
                excited_branch.excited_amplitudes.as_slice(),
            ],
        ),
    ]);
    let s_joint = entropy_from_spectrum(
        &spectrum_of_internal(&joint_gram, "joint Gram")?,
        base,
        "joint spectrum",
    )?;

    // Atom reduction: 2x2 with populations on the diagonal and the coherence
    // sum_a lambda_a <ground_a|excited_a> off it.
    let mut populations = [0.0_f64; 2];
    let mut coherence = Complex64::new(0.0, 0.0);
    for (lambda, branch) in [(atom.lambda0, &ground_branch), (atom.lambda1, &excited_branch)] {
        populations[0] += lambda * branch.ground_population();
        populations[1] += lambda * branch.excited_population();
        let overlap: Complex64 = branch
            .ground_amplitudes
            .iter()
            .zip(&branch.excited_amplitudes)
            .map(|(gr, ex)| gr.conj() * ex)
            .sum();
        coherence += lambda * overlap;
    }
    let atom_matrix = vec![
        vec![Complex64::new(populations[0], 0.0), coherence],
        vec![coherence.conj(), Complex64::new(populations[1], 0.0)],
    ];
    let s_atom = entropy_from_spectrum(
        &spectrum_of_internal(&atom_matrix, "atom reduction")?,
        base,
        "atom spectrum",
    )?;

    // Field reduction: rank <= 4, spanned by the four weighted field vectors.
    let field_gram = weighted_gram(&[
        (w0, vec![ground_branch.ground_amplitudes.as_slice()]),
        (w0, vec![ground_branch.excited_amplitudes.as_slice()]),
        (w1, vec![excited_branch.ground_amplitudes.as_slice()]),
        (w1, vec![excited_branch.excited_amplitudes.as_slice()]),
    ]);
    let s_field = entropy_from_spectrum(
        &spectrum_of_internal(&field_gram, "field Gram")?,
        base,
        "field spectrum",
    )?;

    Ok(DemResult {
        mode: Mode::Exact,
        dem: s_atom + s_field - s_joint,
        s_atom,
        s_field: Some(s_field),
        s_joint: Some(s_joint),
        kappa_plus: None,
        kappa_minus: None,
        t,
    })
}

/// [`dem_exact_with_cutoff`] with the cutoff chosen by the photon-statistics
/// truncation policy (tail below `tail_eps`, doubling up to `max_cutoff`).
pub fn dem_exact(
    field: &SqueezedField,
    atom: &AtomMixture,
    params: &ModelParams,
    t: f64,
    base: LogBase,
) -> Result<DemResult> {
    let dist = photon_distribution(field, DEFAULT_TAIL_EPS, DEFAULT_MAX_CUTOFF)?;
    dem_exact_with_cutoff(field, atom, params, dist.cutoff, t, base)
}

/// Map solver rejections of internally built matrices to consistency errors:
/// the caller supplied valid physics, so a non-Hermitian reduction is our bug.
fn spectrum_of_internal(matrix: &[Vec<Complex64>], what: &str) -> Result<Vec<f64>> {
    hermitian_spectrum_small(matrix)
        .map_err(|e| Error::Inconsistency(format!("{what} failed spectral check: {e}")))
}

/// Dense verification path: materialize the full joint density matrix and
/// diagonalize everything directly. Quadratic in the Fock dimension, so the
/// cutoff is capped at 64; intended for spot-checking the Gram-based
/// reductions, not for production sweeps.
pub fn dem_exact_dense(
    field: &SqueezedField,
    atom: &AtomMixture,
    params: &ModelParams,
    cutoff: usize,
    t: f64,
    base: LogBase,
) -> Result<DemResult> {
    if cutoff > 64 {
        return Err(Error::domain(format!(
            "dense verification caps the cutoff at 64, got {cutoff}"
        )));
    }
    let ground_branch = evolve_branch(field, params, AtomStart::Ground, cutoff, t)?;
    let excited_branch = evolve_branch(field, params, AtomStart::Excited, cutoff, t)?;

    // Basis layout: index = atom * fock_dim + photon_number, atom 0 = ground.
    let fock_dim = cutoff + 2;
    let dim = 2 * fock_dim;
    let mut sigma = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (lambda, branch) in [(atom.lambda0, &ground_branch), (atom.lambda1, &excited_branch)] {
        if lambda == 0.0 {
            continue;
        }
        let mut psi = Vec::with_capacity(dim);
        psi.extend_from_slice(&branch.ground_amplitudes);
        psi.extend_from_slice(&branch.excited_amplitudes);
        for i in 0..dim {
            for j in 0..dim {
                sigma[i][j] += lambda * psi[i] * psi[j].conj();
            }
        }
    }

    let s_joint = entropy_from_spectrum(
        &hermitian_spectrum(&sigma).map_err(|e| Error::Inconsistency(e.to_string()))?,
        base,
        "dense joint spectrum",
    )?;

    let mut atom_matrix = vec![vec![Complex64::new(0.0, 0.0); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for n in 0..fock_dim {
                atom_matrix[a][b] += sigma[a * fock_dim + n][b * fock_dim + n];
            }
        }
    }
    let s_atom = entropy_from_spectrum(
        &spectrum_of_internal(&atom_matrix, "dense atom reduction")?,
        base,
        "dense atom spectrum",
    )?;

    let mut field_matrix = vec![vec![Complex64::new(0.0, 0.0); fock_dim]; fock_dim];
    for n in 0..fock_dim {
        for m in 0..fock_dim {
            for a in 0..2 {
                field_matrix[n][m] += sigma[a * fock_dim + n][a * fock_dim + m];
            }
        }
    }
    let s_field = entropy_from_spectrum(
        &hermitian_spectrum(&field_matrix).map_err(|e| Error::Inconsistency(e.to_string()))?,
        base,
        "dense field spectrum",
    )?;

    Ok(DemResult {
        mode: Mode::Exact,
        dem: s_atom + s_field - s_joint,
        s_atom,
        s_field: Some(s_field),
        s_joint: Some(s_joint),
        kappa_plus: None,
        kappa_minus: None,
        t,
    })
}
