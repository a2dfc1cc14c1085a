//! Simulation library for a two-level atom resonantly coupled to a single
//! quantized field mode prepared in a squeezed coherent state.
//!
//! The crate computes three families of quantities:
//!
//! * photon-number statistics of the squeezed field ([`photon`]),
//! * atomic transition probabilities under the resonant coupling
//!   ([`dynamics`]),
//! * the degree of entanglement between atom and field measured by mutual
//!   entropy ([`entanglement`]), in two independent modes — a closed-form
//!   aggregate expression reproduced verbatim, and an exact branch evolution
//!   that serves as its cross-check.
//!
//! Numerical ground rules throughout: probability evaluations run in the log
//! domain so nothing overflows at four-digit cutoffs, truncation tails are
//! bounded and reported rather than renormalized away, summation order is
//! fixed so results are bit-for-bit reproducible at any worker count, and
//! out-of-domain intermediates raise errors instead of being clamped out of
//! sight (except for documented epsilon-sized clamps).

// Reference fixtures are frozen at full 17-significant-digit precision so they
// round-trip bit-exactly; keep them verbatim even where f64 cannot resolve the
// last digit.
#![allow(clippy::excessive_precision)]

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod output;
pub mod photon;
pub mod special;
pub mod sweep;

pub use dynamics::{
    lifted_coefficients, lifted_coefficients_with, rabi_frequency, transition_c,
    transition_c_with, transition_s, transition_s_with, AtomMixture, LiftedCoefficients,
    ModelParams, Summation,
};
pub use entanglement::{
    dem_exact, dem_exact_dense, dem_exact_with_cutoff, dem_paper, evolve_branch,
    field_amplitudes, shannon_entropy, AtomStart, BranchState, DemResult, LogBase, Mode,
};
pub use error::{Error, Result};
pub use linalg::hermitian_spectrum_small;
pub use output::{
    dem_json, fmt_float, parse_compare_csv, parse_ct_csv, parse_dem_json,
    parse_distribution_figure_csv, parse_float, parse_pn_csv, parse_sweep_csv, parse_sweep_json,
    parse_transition_figure_csv, pn_rows, provenance_comments, sweep_json, write_compare_csv,
    write_ct_csv, write_distribution_figure_csv, write_gnuplot_matrix, write_pn_csv,
    write_sweep_csv, write_transition_figure_csv, CommentPairs, CompareRow, DemInputs, DemPoint,
    DemReport, PnRow, TransitionRow,
};
pub use photon::{
    coherent_distribution, distribution_moments, interior_local_maxima, photon_distribution,
    PhotonDistribution, SqueezedField, COHERENT_CROSSOVER, DEFAULT_MAX_CUTOFF, DEFAULT_TAIL_EPS,
};
pub use special::{hermite, hermite_sequence, log_factorial, log_factorial_table, ScaledHermite};
pub use sweep::{
    distribution_figure_rows, revival_time, run_sweep, run_sweep_with_workers,
    surface_sweep_spec, transition_figure_rows, DistributionFigureRow, Provenance, SweepMode,
    SweepResult, SweepRow, SweepSpec, TimeSpec, TransitionFigureRow, FIGURE_SQUEEZE_VALUES,
};
