//! Eigenvalues of small complex Hermitian matrices via cyclic Jacobi sweeps.
//!
//! Everything the entanglement computations diagonalize is tiny: 2x2 atom
//! states and rank-bounded Gram matrices up to 4x4, plus a dense verification
//! path that stays in the low hundreds. A hand-rolled Jacobi solver keeps the
//! dependency surface flat and the numerics inspectable.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Convergence target for the off-diagonal Frobenius norm.
const OFF_DIAGONAL_TARGET: f64 = 1e-13;
/// Hard cap on full sweeps; Jacobi converges quadratically, so hitting this
/// means the input was pathological.
const MAX_SWEEPS: usize = 64;
/// Pivots below this magnitude are treated as already annihilated.
const PIVOT_FLOOR: f64 = 1e-300;

/// Eigenvalues (descending) of a complex Hermitian matrix of dimension <= 8.
///
/// The dimension cap documents intent: all production call sites are
/// rank-bounded reductions, and hitting a larger matrix signals a logic error
/// upstream, not a need for a better solver. Use cases that legitimately need
/// more (the dense verification path) go through the crate-internal variant.
///
/// Inputs must be Hermitian to within 1e-10 elementwise; the matrix is
/// symmetrized before iteration so that roundoff asymmetry cannot drift.
pub fn hermitian_spectrum_small(matrix: &[Vec<Complex64>]) -> Result<Vec<f64>> {
    if matrix.len() > 8 {
        return Err(Error::domain(format!(
            "hermitian_spectrum_small caps dimension at 8, got {}",
            matrix.len()
        )));
    }
    hermitian_spectrum(matrix)
}

/// Uncapped variant backing both the public entry point and the dense
/// verification path.
pub(crate) fn hermitian_spectrum(matrix: &[Vec<Complex64>]) -> Result<Vec<f64>> {
    let dim = matrix.len();
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::domain(format!(
                "matrix must be square: row {i} has {} entries for dimension {dim}",
                row.len()
            )));
        }
    }
    if dim == 0 {
        return Ok(Vec::new());
    }

    let mut worst = 0.0_f64;
    for (i, row) in matrix.iter().enumerate() {
        for (j, entry) in row.iter().enumerate().skip(i) {
            worst = worst.max((entry - matrix[j][i].conj()).norm());
        }
    }
    if worst > 1e-10 {
        return Err(Error::domain(format!(
            "matrix is not Hermitian: max |a_ij - conj(a_ji)| = {worst:.3e}"
        )));
    }

    // Work on the Hermitian average so the iteration sees an exactly
    // Hermitian operator regardless of roundoff in the input.
    let mut a: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| (0..dim).map(|j| 0.5 * (matrix[i][j] + matrix[j][i].conj())).collect())
        .collect();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = Complex64::new(row[i].re, 0.0);
    }

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= OFF_DIAGONAL_TARGET {
            let mut eigs: Vec<f64> = (0..dim).map(|i| a[i][i].re).collect();
            eigs.sort_by(|x, y| y.partial_cmp(x).expect("eigenvalues are finite"));
            return Ok(eigs);
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                rotate_pair(&mut a, p, q);
            }
        }
    }
    Err(Error::Inconsistency(format!(
        "Jacobi iteration did not reach off-diagonal norm {OFF_DIAGONAL_TARGET:.0e} \
         in {MAX_SWEEPS} sweeps (dimension {dim})"
    )))
}

fn off_diagonal_norm(a: &[Vec<Complex64>]) -> f64 {
    let mut sum = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                sum += v.norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Annihilate the (p, q) entry: factor out its phase so the pivot becomes
/// real, then apply the classical symmetric Jacobi rotation.
fn rotate_pair(a: &mut [Vec<Complex64>], p: usize, q: usize) {
    let pivot = a[p][q];
    let h = pivot.norm();
    if h < PIVOT_FLOOR {
        return;
    }

    // Unitary D = diag(..., 1 at p, e^{-i arg(pivot)} at q): conjugating by D
    // multiplies column q by e^{-i phi} and row q by e^{+i phi}, turning the
    // pivot into |pivot| without touching the diagonal.
    let phase = pivot / h;
    let phase_conj = phase.conj();
    for row in a.iter_mut() {
        row[q] *= phase_conj;
    }
    for entry in a[q].iter_mut() {
        *entry *= phase;
    }

    // Classical 2x2 symmetric rotation zeroing the now-real pivot.
    let app = a[p][p].re;
    let aqq = a[q][q].re;
    let tau = (aqq - app) / (2.0 * h);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    for row in a.iter_mut() {
        let akp = row[p];
        let akq = row[q];
        row[p] = c * akp - s * akq;
        row[q] = s * akp + c * akq;
    }
    // The sweep always visits pairs with p < q, so splitting at q keeps both
    // rows borrowable at once.
    let (head, tail) = a.split_at_mut(q);
    for (apk, aqk) in head[p].iter_mut().zip(tail[0].iter_mut()) {
        let old_p = *apk;
        let old_q = *aqk;
        *apk = c * old_p - s * old_q;
        *aqk = s * old_p + c * old_q;
    }

    // The pivot is zero analytically; make it exact and keep the diagonal real.
    a[p][q] = Complex64::new(0.0, 0.0);
    a[q][p] = Complex64::new(0.0, 0.0);
    a[p][p] = Complex64::new(a[p][p].re, 0.0);
    a[q][q] = Complex64::new(a[q][q].re, 0.0);
}
