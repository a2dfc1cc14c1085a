//! Property-based invariants of the public API: algebraic identities the
//! implementation must satisfy for all inputs, not just the pinned fixtures.

// Fixtures are frozen at full 17-significant-digit precision.
#![allow(clippy::excessive_precision)]

use num_complex::Complex64;
use proptest::prelude::*;

use sjcm::{
    dem_paper, distribution_moments, fmt_float, hermite, hermite_sequence,
    hermitian_spectrum_small, lifted_coefficients, log_factorial, log_factorial_table,
    parse_float, parse_pn_csv, photon_distribution, revival_time, shannon_entropy, transition_c,
    transition_s, write_pn_csv, AtomMixture, LogBase, Mode, ModelParams, PnRow, SqueezedField,
    SweepMode, TimeSpec,
};

/// Plain three-term recurrence in ordinary doubles; valid for small degrees.
fn naive_hermite(n: usize, x: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * (k as f64) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn finite_f64() -> impl Strategy<Value = f64> {
    any::<f64>().prop_filter("finite", |x| x.is_finite())
}

proptest! {
    // ------------------------------------------------------------------
    // Special functions.
    // ------------------------------------------------------------------

    #[test]
    fn hermite_matches_naive_recurrence(
        n in 0usize..=12,
        re in -3.0f64..3.0,
        im in -3.0f64..3.0,
    ) {
        let x = Complex64::new(re, im);
        let scaled = hermite(n, x).unwrap();
        let expected = naive_hermite(n, x);
        let got = scaled.value();
        prop_assert!(
            (got - expected).norm() <= 1e-9 * (1.0 + expected.norm()),
            "H_{n}({x}) = {got}, naive {expected}"
        );
    }

    #[test]
    fn hermite_has_definite_parity(
        n in 0usize..=40,
        re in -3.0f64..3.0,
        im in -3.0f64..3.0,
    ) {
        let x = Complex64::new(re, im);
        let plus = hermite(n, x).unwrap();
        let minus = hermite(n, -x).unwrap();
        if plus.log_magnitude == f64::NEG_INFINITY {
            prop_assert_eq!(minus.log_magnitude, f64::NEG_INFINITY);
            return Ok(());
        }
        prop_assert!(
            (plus.log_magnitude - minus.log_magnitude).abs()
                <= 1e-9 * (1.0 + plus.log_magnitude.abs()),
            "magnitude breaks parity at n={n}, x={x}"
        );
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(
            (minus.phase - sign * plus.phase).norm() <= 1e-9,
            "phase breaks parity at n={n}, x={x}"
        );
    }

    #[test]
    fn hermite_sequence_agrees_with_single_evaluations(
        n_max in 0usize..=60,
        re in -4.0f64..4.0,
        im in -4.0f64..4.0,
    ) {
        let x = Complex64::new(re, im);
        let seq = hermite_sequence(n_max, x).unwrap();
        prop_assert_eq!(seq.len(), n_max + 1);
        for (k, entry) in seq.iter().enumerate() {
            let single = hermite(k, x).unwrap();
            prop_assert_eq!(entry, &single, "degree {} of sequence diverges", k);
        }
    }

    #[test]
    fn log_factorial_increments_by_log_n(n in 0usize..2000) {
        let step = log_factorial(n + 1) - log_factorial(n);
        let expected = ((n + 1) as f64).ln();
        prop_assert!(close(step, expected, 1e-12), "step at {n}: {step} vs {expected}");
    }

    #[test]
    fn log_factorial_table_matches_pointwise(n_max in 0usize..300) {
        let table = log_factorial_table(n_max);
        prop_assert_eq!(table.len(), n_max + 1);
        for (n, &entry) in table.iter().enumerate() {
            prop_assert_eq!(entry, log_factorial(n));
        }
    }

    // ------------------------------------------------------------------
    // Photon statistics.
    // ------------------------------------------------------------------

    #[test]
    fn distribution_is_normalized_and_nonnegative(
        mag in 0.0f64..3.0,
        angle in 0.0f64..std::f64::consts::TAU,
        r in 0.0f64..1.5,
        phi in 0.0f64..std::f64::consts::TAU,
    ) {
        let theta = Complex64::from_polar(mag, angle);
        let field = SqueezedField::new(theta, r, phi).unwrap();
        let dist = photon_distribution(&field, 1e-10, 8192).unwrap();
        prop_assert!(dist.probs.iter().all(|p| *p >= 0.0 && *p <= 1.0));
        prop_assert!(dist.tail_mass < 1e-10);
        let total = dist.total_mass();
        prop_assert!(
            (total - 1.0).abs() <= 1e-8,
            "theta={theta} r={r} phi={phi}: sum+tail = {total}"
        );
    }

    #[test]
    fn distribution_moments_match_closed_forms(
        mag in 0.0f64..3.0,
        angle in 0.0f64..std::f64::consts::TAU,
        r in 0.0f64..1.5,
        phi in 0.0f64..std::f64::consts::TAU,
    ) {
        let theta = Complex64::from_polar(mag, angle);
        let field = SqueezedField::new(theta, r, phi).unwrap();
        let dist = photon_distribution(&field, 1e-12, 8192).unwrap();
        let (mean, variance) = distribution_moments(&dist);
        prop_assert!(
            close(mean, field.mean_photon_number(), 1e-6),
            "mean {mean} vs {}", field.mean_photon_number()
        );
        prop_assert!(
            close(variance, field.photon_number_variance(), 1e-6),
            "variance {variance} vs {}", field.photon_number_variance()
        );
    }

    // ------------------------------------------------------------------
    // Dynamics.
    // ------------------------------------------------------------------

    #[test]
    fn transition_probabilities_partition_captured_mass(
        mag in 0.0f64..3.0,
        r in 0.0f64..1.5,
        t in 0.0f64..50.0,
        g in 0.1f64..3.0,
    ) {
        let field = SqueezedField::new(Complex64::new(mag, 0.0), r, 0.0).unwrap();
        let dist = photon_distribution(&field, 1e-12, 8192).unwrap();
        let params = ModelParams::new(g, 1.0).unwrap();
        let c = transition_c(&dist, &params, t);
        let s = transition_s(&dist, &params, t);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&s));
        prop_assert!(
            (c + s - dist.sum()).abs() <= 1e-12,
            "c + s = {} but captured mass is {}", c + s, dist.sum()
        );
    }

    #[test]
    fn lifted_coefficients_satisfy_structural_identities(
        mag in 0.0f64..3.0,
        r in 0.0f64..1.5,
        lambda1 in 0.0f64..=1.0,
        t in 0.0f64..50.0,
    ) {
        let field = SqueezedField::new(Complex64::new(mag, 0.0), r, 0.0).unwrap();
        let dist = photon_distribution(&field, 1e-12, 8192).unwrap();
        let atom = AtomMixture::from_excited_weight(lambda1).unwrap();
        let params = ModelParams::default();
        let coeffs = lifted_coefficients(&dist, &atom, &params, t);
        prop_assert_eq!(coeffs.e3, -coeffs.e2, "antidiagonal terms must be opposite");
        prop_assert_eq!(coeffs.e2.re, 0.0, "antidiagonal terms must be purely imaginary");
        prop_assert!(coeffs.e1 >= 0.0 && coeffs.e4 >= 0.0);
        prop_assert!(coeffs.e1 <= 1.0 + 1e-12, "e1 = {} escapes [0, 1]", coeffs.e1);
    }

    #[test]
    fn closed_form_eigenvalues_satisfy_sum_rule(
        mag in 0.5f64..3.0,
        r in 0.0f64..1.5,
        lambda1 in 0.0f64..=1.0,
        t in 0.0f64..50.0,
    ) {
        let field = SqueezedField::new(Complex64::new(mag, 0.0), r, 0.0).unwrap();
        let dist = photon_distribution(&field, 1e-12, 8192).unwrap();
        let atom = AtomMixture::from_excited_weight(lambda1).unwrap();
        let params = ModelParams::default();
        let coeffs = lifted_coefficients(&dist, &atom, &params, t);
        // The closed form is only evaluated where its eigenvalues form a
        // probability pair; outside that region it reports a domain error,
        // which is the documented behavior and not a property violation.
        if let Ok(result) = dem_paper(&coeffs, LogBase::E) {
            let kp = result.kappa_plus.unwrap();
            let km = result.kappa_minus.unwrap();
            prop_assert!(kp >= km - 1e-15);
            prop_assert!(
                close(kp + km, coeffs.e1 + coeffs.e4, 1e-9),
                "kappa sum {} vs trace {}", kp + km, coeffs.e1 + coeffs.e4
            );
            prop_assert!(result.dem.is_finite());
            prop_assert_eq!(result.mode, Mode::Paper);
        }
    }

    // ------------------------------------------------------------------
    // Entropy and linear algebra.
    // ------------------------------------------------------------------

    #[test]
    fn shannon_entropy_bounds_and_symmetry(
        raw in prop::collection::vec(0.0f64..1.0, 1..12),
    ) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-6);
        let p: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let h = shannon_entropy(&p, LogBase::E).unwrap();
        prop_assert!(h >= -1e-12);
        prop_assert!(h <= (p.len() as f64).ln() + 1e-9, "H = {h} for {} outcomes", p.len());

        let mut reversed = p.clone();
        reversed.reverse();
        let h_rev = shannon_entropy(&reversed, LogBase::E).unwrap();
        prop_assert!(close(h, h_rev, 1e-12));

        let h_bits = shannon_entropy(&p, LogBase::Two).unwrap();
        prop_assert!(close(h_bits * std::f64::consts::LN_2, h, 1e-12));
    }

    #[test]
    fn jacobi_spectrum_preserves_trace_and_frobenius_norm(
        n in 1usize..=6,
        seed in prop::collection::vec(-1.0f64..1.0, 72),
    ) {
        // Build a Hermitian matrix from the seed entries: H = (A + A^dag)/2.
        let mut h = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let re = seed[2 * (i * n + j)];
                let im = seed[2 * (i * n + j) + 1];
                *entry = Complex64::new(re, im);
            }
        }
        for i in 0..n {
            let (head, tail) = h.split_at_mut(i);
            let row_i = &mut tail[0];
            for (j, row_j) in head.iter_mut().enumerate() {
                let avg = 0.5 * (row_i[j] + row_j[i].conj());
                row_i[j] = avg;
                row_j[i] = avg.conj();
            }
            row_i[i] = Complex64::new(row_i[i].re, 0.0);
        }
        let trace: f64 = (0..n).map(|i| h[i][i].re).sum();
        let frob_sq: f64 = h.iter().flatten().map(|z| z.norm_sqr()).sum();

        let spectrum = hermitian_spectrum_small(&h).unwrap();
        prop_assert_eq!(spectrum.len(), n);
        let eig_sum: f64 = spectrum.iter().sum();
        let eig_sq: f64 = spectrum.iter().map(|l| l * l).sum();
        prop_assert!(close(eig_sum, trace, 1e-9), "trace {trace} vs {eig_sum}");
        prop_assert!(close(eig_sq, frob_sq, 1e-9), "frobenius {frob_sq} vs {eig_sq}");
    }

    // ------------------------------------------------------------------
    // Sweep plumbing and serialization.
    // ------------------------------------------------------------------

    #[test]
    fn revival_time_scales_inversely_with_coupling(
        theta in 0.1f64..10.0,
        g in 0.1f64..10.0,
    ) {
        let scaled = revival_time(theta, g).unwrap();
        let unit = revival_time(theta, 1.0).unwrap();
        prop_assert!(close(scaled, unit / g, 1e-12));
    }

    #[test]
    fn float_format_is_bit_exact(x in finite_f64()) {
        let text = fmt_float(x);
        let back = parse_float(&text).unwrap();
        prop_assert_eq!(x.to_bits(), back.to_bits(), "{} -> {} -> {}", x, text, back);
    }

    #[test]
    fn time_spec_display_parse_round_trips(
        choice in 0usize..3,
        t in 0.0f64..1000.0,
        steps in 1usize..10_000,
    ) {
        let spec = match choice {
            0 => TimeSpec::Fixed(t),
            1 => TimeSpec::Revival,
            _ => TimeSpec::Grid { t_max: t + 1e-3, steps },
        };
        let text = spec.to_string();
        let back: TimeSpec = text.parse().unwrap();
        prop_assert_eq!(back, spec, "via '{}'", text);
    }

    #[test]
    fn mode_labels_round_trip(paper in any::<bool>(), both in any::<bool>()) {
        let mode = if paper { Mode::Paper } else { Mode::Exact };
        prop_assert_eq!(mode.to_string().parse::<Mode>().unwrap(), mode);

        let sweep_mode = match (paper, both) {
            (_, true) => SweepMode::Both,
            (true, false) => SweepMode::Paper,
            (false, false) => SweepMode::Exact,
        };
        prop_assert_eq!(sweep_mode.to_string().parse::<SweepMode>().unwrap(), sweep_mode);

        let base = if both { LogBase::Two } else { LogBase::E };
        prop_assert_eq!(base.to_string().parse::<LogBase>().unwrap(), base);
    }

    #[test]
    fn pn_csv_round_trips_arbitrary_rows(
        values in prop::collection::vec(finite_f64(), 0..20),
    ) {
        let rows: Vec<PnRow> =
            values.iter().enumerate().map(|(n, &p)| PnRow { n, p }).collect();
        let mut buffer = Vec::new();
        write_pn_csv(&mut buffer, &rows, &vec![]).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let back = parse_pn_csv(&text).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in back.iter().zip(rows.iter()) {
            prop_assert_eq!(a.n, b.n);
            prop_assert_eq!(a.p.to_bits(), b.p.to_bits());
        }
    }
}
