use proptest::prelude::*;
use qis_core::{
    eigen_residual, ratio_deviation, solve_by_diagonalization, solve_closed_form, solve_recurrence,
    solve_recurrence_with, verify, Complex64, ExponentMode, IsParams, Realization,
    RecurrenceOptions, RepresentationSpec, StateVector,
};

fn fixed() -> RecurrenceOptions {
    RecurrenceOptions { auto_extend: false, ..Default::default() }
}

/// `σ_min / σ_max` of the coefficient matrix `C` whose columns are the states.
/// The overlap matrix is `G = C†C`, so it is invertible exactly when this is
/// nonzero; working with `C` avoids squaring the condition number.
fn gram_inverse_condition(states: &[StateVector]) -> f64 {
    let n = states.len();
    let g = faer::Mat::<Complex64>::from_fn(n, n, |i, j| states[j].coeffs[i]);
    let sv = g.singular_values().unwrap();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    min / max
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn converged_states_satisfy_eigen_equation(
        k in 0.25f64..3.0,
        lambda in 0.2f64..2.5,
        re in -1.5f64..1.5,
        im in -0.5f64..0.5,
    ) {
        let spec = RepresentationSpec::discrete_series(k, 256).unwrap();
        let p = IsParams::new(lambda, Complex64::new(re, im), spec).unwrap();
        let s = solve_recurrence(&p).unwrap();
        prop_assume!(s.converged);
        let total: f64 = s.coeffs.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(eigen_residual(&s, &p).unwrap() < 1e-9);
    }

    #[test]
    fn converged_states_saturate(
        k in 0.25f64..3.0,
        lambda in 0.2f64..0.95,
        re in -1.0f64..1.0,
        im in -0.5f64..0.5,
    ) {
        let spec = RepresentationSpec::discrete_series(k, 256).unwrap();
        let p = IsParams::new(lambda, Complex64::new(re, im), spec).unwrap();
        let s = solve_recurrence(&p).unwrap();
        prop_assume!(s.converged);
        let r = verify(&s, &p).unwrap();
        prop_assert!(r.relative_saturation_gap.unwrap() < 1e-8);
        prop_assert!(r.partition_x1.unwrap() < 1e-8);
        prop_assert!(r.partition_x2.unwrap() < 1e-8);
        prop_assert!(r.var_x1.unwrap() >= 0.0 && r.var_x2.unwrap() >= 0.0);
    }

    #[test]
    fn symmetric_realization_states_saturate(
        q in 0.7f64..1.4,
        lambda in 0.3f64..0.9,
        re in -0.5f64..0.5,
    ) {
        let spec = RepresentationSpec::discrete_series(1.0, 256)
            .unwrap()
            .deformed(q, Realization::Symmetric)
            .unwrap();
        let p = IsParams::new(lambda, Complex64::new(re, 0.1), spec).unwrap();
        let s = solve_recurrence(&p).unwrap();
        prop_assume!(s.converged);
        let r = verify(&s, &p).unwrap();
        prop_assert!(r.eigen_residual < 1e-9);
        prop_assert!(r.relative_saturation_gap.unwrap() < 1e-8);
    }

    #[test]
    fn closed_form_matches_recurrence_at_q_one(
        k in 0.25f64..3.0,
        lambda in 0.2f64..0.95,
        re in -1.0f64..1.0,
        im in -0.5f64..0.5,
    ) {
        let spec = RepresentationSpec::discrete_series(k, 48).unwrap();
        let p = IsParams::new(lambda, Complex64::new(re, im), spec).unwrap();
        let cf = solve_closed_form(&p, ExponentMode::Half).unwrap();
        let rec = solve_recurrence_with(&p, &fixed()).unwrap();
        prop_assert!(ratio_deviation(&cf, &rec, 30) < 1e-9);
    }
}

#[test]
fn spin_eigenstates_are_complete_and_saturate() {
    for &j in &[0.5, 1.0, 2.5, 10.0] {
        let spec = RepresentationSpec::spin(j).unwrap();
        for &lambda in &[0.3, 0.7] {
            let pairs = solve_by_diagonalization(&spec, lambda).unwrap();
            assert_eq!(pairs.len(), spec.dim());
            for pair in &pairs {
                let p = IsParams::new(lambda, pair.eta, spec.clone()).unwrap();
                let r = verify(&pair.state, &p).unwrap();
                assert!(r.eigen_residual < 1e-9, "j={j} η={}", pair.eta);
                let gap = r.relative_saturation_gap.unwrap();
                // the η = 0 state of integer j has ⟨[J₁,J₂]⟩ = 0 and zero gap
                let bound = 0.25 * r.commutator_expectation.unwrap().norm_sqr();
                assert!(gap < 1e-10 || r.saturation_gap.unwrap() < 1e-10 * bound.max(1.0), "j={j} λ={lambda}: {gap}");
            }
            let states: Vec<StateVector> = pairs.into_iter().map(|p| p.state).collect();
            let rcond = gram_inverse_condition(&states);
            assert!(rcond > 1e-12, "j={j} λ={lambda}: {rcond:e}");
        }
    }
}

#[test]
fn recurrence_and_diagonalization_agree() {
    for &k in &[0.5, 1.0] {
        let spec = RepresentationSpec::discrete_series(k, 257).unwrap();
        let pairs = solve_by_diagonalization(&spec, 0.5).unwrap();
        for target in [0.0, 0.3, 1.0] {
            let pair = pairs
                .iter()
                .min_by(|a, b| (a.eta.re - target).abs().total_cmp(&(b.eta.re - target).abs()))
                .unwrap();
            let p = IsParams::new(0.5, pair.eta, spec.clone()).unwrap();
            let rec = solve_recurrence_with(&p, &fixed()).unwrap();
            assert!(rec.overlap(&pair.state) > 1.0 - 1e-8, "k={k} η={}", pair.eta);
        }
    }
}

#[test]
fn squeezing_switches_quadrature_at_lambda_one() {
    let spec = RepresentationSpec::discrete_series(1.0, 512).unwrap();
    for i in 1..20 {
        let lambda = i as f64 * 0.1;
        if (lambda - 1.0).abs() < 1e-9 {
            continue;
        }
        let p = IsParams::new(lambda, Complex64::new(0.05, 0.0), spec.clone()).unwrap();
        let s = solve_recurrence(&p).unwrap();
        let r = verify(&s, &p).unwrap();
        assert_eq!(r.squeezed_x1.unwrap(), lambda < 1.0, "λ={lambda}");
        assert_eq!(r.squeezed_x2.unwrap(), lambda > 1.0, "λ={lambda}");
    }
}

#[test]
fn state_json_round_trip_is_exact() {
    let spec = RepresentationSpec::discrete_series(1.5, 64).unwrap();
    let p = IsParams::new(0.4, Complex64::new(0.3, -0.2), spec).unwrap();
    let s = solve_recurrence(&p).unwrap();
    let back: StateVector = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);
    assert_eq!(verify(&back, &p).unwrap(), verify(&s, &p).unwrap());
}
