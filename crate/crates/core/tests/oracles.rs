use kdv_utm::closed_forms::lkdv_step;
use kdv_utm::oracles::{
    error_curves, kdv_split_step, kdv_split_step_with, mol_interface_solve, mol_solve, GridSpec, MolOptions,
    MolProblem, SplitStepOptions,
};
use kdv_utm::{evaluate, Params, Request};

#[test]
fn mol_without_jump_reproduces_linear_kdv() {
    let p = Params::new(1.0, 4.0).unwrap();
    let grid = GridSpec::mol_reference(&p);
    let xs: Vec<f64> = (0..=40).map(|i| -10.0 + 0.5 * i as f64).collect();
    let t = 1.0;
    let r = mol_solve(MolProblem::without_jump(&p), p.c(), &grid, t, &xs, MolOptions::default()).unwrap();
    // q(x, t) = u(x + ct, t)
    let worst = xs
        .iter()
        .zip(&r.values)
        .map(|(x, v)| (v - lkdv_step(x + p.c() * t, t, p.a())).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-3, "{worst}");
}

#[test]
fn mol_keeps_far_field_and_matches_evaluator_at_minus_two() {
    let p = Params::new(1.0, 4.0).unwrap();
    let grid = GridSpec::mol_reference(&p);
    let r = mol_interface_solve(&p, &grid, 1.0, &[-2.0]).unwrap();
    assert!(r.far_field_deviation <= 1e-8, "{}", r.far_field_deviation);
    let q = evaluate(&Request::new(-2.0, 1.0, p)).unwrap().value;
    assert!((r.values[0] - q).abs() <= 1e-4, "{} vs {q}", r.values[0]);
}

#[test]
fn linear_split_step_tracks_similarity_solution() {
    let grid = GridSpec::kdv_reference();
    let t = 0.1;
    let mut previous = f64::INFINITY;
    for w in [0.4, 0.2, 0.1] {
        let r = kdv_split_step_with(1.0, &grid, t, SplitStepOptions::new(w).linear()).unwrap();
        let (x, u) = r.window(-10.0, 10.0);
        let worst = x
            .iter()
            .zip(&u)
            .map(|(x, u)| (u - lkdv_step(*x, t, 1.0)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-4 + w, "w={w}: {worst}");
        assert!(worst < previous, "w={w}: {worst} not below {previous}");
        previous = worst;
    }
}

#[test]
fn nonlinear_split_step_conserves_mass() {
    let r = kdv_split_step(1.0, &GridSpec::kdv_reference(), 0.1, 0.05).unwrap();
    assert!(r.mass_drift <= 1e-8, "{}", r.mass_drift);
    assert!(r.top_band_fraction < 1e-10);
}

#[test]
fn error_curves_vanish_with_amplitude() {
    let e = error_curves(0.02, 0.1, &GridSpec::kdv_reference()).unwrap();
    assert_eq!(e.x.len(), e.e_model.len());
    assert_eq!(e.x.len(), e.e_lkdv.len());
    assert!(e.e_model.iter().chain(&e.e_lkdv).all(|v| *v >= 0.0));
    assert!(e.max_model() < 0.02 && e.max_lkdv() < 0.02, "{} {}", e.max_model(), e.max_lkdv());
}
