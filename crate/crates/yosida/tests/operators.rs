//! Resolvent family properties across the built-in catalogue:
//! nonexpansiveness, the two-parameter resolvent identity, the shifted
//! resolvent's contraction gain, minimal-section estimates, and the
//! time-continuity certifier's pass/fail behavior.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use yosida::{
    abs_a_estimate, check_t_stability, constant_matrix_family, linear_matrix_family,
    rotation_damped_family, scalar_cubic_family, scalar_timevar_decay_family,
    soft_threshold_family, zero_family, ControlData, EvolutionProblem, NormKind, OperatorFamily,
    Space,
};

fn catalogue() -> Vec<OperatorFamily> {
    let e2 = Space::new(2, NormKind::Euclidean).unwrap();
    vec![
        zero_family(Space::scalar()),
        // Dissipative constant matrix: symmetric part is negative definite.
        constant_matrix_family(e2, &[-1.0, 0.5, -0.5, -2.0]).unwrap(),
        soft_threshold_family(e2, 0.4).unwrap(),
        rotation_damped_family(-0.3, 1.2).unwrap(),
        scalar_cubic_family(Arc::new(|t: f64| 0.3 * t.sin())),
        scalar_timevar_decay_family(),
    ]
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| scale * rng.random_range(-1.0..1.0)).collect()
}

#[test]
fn resolvents_are_nonexpansive_on_a_thousand_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let families = catalogue();
    for trial in 0..1000 {
        let family = &families[trial % families.len()];
        let space = family.space();
        let dim = space.dim();
        let t = rng.random_range(-5.0..5.0);
        let lambda = rng.random_range(0.01..family.lambda_max().min(2.0));
        let x = random_point(&mut rng, dim, 3.0);
        let y = random_point(&mut rng, dim, 3.0);
        let jx = family.resolve(t, lambda, &x).unwrap();
        let jy = family.resolve(t, lambda, &y).unwrap();
        let lhs = space.norm_diff(&jx, &jy).unwrap();
        let rhs = space.norm_diff(&x, &y).unwrap();
        assert!(
            lhs <= rhs + 1e-12,
            "family `{}` expanded a pair at t={t}, lambda={lambda}: {lhs} > {rhs}",
            family.label()
        );
    }
}

#[test]
fn the_resolvent_identity_relates_two_regularization_levels() {
    // J_lambda x = J_mu( (mu/lambda) x + (1 - mu/lambda) J_lambda x ) holds
    // for every resolvent of a fixed dissipative operator; exercised here on
    // the autonomous catalogue at matching times (time-dependent families
    // satisfy it frozen at each t).
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let families = catalogue();
    for trial in 0..300 {
        let family = &families[trial % families.len()];
        let space = family.space();
        let dim = space.dim();
        let t = rng.random_range(-5.0..5.0);
        let lambda = rng.random_range(0.1..family.lambda_max().min(1.5));
        let mu = rng.random_range(0.01..lambda);
        let x = random_point(&mut rng, dim, 2.0);
        let jl = family.resolve(t, lambda, &x).unwrap();
        let blend: Vec<f64> = x
            .iter()
            .zip(&jl)
            .map(|(xi, ji)| (mu / lambda) * xi + (1.0 - mu / lambda) * ji)
            .collect();
        let via_mu = family.resolve(t, mu, &blend).unwrap();
        let gap = space.norm_diff(&jl, &via_mu).unwrap();
        assert!(
            gap <= 1e-10,
            "resolvent identity broken for `{}` at lambda={lambda}, mu={mu}: gap {gap}",
            family.label()
        );
    }
}

#[test]
fn shifted_resolvents_contract_with_the_perturbed_gain() {
    // The omega-shifted resolvent (I - lambda(A + omega))^{-1} is Lipschitz
    // with constant 1/(1 - lambda omega) < 1 for omega < 0.
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let families = catalogue();
    for trial in 0..300 {
        let family = &families[trial % families.len()];
        let space = family.space();
        let dim = space.dim();
        let omega = rng.random_range(-2.0..-0.2);
        let t = rng.random_range(-3.0..3.0);
        let lambda = rng.random_range(0.01..0.4);
        let x = random_point(&mut rng, dim, 2.0);
        let y = random_point(&mut rng, dim, 2.0);
        let jx = family.resolve_shifted(omega, t, lambda, &x).unwrap();
        let jy = family.resolve_shifted(omega, t, lambda, &y).unwrap();
        let lhs = space.norm_diff(&jx, &jy).unwrap();
        let rhs = space.norm_diff(&x, &y).unwrap() / (1.0 - lambda * omega);
        assert!(
            lhs <= rhs + 1e-12,
            "family `{}` beat the perturbed gain at lambda={lambda}, omega={omega}",
            family.label()
        );
    }
    // Out-of-range regularization is refused.
    let zero = zero_family(Space::scalar());
    assert!(zero.resolve_shifted(-3.0, 0.0, 0.5, &[1.0]).is_err());
}

#[test]
fn yosida_outputs_are_sections_of_the_operator() {
    // (J_lambda z, A_lambda z) lies on the graph: for the constant matrix
    // family A_lambda z must equal M (J_lambda z) exactly.
    let m = [-1.0, 0.5, -0.5, -2.0];
    let space = Space::new(2, NormKind::Euclidean).unwrap();
    let family = constant_matrix_family(space, &m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..100 {
        let z = random_point(&mut rng, 2, 3.0);
        let lambda = rng.random_range(0.05..1.0);
        let j = family.resolve(0.0, lambda, &z).unwrap();
        let a = family.yosida(0.0, lambda, &z).unwrap();
        let mj = [m[0] * j[0] + m[1] * j[1], m[2] * j[0] + m[3] * j[1]];
        let gap = space.norm_diff(&a, &mj).unwrap();
        assert!(gap <= 1e-10, "Yosida output strayed off the graph: {gap}");
    }
}

#[test]
fn minimal_section_estimates_are_monotone_and_match_linear_truth() {
    let space = Space::new(2, NormKind::Euclidean).unwrap();
    let m = [-1.0, 0.5, -0.5, -2.0];
    let family = constant_matrix_family(space, &m).unwrap();
    let x = [0.7, -0.4];
    let lambdas = [0.4, 0.2, 0.1, 0.05, 0.025, 0.0125];
    let est = abs_a_estimate(&family, 0.0, &x, &lambdas).unwrap();
    assert!(est.monotone, "slope norms must grow as lambda shrinks");
    let truth =
        space.norm(&[m[0] * x[0] + m[1] * x[1], m[2] * x[0] + m[3] * x[1]]).unwrap();
    assert!(est.estimate <= truth + 1e-9, "estimate overshot |A x|");
    assert!(
        (est.estimate - truth).abs() <= 0.05 * truth,
        "estimate {} far from |A x| = {truth}",
        est.estimate
    );

    // Shrinkage operator: at a point with no zero components the minimal
    // section of the subdifferential has norm c * sqrt(dim).
    let c = 0.4;
    let shrink = soft_threshold_family(space, c).unwrap();
    let est = abs_a_estimate(&shrink, 0.0, &[0.5, -0.8], &lambdas).unwrap();
    assert!(est.monotone);
    let truth = c * 2.0f64.sqrt();
    assert!((est.estimate - truth).abs() <= 1e-9, "shrinkage section norm {}", est.estimate);
}

#[test]
fn time_continuity_certifier_accepts_honest_controls_and_flags_liars() {
    // Honest: the time-varying decay family declares its true modulus.
    let honest = scalar_timevar_decay_family();
    let p = EvolutionProblem::new(honest, -1.0);
    let ts = [0.0, 0.7, 1.9, 3.1];
    let zs = vec![vec![0.8], vec![-0.5], vec![0.3]];
    let cert = check_t_stability(&p, &ts, &zs, &[0.2, 0.05]).unwrap();
    assert!(cert.pass, "honest control failed: {}", cert.one_line());

    // Liar: same resolvent map, but the declared modulus shrinks the true
    // time variation a hundredfold.
    let space = Space::scalar();
    let matrix = Arc::new(|t: f64| {
        nalgebra::DMatrix::from_row_slice(1, 1, &[-(1.0 + 0.5 * t.sin())])
    });
    let lying_control = ControlData::new(
        Arc::new(|t: f64| vec![0.01 * t.sin()]),
        space,
        Arc::new(|r: f64| 0.01 * (1.0 + r)),
    );
    let liar = linear_matrix_family(space, "understated_decay", matrix, 10.0)
        .with_control(lying_control);
    let p = EvolutionProblem::new(liar, -1.0);
    let cert = check_t_stability(&p, &ts, &zs, &[0.2, 0.05]).unwrap();
    assert!(!cert.pass, "understated control slipped through: {}", cert.one_line());

    // Families without any control are refused outright.
    let bare = linear_matrix_family(
        space,
        "uncontrolled",
        Arc::new(|t: f64| nalgebra::DMatrix::from_row_slice(1, 1, &[-(1.0 + 0.5 * t.sin())])),
        10.0,
    );
    let p = EvolutionProblem::new(bare, -1.0);
    assert!(check_t_stability(&p, &ts, &zs, &[0.2]).is_err());
}

#[test]
fn singular_linear_resolvents_surface_as_hypothesis_violations() {
    // (I - lambda M) singular at lambda = 1 for M = I.
    let space = Space::scalar();
    let family = linear_matrix_family(
        space,
        "identity_growth",
        Arc::new(|_t: f64| nalgebra::DMatrix::from_row_slice(1, 1, &[1.0])),
        10.0,
    );
    let err = family.resolve(0.0, 1.0, &[1.0]).unwrap_err();
    let msg = err.to_string();
    assert!(
        msg.contains("hypothesis"),
        "singular solve reported `{msg}` instead of a hypothesis violation"
    );
}
