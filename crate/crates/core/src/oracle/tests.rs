use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::*;
use crate::bounds::{holevo_chi, lambda_l, Evaluation};
use crate::densmat::PureState;
use crate::ensembles::{bell3_ensemble, e1_ensemble, product8_ensemble, random_density_matrix};
use crate::entropy::mutual_information_of_product_basis;
use crate::haar::sample_local_product_basis;

const GRID: Evaluation = Evaluation::Quadrature { n_theta: 64, n_phi: 64 };

fn ket(v: &[f64]) -> PureState {
    PureState::from_real(v).unwrap()
}

fn small_budget() -> OptimizerBudget {
    OptimizerBudget {
        restarts: 8,
        max_iters: 1500,
        alice_grid: 4,
        ..OptimizerBudget::default()
    }
}

fn binary_entropy(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

#[test]
fn product_basis_average_matches_quadrature() {
    for e in [bell3_ensemble(), product8_ensemble()] {
        let est = average_product_basis_mi(&e, 4000, RngSeed(1)).unwrap();
        let q = lambda_l(&e, &GRID).unwrap().value;
        assert!(
            (est.mean - q).abs() <= 3.0 * est.std_error,
            "{}: {} ± {} vs {q}",
            e.label(),
            est.mean,
            est.std_error
        );
    }
}

#[test]
fn identical_members_give_zero_every_draw() {
    let rho = random_density_matrix(&[2, 2], 3, &mut RngSeed(2).rng()).unwrap();
    let e = Ensemble::new("same", vec![2, 2], vec![(0.5, rho.clone()), (0.5, rho)]).unwrap();
    let mut rng = RngSeed(3).rng();
    for _ in 0..100 {
        let b = sample_local_product_basis::<f64, _>(2, 2, &mut rng);
        assert!(mutual_information_of_product_basis(&e, &b).unwrap().abs() < 1e-12);
    }
    let est = average_product_basis_mi(&e, 100, RngSeed(3)).unwrap();
    assert!(est.mean.abs() < 1e-12 && est.std_error < 1e-12);
}

#[test]
fn two_orthogonal_product_states_give_one_bit() {
    let e = Ensemble::from_kets(
        "0011",
        vec![2, 2],
        &[(0.5, ket(&[1.0, 0.0, 0.0, 0.0])), (0.5, ket(&[0.0, 0.0, 0.0, 1.0]))],
    )
    .unwrap();
    let r = optimize_two_step_locc(&e, &small_budget(), RngSeed(4)).unwrap();
    assert!((r.value - 1.0).abs() < 1e-6, "{r:?}");
    let g = optimize_global_orthogonal(&e, &small_budget(), RngSeed(4)).unwrap();
    assert!((g.value - 1.0).abs() < 1e-6);
}

#[test]
fn two_step_beats_lambda_l_on_bell3() {
    let e = bell3_ensemble();
    let r = optimize_two_step_locc(&e, &small_budget(), RngSeed(5)).unwrap();
    let l = lambda_l(&e, &GRID).unwrap().value;
    assert!(r.value >= l - 1e-9, "{} < {l}", r.value);
    assert!(r.value >= 0.2516 - 1e-3);
    assert!(r.value <= holevo_chi(&e).unwrap().value + 1e-9);
    let p = TwoStepProtocol::from_params(2, &r.params).unwrap();
    assert!(crate::densmat::gram_deviation(&p.basis(2)) < 1e-9);
}

#[test]
fn two_step_beats_lambda_l_on_e1() {
    let e = e1_ensemble(0.0, PI / 4.0).unwrap();
    let r = optimize_two_step_locc(&e, &small_budget(), RngSeed(6)).unwrap();
    let l = lambda_l(&e, &GRID).unwrap().value;
    assert!(r.value >= l - 1e-9, "{} < {l}", r.value);
}

#[test]
fn two_step_handles_qutrit_bob() {
    let e = crate::ensembles::random_ensemble(&[2, 3], 3, RngSeed(7)).unwrap();
    let r = optimize_two_step_locc(&e, &small_budget(), RngSeed(8)).unwrap();
    let l = lambda_l(&e, &GRID).unwrap().value;
    assert!(r.value >= l - 1e-9);
    assert!(r.value <= holevo_chi(&e).unwrap().value + 1e-9);
    assert!(matches!(
        optimize_two_step_locc(&e.swap_parties().unwrap(), &small_budget(), RngSeed(8)),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn global_search_on_two_qubit_states() {
    let h = FRAC_1_SQRT_2;
    let e = Ensemble::from_kets("01", vec![2], &[(0.5, ket(&[1.0, 0.0])), (0.5, ket(&[0.0, 1.0]))]).unwrap();
    assert!(
        (optimize_global_orthogonal(&e, &small_budget(), RngSeed(9))
            .unwrap()
            .value
            - 1.0)
            .abs()
            < 1e-6
    );

    let e = Ensemble::from_kets("0+", vec![2], &[(0.5, ket(&[1.0, 0.0])), (0.5, ket(&[h, h]))]).unwrap();
    let r = optimize_global_orthogonal(&e, &small_budget(), RngSeed(10)).unwrap();
    let expected = 1.0 - binary_entropy((PI / 8.0).cos().powi(2));
    assert!((r.value - expected).abs() < 1e-3, "{} vs {expected}", r.value);
    assert!((expected - 0.3991).abs() < 1e-4);
    assert!(r.converged);
}

#[test]
fn global_search_sandwich_on_bell3() {
    let e = bell3_ensemble();
    let g = optimize_global_orthogonal(&e, &small_budget(), RngSeed(11)).unwrap();
    assert!(g.value <= 3f64.log2() + 1e-9);
    let mut rng = RngSeed(12).rng();
    for _ in 0..20 {
        let b = sample_local_product_basis::<f64, _>(2, 2, &mut rng);
        assert!(g.value >= mutual_information_of_product_basis(&e, &b).unwrap() - 1e-9);
    }
    let l = optimize_two_step_locc(&e, &small_budget(), RngSeed(13)).unwrap();
    assert!(g.value >= l.value - 1e-6);
}

#[test]
fn optimizers_are_reproducible() {
    let e = bell3_ensemble();
    let a = optimize_two_step_locc(&e, &small_budget(), RngSeed(14)).unwrap();
    let b = optimize_two_step_locc(&e, &small_budget(), RngSeed(14)).unwrap();
    assert_eq!(a, b);
    let a = optimize_global_orthogonal(&e, &small_budget(), RngSeed(15)).unwrap();
    let b = optimize_global_orthogonal(&e, &small_budget(), RngSeed(15)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn global_search_is_size_capped() {
    let e = crate::ensembles::random_ensemble(&[3, 6], 2, RngSeed(16)).unwrap();
    assert!(matches!(
        optimize_global_orthogonal(&e, &small_budget(), RngSeed(1)),
        Err(Error::SizeCap(_))
    ));
}

#[test]
fn unconverged_result_maps_to_budget_error() {
    let r = OptimizationResult {
        value: 0.1,
        params: vec![],
        restarts_used: 1,
        converged: false,
        evaluations: 7,
    };
    assert!(matches!(
        r.require_converged(),
        Err(Error::BudgetExhausted { evaluations: 7 })
    ));
}
