use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex;
use proptest::prelude::*;

use super::*;
use crate::ensembles::{bell_state, e1_ensemble, random_density_matrix, BellState};
use crate::error::Error;
use crate::haar::{sample_pure_state, sample_unitary, RngSeed};

fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

fn ket(v: &[f64]) -> PureState {
    PureState::from_real(v).unwrap()
}

fn random_state(dims: &[usize], seed: u64) -> DensityMatrix {
    let n: usize = dims.iter().product();
    random_density_matrix(dims, n, &mut RngSeed(seed).rng()).unwrap()
}

#[test]
fn maximally_mixed_and_projector_validate() {
    let m = ComplexMatrix::<f64>::identity(4).scale(0.25);
    let rho = validate_density_matrix(m, &[2, 2]).unwrap();
    assert_eq!(rho.dims(), &[2, 2]);

    let p = validate_density_matrix(PureState::<f64>::basis(4, 0).projector(), &[2, 2]).unwrap();
    let e = p.eigh().unwrap();
    let rank = e.values.iter().filter(|&&v| v > 1e-12).count();
    assert_eq!(rank, 1);
}

#[test]
fn non_psd_is_rejected_with_magnitude() {
    let m = ComplexMatrix::<f64>::diag(&[0.6, 0.6, -0.2, 0.0]);
    match validate_density_matrix(m, &[2, 2]) {
        Err(Error::NegativeEigenvalue { value }) => assert!((value + 0.2).abs() < 1e-12),
        other => panic!("expected NegativeEigenvalue, got {other:?}"),
    }
}

#[test]
fn non_hermitian_and_bad_trace_are_rejected() {
    let mut m = ComplexMatrix::<f64>::identity(2).scale(0.5);
    m[(0, 1)] = c(0.1);
    assert!(matches!(
        validate_density_matrix(m, &[2]),
        Err(Error::NonHermitian { .. })
    ));
    let m = ComplexMatrix::<f64>::identity(2).scale(0.6);
    match validate_density_matrix(m, &[2]) {
        Err(Error::TraceDeviation { trace }) => assert!((trace - 1.2).abs() < 1e-12),
        other => panic!("expected TraceDeviation, got {other:?}"),
    }
}

#[test]
fn dims_must_match_size() {
    let m = ComplexMatrix::<f64>::identity(4).scale(0.25);
    assert!(matches!(
        validate_density_matrix(m, &[2, 3]),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn tiny_negative_eigenvalue_is_clamped() {
    let m = ComplexMatrix::<f64>::diag(&[0.5 + 5e-11, 0.5, -5e-11]);
    let rho = validate_density_matrix(m, &[3]).unwrap();
    let e = rho.eigh().unwrap();
    assert!(e.values.iter().all(|&v| v >= 0.0));
    assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
    assert!(rho.matrix()[(2, 2)].re >= 0.0);
}

#[test]
fn valid_input_keeps_exact_bits() {
    let rho = random_state(&[2, 3], 11);
    let again = validate_density_matrix(rho.matrix().clone(), &[2, 3]).unwrap();
    assert_eq!(again.matrix(), rho.matrix());
}

#[test]
fn eigh_of_diagonal_input() {
    let rho = validate_density_matrix(
        ComplexMatrix::<f64>::diag(&[1.0 / 3.0, 0.0, 1.0 / 3.0, 1.0 / 3.0]),
        &[2, 2],
    )
    .unwrap();
    let e = rho.eigh().unwrap();
    let expected = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0];
    for (v, x) in e.values.iter().zip(expected) {
        assert!((v - x).abs() < 1e-14);
    }
}

#[test]
fn eigh_of_two_nonorthogonal_projectors() {
    // |<00|++>|^2 = 1/4, so the Gram spectrum of the mixture is (1 ± 1/2)/2.
    let plus_plus = ket(&[0.5, 0.5, 0.5, 0.5]);
    let zero_zero = ket(&[1.0, 0.0, 0.0, 0.0]);
    let m = (&zero_zero.projector() + &plus_plus.projector()).scale(0.5);
    let e = validate_density_matrix(m, &[2, 2]).unwrap().eigh().unwrap();
    assert!((e.values[0] - 0.75).abs() < 1e-12);
    assert!((e.values[1] - 0.25).abs() < 1e-12);
    assert!(e.values[2].abs() < 1e-12 && e.values[3].abs() < 1e-12);

    // Single qubit |0>, |+>: overlap 1/2 gives cos^2(pi/8), sin^2(pi/8).
    let h = FRAC_1_SQRT_2;
    let m = (&ket(&[1.0, 0.0]).projector() + &ket(&[h, h]).projector()).scale(0.5);
    let e = validate_density_matrix(m, &[2]).unwrap().eigh().unwrap();
    assert!((e.values[0] - (PI / 8.0).cos().powi(2)).abs() < 1e-12);
    assert!((e.values[1] - (PI / 8.0).sin().powi(2)).abs() < 1e-12);
}

#[test]
fn eigh_of_random_states_is_orthonormal_and_reconstructs() {
    for seed in 0..10 {
        let rho = random_state(&[3, 3], seed);
        let e = rho.eigh().unwrap();
        let v = &e.vectors;
        let gram = &v.adjoint() * v;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(9)) < 1e-10);
        assert!(e.reconstruct().max_abs_diff(rho.matrix()) < 1e-10);
        assert!((e.values.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn kron_examples() {
    let i2 = ComplexMatrix::<f64>::identity(2);
    assert_eq!(i2.kron(&i2).unwrap(), ComplexMatrix::identity(4));
    let k = kron_vec(
        PureState::<f64>::basis(2, 0).amplitudes(),
        PureState::<f64>::basis(2, 1).amplitudes(),
    );
    assert_eq!(k, PureState::<f64>::basis(4, 1).amplitudes());
    let x = ComplexMatrix::new(2, 2, vec![c(0.0), c(1.0), c(1.0), c(0.0)]).unwrap();
    let xi = x.kron(&i2).unwrap();
    assert_eq!(
        xi.mul_vec(PureState::<f64>::basis(4, 0).amplitudes()),
        PureState::<f64>::basis(4, 2).amplitudes()
    );
}

#[test]
fn partial_trace_examples() {
    let phi = DensityMatrix::from_pure(&bell_state(BellState::PhiPlus), &[2, 2]).unwrap();
    let half = ComplexMatrix::identity(2).scale(0.5);
    assert!(phi.partial_trace(0).unwrap().matrix().max_abs_diff(&half) < 1e-15);

    let e1 = e1_ensemble(0.3, PI / 4.0).unwrap();
    let avg = e1.average_state();
    assert!(avg.partial_trace(1).unwrap().matrix().max_abs_diff(&half) < 1e-12);

    assert!(matches!(
        phi.partial_trace(2),
        Err(Error::BadPartyIndex { index: 2, parties: 2 })
    ));
}

#[test]
fn partial_trace_keeps_middle_party() {
    let a = random_state(&[2], 1);
    let b = random_state(&[3], 2);
    let cst = random_state(&[2], 3);
    let abc = a.kron(&b).unwrap().kron(&cst).unwrap();
    assert!(abc.partial_trace(1).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-12);
    assert!(abc.partial_trace(2).unwrap().matrix().max_abs_diff(cst.matrix()) < 1e-12);
}

#[test]
fn swap_parties_exchanges_marginals() {
    let rho = random_state(&[2, 3], 5);
    let s = rho.swap_parties().unwrap();
    assert_eq!(s.dims(), &[3, 2]);
    assert!(
        s.partial_trace(0)
            .unwrap()
            .matrix()
            .max_abs_diff(rho.partial_trace(1).unwrap().matrix())
            < 1e-14
    );
    assert_eq!(s.swap_parties().unwrap().matrix(), rho.matrix());
}

#[test]
fn conditional_of_bell_state() {
    let phi = DensityMatrix::from_pure(&bell_state(BellState::PhiPlus), &[2, 2]).unwrap();
    let c0 = phi.conditional_operator(&PureState::basis(2, 0)).unwrap();
    assert!((c0.weight - 0.5).abs() < 1e-15);
    let s = c0.state.unwrap();
    assert!(s.matrix().max_abs_diff(&PureState::<f64>::basis(2, 0).projector()) < 1e-15);
}

#[test]
fn conditional_of_complement_of_singlet() {
    let psi_m = bell_state(BellState::PsiMinus).projector();
    let sigma = (&ComplexMatrix::identity(4) - &psi_m).scale(1.0 / 3.0);
    let sigma = validate_density_matrix(sigma, &[2, 2]).unwrap();
    let mut rng = RngSeed(9).rng();
    for _ in 0..20 {
        let alpha = sample_pure_state::<f64, _>(2, &mut rng);
        let cond = sigma.conditional_operator(&alpha).unwrap();
        assert!((cond.weight - 0.5).abs() < 1e-12);
        let e = cond.state.unwrap().eigh().unwrap();
        assert!((e.values[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((e.values[1] - 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn conditional_of_product_state() {
    let a = random_state(&[2], 21);
    let b = random_state(&[3], 22);
    let ab = a.kron(&b).unwrap();
    let alpha = sample_pure_state::<f64, _>(2, &mut RngSeed(3).rng());
    let cond = ab.conditional_operator(&alpha).unwrap();
    assert!((cond.weight - a.expectation(alpha.amplitudes())).abs() < 1e-14);
    assert!(cond.state.unwrap().matrix().max_abs_diff(b.matrix()) < 1e-12);
}

#[test]
fn conditional_below_cutoff_is_undefined() {
    let p = DensityMatrix::<f64>::from_pure(&PureState::basis(4, 0), &[2, 2]).unwrap();
    let cond = p.conditional_operator(&PureState::basis(2, 1)).unwrap();
    assert_eq!(cond.weight, 0.0);
    assert!(cond.state.is_none());
    assert!(matches!(
        p.conditional_operator(&PureState::basis(3, 0)),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn conditional_weights_average_to_one_over_da() {
    let rho = random_state(&[3, 2], 31);
    let mut rng = RngSeed(32).rng();
    let n = 20_000;
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..n {
        let alpha = sample_pure_state::<f64, _>(3, &mut rng);
        let w = 3.0 * rho.conditional_operator(&alpha).unwrap().weight;
        sum += w;
        sum2 += w * w;
    }
    let mean = sum / n as f64;
    let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((mean - 1.0).abs() < 4.0 * se, "mean {mean} se {se}");
}

#[test]
fn pure_state_norm_is_checked() {
    assert!(matches!(
        PureState::new(vec![c(1.0), c(1.0)]),
        Err(Error::NotNormalized { .. })
    ));
    let s = PureState::normalized(vec![c(3.0), c(4.0)]).unwrap();
    assert!((s.amplitudes()[0].re - 0.6).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_trace_inverts_kron(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let a = random_state(&[da], seed);
        let b = random_state(&[db], seed.wrapping_add(1));
        let ab = a.kron(&b).unwrap();
        prop_assert!(ab.partial_trace(0).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-12);
        prop_assert!(ab.partial_trace(1).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-12);
    }

    #[test]
    fn spectrum_is_unitarily_invariant(seed in any::<u64>(), d in 2usize..6) {
        let rho = random_state(&[d], seed);
        let u = sample_unitary::<f64, _>(d, &mut RngSeed(seed ^ 0x5a5a).rng());
        let v1 = rho.eigh().unwrap().values;
        let v2 = rho.conjugate_by(&u).unwrap().eigh().unwrap().values;
        for (x, y) in v1.iter().zip(&v2) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}
