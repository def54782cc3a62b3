use std::f64::consts::{FRAC_1_SQRT_2, LOG2_E, PI};

use super::*;
use crate::densmat::{DensityMatrix, PureState};
use crate::ensembles::{
    bell3_ensemble, bell4_ensemble, bell_diagonal, e1_ensemble, product8_ensemble, random_density_matrix,
    random_ensemble, resolve_builtin_decomposition, PureDecomposition,
};
use crate::entropy::mutual_information_of_product_basis;
use crate::haar::{sample_local_product_basis, sample_unitary, RngSeed};

const GRID: Evaluation = Evaluation::Quadrature { n_theta: 64, n_phi: 64 };

fn mc(samples: usize, seed: u64) -> Evaluation {
    Evaluation::MonteCarlo { samples, seed }
}

/// Two-level subentropy from the product formula.
fn q2(a: f64, b: f64) -> f64 {
    -(a * a * a.log2() - b * b * b.log2()) / (a - b)
}

fn binary_entropy(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn ket(v: &[f64]) -> PureState {
    PureState::from_real(v).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn harmonic_constant_values() {
    assert_eq!(HarmonicConstant(1).value(), 0.0);
    assert!(close(HarmonicConstant(2).value(), 0.5 * LOG2_E, 1e-15));
    assert!(close(HarmonicConstant(3).value(), (0.5 + 1.0 / 3.0) * LOG2_E, 1e-15));
    for n in 1..20 {
        assert!(HarmonicConstant(n + 1).value() > HarmonicConstant(n).value());
    }
}

#[test]
fn holevo_examples() {
    let rho = random_density_matrix(&[2, 2], 4, &mut RngSeed(1).rng()).unwrap();
    let same = crate::ensembles::Ensemble::new("same", vec![2, 2], vec![(0.3, rho.clone()), (0.7, rho)]).unwrap();
    assert!(holevo_chi(&same).unwrap().value.abs() < 1e-9);
    assert!(jrw_lambda(&same).unwrap().value.abs() < 1e-9);
    assert!(lambda_l(&same, &GRID).unwrap().value.abs() < 1e-9);

    assert!(close(holevo_chi(&bell3_ensemble()).unwrap().value, 3f64.log2(), 1e-12));

    let h = FRAC_1_SQRT_2;
    let e =
        crate::ensembles::Ensemble::from_kets("0+", vec![2], &[(0.5, ket(&[1.0, 0.0])), (0.5, ket(&[h, h]))]).unwrap();
    let chi = holevo_chi(&e).unwrap();
    assert!(close(chi.value, binary_entropy((PI / 8.0).cos().powi(2)), 1e-12));
    assert!(close(chi.value, 0.60088, 1e-5));
    assert_eq!(chi.method, Method::ClosedForm);
    assert_eq!(chi.std_error, 0.0);
}

#[test]
fn jrw_lambda_of_bell3() {
    // Pure members, so Λ = Q(1/3, 1/3, 1/3, 0) = log2 3 - log2(e) (1/2 + 1/3).
    let expected = 3f64.log2() - LOG2_E * (0.5 + 1.0 / 3.0);
    let l = jrw_lambda(&bell3_ensemble()).unwrap().value;
    assert!(close(l, expected, 1e-12), "{l} vs {expected}");
    assert!(l <= holevo_chi(&bell3_ensemble()).unwrap().value);
}

#[test]
fn chi_l_examples() {
    assert!(close(chi_l(&bell3_ensemble(), 0.0).unwrap().value, 1.0, 1e-12));
    assert!(close(chi_l(&product8_ensemble(), 0.0).unwrap().value, 2.0, 1e-12));
    assert!(close(chi_l(&bell3_ensemble(), 0.5).unwrap().value, 0.5, 1e-12));
    assert!(matches!(
        chi_l(&bell3_ensemble(), -0.1),
        Err(Error::NegativeEoutTerm { .. })
    ));
}

#[test]
fn local_subentropy_of_maximally_mixed() {
    // <v|I/4|v> = 1/4 for every product ket, so Q_L = -4 (1/4) log2(1/4) = 2.
    let sigma = DensityMatrix::maximally_mixed(&[2, 2]).unwrap();
    let q = local_subentropy(&sigma, &GRID).unwrap();
    assert!(close(q.value, 2.0, 1e-12), "{}", q.value);
    let m = local_subentropy(&sigma, &mc(2000, 1)).unwrap();
    assert!(close(m.value, 2.0, 1e-12));
}

#[test]
fn local_subentropy_methods_agree() {
    let states = [
        DensityMatrix::from_pure(&ket(&[1.0, 0.0, 0.0, 0.0]), &[2, 2]).unwrap(),
        random_density_matrix(&[2, 2], 2, &mut RngSeed(2).rng()).unwrap(),
        random_density_matrix(&[2, 3], 6, &mut RngSeed(3).rng()).unwrap(),
    ];
    for s in &states {
        let q = local_subentropy(s, &GRID).unwrap();
        let m = local_subentropy(s, &mc(40_000, 7)).unwrap();
        assert!(m.std_error > 0.0);
        assert!(
            (q.value - m.value).abs() <= 3.0 * m.std_error + 1e-6,
            "{} vs {} ± {}",
            q.value,
            m.value,
            m.std_error
        );
    }
}

#[test]
fn local_subentropy_of_pure_product() {
    // Each factor contributes its single-system value n ∫ -x log2 x over the
    // Haar overlap x, which is HarmonicConstant(n).
    let s = DensityMatrix::from_pure(&ket(&[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]), &[2, 3]).unwrap();
    let q = local_subentropy(&s, &GRID).unwrap();
    let expected = HarmonicConstant(2).value() + HarmonicConstant(3).value();
    assert!(close(q.value, expected, 1e-5), "{} vs {expected}", q.value);
}

#[test]
fn lambda_l_of_bell3() {
    // Every conditional of the average has weight 1/2 and spectrum (2/3, 1/3);
    // every member conditional is pure with weight 1/2.
    let r = lambda_l(&bell3_ensemble(), &GRID).unwrap();
    assert!(close(r.value, q2(2.0 / 3.0, 1.0 / 3.0), 1e-10), "{}", r.value);
    assert!(close(r.value, 0.2516, 1e-3));
    assert!(r.flags.is_empty());
    assert_eq!(r.name, BoundName::LambdaL);
}

#[test]
fn lambda_l_of_product8() {
    let r = lambda_l(&product8_ensemble(), &GRID).unwrap();
    let expected = 2.0 * (1.0 - 0.5 * LOG2_E);
    assert!(close(r.value, expected, 1e-5), "{} vs {expected}", r.value);
    assert!(close(r.value, 0.5573, 1e-4));
}

#[test]
fn lambda_l_matches_random_product_basis_average() {
    let e = bell3_ensemble();
    let mut rng = RngSeed(42).rng();
    let n = 4000;
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let b = sample_local_product_basis::<f64, _>(2, 2, &mut rng);
        let i = mutual_information_of_product_basis(&e, &b).unwrap();
        s += i;
        s2 += i * i;
    }
    let mean = s / n as f64;
    let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
    let q = lambda_l(&e, &GRID).unwrap().value;
    assert!((mean - q).abs() <= 3.0 * se, "{mean} ± {se} vs {q}");
}

#[test]
fn lambda_l_methods_agree_and_stay_below_chi() {
    for (i, dims) in [[2usize, 2], [2, 3], [2, 2], [2, 3]].iter().enumerate() {
        let e = random_ensemble(dims, 3, RngSeed(100 + i as u64)).unwrap();
        let q = lambda_l(&e, &GRID).unwrap();
        let m = lambda_l(&e, &mc(40_000, 5)).unwrap();
        assert!(
            (q.value - m.value).abs() <= 3.0 * m.std_error + 1e-6,
            "{dims:?}: {} vs {} ± {}",
            q.value,
            m.value,
            m.std_error
        );
        let chi = holevo_chi(&e).unwrap().value;
        assert!(q.value >= -1e-9 && q.value <= chi + 1e-9);
    }
}

#[test]
fn lambda_l_is_invariant_under_relabeling_and_local_unitaries() {
    let e = random_ensemble(&[2, 3], 4, RngSeed(9)).unwrap();
    let base = lambda_l(&e, &GRID).unwrap().value;
    let permuted = lambda_l(&e.permuted(&[2, 0, 3, 1]), &GRID).unwrap().value;
    assert!(close(base, permuted, 1e-13));

    let mut rng = RngSeed(10).rng();
    let u = sample_unitary::<f64, _>(2, &mut rng);
    let v = sample_unitary::<f64, _>(3, &mut rng);
    let rotated = lambda_l(&e.conjugate_by(&u.kron(&v).unwrap()).unwrap(), &GRID)
        .unwrap()
        .value;
    assert!(close(base, rotated, 1e-4), "{base} vs {rotated}");
}

#[test]
fn quadrature_needs_a_qubit_first_party() {
    let e = random_ensemble(&[3, 2], 2, RngSeed(3)).unwrap();
    assert!(matches!(lambda_l(&e, &GRID), Err(Error::QuadratureUnsupported { .. })));
    let swapped = lambda_l(&e.swap_parties().unwrap(), &GRID).unwrap();
    let direct = lambda_l(&e, &mc(40_000, 3)).unwrap();
    assert!((swapped.value - direct.value).abs() <= 3.0 * direct.std_error + 1e-6);
}

#[test]
fn monte_carlo_budget_is_checked() {
    assert!(matches!(
        lambda_l(&bell3_ensemble(), &mc(10, 1)),
        Err(Error::SampleBudgetTooSmall { got: 10, min: 100 })
    ));
}

#[test]
fn separable_only_flag() {
    assert!(!separable_only(&[2, 2]));
    assert!(!separable_only(&[3, 2]));
    assert!(separable_only(&[3, 3]));
    assert!(separable_only(&[2, 2, 2]));
    let e = random_ensemble(&[3, 3], 2, RngSeed(4)).unwrap();
    let r = lambda_l(&e, &mc(2000, 1)).unwrap();
    assert!(r.has_flag(FLAG_SEPARABLE_ONLY));
}

#[test]
fn monte_carlo_is_reproducible() {
    let e = bell3_ensemble();
    let a = lambda_l(&e, &mc(10_000, 77)).unwrap();
    let b = lambda_l(&e, &mc(10_000, 77)).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
}

#[test]
fn product_average_matches_direct() {
    for e in [product8_ensemble(), e1_ensemble(0.0, PI / 4.0).unwrap()] {
        let p = lambda_l_product_average(&e, &GRID, ProductAverageForm::Derived).unwrap();
        let d = lambda_l(&e, &GRID).unwrap();
        assert!(close(p.value, d.value, PRODUCT_FORM_ABS_TOL));
        let p = lambda_l_product_average(&e, &mc(40_000, 2), ProductAverageForm::Derived).unwrap();
        assert!(p.std_error > 0.0);
    }
}

#[test]
fn printed_product_form_is_inconsistent() {
    let err = lambda_l_product_average(&product8_ensemble(), &GRID, ProductAverageForm::AsPrinted).unwrap_err();
    assert!(matches!(err, Error::ConsistencyFailure { .. }));
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn product_average_requires_product_average() {
    assert!(matches!(
        lambda_l_product_average(&bell3_ensemble(), &GRID, ProductAverageForm::Derived),
        Err(Error::AverageNotProduct { .. })
    ));
}

#[test]
fn distillation_of_four_bell_states() {
    let d = bell_diagonal([0.25; 4]).unwrap();
    let r = distillation_bound(&d, 1, None, &GRID).unwrap();
    let lambda = lambda_l(&bell4_ensemble(), &GRID).unwrap().value;
    assert!(close(r.s_a, 1.0, 1e-12) && close(r.s_b, 1.0, 1e-12) && close(r.s_bar_a, 1.0, 1e-12));
    assert!(close(r.bound.value, 1.0 - lambda, 1e-12));
    assert!(lambda >= 0.0);
    assert_eq!(r.bound.name, BoundName::DistillD);
}

#[test]
fn distillation_of_pure_product_is_nonpositive() {
    let d = resolve_builtin_decomposition("product").unwrap().unwrap();
    let r = distillation_bound(&d, 1, None, &GRID).unwrap();
    assert!(r.bound.value <= 0.0);
    assert!(r.no_distillation());
    assert!(r.bound.has_flag(FLAG_NO_DISTILLATION));
}

#[test]
fn distillation_two_copies_projects_to_a_qubit() {
    let d = bell_diagonal([0.7, 0.1, 0.1, 0.1]).unwrap();
    let r = distillation_bound(&d, 2, None, &GRID).unwrap();
    assert_eq!(r.copies, 2);
    assert!(r.bound.value.is_finite());
    assert_eq!(r.bound.params["projected"], serde_json::json!(true));
}

#[test]
fn hashing_check_examples() {
    let werner = bell_diagonal([0.7, 0.1, 0.1, 0.1]).unwrap();
    let h = hashing_compatibility_check(&werner, 1, &GRID).unwrap();
    let s = -(0.7f64 * 0.7f64.log2() + 3.0 * 0.1 * 0.1f64.log2());
    assert!(close(h.hashing_yield, 1.0 - s, 1e-12));
    assert!(close(h.hashing_yield, -0.35678, 1e-5));
    assert!(h.compatible);

    let pure = bell_diagonal([1.0, 0.0, 0.0, 0.0]).unwrap();
    let h = hashing_compatibility_check(&pure, 1, &GRID).unwrap();
    assert!(close(h.bound, 1.0, 1e-12) && close(h.hashing_yield, 1.0, 1e-12));
    assert!(h.compatible);

    let half = bell_diagonal([0.5, 0.5, 0.0, 0.0]).unwrap();
    let h = hashing_compatibility_check(&half, 1, &GRID).unwrap();
    assert!(close(h.hashing_yield, 0.0, 1e-12) && h.bound >= 0.0 && h.compatible);
}

#[test]
fn hashing_check_rejects_non_bell_members() {
    let d = PureDecomposition::new("x", vec![2, 2], vec![(1.0, ket(&[0.8, 0.0, 0.0, 0.6]))]).unwrap();
    assert!(matches!(
        hashing_compatibility_check(&d, 1, &GRID),
        Err(Error::NotBellDiagonal { index: 0 })
    ));
}

#[test]
fn report_serializes_with_bit_fields() {
    let r = lambda_l(&bell3_ensemble(), &GRID).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["name"], "lambda_L");
    assert_eq!(v["method"], "quadrature");
    assert_eq!(v["params"]["n_theta"], 64);
    assert!(v["value_bits"].is_f64() && v["std_error_bits"].is_f64());
}
