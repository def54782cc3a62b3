use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{Ensemble, PureDecomposition};
use crate::densmat::{validate_density_matrix, ComplexMatrix, DensityMatrix, PureState};
use crate::error::{Error, Result};
use crate::haar::RngSeed;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];
}

fn ket(v: &[f64]) -> PureState {
    PureState::from_real(v).expect("nonzero literal ket")
}

/// Canonical Bell state in the `|00>, |01>, |10>, |11>` ordering.
pub fn bell_state(b: BellState) -> PureState {
    let h = FRAC_1_SQRT_2;
    match b {
        BellState::PhiPlus => ket(&[h, 0.0, 0.0, h]),
        BellState::PhiMinus => ket(&[h, 0.0, 0.0, -h]),
        BellState::PsiPlus => ket(&[0.0, h, h, 0.0]),
        BellState::PsiMinus => ket(&[0.0, h, -h, 0.0]),
    }
}

/// `(|00> ± |11>)/√2` and `(|01> + |10>)/√2` with equal weights.
pub fn bell3_ensemble() -> Ensemble {
    let third = 1.0 / 3.0;
    let kets: Vec<(f64, PureState)> = [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus]
        .into_iter()
        .map(|b| (third, bell_state(b)))
        .collect();
    Ensemble::from_kets("bell3", vec![2, 2], &kets).expect("valid builtin")
}

/// All four Bell states with equal weights (average `I/4`).
pub fn bell4_ensemble() -> Ensemble {
    bell_diagonal([0.25; 4])
        .expect("valid builtin")
        .to_ensemble()
        .expect("valid builtin")
        .with_label("bell4")
}

/// Bell-diagonal mixture in the order Φ+, Φ-, Ψ+, Ψ-; zero weights are dropped.
pub fn bell_diagonal(weights: [f64; 4]) -> Result<PureDecomposition> {
    let members = BellState::ALL
        .into_iter()
        .zip(weights)
        .filter(|(_, p)| *p != 0.0)
        .map(|(b, p)| (p, bell_state(b)))
        .collect();
    PureDecomposition::new(
        format!(
            "bell-diagonal:{}:{}:{}:{}",
            weights[0], weights[1], weights[2], weights[3]
        ),
        vec![2, 2],
        members,
    )
}

/// The four orthonormal two-qubit states of the E₁ family with
/// `a = sin(θ/2) cos(φ/2)`, `b = sin(θ/2) sin(φ/2)`, `c = cos(θ/2)`.
///
/// Coordinates of the first three kets are taken in `{|00>, |11>, |10>}`; the
/// third is the normalized cross product of the first two. The fourth is `|01>`.
pub fn e1_states(theta: f64, phi: f64) -> Result<[PureState; 4]> {
    if !theta.is_finite() || !phi.is_finite() || !(-1e-12..=std::f64::consts::PI + 1e-12).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "E1 parameters need θ in [0, π] and finite φ, got θ = {theta}, φ = {phi}"
        )));
    }
    let a = (theta / 2.0).sin() * (phi / 2.0).cos();
    let b = (theta / 2.0).sin() * (phi / 2.0).sin();
    let c = (theta / 2.0).cos();
    let v1 = [a, b, c];
    let raw = [b - c, c - a, a - b];
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(Error::DegenerateParameters(format!(
            "a = b = c = {a} at θ = {theta}, φ = {phi}; normalization k is undefined"
        )));
    }
    let v2 = raw.map(|x| x / norm);
    let v3 = [
        v1[1] * v2[2] - v1[2] * v2[1],
        v1[2] * v2[0] - v1[0] * v2[2],
        v1[0] * v2[1] - v1[1] * v2[0],
    ];
    // {|00>, |11>, |10>} -> indices 0, 3, 2 of |00>, |01>, |10>, |11>
    let embed = |v: [f64; 3]| PureState::from_real(&[v[0], 0.0, v[2], v[1]]);
    Ok([embed(v1)?, embed(v2)?, embed(v3)?, PureState::basis(4, 1)])
}

pub fn e1_ensemble(theta: f64, phi: f64) -> Result<Ensemble> {
    let kets: Vec<(f64, PureState)> = e1_states(theta, phi)?.into_iter().map(|k| (0.25, k)).collect();
    Ensemble::from_kets(format!("e1:{theta}:{phi}"), vec![2, 2], &kets)
}

/// `|00>, |01>, |10>, |11>, |++>, |+->, |-+>, |-->` with equal weights.
pub fn product8_ensemble() -> Ensemble {
    let h = FRAC_1_SQRT_2;
    let z = [ket(&[1.0, 0.0]), ket(&[0.0, 1.0])];
    let x = [ket(&[h, h]), ket(&[h, -h])];
    let mut kets = Vec::with_capacity(8);
    for basis in [&z, &x] {
        for a in basis.iter() {
            for b in basis.iter() {
                kets.push((0.125, a.kron(b)));
            }
        }
    }
    Ensemble::from_kets("product8", vec![2, 2], &kets).expect("valid builtin")
}

/// `pi`, `pi/4`, `3pi/4`, `3*pi/4` or a plain decimal, in radians.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || Error::InvalidArgument(format!("cannot parse angle {s:?}"));
    let pi = std::f64::consts::PI;
    let value = if let Some(rest) = t.strip_prefix("pi") {
        match rest.strip_prefix('/') {
            Some(den) => pi / den.parse::<f64>().map_err(|_| bad())?,
            None if rest.is_empty() => pi,
            None => return Err(bad()),
        }
    } else if let Some((num, den)) = t.split_once("pi/") {
        let num = num.trim_end_matches('*');
        num.parse::<f64>().map_err(|_| bad())? * pi / den.parse::<f64>().map_err(|_| bad())?
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    Ok(value)
}

/// Built-in ensemble by name: `bell3`, `bell4`, `product8`, `e1:<θ>:<φ>`
/// (angles as decimals or `pi/4`-style fractions). `None` for unknown names.
pub fn resolve_builtin(name: &str) -> Option<Result<Ensemble>> {
    match name {
        "bell3" => Some(Ok(bell3_ensemble())),
        "bell4" => Some(Ok(bell4_ensemble())),
        "product8" => Some(Ok(product8_ensemble())),
        _ => {
            let rest = name.strip_prefix("e1:")?;
            Some((|| {
                let (t, p) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidArgument(format!("expected e1:<theta>:<phi>, got {name:?}")))?;
                e1_ensemble(parse_angle(t)?, parse_angle(p)?)
            })())
        }
    }
}

/// Built-in decomposition by name: `bell-diagonal:<p1>:<p2>:<p3>:<p4>` or
/// `product` (the single state `|00>`).
pub fn resolve_builtin_decomposition(name: &str) -> Option<Result<PureDecomposition>> {
    if name == "product" {
        return Some(PureDecomposition::new(
            "product",
            vec![2, 2],
            vec![(1.0, PureState::basis(4, 0))],
        ));
    }
    let rest = name.strip_prefix("bell-diagonal:")?;
    Some((|| {
        let parts: Vec<f64> = rest
            .split(':')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("bad weight {p:?}")))
            })
            .collect::<Result<_>>()?;
        let w: [f64; 4] = parts
            .try_into()
            .map_err(|_| Error::InvalidArgument("bell-diagonal needs four weights".into()))?;
        bell_diagonal(w)
    })())
}

/// Random ensemble for tests and sweeps: member `i` is `G G^dagger / tr` for
/// a complex Gaussian `G` of random rank (rank one gives a pure state);
/// probabilities are flat-Dirichlet.
pub fn random_ensemble(dims: &[usize], n_members: usize, seed: RngSeed) -> Result<Ensemble> {
    let mut rng = seed.rng();
    let n: usize = dims.iter().product();
    let mut probs: Vec<f64> = (0..n_members).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    let members = probs
        .into_iter()
        .map(|p| {
            let rank = rng.random_range(1..=n);
            Ok((p, random_density_matrix(dims, rank, &mut rng)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(format!("random:{dims:?}:{}", seed.0), dims.to_vec(), members)
}

/// `G G^dagger / tr(G G^dagger)` with `G` an `n x rank` complex Gaussian matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let n: usize = dims.iter().product();
    let g = ComplexMatrix::from_fn(n, rank, |_, _| {
        Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    validate_density_matrix(w.scale(1.0 / tr).hermitian_part(), dims)
}
