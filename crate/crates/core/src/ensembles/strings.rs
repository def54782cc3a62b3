use num_complex::Complex;

use super::{Ensemble, Member, PureDecomposition};
use crate::densmat::{ComplexMatrix, DensityMatrix, PureState, MAX_DIM};
use crate::error::{Error, Result};

/// Cap on `members × dim²` for an m-copy string ensemble.
pub const MAX_STRING_ENTRIES: usize = 1 << 22;

/// Ensemble of strings `|psi_{i1}> ⊗ ... ⊗ |psi_{im}>` with probability
/// `p_{i1} ... p_{im}`. All A factors are regrouped into one party and all B
/// factors into the other, so the result has dims `(d_A^m, d_B^m)`.
pub fn string_ensemble(d: &PureDecomposition, m: usize) -> Result<Ensemble> {
    let (da, db) = match d.dims() {
        [a, b] => (*a, *b),
        other => {
            return Err(Error::DimensionMismatch(format!(
                "string ensembles need a bipartite decomposition, got {other:?}"
            )))
        }
    };
    if m == 0 {
        return Err(Error::InvalidArgument("copy number m must be at least 1".into()));
    }
    let k = d.len();
    let exp = |base: usize| base.checked_pow(m as u32);
    let (big_a, big_b, count) = match (exp(da), exp(db), exp(k)) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(Error::SizeCap(format!("{k}^{m} strings overflow"))),
    };
    let dim = big_a.checked_mul(big_b).filter(|&n| n <= MAX_DIM);
    let Some(dim) = dim else {
        return Err(Error::SizeCap(format!(
            "m = {m} copies of {da}x{db} exceed the {MAX_DIM} dimension cap"
        )));
    };
    if count.saturating_mul(dim * dim) > MAX_STRING_ENTRIES {
        return Err(Error::SizeCap(format!(
            "{count} members of dimension {dim} exceed the {MAX_STRING_ENTRIES}-entry budget"
        )));
    }

    // interleaved index (a1 b1 a2 b2 ...) -> grouped index (a1..am)(b1..bm)
    let regroup: Vec<usize> = (0..dim)
        .map(|mut idx| {
            let mut a_part = 0;
            let mut b_part = 0;
            let mut a_scale = 1;
            let mut b_scale = 1;
            for _ in 0..m {
                let b = idx % db;
                idx /= db;
                let a = idx % da;
                idx /= da;
                b_part += b * b_scale;
                a_part += a * a_scale;
                b_scale *= db;
                a_scale *= da;
            }
            a_part * big_b + b_part
        })
        .collect();

    let mut members = Vec::with_capacity(count);
    for s in 0..count {
        let mut digits = Vec::with_capacity(m);
        let mut rest = s;
        for _ in 0..m {
            digits.push(rest % k);
            rest /= k;
        }
        digits.reverse();
        let mut prob = 1.0;
        let mut ket = vec![Complex::new(1.0, 0.0)];
        for &i in &digits {
            let (p, psi) = &d.members()[i];
            prob *= p;
            ket = crate::densmat::kron_vec(&ket, psi.amplitudes());
        }
        let mut grouped = vec![Complex::new(0.0, 0.0); dim];
        for (src, &dst) in regroup.iter().enumerate() {
            grouped[dst] = ket[src];
        }
        let state = PureState::new(grouped).map_err(|e| Error::member(s, e))?;
        members.push(Member {
            prob,
            state: DensityMatrix::from_pure(&state, &[big_a, big_b])?,
        });
    }
    Ok(Ensemble {
        label: format!("{}^{m}", d.label()),
        dims: vec![big_a, big_b],
        members,
    })
}

/// Selection of the first two computational basis vectors of a `d_a`-dimensional A.
pub fn default_isometry(da: usize) -> Result<ComplexMatrix> {
    if da < 2 {
        return Err(Error::InvalidArgument(format!(
            "party A has dimension {da}; need at least 2"
        )));
    }
    Ok(ComplexMatrix::from_fn(2, da, |i, j| {
        Complex::new(if i == j { 1.0 } else { 0.0 }, 0.0)
    }))
}

/// Projects party A onto the 2-dimensional range of `isometry^dagger`:
/// members become `(V⊗I) rho_x (V⊗I)^dagger` renormalized, with probabilities
/// reweighted by the surviving trace mass. Members whose mass is below 1e-12
/// are dropped.
pub fn project_to_2xn(e: &Ensemble, isometry: &ComplexMatrix) -> Result<Ensemble> {
    let (da, db) = e.bipartite_dims()?;
    if isometry.rows() != 2 || isometry.cols() != da {
        return Err(Error::DimensionMismatch(format!(
            "isometry must be 2x{da}, got {}x{}",
            isometry.rows(),
            isometry.cols()
        )));
    }
    let dev = (isometry * &isometry.adjoint()).max_abs_diff(&ComplexMatrix::identity(2));
    if dev > 1e-9 {
        return Err(Error::NonIsometric { deviation: dev });
    }
    let w = isometry.kron(&ComplexMatrix::identity(db))?;
    let wd = w.adjoint();
    let mut kept = Vec::new();
    for m in e.members() {
        let projected = &(&w * m.state.matrix()) * &wd;
        let mass = projected.trace().re;
        if mass < 1e-12 || m.prob == 0.0 {
            continue;
        }
        kept.push((m.prob * mass, projected.scale(1.0 / mass).hermitian_part()));
    }
    let total: f64 = kept.iter().map(|(p, _)| p).sum();
    if kept.is_empty() || total <= 0.0 {
        return Err(Error::SupportMismatch("projection annihilates every member".into()));
    }
    let dims = vec![2, db];
    Ok(Ensemble {
        label: format!("{}->2", e.label()),
        members: kept
            .into_iter()
            .map(|(p, mat)| Member {
                prob: p / total,
                state: DensityMatrix::from_parts_unchecked(dims.clone(), mat),
            })
            .collect(),
        dims,
    })
}
