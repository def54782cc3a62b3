//! Ensembles `{p_x, rho_x}`: data model, marginals, averages, the built-in
//! ensembles, m-copy string ensembles and the qubit projection.

mod builtin;
mod io;
mod strings;

pub use builtin::{
    bell3_ensemble, bell4_ensemble, bell_diagonal, bell_state, e1_ensemble, e1_states, parse_angle, product8_ensemble,
    random_density_matrix, random_ensemble, resolve_builtin, resolve_builtin_decomposition, BellState,
};
pub use io::{format_sig17, parse_ensemble, parse_pure_decomposition, serialize_ensemble, serialize_kets};
pub use strings::{default_isometry, project_to_2xn, string_ensemble, MAX_STRING_ENTRIES};

use crate::densmat::{ComplexMatrix, DensityMatrix, PureState};
use crate::error::{Error, Result};

const PROB_SUM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Member {
    pub prob: f64,
    pub state: DensityMatrix,
}

/// Finite ensemble of density matrices sharing party dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    label: String,
    dims: Vec<usize>,
    members: Vec<Member>,
}

/// Validates probabilities and renormalizes them when the sum is off by more
/// than rounding noise.
fn checked_probabilities(probs: &mut [f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidArgument("ensemble has no members".into()));
    }
    for (index, &p) in probs.iter().enumerate() {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::member(index, Error::NegativeProbability { index, value: p }));
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::ProbabilitySum { sum });
    }
    if (sum - 1.0).abs() > 4.0 * f64::EPSILON * probs.len() as f64 {
        for p in probs.iter_mut() {
            *p /= sum;
        }
    }
    Ok(())
}

impl Ensemble {
    pub fn new(label: impl Into<String>, dims: Vec<usize>, members: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let mut probs: Vec<f64> = members.iter().map(|m| m.0).collect();
        checked_probabilities(&mut probs)?;
        for (index, (_, s)) in members.iter().enumerate() {
            if s.dims() != dims.as_slice() {
                return Err(Error::member(
                    index,
                    Error::DimensionMismatch(format!("member dims {:?}, ensemble dims {dims:?}", s.dims())),
                ));
            }
        }
        Ok(Self {
            label: label.into(),
            dims,
            members: members
                .into_iter()
                .zip(probs)
                .map(|((_, state), prob)| Member { prob, state })
                .collect(),
        })
    }

    /// Ensemble of pure states.
    pub fn from_kets(label: impl Into<String>, dims: Vec<usize>, kets: &[(f64, PureState)]) -> Result<Self> {
        let members = kets
            .iter()
            .enumerate()
            .map(|(i, (p, k))| Ok((*p, DensityMatrix::from_pure(k, &dims).map_err(|e| Error::member(i, e))?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, dims, members)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.prob).collect()
    }

    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.dims.as_slice() {
            [a, b] => Ok((*a, *b)),
            other => Err(Error::DimensionMismatch(format!(
                "expected a bipartite ensemble, got party dimensions {other:?}"
            ))),
        }
    }

    /// `rho = Σ_x p_x rho_x`.
    pub fn average_state(&self) -> DensityMatrix {
        let n = self.dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for m in &self.members {
            acc = &acc + &m.state.matrix().scale(m.prob);
        }
        DensityMatrix::from_parts_unchecked(self.dims.clone(), acc.hermitian_part())
    }

    /// Member-wise reduced states of `party`, same probabilities.
    pub fn marginal_ensemble(&self, party: usize) -> Result<Ensemble> {
        let members = self
            .members
            .iter()
            .map(|m| {
                Ok(Member {
                    prob: m.prob,
                    state: m.state.partial_trace(party)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble {
            label: format!("{}|party{party}", self.label),
            dims: vec![self.dims[party]],
            members,
        })
    }

    /// Exchanges parties A and B in every member.
    pub fn swap_parties(&self) -> Result<Ensemble> {
        let (da, db) = self.bipartite_dims()?;
        let members = self
            .members
            .iter()
            .map(|m| {
                Ok(Member {
                    prob: m.prob,
                    state: m.state.swap_parties()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble {
            label: self.label.clone(),
            dims: vec![db, da],
            members,
        })
    }

    /// Applies the same unitary on the full space to every member.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Ensemble> {
        let members = self
            .members
            .iter()
            .map(|m| {
                Ok(Member {
                    prob: m.prob,
                    state: m.state.conjugate_by(u)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble {
            label: self.label.clone(),
            dims: self.dims.clone(),
            members,
        })
    }

    /// Reorders members by `order` (a permutation of `0..len`).
    pub fn permuted(&self, order: &[usize]) -> Ensemble {
        Ensemble {
            label: self.label.clone(),
            dims: self.dims.clone(),
            members: order.iter().map(|&i| self.members[i].clone()).collect(),
        }
    }
}

/// Decomposition `rho = Σ_i p_i |psi_i><psi_i|`; the kets need not be orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct PureDecomposition {
    label: String,
    dims: Vec<usize>,
    members: Vec<(f64, PureState)>,
}

impl PureDecomposition {
    pub fn new(label: impl Into<String>, dims: Vec<usize>, members: Vec<(f64, PureState)>) -> Result<Self> {
        let mut probs: Vec<f64> = members.iter().map(|m| m.0).collect();
        checked_probabilities(&mut probs)?;
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!("invalid party dimensions {dims:?}")));
        }
        for (index, (_, k)) in members.iter().enumerate() {
            if k.dim() != total {
                return Err(Error::member(
                    index,
                    Error::DimensionMismatch(format!("ket dimension {}, expected {total}", k.dim())),
                ));
            }
        }
        Ok(Self {
            label: label.into(),
            dims,
            members: members.into_iter().zip(probs).map(|((_, k), p)| (p, k)).collect(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn to_ensemble(&self) -> Result<Ensemble> {
        Ensemble::from_kets(self.label.clone(), self.dims.clone(), &self.members)
    }

    pub fn average_state(&self) -> Result<DensityMatrix> {
        Ok(self.to_ensemble()?.average_state())
    }
}
