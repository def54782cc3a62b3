//! Ensemble JSON schema:
//!
//! ```json
//! {"label": "...", "dims": [2, 2],
//!  "members": [{"prob": 0.5, "matrix": [[[re, im], ...], ...]},
//!              {"prob": 0.5, "ket": [[re, im], ...]}]}
//! ```
//!
//! `ket` members expand to projectors. Numbers are written with 17
//! significant digits so a parse of the output is bit-exact.

use num_complex::Complex;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use super::{Ensemble, PureDecomposition};
use crate::densmat::{validate_density_matrix, ComplexMatrix, DensityMatrix, PureState};
use crate::error::{Error, Result};

/// Tolerance on the norm of `ket` entries read from files, which usually
/// carry truncated decimals. Accepted kets are renormalized.
const KET_NORM_TOL: f64 = 1e-6;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    #[serde(default)]
    label: String,
    dims: Vec<usize>,
    members: Vec<RawMember>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMember {
    prob: f64,
    #[serde(default)]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    ket: Option<Vec<[f64; 2]>>,
}

enum RawState {
    Matrix(Vec<Vec<[f64; 2]>>),
    Ket(Vec<[f64; 2]>),
}

fn read_raw(document: &str) -> Result<(String, Vec<usize>, Vec<(f64, RawState)>)> {
    let raw: RawEnsemble = serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    let members = raw
        .members
        .into_iter()
        .enumerate()
        .map(|(i, m)| match (m.matrix, m.ket) {
            (Some(mat), None) => Ok((m.prob, RawState::Matrix(mat))),
            (None, Some(k)) => Ok((m.prob, RawState::Ket(k))),
            _ => Err(Error::Schema(format!(
                "member {i} must have exactly one of \"matrix\" or \"ket\""
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    if members.is_empty() {
        return Err(Error::Schema("\"members\" is empty".into()));
    }
    Ok((raw.label, raw.dims, members))
}

fn to_ket(entries: &[[f64; 2]]) -> Result<PureState> {
    let v: Vec<Complex<f64>> = entries.iter().map(|[re, im]| Complex::new(*re, *im)).collect();
    if let Ok(k) = PureState::new(v.clone()) {
        return Ok(k);
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > KET_NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    PureState::normalized(v)
}

fn to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Schema("\"matrix\" must be square".into()));
    }
    ComplexMatrix::new(
        n,
        n,
        rows.iter().flatten().map(|[re, im]| Complex::new(*re, *im)).collect(),
    )
}

/// Parses and validates an ensemble document.
///
/// Malformed structure gives [`Error::Schema`]; semantic problems (invalid
/// states, probability sums) give [`Error::Validation`].
pub fn parse_ensemble(document: &str) -> Result<Ensemble> {
    let (label, dims, members) = read_raw(document)?;
    let states = members
        .into_iter()
        .enumerate()
        .map(|(i, (p, raw))| {
            let state = match raw {
                RawState::Matrix(rows) => to_matrix(&rows).and_then(|m| validate_density_matrix(m, &dims)),
                RawState::Ket(k) => to_ket(&k).and_then(|k| DensityMatrix::from_pure(&k, &dims)),
            };
            match state {
                Ok(s) => Ok((p, s)),
                Err(e @ Error::Schema(_)) => Err(e),
                Err(e) => Err(Error::member(i, e)),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(label, dims, states).map_err(Error::validation)
}

/// Parses a document whose members are all `ket`s.
pub fn parse_pure_decomposition(document: &str) -> Result<PureDecomposition> {
    let (label, dims, members) = read_raw(document)?;
    let kets = members
        .into_iter()
        .enumerate()
        .map(|(i, (p, raw))| match raw {
            RawState::Ket(k) => to_ket(&k).map(|k| (p, k)).map_err(|e| Error::member(i, e)),
            RawState::Matrix(_) => Err(Error::Schema(format!(
                "member {i}: a pure decomposition needs \"ket\" members"
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    PureDecomposition::new(label, dims, kets).map_err(Error::validation)
}

/// Float written with 17 significant digits.
struct Sig17(f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format_sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// `x` with 17 significant digits in JSON/CSV-compatible exponent form.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct OutEnsemble<'a> {
    label: &'a str,
    dims: &'a [usize],
    members: Vec<OutMember>,
}

#[derive(Serialize)]
struct OutMember {
    prob: Sig17,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<[Sig17; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ket: Option<Vec<[Sig17; 2]>>,
}

fn write(doc: &OutEnsemble<'_>) -> String {
    serde_json::to_string_pretty(doc).expect("ensemble serialization cannot fail")
}

/// Serializes with `matrix` members.
pub fn serialize_ensemble(e: &Ensemble) -> String {
    let members = e
        .members()
        .iter()
        .map(|m| {
            let mat = m.state.matrix();
            OutMember {
                prob: Sig17(m.prob),
                matrix: Some(
                    (0..mat.rows())
                        .map(|i| mat.row(i).iter().map(|z| [Sig17(z.re), Sig17(z.im)]).collect())
                        .collect(),
                ),
                ket: None,
            }
        })
        .collect();
    write(&OutEnsemble {
        label: e.label(),
        dims: e.dims(),
        members,
    })
}

/// Serializes weighted kets with `ket` members.
pub fn serialize_kets<'a>(label: &str, dims: &[usize], kets: impl IntoIterator<Item = (f64, &'a PureState)>) -> String {
    let members = kets
        .into_iter()
        .map(|(p, k)| OutMember {
            prob: Sig17(p),
            matrix: None,
            ket: Some(k.amplitudes().iter().map(|z| [Sig17(z.re), Sig17(z.im)]).collect()),
        })
        .collect();
    write(&OutEnsemble { label, dims, members })
}

impl PureDecomposition {
    pub fn to_json(&self) -> String {
        serialize_kets(self.label(), self.dims(), self.members().iter().map(|(p, k)| (*p, k)))
    }
}
