//! JSON form of a function spec: `{"d": 3, "V1": [[..]], "V2": .., "V3": ..}`
//! for three transmitters, or `{"d": 3, "V": [[[..]], ..]}` for any number.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::standard_form::{FunctionSpec, SpecError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("spec needs either V1, V2, V3 or V")]
    MissingMatrices,
    #[error("spec gives both V1..V3 and V")]
    Ambiguous,
    #[error("K = {declared} but {found} matrices given")]
    CountMismatch { declared: usize, found: usize },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub d: u32,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "V1", default, skip_serializing_if = "Option::is_none")]
    pub v1: Option<Vec<Vec<i64>>>,
    #[serde(rename = "V2", default, skip_serializing_if = "Option::is_none")]
    pub v2: Option<Vec<Vec<i64>>>,
    #[serde(rename = "V3", default, skip_serializing_if = "Option::is_none")]
    pub v3: Option<Vec<Vec<i64>>>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Vec<Vec<i64>>>>,
}

impl SpecDocument {
    /// The per-transmitter integer matrices, row-major.
    pub fn matrices(&self) -> Result<Vec<Vec<Vec<i64>>>, DocumentError> {
        let three = [&self.v1, &self.v2, &self.v3];
        let mats = match (&self.v, three.iter().any(|m| m.is_some())) {
            (Some(_), true) => return Err(DocumentError::Ambiguous),
            (Some(v), false) => v.clone(),
            (None, true) => three
                .iter()
                .map(|m| (*m).clone().ok_or(DocumentError::MissingMatrices))
                .collect::<Result<_, _>>()?,
            (None, false) => return Err(DocumentError::MissingMatrices),
        };
        if let Some(k) = self.k {
            if k != mats.len() {
                return Err(DocumentError::CountMismatch {
                    declared: k,
                    found: mats.len(),
                });
            }
        }
        Ok(mats)
    }

    pub fn to_spec(&self) -> Result<FunctionSpec, DocumentError> {
        Ok(FunctionSpec::from_integers(self.d, &self.matrices()?)?)
    }

    /// Three-transmitter specs use the `V1..V3` keys, others the `V` list.
    pub fn from_spec(spec: &FunctionSpec) -> Self {
        let mats: Vec<Vec<Vec<i64>>> = spec
            .matrices()
            .iter()
            .map(|m| {
                m.to_rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(i64::from).collect())
                    .collect()
            })
            .collect();
        if mats.len() == 3 {
            SpecDocument {
                d: spec.d(),
                k: None,
                v1: Some(mats[0].clone()),
                v2: Some(mats[1].clone()),
                v3: Some(mats[2].clone()),
                v: None,
            }
        } else {
            SpecDocument {
                d: spec.d(),
                k: Some(mats.len()),
                v1: None,
                v2: None,
                v3: None,
                v: Some(mats),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn round_trips() {
        for spec in [samples::coupled_pair(), samples::identity_star(4)] {
            let doc = SpecDocument::from_spec(&spec);
            let text = serde_json::to_string(&doc).unwrap();
            let back: SpecDocument = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_spec().unwrap(), spec);
        }
    }

    #[test]
    fn entries_reduce_mod_d() {
        let doc: SpecDocument =
            serde_json::from_str(r#"{"d": 3, "V1": [[4]], "V2": [[-1]], "V3": [[1]]}"#).unwrap();
        let spec = doc.to_spec().unwrap();
        assert_eq!(spec.matrix(0).get(0, 0), 1);
        assert_eq!(spec.matrix(1).get(0, 0), 2);
    }

    #[test]
    fn malformed_documents() {
        let doc: SpecDocument = serde_json::from_str(r#"{"d": 3, "V1": [[1]]}"#).unwrap();
        assert_eq!(doc.to_spec(), Err(DocumentError::MissingMatrices));
        let doc: SpecDocument = serde_json::from_str(r#"{"d": 3, "K": 2, "V": [[[1]]]}"#).unwrap();
        assert!(matches!(
            doc.to_spec(),
            Err(DocumentError::CountMismatch { .. })
        ));
        let doc: SpecDocument = serde_json::from_str(r#"{"d": 4, "V": [[[1]], [[1]]]}"#).unwrap();
        assert!(matches!(doc.to_spec(), Err(DocumentError::Spec(_))));
    }
}
