use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{Complex, Matrix};
use crate::dynamics::{FlowForm, NahmState};
use crate::error::{Error, Result};

/// Complex numbers travel as `[re, im]`.
pub type Pair = [f64; 2];

/// Parameters of the rank-2 fixed-point family.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyMeta {
    pub a: Pair,
    pub phi1: Vec<Pair>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    /// Extension degree for the divisor degree check.
    #[serde(default)]
    pub d: Option<i64>,
    #[serde(default)]
    pub family: Option<FamilyMeta>,
    #[serde(default)]
    pub description: Option<String>,
}

/// The JSON input schema.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub n: usize,
    pub form: FlowForm,
    #[serde(default)]
    pub block_split: Option<usize>,
    /// Coefficient matrices, each a row-major list of `n²` pairs.
    pub coeffs: Vec<Vec<Pair>>,
    #[serde(default)]
    pub t0: f64,
    #[serde(default)]
    pub metadata: Metadata,
}

pub fn complex(p: Pair) -> Complex {
    Complex::new(p[0], p[1])
}

pub fn pair(z: Complex) -> Pair {
    [z.re, z.im]
}

pub fn matrix_from_pairs(n: usize, entries: &[Pair], field: &str) -> Result<Matrix> {
    if entries.len() != n * n {
        return Err(Error::Input(format!(
            "{field}: expected n² = {} entries, found {}",
            n * n,
            entries.len()
        )));
    }
    if entries.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Input(format!("{field}: non-finite entry")));
    }
    Matrix::from_entries(n, entries.iter().map(|&p| complex(p)).collect())
}

pub fn matrix_to_pairs(m: &Matrix) -> Vec<Pair> {
    m.entries().iter().map(|&z| pair(z)).collect()
}

impl InputDocument {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| match origin {
            "" => Error::Input(e.to_string()),
            o => Error::Input(format!("{o}: {e}")),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        // The caller labels messages with the path.
        Self::parse(&text, "")
    }

    pub fn from_state(s: &NahmState) -> Self {
        InputDocument {
            n: s.n(),
            form: s.form(),
            block_split: s.block_split(),
            coeffs: s.coeffs().iter().map(matrix_to_pairs).collect(),
            t0: s.t(),
            metadata: Metadata::default(),
        }
    }

    /// Validates the document and builds the state.
    pub fn state(&self) -> Result<NahmState> {
        if self.n == 0 || self.n > crate::algebra::MAX_DIM {
            return Err(Error::Input(format!("n: {} is outside 1..=16", self.n)));
        }
        let want = self.form.coefficient_count();
        if self.coeffs.len() != want {
            return Err(Error::Input(format!(
                "coeffs: form {} needs {want} matrices, found {}",
                self.form,
                self.coeffs.len()
            )));
        }
        if !self.t0.is_finite() {
            return Err(Error::Input("t0: must be finite".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, m)| matrix_from_pairs(self.n, m, &format!("coeffs[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        NahmState::new(self.t0, self.form, coeffs, self.block_split)
            .map_err(|e| Error::Input(format!("{e}")))
    }

    pub fn family(&self) -> Result<Option<(Complex, Matrix)>> {
        match &self.metadata.family {
            None => Ok(None),
            Some(f) => Ok(Some((
                complex(f.a),
                matrix_from_pairs(2, &f.phi1, "metadata.family.phi1")?,
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn messages_name_the_field() {
        let doc = r#"{"n": 2, "form": "symmetric", "coeffs": [[[0,0],[1,0],[0,0],[0,0]], [], [[0,0],[0,0],[0,0],[0,0]]]}"#;
        let err = InputDocument::parse(doc, "x").unwrap().state().unwrap_err();
        assert!(format!("{err}").contains("coeffs[1]"), "{err}");
        let bad = r#"{"n": 2, "form": "sideways", "coeffs": []}"#;
        let err = InputDocument::parse(bad, "x.json").unwrap_err();
        assert!(format!("{err}").contains("line 1"), "{err}");
    }

    #[test]
    fn round_trips_a_state() {
        let e = Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        let s = NahmState::symmetric([e.clone(), Matrix::zeros(2), e]).unwrap();
        let doc = InputDocument::from_state(&s);
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(
            InputDocument::parse(&text, "x").unwrap().state().unwrap(),
            s
        );
    }
}
