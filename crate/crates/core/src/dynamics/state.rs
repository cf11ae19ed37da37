use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{Matrix, MatrixPoly};
use crate::error::{Error, Result};

/// Entries that must vanish for the parabolic shape are checked against
/// this absolute tolerance, scaled by the largest entry of the state.
pub const SHAPE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowForm {
    /// `(φ0, φ1, φ2)` with the symmetric choice of gauge constant.
    Symmetric,
    /// `(φ0, φ1, φ2)` with vanishing gauge constant; `φ2` is frozen.
    Asymmetric,
    /// `(φ0, φ1, φ2, φ3)` for bundles of intermediate degree.
    Parabolic,
    /// The Nahm triple `(T1, T2, T3)`.
    #[serde(rename = "t", alias = "t_form")]
    TForm,
}

impl FlowForm {
    pub fn coefficient_count(self) -> usize {
        match self {
            FlowForm::Parabolic => 4,
            _ => 3,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            FlowForm::Symmetric => "symmetric",
            FlowForm::Asymmetric => "asymmetric",
            FlowForm::Parabolic => "parabolic",
            FlowForm::TForm => "t",
        }
    }
}

impl fmt::Display for FlowForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FlowForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(FlowForm::Symmetric),
            "asymmetric" => Ok(FlowForm::Asymmetric),
            "parabolic" => Ok(FlowForm::Parabolic),
            "t" | "t_form" => Ok(FlowForm::TForm),
            other => Err(Error::Input(format!(
                "unknown form '{other}' (expected symmetric, asymmetric, parabolic or t)"
            ))),
        }
    }
}

/// A time-stamped coefficient tuple of one of the flow forms.
#[derive(Clone, Debug, PartialEq)]
pub struct NahmState {
    t: f64,
    form: FlowForm,
    coeffs: Vec<Matrix>,
    block_split: Option<usize>,
}

impl NahmState {
    pub fn new(
        t: f64,
        form: FlowForm,
        coeffs: Vec<Matrix>,
        block_split: Option<usize>,
    ) -> Result<Self> {
        let state = Self {
            t,
            form,
            coeffs,
            block_split,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn symmetric(phi: [Matrix; 3]) -> Result<Self> {
        Self::new(0.0, FlowForm::Symmetric, phi.into(), None)
    }

    pub fn asymmetric(phi: [Matrix; 3]) -> Result<Self> {
        Self::new(0.0, FlowForm::Asymmetric, phi.into(), None)
    }

    pub fn t_form(t: [Matrix; 3]) -> Result<Self> {
        Self::new(0.0, FlowForm::TForm, t.into(), None)
    }

    pub fn parabolic(phi: [Matrix; 4], block_split: usize) -> Result<Self> {
        Self::new(0.0, FlowForm::Parabolic, phi.into(), Some(block_split))
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn form(&self) -> FlowForm {
        self.form
    }

    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn block_split(&self) -> Option<usize> {
        self.block_split
    }

    pub fn n(&self) -> usize {
        self.coeffs[0].n()
    }

    pub(crate) fn with_coeffs(&self, t: f64, coeffs: Vec<Matrix>) -> Self {
        Self {
            t,
            form: self.form,
            coeffs,
            block_split: self.block_split,
        }
    }

    /// Largest entry modulus over all coefficient matrices.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(Matrix::max_norm).fold(0.0, f64::max)
    }

    /// The Higgs field `φ(z)` carried by this state; T-form states are
    /// translated through [`super::to_phi`].
    pub fn higgs_field(&self) -> MatrixPoly {
        let coeffs = match self.form {
            FlowForm::TForm => {
                let (p0, p1, p2) = super::to_phi(&self.coeffs[0], &self.coeffs[1], &self.coeffs[2])
                    .expect("validated state has equal dimensions");
                vec![p0, p1, p2]
            }
            _ => self.coeffs.clone(),
        };
        MatrixPoly::new(coeffs).expect("validated state is nonempty")
    }

    fn validate(&self) -> Result<()> {
        let expected = self.form.coefficient_count();
        if self.coeffs.len() != expected {
            return Err(Error::ShapeViolation(format!(
                "{} form needs {expected} coefficient matrices, found {}",
                self.form,
                self.coeffs.len()
            )));
        }
        let n = self.coeffs[0].n();
        if let Some(bad) = self.coeffs.iter().find(|m| m.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.n(),
            });
        }
        if !self.t.is_finite() || !self.coeffs.iter().all(Matrix::is_finite) {
            return Err(Error::NonFinite("flow state"));
        }
        if self.form == FlowForm::Parabolic {
            self.check_parabolic_shape()?;
        } else if self.block_split.is_some() {
            return Err(Error::ShapeViolation(format!(
                "block split is only meaningful for the parabolic form, not {}",
                self.form
            )));
        }
        Ok(())
    }

    /// Largest entry of `φ2` below the parabolic pattern and of `φ3` outside
    /// the nilradical pattern.
    pub fn parabolic_defect(&self) -> Option<f64> {
        let k = self.block_split?;
        let n = self.n();
        let phi2 = self.coeffs.get(2)?;
        let phi3 = self.coeffs.get(3)?;
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let lower_left = i >= k && j < k;
                let upper_right = i < k && j >= k;
                if lower_left {
                    defect = defect.max(phi2[(i, j)].norm());
                }
                if !upper_right {
                    defect = defect.max(phi3[(i, j)].norm());
                }
            }
        }
        Some(defect)
    }

    fn check_parabolic_shape(&self) -> Result<()> {
        let n = self.n();
        let k = self
            .block_split
            .ok_or_else(|| Error::ShapeViolation("parabolic form needs a block split k".into()))?;
        if k == 0 || k >= n {
            return Err(Error::ShapeViolation(format!(
                "block split k = {k} must satisfy 0 < k < n = {n}"
            )));
        }
        let defect = self.parabolic_defect().unwrap_or(0.0);
        let scale = self.max_norm().max(1.0);
        if defect > SHAPE_TOL * scale {
            return Err(Error::ShapeViolation(format!(
                "phi2 must be block upper triangular and phi3 block strictly upper triangular for split ({k}, {}); defect {defect:e}",
                n - k
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e() -> Matrix {
        Matrix::from_real(2, &[0.0, 1.0, 0.0, 0.0])
    }

    #[test]
    fn coefficient_count_is_checked() {
        let r = NahmState::new(0.0, FlowForm::Parabolic, vec![Matrix::zeros(2); 3], Some(1));
        assert!(matches!(r, Err(Error::ShapeViolation(_))));
    }

    #[test]
    fn parabolic_shape() {
        let ok = NahmState::parabolic([Matrix::identity(2), Matrix::identity(2), e(), e()], 1);
        assert!(ok.is_ok());
        let f = Matrix::from_real(2, &[0.0, 0.0, 1.0, 0.0]);
        let bad_phi3 = NahmState::parabolic(
            [Matrix::zeros(2), Matrix::zeros(2), e(), Matrix::identity(2)],
            1,
        );
        assert!(bad_phi3.is_err());
        let bad_phi2 = NahmState::parabolic([Matrix::zeros(2), Matrix::zeros(2), f, e()], 1);
        assert!(bad_phi2.is_err());
        let bad_split = NahmState::parabolic([Matrix::zeros(2), Matrix::zeros(2), e(), e()], 2);
        assert!(bad_split.is_err());
    }

    #[test]
    fn form_tags_round_trip() {
        for form in [
            FlowForm::Symmetric,
            FlowForm::Asymmetric,
            FlowForm::Parabolic,
            FlowForm::TForm,
        ] {
            assert_eq!(form.tag().parse::<FlowForm>().unwrap(), form);
        }
        assert!("euler".parse::<FlowForm>().is_err());
    }
}
