use thiserror::Error;

use crate::dynamics::{FlowForm, NahmState};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported matrix dimension {0} (supported: 1..=16)")]
    UnsupportedDimension(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid tolerance {0}: must be positive and finite")]
    InvalidTolerance(f64),

    #[error("the zero polynomial has no well-defined roots")]
    ZeroPolynomial,

    #[error("wrong flow form: expected {expected:?}, found {found:?}")]
    WrongForm { expected: FlowForm, found: FlowForm },

    #[error("shape violation: {0}")]
    ShapeViolation(String),

    #[error("degree bound violated: a_{k} has |coefficient of z^{power}| = {magnitude:e} above degree {bound}")]
    DegreeBound {
        k: usize,
        power: usize,
        bound: usize,
        magnitude: f64,
    },

    #[error("invalid integration request: {0}")]
    InvalidStep(String),

    #[error("blow-up at t = {t}: an entry exceeded the magnitude guard")]
    BlowUp { t: f64, last: Box<NahmState> },

    #[error("Higgs field is not traceless (|a_1| = {0:e})")]
    NotTraceless(f64),

    #[error("non-reduced spectral curve: q vanishes identically (nilpotent case)")]
    NilpotentCase,

    #[error("c(z) vanishes identically: the subbundle O is invariant (unstable input)")]
    UnstableInput,

    #[error("chart breakdown at t = {t}: the zero of c(z) left the finite chart (|c1| = {c1:e})")]
    ChartBreakdown { t: f64, c1: f64 },

    #[error("rank {0} is odd; a ribbon needs even rank")]
    OddRank(usize),

    #[error("characteristic polynomial is not a perfect square (residual {0:e})")]
    NotPerfectSquare(f64),

    #[error("phi_+ and phi_- do not commute at z (defect {0:e})")]
    NonCommuting(f64),

    #[error("grid of {0} samples is too coarse (minimum 8)")]
    GridTooSmall(usize),

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
