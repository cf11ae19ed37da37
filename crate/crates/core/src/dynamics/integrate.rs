use crate::algebra::Matrix;
use crate::error::{Error, Result};

use super::{vector_field, FlowForm, NahmState};

/// Entries above this modulus abort the integration.
pub const BLOW_UP_GUARD: f64 = 1e12;

/// Samples of an integrated flow, one per step plus the initial state.
#[derive(Clone, Debug)]
pub struct Trajectory {
    samples: Vec<NahmState>,
    step: f64,
    error_estimate: f64,
}

impl Trajectory {
    /// Wraps externally produced samples (for instance read back from a
    /// CSV table). Times must increase strictly; form and dimension must
    /// agree throughout.
    pub fn from_samples(samples: Vec<NahmState>, step: f64) -> Result<Self> {
        let first = samples.first().ok_or(Error::EmptyTrajectory)?;
        let (form, n) = (first.form(), first.n());
        for w in samples.windows(2) {
            if !(w[1].t() > w[0].t()) {
                return Err(Error::Input(format!(
                    "sample times must increase strictly ({} then {})",
                    w[0].t(),
                    w[1].t()
                )));
            }
        }
        if let Some(bad) = samples.iter().find(|s| s.form() != form) {
            return Err(Error::WrongForm {
                expected: form,
                found: bad.form(),
            });
        }
        if let Some(bad) = samples.iter().find(|s| s.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.n(),
            });
        }
        Ok(Self {
            samples,
            step,
            error_estimate: f64::NAN,
        })
    }

    pub fn samples(&self) -> &[NahmState] {
        &self.samples
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Endpoint difference against a run at half the step, scaled by the
    /// Richardson factor 16/15. `NaN` when the trajectory was not integrated
    /// here.
    pub fn error_estimate(&self) -> f64 {
        self.error_estimate
    }

    pub fn form(&self) -> FlowForm {
        self.samples[0].form()
    }

    pub fn first(&self) -> &NahmState {
        &self.samples[0]
    }

    pub fn last(&self) -> &NahmState {
        self.samples.last().expect("trajectory is nonempty")
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn axpy(base: &[Matrix], k: &[Matrix], h: f64) -> Vec<Matrix> {
    base.iter()
        .zip(k)
        .map(|(b, k)| b + &k.scale_re(h))
        .collect()
}

fn rk4_step(form: FlowForm, y: &[Matrix], h: f64) -> Vec<Matrix> {
    let k1 = vector_field(form, y);
    let k2 = vector_field(form, &axpy(y, &k1, h / 2.0));
    let k3 = vector_field(form, &axpy(y, &k2, h / 2.0));
    let k4 = vector_field(form, &axpy(y, &k3, h));
    y.iter()
        .enumerate()
        .map(|(i, yi)| {
            let incr = &(&(&k1[i] + &k2[i].scale_re(2.0)) + &k3[i].scale_re(2.0)) + &k4[i];
            yi + &incr.scale_re(h / 6.0)
        })
        .collect()
}

fn blown_up(y: &[Matrix]) -> bool {
    y.iter()
        .any(|m| m.entries().iter().any(|z| !(z.norm() <= BLOW_UP_GUARD)))
}

/// Step times from `t0` towards `t1` with nominal step `dt > 0`; the last
/// step is shortened to land on `t1` exactly.
fn step_times(t0: f64, t1: f64, dt: f64) -> Vec<f64> {
    let span = t1 - t0;
    let full = (span.abs() / dt).floor() as usize;
    let dir = span.signum();
    let mut times: Vec<f64> = (1..=full).map(|k| t0 + dir * dt * k as f64).collect();
    // A remainder below a few ulps of the span is rounding, not a step.
    let slack = 64.0 * f64::EPSILON * span.abs().max(1.0);
    match times.last_mut() {
        Some(last) if (t1 - *last).abs() <= slack => *last = t1,
        _ => times.push(t1),
    }
    times
}

fn march(s0: &NahmState, t1: f64, dt: f64, mut keep: impl FnMut(NahmState)) -> Result<NahmState> {
    let form = s0.form();
    let mut y = s0.coeffs().to_vec();
    let mut t = s0.t();
    let mut last = s0.clone();
    for tn in step_times(t, t1, dt) {
        let next = rk4_step(form, &y, tn - t);
        if blown_up(&next) {
            return Err(Error::BlowUp {
                t: tn,
                last: Box::new(last),
            });
        }
        y = next;
        t = tn;
        last = s0.with_coeffs(t, y.clone());
        keep(last.clone());
    }
    Ok(last)
}

fn check_step(t0: f64, t_end: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidStep(format!(
            "dt must be positive and finite, got {dt}"
        )));
    }
    if !t_end.is_finite() {
        return Err(Error::InvalidStep(format!(
            "end time must be finite, got {t_end}"
        )));
    }
    if t_end == t0 {
        return Err(Error::InvalidStep(format!(
            "end time {t_end} equals start time"
        )));
    }
    Ok(())
}

/// Classical RK4 from `s0.t()` to `t_end > s0.t()` with fixed step `dt`.
///
/// A second run at `dt/2` supplies the trajectory's error estimate. When an
/// entry leaves the finite range or exceeds [`BLOW_UP_GUARD`] the run stops
/// with [`Error::BlowUp`] carrying the last accepted state.
pub fn integrate(s0: &NahmState, t_end: f64, dt: f64) -> Result<Trajectory> {
    check_step(s0.t(), t_end, dt)?;
    if t_end < s0.t() {
        return Err(Error::InvalidStep(format!(
            "end time {t_end} precedes start time {}; use flow_to for backward runs",
            s0.t()
        )));
    }
    let mut samples = vec![s0.clone()];
    let end = march(s0, t_end, dt, |s| samples.push(s))?;
    let error_estimate = match march(s0, t_end, dt / 2.0, |_| ()) {
        Ok(fine) => {
            end.coeffs()
                .iter()
                .zip(fine.coeffs())
                .map(|(a, b)| (a - b).max_norm())
                .fold(0.0, f64::max)
                * 16.0
                / 15.0
        }
        Err(_) => f64::INFINITY,
    };
    Ok(Trajectory {
        samples,
        step: dt,
        error_estimate,
    })
}

/// Final state of the flow at `t_target`, in either time direction.
pub fn flow_to(s0: &NahmState, t_target: f64, dt: f64) -> Result<NahmState> {
    if t_target == s0.t() {
        return Ok(s0.clone());
    }
    check_step(s0.t(), t_target, dt)?;
    march(s0, t_target, dt, |_| ())
}
