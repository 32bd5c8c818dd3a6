use log::warn;

use crate::error::{Error, Result};
use crate::fock::{hermitian_part, FockDensityMatrix, TruncatedSpace};
use crate::liouville::SystemParams;
use crate::C64;

use super::generator::{from_row_major, to_row_major, LindbladGenerator};
use super::integrator::{Dopri5, IntegratorControls, OdeSystem};

/// Trace drift that triggers a warning.
pub const TRACE_WARN_TOL: f64 = 1e-7;
/// Trace drift that aborts the run.
pub const TRACE_FAIL_TOL: f64 = 1e-6;
/// Most negative eigenvalue tolerated silently.
pub const POSITIVITY_WARN_TOL: f64 = 1e-7;

/// One recorded point of a master-equation trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySample {
    /// Seconds.
    pub time: f64,
    pub state: FockDensityMatrix,
}

impl OdeSystem for LindbladGenerator {
    fn len(&self) -> usize {
        self.space().dim() * self.space().dim()
    }

    fn derivative(&self, _t: f64, y: &[C64], dy: &mut [C64]) {
        self.apply(y, dy);
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    let mut problems = Vec::new();
    if times.is_empty() {
        problems.push("time list is empty".to_string());
    }
    if let Some(t0) = times.first() {
        if !(*t0 >= 0.0) {
            problems.push(format!("times must be non-negative (first is {t0})"));
        }
    }
    if times.iter().any(|t| !t.is_finite()) {
        problems.push("times must be finite".to_string());
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        problems.push("times must be strictly increasing".to_string());
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParams(problems))
    }
}

/// Integrate the full master equation from `rho0` at t = 0 and sample it
/// at each of `times` (seconds).
///
/// Each sample is re-Hermitized but never renormalized; trace drift above
/// [`TRACE_FAIL_TOL`] or an eigenvalue below ten times
/// [`POSITIVITY_WARN_TOL`] aborts with an integration failure.
pub fn evolve(
    rho0: &FockDensityMatrix,
    params: &SystemParams,
    times: &[f64],
    controls: &IntegratorControls,
) -> Result<Vec<TrajectorySample>> {
    params.validate()?;
    let generator = LindbladGenerator::for_params(params, rho0.space());
    evolve_with(&generator, rho0, times, controls)
}

/// [`evolve`] with an explicit generator.
pub fn evolve_with(
    generator: &LindbladGenerator,
    rho0: &FockDensityMatrix,
    times: &[f64],
    controls: &IntegratorControls,
) -> Result<Vec<TrajectorySample>> {
    check_times(times)?;
    let violations = controls.violations();
    if !violations.is_empty() {
        return Err(Error::InvalidParams(violations));
    }
    let space = generator.space();
    if rho0.space() != space {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: rho0.space().dim() });
    }
    let mut y = to_row_major(rho0.matrix());
    let mut stepper = Dopri5::new(generator, *controls);
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t_out in times {
        stepper.advance(&mut t, &mut y, t_out)?;
        out.push(TrajectorySample { time: t_out, state: checked_sample(&y, space, t_out)? });
    }
    let stats = stepper.stats();
    log::debug!(
        "evolve: {} accepted, {} rejected steps, {} evaluations",
        stats.accepted,
        stats.rejected,
        stats.evaluations
    );
    Ok(out)
}

pub(crate) fn checked_sample(y: &[C64], space: TruncatedSpace, time: f64) -> Result<FockDensityMatrix> {
    let m = hermitian_part(&from_row_major(y, space.dim()));
    let state = FockDensityMatrix::new_unchecked(space, m);
    let drift = (state.trace() - 1.0).abs();
    if drift > TRACE_FAIL_TOL {
        return Err(Error::IntegrationFailure {
            time,
            reason: format!("trace drifted by {drift:e}"),
        });
    }
    if drift > TRACE_WARN_TOL {
        warn!("trace drift {drift:e} at t = {time:e} s");
    }
    let min = state.min_eigenvalue();
    if min < -10.0 * POSITIVITY_WARN_TOL {
        return Err(Error::IntegrationFailure {
            time,
            reason: format!("negative eigenvalue {min:e}"),
        });
    }
    if min < -POSITIVITY_WARN_TOL {
        warn!("eigenvalue {min:e} at t = {time:e} s");
    }
    Ok(state)
}
