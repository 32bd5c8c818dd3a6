use log::warn;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{coherent_state, hermitian_part, FockDensityMatrix, TruncatedSpace};
use crate::liouville::{CatBasisParams, SystemParams};
use crate::C64;

use super::generator::{from_row_major, to_row_major, LindbladGenerator};
use super::integrator::{Dopri5, IntegratorControls};
use super::propagator::{sector_matrix, sector_positions};

/// Largest κ/K accepted by [`steady_state`].
pub const MAX_KAPPA_OVER_KERR: f64 = 0.1;

/// Convergence target on max|L(ρ)|, in units of κ.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// How the steady state is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SteadyStateMethod {
    /// Solve L(ρ) = 0 with Tr ρ = 1 on the parity-even block.
    #[default]
    Direct,
    /// Integrate from the parity-symmetric mixture of |±α⟩ until the
    /// residual falls below [`RESIDUAL_TOL`]·κ.
    Integrate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyState {
    pub state: FockDensityMatrix,
    /// max|L(ρ)| in rad/s.
    pub residual: f64,
    pub method: SteadyStateMethod,
}

/// Reject loss rates outside the κ ≪ K regime the effective model assumes.
pub fn check_regime(params: &SystemParams) -> Result<()> {
    if params.kappa > MAX_KAPPA_OVER_KERR * params.kerr {
        let msg = format!(
            "kappa/kerr = {:.3e} exceeds {MAX_KAPPA_OVER_KERR}; the cat-subspace picture does not apply",
            params.kappa / params.kerr
        );
        warn!("{msg}");
        return Err(Error::Regime(msg));
    }
    Ok(())
}

pub fn steady_state(
    params: &SystemParams,
    space: TruncatedSpace,
    controls: &IntegratorControls,
) -> Result<SteadyState> {
    steady_state_with(params, space, controls, SteadyStateMethod::Direct)
}

pub fn steady_state_with(
    params: &SystemParams,
    space: TruncatedSpace,
    controls: &IntegratorControls,
    method: SteadyStateMethod,
) -> Result<SteadyState> {
    params.validate()?;
    if !(params.kappa > 0.0) {
        return Err(Error::InvalidParams(vec!["steady state requires kappa > 0".into()]));
    }
    check_regime(params)?;
    let generator = LindbladGenerator::for_params(params, space);
    let tol = RESIDUAL_TOL * params.kappa;
    let (flat, residual) = match method {
        SteadyStateMethod::Direct => {
            let flat = direct_solve(&generator)?;
            let residual = residual(&generator, &flat);
            if residual > tol {
                return Err(Error::Convergence { time: 0.0, residual });
            }
            (flat, residual)
        }
        SteadyStateMethod::Integrate => integrate(&generator, params, controls, tol)?,
    };
    let matrix = hermitian_part(&from_row_major(&flat, space.dim()));
    let state = FockDensityMatrix::new(space, matrix)
        .map_err(|e| Error::NumericFailure(format!("steady state is not a density matrix: {e}")))?;
    Ok(SteadyState { state, residual, method })
}

fn residual(generator: &LindbladGenerator, flat: &[C64]) -> f64 {
    let mut out = vec![C64::new(0.0, 0.0); flat.len()];
    generator.apply(flat, &mut out);
    out.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The steady state lives in the block where i + j is even (it contains
/// the trace); one balance equation is traded for Tr ρ = 1.
fn direct_solve(generator: &LindbladGenerator) -> Result<Vec<C64>> {
    let dim = generator.space().dim();
    let positions = sector_positions(dim, 0);
    let mut a = sector_matrix(generator, &positions);
    let trace_row = positions.iter().position(|&p| p == 0).expect("ρ[0,0] is parity even");
    for (col, &p) in positions.iter().enumerate() {
        let diagonal = p / dim == p % dim;
        a[(trace_row, col)] = C64::new(if diagonal { 1.0 } else { 0.0 }, 0.0);
    }
    let mut b = DVector::zeros(positions.len());
    b[trace_row] = C64::new(1.0, 0.0);
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::NumericFailure("steady-state system is singular".into()))?;
    let mut flat = vec![C64::new(0.0, 0.0); dim * dim];
    for (&p, z) in positions.iter().zip(x.iter()) {
        flat[p] = *z;
    }
    Ok(flat)
}

fn integrate(
    generator: &LindbladGenerator,
    params: &SystemParams,
    controls: &IntegratorControls,
    tol: f64,
) -> Result<(Vec<C64>, f64)> {
    let space = generator.space();
    let cat = CatBasisParams::new(params);
    let plus = coherent_state(C64::new(cat.alpha, 0.0), space)?;
    let minus = coherent_state(C64::new(-cat.alpha, 0.0), space)?;
    let start = (&plus * plus.adjoint() + &minus * minus.adjoint()) * C64::new(0.5, 0.0);
    let mut y = to_row_major(&start);
    // check the residual once per population relaxation time
    let chunk = 1.0 / (params.kappa * cat.alpha * cat.alpha * cat.p2_plus);
    let mut stepper = Dopri5::new(generator, *controls);
    let mut t = 0.0;
    loop {
        let r = residual(generator, &y);
        if r <= tol {
            return Ok((y, r));
        }
        if t >= controls.max_time {
            return Err(Error::Convergence { time: t, residual: r });
        }
        let next = (t + chunk).min(controls.max_time);
        stepper.advance(&mut t, &mut y, next)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_guard() {
        let params = SystemParams::new(0.0, 1.0, 2.0, 0.2, 0.0).unwrap();
        let space = TruncatedSpace::new(10).unwrap();
        let err = steady_state(&params, space, &IntegratorControls::default()).unwrap_err();
        assert!(matches!(err, Error::Regime(_)));
    }

    #[test]
    fn requires_loss() {
        let params = SystemParams::new(0.0, 1.0, 2.0, 0.0, 0.0).unwrap();
        let space = TruncatedSpace::new(10).unwrap();
        assert!(steady_state(&params, space, &IntegratorControls::default()).is_err());
    }

    #[test]
    fn direct_and_integrated_agree() {
        let params = SystemParams::new(0.01, 1.0, 0.5, 0.08, 0.01).unwrap();
        let space = TruncatedSpace::new(12).unwrap();
        let controls = IntegratorControls { max_time: 2e3, rtol: 1e-13, atol: 1e-16, max_step: Some(0.5), ..Default::default() };
        let direct = steady_state(&params, space, &controls).unwrap();
        let integrated = steady_state_with(&params, space, &controls, SteadyStateMethod::Integrate).unwrap();
        assert!(direct.residual <= RESIDUAL_TOL * params.kappa);
        assert!(integrated.residual <= RESIDUAL_TOL * params.kappa);
        let diff = (direct.state.matrix() - integrated.state.matrix()).camax();
        assert!(diff < 1e-6, "{diff:e}");
    }

    #[test]
    fn integration_reports_nonconvergence() {
        let params = SystemParams::new(0.01, 1.0, 1.0, 0.05, 0.0).unwrap();
        let space = TruncatedSpace::new(16).unwrap();
        let controls = IntegratorControls { max_time: 1.0, ..Default::default() };
        let err = steady_state_with(&params, space, &controls, SteadyStateMethod::Integrate).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }
}
