use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fock::{hermitian_part, FockDensityMatrix};
use crate::C64;

use super::qubit::QubitDensityMatrix;

/// Eigenvalues below −this are a genuine invalid state, not rounding.
pub const NEGATIVITY_TOL: f64 = 1e-7;

/// Square root of a PSD Hermitian matrix. Eigenvalues within rounding of
/// zero are set to zero before the root so that rank-deficient inputs
/// do not pick up √eps-sized spurious weight.
fn psd_sqrt(m: &DMatrix<C64>, what: &str) -> Result<DMatrix<C64>> {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let floor = rounding_floor(eig.eigenvalues.as_slice());
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -NEGATIVITY_TOL {
        return Err(Error::InvalidState(format!("{what} has eigenvalue {min:e}")));
    }
    let roots = eig.eigenvalues.map(|l| C64::new(if l > floor { l.sqrt() } else { 0.0 }, 0.0));
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&roots) * v.adjoint())
}

fn rounding_floor(values: &[f64]) -> f64 {
    let scale = values.iter().map(|l| l.abs()).fold(0.0, f64::max);
    values.len() as f64 * f64::EPSILON * scale
}

/// F = (Tr √(√ρ σ √ρ))², clamped to [0, 1].
pub fn uhlmann_fidelity(rho: &DMatrix<C64>, sigma: &DMatrix<C64>) -> Result<f64> {
    if rho.shape() != sigma.shape() || rho.nrows() != rho.ncols() {
        return Err(Error::DimensionMismatch { expected: rho.nrows(), found: sigma.nrows() });
    }
    let s = psd_sqrt(rho, "first argument")?;
    // validates σ the same way
    psd_sqrt(sigma, "second argument")?;
    let inner = hermitian_part(&(&s * sigma * &s));
    let eig = SymmetricEigen::new(inner);
    let floor = rounding_floor(eig.eigenvalues.as_slice());
    let root_sum: f64 = eig.eigenvalues.iter().filter(|&&l| l > floor).map(|l| l.sqrt()).sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

pub fn fock_fidelity(rho: &FockDensityMatrix, sigma: &FockDensityMatrix) -> Result<f64> {
    uhlmann_fidelity(rho.matrix(), sigma.matrix())
}

pub fn qubit_fidelity(rho: &QubitDensityMatrix, sigma: &QubitDensityMatrix) -> Result<f64> {
    let to_dyn = |q: &QubitDensityMatrix| DMatrix::from_iterator(2, 2, q.matrix().iter().cloned());
    uhlmann_fidelity(&to_dyn(rho), &to_dyn(sigma))
}

/// ½ Tr|ρ − σ|.
pub fn trace_distance(rho: &DMatrix<C64>, sigma: &DMatrix<C64>) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch { expected: rho.nrows(), found: sigma.nrows() });
    }
    let eig = SymmetricEigen::new(hermitian_part(&(rho - sigma)));
    Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

pub fn qubit_trace_distance(rho: &QubitDensityMatrix, sigma: &QubitDensityMatrix) -> f64 {
    let d = rho.matrix() - sigma.matrix();
    let mean = 0.5 * (d[(0, 0)].re + d[(1, 1)].re);
    let half_gap = 0.5 * (d[(0, 0)].re - d[(1, 1)].re);
    let r = (half_gap * half_gap + d[(0, 1)].norm_sqr()).sqrt();
    0.5 * ((mean + r).abs() + (mean - r).abs())
}
