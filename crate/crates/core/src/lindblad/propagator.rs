//! Exact fixed-step propagation e^{L·dt} for uniform time grids.
//!
//! The generator conserves the parity of i + j for ρ[i, j] (H couples
//! n ↔ n±2, a shifts both indices by one, a†a is diagonal), so L splits
//! into two blocks of dim²/2 entries each. Each block is exponentiated
//! once; a trajectory is then repeated matrix-vector products, free of
//! step-size control and accurate to rounding.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::FockDensityMatrix;
use crate::liouville::SystemParams;
use crate::C64;

use super::evolve::{checked_sample, TrajectorySample};
use super::generator::{to_row_major, LindbladGenerator};

/// Flat row-major positions (i, j) with i + j of the given parity.
pub(crate) fn sector_positions(dim: usize, parity: usize) -> Vec<usize> {
    (0..dim * dim).filter(|p| (p / dim + p % dim) % 2 == parity).collect()
}

/// Dense matrix of the generator restricted to one parity sector.
pub(crate) fn sector_matrix(generator: &LindbladGenerator, positions: &[usize]) -> DMatrix<C64> {
    let dim = generator.space().dim();
    let n = positions.len();
    let mut unit = vec![C64::new(0.0, 0.0); dim * dim];
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    let mut m = DMatrix::zeros(n, n);
    for (col, &p) in positions.iter().enumerate() {
        unit[p] = C64::new(1.0, 0.0);
        generator.apply(&unit, &mut out);
        unit[p] = C64::new(0.0, 0.0);
        for (row, &q) in positions.iter().enumerate() {
            m[(row, col)] = out[q];
        }
    }
    m
}

/// e^{L·dt} for a fixed step, stored per parity sector.
#[derive(Clone, Debug)]
pub struct UniformPropagator {
    dim: usize,
    step: f64,
    sectors: [(Vec<usize>, DMatrix<C64>); 2],
}

impl UniformPropagator {
    pub fn new(generator: &LindbladGenerator, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidParams(vec![format!("propagator step must be > 0 (got {step})")]));
        }
        let dim = generator.space().dim();
        let build = |parity| {
            let positions = sector_positions(dim, parity);
            let l = sector_matrix(generator, &positions) * C64::new(step, 0.0);
            let p = l.exp();
            if p.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NumericFailure("matrix exponential produced non-finite entries".into()));
            }
            Ok((positions, p))
        };
        Ok(Self { dim, step, sectors: [build(0)?, build(1)?] })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Advance a flat row-major state by one step, in place.
    pub fn apply(&self, y: &mut [C64]) {
        assert_eq!(y.len(), self.dim * self.dim);
        for (positions, p) in &self.sectors {
            let v = DVector::from_iterator(positions.len(), positions.iter().map(|&q| y[q]));
            let w = p * v;
            for (&q, z) in positions.iter().zip(w.iter()) {
                y[q] = *z;
            }
        }
    }
}

/// Full master-equation trajectory sampled at t = k·dt, k = 0..samples.
///
/// Same sample checks as [`super::evolve`]: re-Hermitized, never
/// renormalized, trace drift and negativity guarded.
pub fn propagate_uniform(
    rho0: &FockDensityMatrix,
    params: &SystemParams,
    dt: f64,
    samples: usize,
) -> Result<Vec<TrajectorySample>> {
    params.validate()?;
    if samples == 0 {
        return Err(Error::InvalidParams(vec!["at least one sample is required".into()]));
    }
    let space = rho0.space();
    let generator = LindbladGenerator::for_params(params, space);
    let mut y = to_row_major(rho0.matrix());
    let mut out = Vec::with_capacity(samples);
    out.push(TrajectorySample { time: 0.0, state: checked_sample(&y, space, 0.0)? });
    if samples == 1 {
        return Ok(out);
    }
    let propagator = UniformPropagator::new(&generator, dt)?;
    for k in 1..samples {
        propagator.apply(&mut y);
        let time = dt * k as f64;
        out.push(TrajectorySample { time, state: checked_sample(&y, space, time)? });
    }
    Ok(out)
}
