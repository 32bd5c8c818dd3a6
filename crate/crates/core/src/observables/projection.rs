use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::{Error, Result};
use crate::fock::{cat_state, CatParity, FockDensityMatrix, TruncatedSpace};
use crate::liouville::CatBasisParams;
use crate::C64;

use super::qubit::QubitDensityMatrix;

/// Leakage above which a projected state is rejected.
pub const MAX_LEAKAGE: f64 = 0.5;

/// The two cat vectors |C⁺⟩, |C⁻⟩ in a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct CatBasis {
    alpha: f64,
    plus: DVector<C64>,
    minus: DVector<C64>,
}

/// Result of compressing a Fock state onto the cat qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    /// Renormalized to unit trace.
    pub qubit: QubitDensityMatrix,
    /// 1 − (ρ₊₊ + ρ₋₋) before renormalization.
    pub leakage: f64,
}

impl CatBasis {
    pub fn new(alpha: f64, space: TruncatedSpace) -> Result<Self> {
        Ok(Self {
            alpha,
            plus: cat_state(alpha, CatParity::Plus, space)?,
            minus: cat_state(alpha, CatParity::Minus, space)?,
        })
    }

    pub fn from_cat(cat: &CatBasisParams, space: TruncatedSpace) -> Result<Self> {
        Self::new(cat.alpha, space)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.plus.len()
    }

    pub fn vector(&self, parity: CatParity) -> &DVector<C64> {
        match parity {
            CatParity::Plus => &self.plus,
            CatParity::Minus => &self.minus,
        }
    }

    /// Σ ρᵢⱼ |Cⁱ⟩⟨Cʲ| as a Fock-space density matrix.
    pub fn embed(&self, qubit: &QubitDensityMatrix) -> Result<FockDensityMatrix> {
        let space = TruncatedSpace::new(self.dim())?;
        let q = qubit.matrix();
        let vs = [&self.plus, &self.minus];
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for i in 0..2 {
            for j in 0..2 {
                m += vs[i] * vs[j].adjoint() * q[(i, j)];
            }
        }
        FockDensityMatrix::new(space, m)
    }

    /// ⟨Cⁱ|ρ|Cʲ⟩, renormalized, with the lost weight reported as leakage.
    pub fn project(&self, rho: &FockDensityMatrix) -> Result<Projection> {
        if rho.space().dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rho.space().dim() });
        }
        let m = rho.matrix();
        let rho_plus = m * &self.plus;
        let rho_minus = m * &self.minus;
        let pp = self.plus.dotc(&rho_plus);
        let pm = self.plus.dotc(&rho_minus);
        let mp = self.minus.dotc(&rho_plus);
        let mm = self.minus.dotc(&rho_minus);
        let weight = pp.re + mm.re;
        let leakage = rho.trace() - weight;
        if leakage > MAX_LEAKAGE || !(weight > 0.0) {
            return Err(Error::ProjectionUnreliable(leakage));
        }
        let raw = Matrix2::new(pp, pm, mp, mm) / C64::new(weight, 0.0);
        let herm = (raw + raw.adjoint()) * C64::new(0.5, 0.0);
        Ok(Projection { qubit: QubitDensityMatrix::new(herm)?, leakage })
    }
}

/// One-shot projection building the cat basis from `cat.alpha`.
pub fn project_to_cat_subspace(rho: &FockDensityMatrix, cat: &CatBasisParams) -> Result<Projection> {
    CatBasis::from_cat(cat, rho.space())?.project(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_state;
    use crate::liouville::SystemParams;

    #[test]
    fn cat_states_project_to_poles() {
        let space = TruncatedSpace::new(30).unwrap();
        let basis = CatBasis::new(1.52, space).unwrap();
        let rho = FockDensityMatrix::from_pure(space, basis.vector(CatParity::Plus)).unwrap();
        let p = basis.project(&rho).unwrap();
        assert!(p.leakage.abs() < 1e-10);
        assert!((p.qubit.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(p.qubit.matrix()[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn coherent_state_coherence() {
        let params = SystemParams::reference();
        let cat = CatBasisParams::new(&params);
        let space = TruncatedSpace::new(30).unwrap();
        let psi = coherent_state(C64::new(cat.alpha, 0.0), space).unwrap();
        let rho = FockDensityMatrix::from_pure(space, &psi).unwrap();
        let p = project_to_cat_subspace(&rho, &cat).unwrap();
        let (a, b) = cat.coherent_amplitudes();
        assert!((p.qubit.coherence().re - a * b).abs() < 1e-10);
        assert!((p.qubit.coherence().re - 0.49997).abs() < 1e-5);
        assert!(p.leakage.abs() < 1e-10);
    }

    #[test]
    fn vacuum_far_from_large_cat_is_rejected() {
        let space = TruncatedSpace::new(40).unwrap();
        let basis = CatBasis::new(3.0, space).unwrap();
        let rho = FockDensityMatrix::from_pure(space, &space.basis(1)).unwrap();
        assert!(matches!(basis.project(&rho), Err(Error::ProjectionUnreliable(_))));
    }

    #[test]
    fn embed_then_project() {
        let space = TruncatedSpace::new(24).unwrap();
        let basis = CatBasis::new(1.3, space).unwrap();
        let q = QubitDensityMatrix::from_amplitudes(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        let back = basis.project(&basis.embed(&q).unwrap()).unwrap();
        assert!((back.qubit.matrix() - q.matrix()).iter().all(|z| z.norm() < 1e-12));
    }
}
