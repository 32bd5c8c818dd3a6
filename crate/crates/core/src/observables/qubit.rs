use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Density matrix in the cat basis {|C⁺⟩, |C⁻⟩}; index 0 is `+`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitDensityMatrix {
    matrix: Matrix2<C64>,
}

impl QubitDensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-9;
    pub const DET_TOL: f64 = 1e-9;

    pub fn new(matrix: Matrix2<C64>) -> Result<Self> {
        let problems = Self::violations(&matrix);
        if problems.is_empty() {
            Ok(Self { matrix })
        } else {
            Err(Error::InvalidState(problems.join("; ")))
        }
    }

    fn violations(m: &Matrix2<C64>) -> Vec<String> {
        let mut out = Vec::new();
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            out.push("non-finite entries".to_string());
            return out;
        }
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > Self::HERMITIAN_TOL {
            out.push(format!("not Hermitian: max|ρ−ρ†| = {herm:e}"));
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            out.push(format!("trace {tr} differs from 1"));
        }
        let det = m.determinant().re;
        let diag_min = m[(0, 0)].re.min(m[(1, 1)].re);
        if det < -Self::DET_TOL || diag_min < -Self::DET_TOL {
            out.push(format!("not positive: det = {det:e}, min diagonal = {diag_min:e}"));
        }
        out
    }

    /// |ψ⟩⟨ψ| for ψ = c₊|C⁺⟩ + c₋|C⁻⟩ (normalized here).
    pub fn from_amplitudes(c_plus: C64, c_minus: C64) -> Result<Self> {
        let norm = (c_plus.norm_sqr() + c_minus.norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite amplitudes".into()));
        }
        let (a, b) = (c_plus / norm, c_minus / norm);
        Ok(Self {
            matrix: Matrix2::new(a * a.conj(), a * b.conj(), b * a.conj(), b * b.conj()),
        })
    }

    /// (I + xσ_x + yσ_y + zσ_z)/2 with the Y sign fixed so that
    /// (|C⁺⟩ + i|C⁻⟩)/√2 sits at y = +1.
    pub fn from_bloch(b: BlochVector) -> Result<Self> {
        let half = 0.5;
        Self::new(Matrix2::new(
            C64::new(half * (1.0 + b.z), 0.0),
            C64::new(half * b.x, -half * b.y),
            C64::new(half * b.x, half * b.y),
            C64::new(half * (1.0 - b.z), 0.0),
        ))
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// ρ₊₋ = ⟨C⁺|ρ|C⁻⟩.
    pub fn coherence(&self) -> C64 {
        self.matrix[(0, 1)]
    }

    pub fn bloch(&self) -> BlochVector {
        bloch(self)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let a = self.matrix[(0, 0)].re;
        let d = self.matrix[(1, 1)].re;
        let b = 0.5 * (self.matrix[(0, 1)] + self.matrix[(1, 0)].conj());
        0.5 * (a + d) - (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt()
    }
}

/// Cartesian Bloch coordinates of a cat-qubit state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn length(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// z = ρ₊₊ − ρ₋₋, x = 2 Re ρ₊₋, y = 2 Im ρ₋₊.
///
/// With y = 2 Im ρ₋₊ the state (|C⁺⟩ + i|C⁻⟩)/√2, whose ρ₋₊ = i/2, lands
/// at y = +1.
pub fn bloch(rho: &QubitDensityMatrix) -> BlochVector {
    let m = rho.matrix();
    BlochVector {
        x: 2.0 * m[(0, 1)].re,
        y: 2.0 * m[(1, 0)].im,
        z: m[(0, 0)].re - m[(1, 1)].re,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(b: BlochVector, x: f64, y: f64, z: f64) -> bool {
        (b.x - x).abs() < 1e-14 && (b.y - y).abs() < 1e-14 && (b.z - z).abs() < 1e-14
    }

    #[test]
    fn cardinal_states() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let plus = QubitDensityMatrix::from_amplitudes(one, zero).unwrap();
        assert!(close(plus.bloch(), 0.0, 0.0, 1.0));
        let minus = QubitDensityMatrix::from_amplitudes(zero, one).unwrap();
        assert!(close(minus.bloch(), 0.0, 0.0, -1.0));
        assert!(close(QubitDensityMatrix::from_amplitudes(one, one).unwrap().bloch(), 1.0, 0.0, 0.0));
        assert!(close(QubitDensityMatrix::from_amplitudes(one, -one).unwrap().bloch(), -1.0, 0.0, 0.0));
        assert!(close(QubitDensityMatrix::from_amplitudes(one, i).unwrap().bloch(), 0.0, 1.0, 0.0));
        assert!(close(QubitDensityMatrix::from_amplitudes(one, -i).unwrap().bloch(), 0.0, -1.0, 0.0));
    }

    #[test]
    fn bloch_round_trip() {
        let b = BlochVector { x: 0.3, y: -0.5, z: 0.1 };
        let rho = QubitDensityMatrix::from_bloch(b).unwrap();
        assert!(close(rho.bloch(), 0.3, -0.5, 0.1));
    }

    #[test]
    fn rejects_invalid_matrices() {
        let c = |re| C64::new(re, 0.0);
        assert!(QubitDensityMatrix::new(Matrix2::new(c(0.7), c(0.0), c(0.0), c(0.7))).is_err());
        assert!(QubitDensityMatrix::new(Matrix2::new(c(0.5), c(0.6), c(0.6), c(0.5))).is_err());
        assert!(QubitDensityMatrix::new(Matrix2::new(c(0.5), c(0.1), c(0.2), c(0.5))).is_err());
        assert!(QubitDensityMatrix::new(Matrix2::new(c(0.5), c(0.5), c(0.5), c(0.5))).is_ok());
    }
}
