use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::C64;

/// Off-diagonal magnitude below which the phase is undefined.
pub const MIN_COHERENCE: f64 = 1e-12;

/// φ = |arg ρ₀₁ − arg ρ₁₀| folded into [0, π].
///
/// Takes a bare 2×2 matrix because the inputs are usually Liouvillian
/// eigenmatrices, which are traceless and not density matrices.
pub fn phase_difference(m: &Matrix2<C64>) -> Result<f64> {
    let (a, b) = (m[(0, 1)], m[(1, 0)]);
    let smallest = a.norm().min(b.norm());
    if !(smallest > MIN_COHERENCE) {
        return Err(Error::UndefinedPhase(smallest));
    }
    let raw = (a.arg() - b.arg()).abs();
    Ok(if raw > std::f64::consts::PI { 2.0 * std::f64::consts::PI - raw } else { raw })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn ep_eigenmatrix() {
        let m = Matrix2::new(C64::new(0.0, 0.0), C64::new(0.0, 1.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        assert_eq!(phase_difference(&m).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn folds_large_differences() {
        let m = Matrix2::new(
            C64::new(0.0, 0.0),
            C64::from_polar(1.0, 3.0),
            C64::from_polar(1.0, -3.0),
            C64::new(0.0, 0.0),
        );
        let phi = phase_difference(&m).unwrap();
        assert!((phi - (2.0 * std::f64::consts::PI - 6.0)).abs() < 1e-14);
    }

    #[test]
    fn vanishing_coherence() {
        let m = Matrix2::new(C64::new(1.0, 0.0), C64::new(1e-14, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        assert!(matches!(phase_difference(&m), Err(Error::UndefinedPhase(_))));
    }
}
