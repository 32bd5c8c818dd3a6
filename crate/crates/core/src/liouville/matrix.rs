use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::C64;

use super::params::{CatBasisParams, SystemParams};

/// Stack a cat-basis 2×2 matrix as (ρ₊₊, ρ₊₋, ρ₋₊, ρ₋₋).
pub fn vec(m: &Matrix2<C64>) -> Vector4<C64> {
    Vector4::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

/// Inverse of [`vec`].
pub fn unvec(v: &Vector4<C64>) -> Matrix2<C64> {
    Matrix2::new(v[0], v[1], v[2], v[3])
}

/// The 4×4 cat-subspace Liouvillian acting on [`vec`]-ordered states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveLiouvillian {
    matrix: Matrix4<C64>,
}

impl EffectiveLiouvillian {
    pub fn new(params: &SystemParams) -> Self {
        Self::from_cat(&CatBasisParams::new(params), params.delta, params.kappa)
    }

    /// Build from derived cat quantities; `cat.l_phi` carries κ_φ.
    pub fn from_cat(cat: &CatBasisParams, delta: f64, kappa: f64) -> Self {
        let a2 = cat.alpha * cat.alpha;
        let p_sq = cat.p * cat.p;
        let z = C64::new(0.0, 0.0);
        let r = |x: f64| C64::new(x, 0.0);
        let center = -0.5 * kappa * cat.p2_plus * a2 + cat.l_phi;
        let rot = a2 * delta * cat.p2_minus;
        let g = r(a2 * kappa);
        #[rustfmt::skip]
        let matrix = Matrix4::new(
            r(-a2 * kappa * p_sq), z, z, r(a2 * kappa / p_sq),
            z, C64::new(center, rot), g, z,
            z, g, C64::new(center, -rot), z,
            r(a2 * kappa * p_sq), z, z, r(-a2 * kappa / p_sq),
        );
        Self { matrix }
    }

    /// Wrap an arbitrary matrix, e.g. for perturbation studies.
    pub fn from_matrix(matrix: Matrix4<C64>) -> Result<Self> {
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericFailure("non-finite Liouvillian entry".into()));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.matrix
    }

    /// L applied to a cat-basis matrix.
    pub fn apply(&self, rho: &Matrix2<C64>) -> Matrix2<C64> {
        unvec(&(self.matrix * vec(rho)))
    }

    /// Rotation rate α²Δp₂⁻ read back from the matrix.
    pub fn rotation(&self) -> f64 {
        self.matrix[(1, 1)].im
    }

    /// Coherence coupling α²κ read back from the matrix.
    pub fn coupling(&self) -> f64 {
        self.matrix[(1, 2)].re
    }
}

/// The effective Liouvillian for `params`.
pub fn effective_liouvillian(params: &SystemParams) -> EffectiveLiouvillian {
    EffectiveLiouvillian::new(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vec_round_trip() {
        let m = Matrix2::new(C64::new(1.0, 0.0), C64::new(2.0, 1.0), C64::new(3.0, -1.0), C64::new(4.0, 0.0));
        let v = vec(&m);
        assert_eq!(v[1], C64::new(2.0, 1.0));
        assert_eq!(v[2], C64::new(3.0, -1.0));
        assert_eq!(unvec(&v), m);
    }

    #[test]
    fn dissipationless_generator_is_diagonal_rotation() {
        let params = SystemParams::new(5.0, 1.0, 2.0, 0.0, 0.0).unwrap();
        let cat = CatBasisParams::new(&params);
        let l = effective_liouvillian(&params);
        let rot = 2.0 * 5.0 * cat.p2_minus;
        let expected = Matrix4::from_diagonal(&Vector4::new(
            C64::new(0.0, 0.0),
            C64::new(0.0, rot),
            C64::new(0.0, -rot),
            C64::new(0.0, 0.0),
        ));
        assert!((l.matrix() - expected).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn structural_zeros_and_trace_rows() {
        let params = SystemParams::new(3.0, 1.0, 2.3, 0.2, 0.05).unwrap();
        let m = *effective_liouvillian(&params).matrix();
        for (i, j) in [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)] {
            assert_eq!(m[(i, j)], C64::new(0.0, 0.0), "entry ({i},{j})");
        }
        for j in 0..4 {
            assert!((m[(0, j)] + m[(3, j)]).norm() < 1e-15);
        }
        assert_eq!(m[(1, 2)], m[(2, 1)]);
        assert!((m[(1, 2)].re - 2.3 * 0.2).abs() < 1e-15);
    }
}
