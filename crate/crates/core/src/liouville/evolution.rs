use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::QubitDensityMatrix;
use crate::C64;

use super::matrix::{unvec, vec, EffectiveLiouvillian};
use super::params::{CatBasisParams, SystemParams};
use super::spectrum::closed_form_spectrum;

/// Default relative distance |(|Δ| − Δ_LEP2)|/Δ_LEP2 below which the
/// eigenbasis expansion is abandoned for the matrix exponential.
pub const DEFAULT_EP_SWITCH: f64 = 1e-6;

/// Named initial states in the cat basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// |α⟩ = |C⁺⟩/(2N⁺) + |C⁻⟩/(2N⁻).
    CoherentPlus,
    CatPlus,
    CatMinus,
    /// (|C⁺⟩ + i|C⁻⟩)/√2.
    YPlus,
}

impl InitialState {
    pub fn name(self) -> &'static str {
        match self {
            InitialState::CoherentPlus => "coherent_plus",
            InitialState::CatPlus => "cat_plus",
            InitialState::CatMinus => "cat_minus",
            InitialState::YPlus => "y_plus",
        }
    }
}

pub fn initial_qubit_state(kind: InitialState, cat: &CatBasisParams) -> QubitDensityMatrix {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let (c_plus, c_minus) = match kind {
        InitialState::CoherentPlus => {
            let (p, m) = cat.coherent_amplitudes();
            (C64::new(p, 0.0), C64::new(m, 0.0))
        }
        InitialState::CatPlus => (one, zero),
        InitialState::CatMinus => (zero, one),
        InitialState::YPlus => (one, C64::new(0.0, 1.0)),
    };
    QubitDensityMatrix::from_amplitudes(c_plus, c_minus).expect("nonzero amplitudes")
}

/// Spectral-expansion dynamics of the effective Liouvillian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveEvolution {
    /// Relative EP distance below which the matrix exponential is used.
    pub ep_switch: f64,
}

impl Default for EffectiveEvolution {
    fn default() -> Self {
        Self { ep_switch: DEFAULT_EP_SWITCH }
    }
}

impl EffectiveEvolution {
    /// Whether `params` is close enough to the EP to need the exponential.
    pub fn uses_exponential(&self, params: &SystemParams) -> bool {
        if !(params.kappa > 0.0) {
            return false;
        }
        let lep = params.kappa / CatBasisParams::new(params).p2_minus;
        (params.delta.abs() - lep).abs() <= self.ep_switch * lep
    }

    pub fn evolve(
        &self,
        rho0: &QubitDensityMatrix,
        params: &SystemParams,
        times: &[f64],
    ) -> Result<Vec<QubitDensityMatrix>> {
        if self.uses_exponential(params) {
            evolve_exponential(rho0, params, times)
        } else {
            evolve_eigenbasis(rho0, params, times)
        }
    }
}

/// ρ(t) under the effective Liouvillian with the default EP switch.
pub fn effective_evolve(
    rho0: &QubitDensityMatrix,
    params: &SystemParams,
    times: &[f64],
) -> Result<Vec<QubitDensityMatrix>> {
    EffectiveEvolution::default().evolve(rho0, params, times)
}

fn prepare(rho0: &QubitDensityMatrix, params: &SystemParams, times: &[f64]) -> Result<()> {
    params.validate()?;
    crate::lindblad::check_times(times)?;
    QubitDensityMatrix::new(*rho0.matrix())?;
    Ok(())
}

/// ρ(t) = Σ cᵢ e^{Eᵢt} ρᵢ with V·c = vec(ρ₀), V the eigenmatrix columns.
pub fn evolve_eigenbasis(
    rho0: &QubitDensityMatrix,
    params: &SystemParams,
    times: &[f64],
) -> Result<Vec<QubitDensityMatrix>> {
    prepare(rho0, params, times)?;
    let spectrum = closed_form_spectrum(params);
    let mats = spectrum.eigenmatrices();
    let v = Matrix4::from_columns(&[vec(&mats[0]), vec(&mats[1]), vec(&mats[2]), vec(&mats[3])]);
    let c = v
        .lu()
        .solve(&vec(rho0.matrix()))
        .ok_or_else(|| Error::NumericFailure("eigenmatrices are linearly dependent".into()))?;
    let values = spectrum.eigenvalues();
    times
        .iter()
        .map(|&t| {
            let w = Vector4::from_fn(|k, _| c[k] * (values[k] * t).exp());
            finish(&(v * w), t)
        })
        .collect()
}

/// ρ(t) = e^{Lt} ρ₀ by scaling-and-squaring Padé.
pub fn evolve_exponential(
    rho0: &QubitDensityMatrix,
    params: &SystemParams,
    times: &[f64],
) -> Result<Vec<QubitDensityMatrix>> {
    prepare(rho0, params, times)?;
    let l = *EffectiveLiouvillian::new(params).matrix();
    let v0 = vec(rho0.matrix());
    times.iter().map(|&t| finish(&((l * C64::new(t, 0.0)).exp() * v0), t)).collect()
}

fn finish(v: &Vector4<C64>, t: f64) -> Result<QubitDensityMatrix> {
    let m = unvec(v);
    let herm: Matrix2<C64> = (m + m.adjoint()) * C64::new(0.5, 0.0);
    QubitDensityMatrix::new(herm)
        .map_err(|e| Error::NumericFailure(format!("effective state at t = {t:e} s: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_distance(a: &QubitDensityMatrix, b: &QubitDensityMatrix) -> f64 {
        let d = a.matrix() - b.matrix();
        // eigenvalues of a traceless-ish Hermitian 2×2
        let x = 0.5 * (d[(0, 0)].re - d[(1, 1)].re);
        let m = 0.5 * (d[(0, 0)].re + d[(1, 1)].re);
        let r = (x * x + d[(0, 1)].norm_sqr()).sqrt();
        0.5 * ((m + r).abs() + (m - r).abs())
    }

    #[test]
    fn coherent_amplitudes_are_normalized() {
        let cat = CatBasisParams::new(&SystemParams::reference());
        let (p, m) = cat.coherent_amplitudes();
        assert!((p * p + m * m - 1.0).abs() < 1e-15);
        let x = initial_qubit_state(InitialState::CoherentPlus, &cat).bloch().x;
        let e = cat.overlap_e;
        assert!((x - (1.0 - e * e).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn steady_state_is_stationary() {
        let params = SystemParams::reference().with_delta(1.3e6);
        let ss = closed_form_spectrum(&params).rho_ss;
        let rho0 = QubitDensityMatrix::new(ss).unwrap();
        let times: Vec<f64> = (0..20).map(|k| k as f64 * 2e-6).collect();
        for rho in effective_evolve(&rho0, &params, &times).unwrap() {
            assert!((rho.matrix() - ss).iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn paths_agree_near_ep() {
        let base = SystemParams::reference();
        let lep = base.kappa / CatBasisParams::new(&base).p2_minus;
        let cat = CatBasisParams::new(&base);
        let rho0 = initial_qubit_state(InitialState::CoherentPlus, &cat);
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 5e-7).collect();
        for side in [1.0 - 1e-3, 1.0 + 1e-3] {
            let params = base.with_delta(side * lep);
            let a = evolve_eigenbasis(&rho0, &params, &times).unwrap();
            let b = evolve_exponential(&rho0, &params, &times).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!(trace_distance(x, y) < 1e-8);
            }
        }
    }

    #[test]
    fn exponential_used_on_the_ep() {
        let base = SystemParams::reference();
        let lep = base.kappa / CatBasisParams::new(&base).p2_minus;
        let evo = EffectiveEvolution::default();
        assert!(evo.uses_exponential(&base.with_delta(lep)));
        assert!(!evo.uses_exponential(&base.with_delta(1.01 * lep)));
        let cat = CatBasisParams::new(&base);
        let rho0 = initial_qubit_state(InitialState::CoherentPlus, &cat);
        let out = evo.evolve(&rho0, &base.with_delta(lep), &[0.0, 1e-6, 1e-5]).unwrap();
        assert!((out[2].trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_times() {
        let base = SystemParams::reference();
        let cat = CatBasisParams::new(&base);
        let rho0 = initial_qubit_state(InitialState::CatPlus, &cat);
        assert!(effective_evolve(&rho0, &base, &[1.0, 0.5]).is_err());
        assert!(effective_evolve(&rho0, &base, &[]).is_err());
    }
}
