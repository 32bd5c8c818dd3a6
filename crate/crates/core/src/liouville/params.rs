use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Physical knobs of the driven-dissipative Kerr resonator.
///
/// Every field is an angular frequency or rate in rad/s. Use
/// [`SystemParams::from_hz`] to build from the `x/2π` values quoted in Hz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Drive-resonator detuning Δ.
    pub delta: f64,
    /// Kerr coefficient K.
    pub kerr: f64,
    /// Two-photon drive amplitude P.
    pub drive: f64,
    /// Single-photon loss rate κ.
    pub kappa: f64,
    /// Pure-dephasing rate κ_φ.
    pub kappa_phi: f64,
}

impl SystemParams {
    pub fn new(delta: f64, kerr: f64, drive: f64, kappa: f64, kappa_phi: f64) -> Result<Self> {
        let params = Self { delta, kerr, drive, kappa, kappa_phi };
        params.validate()?;
        Ok(params)
    }

    /// Build from frequencies in Hz (each value is ω/2π).
    pub fn from_hz(delta: f64, kerr: f64, drive: f64, kappa: f64, kappa_phi: f64) -> Result<Self> {
        Self::new(TAU * delta, TAU * kerr, TAU * drive, TAU * kappa, TAU * kappa_phi)
    }

    /// K/2π = 6.7 MHz, P/2π = 15.5 MHz, κ/2π = 10 kHz, Δ = κ_φ = 0.
    pub fn reference() -> Self {
        Self {
            delta: 0.0,
            kerr: TAU * 6.7e6,
            drive: TAU * 15.5e6,
            kappa: TAU * 10e3,
            kappa_phi: 0.0,
        }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        Self { kappa, ..self }
    }

    pub fn with_kappa_phi(self, kappa_phi: f64) -> Self {
        Self { kappa_phi, ..self }
    }

    /// Same K and κ, drive rescaled so that √(P/K) = `alpha`.
    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { drive: self.kerr * alpha * alpha, ..self }
    }

    /// Cat amplitude α = √(P/K).
    pub fn alpha(&self) -> f64 {
        (self.drive / self.kerr).sqrt()
    }

    /// Every violated invariant, not just the first.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let fields = [
            ("delta", self.delta),
            ("kerr", self.kerr),
            ("drive", self.drive),
            ("kappa", self.kappa),
            ("kappa_phi", self.kappa_phi),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                out.push(format!("{name} must be finite (got {value})"));
            }
        }
        if !(self.kerr > 0.0) {
            out.push(format!("kerr must be > 0 (got {})", self.kerr));
        }
        if !(self.drive > 0.0) {
            out.push(format!("drive must be > 0 (got {})", self.drive));
        }
        if !(self.kappa >= 0.0) {
            out.push(format!("kappa must be >= 0 (got {})", self.kappa));
        }
        if !(self.kappa_phi >= 0.0) {
            out.push(format!("kappa_phi must be >= 0 (got {})", self.kappa_phi));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(v))
        }
    }
}

/// Derived cat-qubit quantities for amplitude α.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatBasisParams {
    pub alpha: f64,
    /// e^{−2α²} = |⟨α|−α⟩|.
    pub overlap_e: f64,
    /// N⁺ = 1/√(2(1 + e^{−2α²})).
    pub norm_plus: f64,
    /// N⁻ = 1/√(2(1 − e^{−2α²})).
    pub norm_minus: f64,
    /// p = N⁺/N⁻.
    pub p: f64,
    /// p^{−2} + p².
    pub p2_plus: f64,
    /// p^{−2} − p², evaluated as 4e/(1 − e²) to avoid cancellation.
    pub p2_minus: f64,
    /// p^{−4} + p⁴.
    pub p4_plus: f64,
    /// Dephasing shift κ_φ α⁴ (1 − p₄⁺/2), rad/s.
    pub l_phi: f64,
}

impl CatBasisParams {
    pub fn new(params: &SystemParams) -> Self {
        Self::from_alpha(params.alpha(), params.kappa_phi)
    }

    pub fn from_alpha(alpha: f64, kappa_phi: f64) -> Self {
        let a2 = alpha * alpha;
        let e = (-2.0 * a2).exp();
        let norm_plus = 1.0 / (2.0 * (1.0 + e)).sqrt();
        let norm_minus = 1.0 / (2.0 * (1.0 - e)).sqrt();
        // p² = (1 − e)/(1 + e)
        let p_sq = (1.0 - e) / (1.0 + e);
        let p = p_sq.sqrt();
        let p2_plus = 1.0 / p_sq + p_sq;
        let p2_minus = 4.0 * e / (1.0 - e * e);
        let p4_plus = 1.0 / (p_sq * p_sq) + p_sq * p_sq;
        // 1 − p₄⁺/2 = −(p₂⁻)²/2 exactly
        let l_phi = -kappa_phi * a2 * a2 * p2_minus * p2_minus / 2.0;
        Self { alpha, overlap_e: e, norm_plus, norm_minus, p, p2_plus, p2_minus, p4_plus, l_phi }
    }

    /// Amplitudes of |α⟩ in the cat basis: (1/(2N⁺), 1/(2N⁻)).
    pub fn coherent_amplitudes(&self) -> (f64, f64) {
        (0.5 / self.norm_plus, 0.5 / self.norm_minus)
    }
}
