//! The two-level cat-subspace description: parameters, the 4×4 effective
//! Liouvillian, its spectrum and the exceptional point.

mod evolution;
mod lep;
mod matrix;
mod params;
mod spectrum;

pub use evolution::{
    effective_evolve, evolve_eigenbasis, evolve_exponential, initial_qubit_state, EffectiveEvolution,
    InitialState, DEFAULT_EP_SWITCH,
};
pub use lep::{lep_curve, lep_detuning, lep_detuning_for, numeric_discriminant, numeric_lep_detuning};
pub use matrix::{effective_liouvillian, unvec, vec, EffectiveLiouvillian};
pub use params::{CatBasisParams, SystemParams};
pub use spectrum::{closed_form_spectrum, gauge_fix, is_at_ep, numeric_spectrum, LiouvillianSpectrum, EP_REL_TOL};
