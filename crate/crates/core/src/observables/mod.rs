//! Quantities measured from states.

mod fidelity;
mod phase;
mod projection;
mod qubit;
mod wigner;

pub use fidelity::{
    fock_fidelity, qubit_fidelity, qubit_trace_distance, trace_distance, uhlmann_fidelity, NEGATIVITY_TOL,
};
pub use phase::{phase_difference, MIN_COHERENCE};
pub use projection::{project_to_cat_subspace, CatBasis, Projection, MAX_LEAKAGE};
pub use qubit::{bloch, BlochVector, QubitDensityMatrix};
pub use wigner::{wigner, wigner_point, WignerGrid, WignerGridSpec, EDGE_WARN_TOL, IMAG_TOL};
