//! Deterministic, file-emitting sweeps, one per dataset.
//!
//! Every sweep returns typed rows; [`Table`] turns them into CSV with a
//! `#` provenance header, and [`write_bundle`] writes the files plus a
//! checksummed manifest. Grid points run on the rayon pool and are
//! gathered in grid order, so thread count never changes file content.

mod dynamics;
mod fidelity_map;
mod output;
mod phase;
mod snapshots;
mod spec;
mod spectrum;
mod steady;

pub use dynamics::{
    dynamics_sweep, full_trajectory, settle_time, zero_crossings, DynamicsRow, DynamicsSummary, DynamicsSweep, Source,
    SETTLE_THRESHOLD,
};
pub use fidelity_map::{fidelity_map, FidelityMap, FidelityRow};
pub use output::{fmt_num, provenance, write_bundle, Manifest, ManifestEntry, Table, CODE_VERSION};
pub use phase::{phase_diff_sweep, PhaseRow, PhaseSweep};
pub use snapshots::{bloch_wigner_snapshots, wigner_of, Snapshot, SnapshotBundle, WignerTarget, Z_BOUND};
pub use spec::{linspace, with_jobs, DeltaGrid, Experiment, Grid, SweepSpec, DEFAULT_WINDOW};
pub use spectrum::{spectrum_sweep, DampingRegime, LepPoint, SpectrumRow, SpectrumSweep};
pub use steady::{steady_state_report, SteadyStateReport};

/// ω in rad/s → ω/2π in kHz.
pub fn to_khz(omega: f64) -> f64 {
    omega / (std::f64::consts::TAU * 1e3)
}

/// Seconds → microseconds.
pub fn to_us(t: f64) -> f64 {
    t * 1e6
}
