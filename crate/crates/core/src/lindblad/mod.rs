//! Full truncated-Fock-space master equation.

mod evolve;
mod generator;
mod integrator;
mod propagator;
mod steady;

pub use evolve::{evolve, evolve_with, TrajectorySample, TRACE_FAIL_TOL, TRACE_WARN_TOL};
pub use generator::{lindblad_rhs, standard_jumps, JumpOperator, LindbladGenerator};
pub use integrator::{Dopri5, IntegratorControls, OdeSystem, StepStats};
pub use propagator::{propagate_uniform, UniformPropagator};
pub use steady::{
    check_regime, steady_state, steady_state_with, SteadyState, SteadyStateMethod, MAX_KAPPA_OVER_KERR,
    RESIDUAL_TOL,
};

pub(crate) use evolve::check_times;
