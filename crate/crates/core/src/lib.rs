//! Effective-Liouvillian and full master-equation simulation of a
//! driven-dissipative Kerr-cat qubit.
//!
//! All rates and frequencies are angular (rad/s) and all times are in
//! seconds inside the library. File outputs use 2π·Hz and microseconds.

pub mod error;
pub mod experiments;
pub mod fock;
pub mod lindblad;
pub mod liouville;
pub mod observables;

pub use error::{Error, Result};

/// Double-precision complex scalar used throughout.
pub type C64 = num_complex::Complex64;
