//! Kinematic domain-wall motion.
//!
//! A domain wall on a finite track is modelled as a classical particle whose
//! acceleration depends on the drive current density and its own velocity.
//! The crate provides
//!
//! * the force model and integrators ([`dynamics`]),
//! * piecewise-constant waveform simulation ([`waveform`]),
//! * the DW-MTJ resistive network ([`electrical`]),
//! * the calibration pipeline from micromagnetic tables to fitted constants
//!   ([`fitting`]),
//! * `.tbl` lookup tables indexed by material corner ([`tables`]),
//! * reference baseline models, error metrics and a benchmark harness
//!   ([`baselines`]),
//! * the `dwkin` command line ([`cli`]).
//!
//! ```
//! use kinematic_dw::prelude::*;
//!
//! let mc = ModelConstants::new([0.35, 2.875e-11, 3.59375e-22, 6.8359375e-34], 0.15, 1.875e-13)?;
//! let geom = TrackGeometry::new(1e-6, 100e-9, 1.2e-9)?;
//! let wf = CurrentWaveform::pulse(4e10, 20.0, 20.0)?;
//! let traj = simulate(DwState::centered(), &wf, 0.01, &mc, &geom, Integrator::Exact)?;
//! assert!(traj.displacement() > 0.0);
//! # Ok::<(), kinematic_dw::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cli;
pub mod dynamics;
pub mod electrical;
mod error;
pub mod fitting;
pub mod tables;
pub mod waveform;

pub use error::{Error, Result};

/// Common imports.
pub mod prelude {
    pub use crate::dynamics::{
        accel_current, accel_damping, accel_pinning, apply_bounce, step_euler, step_exact,
        terminal_velocity, total_accel, DwState, ModelConstants, TerminalVelocity, TrackGeometry,
    };
    pub use crate::waveform::{
        drift_distance, max_velocity, simulate, CurrentWaveform, Integrator, Trajectory,
    };
    pub use crate::{Error, Result};
}
