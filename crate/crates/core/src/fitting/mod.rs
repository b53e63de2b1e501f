//! Calibration pipeline: micromagnetic tables to fitted model constants.
//!
//! 1. [`MagTable`] parses a `table.txt`-style magnetization table and
//!    [`extract_position`] turns each profile row into a wall position.
//! 2. [`extract_velocity`] differentiates with a lag and applies Gaussian
//!    smoothing.
//! 3. [`extract_features`] reduces one trial to its maximum velocity, time
//!    constant and drift distance.
//! 4. [`fit_corner`] fits the terminal-velocity cubic, drift constant and
//!    `d2` for one parameter corner.

mod corner;
mod features;
mod magtable;
mod meta;
mod motion;

pub use corner::{fit_corner, FitDiagnostics, FitOptions, FittedCorner, DEFAULT_J_CAP};
pub use features::{extract_features, TrialFeatures};
pub use magtable::{extract_position, MagLayout, MagTable, DEFAULT_SPACING};
pub use meta::{parse_filename_tokens, TrialMeta};
pub use motion::{
    extract_velocity, gaussian_smooth, lagged_difference, Motion, DEFAULT_DIFF_LAG,
    DEFAULT_SMOOTH_WINDOW,
};

/// Acceleration coefficients from the terminal-velocity cubic and damping
/// rates.
pub fn derive_k(c: [f64; 4], d1: f64, d2: f64) -> [f64; 5] {
    [
        d1 * c[0],
        d1 * c[1] + d2 * c[0],
        d1 * c[2] + d2 * c[1],
        d1 * c[3] + d2 * c[2],
        d2 * c[3],
    ]
}
