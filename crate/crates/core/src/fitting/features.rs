use serde::{Deserialize, Serialize};

use super::meta::TrialMeta;
use crate::error::{Error, Result};

/// Fraction of the peak velocity the wall may still have at the end of the
/// record before it is reported as not stopped.
const SETTLED_FRACTION: f64 = 0.01;

/// Per-trial summary used by the corner fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialFeatures {
    /// A/m²
    pub j: f64,
    /// Peak smoothed speed during the pulse, m/s.
    pub max_vel: f64,
    /// s
    pub time_constant: f64,
    /// Distance travelled after the pulse, m.
    pub drift_dist: f64,
    /// False when the wall was still moving faster than 1% of `max_vel` at
    /// the end of the record.
    pub settled: bool,
}

/// Reduce one trial to its features.
///
/// `velocities` are the smoothed values from
/// [`extract_velocity`](super::extract_velocity); NaN entries are skipped.
/// Times are in s, positions in m.
pub fn extract_features(
    positions: &[f64],
    velocities: &[f64],
    times: &[f64],
    meta: &TrialMeta,
) -> Result<TrialFeatures> {
    let n = times.len();
    if positions.len() != n || velocities.len() != n {
        return Err(Error::Features("positions, velocities and times differ in length".into()));
    }
    let tau = meta.run_time;
    let limit = tau + 1e-9 * tau;
    let current_end = times
        .iter()
        .position(|&t| t > limit)
        .ok_or_else(|| Error::Features(format!("record ends at {:e} s, inside the {tau:e} s pulse", times[n - 1])))?;
    if current_end == 0 {
        return Err(Error::Features("record starts after the pulse".into()));
    }
    let max_vel = velocities[..current_end]
        .iter()
        .filter(|v| !v.is_nan())
        .fold(f64::NAN, |m, v| m.max(v.abs()));
    if max_vel.is_nan() {
        return Err(Error::Features("no valid velocity sample during the pulse".into()));
    }
    let reference = velocities[current_end - 1];
    if reference.is_nan() {
        return Err(Error::Features("velocity undefined at the end of the pulse".into()));
    }
    let threshold = max_vel / std::f64::consts::E;
    let idx = velocities
        .iter()
        .position(|v| (v - reference).abs() < threshold)
        .ok_or_else(|| {
            Error::Features(format!(
                "no sample within max_vel/e of the end-of-pulse velocity (J = {:e}, max_vel = {max_vel})",
                meta.j
            ))
        })?;
    let drift_dist = (positions[n - 1] - positions[current_end]).abs();
    let settled = !(velocities[n - 1].abs() > SETTLED_FRACTION * max_vel);
    Ok(TrialFeatures {
        j: meta.j,
        max_vel,
        time_constant: times[idx],
        drift_dist,
        settled,
    })
}
