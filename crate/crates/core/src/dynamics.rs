//! Kinematic domain-wall dynamics.
//!
//! The wall is a point object on a finite track. Its acceleration is the sum
//! of a current-induced term (odd quartic in the current density), a
//! Stokes-like damping term whose rate grows linearly with `|J|`, and a
//! static-friction pinning term. The track ends reflect the wall with a
//! coefficient of restitution.
//!
//! Units follow the compact model: time in ns, velocity in nm/ns (which is
//! numerically m/s), acceleration in nm/ns², current density in A/m².
//! Positions are stored in metres.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::derive_k;

/// nm -> m.
pub(crate) const NM: f64 = 1e-9;

/// Coefficient of restitution shipped with the reference compact model.
pub const DEFAULT_RESTITUTION: f64 = 0.25;

/// Fitted constants for one parameter corner.
///
/// The acceleration coefficients `k0..k4` are always derived from the
/// terminal-velocity cubic `c0..c3` and the damping rates `d1`, `d2`:
///
/// ```text
/// k0 = d1 c0
/// k1 = d1 c1 + d2 c0
/// k2 = d1 c2 + d2 c1
/// k3 = d1 c3 + d2 c2
/// k4 = d2 c3
/// ```
///
/// so that `a_J(J) / (d1 + d2 |J|)` is exactly the cubic in `|J|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    c: [f64; 4],
    d1: f64,
    d2: f64,
    k: [f64; 5],
    p1: f64,
    p2: f64,
    c_r: f64,
}

impl ModelConstants {
    /// Build constants from the terminal-velocity cubic (m/s per (A/m²)^n)
    /// and the damping rates (1/ns and 1/ns per A/m²).
    ///
    /// Pinning is disabled and the restitution is [`DEFAULT_RESTITUTION`].
    pub fn new(c: [f64; 4], d1: f64, d2: f64) -> Result<Self> {
        let mc = ModelConstants {
            c,
            d1,
            d2,
            k: derive_k(c, d1, d2),
            p1: 0.0,
            p2: 0.0,
            c_r: DEFAULT_RESTITUTION,
        };
        mc.validate()?;
        Ok(mc)
    }

    /// Build constants from explicitly supplied `k` values. The values must
    /// satisfy the derivation identity bit-for-bit.
    pub fn from_parts(
        k: [f64; 5],
        c: [f64; 4],
        d1: f64,
        d2: f64,
        p1: f64,
        p2: f64,
        c_r: f64,
    ) -> Result<Self> {
        let expected = derive_k(c, d1, d2);
        for (index, (&actual, &expected)) in k.iter().zip(expected.iter()).enumerate() {
            if actual.to_bits() != expected.to_bits() {
                return Err(Error::KIdentity {
                    index,
                    expected,
                    actual,
                });
            }
        }
        let mc = ModelConstants {
            c,
            d1,
            d2,
            k,
            p1,
            p2,
            c_r,
        };
        mc.validate()?;
        Ok(mc)
    }

    /// Enable static-friction pinning: the wall is held when
    /// `|J| < p1` (A/m²) and `|v| < p2` (m/s).
    pub fn with_pinning(mut self, p1: f64, p2: f64) -> Result<Self> {
        self.p1 = p1;
        self.p2 = p2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_restitution(mut self, c_r: f64) -> Result<Self> {
        self.c_r = c_r;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let finite = self.c.iter().chain(self.k.iter()).all(|v| v.is_finite())
            && [self.d1, self.d2, self.p1, self.p2, self.c_r]
                .iter()
                .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidConstants("all constants must be finite".into()));
        }
        if self.d1 <= 0.0 {
            return Err(Error::InvalidConstants(format!(
                "d1 must be positive, got {}",
                self.d1
            )));
        }
        if self.d2 < 0.0 {
            return Err(Error::InvalidConstants(format!(
                "d2 must be non-negative, got {}",
                self.d2
            )));
        }
        if !(0.0..=1.0).contains(&self.c_r) {
            return Err(Error::InvalidConstants(format!(
                "c_r must lie in [0, 1], got {}",
                self.c_r
            )));
        }
        if self.p1 < 0.0 || self.p2 < 0.0 {
            return Err(Error::InvalidConstants(
                "pinning thresholds must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn c(&self) -> [f64; 4] {
        self.c
    }
    pub fn k(&self) -> [f64; 5] {
        self.k
    }
    pub fn d1(&self) -> f64 {
        self.d1
    }
    pub fn d2(&self) -> f64 {
        self.d2
    }
    pub fn p1(&self) -> f64 {
        self.p1
    }
    pub fn p2(&self) -> f64 {
        self.p2
    }
    pub fn c_r(&self) -> f64 {
        self.c_r
    }

    /// Drift constant `1/d1` in ns (nm of drift per m/s of velocity).
    pub fn drift_const(&self) -> f64 {
        1.0 / self.d1
    }

    /// Total damping rate `d1 + d2 |J|` in 1/ns.
    #[inline]
    pub fn damping_rate(&self, j: f64) -> f64 {
        self.d1 + self.d2 * j.abs()
    }
}

/// Track dimensions in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackGeometry {
    length: f64,
    width: f64,
    thickness: f64,
}

impl TrackGeometry {
    pub fn new(length: f64, width: f64, thickness: f64) -> Result<Self> {
        for (name, v) in [("length", length), ("width", width), ("thickness", thickness)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidGeometry(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(TrackGeometry {
            length,
            width,
            thickness,
        })
    }

    /// 500 nm long, 1.2 nm thick track of the given width, as used for the
    /// micromagnetic training corners.
    pub fn micromagnetic(width: f64) -> Result<Self> {
        Self::new(500e-9, width, 1.2e-9)
    }

    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn width(&self) -> f64 {
        self.width
    }
    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    /// Heavy-metal cross-section, m².
    pub fn cross_section(&self) -> f64 {
        self.width * self.thickness
    }

    #[inline]
    fn half(&self) -> f64 {
        0.5 * self.length
    }
}

/// Wall position and velocity.
///
/// The position is held as a signed offset from the track centre. Mirroring
/// the track about its centre is then an exact sign flip, which keeps the
/// odd symmetry of the model bit-exact under simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwState {
    offset: f64,
    /// Velocity, m/s (= nm/ns).
    pub v: f64,
}

impl DwState {
    /// Wall at rest in the middle of the track.
    pub fn centered() -> Self {
        DwState { offset: 0.0, v: 0.0 }
    }

    /// Wall at `x` metres from the left end of the track.
    pub fn new(x: f64, v: f64, geom: &TrackGeometry) -> Result<Self> {
        if !(0.0..=geom.length).contains(&x) {
            return Err(Error::OffTrack {
                x,
                length: geom.length,
            });
        }
        Ok(DwState {
            offset: x - geom.half(),
            v,
        })
    }

    /// Wall at a signed offset (m) from the track centre.
    pub fn from_offset(offset: f64, v: f64) -> Self {
        DwState { offset, v }
    }

    /// Position measured from the left end of the track, m.
    #[inline]
    pub fn position(&self, geom: &TrackGeometry) -> f64 {
        geom.half() + self.offset
    }

    /// Signed offset from the track centre, m.
    #[inline]
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Reflect about the track centre and reverse the velocity.
    pub fn mirrored(&self) -> Self {
        DwState {
            offset: -self.offset,
            v: -self.v,
        }
    }
}

/// Current-induced acceleration, nm/ns².
///
/// Odd in `J`; the polynomial (including `k0`) is gated by `sign(J)` so that
/// no force acts without drive.
#[inline]
pub fn accel_current(j: f64, mc: &ModelConstants) -> f64 {
    if j == 0.0 {
        return 0.0;
    }
    let a = j.abs();
    let [k0, k1, k2, k3, k4] = mc.k;
    let magnitude = k0 + k4 * a.powi(4) + k3 * a.powi(3) + k2 * a.powi(2) + k1 * a;
    if j > 0.0 {
        magnitude
    } else {
        -magnitude
    }
}

/// Damping acceleration `-v (d1 + d2 |J|)`, nm/ns².
#[inline]
pub fn accel_damping(v: f64, j: f64, mc: &ModelConstants) -> f64 {
    -v * mc.damping_rate(j)
}

/// Whether the pinning force is active for this drive and velocity.
#[inline]
pub fn is_pinned(j: f64, v: f64, mc: &ModelConstants) -> bool {
    j.abs() < mc.p1 && v.abs() < mc.p2
}

/// Pinning acceleration: cancels the current-induced term `a_j` below both
/// thresholds, zero otherwise.
#[inline]
pub fn accel_pinning(j: f64, v: f64, a_j: f64, mc: &ModelConstants) -> f64 {
    if is_pinned(j, v, mc) {
        -a_j
    } else {
        0.0
    }
}

/// Sum of the current, damping and pinning accelerations, nm/ns².
#[inline]
pub fn total_accel(j: f64, v: f64, mc: &ModelConstants) -> f64 {
    let a_j = accel_current(j, mc);
    a_j + accel_damping(v, j, mc) + accel_pinning(j, v, a_j, mc)
}

/// Steady-state velocity under constant drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TerminalVelocity {
    /// Velocity in m/s.
    Moving(f64),
    /// `|J|` is below the pinning threshold; the wall does not move from rest.
    Pinned,
}

impl TerminalVelocity {
    pub fn value(self) -> Option<f64> {
        match self {
            TerminalVelocity::Moving(v) => Some(v),
            TerminalVelocity::Pinned => None,
        }
    }
}

/// Velocity at which current-induced and damping accelerations cancel.
pub fn terminal_velocity(j: f64, mc: &ModelConstants) -> TerminalVelocity {
    if j.abs() < mc.p1 {
        return TerminalVelocity::Pinned;
    }
    TerminalVelocity::Moving(accel_current(j, mc) / mc.damping_rate(j))
}

/// Reflect the wall off a track end with restitution `c_r`.
#[inline]
pub fn apply_bounce(state: DwState, geom: &TrackGeometry, c_r: f64) -> DwState {
    let half = geom.half();
    if state.offset < -half {
        DwState {
            offset: -half,
            v: -c_r * state.v,
        }
    } else if state.offset > half {
        DwState {
            offset: half,
            v: -c_r * state.v,
        }
    } else {
        state
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveStep(dt))
    }
}

/// Advance the wall by `dt` ns under constant `J`, using the closed-form
/// solution of the linear velocity ODE.
pub fn step_exact(
    state: DwState,
    j: f64,
    dt: f64,
    mc: &ModelConstants,
    geom: &TrackGeometry,
) -> Result<DwState> {
    check_dt(dt)?;
    Ok(ExactPropagator::new(j, dt, mc).advance(state, mc, geom))
}

/// Explicit Euler step in the order of the reference compact model:
/// velocity first, then position with the updated velocity.
pub fn step_euler(
    state: DwState,
    j: f64,
    dt: f64,
    mc: &ModelConstants,
    geom: &TrackGeometry,
) -> Result<DwState> {
    check_dt(dt)?;
    Ok(euler_unchecked(state, j, dt, mc, geom))
}

#[inline]
pub(crate) fn euler_unchecked(
    state: DwState,
    j: f64,
    dt: f64,
    mc: &ModelConstants,
    geom: &TrackGeometry,
) -> DwState {
    if is_pinned(j, state.v, mc) {
        return state;
    }
    let a = total_accel(j, state.v, mc);
    let v = state.v + a * dt;
    let offset = state.offset + v * dt * NM;
    apply_bounce(DwState { offset, v }, geom, mc.c_r)
}

/// Precomputed exact update for a fixed `(J, dt)` pair.
///
/// [`step_exact`] builds one of these per call; simulation loops reuse it
/// across steps of equal length.
#[derive(Debug, Clone, Copy)]
pub struct ExactPropagator {
    j: f64,
    dt: f64,
    v_inf: f64,
    decay: f64,
    gain_over_rate: f64,
}

impl ExactPropagator {
    pub fn new(j: f64, dt: f64, mc: &ModelConstants) -> Self {
        let rate = mc.damping_rate(j);
        let v_inf = accel_current(j, mc) / rate;
        let decay = (-rate * dt).exp();
        // 1 - e^{-r dt}, accurate for small r dt
        let gain = -(-rate * dt).exp_m1();
        ExactPropagator {
            j,
            dt,
            v_inf,
            decay,
            gain_over_rate: gain / rate,
        }
    }

    #[inline]
    pub fn matches(&self, j: f64, dt: f64) -> bool {
        self.j.to_bits() == j.to_bits() && self.dt.to_bits() == dt.to_bits()
    }

    #[inline]
    pub fn advance(&self, state: DwState, mc: &ModelConstants, geom: &TrackGeometry) -> DwState {
        if is_pinned(self.j, state.v, mc) {
            return state;
        }
        let dv = state.v - self.v_inf;
        let v = self.v_inf + dv * self.decay;
        let travel_nm = self.v_inf * self.dt + dv * self.gain_over_rate;
        let offset = state.offset + travel_nm * NM;
        apply_bounce(DwState { offset, v }, geom, mc.c_r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple() -> ModelConstants {
        ModelConstants::new([0.0, 2e-8, 0.0, 0.0], 0.1, 0.0).unwrap()
    }

    fn long_track() -> TrackGeometry {
        TrackGeometry::new(1e-3, 50e-9, 1.2e-9).unwrap()
    }

    /// Horner evaluation of `sign(J) * sum k_n |J|^n`, independent of the
    /// power-sum ordering used by [`accel_current`].
    fn horner_oracle(j: f64, k: [f64; 5]) -> f64 {
        let a = j.abs();
        let m = k.iter().rev().fold(0.0, |acc, &kn| acc * a + kn);
        j.signum() * m
    }

    #[test]
    fn current_accel_zero_drive_is_zero() {
        let mc = ModelConstants::new([3.0, 1e-9, 1e-20, 1e-30], 0.2, 1e-12).unwrap();
        assert_eq!(accel_current(0.0, &mc), 0.0);
        assert_eq!(accel_current(-0.0, &mc), 0.0);
    }

    #[test]
    fn current_accel_is_odd() {
        let mc = ModelConstants::new([3.0, 1e-9, 1e-20, 1e-30], 0.2, 1e-12).unwrap();
        for j in [1e10, 3.7e9, 8e11] {
            assert_eq!(accel_current(-j, &mc), -accel_current(j, &mc));
        }
    }

    #[test]
    fn current_accel_hand_value() {
        let mc = simple();
        let a = accel_current(1e10, &mc);
        assert!((a - 20.0).abs() < 1e-12 * 20.0, "{a}");
        let oracle = horner_oracle(1e10, mc.k());
        assert!((a - oracle).abs() <= 1e-12 * oracle.abs());
    }

    #[test]
    fn damping_values() {
        let mc = ModelConstants::new([0.0; 4], 0.05, 0.0).unwrap();
        assert_eq!(accel_damping(0.0, 5e10, &mc), 0.0);
        assert!((accel_damping(100.0, 0.0, &mc) + 5.0).abs() < 1e-12);
        let mc = ModelConstants::new([0.0; 4], 0.05, 1e-12).unwrap();
        for j in [-1e11, 0.0, 2e10] {
            assert!(accel_damping(3.0, j, &mc) < 0.0);
        }
    }

    #[test]
    fn pinning_cancels_drive_below_thresholds() {
        let mc = simple().with_pinning(5e9, 1.0).unwrap();
        let j = 2e9;
        let a_j = accel_current(j, &mc);
        assert_eq!(accel_pinning(j, 0.5, a_j, &mc), -a_j);
        assert_eq!(total_accel(j, 0.0, &mc), 0.0);
        // above the current threshold the pin releases
        let j = 6e9;
        assert_eq!(accel_pinning(j, 0.0, accel_current(j, &mc), &mc), 0.0);
        // moving fast enough also releases
        assert_eq!(accel_pinning(2e9, 2.0, 1.0, &mc), 0.0);
    }

    #[test]
    fn pinning_disabled_by_default() {
        let mc = simple();
        assert_eq!(accel_pinning(0.0, 0.0, 1.0, &mc), 0.0);
    }

    #[test]
    fn total_accel_cases() {
        let mc = simple();
        assert_eq!(total_accel(0.0, 0.0, &mc), 0.0);
        assert!((total_accel(1e10, 0.0, &mc) - 20.0).abs() < 1e-12 * 20.0);
        let v_inf = terminal_velocity(1e10, &mc).value().unwrap();
        assert!(total_accel(1e10, v_inf, &mc).abs() < 1e-12);
    }

    #[test]
    fn terminal_velocity_matches_cubic() {
        let c = [1.5, 3e-9, 2e-20, 5e-31];
        let mc = ModelConstants::new(c, 0.3, 2e-12).unwrap();
        for j in [4e9f64, -2e10, 7.7e10] {
            let a = j.abs();
            let cubic = j.signum() * (c[0] + c[1] * a + c[2] * a * a + c[3] * a * a * a);
            let v = terminal_velocity(j, &mc).value().unwrap();
            assert!((v - cubic).abs() <= 1e-13 * cubic.abs(), "{v} vs {cubic}");
            assert_eq!(terminal_velocity(-j, &mc).value().unwrap(), -v);
        }
    }

    #[test]
    fn terminal_velocity_inverse_oracle() {
        // bisect the cubic for 100 m/s, then check the model returns it
        let c = [0.0, 1e-9, 1e-21, 1e-32];
        let mc = ModelConstants::new(c, 0.2, 1e-12).unwrap();
        let cubic = |j: f64| c[0] + c[1] * j + c[2] * j * j + c[3] * j * j * j;
        let (mut lo, mut hi) = (0.0, 1e12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cubic(mid) < 100.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let v = terminal_velocity(0.5 * (lo + hi), &mc).value().unwrap();
        assert!((v - 100.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn terminal_velocity_pinned() {
        let mc = simple().with_pinning(1e9, 0.1).unwrap();
        assert_eq!(terminal_velocity(5e8, &mc), TerminalVelocity::Pinned);
        assert!(terminal_velocity(2e9, &mc).value().is_some());
    }

    #[test]
    fn exact_step_fixed_point() {
        let mc = simple();
        let geom = long_track();
        let v_inf = terminal_velocity(1e10, &mc).value().unwrap();
        let s = DwState::from_offset(0.0, v_inf);
        let out = step_exact(s, 1e10, 2.0, &mc, &geom).unwrap();
        assert_eq!(out.v, v_inf);
        assert!((out.offset() - v_inf * 2.0 * NM).abs() < 1e-24);
    }

    #[test]
    fn exact_step_free_decay_and_drift() {
        let mc = ModelConstants::new([0.0, 1e-9, 0.0, 0.0], 0.25, 0.0).unwrap();
        let geom = long_track();
        let v0 = 80.0;
        let s = DwState::from_offset(0.0, v0);
        let out = step_exact(s, 0.0, 3.0, &mc, &geom).unwrap();
        assert!((out.v - v0 * (-0.75f64).exp()).abs() < 1e-12 * v0);
        // drift as dt -> infinity
        let far = step_exact(s, 0.0, 400.0, &mc, &geom).unwrap();
        let drift_nm = far.offset() / NM;
        assert!((drift_nm - v0 / 0.25).abs() < 1e-9 * v0 / 0.25);

        // fine-step Euler oracle on the same drift
        let mut e = s;
        let h = 1e-4;
        for _ in 0..(400.0 / h) as usize {
            e = euler_unchecked(e, 0.0, h, &mc, &geom);
        }
        let euler_nm = e.offset() / NM;
        assert!((euler_nm - drift_nm).abs() < 1e-3 * drift_nm, "{euler_nm} vs {drift_nm}");
    }

    #[test]
    fn non_positive_dt_rejected() {
        let mc = simple();
        let geom = long_track();
        let s = DwState::centered();
        assert!(matches!(
            step_exact(s, 1e10, 0.0, &mc, &geom),
            Err(Error::NonPositiveStep(_))
        ));
        assert!(step_euler(s, 1e10, -1.0, &mc, &geom).is_err());
        assert!(step_euler(s, 1e10, f64::NAN, &mc, &geom).is_err());
    }

    #[test]
    fn euler_single_step_from_rest() {
        let mc = simple();
        let geom = long_track();
        let dt = 1e-3;
        let out = step_euler(DwState::centered(), 1e10, dt, &mc, &geom).unwrap();
        let a_j = accel_current(1e10, &mc);
        assert_eq!(out.v, a_j * dt);
        assert_eq!(out.offset(), out.v * dt * NM);
    }

    #[test]
    fn pinned_state_unchanged() {
        let mc = simple().with_pinning(1e10, 5.0).unwrap();
        let geom = long_track();
        let s = DwState::from_offset(3e-8, 1.0);
        assert_eq!(step_euler(s, 5e9, 1e-3, &mc, &geom).unwrap(), s);
        assert_eq!(step_exact(s, 5e9, 1.0, &mc, &geom).unwrap(), s);
    }

    #[test]
    fn bounce_left_edge() {
        let geom = TrackGeometry::new(500e-9, 50e-9, 1.2e-9).unwrap();
        let s = DwState::from_offset(-250e-9 - 1e-9, -50.0);
        let out = apply_bounce(s, &geom, 0.25);
        assert_eq!(out.position(&geom), 0.0);
        assert_eq!(out.v, 12.5);
    }

    #[test]
    fn bounce_sticky_and_elastic() {
        let geom = TrackGeometry::new(500e-9, 50e-9, 1.2e-9).unwrap();
        let s = DwState::from_offset(260e-9, 40.0);
        let out = apply_bounce(s, &geom, 0.0);
        assert_eq!(out.position(&geom), geom.length());
        assert_eq!(out.v, 0.0);
        let out = apply_bounce(s, &geom, 1.0);
        assert_eq!(out.v, -40.0);
        let inside = DwState::from_offset(10e-9, 40.0);
        assert_eq!(apply_bounce(inside, &geom, 0.5), inside);
    }

    #[test]
    fn elastic_bounces_conserve_speed() {
        // no drive, no damping to speak of: the wall ping-pongs between ends
        let mc = ModelConstants::new([0.0; 4], 1e-9, 0.0)
            .unwrap()
            .with_restitution(1.0)
            .unwrap();
        let geom = TrackGeometry::new(100e-9, 50e-9, 1.2e-9).unwrap();
        let dt = 1e-3;
        let mut s = DwState::from_offset(0.0, 200.0);
        let mut impacts = Vec::new();
        for _ in 0..10_000 {
            let before = s.v;
            s = step_euler(s, 0.0, dt, &mc, &geom).unwrap();
            if s.v.signum() != before.signum() {
                let pre_bounce = before + accel_damping(before, 0.0, &mc) * dt;
                assert_eq!(s.v, -pre_bounce);
                impacts.push(pre_bounce.abs());
            }
        }
        assert!(impacts.len() >= 3);
        for w in impacts.windows(2) {
            // only the negligible d1 decay between impacts
            assert!((w[0] - w[1]).abs() < 1e-6 * w[0]);
        }
    }

    #[test]
    fn constants_validation() {
        assert!(ModelConstants::new([0.0; 4], 0.0, 0.0).is_err());
        assert!(ModelConstants::new([0.0; 4], 0.1, -1.0).is_err());
        assert!(ModelConstants::new([f64::NAN, 0.0, 0.0, 0.0], 0.1, 0.0).is_err());
        let mc = ModelConstants::new([0.0; 4], 0.1, 0.0).unwrap();
        assert!(mc.with_restitution(1.5).is_err());
        assert!(mc.with_pinning(-1.0, 0.0).is_err());
        assert_eq!(mc.c_r(), DEFAULT_RESTITUTION);
    }

    #[test]
    fn from_parts_checks_identity() {
        let c = [1.0, 2e-9, 3e-20, 4e-31];
        let k = derive_k(c, 0.2, 1e-12);
        assert!(ModelConstants::from_parts(k, c, 0.2, 1e-12, 0.0, 0.0, 0.25).is_ok());
        let mut bad = k;
        bad[3] = f64::from_bits(bad[3].to_bits() + 1);
        match ModelConstants::from_parts(bad, c, 0.2, 1e-12, 0.0, 0.0, 0.25) {
            Err(Error::KIdentity { index, .. }) => assert_eq!(index, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn state_position_roundtrip() {
        let geom = TrackGeometry::micromagnetic(100e-9).unwrap();
        let s = DwState::new(125e-9, 3.0, &geom).unwrap();
        assert!((s.position(&geom) - 125e-9).abs() < 1e-22);
        assert_eq!(DwState::centered().position(&geom), 250e-9);
        assert!(DwState::new(-1e-9, 0.0, &geom).is_err());
        assert!(TrackGeometry::new(0.0, 1.0, 1.0).is_err());
    }
}
