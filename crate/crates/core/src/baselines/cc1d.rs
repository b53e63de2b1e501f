//! One-dimensional collective-coordinate wall model.
//!
//! The wall is described by its position `q` and the in-plane tilt `Φ` of
//! its magnetization. With a drive field `H = ηJ` along the easy axis and a
//! hard-axis anisotropy field `H_K`:
//!
//! ```text
//! (1 + α²) q̇ = Δ (α γ H + γ H_K/2 · sin 2Φ)
//! (1 + α²) Φ̇ = γ H − α γ H_K/2 · sin 2Φ
//! ```
//!
//! Below the Walker field `α H_K / 2` the tilt locks and `q̇ = γ Δ H / α`;
//! above it the tilt precesses and the velocity oscillates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gyromagnetic ratio, rad / (ns T).
pub const GAMMA: f64 = 176.085_963;

/// Physical parameters of the collective-coordinate model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcParams {
    /// Wall width parameter, nm.
    pub delta: f64,
    /// Gilbert damping.
    pub alpha: f64,
    /// Hard-axis anisotropy field, T.
    pub h_k: f64,
    /// Drive efficiency, T per A/m².
    pub eta: f64,
    /// RK4 step, ns.
    pub dt: f64,
}

impl CcParams {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.delta, self.alpha, self.h_k, self.dt]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
            && self.eta.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConstants(format!(
                "collective-coordinate parameters must be positive: {self:?}"
            )))
        }
    }

    /// Drive `|J|` at which the steady tilt is lost.
    pub fn walker_current(&self) -> f64 {
        self.alpha * self.h_k / (2.0 * self.eta.abs())
    }
}

/// Variant-specific knobs on top of [`CcParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcVariant {
    /// Width modulation: `Δ(Φ) = Δ0 / sqrt(1 + κ sin²Φ)`; 0 keeps Δ fixed.
    pub kappa: f64,
    /// Multiplier on the drive term.
    pub drive_scale: f64,
    /// Multiplier on the damping.
    pub damping_scale: f64,
}

impl CcVariant {
    pub const FIXED: CcVariant = CcVariant {
        kappa: 0.0,
        drive_scale: 1.0,
        damping_scale: 1.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CcState {
    /// Offset from the track centre, nm.
    pub q: f64,
    /// Tilt, rad.
    pub phi: f64,
}

/// Precomputed right-hand side for one `J`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CcRhs {
    delta: f64,
    kappa: f64,
    drive: f64,
    alpha: f64,
    half_hk: f64,
    inv: f64,
}

impl CcRhs {
    pub(crate) fn new(p: &CcParams, v: &CcVariant, j: f64) -> Self {
        let alpha = p.alpha * v.damping_scale;
        CcRhs {
            delta: p.delta,
            kappa: v.kappa,
            drive: GAMMA * p.eta * v.drive_scale * j,
            alpha,
            half_hk: 0.5 * GAMMA * p.h_k,
            inv: 1.0 / (1.0 + alpha * alpha),
        }
    }

    /// `(q̇ in nm/ns, Φ̇ in rad/ns)`.
    #[inline]
    pub(crate) fn eval(&self, phi: f64) -> (f64, f64) {
        let s2 = (2.0 * phi).sin();
        let width = if self.kappa == 0.0 {
            self.delta
        } else {
            let s = phi.sin();
            self.delta / (1.0 + self.kappa * s * s).sqrt()
        };
        let torque = self.half_hk * s2;
        let q_dot = width * (self.alpha * self.drive + torque) * self.inv;
        let phi_dot = (self.drive - self.alpha * torque) * self.inv;
        (q_dot, phi_dot)
    }

    /// Trigonometric evaluations per call of [`eval`](Self::eval).
    pub(crate) fn trig_per_eval(&self) -> usize {
        if self.kappa == 0.0 {
            1
        } else {
            2
        }
    }

    #[inline]
    pub(crate) fn rk4(&self, s: CcState, h: f64) -> CcState {
        // q does not feed back into the right-hand side
        let (q1, p1) = self.eval(s.phi);
        let (q2, p2) = self.eval(s.phi + 0.5 * h * p1);
        let (q3, p3) = self.eval(s.phi + 0.5 * h * p2);
        let (q4, p4) = self.eval(s.phi + h * p3);
        CcState {
            q: s.q + h / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4),
            phi: s.phi + h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4),
        }
    }
}
