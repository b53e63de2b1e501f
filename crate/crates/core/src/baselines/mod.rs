//! Reference wall models, accuracy metrics and the speed benchmark.
//!
//! Every model consumes a [`CurrentWaveform`] and produces a [`Trajectory`]
//! on the same sampling grid as [`simulate`](crate::waveform::simulate), so
//! any two can be compared sample by sample.

pub mod bench;
mod cc1d;
mod metrics;

use serde::{Deserialize, Serialize};

pub use cc1d::{CcParams, CcState, CcVariant, GAMMA};
pub use metrics::{error_report, rms_between, ErrorReport};

use cc1d::CcRhs;
use crate::dynamics::{terminal_velocity, ModelConstants, TrackGeometry, NM};
use crate::error::{Error, Result};
use crate::waveform::{drive_samples, CurrentWaveform, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum BaselineModel {
    /// Velocity follows the drive instantly: `v = μ J`.
    Linear {
        /// m/s per A/m²
        mobility: f64,
    },
    /// First-order lag toward `μ J` with time constant `tau_m` ns.
    Inertial { mobility: f64, tau_m: f64 },
    Cc1dFixedWidth(CcParams),
    Cc1dVariableWidth { params: CcParams, kappa: f64 },
    Cc1dFitted {
        params: CcParams,
        drive_scale: f64,
        damping_scale: f64,
    },
}

impl BaselineModel {
    pub fn id(&self) -> &'static str {
        match self {
            BaselineModel::Linear { .. } => "linear",
            BaselineModel::Inertial { .. } => "inertial",
            BaselineModel::Cc1dFixedWidth(_) => "cc1d_fixed_width",
            BaselineModel::Cc1dVariableWidth { .. } => "cc1d_variable_width",
            BaselineModel::Cc1dFitted { .. } => "cc1d_fitted",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConstants(format!("{}: {name} must be positive, got {v}", self.id())))
            }
        };
        match *self {
            BaselineModel::Linear { mobility } => positive("mobility", mobility),
            BaselineModel::Inertial { mobility, tau_m } => {
                positive("mobility", mobility)?;
                positive("tau_m", tau_m)
            }
            BaselineModel::Cc1dFixedWidth(p) => p.validate(),
            BaselineModel::Cc1dVariableWidth { params, kappa } => {
                params.validate()?;
                if kappa >= 0.0 && kappa.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidConstants(format!("kappa must be non-negative, got {kappa}")))
                }
            }
            BaselineModel::Cc1dFitted {
                params,
                drive_scale,
                damping_scale,
            } => {
                params.validate()?;
                positive("drive_scale", drive_scale)?;
                positive("damping_scale", damping_scale)
            }
        }
    }

    /// Parameters of the collective-coordinate variants.
    pub fn cc(&self) -> Option<(CcParams, CcVariant)> {
        match *self {
            BaselineModel::Cc1dFixedWidth(p) => Some((p, CcVariant::FIXED)),
            BaselineModel::Cc1dVariableWidth { params, kappa } => Some((
                params,
                CcVariant {
                    kappa,
                    ..CcVariant::FIXED
                },
            )),
            BaselineModel::Cc1dFitted {
                params,
                drive_scale,
                damping_scale,
            } => Some((
                params,
                CcVariant {
                    kappa: 0.0,
                    drive_scale,
                    damping_scale,
                },
            )),
            _ => None,
        }
    }

    /// Sine/cosine evaluations per integration step (four RK4 stages).
    pub fn trig_calls_per_step(&self) -> usize {
        match self.cc() {
            Some((p, v)) => 4 * CcRhs::new(&p, &v, 0.0).trig_per_eval(),
            None => 0,
        }
    }
}

/// Calibration of the baselines against a kinematic model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Reference drive, A/m².
    pub j_ref: f64,
    /// Wall width of the collective-coordinate models, nm.
    pub delta: f64,
    /// Gilbert damping of the collective-coordinate models.
    pub alpha: f64,
    /// Walker current as a multiple of `j_ref`.
    pub walker_ratio: f64,
    /// Width modulation of the variable-width variant.
    pub kappa: f64,
    /// RK4 step, ns.
    pub dt: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration {
            j_ref: 4e10,
            delta: 10.0,
            alpha: 0.05,
            walker_ratio: 4.0,
            kappa: 1.0,
            dt: 1e-3,
        }
    }
}

/// Baselines tuned so their steady velocity at `j_ref` equals the kinematic
/// terminal velocity: `μ = v∞(J_ref)/J_ref`, `τ_m = 1/(d1 + d2 J_ref)`, and
/// the collective-coordinate drive efficiency from `v = γ Δ η J / α`. The
/// anisotropy field puts the Walker current at `walker_ratio · j_ref`.
pub fn calibrate(mc: &ModelConstants, cal: &Calibration) -> Result<Vec<BaselineModel>> {
    let v_ref = terminal_velocity(cal.j_ref, mc)
        .value()
        .ok_or_else(|| Error::InvalidConstants("reference drive is inside the pinning band".into()))?;
    if !(v_ref > 0.0) {
        return Err(Error::InvalidConstants(format!(
            "terminal velocity at J_ref must be positive, got {v_ref}"
        )));
    }
    let mobility = v_ref / cal.j_ref;
    let tau_m = 1.0 / mc.damping_rate(cal.j_ref);
    let eta = v_ref * cal.alpha / (GAMMA * cal.delta * cal.j_ref);
    let h_k = 2.0 * eta * cal.walker_ratio * cal.j_ref / cal.alpha;
    let params = CcParams {
        delta: cal.delta,
        alpha: cal.alpha,
        h_k,
        eta,
        dt: cal.dt,
    };
    let models = vec![
        BaselineModel::Linear { mobility },
        BaselineModel::Inertial { mobility, tau_m },
        BaselineModel::Cc1dFixedWidth(params),
        BaselineModel::Cc1dVariableWidth {
            params,
            kappa: cal.kappa,
        },
        BaselineModel::Cc1dFitted {
            params,
            drive_scale: 1.0,
            damping_scale: 1.0,
        },
    ];
    for m in &models {
        m.validate()?;
    }
    Ok(models)
}

fn clamp_offset(q: f64, half: f64) -> f64 {
    q.clamp(-half, half)
}

/// Simulate a baseline from rest at the track centre.
///
/// Positions are clamped to the track; the baselines have no bounce.
pub fn simulate_baseline(
    model: &BaselineModel,
    wf: &CurrentWaveform,
    sample_dt: f64,
    geom: &TrackGeometry,
) -> Result<Trajectory> {
    model.validate()?;
    let half = 0.5 * geom.length();
    let n_hint = (wf.duration() / sample_dt) as usize + 2;
    let mut t = Vec::with_capacity(n_hint);
    let mut x = Vec::with_capacity(n_hint);
    let mut v = Vec::with_capacity(n_hint);
    let mut jj = Vec::with_capacity(n_hint);
    let mut push = |time: f64, offset_m: f64, vel: f64, j: f64| {
        t.push(time);
        x.push(half + offset_m);
        v.push(vel);
        jj.push(j);
    };
    match *model {
        BaselineModel::Linear { mobility } => {
            let mut q = 0.0;
            drive_samples(
                wf,
                sample_dt,
                &mut q,
                |q, j, h| *q = clamp_offset(*q + mobility * j * h * NM, half),
                |q, time, j| push(time, *q, mobility * j, j),
            )?;
        }
        BaselineModel::Inertial { mobility, tau_m } => {
            let mut s = (0.0f64, 0.0f64);
            drive_samples(
                wf,
                sample_dt,
                &mut s,
                |s, j, h| {
                    let v_inf = mobility * j;
                    let dv = s.1 - v_inf;
                    let gain = -(-h / tau_m).exp_m1();
                    let travel = v_inf * h + dv * tau_m * gain;
                    s.0 = clamp_offset(s.0 + travel * NM, half);
                    s.1 = v_inf + dv * (1.0 - gain);
                },
                |s, time, j| push(time, s.0, s.1, j),
            )?;
        }
        _ => {
            let (params, variant) = model.cc().expect("collective-coordinate variant");
            let mut s = CcState::default();
            let mut cache: Option<(u64, CcRhs)> = None;
            let mut rhs_for = |j: f64| -> CcRhs {
                match cache {
                    Some((bits, r)) if bits == j.to_bits() => r,
                    _ => {
                        let r = CcRhs::new(&params, &variant, j);
                        cache = Some((j.to_bits(), r));
                        r
                    }
                }
            };
            let dt = params.dt;
            let half_nm = half / NM;
            drive_samples(
                wf,
                sample_dt,
                &mut s,
                |s, j, h| {
                    let rhs = rhs_for(j);
                    let n = ((h / dt) * (1.0 - 1e-12)).ceil().max(1.0);
                    let sub = h / n;
                    for _ in 0..n as usize {
                        *s = rhs.rk4(*s, sub);
                    }
                    s.q = s.q.clamp(-half_nm, half_nm);
                },
                |s, time, j| {
                    let vel = CcRhs::new(&params, &variant, j).eval(s.phi).0;
                    push(time, s.q * NM, vel, j)
                },
            )?;
        }
    }
    Trajectory::new(t, x, v, jj)
}
