//! The DW-MTJ as a three-terminal resistive element.
//!
//! Terminals P and Q are the ends of the heavy-metal track, RA is the MTJ
//! reference layer. The track is split into two resistors meeting at an
//! internal node, and the MTJ resistance hangs from that node to RA:
//!
//! ```text
//!   P ──RL── M ──RR── Q
//!            │
//!           Req
//!            │
//!            RA
//! ```
//!
//! The MTJ resistance depends on where the wall sits relative to the
//! junction window `[pdw_low, pdw_high]`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{step_euler, step_exact, DwState, ModelConstants, TrackGeometry};
use crate::error::{Error, Result};

/// Fixed offset in the reference track-resistance split, m.
const SPLIT_OFFSET: f64 = 10e-9;

/// How the track resistance is divided between the P and Q sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum TrackSplit {
    /// `RR = (L - pdw_low - 10 nm) / L * Rtotal`, `RL = Rtotal - RR`, as in
    /// the reference compact model.
    #[default]
    Reference,
    /// Split at the centre of the MTJ window:
    /// `RL = (pdw_low + pdw_high) / 2 / L * Rtotal`.
    MtjCentre,
}

/// Linear reduction of `Rap` with the MTJ bias voltage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoltageDependence {
    /// Fractional change of `Rap` per volt.
    pub factor: f64,
    /// Lower bound on `Rap_eq / Rap`.
    pub min_fraction: f64,
}

impl Default for VoltageDependence {
    fn default() -> Self {
        VoltageDependence {
            factor: 1.0,
            min_fraction: 0.4,
        }
    }
}

impl VoltageDependence {
    /// `Rap` under bias `v_mtj = V(RA) - V(M)`.
    pub fn rap_eq(&self, rap: f64, v_mtj: f64) -> f64 {
        let r = (1.0 - v_mtj * self.factor) * rap;
        r.max(self.min_fraction * rap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectricalParams {
    /// Parallel-state MTJ resistance, Ω.
    pub rp: f64,
    /// Antiparallel-state MTJ resistance, Ω.
    pub rap: f64,
    /// Total track resistance, Ω.
    pub r_total: f64,
    /// Start of the MTJ window, m from the left track end.
    pub pdw_low: f64,
    /// End of the MTJ window, m.
    pub pdw_high: f64,
    /// Spin-Hall efficiency.
    pub theta_sh: f64,
    /// Heavy-metal cross-section, m².
    pub area: f64,
    /// Track current below which no drive reaches the wall, A.
    pub i_th: f64,
    pub split: TrackSplit,
    pub voltage_dependence: Option<VoltageDependence>,
}

impl ElectricalParams {
    /// Defaults of the reference compact model: 1 kΩ / 1 MΩ junction,
    /// 3.9 kΩ track, window 20-40 nm, θ = 0.05, 1.2 nm × 50 nm cross
    /// section, 1 nA threshold.
    pub fn reference() -> Self {
        ElectricalParams {
            rp: 1e3,
            rap: 1e6,
            r_total: 3.9e3,
            pdw_low: 20e-9,
            pdw_high: 40e-9,
            theta_sh: 0.05,
            area: 1.2e-9 * 50e-9,
            i_th: 1e-9,
            split: TrackSplit::Reference,
            voltage_dependence: None,
        }
    }

    /// Track geometry of the reference compact model (120 nm × 50 nm ×
    /// 1.2 nm).
    pub fn reference_geometry() -> TrackGeometry {
        TrackGeometry::new(120e-9, 50e-9, 1.2e-9).expect("valid constants")
    }

    pub fn validate(&self, geom: &TrackGeometry) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidElectrical(m));
        if !(self.rp > 0.0 && self.rp <= self.rap && self.rap.is_finite()) {
            return bad(format!("need 0 < Rp <= Rap, got Rp = {}, Rap = {}", self.rp, self.rap));
        }
        if !(self.r_total > 0.0 && self.r_total.is_finite()) {
            return bad(format!("Rtotal must be positive, got {}", self.r_total));
        }
        if !(self.pdw_low >= 0.0 && self.pdw_low < self.pdw_high && self.pdw_high <= geom.length()) {
            return bad(format!(
                "need 0 <= pdw_low < pdw_high <= L, got {:e}, {:e}, L = {:e}",
                self.pdw_low,
                self.pdw_high,
                geom.length()
            ));
        }
        if !(self.area > 0.0 && self.area.is_finite()) {
            return bad(format!("area must be positive, got {}", self.area));
        }
        if !(self.i_th >= 0.0) {
            return bad(format!("I_th must be non-negative, got {}", self.i_th));
        }
        if !self.theta_sh.is_finite() {
            return bad("theta_SH must be finite".into());
        }
        if let Some(vd) = self.voltage_dependence {
            if !(vd.min_fraction > 0.0 && vd.factor.is_finite()) {
                return bad("voltage dependence needs min_fraction > 0 and a finite factor".into());
            }
        }
        Ok(())
    }

    /// `(RL, RR)` for a track of length `L`.
    pub fn track_resistances(&self, geom: &TrackGeometry) -> (f64, f64) {
        let l = geom.length();
        let rl = match self.split {
            TrackSplit::Reference => {
                let rr = (l - self.pdw_low - SPLIT_OFFSET) / l * self.r_total;
                self.r_total - rr
            }
            TrackSplit::MtjCentre => 0.5 * (self.pdw_low + self.pdw_high) / l * self.r_total,
        };
        (rl, self.r_total - rl)
    }
}

/// Parallel combination `(Rp / x) || (Rap / (1 - x))` for the parallel
/// fraction `x_norm` of the junction area.
pub fn mtj_resistance_fractional(x_norm: f64, rp: f64, rap: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x_norm) {
        return Err(Error::FractionOutOfRange(x_norm));
    }
    if x_norm == 1.0 {
        return Ok(rp);
    }
    if x_norm == 0.0 {
        return Ok(rap);
    }
    Ok(rp * rap / (x_norm * rap + (1.0 - x_norm) * rp))
}

fn windowed(x: f64, rp: f64, rap: f64, low: f64, high: f64, length: f64) -> f64 {
    if x <= low && x >= 0.0 {
        rp
    } else if x >= high && x <= length {
        rap
    } else {
        ((high - low) * rp * rap) / (rp * (x - low) + rap * (high - x))
    }
}

/// MTJ resistance with the wall at `x` m from the left end: `Rp` left of
/// the window, `Rap` right of it, parallel interpolation inside.
pub fn mtj_resistance_windowed(x: f64, ep: &ElectricalParams, geom: &TrackGeometry) -> Result<f64> {
    check_on_track(x, geom)?;
    Ok(windowed(x, ep.rp, ep.rap, ep.pdw_low, ep.pdw_high, geom.length()))
}

fn check_on_track(x: f64, geom: &TrackGeometry) -> Result<()> {
    if (0.0..=geom.length()).contains(&x) {
        Ok(())
    } else {
        Err(Error::OffTrack {
            x,
            length: geom.length(),
        })
    }
}

/// Spin-orbit drive current density from the track current, A/m².
pub fn current_density(i_track: f64, ep: &ElectricalParams) -> f64 {
    if i_track.abs() >= ep.i_th {
        ep.theta_sh * (i_track / ep.area)
    } else {
        0.0
    }
}

/// Effective anisotropy field (mT) of a corner from `Ku` (J/m³) and `Msat`
/// (A/m). The five `Ku` values of the tabulated corners map to fixed
/// fields.
pub fn b_anis_from_ku(ku: f64, msat: f64) -> f64 {
    if ku == 1.11e6 || ku == 5.36e5 {
        350.0
    } else if ku == 9.17e5 || ku == 4.05e5 {
        20.0
    } else if ku == 7.01e5 {
        150.0
    } else {
        (ku / (0.5 * msat) - (4.0 * std::f64::consts::PI * 1e-7) * msat) * 1000.0
    }
}

/// Terminal voltages; `None` marks a floating terminal.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TerminalDrive {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub ra: Option<f64>,
}

impl TerminalDrive {
    pub fn new(p: Option<f64>, q: Option<f64>, ra: Option<f64>) -> Self {
        TerminalDrive { p, q, ra }
    }

    fn driven(&self) -> usize {
        [self.p, self.q, self.ra].iter().filter(|v| v.is_some()).count()
    }
}

/// Branch currents and internal node voltage of a solved network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeSolution {
    /// P to middle, A.
    pub i_p: f64,
    /// Middle to Q, A.
    pub i_q: f64,
    /// Middle to RA, A.
    pub i_mtj: f64,
    /// V
    pub v_middle: f64,
    /// The branch that drives the wall: `i_p` while the wall is left of the
    /// window centre, `i_q` otherwise.
    pub i_track: f64,
    /// MTJ resistance used, Ω.
    pub r_mtj: f64,
}

const VD_MAX_ITER: usize = 200;

/// Static solve of the three-resistor star with the wall at `x`.
///
/// With voltage-dependent `Rap` the bias and resistance are iterated to a
/// fixed point.
pub fn solve_node(
    drive: &TerminalDrive,
    x: f64,
    ep: &ElectricalParams,
    geom: &TrackGeometry,
) -> Result<NodeSolution> {
    ep.validate(geom)?;
    check_on_track(x, geom)?;
    if drive.driven() < 2 {
        return Err(Error::UnderDetermined);
    }
    let (rl, rr) = ep.track_resistances(geom);
    for (name, value) in [("RL", rl), ("RR", rr)] {
        if !(value > 0.0) {
            return Err(Error::ZeroResistance { name, value });
        }
    }
    let solve = |req: f64| -> NodeSolution {
        let branches = [(drive.p, rl), (drive.q, rr), (drive.ra, req)];
        let (mut num, mut den) = (0.0, 0.0);
        for (v, r) in branches {
            if let Some(v) = v {
                num += v / r;
                den += 1.0 / r;
            }
        }
        let vm = num / den;
        // inflow to the middle node per branch; the largest is set from the
        // others so the node balances to rounding of the biggest current
        let mut inflow = branches.map(|(v, r)| v.map_or(0.0, |v| (v - vm) / r));
        let big = (0..3)
            .max_by(|&a, &b| inflow[a].abs().total_cmp(&inflow[b].abs()))
            .unwrap_or(0);
        inflow[big] = -(0..3).filter(|&k| k != big).map(|k| inflow[k]).sum::<f64>();
        let (i_p, i_q, i_mtj) = (inflow[0], -inflow[1], -inflow[2]);
        let i_track = if x < 0.5 * (ep.pdw_low + ep.pdw_high) { i_p } else { i_q };
        NodeSolution {
            i_p,
            i_q,
            i_mtj,
            v_middle: vm,
            i_track,
            r_mtj: req,
        }
    };
    let nominal = windowed(x, ep.rp, ep.rap, ep.pdw_low, ep.pdw_high, geom.length());
    let Some(vd) = ep.voltage_dependence else {
        return Ok(solve(nominal));
    };
    let Some(v_ra) = drive.ra else {
        return Ok(solve(nominal));
    };
    let mut sol = solve(nominal);
    for _ in 0..VD_MAX_ITER {
        let rap_eq = vd.rap_eq(ep.rap, v_ra - sol.v_middle);
        let req = windowed(x, ep.rp, rap_eq, ep.pdw_low, ep.pdw_high, geom.length());
        let next = solve(0.5 * (req + sol.r_mtj));
        let done = (next.r_mtj - sol.r_mtj).abs() <= 1e-13 * sol.r_mtj;
        sol = next;
        if done {
            break;
        }
    }
    Ok(sol)
}

/// Integrator used by [`DwMtjDevice`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DeviceIntegrator {
    Exact,
    Euler,
}

/// One recorded step of a driven device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceSample {
    /// ns
    pub t: f64,
    /// m from the left end
    pub x: f64,
    /// m/s
    pub v: f64,
    /// A/m²
    pub j: f64,
    /// A
    pub i_track: f64,
    /// Ω, after the step
    pub r_mtj: f64,
}

/// Wall on a track read out through an MTJ, driven by terminal voltages.
///
/// Every step solves the network at the current wall position, converts
/// the track current to a current density and advances the wall with that
/// density held constant.
#[derive(Debug, Clone)]
pub struct DwMtjDevice {
    pub state: DwState,
    pub constants: ModelConstants,
    pub geometry: TrackGeometry,
    pub electrical: ElectricalParams,
    pub integrator: DeviceIntegrator,
}

impl DwMtjDevice {
    pub fn new(
        state: DwState,
        constants: ModelConstants,
        geometry: TrackGeometry,
        electrical: ElectricalParams,
        integrator: DeviceIntegrator,
    ) -> Result<Self> {
        electrical.validate(&geometry)?;
        Ok(DwMtjDevice {
            state,
            constants,
            geometry,
            electrical,
            integrator,
        })
    }

    pub fn position(&self) -> f64 {
        self.state.position(&self.geometry)
    }

    pub fn resistance(&self) -> Result<f64> {
        mtj_resistance_windowed(self.position(), &self.electrical, &self.geometry)
    }

    /// Advance by `dt` ns under a constant terminal drive.
    pub fn step(&mut self, drive: &TerminalDrive, dt: f64) -> Result<(NodeSolution, f64)> {
        let sol = solve_node(drive, self.position(), &self.electrical, &self.geometry)?;
        let j = current_density(sol.i_track, &self.electrical);
        self.state = match self.integrator {
            DeviceIntegrator::Exact => step_exact(self.state, j, dt, &self.constants, &self.geometry)?,
            DeviceIntegrator::Euler => step_euler(self.state, j, dt, &self.constants, &self.geometry)?,
        };
        Ok((sol, j))
    }

    /// Run a piecewise-constant drive `(t_start ns, drive)` for `duration`
    /// ns with step `dt` ns, recording every `record_every` steps.
    pub fn run(
        &mut self,
        schedule: &[(f64, TerminalDrive)],
        duration: f64,
        dt: f64,
        record_every: usize,
    ) -> Result<Vec<DeviceSample>> {
        if schedule.is_empty() || schedule[0].0 != 0.0 {
            return Err(Error::InvalidWaveform("drive schedule must start at 0 ns".into()));
        }
        if schedule.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidWaveform("drive schedule times must increase".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::NonPositiveStep(dt));
        }
        let steps = (duration / dt).round() as usize;
        let every = record_every.max(1);
        let mut out = Vec::with_capacity(steps / every + 2);
        let mut seg = 0;
        out.push(DeviceSample {
            t: 0.0,
            x: self.position(),
            v: self.state.v,
            j: 0.0,
            i_track: 0.0,
            r_mtj: self.resistance()?,
        });
        for n in 0..steps {
            let t = n as f64 * dt;
            while seg + 1 < schedule.len() && schedule[seg + 1].0 <= t + 1e-9 * dt {
                seg += 1;
            }
            let (sol, j) = self.step(&schedule[seg].1, dt)?;
            if (n + 1) % every == 0 || n + 1 == steps {
                out.push(DeviceSample {
                    t: (n + 1) as f64 * dt,
                    x: self.position(),
                    v: self.state.v,
                    j,
                    i_track: sol.i_track,
                    r_mtj: self.resistance()?,
                });
            }
        }
        Ok(out)
    }
}
