//! Piecewise-constant current waveforms, trajectories and the simulation
//! driver.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{euler_unchecked, DwState, ExactPropagator, ModelConstants, TrackGeometry};
use crate::error::{Error, Result};

/// Sample interval matching the micromagnetic table cadence (10 ps).
pub const DEFAULT_SAMPLE_DT: f64 = 0.01;

/// Euler step of the reference compact model, ns.
pub const DEFAULT_EULER_DT: f64 = 1e-3;

/// Relative slack used when deciding whether two instants coincide.
const TIME_TOL: f64 = 1e-9;

/// One constant-current interval, starting at `t_start` ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t_start: f64,
    /// Current density, A/m².
    pub j: f64,
}

/// Current density versus time, constant between breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentWaveform {
    segments: Vec<Segment>,
    duration: f64,
}

impl CurrentWaveform {
    pub fn new(segments: Vec<Segment>, duration: f64) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(Error::InvalidWaveform("no segments".into()));
        };
        if first.t_start != 0.0 {
            return Err(Error::InvalidWaveform(format!(
                "first segment must start at 0 ns, got {}",
                first.t_start
            )));
        }
        for s in &segments {
            if !s.t_start.is_finite() || !s.j.is_finite() {
                return Err(Error::InvalidWaveform("non-finite breakpoint".into()));
            }
        }
        for w in segments.windows(2) {
            if w[1].t_start <= w[0].t_start {
                return Err(Error::InvalidWaveform(format!(
                    "breakpoints must be strictly increasing ({} then {})",
                    w[0].t_start, w[1].t_start
                )));
            }
        }
        let last = segments.last().unwrap().t_start;
        if !(duration.is_finite() && duration > 0.0 && duration >= last) {
            return Err(Error::InvalidWaveform(format!(
                "duration {duration} ns must be positive and cover the last breakpoint at {last} ns"
            )));
        }
        Ok(CurrentWaveform { segments, duration })
    }

    /// Build from `(t_start_ns, J)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)], duration: f64) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(t_start, j)| Segment { t_start, j })
                .collect(),
            duration,
        )
    }

    pub fn constant(j: f64, duration: f64) -> Result<Self> {
        Self::from_pairs(&[(0.0, j)], duration)
    }

    /// Square pulse of `width` ns followed by `settle` ns without drive.
    pub fn pulse(j: f64, width: f64, settle: f64) -> Result<Self> {
        if settle == 0.0 {
            return Self::constant(j, width);
        }
        Self::from_pairs(&[(0.0, j), (width, 0.0)], width + settle)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Current density in effect at `t` (segments are closed on the left).
    pub fn j_at(&self, t: f64) -> f64 {
        let idx = self.segments.partition_point(|s| s.t_start <= t);
        self.segments[idx.saturating_sub(1)].j
    }

    /// Same waveform with every current density negated.
    pub fn negated(&self) -> Self {
        CurrentWaveform {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    t_start: s.t_start,
                    j: -s.j,
                })
                .collect(),
            duration: self.duration,
        }
    }

    /// Prepend `delay` ns of zero drive.
    pub fn delayed(&self, delay: f64) -> Result<Self> {
        if delay == 0.0 {
            return Ok(self.clone());
        }
        let mut segments = vec![Segment { t_start: 0.0, j: 0.0 }];
        segments.extend(self.segments.iter().map(|s| Segment {
            t_start: s.t_start + delay,
            j: s.j,
        }));
        Self::new(segments, self.duration + delay)
    }

    /// Read the two-column CSV form (`t_start_ns,J_Apm2`). The total duration
    /// comes from a footer row whose current column is the literal `end`,
    /// or from `duration` when the file has no footer.
    pub fn read_csv<R: Read>(reader: R, duration: Option<f64>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t_start_ns" || &headers[1] != "J_Apm2" {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "expected header `t_start_ns,J_Apm2`, got `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
        let mut segments = Vec::new();
        let mut footer = None;
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            if footer.is_some() {
                return Err(Error::Parse {
                    line,
                    message: "rows after the `end` footer".into(),
                });
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    message: format!("`{s}`: {e}"),
                })
            };
            let t = parse(&rec[0])?;
            if rec[1].eq_ignore_ascii_case("end") {
                footer = Some(t);
            } else {
                segments.push(Segment {
                    t_start: t,
                    j: parse(&rec[1])?,
                });
            }
        }
        let duration = footer.or(duration).ok_or_else(|| {
            Error::InvalidWaveform("no duration: add an `<t>,end` footer row or pass one".into())
        })?;
        Self::new(segments, duration)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t_start_ns", "J_Apm2"])?;
        for s in &self.segments {
            w.write_record([s.t_start.to_string(), s.j.to_string()])?;
        }
        w.write_record([self.duration.to_string(), "end".to_string()])?;
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Sampled wall motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// ns
    pub times: Vec<f64>,
    /// m, from the left end of the track
    pub positions: Vec<f64>,
    /// m/s
    pub velocities: Vec<f64>,
    /// A/m², in effect at each sample
    pub currents: Vec<f64>,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        positions: Vec<f64>,
        velocities: Vec<f64>,
        currents: Vec<f64>,
    ) -> Result<Self> {
        let n = times.len();
        if n == 0 {
            return Err(Error::InvalidTrajectory("empty".into()));
        }
        if positions.len() != n || velocities.len() != n || currents.len() != n {
            return Err(Error::InvalidTrajectory("column lengths differ".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTrajectory(
                "times must be strictly increasing".into(),
            ));
        }
        Ok(Trajectory {
            times,
            positions,
            velocities,
            currents,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Index of the first sample at or after `t`.
    pub fn index_at_or_after(&self, t: f64) -> Result<usize> {
        let tol = TIME_TOL * t.abs().max(1.0);
        if t < self.start() - tol || t > self.end() + tol {
            return Err(Error::OutOfSpan {
                t,
                start: self.start(),
                end: self.end(),
            });
        }
        Ok(self
            .times
            .partition_point(|&ti| ti < t - tol)
            .min(self.len() - 1))
    }

    /// Net displacement between first and last sample, m.
    pub fn displacement(&self) -> f64 {
        self.positions[self.len() - 1] - self.positions[0]
    }

    /// Linear interpolation onto new sample times (which must lie inside
    /// the span). Currents take the value of the preceding sample.
    pub fn resample(&self, times: &[f64]) -> Result<Trajectory> {
        let mut pos = Vec::with_capacity(times.len());
        let mut vel = Vec::with_capacity(times.len());
        let mut cur = Vec::with_capacity(times.len());
        for &t in times {
            let i = self.index_at_or_after(t)?;
            if i == 0 || (self.times[i] - t).abs() <= TIME_TOL * t.abs().max(1.0) {
                pos.push(self.positions[i]);
                vel.push(self.velocities[i]);
                cur.push(self.currents[i]);
                continue;
            }
            let (t0, t1) = (self.times[i - 1], self.times[i]);
            let w = (t - t0) / (t1 - t0);
            pos.push(self.positions[i - 1] + w * (self.positions[i] - self.positions[i - 1]));
            vel.push(self.velocities[i - 1] + w * (self.velocities[i] - self.velocities[i - 1]));
            cur.push(self.currents[i - 1]);
        }
        Trajectory::new(times.to_vec(), pos, vel, cur)
    }

    pub const CSV_HEADER: [&'static str; 4] = ["time_ns", "position_m", "velocity_mps", "J_Apm2"];

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(Self::CSV_HEADER)?;
        for i in 0..self.len() {
            w.write_record([
                self.times[i].to_string(),
                self.positions[i].to_string(),
                self.velocities[i].to_string(),
                self.currents[i].to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Read the CSV form written by [`Trajectory::write_csv`]; `#` lines
    /// are skipped.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().ne(Self::CSV_HEADER.iter().copied()) {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{}`", Self::CSV_HEADER.join(",")),
            });
        }
        let (mut t, mut x, mut v, mut j) = (vec![], vec![], vec![], vec![]);
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            let mut vals = [0.0; 4];
            for (k, slot) in vals.iter_mut().enumerate() {
                let s = rec.get(k).ok_or_else(|| Error::Parse {
                    line,
                    message: "expected 4 columns".into(),
                })?;
                *slot = s.parse().map_err(|e| Error::Parse {
                    line,
                    message: format!("`{s}`: {e}"),
                })?;
            }
            t.push(vals[0]);
            x.push(vals[1]);
            v.push(vals[2]);
            j.push(vals[3]);
        }
        Trajectory::new(t, x, v, j)
    }
}

/// Time integrator used by [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum Integrator {
    /// Closed-form update, exact for piecewise-constant drive.
    #[default]
    Exact,
    /// Explicit Euler with the given maximum step, ns.
    Euler { dt: f64 },
}

/// Sample instants `0, dt, 2dt, …` plus the waveform end, with instants
/// that sit within rounding distance of a breakpoint snapped onto it.
struct SampleClock<'a> {
    sample_dt: f64,
    tol: f64,
    duration: f64,
    n_full: usize,
    i: usize,
    bps: &'a [Segment],
    bp: usize,
    last: f64,
    tail_done: bool,
}

impl<'a> SampleClock<'a> {
    fn new(wf: &'a CurrentWaveform, sample_dt: f64) -> Result<Self> {
        if !(sample_dt > 0.0 && sample_dt.is_finite()) {
            return Err(Error::NonPositiveStep(sample_dt));
        }
        let duration = wf.duration();
        let tol = TIME_TOL * sample_dt;
        Ok(SampleClock {
            sample_dt,
            tol,
            duration,
            n_full: ((duration + tol) / sample_dt).floor() as usize,
            i: 0,
            bps: wf.segments(),
            bp: 0,
            last: 0.0,
            tail_done: false,
        })
    }

    fn breakpoint(&self, k: usize) -> Option<f64> {
        match k.cmp(&self.bps.len()) {
            std::cmp::Ordering::Less => Some(self.bps[k].t_start),
            std::cmp::Ordering::Equal => Some(self.duration),
            std::cmp::Ordering::Greater => None,
        }
    }
}

impl Iterator for SampleClock<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.i > self.n_full {
            if self.tail_done {
                return None;
            }
            self.tail_done = true;
            return (self.duration - self.last > self.tol).then_some(self.duration);
        }
        let mut t = self.i as f64 * self.sample_dt;
        self.i += 1;
        while let Some(bp) = self.breakpoint(self.bp) {
            if bp < t - self.tol {
                self.bp += 1;
            } else {
                if (bp - t).abs() <= self.tol {
                    t = bp;
                }
                break;
            }
        }
        self.last = t;
        Some(t)
    }
}

#[cfg(test)]
fn sample_times(wf: &CurrentWaveform, sample_dt: f64) -> Result<Vec<f64>> {
    Ok(SampleClock::new(wf, sample_dt)?.collect())
}

/// Walk the sample grid, splitting at breakpoints, and call `advance` for
/// each constant-current sub-interval and `record` at each sample.
///
/// Sub-intervals spanning a full sample interval use `sample_dt` itself as
/// the step length so that repeated steps are bit-identical.
pub(crate) fn drive_samples<S>(
    wf: &CurrentWaveform,
    sample_dt: f64,
    state: &mut S,
    mut advance: impl FnMut(&mut S, f64, f64),
    mut record: impl FnMut(&S, f64, f64),
) -> Result<()> {
    let mut times = SampleClock::new(wf, sample_dt)?;
    let segs = wf.segments();
    let tol = TIME_TOL * sample_dt;
    let mut seg = 0usize;
    let mut a = times.next().unwrap_or(0.0);
    record(state, a, segs[0].j);
    for b in times {
        let mut t = a;
        loop {
            while seg + 1 < segs.len() && segs[seg + 1].t_start <= t + tol {
                seg += 1;
            }
            let next_bp = segs
                .get(seg + 1)
                .map(|s| s.t_start)
                .unwrap_or(f64::INFINITY);
            if next_bp < b - tol {
                advance(state, segs[seg].j, next_bp - t);
                t = next_bp;
                continue;
            }
            let h = if t == a && ((b - a) - sample_dt).abs() <= tol {
                sample_dt
            } else {
                b - t
            };
            advance(state, segs[seg].j, h);
            break;
        }
        while seg + 1 < segs.len() && segs[seg + 1].t_start <= b + tol {
            seg += 1;
        }
        record(state, b, segs[seg].j);
        a = b;
    }
    Ok(())
}

fn integrate(
    initial: DwState,
    wf: &CurrentWaveform,
    sample_dt: f64,
    mc: &ModelConstants,
    geom: &TrackGeometry,
    integrator: Integrator,
    record: impl FnMut(&DwState, f64, f64),
) -> Result<()> {
    if let Integrator::Euler { dt } = integrator {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::NonPositiveStep(dt));
        }
    }
    let mut cache: Option<ExactPropagator> = None;
    let mut state = initial;
    drive_samples(
        wf,
        sample_dt,
        &mut state,
        |s, j, h| match integrator {
            Integrator::Exact => {
                let prop = match cache {
                    Some(p) if p.matches(j, h) => p,
                    _ => {
                        let p = ExactPropagator::new(j, h, mc);
                        cache = Some(p);
                        p
                    }
                };
                *s = prop.advance(*s, mc, geom);
            }
            Integrator::Euler { dt } => {
                let n = ((h / dt) * (1.0 - 1e-12)).ceil().max(1.0);
                let sub = h / n;
                for _ in 0..n as usize {
                    *s = euler_unchecked(*s, j, sub, mc, geom);
                }
            }
        },
        record,
    )
}

/// Integrate the wall through `wf`, returning the state at every sample.
pub fn simulate_states(
    initial: DwState,
    wf: &CurrentWaveform,
    sample_dt: f64,
    mc: &ModelConstants,
    geom: &TrackGeometry,
    integrator: Integrator,
) -> Result<Vec<(f64, f64, DwState)>> {
    let mut out = Vec::new();
    integrate(initial, wf, sample_dt, mc, geom, integrator, |s, t, j| out.push((t, j, *s)))?;
    Ok(out)
}

/// Simulate a wall starting from `initial` and sample it every
/// `sample_dt` ns.
pub fn simulate(
    initial: DwState,
    wf: &CurrentWaveform,
    sample_dt: f64,
    mc: &ModelConstants,
    geom: &TrackGeometry,
    integrator: Integrator,
) -> Result<Trajectory> {
    if !(sample_dt > 0.0 && sample_dt.is_finite()) {
        return Err(Error::NonPositiveStep(sample_dt));
    }
    let n = (wf.duration() / sample_dt).min(1e8) as usize + 2;
    let mut t = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut j = Vec::with_capacity(n);
    integrate(initial, wf, sample_dt, mc, geom, integrator, |s, ti, ji| {
        t.push(ti);
        x.push(s.position(geom));
        v.push(s.v);
        j.push(ji);
    })?;
    Trajectory::new(t, x, v, j)
}

/// `|x(end) - x(t_off)|`, m, where `x(t_off)` is the first sample at or
/// after `t_off`.
pub fn drift_distance(traj: &Trajectory, t_off: f64) -> Result<f64> {
    let i = traj.index_at_or_after(t_off)?;
    Ok((traj.positions[traj.len() - 1] - traj.positions[i]).abs())
}

/// Largest `|v|` among samples inside `[t0, t1]` ns.
pub fn max_velocity(traj: &Trajectory, window: (f64, f64)) -> Result<f64> {
    let (t0, t1) = window;
    let tol = TIME_TOL * t1.abs().max(1.0);
    traj.times
        .iter()
        .zip(&traj.velocities)
        .filter(|(&t, _)| t >= t0 - tol && t <= t1 + tol)
        .map(|(_, v)| v.abs())
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
        .ok_or(Error::EmptyWindow(t0, t1))
}

/// One independent simulation for [`simulate_batch`].
#[derive(Debug, Clone)]
pub struct SimJob {
    pub initial: DwState,
    pub waveform: CurrentWaveform,
    pub sample_dt: f64,
    pub constants: ModelConstants,
    pub geometry: TrackGeometry,
    pub integrator: Integrator,
}

impl SimJob {
    pub fn run(&self) -> Result<Trajectory> {
        simulate(
            self.initial,
            &self.waveform,
            self.sample_dt,
            &self.constants,
            &self.geometry,
            self.integrator,
        )
    }
}

/// Run independent simulations on at most `workers` threads. Results come
/// back in job order.
pub fn simulate_batch(jobs: &[SimJob], workers: usize) -> Vec<Result<Trajectory>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build();
    match pool {
        Ok(pool) => pool.install(|| jobs.par_iter().map(SimJob::run).collect()),
        Err(_) => jobs.iter().map(SimJob::run).collect(),
    }
}
