//! Wall-clock benchmark of wall models on a fixed workload.
//!
//! Models are timed one after another on the calling thread. Each
//! repetition re-simulates every waveform of the workload; the trajectories
//! of every repetition are hashed and compared to catch nondeterminism.

use std::io::Write;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{simulate_baseline, BaselineModel};
use crate::dynamics::{DwState, ModelConstants, TrackGeometry};
use crate::error::{Error, Result};
use crate::waveform::{simulate, CurrentWaveform, Integrator, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BenchModel {
    Kinematic {
        constants: ModelConstants,
        integrator: Integrator,
    },
    Baseline { model: BaselineModel },
}

impl BenchModel {
    pub fn id(&self) -> String {
        match self {
            BenchModel::Kinematic {
                integrator: Integrator::Exact,
                ..
            } => "kinematic_exact".into(),
            BenchModel::Kinematic {
                integrator: Integrator::Euler { .. },
                ..
            } => "kinematic_euler".into(),
            BenchModel::Baseline { model } => model.id().into(),
        }
    }

    pub fn trig_calls_per_step(&self) -> usize {
        match self {
            BenchModel::Kinematic { .. } => 0,
            BenchModel::Baseline { model } => model.trig_calls_per_step(),
        }
    }

    pub fn run(&self, wf: &CurrentWaveform, sample_dt: f64, geom: &TrackGeometry) -> Result<Trajectory> {
        match self {
            BenchModel::Kinematic {
                constants,
                integrator,
            } => simulate(DwState::centered(), wf, sample_dt, constants, geom, *integrator),
            BenchModel::Baseline { model } => simulate_baseline(model, wf, sample_dt, geom),
        }
    }
}

/// Waveforms simulated in one repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub waveforms: Vec<CurrentWaveform>,
    /// ns
    pub sample_dt: f64,
    pub geometry: TrackGeometry,
}

impl Workload {
    /// Total simulated time per repetition, ns.
    pub fn simulated_ns(&self) -> f64 {
        self.waveforms.iter().map(|w| w.duration()).sum()
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("workload serializes");
        hex(&Sha256::digest(&json))
    }

    pub fn description(&self) -> String {
        let segs: usize = self.waveforms.iter().map(|w| w.segments().len()).sum();
        format!(
            "{} waveform(s), {} segment(s), {} ns simulated, sample_dt {} ns, track {} m",
            self.waveforms.len(),
            segs,
            self.simulated_ns(),
            self.sample_dt,
            self.geometry.length()
        )
    }

    /// The same workload repeated `n` times.
    pub fn repeated(&self, n: usize) -> Workload {
        Workload {
            waveforms: (0..n).flat_map(|_| self.waveforms.iter().cloned()).collect(),
            ..self.clone()
        }
    }
}

/// Alternating-polarity pulse train: `n_pulses` pulses of width `width` ns
/// with amplitudes cycling through `amplitudes`, each followed by `gap` ns
/// at zero drive.
pub fn pulse_train(amplitudes: &[f64], n_pulses: usize, width: f64, gap: f64) -> Result<CurrentWaveform> {
    if amplitudes.is_empty() || n_pulses == 0 {
        return Err(Error::InvalidWaveform("pulse train needs amplitudes and pulses".into()));
    }
    let mut pairs = Vec::with_capacity(2 * n_pulses);
    for i in 0..n_pulses {
        let t0 = i as f64 * (width + gap);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        pairs.push((t0, sign * amplitudes[i % amplitudes.len()]));
        pairs.push((t0 + width, 0.0));
    }
    CurrentWaveform::from_pairs(&pairs, n_pulses as f64 * (width + gap))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchOptions {
    pub repetitions: usize,
    pub warmup: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            repetitions: 7,
            warmup: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub median: f64,
    /// Median absolute deviation.
    pub mad: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(samples: &[f64]) -> Option<Summary> {
        if samples.is_empty() {
            return None;
        }
        let median = median(samples);
        let dev: Vec<f64> = samples.iter().map(|s| (s - median).abs()).collect();
        Some(Summary {
            median,
            mad: median_of(dev),
            min: samples.iter().cloned().fold(f64::INFINITY, f64::min),
            max: samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

fn median(s: &[f64]) -> f64 {
    median_of(s.to_vec())
}

fn median_of(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub model: String,
    /// Wall-clock seconds per simulated ns.
    pub seconds_per_ns: Summary,
    /// Median time of the slowest model divided by this model's.
    pub speedup: f64,
    /// Trajectories were bit-identical across repetitions.
    pub deterministic: bool,
    pub trig_calls_per_step: usize,
    pub trajectory_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineInfo {
    pub cpu: String,
    pub os: String,
    pub arch: String,
    pub logical_cpus: usize,
    /// Smallest nonzero step of the monotonic clock observed, s.
    pub timer_resolution_s: f64,
}

impl MachineInfo {
    pub fn detect() -> Self {
        let cpu = std::fs::read_to_string("/proc/cpuinfo")
            .ok()
            .and_then(|s| {
                s.lines()
                    .find(|l| l.starts_with("model name"))
                    .and_then(|l| l.split(':').nth(1))
                    .map(|v| v.trim().to_string())
            })
            .unwrap_or_else(|| "unknown".into());
        MachineInfo {
            cpu,
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            logical_cpus: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            timer_resolution_s: timer_resolution().as_secs_f64(),
        }
    }
}

fn timer_resolution() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..200 {
        let a = Instant::now();
        let mut b = Instant::now();
        while b == a {
            b = Instant::now();
        }
        best = best.min(b - a);
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub machine: MachineInfo,
    pub workload_hash: String,
    pub workload: String,
    pub repetitions: usize,
    pub results: Vec<BenchResult>,
    pub notes: Vec<String>,
}

impl BenchReport {
    pub fn result(&self, model: &str) -> Option<&BenchResult> {
        self.results.iter().find(|r| r.model == model)
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub const CSV_HEADER: [&'static str; 9] = [
        "model",
        "median_s_per_ns",
        "mad_s_per_ns",
        "min_s_per_ns",
        "max_s_per_ns",
        "speedup",
        "deterministic",
        "trig_calls_per_step",
        "workload_hash",
    ];

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(Self::CSV_HEADER)?;
        for r in &self.results {
            let s = r.seconds_per_ns;
            w.write_record([
                r.model.clone(),
                format!("{:e}", s.median),
                format!("{:e}", s.mad),
                format!("{:e}", s.min),
                format!("{:e}", s.max),
                format!("{}", r.speedup),
                r.deterministic.to_string(),
                r.trig_calls_per_step.to_string(),
                self.workload_hash.clone(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

fn hash_trajectory(h: &mut Sha256, tr: &Trajectory) {
    for col in [&tr.times, &tr.positions, &tr.velocities, &tr.currents] {
        for v in col.iter() {
            h.update(v.to_bits().to_le_bytes());
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Simulated seconds of one pass over the workload and the hash of its
/// trajectories. Each trajectory is timed alone, hashed outside the timer
/// and dropped, so the allocator sees the same pattern at any workload size.
fn run_workload(model: &BenchModel, wl: &Workload) -> Result<(f64, String)> {
    let mut h = Sha256::new();
    let mut elapsed = 0.0;
    for wf in &wl.waveforms {
        let start = Instant::now();
        let tr = std::hint::black_box(model.run(wf, wl.sample_dt, &wl.geometry)?);
        elapsed += start.elapsed().as_secs_f64();
        hash_trajectory(&mut h, &tr);
    }
    Ok((elapsed, hex(&h.finalize())))
}

/// Time every model on `workload`.
pub fn bench(models: &[BenchModel], workload: &Workload, opts: &BenchOptions) -> Result<BenchReport> {
    if workload.waveforms.is_empty() {
        return Err(Error::Bench("empty workload".into()));
    }
    if models.is_empty() {
        return Err(Error::Bench("no models".into()));
    }
    if opts.repetitions == 0 {
        return Err(Error::Bench("at least one repetition is required".into()));
    }
    let sim_ns = workload.simulated_ns();
    for model in models {
        for _ in 0..opts.warmup {
            std::hint::black_box(run_workload(model, workload)?);
        }
    }
    // repetitions are interleaved across models so slow spells on a busy
    // machine hit every model alike
    let mut times = vec![Vec::with_capacity(opts.repetitions); models.len()];
    let mut hashes: Vec<Option<String>> = vec![None; models.len()];
    let mut deterministic = vec![true; models.len()];
    for _ in 0..opts.repetitions {
        for (m, model) in models.iter().enumerate() {
            let (elapsed, h) = run_workload(model, workload)?;
            if !(elapsed > 0.0) {
                return Err(Error::Bench(format!("{}: zero elapsed time", model.id())));
            }
            times[m].push(elapsed / sim_ns);
            match &hashes[m] {
                None => hashes[m] = Some(h),
                Some(f) => deterministic[m] &= *f == h,
            }
        }
    }
    let mut results: Vec<BenchResult> = models
        .iter()
        .enumerate()
        .map(|(m, model)| BenchResult {
            model: model.id(),
            seconds_per_ns: Summary::of(&times[m]).expect("repetitions > 0"),
            speedup: 0.0,
            deterministic: deterministic[m],
            trig_calls_per_step: model.trig_calls_per_step(),
            trajectory_hash: hashes[m].take().unwrap_or_default(),
        })
        .collect();
    let slowest = results
        .iter()
        .map(|r| r.seconds_per_ns.median)
        .fold(f64::NEG_INFINITY, f64::max);
    for r in &mut results {
        r.speedup = slowest / r.seconds_per_ns.median;
    }
    Ok(BenchReport {
        machine: MachineInfo::detect(),
        workload_hash: workload.hash(),
        workload: workload.description(),
        repetitions: opts.repetitions,
        results,
        notes: vec![
            "speedups are relative to the slowest model in this run".into(),
            "the kinematic model is the accuracy reference; no micromagnetic solver is timed".into(),
            "speedups depend on this machine and workload".into(),
        ],
    })
}
