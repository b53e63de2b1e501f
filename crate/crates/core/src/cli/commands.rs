use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::{
    provenance, BenchArgs, Cli, Command, CompareArgs, ConstantsArgs, DriveArgs, ExtractArgs, ExtractParams,
    Failure, FitArgs, Format, IntegratorArg, LayoutArg, SimulateArgs, TablesCommand, TrackArgs,
};
use crate::baselines::bench::{bench, pulse_train, BenchModel, BenchOptions, Workload};
use crate::baselines::{calibrate, error_report, simulate_baseline, Calibration, ErrorReport};
use crate::dynamics::{DwState, ModelConstants, TrackGeometry};
use crate::electrical::{DeviceIntegrator, DwMtjDevice, ElectricalParams};
use crate::error::Error;
use crate::fitting::{
    extract_features, extract_position, extract_velocity, fit_corner, FitOptions, FittedCorner, MagLayout,
    MagTable, Motion, TrialFeatures, TrialMeta,
};
use crate::tables::{ConstantName, CornerConstants, CornerKey, TableSet};
use crate::waveform::{simulate, CurrentWaveform, Integrator, Trajectory};

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

pub(super) fn execute(cli: &Cli) -> Outcome {
    let ctx = Ctx {
        out_dir: cli.output_dir.clone(),
        format: cli.format,
        header: provenance(cli),
        pool: rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs.unwrap_or(0))
            .build()
            .map_err(runtime)?,
    };
    if cli.jobs == Some(0) {
        return Err(usage("--jobs must be at least 1"));
    }
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| runtime(Error::io(&ctx.out_dir, e)))?;
    match &cli.command {
        Command::Simulate(a) => simulate_cmd(&ctx, a),
        Command::Extract(a) => extract_cmd(&ctx, a),
        Command::Fit(a) => fit_cmd(&ctx, a),
        Command::Tables(t) => tables_cmd(&ctx, t),
        Command::Compare(a) => compare_cmd(&ctx, a),
        Command::Bench(a) => bench_cmd(&ctx, a),
    }
}

struct Ctx {
    out_dir: PathBuf,
    format: Format,
    header: String,
    pool: rayon::ThreadPool,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn create(&self, path: &Path) -> Outcome<BufWriter<File>> {
        File::create(path)
            .map(BufWriter::new)
            .map_err(|e| runtime(Error::io(path, e)))
    }

    /// CSV with a `#` provenance line.
    fn write_csv_with(&self, path: &Path, body: impl FnOnce(&mut Vec<u8>) -> crate::Result<()>) -> Outcome {
        let mut buf = format!("# {}\n", self.header).into_bytes();
        body(&mut buf).map_err(runtime)?;
        let mut f = self.create(path)?;
        f.write_all(&buf)
            .and_then(|_| f.flush())
            .map_err(|e| runtime(Error::io(path, e)))
    }

    /// JSON object `{ "provenance": …, "<key>": value }`.
    fn write_json<T: Serialize>(&self, path: &Path, key: &str, value: &T) -> Outcome {
        let mut map = serde_json::Map::new();
        map.insert("provenance".into(), self.header.clone().into());
        map.insert(key.into(), serde_json::to_value(value).map_err(runtime)?);
        let mut f = self.create(path)?;
        serde_json::to_writer_pretty(&mut f, &map).map_err(runtime)?;
        writeln!(f).and_then(|_| f.flush()).map_err(|e| runtime(Error::io(path, e)))
    }
}

fn load_tables(dir: Option<&Path>) -> Outcome<TableSet> {
    match dir {
        Some(d) => TableSet::load_dir(d).map_err(usage),
        None => Ok(TableSet::bundled()),
    }
}

fn resolve_constants(a: &ConstantsArgs) -> Outcome<(ModelConstants, Option<CornerKey>)> {
    let (mut mc, corner) = match (&a.corner, &a.constants) {
        (Some(k), None) => {
            let set = load_tables(a.tables.as_deref())?;
            let hit = set.lookup(k, a.lookup.into()).map_err(usage)?;
            (hit.constants.model_constants().map_err(usage)?, Some(*k))
        }
        (None, Some(c)) => {
            let c = c.0;
            (ModelConstants::new([c[0], c[1], c[2], c[3]], c[4], c[5]).map_err(usage)?, None)
        }
        (None, None) => return Err(usage("one of --corner or --constants is required")),
        (Some(_), Some(_)) => return Err(usage("--corner and --constants are exclusive")),
    };
    if a.p1.is_some() || a.p2.is_some() {
        mc = mc
            .with_pinning(a.p1.unwrap_or(mc.p1()), a.p2.unwrap_or(mc.p2()))
            .map_err(usage)?;
    }
    if let Some(cr) = a.restitution {
        mc = mc.with_restitution(cr).map_err(usage)?;
    }
    Ok((mc, corner))
}

fn geometry(t: &TrackArgs, corner: Option<&CornerKey>) -> Outcome<TrackGeometry> {
    let width = t.width_nm.or(corner.map(|k| k.w)).unwrap_or(100.0);
    TrackGeometry::new(t.length_nm * 1e-9, width * 1e-9, t.thickness_nm * 1e-9).map_err(usage)
}

/// Named waveforms: the pulse train (if any) then each waveform file.
fn waveforms(d: &DriveArgs) -> Outcome<Vec<(String, CurrentWaveform)>> {
    let mut out = Vec::new();
    if !d.pulses.is_empty() {
        let mut pairs = Vec::new();
        let mut t = 0.0;
        for p in &d.pulses {
            pairs.push((t, p.j));
            t += p.tau;
        }
        if d.settle > 0.0 {
            pairs.push((t, 0.0));
        }
        let wf = CurrentWaveform::from_pairs(&pairs, t + d.settle).map_err(usage)?;
        out.push(("pulse".to_string(), wf));
    }
    for path in &d.waveforms {
        let f = File::open(path).map_err(|e| usage(Error::io(path, e)))?;
        let wf = CurrentWaveform::read_csv(f, d.duration)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("waveform")
            .to_string();
        out.push((stem, wf));
    }
    if out.is_empty() {
        return Err(usage("no drive given: use --pulse or --waveform"));
    }
    Ok(out)
}

fn write_trajectory(ctx: &Ctx, name: &str, tr: &Trajectory) -> Outcome<PathBuf> {
    let path = ctx.path(&format!("{name}.trajectory.{}", ctx.format.ext()));
    match ctx.format {
        Format::Csv => ctx.write_csv_with(&path, |buf| tr.write_csv(buf))?,
        Format::Json => ctx.write_json(&path, "trajectory", tr)?,
    }
    Ok(path)
}

fn simulate_cmd(ctx: &Ctx, a: &SimulateArgs) -> Outcome {
    let (mc, corner) = resolve_constants(&a.constants)?;
    let geom = geometry(&a.track, corner.as_ref())?;
    let initial = match a.start_nm {
        Some(x) => DwState::new(x * 1e-9, 0.0, &geom).map_err(usage)?,
        None => DwState::centered(),
    };
    if let Some(drive) = a.mtj {
        let duration = a
            .drive
            .duration
            .ok_or_else(|| usage("--mtj needs --duration"))?;
        let ep = ElectricalParams {
            rp: a.rp,
            rap: a.rap,
            ..ElectricalParams::reference()
        };
        let mut dev = DwMtjDevice::new(initial, mc, geom, ep, DeviceIntegrator::Exact).map_err(usage)?;
        let every = ((a.drive.sample_dt / a.device_dt).round() as usize).max(1);
        let samples = dev
            .run(&[(0.0, drive)], duration, a.device_dt, every)
            .map_err(runtime)?;
        let path = ctx.path(&format!("device.{}", ctx.format.ext()));
        match ctx.format {
            Format::Csv => ctx.write_csv_with(&path, |buf| {
                let mut w = csv::Writer::from_writer(buf);
                w.write_record(["time_ns", "position_m", "velocity_mps", "J_Apm2", "i_track_A", "r_mtj_ohm"])?;
                for s in &samples {
                    w.write_record([s.t, s.x, s.v, s.j, s.i_track, s.r_mtj].map(|v| v.to_string()))?;
                }
                w.flush().map_err(|e| Error::io("<csv>", e))?;
                Ok(())
            })?,
            Format::Json => ctx.write_json(&path, "device", &samples)?,
        }
        println!("{}", path.display());
        return Ok(());
    }
    let integrator = match a.integrator {
        IntegratorArg::Exact => Integrator::Exact,
        IntegratorArg::Euler => Integrator::Euler { dt: a.euler_dt },
    };
    let wfs = waveforms(&a.drive)?;
    let results: Vec<_> = ctx.pool.install(|| {
        wfs.par_iter()
            .map(|(_, wf)| simulate(initial, wf, a.drive.sample_dt, &mc, &geom, integrator))
            .collect()
    });
    for ((name, _), tr) in wfs.iter().zip(results) {
        let tr = tr.map_err(runtime)?;
        let path = write_trajectory(ctx, name, &tr)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn expand_inputs(patterns: &[String]) -> Outcome<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in patterns {
        let paths = glob::glob(p).map_err(|e| usage(format!("bad pattern `{p}`: {e}")))?;
        for entry in paths {
            files.push(entry.map_err(runtime)?);
        }
    }
    files.sort();
    files.dedup();
    if files.is_empty() {
        return Err(usage(format!("no input matches {}", patterns.join(" "))));
    }
    Ok(files)
}

fn layout(l: LayoutArg) -> MagLayout {
    match l {
        LayoutArg::Auto => MagLayout::Auto,
        LayoutArg::Shift => MagLayout::ShiftAndSpeed,
        LayoutArg::Profile => MagLayout::ProfileOnly,
    }
}

/// The name carrying a trial's tokens: the `.out` folder for `table.txt`,
/// otherwise the file name without `.txt`.
fn trial_name(path: &Path) -> String {
    let file = path.file_name().and_then(|s| s.to_str()).unwrap_or("trial");
    let name = if file.eq_ignore_ascii_case("table.txt") {
        path.parent()
            .and_then(|p| p.file_name())
            .and_then(|s| s.to_str())
            .unwrap_or(file)
    } else {
        file
    };
    name.strip_suffix(".txt").unwrap_or(name).to_string()
}

fn extract_motion(path: &Path, p: &ExtractParams) -> crate::Result<Motion> {
    let table = MagTable::read(path, layout(p.layout), p.spacing)?;
    let positions = extract_position(&table)?;
    let velocities = extract_velocity(&positions, &table.times, p.lag, p.smooth)?;
    Ok(Motion {
        times: table.times,
        positions,
        velocities,
    })
}

fn extract_cmd(ctx: &Ctx, a: &ExtractArgs) -> Outcome {
    let files = expand_inputs(&a.inputs)?;
    let results: Vec<_> = ctx
        .pool
        .install(|| files.par_iter().map(|f| extract_motion(f, &a.params)).collect());
    let mut failed = 0;
    for (f, r) in files.iter().zip(results) {
        match r {
            Ok(m) => {
                let path = ctx.path(&format!("{}.motion.csv", trial_name(f)));
                ctx.write_csv_with(&path, |buf| m.write_csv(buf))?;
                println!("{}", path.display());
            }
            Err(e) => {
                failed += 1;
                eprintln!("{}: {e}", f.display());
            }
        }
    }
    if failed > 0 {
        return Err(runtime(format!("{failed} of {} file(s) failed", files.len())));
    }
    Ok(())
}

/// Features of every trial in one corner folder, and the folder's corner.
fn folder_trials(dir: &Path, p: &ExtractParams) -> crate::Result<(CornerKey, Vec<TrialFeatures>)> {
    let pattern = |tail: &str| dir.join(tail).to_string_lossy().into_owned();
    let collect = |pat: String| -> Vec<PathBuf> {
        let mut v: Vec<PathBuf> = glob::glob(&pat).map(|g| g.flatten().collect()).unwrap_or_default();
        v.sort();
        v
    };
    let motions = collect(pattern("*.motion.csv"));
    let mut trials: Vec<(String, Motion)> = Vec::new();
    if motions.is_empty() {
        let mut tables = collect(pattern("*/table.txt"));
        tables.extend(collect(pattern("*.txt")));
        for t in tables {
            trials.push((trial_name(&t), extract_motion(&t, p)?));
        }
    } else {
        for m in motions {
            let f = File::open(&m).map_err(|e| Error::io(&m, e))?;
            let name = m.file_name().and_then(|s| s.to_str()).unwrap_or_default();
            let name = name.strip_suffix(".motion.csv").unwrap_or(name).to_string();
            trials.push((name, Motion::read_csv(f)?));
        }
    }
    if trials.is_empty() {
        return Err(Error::Fit(format!("{}: no trials found", dir.display())));
    }
    let mut corner: Option<CornerKey> = None;
    let mut features = Vec::new();
    for (name, m) in &trials {
        let meta = TrialMeta::from_name(name)?;
        let key = meta
            .corner
            .ok_or_else(|| Error::Metadata(format!("{name}: name does not identify a corner")))?;
        match corner {
            None => corner = Some(key),
            Some(c) if c != key => {
                return Err(Error::Metadata(format!(
                    "{}: mixed corners ({c} and {key})",
                    dir.display()
                )))
            }
            _ => {}
        }
        match extract_features(&m.positions, &m.velocities, &m.times, &meta) {
            Ok(f) => features.push(f),
            Err(e) => eprintln!("warning: {name}: {e}; trial skipped"),
        }
    }
    Ok((corner.expect("at least one trial"), features))
}

fn fit_cmd(ctx: &Ctx, a: &FitArgs) -> Outcome {
    let opts = FitOptions { j_cap: a.j_cap };
    let results: Vec<_> = ctx.pool.install(|| {
        a.folders
            .par_iter()
            .map(|d| {
                let (key, feats) = folder_trials(d, &a.params)?;
                let mut fit = fit_corner(&feats, &opts)?;
                fit.corner = Some(key);
                Ok::<_, Error>(fit)
            })
            .collect()
    });
    let mut fits: Vec<FittedCorner> = Vec::new();
    let mut failures = Vec::new();
    for (d, r) in a.folders.iter().zip(results) {
        match r {
            Ok(f) => {
                eprintln!(
                    "{}: {} trial(s) used, d1 = {:.6}, d2 = {:.6e}{}",
                    f.corner.map(|k| k.to_string()).unwrap_or_default(),
                    f.diagnostics.n_used,
                    f.d1(),
                    f.d2,
                    if f.diagnostics.notes.is_empty() {
                        String::new()
                    } else {
                        format!(" ({})", f.diagnostics.notes.join("; "))
                    }
                );
                fits.push(f);
            }
            Err(Error::Fit(m)) => eprintln!("warning: {}: corner skipped: {m}", d.display()),
            Err(e) => failures.push(format!("{}: {e}", d.display())),
        }
    }
    if !fits.is_empty() {
        let mut rows = BTreeMap::new();
        for f in &fits {
            let key = f.corner.expect("set above");
            if rows.insert(key, CornerConstants::from(f)).is_some() {
                failures.push(format!("corner {key} appears in more than one folder"));
            }
        }
        let set = TableSet::from_corners(rows).map_err(runtime)?;
        set.write_dir(&ctx.out_dir).map_err(runtime)?;
        ctx.write_json(&ctx.path("fits.json"), "corners", &fits)?;
        println!("{} corner(s) written to {}", set.len(), ctx.out_dir.display());
    }
    for f in &failures {
        eprintln!("error: {f}");
    }
    if !failures.is_empty() {
        return Err(runtime(format!("{} corner(s) failed", failures.len())));
    }
    if fits.is_empty() {
        return Err(runtime("no corner could be fitted"));
    }
    Ok(())
}

#[derive(Serialize)]
struct TableRow {
    corner: CornerKey,
    c: [f64; 4],
    drift_const: f64,
    d2: f64,
}

fn print_rows(format: Format, rows: &[TableRow]) -> Outcome {
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(rows).map_err(runtime)?);
        }
        Format::Csv => {
            let labels: Vec<&str> = ConstantName::ALL.iter().map(|n| n.label()).collect();
            println!("Aex,Banis,alpha,Msat,W,{}", labels.join(","));
            for r in rows {
                let k = r.corner.coords();
                let v = [r.c[0], r.c[1], r.c[2], r.c[3], r.drift_const, r.d2];
                let all: Vec<String> = k.iter().chain(v.iter()).map(|x| x.to_string()).collect();
                println!("{}", all.join(","));
            }
        }
    }
    Ok(())
}

fn tables_cmd(ctx: &Ctx, t: &TablesCommand) -> Outcome {
    match t {
        TablesCommand::Inspect { tables } => {
            let set = load_tables(tables.as_deref())?;
            let rows: Vec<TableRow> = set
                .corners()
                .map(|(k, v)| TableRow {
                    corner: *k,
                    c: v.c,
                    drift_const: v.drift_const,
                    d2: v.d2,
                })
                .collect();
            print_rows(ctx.format, &rows)
        }
        TablesCommand::Merge { dirs } => {
            let mut merged: Option<TableSet> = None;
            for d in dirs {
                let s = TableSet::load_dir(d).map_err(usage)?;
                merged = Some(match merged {
                    None => s,
                    Some(m) => m.merge(&s).map_err(runtime)?,
                });
            }
            let merged = merged.expect("clap requires one dir");
            merged.write_dir(&ctx.out_dir).map_err(runtime)?;
            println!("{} corner(s) written to {}", merged.len(), ctx.out_dir.display());
            Ok(())
        }
        TablesCommand::Lookup { corner, mode, tables } => {
            let set = load_tables(tables.as_deref())?;
            let hit = set.lookup(corner, (*mode).into()).map_err(usage)?;
            let k = hit.constants.model_constants().map_err(runtime)?.k();
            match ctx.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out<'a> {
                        lookup: &'a crate::tables::Lookup,
                        k: [f64; 5],
                    }
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&Out { lookup: &hit, k }).map_err(runtime)?
                    );
                }
                Format::Csv => {
                    let c = hit.constants;
                    println!("name,value");
                    for (n, v) in ConstantName::ALL
                        .iter()
                        .zip([c.c[0], c.c[1], c.c[2], c.c[3], c.drift_const, c.d2])
                    {
                        println!("{},{v}", n.label());
                    }
                    for (i, v) in k.iter().enumerate() {
                        println!("k{i},{v}");
                    }
                    if let Some(src) = hit.corner {
                        println!("# source corner {src}");
                    }
                    if !hit.clamped.is_empty() {
                        println!("# clamped: {}", hit.clamped.join(" "));
                    }
                }
            }
            Ok(())
        }
    }
}

/// Start of the trailing zero-current segment, or the end of the record.
fn default_pulse_end(wf: &CurrentWaveform) -> f64 {
    match wf.segments().last() {
        Some(s) if s.j == 0.0 => s.t_start,
        _ => wf.duration(),
    }
}

#[derive(Serialize)]
struct CompareRow {
    model: String,
    reference: &'static str,
    waveform: String,
    #[serde(flatten)]
    report: ErrorReport,
}

const REFERENCE_LABEL: &str = "kinematic (model reference; no micromagnetics)";

fn compare_cmd(ctx: &Ctx, a: &CompareArgs) -> Outcome {
    let (mc, corner) = resolve_constants(&a.constants)?;
    let geom = geometry(&a.track, corner.as_ref())?;
    let cal = Calibration {
        j_ref: a.j_ref,
        ..Calibration::default()
    };
    let all = calibrate(&mc, &cal).map_err(usage)?;
    let models: Vec<_> = if a.models.is_empty() {
        all
    } else {
        let mut v = Vec::new();
        for name in &a.models {
            let m = all
                .iter()
                .find(|m| m.id() == name)
                .ok_or_else(|| usage(format!("unknown model `{name}`")))?;
            v.push(*m);
        }
        v
    };
    let wfs = waveforms(&a.drive)?;
    let mut rows = Vec::new();
    for (name, wf) in &wfs {
        let reference = simulate(DwState::centered(), wf, a.drive.sample_dt, &mc, &geom, Integrator::Exact)
            .map_err(runtime)?;
        let pulse_end = a.pulse_end.unwrap_or_else(|| default_pulse_end(wf));
        let reports: Vec<_> = ctx.pool.install(|| {
            models
                .par_iter()
                .map(|m| {
                    let tr = simulate_baseline(m, wf, a.drive.sample_dt, &geom)?;
                    error_report(&tr, &reference, pulse_end)
                })
                .collect()
        });
        for (m, r) in models.iter().zip(reports) {
            rows.push(CompareRow {
                model: m.id().into(),
                reference: REFERENCE_LABEL,
                waveform: name.clone(),
                report: r.map_err(runtime)?,
            });
        }
    }
    let path = ctx.path(&format!("compare.{}", ctx.format.ext()));
    match ctx.format {
        Format::Csv => ctx.write_csv_with(&path, |buf| {
            let mut w = csv::Writer::from_writer(buf);
            let mut header = vec!["model", "reference", "waveform"];
            header.extend(ErrorReport::CSV_HEADER);
            w.write_record(&header)?;
            for r in &rows {
                let mut rec = vec![r.model.clone(), r.reference.to_string(), r.waveform.clone()];
                rec.extend(r.report.values().iter().map(|v| v.to_string()));
                w.write_record(&rec)?;
            }
            w.flush().map_err(|e| Error::io("<csv>", e))?;
            Ok(())
        })?,
        Format::Json => ctx.write_json(&path, "comparisons", &rows)?,
    }
    println!("reference: {REFERENCE_LABEL}");
    println!("{:<22} {:>14} {:>14} {:>12} {:>12}", "model", "disp_err", "vmax_err", "rms_rise_nm", "rms_stop_nm");
    for r in &rows {
        println!(
            "{:<22} {:>14.4e} {:>14.4e} {:>12.4} {:>12.4}",
            r.model,
            r.report.final_displacement_err,
            r.report.max_velocity_err,
            r.report.rms_rise * 1e9,
            r.report.rms_stop * 1e9
        );
    }
    println!("{}", path.display());
    Ok(())
}

fn bench_cmd(ctx: &Ctx, a: &BenchArgs) -> Outcome {
    let (mc, _) = match (&a.constants.corner, &a.constants.constants) {
        (None, None) => {
            let mut c = a.constants.clone();
            c.corner = Some(CornerKey::new(11.0, 20.0, 0.01, 7.95e5, 100.0).map_err(usage)?);
            resolve_constants(&c)?
        }
        _ => resolve_constants(&a.constants)?,
    };
    if !(a.pulse_width > 0.0) {
        return Err(usage("--pulse-width must be positive"));
    }
    let n_pulses = ((a.duration / (a.pulse_width + a.gap)).round() as usize).max(1);
    let wf = pulse_train(&a.amplitudes, n_pulses, a.pulse_width, a.gap).map_err(usage)?;
    let geom = TrackGeometry::new(a.length_nm * 1e-9, 100e-9, 1.2e-9).map_err(usage)?;
    let workload = Workload {
        waveforms: vec![wf],
        sample_dt: a.dt,
        geometry: geom,
    };
    let cal = Calibration {
        dt: a.dt,
        ..Calibration::default()
    };
    let mut all = vec![BenchModel::Kinematic {
        constants: mc,
        integrator: Integrator::Exact,
    }];
    all.extend(
        calibrate(&mc, &cal)
            .map_err(usage)?
            .into_iter()
            .map(|model| BenchModel::Baseline { model }),
    );
    let models: Vec<BenchModel> = if a.models.is_empty() {
        all
    } else {
        let mut v = Vec::new();
        for name in &a.models {
            let m = all
                .iter()
                .find(|m| &m.id() == name)
                .ok_or_else(|| usage(format!("unknown model `{name}`")))?;
            v.push(m.clone());
        }
        v
    };
    let report = bench(
        &models,
        &workload,
        &BenchOptions {
            repetitions: a.reps,
            warmup: a.warmup,
        },
    )
    .map_err(usage)?;
    let json = ctx.path("bench.json");
    ctx.write_json(&json, "bench", &report)?;
    let csv = ctx.path("bench.csv");
    ctx.write_csv_with(&csv, |buf| report.write_csv(buf))?;
    println!("{} ({})", report.machine.cpu, report.workload);
    for r in &report.results {
        println!(
            "{:<22} {:>12.4e} s/ns  speedup {:>8.2}  trig/step {}  deterministic {}",
            r.model, r.seconds_per_ns.median, r.speedup, r.trig_calls_per_step, r.deterministic
        );
    }
    println!("{}\n{}", json.display(), csv.display());
    Ok(())
}
