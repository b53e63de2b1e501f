//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`.

mod common;

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;
use kinematic_dw::baselines::bench::{bench, pulse_train, BenchModel, BenchOptions, Workload};
use kinematic_dw::baselines::{calibrate, error_report, simulate_baseline, BaselineModel, Calibration, CcParams};
use kinematic_dw::dynamics::{
    accel_current, apply_bounce, step_euler, step_exact, terminal_velocity, DwState, ModelConstants,
    TrackGeometry,
};
use kinematic_dw::electrical::{mtj_resistance_fractional, solve_node, ElectricalParams, TerminalDrive};
use kinematic_dw::fitting::{
    derive_k, extract_features, extract_position, extract_velocity, fit_corner, FitOptions, MagLayout, MagTable,
    TrialFeatures, TrialMeta,
};
use kinematic_dw::tables::{grid_corners, ConstantName, ConstantTable, CornerConstants, TableSet};
use kinematic_dw::waveform::{drift_distance, simulate, simulate_states, CurrentWaveform, Integrator};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn long_track() -> TrackGeometry {
    TrackGeometry::new(1e-2, 100e-9, 1.2e-9).unwrap()
}

fn integrator_parity() -> Check {
    let mc = round_trip_constants();
    let geom = long_track();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for j in drive_grid() {
        let wf = CurrentWaveform::pulse(j, 100.0, 100.0).map_err(|e| e.to_string())?;
        let exact = simulate(DwState::centered(), &wf, 0.01, &mc, &geom, Integrator::Exact).map_err(|e| e.to_string())?;
        let euler = simulate(DwState::centered(), &wf, 0.01, &mc, &geom, Integrator::Euler { dt: 1e-3 })
            .map_err(|e| e.to_string())?;
        worst = worst.max(rel(euler.displacement(), exact.displacement()));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst < 1e-3, || format!("worst final-position disagreement {worst:.3e} >= 1e-3"))?;
    ensure(secs < 5.0, || format!("took {secs:.2} s >= 5 s"))?;
    Ok(format!("worst relative difference {worst:.2e}, {secs:.2} s"))
}

fn random_constants(rng: &mut StdRng) -> ModelConstants {
    let c = [
        rng.random_range(0.0..1.0),
        rng.random_range(1e-12..1e-10),
        rng.random_range(0.0..1e-21),
        rng.random_range(0.0..1e-33),
    ];
    ModelConstants::new(c, rng.random_range(0.05..0.5), rng.random_range(0.0..1e-12)).unwrap()
}

fn terminal_velocity_law() -> Check {
    let mut rng = StdRng::seed_from_u64(2);
    let geom = TrackGeometry::new(1.0, 100e-9, 1.2e-9).unwrap();
    let (mut worst_v, mut worst_k) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let mc = random_constants(&mut rng);
        for _ in 0..10 {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let j = sign * 8e9 * 100f64.powf(rng.random_range(0.0..1.0));
            let rate = mc.d1() + mc.d2() * j.abs();
            let t_end = 10.0 / rate;
            let wf = CurrentWaveform::constant(j, t_end).map_err(|e| e.to_string())?;
            let tr = simulate(DwState::centered(), &wf, t_end / 1000.0, &mc, &geom, Integrator::Exact)
                .map_err(|e| e.to_string())?;
            let v_inf = accel_current(j, &mc) / rate;
            worst_v = worst_v.max(rel(*tr.velocities.last().unwrap(), v_inf));
            let a = j.abs();
            let c = mc.c();
            let cubic = j.signum() * (c[0] + c[1] * a + c[2] * a * a + c[3] * a * a * a);
            let tv = terminal_velocity(j, &mc).value().ok_or("unexpectedly pinned")?;
            worst_k = worst_k.max(rel(tv, cubic));
        }
    }
    ensure(worst_v < 1e-4, || format!("velocity at 10 time constants off by {worst_v:.3e}"))?;
    ensure(worst_k < 1e-12, || format!("terminal velocity vs cubic off by {worst_k:.3e}"))?;
    Ok(format!("v(10 tau) within {worst_v:.2e}, k-identity within {worst_k:.2e}"))
}

/// Simulated trials at the round-trip constants, reduced to features.
fn round_trip_features() -> Result<Vec<TrialFeatures>, String> {
    let mc = round_trip_constants();
    let geom = long_track();
    let mut out = Vec::new();
    for j in drive_grid() {
        let wf = CurrentWaveform::pulse(j, 100.0, 100.0).map_err(|e| e.to_string())?;
        let tr = simulate(DwState::centered(), &wf, 0.01, &mc, &geom, Integrator::Exact).map_err(|e| e.to_string())?;
        let t_s: Vec<f64> = tr.times.iter().map(|t| t * 1e-9).collect();
        let v = extract_velocity(&tr.positions, &t_s, 2, 10).map_err(|e| e.to_string())?;
        let meta = TrialMeta {
            j,
            run_time: 100e-9,
            corner: None,
        };
        out.push(extract_features(&tr.positions, &v, &t_s, &meta).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn worst_constant_error(f: &[TrialFeatures]) -> Result<(f64, f64), String> {
    let fit = fit_corner(f, &FitOptions { j_cap: f64::INFINITY }).map_err(|e| e.to_string())?;
    let k_true = derive_k(RT_C, RT_D1, RT_D2);
    let mut worst = 0.0f64;
    for (a, b) in fit.k().iter().zip(k_true) {
        worst = worst.max(rel(*a, b));
    }
    worst = worst.max(rel(fit.d1(), RT_D1)).max(rel(fit.d2, RT_D2));
    Ok((worst, rel(fit.drift_const, 1.0 / RT_D1)))
}

fn calibration_round_trip() -> Check {
    let start = Instant::now();
    let clean = round_trip_features()?;
    let (noiseless, _) = worst_constant_error(&clean)?;
    let mut rng = StdRng::seed_from_u64(3);
    let noisy: Vec<TrialFeatures> = clean
        .iter()
        .map(|f| {
            let mut n = || 1.0 + rng.random_range(-0.01..0.01);
            TrialFeatures {
                max_vel: f.max_vel * n(),
                time_constant: f.time_constant * n(),
                drift_dist: f.drift_dist * n(),
                ..*f
            }
        })
        .collect();
    let (with_noise, _) = worst_constant_error(&noisy)?;
    let secs = start.elapsed().as_secs_f64();
    ensure(noiseless < 0.02, || format!("noiseless recovery off by {noiseless:.3e}"))?;
    ensure(with_noise < 0.05, || format!("recovery with 1% noise off by {with_noise:.3e}"))?;
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "worst k/d error {noiseless:.2e} noiseless, {with_noise:.2e} with 1% noise, {secs:.2} s"
    ))
}

fn drift_law() -> Check {
    let mc = round_trip_constants();
    let geom = long_track();
    let mut worst = 0.0f64;
    for j in drive_grid() {
        let wf = CurrentWaveform::pulse(j, 100.0, 200.0).map_err(|e| e.to_string())?;
        let tr = simulate(DwState::centered(), &wf, 0.01, &mc, &geom, Integrator::Exact).map_err(|e| e.to_string())?;
        let i = tr.index_at_or_after(100.0).map_err(|e| e.to_string())?;
        let expected = tr.velocities[i] / mc.d1() * 1e-9;
        let d = drift_distance(&tr, 100.0).map_err(|e| e.to_string())?;
        worst = worst.max(rel(d, expected));
    }
    let (_, fitted) = worst_constant_error(&round_trip_features()?)?;
    ensure(worst < 1e-3, || format!("drift off by {worst:.3e}"))?;
    ensure(fitted < 0.01, || format!("fitted drift constant off by {fitted:.3e}"))?;
    Ok(format!("drift within {worst:.2e}, fitted drift_const within {fitted:.2e}"))
}

/// Modified nodal analysis of the star network: unknowns are the four node
/// voltages (M, P, Q, RA) and one current per driven terminal.
fn mna_oracle(drive: &TerminalDrive, r: [f64; 3]) -> [f64; 3] {
    let terms = [drive.p, drive.q, drive.ra];
    let driven: Vec<usize> = (0..3).filter(|&i| terms[i].is_some()).collect();
    let n = 4 + driven.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for (t, &rt) in r.iter().enumerate() {
        let g = 1.0 / rt;
        let (m, k) = (0, t + 1);
        a[(m, m)] += g;
        a[(k, k)] += g;
        a[(m, k)] -= g;
        a[(k, m)] -= g;
    }
    for (s, &t) in driven.iter().enumerate() {
        let row = 4 + s;
        a[(t + 1, row)] = 1.0;
        a[(row, t + 1)] = 1.0;
        b[row] = terms[t].unwrap();
    }
    let x = a.lu().solve(&b).expect("nonsingular");
    let vm = x[0];
    [(x[1] - vm) / r[0], (vm - x[2]) / r[1], (vm - x[3]) / r[2]]
}

fn electrical() -> Check {
    let (rp, rap) = (1e3, 1e6);
    let r1 = mtj_resistance_fractional(1.0, rp, rap).map_err(|e| e.to_string())?;
    let r0 = mtj_resistance_fractional(0.0, rp, rap).map_err(|e| e.to_string())?;
    let mid = mtj_resistance_fractional(0.5, rp, rap).map_err(|e| e.to_string())?;
    ensure(r1 == rp && r0 == rap, || format!("endpoints {r1}, {r0}"))?;
    let expected = 2.0 * rp * rap / (rp + rap);
    ensure(rel(mid, expected) < 1e-12, || format!("midpoint {mid} vs {expected}"))?;

    let mut rng = StdRng::seed_from_u64(5);
    let geom = ElectricalParams::reference_geometry();
    let (mut worst_kcl, mut worst_oracle) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let mut ep = ElectricalParams::reference();
        ep.rp = 10f64.powf(rng.random_range(2.0..4.0));
        ep.rap = ep.rp * rng.random_range(1.0..1000.0);
        ep.r_total = 10f64.powf(rng.random_range(2.0..5.0));
        let mut v = || Some(rng.random_range(-2.0..2.0));
        let mut drive = TerminalDrive::new(v(), v(), v());
        match rng.random_range(0..4) {
            0 => drive.p = None,
            1 => drive.q = None,
            2 => drive.ra = None,
            _ => {}
        }
        let x = rng.random_range(0.0..geom.length());
        let s = solve_node(&drive, x, &ep, &geom).map_err(|e| e.to_string())?;
        let (rl, rr) = ep.track_resistances(&geom);
        let scale = s.i_p.abs().max(s.i_q.abs()).max(s.i_mtj.abs());
        if scale == 0.0 {
            continue;
        }
        worst_kcl = worst_kcl.max((s.i_p - s.i_q - s.i_mtj).abs() / scale);
        let o = mna_oracle(&drive, [rl, rr, s.r_mtj]);
        // both solves lose digits when v_M nears the terminal voltages
        let cond: f64 = [(drive.p, rl), (drive.q, rr), (drive.ra, s.r_mtj)]
            .iter()
            .map(|(v, r)| v.map_or(0.0, |v| v.abs() / r))
            .sum();
        for (a, b) in [s.i_p, s.i_q, s.i_mtj].iter().zip(o) {
            worst_oracle = worst_oracle.max((a - b).abs() / cond.max(scale));
        }
    }
    ensure(worst_kcl < 1e-12, || format!("current conservation off by {worst_kcl:.3e}"))?;
    ensure(worst_oracle < 1e-12, || format!("node currents differ from MNA by {worst_oracle:.3e}"))?;
    Ok(format!(
        "endpoints exact, midpoint exact to 1e-12; KCL {worst_kcl:.1e}, MNA agreement {worst_oracle:.1e} over 1000 drives"
    ))
}

fn random_finite(rng: &mut StdRng) -> f64 {
    loop {
        let v = f64::from_bits(rng.random());
        if v.is_finite() {
            return v;
        }
    }
}

fn file_formats() -> Check {
    let mut rng = StdRng::seed_from_u64(6);
    for round in 0..50 {
        let rows = grid_corners()
            .into_iter()
            .map(|k| {
                let mut v = || random_finite(&mut rng);
                (
                    k,
                    CornerConstants {
                        c: [v(), v(), v(), v()],
                        drift_const: v(),
                        d2: v(),
                    },
                )
            })
            .collect();
        let set = TableSet::from_corners(rows).map_err(|e| e.to_string())?;
        for name in ConstantName::ALL {
            let t = set.table(name);
            let mut buf = Vec::new();
            t.write(&mut buf).map_err(|e| e.to_string())?;
            let back = ConstantTable::read(&buf[..], Some(name)).map_err(|e| e.to_string())?;
            ensure(back.rows.len() == 32, || format!("round {round}: {} rows", back.rows.len()))?;
            for (k, v) in &t.rows {
                let w = back.rows.get(k).ok_or_else(|| format!("corner {k} lost"))?;
                ensure(v.to_bits() == w.to_bits(), || format!("{k}: {v:e} read back as {w:e}"))?;
            }
        }
    }

    let spacing = 1e-9;
    let times: Vec<f64> = (0..400).map(|i| i as f64 * 1e-11).collect();
    let centers: Vec<f64> = times
        .iter()
        .map(|t| 137.3e-9 + 350.0 * t + 2e-9 * (t * 3e9).sin())
        .collect();
    let text = mumax_table(&times, &centers, 6e-9, 128, spacing);
    let table = MagTable::parse(text.as_bytes(), MagLayout::Auto, spacing).map_err(|e| e.to_string())?;
    let x = extract_position(&table).map_err(|e| e.to_string())?;
    // re-zeroed on the first in-window centroid, so the first shift stays in
    let shift0 = ((centers[0] - 64.0 * spacing) / spacing).round() * spacing;
    let worst = x
        .iter()
        .zip(&centers)
        .map(|(xi, ci)| (xi - (ci - centers[0] + shift0)).abs())
        .fold(0.0f64, f64::max);
    ensure(worst < 0.5e-9, || format!("fixture positions off by {:.3} nm", worst * 1e9))?;
    Ok(format!(
        "50 random 32-corner table sets bit-exact; mumax fixture within {:.3} nm",
        worst * 1e9
    ))
}

fn dynamics_invariants() -> Check {
    const CASES: usize = 10_000;
    let mut rng = StdRng::seed_from_u64(7);
    let mut counts = [0usize; 4];
    for case in 0..CASES {
        let mc = random_constants(&mut rng)
            .with_restitution(rng.random_range(0.0..=1.0))
            .unwrap();
        let geom = TrackGeometry::new(rng.random_range(20e-9..2e-6), 50e-9, 1.2e-9).unwrap();
        let x = rng.random_range(0.0..=geom.length());
        let v = rng.random_range(-500.0..500.0);
        let s = DwState::new(x, v, &geom).unwrap();
        let j = rng.random_range(-8e11..8e11);
        let dt = 10f64.powf(rng.random_range(-4.0..1.0));

        // odd symmetry
        let a = step_exact(s, j, dt, &mc, &geom).unwrap();
        let b = step_exact(s.mirrored(), -j, dt, &mc, &geom).unwrap();
        ensure(b == a.mirrored(), || format!("case {case}: exact step not mirror-symmetric"))?;
        let a = step_euler(s, j, dt, &mc, &geom).unwrap();
        let b = step_euler(s.mirrored(), -j, dt, &mc, &geom).unwrap();
        ensure(b == a.mirrored(), || format!("case {case}: Euler step not mirror-symmetric"))?;
        counts[0] += 1;

        // bounce restitution
        let over = rng.random_range(1e-12..1e-7);
        let off = if rng.random_bool(0.5) { geom.length() + over } else { -over };
        let raw = DwState::from_offset(off - 0.5 * geom.length(), v);
        let bounced = apply_bounce(raw, &geom, mc.c_r());
        ensure(bounced.v.abs() == mc.c_r() * v.abs(), || {
            format!("case {case}: |v| {} after bounce, expected {}", bounced.v.abs(), mc.c_r() * v.abs())
        })?;
        let p = bounced.position(&geom);
        ensure((0.0..=geom.length()).contains(&p), || format!("case {case}: bounced to {p}"))?;
        counts[1] += 1;

        // pinning freeze
        let p1 = rng.random_range(1e8..1e11);
        let p2 = rng.random_range(0.1..50.0);
        let pinned = mc.with_pinning(p1, p2).unwrap();
        let js = rng.random_range(-p1..p1) * 0.999;
        let vs = rng.random_range(-p2..p2) * 0.999;
        let st = DwState::new(x, vs, &geom).unwrap();
        ensure(step_exact(st, js, dt, &pinned, &geom).unwrap() == st, || format!("case {case}: exact step moved a pinned wall"))?;
        ensure(step_euler(st, js, dt, &pinned, &geom).unwrap() == st, || format!("case {case}: Euler step moved a pinned wall"))?;
        counts[2] += 1;

        // position stays on the track over a short random drive
        let pairs: Vec<(f64, f64)> = (0..4).map(|i| (i as f64 * 2.5, rng.random_range(-8e11..8e11))).collect();
        let wf = CurrentWaveform::from_pairs(&pairs, 10.0).unwrap();
        let integ = if case % 2 == 0 { Integrator::Exact } else { Integrator::Euler { dt: 1e-2 } };
        let states = simulate_states(s, &wf, 0.5, &mc, &geom, integ).unwrap();
        for (t, _, st) in &states {
            let p = st.position(&geom);
            ensure((0.0..=geom.length()).contains(&p), || format!("case {case}: x = {p} at t = {t}"))?;
        }
        let mirrored = simulate_states(s.mirrored(), &wf.negated(), 0.5, &mc, &geom, integ).unwrap();
        for ((_, _, a), (_, _, b)) in states.iter().zip(&mirrored) {
            ensure(*b == a.mirrored(), || format!("case {case}: mirrored trajectory differs"))?;
        }
        counts[3] += 1;
    }
    Ok(format!(
        "symmetry {}, restitution {}, pinning {}, on-track {} randomized cases",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

fn benchmark() -> Check {
    let mc = round_trip_constants();
    let dt = 1e-3;
    let wf = pulse_train(&[2e10, 4e10], 50, 10.0, 10.0).map_err(|e| e.to_string())?;
    let workload = Workload {
        waveforms: vec![wf],
        sample_dt: dt,
        geometry: TrackGeometry::new(1e-3, 100e-9, 1.2e-9).unwrap(),
    };
    let cc = calibrate(&mc, &Calibration { dt, ..Calibration::default() })
        .map_err(|e| e.to_string())?
        .into_iter()
        .find(|m| matches!(m, BaselineModel::Cc1dFixedWidth(CcParams { .. })))
        .ok_or("no cc1d baseline")?;
    let models = [
        BenchModel::Kinematic {
            constants: mc,
            integrator: Integrator::Exact,
        },
        BenchModel::Baseline { model: cc },
    ];
    let report = bench(&models, &workload, &BenchOptions { repetitions: 7, warmup: 1 }).map_err(|e| e.to_string())?;
    let path = std::env::temp_dir().join("dwkin_acceptance_bench.json");
    let f = std::fs::File::create(&path).map_err(|e| e.to_string())?;
    report.write_json(f).map_err(|e| e.to_string())?;
    let kin = report.result("kinematic_exact").ok_or("missing result")?;
    let base = report.result("cc1d_fixed_width").ok_or("missing result")?;
    let ratio = base.seconds_per_ns.median / kin.seconds_per_ns.median;
    let detail = format!(
        "kinematic {:.3e} s/ns vs cc1d {:.3e} s/ns: {ratio:.2}x on {} ({} cpus, timer {:.0e} s); report {}",
        kin.seconds_per_ns.median,
        base.seconds_per_ns.median,
        report.machine.cpu,
        report.machine.logical_cpus,
        report.machine.timer_resolution_s,
        path.display()
    );
    ensure(kin.deterministic && base.deterministic, || "trajectories differ between repetitions".into())?;
    ensure(ratio >= 3.0, || format!("speedup below 3x: {detail}"))?;
    Ok(detail)
}

fn metric_consistency() -> Check {
    let mc = round_trip_constants();
    let geom = long_track();
    let wf = CurrentWaveform::pulse(4e10, 20.0, 40.0).map_err(|e| e.to_string())?;
    let reference = simulate(DwState::centered(), &wf, 0.01, &mc, &geom, Integrator::Exact).map_err(|e| e.to_string())?;
    let own = error_report(&reference, &reference, 20.0).map_err(|e| e.to_string())?;
    ensure(own.values() == [0.0; 4], || format!("self comparison gave {:?}", own.values()))?;
    let linear = calibrate(&mc, &Calibration::default())
        .map_err(|e| e.to_string())?
        .into_iter()
        .find(|m| matches!(m, BaselineModel::Linear { .. }))
        .ok_or("no linear baseline")?;
    let tr = simulate_baseline(&linear, &wf, 0.01, &geom).map_err(|e| e.to_string())?;
    let r = error_report(&tr, &reference, 20.0).map_err(|e| e.to_string())?;
    ensure(r.rms_rise > 0.0, || "linear model shows no rise error".into())?;
    Ok(format!("self comparison all zero; linear rms_rise {:.3} nm", r.rms_rise * 1e9))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 integrator parity", integrator_parity),
        ("2 terminal-velocity law", terminal_velocity_law),
        ("3 calibration round trip", calibration_round_trip),
        ("4 drift law", drift_law),
        ("5 MTJ resistance and node solve", electrical),
        ("6 file formats", file_formats),
        ("7 dynamics invariants", dynamics_invariants),
        ("8 benchmark", benchmark),
        ("9 error-metric consistency", metric_consistency),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS [{name}] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{name}] {detail}");
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
