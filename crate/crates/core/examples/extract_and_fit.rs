//! Calibration pipeline on synthetic mumax tables: position and velocity
//! extraction, per-trial features, and the corner fit.
//!
//! ```text
//! cargo run --example extract_and_fit
//! ```

use std::fmt::Write as _;

use kinematic_dw::fitting::{
    extract_features, extract_position, extract_velocity, fit_corner, FitOptions, MagLayout, MagTable, TrialMeta,
};
use kinematic_dw::prelude::*;

const SPACING: f64 = 1e-9;
const CELLS: usize = 128;

/// Table text for a tanh wall following `centers`, with the simulation
/// window shifted in whole cells to keep the wall near the middle.
fn table_text(times: &[f64], centers: &[f64]) -> String {
    let mut s = String::from("# t (s)\tmx ()\tmy ()\tmz ()");
    for j in 0..CELLS {
        write!(s, "\tm.region{j} ()").unwrap();
    }
    s.push_str("\text_dwpos (m)\text_dwspeed (m/s)\n");
    let mid = 0.5 * CELLS as f64 * SPACING;
    for (&t, &x) in times.iter().zip(centers) {
        let shift = ((x - mid) / SPACING).round() * SPACING;
        write!(s, "{t:e}\t0\t0\t0").unwrap();
        for j in 0..CELLS {
            let m = -(((j as f64 + 0.5) * SPACING - (x - shift)) / 6e-9).tanh();
            write!(s, "\t{m:.9}").unwrap();
        }
        writeln!(s, "\t{shift:e}\t0").unwrap();
    }
    s
}

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let source = ModelConstants::new([0.35, 2.875e-11, 3.59375e-22, 6.8359375e-34], 0.15, 1.875e-13)?;
    let geom = TrackGeometry::new(1e-2, 100e-9, 1.2e-9)?;
    let dir = std::env::temp_dir().join("dwkin_extract_and_fit");

    let mut features = Vec::new();
    for i in 0..10 {
        let j = 8e9 * 100f64.powf(i as f64 / 9.0);
        let wf = CurrentWaveform::pulse(j, 100.0, 100.0)?;
        let tr = simulate(DwState::centered(), &wf, 0.1, &source, &geom, Integrator::Exact)?;
        let centers: Vec<f64> = tr.positions.iter().map(|x| x - 0.5 * geom.length() + 100e-9).collect();
        let times: Vec<f64> = tr.times.iter().map(|t| t * 1e-9).collect();

        let folder = dir.join(format!(
            "DWSim_Aex=11e-12_Ku=4.05e+5_A=0.01_Msat=7.95e+5_J={j:.3e}_RT=100e-9_W=100e-9.out"
        ));
        std::fs::create_dir_all(&folder)?;
        let path = folder.join("table.txt");
        std::fs::write(&path, table_text(&times, &centers))?;

        let table = MagTable::read(&path, MagLayout::Auto, SPACING)?;
        let x = extract_position(&table)?;
        let v = extract_velocity(&x, &table.times, 2, 10)?;
        let meta = TrialMeta::from_path(&path)?;
        let f = extract_features(&x, &v, &table.times, &meta)?;
        println!(
            "J = {:.2e}: v_max {:>7.2} m/s, tau {:>5.2} ns, drift {:>6.2} nm",
            f.j,
            f.max_vel,
            f.time_constant * 1e9,
            f.drift_dist * 1e9
        );
        features.push(f);
    }

    let fit = fit_corner(&features, &FitOptions { j_cap: f64::INFINITY })?;
    println!("trials used: {}", fit.diagnostics.n_used);
    println!("c  = {:?}", fit.c);
    println!("d1 = {:.5} (source {:.5})", fit.d1(), source.d1());
    println!("d2 = {:.4e} (source {:.4e})", fit.d2, source.d2());
    let mc = fit.constants()?;
    for j in [2e10, 1e11] {
        let a = terminal_velocity(j, &mc).value().unwrap_or(0.0);
        let b = terminal_velocity(j, &source).value().unwrap_or(0.0);
        println!("terminal velocity at {j:e}: fitted {a:.2} m/s, source {b:.2} m/s");
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
