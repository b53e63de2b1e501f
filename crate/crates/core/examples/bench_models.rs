//! Time the kinematic model against the baselines on a pulse train.
//!
//! ```text
//! cargo run --release --example bench_models [-- REPORT.json]
//! ```

use kinematic_dw::baselines::bench::{bench, pulse_train, BenchModel, BenchOptions, Workload};
use kinematic_dw::baselines::{calibrate, Calibration};
use kinematic_dw::prelude::*;

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let mc = ModelConstants::new([0.35, 2.875e-11, 3.59375e-22, 6.8359375e-34], 0.15, 1.875e-13)?;
    let dt = 1e-3;
    let workload = Workload {
        waveforms: vec![pulse_train(&[2e10, 4e10], 50, 10.0, 10.0)?],
        sample_dt: dt,
        geometry: TrackGeometry::new(1e-3, 100e-9, 1.2e-9)?,
    };
    let mut models = vec![
        BenchModel::Kinematic {
            constants: mc,
            integrator: Integrator::Exact,
        },
        BenchModel::Kinematic {
            constants: mc,
            integrator: Integrator::Euler { dt },
        },
    ];
    models.extend(
        calibrate(&mc, &Calibration { dt, ..Calibration::default() })?
            .into_iter()
            .map(|model| BenchModel::Baseline { model }),
    );

    let report = bench(&models, &workload, &BenchOptions::default())?;
    println!("{} | {} cpus | {}", report.machine.cpu, report.machine.logical_cpus, report.workload);
    for r in &report.results {
        println!(
            "{:<22} {:>10.3e} s/ns (MAD {:.1e})  speedup {:>6.2}  trig/step {}",
            r.model, r.seconds_per_ns.median, r.seconds_per_ns.mad, r.speedup, r.trig_calls_per_step
        );
    }
    if let Some(path) = std::env::args().nth(1) {
        let f = std::fs::File::create(&path)?;
        report.write_json(f)?;
        println!("report written to {path}");
    }
    Ok(())
}
