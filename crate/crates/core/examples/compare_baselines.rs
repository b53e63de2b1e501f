//! Baseline models against the kinematic model on one pulse.
//!
//! ```text
//! cargo run --example compare_baselines
//! ```

use kinematic_dw::baselines::{calibrate, error_report, simulate_baseline, Calibration, ErrorReport};
use kinematic_dw::prelude::*;

fn main() -> Result<()> {
    let mc = ModelConstants::new([0.35, 2.875e-11, 3.59375e-22, 6.8359375e-34], 0.15, 1.875e-13)?;
    let geom = TrackGeometry::new(1e-5, 100e-9, 1.2e-9)?;
    let (width, settle) = (20.0, 40.0);

    println!("{:<22} {}", "model", ErrorReport::CSV_HEADER.join("  "));
    for j in [2e10, 4e10, 1e11] {
        let wf = CurrentWaveform::pulse(j, width, settle)?;
        let reference = simulate(DwState::centered(), &wf, 0.01, &mc, &geom, Integrator::Exact)?;
        println!("J = {j:e} A/m², reference displacement {:.2} nm", reference.displacement() * 1e9);
        for model in calibrate(&mc, &Calibration::default())? {
            let tr = simulate_baseline(&model, &wf, 0.01, &geom)?;
            let r = error_report(&tr, &reference, width)?;
            let [fd, vm, rise, stop] = r.values();
            println!(
                "{:<22} {fd:>8.4} {vm:>8.4} {:>8.3} nm {:>8.3} nm",
                model.id(),
                rise * 1e9,
                stop * 1e9
            );
        }
    }
    Ok(())
}
