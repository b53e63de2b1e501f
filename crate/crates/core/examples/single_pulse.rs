//! One current pulse at a bundled material corner.
//!
//! ```text
//! cargo run --example single_pulse
//! ```

use kinematic_dw::prelude::*;
use kinematic_dw::tables::{CornerKey, LookupMode, TableSet};

fn main() -> Result<()> {
    let corner = CornerKey::new(11.0, 20.0, 0.01, 7.95e5, 100.0)?;
    let mc = TableSet::bundled()
        .lookup(&corner, LookupMode::Exact)?
        .constants
        .model_constants()?;
    let geom = TrackGeometry::new(2e-6, corner.w * 1e-9, 1.2e-9)?;

    let j = 4e10;
    let wf = CurrentWaveform::pulse(j, 10.0, 30.0)?;
    let exact = simulate(DwState::centered(), &wf, 0.01, &mc, &geom, Integrator::Exact)?;
    let euler = simulate(DwState::centered(), &wf, 0.01, &mc, &geom, Integrator::Euler { dt: 1e-3 })?;

    let v_term = terminal_velocity(j, &mc).value().unwrap_or(0.0);
    println!("corner {corner}");
    println!("terminal velocity at J = {j:e} A/m²: {v_term:.3} m/s");
    println!("peak velocity during the pulse: {:.3} m/s", max_velocity(&exact, (0.0, 10.0))?);
    println!("displacement: exact {:.3} nm, Euler {:.3} nm", exact.displacement() * 1e9, euler.displacement() * 1e9);
    println!("drift after the pulse: {:.3} nm", drift_distance(&exact, 10.0)? * 1e9);

    for t in [0.0, 2.5, 5.0, 10.0, 15.0, 20.0, 40.0] {
        let i = exact.index_at_or_after(t)?;
        println!("t = {t:>5.1} ns  x = {:>8.3} nm  v = {:>7.3} m/s", exact.positions[i] * 1e9, exact.velocities[i]);
    }
    Ok(())
}
