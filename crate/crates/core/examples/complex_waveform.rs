//! Piecewise-constant drive read from CSV, with pinning and wall bounces.
//!
//! ```text
//! cargo run --example complex_waveform
//! ```

use kinematic_dw::prelude::*;

const DRIVE: &str = "\
t_start_ns,J_Apm2
0,6e10
8,0
12,-2e10
20,1.2e11
26,0
40,end
";

fn main() -> Result<()> {
    let mc = ModelConstants::new([0.35, 2.875e-11, 3.59375e-22, 6.8359375e-34], 0.15, 1.875e-13)?
        .with_pinning(1.5e10, 5.0)?
        .with_restitution(0.3)?;
    // a short track so the strong pulse reaches the edge
    let geom = TrackGeometry::new(100e-9, 100e-9, 1.2e-9)?;
    let wf = CurrentWaveform::read_csv(DRIVE.as_bytes(), None)?;

    let tr = simulate(DwState::centered(), &wf, 0.05, &mc, &geom, Integrator::Exact)?;
    let mut bounces = 0;
    for w in tr.velocities.windows(2) {
        if w[0] * w[1] < 0.0 {
            bounces += 1;
        }
    }
    println!("segments: {}", wf.segments().len());
    println!("velocity sign changes: {bounces}");
    for seg in wf.segments() {
        let i = tr.index_at_or_after(seg.t_start)?;
        println!(
            "segment at {:>4.1} ns, J = {:>9.2e}: x = {:>7.2} nm, v = {:>7.2} m/s",
            seg.t_start,
            seg.j,
            tr.positions[i] * 1e9,
            tr.velocities[i]
        );
    }
    println!("final position {:.2} nm of {:.0} nm", tr.positions.last().unwrap() * 1e9, geom.length() * 1e9);

    // pulses below both pinning thresholds leave the wall where it is
    let weak = CurrentWaveform::constant(1e10, 10.0)?;
    let frozen = simulate(DwState::centered(), &weak, 0.1, &mc, &geom, Integrator::Exact)?;
    println!("sub-threshold drive moved the wall {:.3e} m", frozen.displacement());

    let mut out = Vec::new();
    tr.write_csv(&mut out)?;
    println!("trajectory CSV: {} bytes", out.len());
    Ok(())
}
