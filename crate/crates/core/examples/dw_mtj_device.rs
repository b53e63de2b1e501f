//! Three-terminal DW-MTJ: write with P/Q, then read through the MTJ.
//!
//! ```text
//! cargo run --example dw_mtj_device
//! ```

use kinematic_dw::electrical::{solve_node, DeviceIntegrator, DwMtjDevice, ElectricalParams, TerminalDrive};
use kinematic_dw::prelude::*;
use kinematic_dw::tables::{CornerKey, LookupMode, TableSet};

fn main() -> Result<()> {
    let corner = CornerKey::new(11.0, 20.0, 0.01, 7.95e5, 100.0)?;
    let mc = TableSet::bundled()
        .lookup(&corner, LookupMode::Exact)?
        .constants
        .model_constants()?;
    let ep = ElectricalParams::reference();
    let geom = ElectricalParams::reference_geometry();
    let start = DwState::new(5e-9, 0.0, &geom)?;
    let mut dev = DwMtjDevice::new(start, mc, geom, ep, DeviceIntegrator::Exact)?;

    println!("start: x = {:.2} nm, R = {:.1} Ω", dev.position() * 1e9, dev.resistance()?);
    let write = TerminalDrive::new(Some(0.8), Some(0.0), None);
    let samples = dev.run(&[(0.0, write)], 6.0, 1e-3, 400)?;
    for s in &samples {
        println!(
            "t = {:>5.2} ns  x = {:>6.2} nm  J = {:>9.3e} A/m²  R = {:>9.1} Ω",
            s.t,
            s.x * 1e9,
            s.j,
            s.r_mtj
        );
    }

    // a small read bias through the MTJ with Q grounded
    let read = TerminalDrive::new(None, Some(0.0), Some(0.05));
    let sol = solve_node(&read, dev.position(), &ep, &geom)?;
    println!(
        "read: I_mtj = {:.3e} A, V_M = {:.4} V, R_mtj = {:.1} Ω",
        sol.i_mtj, sol.v_middle, sol.r_mtj
    );
    Ok(())
}
