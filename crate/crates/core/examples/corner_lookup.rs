//! Resolve material corners against the bundled tables.
//!
//! ```text
//! cargo run --example corner_lookup
//! ```

use kinematic_dw::prelude::*;
use kinematic_dw::tables::{CornerKey, LookupMode, TableSet};

fn main() -> Result<()> {
    let set = TableSet::bundled();
    println!("{} corners bundled", set.len());

    let queries = [
        (CornerKey::new(11.0, 20.0, 0.01, 7.95e5, 100.0)?, LookupMode::Exact),
        (CornerKey::new(12.0, 22.0, 0.015, 7.5e5, 75.0)?, LookupMode::Nearest),
        (CornerKey::new(12.0, 22.0, 0.015, 7.5e5, 75.0)?, LookupMode::Multilinear),
        (CornerKey::new(20.0, 22.0, 0.015, 7.5e5, 75.0)?, LookupMode::Multilinear),
    ];
    for (key, mode) in queries {
        let hit = set.lookup(&key, mode)?;
        let mc = hit.constants.model_constants()?;
        let v = terminal_velocity(4e10, &mc).value().unwrap_or(0.0);
        print!("{key} {mode:?}: d1 {:.4}, v(4e10) {v:.2} m/s", mc.d1());
        if let Some(c) = hit.corner {
            print!(", stored corner {c}");
        }
        if !hit.clamped.is_empty() {
            print!(", clamped {:?}", hit.clamped);
        }
        println!();
    }

    let missing = CornerKey::new(12.0, 20.0, 0.01, 7.95e5, 100.0)?;
    if let Err(e) = set.lookup(&missing, LookupMode::Exact) {
        println!("exact lookup of {missing}: {e}");
    }
    Ok(())
}
