//! Rebuild the bundled lookup tables in `data/regenerated/`.
//!
//! No micromagnetic data ships with the crate, so each of the 32 corners
//! gets a synthetic source model whose constants scale smoothly with the
//! corner (wall width from Aex and B_anis, damping, Msat, track width). The
//! source is sampled like a mumax run (100 ns pulse, 100 ns settle, 0.01 ns
//! samples, ten drives from 8e9 to 8e11 A/m²) and pushed through the normal
//! velocity extraction, feature extraction and corner fit. The resulting
//! tables exercise the lookup machinery; they are not physical fits.
//!
//! ```text
//! cargo run --example regenerate_tables [-- OUT_DIR]
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use kinematic_dw::fitting::{extract_features, extract_velocity, fit_corner, FitOptions, TrialMeta};
use kinematic_dw::prelude::*;
use kinematic_dw::tables::{grid_corners, CornerConstants, CornerKey, TableSet};

const BASE_C: [f64; 4] = [0.35, 2.875e-11, 3.59375e-22, 6.8359375e-34];
const BASE_D1: f64 = 0.15;
const BASE_D2: f64 = 1.875e-13;

fn wall_width(k: &CornerKey) -> f64 {
    // B_anis in mT is the effective anisotropy field
    let k_eff = 0.5 * k.b_anis * 1e-3 * k.msat;
    (k.aex * 1e-12 / k_eff).sqrt()
}

fn source_constants(k: &CornerKey) -> Result<ModelConstants> {
    let reference = CornerKey::new(11.0, 20.0, 0.01, 7.95e5, 100.0)?;
    let speed = wall_width(k) / wall_width(&reference)
        * (reference.alpha / k.alpha).sqrt()
        * (reference.msat / k.msat)
        * (k.w / reference.w).powf(0.25);
    let damping = (k.alpha / reference.alpha).sqrt() * (k.msat / reference.msat);
    let c = BASE_C.map(|c| c * speed);
    ModelConstants::new(c, BASE_D1 * damping, BASE_D2 * damping)
}

fn main() -> Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/regenerated"));
    let geom = TrackGeometry::new(1e-3, 100e-9, 1.2e-9)?;
    let js: Vec<f64> = (0..10).map(|i| 8e9 * 100f64.powf(i as f64 / 9.0)).collect();
    let (pulse, settle, sample_dt) = (100.0, 100.0, 0.01);

    let mut rows = BTreeMap::new();
    let mut worst = 0.0f64;
    for key in grid_corners() {
        let src = source_constants(&key)?;
        let mut features = Vec::with_capacity(js.len());
        for &j in &js {
            let wf = CurrentWaveform::pulse(j, pulse, settle)?;
            let tr = simulate(DwState::centered(), &wf, sample_dt, &src, &geom, Integrator::Exact)?;
            let t_s: Vec<f64> = tr.times.iter().map(|t| t * 1e-9).collect();
            let v = extract_velocity(&tr.positions, &t_s, 2, 10)?;
            let meta = TrialMeta {
                j,
                run_time: pulse * 1e-9,
                corner: Some(key),
            };
            features.push(extract_features(&tr.positions, &v, &t_s, &meta)?);
        }
        let fit = fit_corner(&features, &FitOptions::default())?;
        let err = (fit.d1() - src.d1()).abs() / src.d1();
        worst = worst.max(err);
        println!(
            "{key}: trials {} c1 {:.4e} (source {:.4e}) d1 {:.4} (source {:.4}) d2 {:.3e}",
            fit.diagnostics.n_used,
            fit.c[1],
            src.c()[1],
            fit.d1(),
            src.d1(),
            fit.d2
        );
        rows.insert(key, CornerConstants::from(&fit));
    }
    let set = TableSet::from_corners(rows)?;
    set.write_dir(&out)?;
    println!("wrote {} corners to {} (worst d1 error {:.2e})", set.len(), out.display(), worst);
    Ok(())
}
