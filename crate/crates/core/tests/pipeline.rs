mod common;

use proptest::prelude::*;

use common::*;
use kinematic_dw::fitting::{
    extract_features, extract_position, extract_velocity, fit_corner, FitOptions, MagLayout, MagTable, TrialMeta,
};
use kinematic_dw::prelude::*;

const SPACING: f64 = 1e-9;
const CELLS: usize = 128;

/// mumax-style folder for one simulated trial, sampled every 0.1 ns.
fn write_trial(root: &std::path::Path, j: f64) -> std::path::PathBuf {
    let mc = round_trip_constants();
    let geom = TrackGeometry::new(1e-2, 100e-9, 1.2e-9).unwrap();
    let wf = CurrentWaveform::pulse(j, 100.0, 100.0).unwrap();
    let tr = simulate(DwState::centered(), &wf, 0.1, &mc, &geom, Integrator::Exact).unwrap();
    let centers: Vec<f64> = tr.positions.iter().map(|x| x - 0.5 * geom.length() + 100e-9).collect();
    let times: Vec<f64> = tr.times.iter().map(|t| t * 1e-9).collect();
    let text = mumax_table(&times, &centers, 6e-9, CELLS, SPACING);
    write(&root.join(trial_folder_name(j, 100.0)).join("table.txt"), &text)
}

#[test]
fn tanh_wall_center_recovered() {
    let prof = tanh_profile(250e-9, 8e-9, 500, SPACING);
    let t = MagTable::new(vec![0.0], vec![prof], None, SPACING).unwrap();
    let c = t.centroids().unwrap()[0] * SPACING;
    assert!((c - 250e-9).abs() < 0.5e-9, "centroid {c:e}");
}

#[test]
fn shift_column_adds_linearly() {
    let profiles: Vec<Vec<f64>> = [40e-9, 45e-9, 52e-9]
        .iter()
        .map(|&c| tanh_profile(c, 5e-9, 100, SPACING))
        .collect();
    let times = vec![0.0, 1e-9, 2e-9];
    let plain = MagTable::new(times.clone(), profiles.clone(), None, SPACING).unwrap();
    let shifted = MagTable::new(times, profiles, Some(vec![5e-9; 3]), SPACING).unwrap();
    let a = extract_position(&plain).unwrap();
    let b = extract_position(&shifted).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((y - x - 5e-9).abs() < 1e-18);
    }
}

proptest! {
    #[test]
    fn position_is_translation_equivariant(center in 150.0..200.0f64, width in 2.0..8.0f64, cells in 1usize..10) {
        let shift = cells as f64 * SPACING;
        // tails saturate inside the window on both sides
        let a = tanh_profile(center * 1e-9, width * 1e-9, 400, SPACING);
        let b = tanh_profile(center * 1e-9 + shift, width * 1e-9, 400, SPACING);
        let ta = MagTable::new(vec![0.0], vec![a], None, SPACING).unwrap();
        let tb = MagTable::new(vec![0.0], vec![b], None, SPACING).unwrap();
        let d = (tb.centroids().unwrap()[0] - ta.centroids().unwrap()[0]) * SPACING;
        prop_assert!((d - shift).abs() < 1e-9 * SPACING, "moved {d:e} for {shift:e}");
    }
}

#[test]
fn layouts_agree_on_fixture() {
    let times = [0.0, 1e-10, 2e-10];
    let text = mumax_table(&times, &[70e-9, 71e-9, 73e-9], 5e-9, CELLS, SPACING);
    let auto = MagTable::parse(text.as_bytes(), MagLayout::Auto, SPACING).unwrap();
    let explicit = MagTable::parse(text.as_bytes(), MagLayout::ShiftAndSpeed, SPACING).unwrap();
    assert_eq!(auto, explicit);
    assert_eq!(auto.profiles[0].len(), CELLS);
    let profile_only = MagTable::parse(text.as_bytes(), MagLayout::ProfileOnly, SPACING).unwrap();
    assert_eq!(profile_only.profiles[0].len(), CELLS + 2);
}

#[test]
fn fixture_folders_fit_back_to_source() {
    let dir = tempfile::tempdir().unwrap();
    let mut feats = Vec::new();
    for j in drive_grid() {
        let path = write_trial(dir.path(), j);
        let table = MagTable::read(&path, MagLayout::Auto, SPACING).unwrap();
        let x = extract_position(&table).unwrap();
        let v = extract_velocity(&x, &table.times, 2, 10).unwrap();
        let name = path.parent().unwrap().file_name().unwrap().to_str().unwrap();
        let meta = TrialMeta::from_name(name).unwrap();
        assert!(rel(meta.j, j) < 0.05);
        assert!(meta.corner.is_some());
        feats.push(extract_features(&x, &v, &table.times, &meta).unwrap());
    }
    let fit = fit_corner(&feats, &FitOptions { j_cap: f64::INFINITY }).unwrap();
    // J is rounded to two digits in the folder names and positions to the
    // profile resolution, so the tolerance is looser than the clean round trip
    assert!(rel(fit.d1(), RT_D1) < 0.05, "d1 {}", fit.d1());
    assert!(rel(fit.d2, RT_D2) < 0.10, "d2 {:e}", fit.d2);
    let mc = fit.constants().unwrap();
    let v = terminal_velocity(4e10, &mc).value().unwrap();
    let v_src = terminal_velocity(4e10, &round_trip_constants()).value().unwrap();
    assert!(rel(v, v_src) < 0.05, "{v} vs {v_src}");
}

#[test]
fn too_few_trials_is_a_fit_error() {
    let mc = round_trip_constants();
    let geom = TrackGeometry::new(1e-2, 100e-9, 1.2e-9).unwrap();
    let feats: Vec<_> = drive_grid()
        .into_iter()
        .take(3)
        .map(|j| {
            let wf = CurrentWaveform::pulse(j, 100.0, 100.0).unwrap();
            let tr = simulate(DwState::centered(), &wf, 0.01, &mc, &geom, Integrator::Exact).unwrap();
            let t: Vec<f64> = tr.times.iter().map(|t| t * 1e-9).collect();
            let v = extract_velocity(&tr.positions, &t, 2, 10).unwrap();
            let meta = TrialMeta {
                j,
                run_time: 100e-9,
                corner: None,
            };
            extract_features(&tr.positions, &v, &t, &meta).unwrap()
        })
        .collect();
    assert!(matches!(fit_corner(&feats, &FitOptions::default()), Err(Error::Fit(_))));
}
