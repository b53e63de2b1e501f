#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use kinematic_dw::dynamics::ModelConstants;

pub const RT_C: [f64; 4] = [0.35, 2.875e-11, 3.59375e-22, 6.8359375e-34];
pub const RT_D1: f64 = 0.15;
pub const RT_D2: f64 = 1.875e-13;

pub fn round_trip_constants() -> ModelConstants {
    ModelConstants::new(RT_C, RT_D1, RT_D2).unwrap()
}

/// Ten drives spaced geometrically from 8e9 to 8e11 A/m².
pub fn drive_grid() -> Vec<f64> {
    (0..10).map(|i| 8e9 * 100f64.powf(i as f64 / 9.0)).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Magnetization profile of a wall centred at `center` m on cells of
/// `spacing` m: +1 to the left, -1 to the right.
pub fn tanh_profile(center: f64, width: f64, cells: usize, spacing: f64) -> Vec<f64> {
    (0..cells)
        .map(|j| -(((j as f64 + 0.5) * spacing - center) / width).tanh())
        .collect()
}

/// mumax-style `table.txt` text for a wall moving along `centers` (m, in
/// track coordinates) with the window shifted by whole cells to keep it
/// near the middle.
pub fn mumax_table(times: &[f64], centers: &[f64], width: f64, cells: usize, spacing: f64) -> String {
    let mut s = String::from("# t (s)\tmx ()\tmy ()\tmz ()");
    for j in 0..cells {
        write!(s, "\tm.region{j} ()").unwrap();
    }
    s.push_str("\text_dwpos (m)\text_dwspeed (m/s)\n");
    let mid = 0.5 * cells as f64 * spacing;
    for (&t, &x) in times.iter().zip(centers) {
        let shift = ((x - mid) / spacing).round() * spacing;
        let prof = tanh_profile(x - shift, width, cells, spacing);
        write!(s, "{t:e}\t0\t0\t0").unwrap();
        for m in prof {
            write!(s, "\t{m:.9}").unwrap();
        }
        writeln!(s, "\t{shift:e}\t0").unwrap();
    }
    s
}

pub fn trial_folder_name(j: f64, rt_ns: f64) -> String {
    format!(
        "DWSim_V=centerWall_Geom=1_Aex=11e-12_Ku=4.05e+5_A=0.01_Msat=7.95e+5_u0Hke=NaN_DMI=NaN_J={j:.1e}_RT={rt_ns}e-9_W=100e-9.out"
    )
}

pub fn write(path: &Path, text: &str) -> PathBuf {
    if let Some(p) = path.parent() {
        std::fs::create_dir_all(p).unwrap();
    }
    std::fs::write(path, text).unwrap();
    path.to_path_buf()
}
