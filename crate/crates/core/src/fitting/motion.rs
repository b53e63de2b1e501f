use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples between the two positions of the velocity difference.
pub const DEFAULT_DIFF_LAG: usize = 2;

/// Width of the Gaussian velocity smoothing window, samples.
pub const DEFAULT_SMOOTH_WINDOW: usize = 150;

/// `(x_i - x_{i-lag}) / (t_i - t_{i-lag})`. The first `lag` entries have no
/// partner and are NaN.
pub fn lagged_difference(positions: &[f64], times: &[f64], lag: usize) -> Result<Vec<f64>> {
    if lag == 0 {
        return Err(Error::Features("difference lag must be at least 1".into()));
    }
    if positions.len() != times.len() {
        return Err(Error::Features("positions and times differ in length".into()));
    }
    if positions.len() <= lag {
        return Err(Error::Features(format!(
            "{} samples cannot be differenced with lag {lag}",
            positions.len()
        )));
    }
    let mut v = vec![f64::NAN; positions.len()];
    for i in lag..positions.len() {
        v[i] = (positions[i] - positions[i - lag]) / (times[i] - times[i - lag]);
    }
    Ok(v)
}

/// Gaussian moving average over `window` samples with standard deviation
/// `window / 5`.
///
/// An even window reaches one sample further back than forward. Near the
/// ends, and around NaN samples, the kernel is truncated and renormalized
/// over the valid samples it still covers; outputs with no valid sample are
/// NaN.
pub fn gaussian_smooth(values: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::Features("smoothing window must be at least 1".into()));
    }
    let before = window / 2;
    let after = window - 1 - before;
    let sigma = window as f64 / 5.0;
    let kernel: Vec<f64> = (0..window)
        .map(|k| {
            let o = k as f64 - before as f64;
            (-o * o / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let n = values.len();
    let mut out = vec![f64::NAN; n];
    for (i, slot) in out.iter_mut().enumerate() {
        if values[i].is_nan() {
            continue;
        }
        let lo = i.saturating_sub(before);
        let hi = (i + after).min(n - 1);
        let (mut num, mut den) = (0.0, 0.0);
        for (j, &v) in values.iter().enumerate().take(hi + 1).skip(lo) {
            if v.is_nan() {
                continue;
            }
            let w = kernel[j + before - i];
            num += w * v;
            den += w;
        }
        *slot = num / den;
    }
    Ok(out)
}

/// Lagged difference followed by Gaussian smoothing. Positions in m, times
/// in s, result in m/s with the first `lag` samples NaN.
pub fn extract_velocity(
    positions: &[f64],
    times: &[f64],
    diff_lag: usize,
    smooth_window: usize,
) -> Result<Vec<f64>> {
    let raw = lagged_difference(positions, times, diff_lag)?;
    gaussian_smooth(&raw, smooth_window)
}

/// Extracted wall motion of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Motion {
    /// s
    pub times: Vec<f64>,
    /// m
    pub positions: Vec<f64>,
    /// m/s; NaN where undefined
    pub velocities: Vec<f64>,
}

impl Motion {
    pub const CSV_HEADER: [&'static str; 3] = ["time_s", "position_m", "velocity_mps"];

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(Self::CSV_HEADER)?;
        for i in 0..self.times.len() {
            w.write_record([
                self.times[i].to_string(),
                self.positions[i].to_string(),
                self.velocities[i].to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        if rdr.headers()?.iter().ne(Self::CSV_HEADER.iter().copied()) {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{}`", Self::CSV_HEADER.join(",")),
            });
        }
        let mut m = Motion {
            times: vec![],
            positions: vec![],
            velocities: vec![],
        };
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            let get = |k: usize| -> Result<f64> {
                let s = rec.get(k).ok_or_else(|| Error::Parse {
                    line,
                    message: "expected 3 columns".into(),
                })?;
                s.parse().map_err(|e| Error::Parse {
                    line,
                    message: format!("`{s}`: {e}"),
                })
            };
            m.times.push(get(0)?);
            m.positions.push(get(1)?);
            m.velocities.push(get(2)?);
        }
        Ok(m)
    }
}
