use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::waveform::Trajectory;

/// Relative tolerance when checking that two sampling grids coincide.
const GRID_TOL: f64 = 1e-9;

/// Fraction of the peak speed below which the reference counts as stopped.
const SETTLE_FRACTION: f64 = 0.01;

/// Accuracy of a candidate trajectory against a reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// `|Δx_c − Δx_r| / |Δx_r|`
    pub final_displacement_err: f64,
    /// Relative error of the peak speed during the pulse.
    pub max_velocity_err: f64,
    /// RMS position difference while the reference accelerates, m.
    pub rms_rise: f64,
    /// RMS position difference while the reference stops, m.
    pub rms_stop: f64,
}

impl ErrorReport {
    pub const CSV_HEADER: [&'static str; 4] =
        ["final_displacement_err", "max_velocity_err", "rms_rise_m", "rms_stop_m"];

    pub fn values(&self) -> [f64; 4] {
        [
            self.final_displacement_err,
            self.max_velocity_err,
            self.rms_rise,
            self.rms_stop,
        ]
    }
}

fn check_grids(a: &Trajectory, b: &Trajectory) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Metrics(format!(
            "grids differ in length ({} vs {}); resample first",
            a.len(),
            b.len()
        )));
    }
    for (i, (&ta, &tb)) in a.times.iter().zip(&b.times).enumerate() {
        if (ta - tb).abs() > GRID_TOL * ta.abs().max(tb.abs()).max(1.0) {
            return Err(Error::Metrics(format!("grids differ at sample {i}: {ta} vs {tb} ns")));
        }
    }
    Ok(())
}

/// RMS of the position difference over samples `lo..=hi`.
pub fn rms_between(a: &Trajectory, b: &Trajectory, lo: usize, hi: usize) -> Result<f64> {
    check_grids(a, b)?;
    if lo > hi || hi >= a.len() {
        return Err(Error::Metrics(format!("bad sample window {lo}..={hi}")));
    }
    let sum: f64 = (lo..=hi)
        .map(|i| {
            let d = a.positions[i] - b.positions[i];
            d * d
        })
        .sum();
    Ok((sum / (hi - lo + 1) as f64).sqrt())
}

/// Compare `candidate` to `reference`; both must share one sampling grid.
/// `pulse_end` is in ns.
///
/// The rise window runs from the first sample to the reference's peak speed
/// during the pulse; the stop window from `pulse_end` to the first sample
/// where the reference speed falls below 1% of that peak (or the last
/// sample if it never does).
pub fn error_report(candidate: &Trajectory, reference: &Trajectory, pulse_end: f64) -> Result<ErrorReport> {
    check_grids(candidate, reference)?;
    let dx_r = reference.displacement();
    if dx_r == 0.0 {
        return Err(Error::Metrics("reference displacement is zero".into()));
    }
    let final_displacement_err = (candidate.displacement() - dx_r).abs() / dx_r.abs();

    let i_end = reference.index_at_or_after(pulse_end.min(reference.end()))?;
    let peak = |tr: &Trajectory| {
        tr.velocities[..=i_end]
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, v)| {
                if v.abs() > bv {
                    (i, v.abs())
                } else {
                    (bi, bv)
                }
            })
    };
    let (i_peak, v_r) = peak(reference);
    let (_, v_c) = peak(candidate);
    if v_r == 0.0 {
        return Err(Error::Metrics("reference never moves during the pulse".into()));
    }
    let max_velocity_err = (v_c - v_r).abs() / v_r;

    let rms_rise = rms_between(candidate, reference, 0, i_peak)?;
    let i_stop = (i_end..reference.len())
        .find(|&i| reference.velocities[i].abs() < SETTLE_FRACTION * v_r)
        .unwrap_or(reference.len() - 1);
    let rms_stop = rms_between(candidate, reference, i_end, i_stop)?;

    Ok(ErrorReport {
        final_displacement_err,
        max_velocity_err,
        rms_rise,
        rms_stop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> Trajectory {
        let n = 201;
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();
        let v: Vec<f64> = t
            .iter()
            .map(|&t| if t <= 50.0 { 10.0 * (1.0 - (-t / 5.0).exp()) } else { 10.0 * (-(t - 50.0) / 5.0).exp() })
            .collect();
        let mut x = vec![0.0; n];
        for i in 1..n {
            x[i] = x[i - 1] + 0.5 * (v[i] + v[i - 1]) * 0.5e-9;
        }
        Trajectory::new(t, x, v, vec![1e10; n]).unwrap()
    }

    #[test]
    fn self_comparison_is_zero() {
        let r = ramp();
        let e = error_report(&r, &r, 50.0).unwrap();
        assert_eq!(e.values(), [0.0; 4]);
    }

    #[test]
    fn uniform_shift_separates_metrics() {
        let r = ramp();
        let mut c = r.clone();
        for x in &mut c.positions {
            *x += 1e-9;
        }
        let e = error_report(&c, &r, 50.0).unwrap();
        assert_eq!(e.final_displacement_err, 0.0);
        assert_eq!(e.max_velocity_err, 0.0);
        assert!((e.rms_rise - 1e-9).abs() < 1e-20);
        assert!((e.rms_stop - 1e-9).abs() < 1e-20);
    }

    #[test]
    fn rms_is_symmetric() {
        let r = ramp();
        let mut c = r.clone();
        for (i, x) in c.positions.iter_mut().enumerate() {
            *x += (i as f64).sin() * 1e-9;
        }
        assert_eq!(rms_between(&c, &r, 3, 90).unwrap(), rms_between(&r, &c, 3, 90).unwrap());
    }

    #[test]
    fn mismatched_grids_rejected() {
        let r = ramp();
        let c = r.resample(&r.times[..100]).unwrap();
        assert!(error_report(&c, &r, 20.0).is_err());
        let mut shifted = r.clone();
        shifted.times[5] += 0.01;
        assert!(error_report(&shifted, &r, 20.0).is_err());
    }

    #[test]
    fn stationary_reference_rejected() {
        let r = ramp();
        let n = r.len();
        let still = Trajectory::new(r.times.clone(), vec![1e-7; n], vec![0.0; n], vec![0.0; n]).unwrap();
        assert!(matches!(error_report(&r, &still, 50.0), Err(Error::Metrics(_))));
    }
}
