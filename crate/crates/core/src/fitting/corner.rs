use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::features::TrialFeatures;
use super::derive_k;
use crate::dynamics::ModelConstants;
use crate::error::{Error, Result};
use crate::tables::CornerKey;

/// Current density at which the fit stops taking trials, A/m².
pub const DEFAULT_J_CAP: f64 = 4e10;

/// Smallest singular value, relative to the largest, accepted in the cubic
/// design matrix.
const RANK_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Trials are kept up to and including the first one with `J >= j_cap`.
    pub j_cap: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { j_cap: DEFAULT_J_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    /// Trials supplied.
    pub n_input: usize,
    /// Trials removed by the current cap.
    pub n_capped: usize,
    /// Trials removed because the peak velocity stopped increasing with J.
    pub n_truncated: usize,
    /// Trials used in the fit.
    pub n_used: usize,
    /// `(fit - max_vel) / max_vel` per used trial.
    pub cubic_rel_residuals: Vec<f64>,
    /// `(fit - drift) / drift` per used trial.
    pub drift_rel_residuals: Vec<f64>,
    /// `1/tau - (d1 + d2 J)` per used trial, 1/ns.
    pub rate_residuals: Vec<f64>,
    /// The least-squares `d2` was negative and has been clamped to 0.
    pub d2_clamped: bool,
    pub notes: Vec<String>,
}

/// Fitted constants of one corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedCorner {
    pub corner: Option<CornerKey>,
    /// Terminal-velocity cubic, m/s per (A/m²)^n.
    pub c: [f64; 4],
    /// ns (nm of drift per m/s of velocity); `d1 = 1 / drift_const`.
    pub drift_const: f64,
    /// 1/ns per A/m².
    pub d2: f64,
    pub diagnostics: FitDiagnostics,
}

impl FittedCorner {
    pub fn d1(&self) -> f64 {
        1.0 / self.drift_const
    }

    pub fn k(&self) -> [f64; 5] {
        derive_k(self.c, self.d1(), self.d2)
    }

    pub fn constants(&self) -> Result<ModelConstants> {
        ModelConstants::new(self.c, self.d1(), self.d2)
    }
}

/// Fit the terminal-velocity cubic, drift constant and `d2` of one corner.
///
/// Steps, in order:
/// 1. sort by J and keep trials up to and including the first with
///    `J >= j_cap`;
/// 2. if the peak velocity is not at the largest kept J, cut after the first
///    trial holding the peak;
/// 3. weighted least squares (weights `max_vel^-2`) of a cubic in `J / J_min`,
///    rescaled to plain J;
/// 4. weighted (weights `drift^-1`) line through the origin
///    `drift_nm = drift_const * max_vel`;
/// 5. `d2` from a least-squares line through the origin of
///    `1/tau_ns - 1/drift_const` against J, clamped at zero.
pub fn fit_corner(features: &[TrialFeatures], opts: &FitOptions) -> Result<FittedCorner> {
    let mut f: Vec<TrialFeatures> = features.to_vec();
    for t in &f {
        let ok = [t.j, t.max_vel, t.time_constant, t.drift_dist]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !ok {
            return Err(Error::Fit(format!(
                "trial at J = {:e} has a non-positive or non-finite feature",
                t.j
            )));
        }
    }
    f.sort_by(|a, b| a.j.total_cmp(&b.j));
    if f.windows(2).any(|w| w[0].j == w[1].j) {
        return Err(Error::Fit("trials must have distinct J".into()));
    }
    let n_input = f.len();
    let mut notes = Vec::new();

    if let Some(i) = f.iter().position(|t| t.j >= opts.j_cap) {
        f.truncate(i + 1);
    }
    let n_capped = n_input - f.len();
    if n_capped > 0 {
        notes.push(format!("{n_capped} trial(s) above J cap {:e} dropped", opts.j_cap));
    }

    let peak = f.iter().map(|t| t.max_vel).fold(f64::NEG_INFINITY, f64::max);
    let mut n_truncated = 0;
    if f.last().is_some_and(|t| t.max_vel != peak) {
        let i = f.iter().position(|t| t.max_vel == peak).unwrap();
        n_truncated = f.len() - (i + 1);
        f.truncate(i + 1);
        notes.push(format!(
            "peak velocity reached at J = {:e}; {n_truncated} higher-J trial(s) excluded",
            f[i].j
        ));
    }
    let n = f.len();
    if n < 4 {
        return Err(Error::Fit(format!("{n} usable trial(s); the cubic needs at least 4")));
    }

    let j0 = f[0].j;
    let design = DMatrix::from_fn(n, 4, |i, p| {
        let jt = f[i].j / j0;
        jt.powi(p as i32) / f[i].max_vel
    });
    let rhs = DVector::from_element(n, 1.0);
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > RANK_TOL * smax) {
        return Err(Error::Fit("cubic design matrix is singular".into()));
    }
    let b = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Fit(format!("cubic solve failed: {e}")))?;
    let c = [b[0], b[1] / j0, b[2] / (j0 * j0), b[3] / (j0 * j0 * j0)];

    // drift (nm) = K * max_vel with weights 1/drift
    let (mut num, mut den) = (0.0, 0.0);
    for t in &f {
        let dd = t.drift_dist * 1e9;
        num += t.max_vel;
        den += t.max_vel * t.max_vel / dd;
    }
    let drift_const = num / den;
    if !(drift_const > 0.0 && drift_const.is_finite()) {
        return Err(Error::Fit(format!("drift constant {drift_const} is not positive")));
    }
    let d1 = 1.0 / drift_const;

    let (mut num, mut den) = (0.0, 0.0);
    for t in &f {
        num += t.j * (1.0 / (t.time_constant * 1e9) - d1);
        den += t.j * t.j;
    }
    let d2_raw = num / den;
    let d2_clamped = d2_raw < 0.0;
    let d2 = if d2_clamped { 0.0 } else { d2_raw };
    if d2_clamped {
        notes.push(format!("negative d2 ({d2_raw:e}) clamped to 0"));
    }

    let cubic = |j: f64| c[0] + c[1] * j + c[2] * j * j + c[3] * j * j * j;
    let diagnostics = FitDiagnostics {
        n_input,
        n_capped,
        n_truncated,
        n_used: n,
        cubic_rel_residuals: f.iter().map(|t| (cubic(t.j) - t.max_vel) / t.max_vel).collect(),
        drift_rel_residuals: f
            .iter()
            .map(|t| (drift_const * t.max_vel * 1e-9 - t.drift_dist) / t.drift_dist)
            .collect(),
        rate_residuals: f
            .iter()
            .map(|t| 1.0 / (t.time_constant * 1e9) - (d1 + d2 * t.j))
            .collect(),
        d2_clamped,
        notes,
    };
    Ok(FittedCorner {
        corner: None,
        c,
        drift_const,
        d2,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const C: [f64; 4] = [0.35, 2.875e-11, 3.59375e-22, 6.8359375e-34];
    const D1: f64 = 0.15;
    const D2: f64 = 1.875e-13;

    fn exact_features(js: &[f64]) -> Vec<TrialFeatures> {
        js.iter()
            .map(|&j| {
                let v = C[0] + C[1] * j + C[2] * j * j + C[3] * j * j * j;
                TrialFeatures {
                    j,
                    max_vel: v,
                    time_constant: 1e-9 / (D1 + D2 * j),
                    drift_dist: v / D1 * 1e-9,
                    settled: true,
                }
            })
            .collect()
    }

    fn js() -> Vec<f64> {
        (0..10).map(|i| 8e9 * 100f64.powf(i as f64 / 9.0)).collect()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn exact_features_roundtrip() {
        let fit = fit_corner(&exact_features(&js()), &FitOptions { j_cap: f64::INFINITY }).unwrap();
        for (n, (got, want)) in fit.c.iter().zip(C).enumerate() {
            assert!(rel(*got, want) < 1e-6, "c{n}: {got} vs {want}");
        }
        assert!(rel(fit.d1(), D1) < 1e-6);
        assert!(rel(fit.d2, D2) < 1e-6);
        assert_eq!(fit.diagnostics.n_used, 10);
    }

    #[test]
    fn cap_keeps_first_trial_at_or_above() {
        let fit = fit_corner(&exact_features(&js()), &FitOptions { j_cap: 1e11 }).unwrap();
        // 8e9 * 100^(i/9) >= 1e11 first at i = 5
        assert_eq!(fit.diagnostics.n_used, 6);
        assert_eq!(fit.diagnostics.n_capped, 4);
    }

    #[test]
    fn interior_peak_truncates() {
        let mut f = exact_features(&js());
        let peak = f[6].max_vel * 10.0;
        f[6].max_vel = peak;
        for t in f.iter_mut().skip(7) {
            t.max_vel = peak * 0.5;
        }
        let fit = fit_corner(&f, &FitOptions { j_cap: f64::INFINITY }).unwrap();
        assert_eq!(fit.diagnostics.n_truncated, 3);
        assert_eq!(fit.diagnostics.n_used, 7);
        assert!(!fit.diagnostics.notes.is_empty());
    }

    #[test]
    fn too_few_trials() {
        let f = exact_features(&js()[..3]);
        assert!(matches!(fit_corner(&f, &FitOptions::default()), Err(Error::Fit(_))));
    }

    #[test]
    fn duplicate_j_rejected() {
        let mut f = exact_features(&js());
        f[1].j = f[0].j;
        assert!(fit_corner(&f, &FitOptions { j_cap: f64::INFINITY }).is_err());
    }

    #[test]
    fn negative_d2_clamped() {
        let mut f = exact_features(&js());
        for t in &mut f {
            // slower relaxation at high J than at low J
            t.time_constant = 1e-9 / (D1 * (1.0 - t.j / 2e12));
        }
        let fit = fit_corner(&f, &FitOptions { j_cap: f64::INFINITY }).unwrap();
        assert_eq!(fit.d2, 0.0);
        assert!(fit.diagnostics.d2_clamped);
    }

    #[test]
    fn scale_consistency() {
        let s = 3.0;
        let base = exact_features(&js());
        let scaled: Vec<_> = base.iter().map(|t| TrialFeatures { j: t.j * s, ..*t }).collect();
        let opts = FitOptions { j_cap: f64::INFINITY };
        let a = fit_corner(&base, &opts).unwrap();
        let b = fit_corner(&scaled, &opts).unwrap();
        for n in 0..4 {
            assert!(rel(b.c[n], a.c[n] / s.powi(n as i32)) < 1e-12);
        }
        assert!(rel(b.d2, a.d2 / s) < 1e-12);
        assert_eq!(a.drift_const, b.drift_const);
    }
}
