use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::electrical::b_anis_from_ku;
use crate::error::{Error, Result};
use crate::tables::CornerKey;

/// Trial parameters carried in a file or folder name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMeta {
    /// Drive current density, A/m².
    pub j: f64,
    /// Stimulus duration, s.
    pub run_time: f64,
    /// Material corner, when the name carries all of its tokens.
    pub corner: Option<CornerKey>,
}

/// Split a name like `DWSim_Aex=11e-12_J=4.0e+09_RT=100e-9_W=100e-9.mx3`
/// into `key -> value` pairs. Tokens without `=` are skipped and a trailing
/// alphabetic extension is dropped.
pub fn parse_filename_tokens(name: &str) -> BTreeMap<String, String> {
    let mut stem = name;
    while let Some((head, ext)) = stem.rsplit_once('.') {
        if !ext.is_empty() && ext.starts_with(|c: char| c.is_ascii_alphabetic()) && !ext.contains('=') {
            stem = head;
        } else {
            break;
        }
    }
    stem.split('_')
        .filter_map(|tok| tok.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Round to 12 significant digits so that `11e-12 * 1e12` reads back as 11.
fn tidy(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

impl TrialMeta {
    /// Metadata from a trial path. A mumax output `…/<name>.out/table.txt`
    /// takes its tokens from the folder name.
    pub fn from_path(path: &Path) -> Result<Self> {
        let file = path
            .file_name()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::Metadata(format!("{}: no file name", path.display())))?;
        let name = if file.eq_ignore_ascii_case("table.txt") {
            path.parent()
                .and_then(|p| p.file_name())
                .and_then(|s| s.to_str())
                .unwrap_or(file)
        } else {
            file
        };
        Self::from_name(name)
    }

    pub fn from_name(name: &str) -> Result<Self> {
        let tokens = parse_filename_tokens(name);
        let num = |key: &str| -> Result<Option<f64>> {
            match tokens.get(key) {
                None => Ok(None),
                Some(v) => v
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| Error::Metadata(format!("{name}: token {key}=`{v}` is not a number"))),
            }
        };
        let j = num("J")?.ok_or_else(|| Error::Metadata(format!("{name}: missing J= token")))?;
        let run_time = num("RT")?.ok_or_else(|| Error::Metadata(format!("{name}: missing RT= token")))?;
        if !(j > 0.0 && j.is_finite()) {
            return Err(Error::Metadata(format!("{name}: J must be positive, got {j}")));
        }
        if !(run_time > 0.0 && run_time.is_finite()) {
            return Err(Error::Metadata(format!("{name}: RT must be positive, got {run_time}")));
        }
        let aex = num("Aex")?;
        let alpha = num("A")?;
        let msat = num("Msat")?;
        let w = num("W")?;
        let b_anis = match (num("Banis")?, num("Ku")?, msat) {
            (Some(b), _, _) => Some(b),
            (None, Some(ku), Some(ms)) => Some(b_anis_from_ku(ku, ms)),
            _ => None,
        };
        let corner = match (aex, b_anis, alpha, msat, w) {
            (Some(aex), Some(b), Some(alpha), Some(msat), Some(w)) => Some(CornerKey::new(
                tidy(aex * 1e12),
                b,
                alpha,
                msat,
                tidy(w * 1e9),
            )?),
            _ => None,
        };
        Ok(TrialMeta { j, run_time, corner })
    }
}
