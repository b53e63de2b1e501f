use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default distance between magnetization samples, m (1 nm cells).
pub const DEFAULT_SPACING: f64 = 1e-9;

/// Slack allowed on the `[-1, 1]` magnetization bound.
const MAG_SLACK: f64 = 1e-6;

/// Number of leading columns before the profile: time plus three unused.
const LEADING: usize = 4;

/// Column layout after the magnetization profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MagLayout {
    /// Profile is followed by a window-shift column (m) and a speed column.
    ShiftAndSpeed,
    /// Profile runs to the last column.
    ProfileOnly,
    /// Decide from the header: `ext_dwpos` means [`ShiftAndSpeed`], a
    /// trailing "Mag" column title means [`ProfileOnly`], anything else
    /// defaults to [`ShiftAndSpeed`].
    ///
    /// [`ShiftAndSpeed`]: MagLayout::ShiftAndSpeed
    /// [`ProfileOnly`]: MagLayout::ProfileOnly
    Auto,
}

/// Normalized out-of-plane magnetization sampled along the track over time.
#[derive(Debug, Clone, PartialEq)]
pub struct MagTable {
    /// s
    pub times: Vec<f64>,
    /// One profile per time, uniformly spaced along the track.
    pub profiles: Vec<Vec<f64>>,
    /// Simulation-window shift, m, when the table carries one.
    pub shift: Option<Vec<f64>>,
    /// Distance between profile samples, m.
    pub spacing: f64,
}

/// Comma-separated rows keep empty cells (blank unused columns); other rows
/// split on runs of whitespace.
fn split_fields(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

impl MagTable {
    pub fn new(
        times: Vec<f64>,
        profiles: Vec<Vec<f64>>,
        shift: Option<Vec<f64>>,
        spacing: f64,
    ) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "table has no data rows".into(),
            });
        }
        if profiles.len() != times.len() || shift.as_ref().is_some_and(|s| s.len() != times.len()) {
            return Err(Error::Parse {
                line: 0,
                message: "column lengths differ".into(),
            });
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Parse {
                line: 0,
                message: format!("spacing must be positive, got {spacing}"),
            });
        }
        let width = profiles[0].len();
        for (i, p) in profiles.iter().enumerate() {
            if p.len() != width || width < 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("profile has {} samples, expected {} (at least 2)", p.len(), width),
                });
            }
            if let Some(m) = p.iter().find(|m| !(m.abs() <= 1.0 + MAG_SLACK)) {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("magnetization {m} outside [-1, 1]"),
                });
            }
        }
        Ok(MagTable {
            times,
            profiles,
            shift,
            spacing,
        })
    }

    /// Parse the text form: one optional header line, then numeric rows
    /// separated by tabs, spaces or commas. Column 1 is time (s), columns
    /// 2-4 are ignored, the profile follows.
    pub fn parse<R: BufRead>(reader: R, layout: MagLayout, spacing: f64) -> Result<Self> {
        let mut layout = layout;
        let mut times = Vec::new();
        let mut profiles = Vec::new();
        let mut shift = Vec::new();
        let mut width = None;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let is_header = trimmed.starts_with('#')
                || split_fields(trimmed).first().is_some_and(|f| f.parse::<f64>().is_err());
            if is_header {
                if idx == 0 {
                    if layout == MagLayout::Auto {
                        layout = detect_layout(trimmed);
                    }
                    continue;
                }
                if trimmed.starts_with('#') {
                    continue;
                }
            }
            let vals = split_fields(trimmed)
                .into_iter()
                .enumerate()
                .map(|(col, f)| {
                    if f.is_empty() && (1..LEADING).contains(&col) {
                        return Ok(f64::NAN);
                    }
                    f.parse::<f64>().map_err(|e| Error::Parse {
                        line: lineno,
                        message: format!("`{f}`: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if let Some(w) = width {
                if vals.len() != w {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("row has {} columns, expected {w}", vals.len()),
                    });
                }
            } else {
                width = Some(vals.len());
            }
            if layout == MagLayout::Auto {
                layout = MagLayout::ShiftAndSpeed;
            }
            let trailing = match layout {
                MagLayout::ShiftAndSpeed => 2,
                _ => 0,
            };
            if vals.len() < LEADING + trailing + 2 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!(
                        "row has {} columns; need time, 3 unused, at least 2 profile samples{}",
                        vals.len(),
                        if trailing > 0 { " and shift/speed" } else { "" }
                    ),
                });
            }
            let end = vals.len() - trailing;
            if let Some(m) = vals[LEADING..end].iter().find(|m| !(m.abs() <= 1.0 + MAG_SLACK)) {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("magnetization {m} outside [-1, 1]"),
                });
            }
            times.push(vals[0]);
            profiles.push(vals[LEADING..end].to_vec());
            if trailing > 0 {
                shift.push(vals[end]);
            }
        }
        let shift = (layout == MagLayout::ShiftAndSpeed && !shift.is_empty()).then_some(shift);
        MagTable::new(times, profiles, shift, spacing)
    }

    pub fn read(path: &Path, layout: MagLayout, spacing: f64) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(std::io::BufReader::new(f), layout, spacing)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Wall centroid of every row, in profile-index units.
    ///
    /// The wall density is the one-cell backward difference of the profile
    /// with a `+1` cell prepended, so the weights telescope to
    /// `1 - m_last`.
    pub fn centroids(&self) -> Result<Vec<f64>> {
        self.profiles
            .iter()
            .enumerate()
            .map(|(row, p)| {
                let mut prev = 1.0;
                let (mut num, mut den) = (0.0, 0.0);
                for (j, &m) in p.iter().enumerate() {
                    let d = prev - m;
                    num += j as f64 * d;
                    den += d;
                    prev = m;
                }
                if den == 0.0 {
                    Err(Error::NoWall { row: row + 1 })
                } else {
                    Ok(num / den)
                }
            })
            .collect()
    }
}

fn detect_layout(header: &str) -> MagLayout {
    let lower = header.to_ascii_lowercase();
    if lower.contains("ext_dwpos") {
        MagLayout::ShiftAndSpeed
    } else if header
        .rsplit([',', '\t'])
        .next()
        .is_some_and(|last| last.to_ascii_lowercase().contains("mag"))
    {
        MagLayout::ProfileOnly
    } else {
        MagLayout::ShiftAndSpeed
    }
}

/// Wall position (m) at each row, relative to the first row's centroid plus
/// the window shift when present.
pub fn extract_position(table: &MagTable) -> Result<Vec<f64>> {
    let c = table.centroids()?;
    let c0 = c[0];
    Ok(c
        .iter()
        .enumerate()
        .map(|(i, ci)| {
            let s = table.shift.as_ref().map_or(0.0, |s| s[i]);
            (ci - c0) * table.spacing + s
        })
        .collect())
}
