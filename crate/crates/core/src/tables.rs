//! Fitted constants per material corner, stored as `.tbl` lookup files.
//!
//! Each file holds one constant: a `#` header naming the five key columns
//! and the constant, then one space-separated row per corner. Six files
//! (`c0..c3`, `drift_const`, `d2`) make up a [`TableSet`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::ModelConstants;
use crate::error::{Error, Result};
use crate::fitting::FittedCorner;

/// Material corner in `.tbl` column units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerKey {
    /// Exchange stiffness × 1e12 (J/m).
    pub aex: f64,
    /// Effective anisotropy field, mT.
    pub b_anis: f64,
    /// Gilbert damping.
    pub alpha: f64,
    /// Saturation magnetization, A/m.
    pub msat: f64,
    /// Track width, nm.
    pub w: f64,
}

pub const KEY_NAMES: [&str; 5] = ["Aex", "Banis", "alpha", "Msat", "W"];

impl CornerKey {
    pub fn new(aex: f64, b_anis: f64, alpha: f64, msat: f64, w: f64) -> Result<Self> {
        let k = CornerKey {
            aex,
            b_anis,
            alpha,
            msat,
            w,
        };
        if k.coords().iter().any(|v| !v.is_finite()) {
            return Err(Error::Table(format!("corner {k} has a non-finite coordinate")));
        }
        if !(w > 0.0 && msat > 0.0) {
            return Err(Error::Table(format!("corner {k} needs W > 0 and Msat > 0")));
        }
        Ok(k)
    }

    pub fn coords(&self) -> [f64; 5] {
        [self.aex, self.b_anis, self.alpha, self.msat, self.w]
    }

    pub fn from_coords(c: [f64; 5]) -> Result<Self> {
        Self::new(c[0], c[1], c[2], c[3], c[4])
    }
}

impl Eq for CornerKey {}

impl Ord for CornerKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coords()
            .iter()
            .zip(other.coords().iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

impl PartialOrd for CornerKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CornerKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Aex={},Banis={},alpha={},Msat={},W={}",
            self.aex, self.b_anis, self.alpha, self.msat, self.w
        )
    }
}

impl FromStr for CornerKey {
    type Err = Error;

    /// `Aex=11,Banis=20,alpha=0.01,Msat=7.95e5,W=100`; all five keys
    /// required, in any order.
    fn from_str(s: &str) -> Result<Self> {
        let mut vals: [Option<f64>; 5] = [None; 5];
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Table(format!("corner entry `{part}` is not key=value")))?;
            let idx = KEY_NAMES
                .iter()
                .position(|n| n.eq_ignore_ascii_case(k.trim()))
                .ok_or_else(|| {
                    Error::Table(format!("unknown corner key `{k}` (expected {})", KEY_NAMES.join(", ")))
                })?;
            if vals[idx].is_some() {
                return Err(Error::Table(format!("corner key `{k}` given twice")));
            }
            vals[idx] = Some(
                v.trim()
                    .parse()
                    .map_err(|_| Error::Table(format!("corner value `{v}` for {k} is not a number")))?,
            );
        }
        let mut c = [0.0; 5];
        for (i, v) in vals.iter().enumerate() {
            c[i] = v.ok_or_else(|| Error::Table(format!("corner is missing {}", KEY_NAMES[i])))?;
        }
        CornerKey::from_coords(c)
    }
}

/// The six per-corner constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstantName {
    C0,
    C1,
    C2,
    C3,
    DriftConst,
    D2,
}

impl ConstantName {
    pub const ALL: [ConstantName; 6] = [
        ConstantName::C0,
        ConstantName::C1,
        ConstantName::C2,
        ConstantName::C3,
        ConstantName::DriftConst,
        ConstantName::D2,
    ];

    /// Column title in the `.tbl` header.
    pub fn label(self) -> &'static str {
        match self {
            ConstantName::C0 => "c0",
            ConstantName::C1 => "c1",
            ConstantName::C2 => "c2",
            ConstantName::C3 => "c3",
            ConstantName::DriftConst => "drift_const",
            ConstantName::D2 => "d2",
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            ConstantName::C0 => "lookup_maxVel_c0.tbl",
            ConstantName::C1 => "lookup_maxVel_c1.tbl",
            ConstantName::C2 => "lookup_maxVel_c2.tbl",
            ConstantName::C3 => "lookup_maxVel_c3.tbl",
            ConstantName::DriftConst => "lookup_drift_const.tbl",
            ConstantName::D2 => "lookup_d2.tbl",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.label() == s)
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Shortest decimal text that parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// One constant over a set of corners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantTable {
    pub name: ConstantName,
    pub rows: BTreeMap<CornerKey, f64>,
}

impl ConstantTable {
    pub fn new(name: ConstantName, rows: BTreeMap<CornerKey, f64>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Table(format!("{} table has no rows", name.label())));
        }
        Ok(ConstantTable { name, rows })
    }

    pub fn header(name: ConstantName) -> String {
        format!("#Aex(*1e12), B_anis, A, Msat, W(nm), {} ", name.label())
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::Table(format!("{} table has no rows", self.name.label())));
        }
        let io = |e| Error::io("<tbl>", e);
        writeln!(w, "{}", Self::header(self.name)).map_err(io)?;
        for (k, v) in &self.rows {
            let cols: Vec<String> = k.coords().iter().chain([v]).map(|x| format_f64(*x)).collect();
            writeln!(w, "{}", cols.join(" ")).map_err(io)?;
        }
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(f);
        self.write(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Parse a `.tbl` file. The constant is named by the last header
    /// column; `expected` overrides a missing header and is checked against
    /// a present one.
    pub fn read<R: BufRead>(reader: R, expected: Option<ConstantName>) -> Result<Self> {
        let mut name = None;
        let mut rows = BTreeMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(h) = t.strip_prefix('#') {
                if name.is_none() {
                    let last = h.rsplit(',').next().unwrap_or("").trim();
                    if let Some(n) = ConstantName::from_label(last) {
                        name = Some(n);
                    }
                }
                continue;
            }
            let vals = t
                .split_whitespace()
                .map(|f| {
                    f.parse::<f64>().map_err(|e| Error::Parse {
                        line: lineno,
                        message: format!("`{f}`: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if vals.len() != 6 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected 6 columns, found {}", vals.len()),
                });
            }
            let key = CornerKey::from_coords([vals[0], vals[1], vals[2], vals[3], vals[4]]).map_err(|e| {
                Error::Parse {
                    line: lineno,
                    message: e.to_string(),
                }
            })?;
            if !vals[5].is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    message: "constant value is not finite".into(),
                });
            }
            if rows.insert(key, vals[5]).is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("duplicate corner {key}"),
                });
            }
        }
        let name = match (name, expected) {
            (Some(n), Some(e)) if n != e => {
                return Err(Error::Table(format!(
                    "header names {} but {} was expected",
                    n.label(),
                    e.label()
                )))
            }
            (Some(n), _) | (None, Some(n)) => n,
            (None, None) => return Err(Error::Table("header does not name the constant".into())),
        };
        ConstantTable::new(name, rows)
    }

    pub fn read_file(path: &Path, expected: Option<ConstantName>) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(f), expected).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })
    }
}

/// The six constants of one corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerConstants {
    pub c: [f64; 4],
    /// ns
    pub drift_const: f64,
    /// 1/ns per A/m²
    pub d2: f64,
}

impl CornerConstants {
    fn to_array(self) -> [f64; 6] {
        [self.c[0], self.c[1], self.c[2], self.c[3], self.drift_const, self.d2]
    }

    fn from_array(a: [f64; 6]) -> Self {
        CornerConstants {
            c: [a[0], a[1], a[2], a[3]],
            drift_const: a[4],
            d2: a[5],
        }
    }

    pub fn model_constants(&self) -> Result<ModelConstants> {
        ModelConstants::new(self.c, d1_from_drift(self.drift_const)?, self.d2)
    }
}

impl From<&FittedCorner> for CornerConstants {
    fn from(f: &FittedCorner) -> Self {
        CornerConstants {
            c: f.c,
            drift_const: f.drift_const,
            d2: f.d2,
        }
    }
}

/// `d1 = 1 / drift_const`, 1/ns.
pub fn d1_from_drift(drift_const: f64) -> Result<f64> {
    if drift_const > 0.0 && drift_const.is_finite() {
        Ok(1.0 / drift_const)
    } else {
        Err(Error::InvalidConstants(format!(
            "drift constant must be positive, got {drift_const}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LookupMode {
    Exact,
    Nearest,
    Multilinear,
}

impl FromStr for LookupMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(LookupMode::Exact),
            "nearest" => Ok(LookupMode::Nearest),
            "multilinear" => Ok(LookupMode::Multilinear),
            _ => Err(Error::Table(format!("unknown lookup mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lookup {
    pub constants: CornerConstants,
    pub mode: LookupMode,
    /// Stored corner used (exact and nearest modes).
    pub corner: Option<CornerKey>,
    /// The query coincides with a stored corner.
    pub on_node: bool,
    /// Key dimensions clamped to the grid hull (multilinear mode).
    pub clamped: Vec<&'static str>,
}

/// All six constant tables over one common set of corners.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSet {
    rows: BTreeMap<CornerKey, CornerConstants>,
}

impl TableSet {
    /// Combine six tables, which must share an identical key set.
    pub fn from_tables(tables: Vec<ConstantTable>) -> Result<Self> {
        let mut slots: [Option<ConstantTable>; 6] = Default::default();
        for t in tables {
            let i = t.name.index();
            if slots[i].is_some() {
                return Err(Error::Table(format!("two {} tables given", t.name.label())));
            }
            slots[i] = Some(t);
        }
        let tables: Vec<ConstantTable> = slots
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| Error::Table(format!("missing {} table", ConstantName::ALL[i].label()))))
            .collect::<Result<_>>()?;
        let keys: BTreeSet<CornerKey> = tables[0].rows.keys().copied().collect();
        for t in &tables[1..] {
            let other: BTreeSet<CornerKey> = t.rows.keys().copied().collect();
            if other != keys {
                let diff: Vec<String> = keys.symmetric_difference(&other).take(3).map(|k| k.to_string()).collect();
                return Err(Error::Table(format!(
                    "{} and {} tables cover different corners (e.g. {})",
                    tables[0].name.label(),
                    t.name.label(),
                    diff.join("; ")
                )));
            }
        }
        let rows = keys
            .into_iter()
            .map(|k| {
                let mut a = [0.0; 6];
                for (i, t) in tables.iter().enumerate() {
                    a[i] = t.rows[&k];
                }
                (k, CornerConstants::from_array(a))
            })
            .collect();
        Ok(TableSet { rows })
    }

    pub fn from_corners(rows: BTreeMap<CornerKey, CornerConstants>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Table("no corners".into()));
        }
        Ok(TableSet { rows })
    }

    pub fn corners(&self) -> impl Iterator<Item = (&CornerKey, &CornerConstants)> {
        self.rows.iter()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn table(&self, name: ConstantName) -> ConstantTable {
        ConstantTable {
            name,
            rows: self
                .rows
                .iter()
                .map(|(k, v)| (*k, v.to_array()[name.index()]))
                .collect(),
        }
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        let tables = ConstantName::ALL
            .iter()
            .map(|&n| ConstantTable::read_file(&dir.join(n.file_name()), Some(n)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_tables(tables)
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for n in ConstantName::ALL {
            self.table(n).write_file(&dir.join(n.file_name()))?;
        }
        Ok(())
    }

    /// Tables generated by the synthetic calibration run shipped with the
    /// crate (see `examples/regenerate_tables.rs`). These are not fitted
    /// micromagnetic values.
    pub fn bundled() -> Self {
        let texts = [
            include_str!("../data/regenerated/lookup_maxVel_c0.tbl"),
            include_str!("../data/regenerated/lookup_maxVel_c1.tbl"),
            include_str!("../data/regenerated/lookup_maxVel_c2.tbl"),
            include_str!("../data/regenerated/lookup_maxVel_c3.tbl"),
            include_str!("../data/regenerated/lookup_drift_const.tbl"),
            include_str!("../data/regenerated/lookup_d2.tbl"),
        ];
        let tables = texts
            .iter()
            .zip(ConstantName::ALL)
            .map(|(t, n)| ConstantTable::read(t.as_bytes(), Some(n)))
            .collect::<Result<Vec<_>>>()
            .expect("bundled tables parse");
        Self::from_tables(tables).expect("bundled tables are consistent")
    }

    /// Union of two sets. A corner present in both must carry identical
    /// constants.
    pub fn merge(&self, other: &TableSet) -> Result<TableSet> {
        let mut rows = self.rows.clone();
        for (k, v) in &other.rows {
            if let Some(prev) = rows.insert(*k, *v) {
                if prev != *v {
                    return Err(Error::Table(format!("corner {k} has conflicting constants")));
                }
            }
        }
        Ok(TableSet { rows })
    }

    pub fn lookup(&self, key: &CornerKey, mode: LookupMode) -> Result<Lookup> {
        if let Some(v) = self.rows.get(key) {
            return Ok(Lookup {
                constants: *v,
                mode,
                corner: Some(*key),
                on_node: true,
                clamped: vec![],
            });
        }
        match mode {
            LookupMode::Exact => Err(Error::MissingCorner(key.to_string())),
            LookupMode::Nearest => Ok(self.nearest(key)),
            LookupMode::Multilinear => self.multilinear(key),
        }
    }

    fn nearest(&self, key: &CornerKey) -> Lookup {
        let mut lo = [f64::INFINITY; 5];
        let mut hi = [f64::NEG_INFINITY; 5];
        for k in self.rows.keys() {
            for (d, v) in k.coords().iter().enumerate() {
                lo[d] = lo[d].min(*v);
                hi[d] = hi[d].max(*v);
            }
        }
        let q = key.coords();
        let mut best: Option<(f64, &CornerKey, &CornerConstants)> = None;
        for (k, v) in &self.rows {
            let c = k.coords();
            let mut dist = 0.0;
            for d in 0..5 {
                let span = hi[d] - lo[d];
                let diff = if span > 0.0 { (q[d] - c[d]) / span } else { 0.0 };
                dist += diff * diff;
            }
            // rows iterate in key order, so the first minimum wins ties
            if best.is_none_or(|(b, _, _)| dist < b) {
                best = Some((dist, k, v));
            }
        }
        let (_, k, v) = best.expect("table set is non-empty");
        Lookup {
            constants: *v,
            mode: LookupMode::Nearest,
            corner: Some(*k),
            on_node: false,
            clamped: vec![],
        }
    }

    fn grid(&self) -> Result<[Vec<f64>; 5]> {
        let mut axes: [Vec<f64>; 5] = Default::default();
        for (d, axis) in axes.iter_mut().enumerate() {
            let set: BTreeSet<u64> = self.rows.keys().map(|k| k.coords()[d].to_bits()).collect();
            let mut vals: Vec<f64> = set.into_iter().map(f64::from_bits).collect();
            vals.sort_by(f64::total_cmp);
            *axis = vals;
        }
        let full: usize = axes.iter().map(Vec::len).product();
        if full != self.rows.len() {
            return Err(Error::Table(format!(
                "stored corners do not form a full grid ({} of {} grid points); use nearest mode",
                self.rows.len(),
                full
            )));
        }
        Ok(axes)
    }

    fn multilinear(&self, key: &CornerKey) -> Result<Lookup> {
        let axes = self.grid()?;
        let q = key.coords();
        let mut clamped = Vec::new();
        // per dimension: (lower index, upper index, weight of upper)
        let mut brackets = [(0usize, 0usize, 0.0f64); 5];
        for d in 0..5 {
            let ax = &axes[d];
            let mut x = q[d];
            if x < ax[0] || x > ax[ax.len() - 1] {
                x = x.clamp(ax[0], ax[ax.len() - 1]);
                clamped.push(KEY_NAMES[d]);
            }
            if ax.len() == 1 {
                brackets[d] = (0, 0, 0.0);
                continue;
            }
            let i = ax.partition_point(|&g| g <= x).clamp(1, ax.len() - 1) - 1;
            let w = (x - ax[i]) / (ax[i + 1] - ax[i]);
            brackets[d] = (i, i + 1, w);
        }
        let mut acc = [0.0; 6];
        for corner in 0..32u32 {
            let mut weight = 1.0;
            let mut c = [0.0; 5];
            for d in 0..5 {
                let (i, j, w) = brackets[d];
                let upper = corner >> d & 1 == 1;
                if upper {
                    weight *= w;
                    c[d] = axes[d][j];
                } else {
                    weight *= 1.0 - w;
                    c[d] = axes[d][i];
                }
            }
            if weight == 0.0 {
                continue;
            }
            let k = CornerKey::from_coords(c)?;
            let v = self.rows[&k].to_array();
            for (a, vi) in acc.iter_mut().zip(v) {
                *a += weight * vi;
            }
        }
        Ok(Lookup {
            constants: CornerConstants::from_array(acc),
            mode: LookupMode::Multilinear,
            corner: None,
            on_node: false,
            clamped,
        })
    }
}

/// The 32 material corners of the micromagnetic sweep behind the tables.
pub fn grid_corners() -> Vec<CornerKey> {
    let mut out = Vec::with_capacity(32);
    for aex in [11.0, 31.0] {
        for b in [20.0, 350.0] {
            for alpha in [0.01, 0.05] {
                for msat in [7.95e5, 1.2e6] {
                    for w in [50.0, 100.0] {
                        out.push(CornerKey::new(aex, b, alpha, msat, w).expect("finite"));
                    }
                }
            }
        }
    }
    out
}
