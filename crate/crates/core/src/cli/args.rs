//! Value parsers for command-line arguments.

use serde::{Deserialize, Serialize};

use crate::electrical::TerminalDrive;

/// Duration with a mandatory unit suffix (`ns`, `us`, `s`), returned in ns.
pub fn parse_duration(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (num, scale) = if let Some(n) = s.strip_suffix("ns") {
        (n, 1.0)
    } else if let Some(n) = s.strip_suffix("us") {
        (n, 1e3)
    } else if let Some(n) = s.strip_suffix('s') {
        (n, 1e9)
    } else {
        return Err(format!("duration `{s}` needs a unit suffix (ns, us or s)"));
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("duration `{s}` is not a number followed by a unit"))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(format!("duration `{s}` must be finite and non-negative"));
    }
    Ok(v * scale)
}

/// `J=<A/m²>,tau=<duration>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub j: f64,
    /// ns
    pub tau: f64,
}

pub fn parse_pulse(s: &str) -> Result<PulseSpec, String> {
    let mut j = None;
    let mut tau = None;
    for part in s.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("pulse field `{part}` is not key=value"))?;
        match k.trim() {
            "J" => j = Some(v.trim().parse::<f64>().map_err(|_| format!("J=`{v}` is not a number"))?),
            "tau" => tau = Some(parse_duration(v)?),
            other => return Err(format!("unknown pulse field `{other}` (expected J, tau)")),
        }
    }
    let j = j.ok_or("pulse needs J=")?;
    let tau = tau.ok_or("pulse needs tau=")?;
    if !j.is_finite() || !(tau > 0.0) {
        return Err(format!("pulse `{s}` needs a finite J and a positive tau"));
    }
    Ok(PulseSpec { j, tau })
}

/// `c0,c1,c2,c3,d1,d2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsSpec(pub [f64; 6]);

pub fn parse_constants(s: &str) -> Result<ConstantsSpec, String> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
        .collect::<Result<_, _>>()?;
    let arr: [f64; 6] = vals
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 6 values c0,c1,c2,c3,d1,d2, got {}", v.len()))?;
    Ok(ConstantsSpec(arr))
}

/// `P=<V>,Q=<V>[,RA=<V>]`; omitted terminals float.
pub fn parse_drive(s: &str) -> Result<TerminalDrive, String> {
    let mut d = TerminalDrive::default();
    for part in s.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("drive field `{part}` is not key=value"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a voltage"))?;
        match k.trim() {
            "P" => d.p = Some(v),
            "Q" => d.q = Some(v),
            "RA" => d.ra = Some(v),
            other => return Err(format!("unknown terminal `{other}` (expected P, Q, RA)")),
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn durations() {
        assert_eq!(parse_duration("100ns").unwrap(), 100.0);
        assert_eq!(parse_duration("1.5us").unwrap(), 1500.0);
        assert!((parse_duration("1e-7s").unwrap() - 100.0).abs() < 1e-9);
        assert!(parse_duration("100").is_err());
        assert!(parse_duration("-1ns").is_err());
        assert!(parse_duration("ns").is_err());
    }

    #[test]
    fn pulses() {
        let p = parse_pulse("J=4e9,tau=100ns").unwrap();
        assert_eq!((p.j, p.tau), (4e9, 100.0));
        assert!(parse_pulse("J=4e9,tau=100").is_err());
        assert!(parse_pulse("J=4e9").is_err());
        assert!(parse_pulse("J=4e9,tau=1ns,x=2").is_err());
    }

    #[test]
    fn constants_and_drive() {
        assert_eq!(parse_constants("1,2,3,4,5,6").unwrap().0, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert!(parse_constants("1,2,3").is_err());
        let d = parse_drive("P=1,Q=0").unwrap();
        assert_eq!((d.p, d.q, d.ra), (Some(1.0), Some(0.0), None));
        assert!(parse_drive("X=1").is_err());
    }
}
