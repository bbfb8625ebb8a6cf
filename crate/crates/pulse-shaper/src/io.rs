//! Plain-text exchange format. The first line is a `#` header of
//! space-separated `key=value` pairs, the second names the columns. Numbers
//! use Rust's shortest round-trip formatting, so a write/read cycle is
//! bit-exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::mode::TemporalMode;
use crate::pulse::{ControlPulse, Direction};
use crate::{Result, ShaperError};

fn header(pairs: &[(&str, String)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {}\n", body.join(" "))
}

fn parse_header(line: &str) -> Result<BTreeMap<String, String>> {
    let rest = line.strip_prefix('#').ok_or_else(|| ShaperError::Parse("missing `#` header".into()))?;
    rest.split_whitespace()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| ShaperError::Parse(format!("header entry `{kv}` is not key=value")))
        })
        .collect()
}

fn field<T: std::str::FromStr>(h: &BTreeMap<String, String>, key: &str) -> Result<T> {
    h.get(key)
        .ok_or_else(|| ShaperError::Parse(format!("header lacks `{key}`")))?
        .parse()
        .map_err(|_| ShaperError::Parse(format!("bad value for `{key}`")))
}

type Table = (BTreeMap<String, String>, Vec<Vec<f64>>);

fn rows(text: &str, columns: usize) -> Result<Table> {
    let mut lines = text.lines();
    let h = parse_header(lines.next().unwrap_or(""))?;
    lines.next().ok_or_else(|| ShaperError::Parse("missing column line".into()))?;
    let data = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|e| ShaperError::Parse(format!("`{l}`: {e}")))?;
            if v.len() != columns {
                return Err(ShaperError::Parse(format!("expected {columns} columns in `{l}`")));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((h, data))
}

pub fn mode_to_csv(mode: &TemporalMode) -> String {
    let mut out = header(&[("t0", mode.t0().to_string()), ("dt", mode.dt().to_string()), ("n", mode.len().to_string()), ("units", "us,us^-1/2".into())]);
    out.push_str("t,re,im\n");
    for (t, s) in mode.times().zip(mode.samples()) {
        let _ = writeln!(out, "{t},{},{}", s.re, s.im);
    }
    out
}

/// Grid from the header, samples from the re/im columns. The time column is
/// informational.
pub fn mode_from_csv(text: &str) -> Result<TemporalMode> {
    let (h, data) = rows(text, 3)?;
    let n: usize = field(&h, "n")?;
    if data.len() != n {
        return Err(ShaperError::Parse(format!("header says {n} rows, found {}", data.len())));
    }
    let samples = data.iter().map(|r| Complex64::new(r[1], r[2])).collect();
    TemporalMode::new(field(&h, "t0")?, field(&h, "dt")?, samples)
}

pub fn pulse_to_csv(pulse: &ControlPulse) -> String {
    let direction = match pulse.direction {
        Direction::Emission => "emission",
        Direction::Storage => "storage",
    };
    let onset = pulse.clamp_onset.map_or("none".to_string(), |j| j.to_string());
    let mut out = header(&[
        ("t0", pulse.t0.to_string()),
        ("dt", pulse.dt.to_string()),
        ("n", pulse.len().to_string()),
        ("direction", direction.into()),
        ("compensated", pulse.compensated.to_string()),
        ("clamp_onset", onset),
        ("saturated", pulse.saturated.to_string()),
        ("units", "us,MHz,MHz,rad^2/us".into()),
    ]);
    out.push_str("t,omega_re,omega_im,h\n");
    for (j, (w, h)) in pulse.omega.iter().zip(&pulse.h).enumerate() {
        let _ = writeln!(out, "{},{},{},{h}", pulse.time(j), w.re, w.im);
    }
    out
}

pub fn pulse_from_csv(text: &str) -> Result<ControlPulse> {
    let (h, data) = rows(text, 4)?;
    let n: usize = field(&h, "n")?;
    if data.len() != n {
        return Err(ShaperError::Parse(format!("header says {n} rows, found {}", data.len())));
    }
    let direction = match h.get("direction").map(String::as_str) {
        Some("emission") => Direction::Emission,
        Some("storage") => Direction::Storage,
        other => return Err(ShaperError::Parse(format!("bad direction {other:?}"))),
    };
    let clamp_onset = match h.get("clamp_onset").map(String::as_str) {
        Some("none") => None,
        _ => Some(field(&h, "clamp_onset")?),
    };
    Ok(ControlPulse {
        direction,
        t0: field(&h, "t0")?,
        dt: field(&h, "dt")?,
        omega: data.iter().map(|r| Complex64::new(r[1], r[2])).collect(),
        h: data.iter().map(|r| r[3]).collect(),
        compensated: field(&h, "compensated")?,
        clamp_onset,
        saturated: field(&h, "saturated")?,
    })
}

pub fn write_mode(path: impl AsRef<Path>, mode: &TemporalMode) -> Result<()> {
    Ok(std::fs::write(path, mode_to_csv(mode))?)
}

pub fn read_mode(path: impl AsRef<Path>) -> Result<TemporalMode> {
    mode_from_csv(&std::fs::read_to_string(path)?)
}

pub fn write_pulse(path: impl AsRef<Path>, pulse: &ControlPulse) -> Result<()> {
    Ok(std::fs::write(path, pulse_to_csv(pulse))?)
}

pub fn read_pulse(path: impl AsRef<Path>) -> Result<ControlPulse> {
    pulse_from_csv(&std::fs::read_to_string(path)?)
}
