//! CSV files with `#` header blocks, profile parsing and `key = value`
//! configuration files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::RadialProfile;

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Header block lines `# key: value`.
pub type Header = Vec<(String, String)>;

pub fn render_csv(header: &Header, columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format_float(*x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, header: &Header, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    std::fs::write(path, render_csv(header, columns, rows))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Header,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn parse_csv(text: &str) -> Result<Table> {
    let mut header = Vec::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once(':') {
                header.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        match &columns {
            None => columns = Some(line.split(',').map(|c| c.trim().to_string()).collect()),
            Some(cols) => {
                let cells: Vec<&str> = line.split(',').map(str::trim).collect();
                if cells.len() != cols.len() {
                    return Err(Error::MalformedCsv {
                        line: lineno,
                        reason: format!("expected {} fields, found {}", cols.len(), cells.len()),
                    });
                }
                let row: std::result::Result<Vec<f64>, _> = cells.iter().map(|c| c.parse::<f64>()).collect();
                rows.push(row.map_err(|e| Error::MalformedCsv { line: lineno, reason: e.to_string() })?);
            }
        }
    }
    let columns = columns.ok_or(Error::MalformedCsv { line: 0, reason: "missing column header".into() })?;
    Ok(Table { header, columns, rows })
}

/// Profile from a CSV with columns `r,re[,im]`.
pub fn parse_profile(text: &str, d: u32) -> Result<RadialProfile> {
    let table = parse_csv(text)?;
    let cols: Vec<&str> = table.columns.iter().map(String::as_str).collect();
    let has_im = match cols.as_slice() {
        ["r", "re"] => false,
        ["r", "re", "im"] => true,
        _ => {
            return Err(Error::MalformedCsv {
                line: table.header.len() + 1,
                reason: format!("expected columns r,re[,im], found {}", cols.join(",")),
            })
        }
    };
    if table.rows.is_empty() {
        return Err(Error::MalformedCsv { line: 0, reason: "no data rows".into() });
    }
    let r = table.rows.iter().map(|row| row[0]).collect();
    let values = table.rows.iter().map(|row| Complex64::new(row[1], if has_im { row[2] } else { 0.0 })).collect();
    RadialProfile::from_nodes(d, r, values)
}

pub fn parse_profile_csv(path: &Path, d: u32) -> Result<RadialProfile> {
    parse_profile(&std::fs::read_to_string(path)?, d)
}

/// Rows `(r, re, im)` of a profile.
pub fn profile_rows(profile: &RadialProfile) -> Vec<Vec<f64>> {
    profile.r.iter().zip(&profile.values).map(|(r, z)| vec![*r, z.re, z.im]).collect()
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        let key = k.trim().to_string();
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", i + 1)));
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key '{key}'", i + 1)));
        }
    }
    Ok(out)
}
