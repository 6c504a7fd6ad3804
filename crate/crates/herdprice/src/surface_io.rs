//! Reading and writing implied-volatility surfaces.
//!
//! CSV: optional `# key: value` metadata lines (`label`, `as_of`, `spot`),
//! then a header containing `maturity_years,strike_over_spot,implied_vol`
//! (other columns are ignored) and one row per point.
//!
//! JSON: `{label, as_of, spot, points: [{maturity_years, strike_over_spot,
//! implied_vol}]}`, described by `schemas/vol_surface.schema.json`. Writers
//! may add a `config` member echoing the run that produced the file.
//!
//! Numbers are written with nine significant digits, so a file read and
//! written again is reproduced byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use herdprice_core::surface::{SurfacePoint, VolSurface};
use serde::{Deserialize, Serialize};

use crate::format::fmt_sig;

pub const CSV_COLUMNS: [&str; 3] = ["maturity_years", "strike_over_spot", "implied_vol"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceFormat {
    Csv,
    Json,
}

impl SurfaceFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(SurfaceFormat::Csv),
            "json" => Some(SurfaceFormat::Json),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            SurfaceFormat::Csv => "csv",
            SurfaceFormat::Json => "json",
        }
    }
}

impl FromStr for SurfaceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(SurfaceFormat::Csv),
            "json" => Ok(SurfaceFormat::Json),
            other => Err(format!("unknown surface format {other:?} (expected csv or json)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SurfaceError {
    #[error("{origin}: {source}")]
    Io {
        origin: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: line {line}, {field}: {message}")]
    Parse { origin: String, line: u64, field: String, message: String },
    #[error("{origin}: invalid surface: {}", problems.join("; "))]
    Invalid { origin: String, problems: Vec<String> },
    #[error("{origin}: cannot infer the surface format, use a .csv or .json extension")]
    UnknownFormat { origin: String },
}

/// Reads a surface, choosing the format from the file extension.
pub fn read_surface(path: &Path) -> Result<VolSurface, SurfaceError> {
    let origin = path.display().to_string();
    let format =
        SurfaceFormat::from_path(path).ok_or_else(|| SurfaceError::UnknownFormat { origin: origin.clone() })?;
    let text = fs::read_to_string(path).map_err(|source| SurfaceError::Io { origin: origin.clone(), source })?;
    let default_label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    match format {
        SurfaceFormat::Csv => parse_csv(&text, &origin, &default_label),
        SurfaceFormat::Json => parse_json(&text, &origin),
    }
}

/// Parses CSV text; `default_label` is used when no `# label:` line exists.
pub fn parse_csv(text: &str, origin: &str, default_label: &str) -> Result<VolSurface, SurfaceError> {
    let parse_err = |line: u64, field: &str, message: String| SurfaceError::Parse {
        origin: origin.to_string(),
        line,
        field: field.to_string(),
        message,
    };
    let mut label = default_label.to_string();
    let mut as_of = String::new();
    let mut spot = 1.0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let Some(meta) = line.strip_prefix('#') else { break };
        let Some((key, value)) = meta.split_once(':') else { continue };
        let value = value.trim();
        match key.trim() {
            "label" => label = value.to_string(),
            "as_of" => as_of = value.to_string(),
            "spot" => {
                spot = value.parse().map_err(|_| parse_err(i as u64 + 1, "spot", format!("not a number: {value:?}")))?
            }
            _ => {}
        }
    }

    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(csv_line(&e), "header", e.to_string()))?.clone();
    let header_line = reader.position().line().max(1);
    let mut columns = [0usize; 3];
    for (slot, name) in columns.iter_mut().zip(CSV_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(header_line, "header", format!("missing column {name:?}")))?;
    }

    let mut points = Vec::new();
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(csv_line(&e), "record", e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let mut values = [0.0; 3];
        for ((v, &col), name) in values.iter_mut().zip(&columns).zip(CSV_COLUMNS) {
            let field = record.get(col).ok_or_else(|| parse_err(line, name, "missing value".into()))?;
            *v = field.parse().map_err(|_| parse_err(line, name, format!("not a number: {field:?}")))?;
        }
        points.push(SurfacePoint { maturity_years: values[0], strike_over_spot: values[1], implied_vol: values[2] });
        lines.push(line);
    }
    let surface = VolSurface::new(label, as_of, spot, points);
    check(surface, origin, |i| format!("line {}", lines[i]))
}

fn csv_line(e: &csv::Error) -> u64 {
    e.position().map(|p| p.line()).unwrap_or(0)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceJson {
    label: String,
    #[serde(default)]
    as_of: String,
    spot: f64,
    points: Vec<PointJson>,
    #[serde(default)]
    #[allow(dead_code)]
    config: Option<serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointJson {
    maturity_years: f64,
    strike_over_spot: f64,
    implied_vol: f64,
}

pub fn parse_json(text: &str, origin: &str) -> Result<VolSurface, SurfaceError> {
    let raw: SurfaceJson = serde_json::from_str(text).map_err(|e| SurfaceError::Parse {
        origin: origin.to_string(),
        line: e.line() as u64,
        field: format!("column {}", e.column()),
        message: e.to_string(),
    })?;
    let points = raw
        .points
        .into_iter()
        .map(|p| SurfacePoint {
            maturity_years: p.maturity_years,
            strike_over_spot: p.strike_over_spot,
            implied_vol: p.implied_vol,
        })
        .collect();
    check(VolSurface::new(raw.label, raw.as_of, raw.spot, points), origin, |i| format!("points[{i}]"))
}

fn check(surface: VolSurface, origin: &str, locate: impl Fn(usize) -> String) -> Result<VolSurface, SurfaceError> {
    let issues = surface.issues();
    if issues.is_empty() {
        return Ok(surface);
    }
    let problems = issues
        .iter()
        .map(|issue| match issue.index {
            Some(i) => format!("{}: {}", locate(i), issue.message),
            None => issue.message.clone(),
        })
        .collect();
    Err(SurfaceError::Invalid { origin: origin.to_string(), problems })
}

fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

/// CSV text of a surface. `config` is echoed as a `# config:` line.
pub fn to_csv(surface: &VolSurface, config: Option<&serde_json::Value>) -> String {
    let mut out = String::new();
    writeln!(out, "# label: {}", one_line(&surface.label)).unwrap();
    if !surface.as_of.is_empty() {
        writeln!(out, "# as_of: {}", one_line(&surface.as_of)).unwrap();
    }
    writeln!(out, "# spot: {}", fmt_sig(surface.spot)).unwrap();
    if let Some(c) = config {
        writeln!(out, "# config: {c}").unwrap();
    }
    writeln!(out, "{}", CSV_COLUMNS.join(",")).unwrap();
    for p in &surface.points {
        writeln!(out, "{},{},{}", fmt_sig(p.maturity_years), fmt_sig(p.strike_over_spot), fmt_sig(p.implied_vol))
            .unwrap();
    }
    out
}

/// JSON text of a surface. `config` is embedded as a `config` member.
pub fn to_json(surface: &VolSurface, config: Option<&serde_json::Value>) -> String {
    let string = |s: &str| serde_json::to_string(s).unwrap();
    let mut out = String::from("{\n");
    writeln!(out, "  \"label\": {},", string(&surface.label)).unwrap();
    writeln!(out, "  \"as_of\": {},", string(&surface.as_of)).unwrap();
    writeln!(out, "  \"spot\": {},", fmt_sig(surface.spot)).unwrap();
    if surface.points.is_empty() {
        out.push_str("  \"points\": []");
    } else {
        out.push_str("  \"points\": [\n");
        for (i, p) in surface.points.iter().enumerate() {
            write!(
                out,
                "    {{\"maturity_years\": {}, \"strike_over_spot\": {}, \"implied_vol\": {}}}",
                fmt_sig(p.maturity_years),
                fmt_sig(p.strike_over_spot),
                fmt_sig(p.implied_vol)
            )
            .unwrap();
            out.push_str(if i + 1 < surface.points.len() { ",\n" } else { "\n" });
        }
        out.push_str("  ]");
    }
    if let Some(c) = config {
        let body = serde_json::to_string_pretty(c).unwrap().replace('\n', "\n  ");
        write!(out, ",\n  \"config\": {body}").unwrap();
    }
    out.push_str("\n}\n");
    out
}

pub fn write_surface(surface: &VolSurface, path: &Path, format: SurfaceFormat) -> std::io::Result<()> {
    write_surface_with_config(surface, path, format, None)
}

pub fn write_surface_with_config(
    surface: &VolSurface,
    path: &Path,
    format: SurfaceFormat,
    config: Option<&serde_json::Value>,
) -> std::io::Result<()> {
    let text = match format {
        SurfaceFormat::Csv => to_csv(surface, config),
        SurfaceFormat::Json => to_json(surface, config),
    };
    fs::write(path, text)
}
