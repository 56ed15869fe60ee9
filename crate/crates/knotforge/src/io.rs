//! Polygon file formats, canonical JSON reports, and run manifests.
//!
//! Two polygon formats are supported repo-wide:
//! (a) JSON: `{"vertices": [[x, y, z], ...]}` with closure implicit;
//! (b) plain text: one `x y z` triple per line, `#` starts a comment.
//! Writers emit 17 significant digits, enough to round-trip any f64.
//!
//! Reports are canonical JSON: object keys sorted, floats printed as
//! `d.dddddddddddddddde±x`, non-finite values encoded as the strings
//! "inf"/"-inf"/"nan". Two runs of the same build on the same inputs
//! produce byte-identical reports up to the manifest timestamp.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geom::{Point3, PolygonError, PolygonalKnot};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("line {line}: {message}")]
    ParseAt { line: usize, message: String },
    #[error("invalid polygon: {0}")]
    Validation(#[from] PolygonError),
}

/// Output format choice shared by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileFormat {
    Json,
    Text,
}

#[derive(Deserialize)]
struct PolygonFile {
    vertices: Vec<Point3>,
}

/// Parses the JSON polygon format.
pub fn parse_polygon_json(text: &str) -> Result<PolygonalKnot, IoError> {
    let file: PolygonFile =
        serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    Ok(PolygonalKnot::new(file.vertices)?)
}

/// Parses the plain-text polygon format: one `x y z` per line, `#`
/// comments and blank lines ignored.
pub fn parse_polygon_text(text: &str) -> Result<PolygonalKnot, IoError> {
    let mut vertices = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(IoError::ParseAt {
                line: idx + 1,
                message: format!("expected 3 coordinates, found {}", fields.len()),
            });
        }
        let mut coords = [0.0f64; 3];
        for (k, field) in fields.iter().enumerate() {
            coords[k] = field.parse().map_err(|e| IoError::ParseAt {
                line: idx + 1,
                message: format!("bad float {field:?}: {e}"),
            })?;
        }
        vertices.push(Point3::new(coords[0], coords[1], coords[2]));
    }
    Ok(PolygonalKnot::new(vertices)?)
}

/// Loads either polygon format, sniffing JSON by its leading brace.
pub fn load_polygon(path: &Path) -> Result<PolygonalKnot, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    if text.trim_start().starts_with('{') {
        parse_polygon_json(&text)
    } else {
        parse_polygon_text(&text)
    }
}

fn fmt_f64(v: f64) -> String {
    // 17 significant digits round-trip any finite f64.
    format!("{v:.16e}")
}

/// Renders a polygon in the requested format.
pub fn polygon_to_string(p: &PolygonalKnot, format: FileFormat) -> String {
    match format {
        FileFormat::Json => {
            let mut out = String::from("{\"vertices\": [\n");
            for (i, v) in p.vertices().iter().enumerate() {
                let sep = if i + 1 == p.num_vertices() { "" } else { "," };
                let _ = writeln!(
                    out,
                    "  [{}, {}, {}]{sep}",
                    fmt_f64(v.x),
                    fmt_f64(v.y),
                    fmt_f64(v.z)
                );
            }
            out.push_str("]}\n");
            out
        }
        FileFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "# closed polygon, {} vertices", p.num_vertices());
            for v in p.vertices() {
                let _ = writeln!(out, "{} {} {}", fmt_f64(v.x), fmt_f64(v.y), fmt_f64(v.z));
            }
            out
        }
    }
}

pub fn save_polygon(p: &PolygonalKnot, path: &Path, format: FileFormat) -> Result<(), IoError> {
    std::fs::write(path, polygon_to_string(p, format)).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Canonical JSON text of a serde_json value: keys sorted (the default
/// `Value` map is ordered), floats at 17 significant digits.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_canonical(value, &mut out);
    out
}

fn write_canonical(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = num.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                let _ = write!(out, "{}", fmt_f64(num.as_f64().unwrap()));
            }
        }
        Value::String(s) => {
            let _ = write!(out, "{}", serde_json::to_string(s).unwrap());
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}:", serde_json::to_string(key).unwrap());
                write_canonical(item, out);
            }
            out.push('}');
        }
    }
}

/// Serializes any report as canonical JSON with a trailing newline.
pub fn report_to_string<T: Serialize>(report: &T) -> Result<String, IoError> {
    let value = serde_json::to_value(report).map_err(|e| IoError::Parse(e.to_string()))?;
    Ok(canonical_json(&value) + "\n")
}

pub fn save_report<T: Serialize>(report: &T, path: &Path) -> Result<(), IoError> {
    let text = report_to_string(report)?;
    std::fs::write(path, text).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// SHA-256 digest of a file, hex encoded.
pub fn digest_file(path: &Path) -> Result<String, IoError> {
    let bytes = std::fs::read(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hex, "{byte:02x}");
    }
    Ok(hex)
}

/// Input file reference with its content digest at read time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance block embedded in every CLI output. All timing lives inside
/// the `timestamp` field so that comparing reports modulo that one field
/// is exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub inputs: Vec<InputDigest>,
    pub version: String,
    pub seed: Option<u64>,
    pub timestamp: Value,
}

impl RunManifest {
    pub fn new(command: String, config: Value, seed: Option<u64>) -> Self {
        Self {
            command,
            config,
            inputs: Vec::new(),
            version: crate::VERSION.to_string(),
            seed,
            timestamp: Value::Null,
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<(), IoError> {
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: digest_file(path)?,
        });
        Ok(())
    }

    /// Stamps wall-clock data; called once just before writing.
    pub fn stamp(&mut self, wall_seconds: f64) {
        let unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        self.timestamp = serde_json::json!({
            "unix_seconds": unix,
            "wall_seconds": wall_seconds,
        });
    }
}

/// Strips the manifest timestamp (the only run-dependent field) so that
/// deterministic outputs compare byte-for-byte.
pub fn strip_timestamp(mut value: Value) -> Value {
    if let Some(manifest) = value.get_mut("manifest") {
        if let Some(obj) = manifest.as_object_mut() {
            obj.remove("timestamp");
        }
    }
    if let Some(obj) = value.as_object_mut() {
        if obj.contains_key("timestamp") && obj.contains_key("command") {
            obj.remove("timestamp");
        }
    }
    value
}

/// Report equality modulo the manifest timestamp.
pub fn reports_equal_modulo_timestamp(a: &str, b: &str) -> bool {
    let parse = |text: &str| serde_json::from_str::<Value>(text).map(strip_timestamp);
    match (parse(a), parse(b)) {
        (Ok(va), Ok(vb)) => canonical_json(&va) == canonical_json(&vb),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::EnergyReport;
    use crate::geom::regular_ngon;

    #[test]
    fn json_polygon_roundtrip() {
        let g4 = regular_ngon(4).unwrap();
        let text = polygon_to_string(&g4, FileFormat::Json);
        let back = parse_polygon_json(&text).unwrap();
        assert_eq!(back.vertices(), g4.vertices());
        assert!((back.total_length() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn text_format_with_comments_matches_json() {
        let g4 = regular_ngon(4).unwrap();
        let json = parse_polygon_json(&polygon_to_string(&g4, FileFormat::Json)).unwrap();
        let mut text = String::from("# a square\n\n");
        text.push_str(&polygon_to_string(&g4, FileFormat::Text));
        text.push_str("\n# trailing comment\n");
        let from_text = parse_polygon_text(&text).unwrap();
        assert_eq!(from_text.vertices(), json.vertices());
    }

    #[test]
    fn duplicate_consecutive_vertex_is_reported_with_index() {
        let text = "0 0 0\n1 0 0\n1 0 0\n0 1 0\n";
        match parse_polygon_text(text) {
            Err(IoError::Validation(PolygonError::CoincidentConsecutive { index })) => {
                assert_eq!(index, 1)
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn too_few_vertices_is_rejected() {
        assert!(matches!(
            parse_polygon_text("0 0 0\n1 1 1\n"),
            Err(IoError::Validation(PolygonError::TooFewVertices { got: 2 }))
        ));
    }

    #[test]
    fn canonical_json_sorts_keys_and_pins_floats() {
        let value = serde_json::json!({"b": 0.1, "a": {"z": 1, "y": [1.5, 2]}});
        let text = canonical_json(&value);
        assert_eq!(
            text,
            "{\"a\":{\"y\":[1.5000000000000000e0,2],\"z\":1},\"b\":1.0000000000000001e-1}"
        );
    }

    #[test]
    fn report_roundtrip_compares_equal() {
        let report = EnergyReport {
            value: std::f64::consts::PI,
            witness: Some(vec![0, 2]),
            degenerate: false,
            term_count: 12,
        };
        let text = report_to_string(&report).unwrap();
        let back: EnergyReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        // A second serialization is byte-identical.
        assert_eq!(report_to_string(&back).unwrap(), text);
    }

    #[test]
    fn timestamp_is_excluded_from_comparison() {
        let mut m1 = RunManifest::new("energy".into(), serde_json::json!({"kind": "moebius"}), None);
        let mut m2 = m1.clone();
        m1.stamp(0.5);
        std::thread::sleep(std::time::Duration::from_millis(5));
        m2.stamp(0.7);
        let r1 = report_to_string(&m1).unwrap();
        let r2 = report_to_string(&m2).unwrap();
        assert_ne!(r1, r2);
        assert!(reports_equal_modulo_timestamp(&r1, &r2));
    }

    #[test]
    fn digest_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.txt");
        std::fs::write(&path, "0 0 0\n1 0 0\n0 1 0\n").unwrap();
        let d1 = digest_file(&path).unwrap();
        let d2 = digest_file(&path).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(d1.len(), 64);
    }
}
