//! Canonical JSON reports: sorted keys, 17-significant-digit floats, no
//! NaN. Identical runs must produce byte-identical files, so no serde
//! float shortest-printing is used.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

#[derive(Debug, Clone)]
pub enum Value {
    Str(String),
    Float(f64),
    UInt(u64),
    Bool(bool),
    List(Vec<Value>),
    Map(BTreeMap<String, Value>),
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::UInt(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::UInt(x as u64)
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub module: String,
    pub op: String,
    pub config_hash: String,
    pub form_id: String,
    pub params: BTreeMap<String, Value>,
    pub results: BTreeMap<String, Value>,
    pub flags: Vec<String>,
}

impl Report {
    pub fn new(module: &str, op: &str, config_hash: &str, form_id: &str) -> Self {
        Report {
            module: module.to_string(),
            op: op.to_string(),
            config_hash: config_hash.to_string(),
            form_id: form_id.to_string(),
            params: BTreeMap::new(),
            results: BTreeMap::new(),
            flags: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.insert(key.to_string(), value.into());
        self
    }

    /// Canonical serialization; refuses non-finite floats.
    pub fn to_json(&self) -> Result<String, String> {
        let mut root: BTreeMap<String, Value> = BTreeMap::new();
        root.insert(
            "tool_version".into(),
            Value::Str(env!("CARGO_PKG_VERSION").to_string()),
        );
        root.insert("config_hash".into(), Value::Str(self.config_hash.clone()));
        root.insert("module".into(), Value::Str(self.module.clone()));
        root.insert("op".into(), Value::Str(self.op.clone()));
        root.insert("form_id".into(), Value::Str(self.form_id.clone()));
        root.insert("params".into(), Value::Map(self.params.clone()));
        root.insert("results".into(), Value::Map(self.results.clone()));
        root.insert(
            "flags".into(),
            Value::List(self.flags.iter().map(|f| Value::Str(f.clone())).collect()),
        );
        let mut out = String::new();
        write_value(&mut out, &Value::Map(root), 0)?;
        out.push('\n');
        Ok(out)
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) -> Result<(), String> {
    match v {
        Value::Str(s) => {
            out.push('"');
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    '\r' => out.push_str("\\r"),
                    c if (c as u32) < 0x20 => {
                        let _ = write!(out, "\\u{:04x}", c as u32);
                    }
                    c => out.push(c),
                }
            }
            out.push('"');
        }
        Value::Float(x) => {
            if !x.is_finite() {
                return Err(format!("refusing to serialize non-finite float {x}"));
            }
            let _ = write!(out, "{:.16e}", x);
        }
        Value::UInt(x) => {
            let _ = write!(out, "{x}");
        }
        Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Value::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, indent)?;
            }
            out.push(']');
        }
        Value::Map(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return Ok(());
            }
            out.push_str("{\n");
            let pad = "  ".repeat(indent + 1);
            for (i, (k, val)) in map.iter().enumerate() {
                if i > 0 {
                    out.push_str(",\n");
                }
                out.push_str(&pad);
                let _ = write!(out, "\"{k}\": ");
                write_value(out, val, indent + 1)?;
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
    Ok(())
}

/// Write the canonical JSON to `path`; same report twice gives identical
/// bytes, and non-finite values are refused with a diagnostic.
pub fn export_report(report: &Report, path: &Path) -> io::Result<()> {
    let json = report
        .to_json()
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, json)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
