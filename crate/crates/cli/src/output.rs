//! Versioned JSON envelopes and report output.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::Value;

/// Prefix of every `schema` tag; the files live in `schemas/`.
pub const SCHEMA_PREFIX: &str = "nonlocal-ot";

/// Tag `body` with its schema and the tool version.
pub fn envelope(kind: &str, mut body: Value) -> Value {
    let obj = body.as_object_mut().expect("reports are JSON objects");
    obj.insert("schema".into(), Value::from(format!("{SCHEMA_PREFIX}/{kind}/v1")));
    obj.insert("tool_version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    body
}

fn render(doc: &Value) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(doc)? + "\n")
}

pub fn write(path: &Path, doc: &Value) -> anyhow::Result<()> {
    std::fs::write(path, render(doc)?).with_context(|| format!("writing {}", path.display()))
}

/// To `out` if given, else stdout.
pub fn emit(out: Option<&PathBuf>, doc: &Value) -> anyhow::Result<()> {
    match out {
        Some(p) => write(p, doc),
        None => {
            std::io::stdout().write_all(render(doc)?.as_bytes())?;
            Ok(())
        }
    }
}
