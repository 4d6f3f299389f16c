//! Input loading. A source is either a path or `@name` for bundled data.

use std::path::Path;

use confuse_core::expansion::FunctionTable;
use confuse_core::protocol::{bundled, bundled_tables, TabulatedScheme};
use confuse_core::structures::ReferenceTable;
use confuse_core::verify::InputDistribution;
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::CliError;
use crate::manifest::RunManifest;

fn bundled_scheme(name: &str) -> Option<&'static str> {
    match name {
        "table_masking_2x3" => Some(bundled::TABLE_MASKING_2X3),
        "reveal_key" => Some(bundled::REVEAL_KEY),
        _ => None,
    }
}

fn read(
    manifest: &mut RunManifest,
    role: &str,
    source: &str,
    bundled: impl Fn(&str) -> Option<&'static str>,
) -> Result<String, CliError> {
    let text = match source.strip_prefix('@') {
        Some(name) => bundled(name)
            .ok_or_else(|| CliError::NotFound(format!("no bundled input named {name}")))?
            .to_string(),
        None => {
            let path = Path::new(source);
            if !path.exists() {
                return Err(CliError::NotFound(format!("{source}: no such file")));
            }
            std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{source}: {e}")))?
        }
    };
    manifest.record_input(&format!("{role}={source}"), text.as_bytes());
    Ok(text)
}

/// Accepts the bare object or a CLI output wrapping it under `key`.
fn parse<T: DeserializeOwned>(source: &str, text: &str, key: &str) -> Result<T, CliError> {
    let bad = |e: serde_json::Error| CliError::Input(format!("{source}: {e}"));
    let value: Value = serde_json::from_str(text).map_err(bad)?;
    let inner = match value.get(key) {
        Some(v) if value.get("manifest").is_some() => v.clone(),
        _ => value,
    };
    serde_json::from_value(inner).map_err(bad)
}

pub fn table(manifest: &mut RunManifest, source: &str) -> Result<FunctionTable, CliError> {
    let tables = bundled_tables();
    let text = read(manifest, "table", source, |n| tables.get(n).copied())?;
    parse(source, &text, "table")
}

pub fn scheme(manifest: &mut RunManifest, source: &str) -> Result<TabulatedScheme, CliError> {
    let text = read(manifest, "scheme", source, bundled_scheme)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{source}: {e}")))?;
    let inner = match value.get("scheme") {
        Some(v) if value.get("manifest").is_some() => v.to_string(),
        _ => text,
    };
    TabulatedScheme::from_json(&inner).map_err(|e| CliError::Input(format!("{source}: {e}")))
}

pub fn distribution(
    manifest: &mut RunManifest,
    source: &str,
) -> Result<InputDistribution, CliError> {
    let text = read(manifest, "input_distribution", source, |_| None)?;
    parse(source, &text, "input_distribution")
}

pub fn reference(
    manifest: &mut RunManifest,
    source: Option<&str>,
    field: bool,
) -> Result<ReferenceTable, CliError> {
    match source {
        None => {
            let t = if field {
                ReferenceTable::bundled_fields()
            } else {
                ReferenceTable::bundled_rings()
            };
            manifest.record_input(
                &format!("reference=@{}", t.kind),
                serde_json::to_string(&t).unwrap_or_default().as_bytes(),
            );
            Ok(t)
        }
        Some(path) => {
            let text = read(manifest, "reference", path, |_| None)?;
            parse(path, &text, "reference")
        }
    }
}
