//! Scenario loading with `--set key=value` overrides applied to the parsed
//! TOML document before deserialization, so overridden configs go through
//! exactly the same schema validation as written ones.

use anyhow::{anyhow, Context, Result};
use std::path::Path;

use tandem_core::scenario::Scenario;
use tandem_core::SimError;

/// Parse the value side of an override as a TOML value, falling back to a
/// bare string ("--set secondary.material=cloth" needs no quotes).
fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<toml::Table>() {
        Ok(mut table) => table.remove("v").expect("key v exists"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Set a dotted path like `primary.dt` inside the document, creating
/// intermediate tables as needed.
fn apply_set(root: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| anyhow!("--set expects KEY=VALUE, got '{assignment}'"))?;
    let segments: Vec<&str> = key.trim().split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(anyhow!("--set key '{key}' has an empty path segment"));
    }
    let mut table = root;
    for segment in &segments[..segments.len() - 1] {
        table = table
            .entry(segment.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| anyhow!("--set key '{key}': '{segment}' is not a table"))?;
    }
    table.insert(segments.last().unwrap().to_string(), parse_value(raw.trim()));
    Ok(())
}

/// Load a scenario file and apply overrides. A missing or unreadable file is
/// reported as a parse error so it maps to the parse exit code.
pub fn load_scenario(
    path: &Path,
    sets: &[String],
    dt: Option<f64>,
    duration: Option<f64>,
) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        SimError::Parse(format!("cannot read scenario {}: {e}", path.display()))
    })?;
    let mut table: toml::Table = text
        .parse()
        .map_err(|e| SimError::Parse(format!("{}: {e}", path.display())))?;
    for assignment in sets {
        apply_set(&mut table, assignment)?;
    }
    if let Some(dt) = dt {
        for section in ["primary", "secondary"] {
            if let Some(value) = table.get_mut(section).and_then(|v| v.as_table_mut()) {
                value.insert("dt".to_string(), toml::Value::Float(dt));
            }
        }
    }
    if let Some(duration) = duration {
        table.insert("duration".to_string(), toml::Value::Float(duration));
    }
    let rendered = toml::to_string(&table).context("re-rendering overridden scenario")?;
    let scenario = Scenario::from_toml_str(&rendered)?;
    Ok(scenario)
}
