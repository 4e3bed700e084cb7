//! Helpers shared by the integration test binaries.

use std::fs;
use std::path::PathBuf;

use tandem_core::scenario::Scenario;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.toml"))
}

pub fn load_scenario(name: &str) -> Scenario {
    let path = scenario_path(name);
    let text = fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    Scenario::from_toml_str(&text).unwrap_or_else(|e| panic!("parsing {name}: {e}"))
}
