use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use tmkit::engine::FiringOrder;

use crate::error::{CliError, CliResult};

/// Run description read from a TOML file. Relative paths resolve against
/// the manifest's directory.
///
/// ```toml
/// model = "bundled:coin"
/// output = "out"
///
/// [config]
/// seed = 1
/// max_ticks = 500
/// runs = 1
/// firing_order = "declaration"
///
/// [set]
/// p_face = 0.5
/// ```
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub model: Option<String>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub config: ManifestConfig,
    #[serde(default)]
    pub set: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestConfig {
    pub seed: Option<u64>,
    pub max_ticks: Option<u64>,
    pub runs: Option<u64>,
    pub firing_order: Option<FiringOrder>,
}

impl Manifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let mut m: Manifest = toml::from_str(&text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(model) = &m.model {
            if !model.starts_with("bundled:") && Path::new(model).is_relative() {
                m.model = Some(base.join(model).display().to_string());
            }
        }
        if let Some(out) = &m.output {
            if out.is_relative() {
                m.output = Some(base.join(out));
            }
        }
        Ok(m)
    }
}
