pub mod behavior;
pub mod decompose;
pub mod examples;
pub mod info;
pub mod render;
pub mod simulate;
pub mod validate;

use std::path::Path;

use crate::error::CliResult;

pub(crate) fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|e| crate::error::CliError::input(format!("{}: {e}", path.display())))
}
