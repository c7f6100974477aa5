use std::path::Path;

use tmkit::bundled::{self, Loaded};
use tmkit::dsl::{self, Diagnostic, Document, SourceText};
use tmkit::event::CatalogOptions;
use tmkit::validate_static;

use crate::error::{CliError, CliResult};

/// Reads `spec`, which is a file path or `bundled:NAME`.
pub fn read(spec: &str) -> CliResult<SourceText> {
    if let Some(name) = spec.strip_prefix("bundled:") {
        return bundled::get(name).map(|b| b.text()).ok_or_else(|| {
            CliError::input(format!(
                "no bundled model named `{name}` (see `tmkit examples`)"
            ))
        });
    }
    SourceText::from_path(Path::new(spec)).map_err(|e| CliError::input(format!("{spec}: {e}")))
}

pub fn diagnostics(origin: &str, diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("{origin}:{d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn parse(src: &SourceText) -> CliResult<Document> {
    dsl::parse(src).map_err(|d| CliError::input(diagnostics(&src.origin, &d)))
}

/// Parses, validates and builds catalog and behavior graph. Static
/// violations are failures; everything else wrong with the input is an
/// input error.
pub fn load(spec: &str, options: CatalogOptions) -> CliResult<Loaded> {
    let src = read(spec)?;
    let doc = parse(&src)?;
    let report = validate_static(&doc.model);
    if !report.is_empty() {
        return Err(CliError::failure(
            format!("{}: model is invalid\n{report}", src.origin)
                .trim_end()
                .to_string(),
        ));
    }
    bundled::assemble(doc, options).map_err(|e| CliError::input(format!("{}: {e}", src.origin)))
}
