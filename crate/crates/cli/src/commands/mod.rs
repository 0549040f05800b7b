//! Subcommand implementations.

pub mod influence;
pub mod map;
pub mod oracle;
pub mod polarize;
pub mod report;
pub mod synth;
pub mod tune;

use std::path::Path;

use anyhow::{bail, Context, Result};
use cascades_core::io::RowIssue;

/// Prints one diagnostic line per skipped row; aborts under `--strict`.
pub fn report_skipped(path: &Path, skipped: &[RowIssue], strict: bool) -> Result<()> {
    for issue in skipped {
        eprintln!("warning: {}: {issue}", path.display());
    }
    if !skipped.is_empty() {
        eprintln!(
            "warning: {}: skipped {} malformed row(s)",
            path.display(),
            skipped.len()
        );
        if strict {
            bail!(
                "{}: {} malformed row(s) (strict mode)",
                path.display(),
                skipped.len()
            );
        }
    }
    Ok(())
}

/// Fails early with a clear message when an input file is missing.
pub fn require_input(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("missing input: {} does not exist", path.display());
    }
    Ok(())
}

pub fn ensure_out_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)
        .with_context(|| format!("cannot create output directory {}", path.display()))
}
