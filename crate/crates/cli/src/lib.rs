//! JSON front end for `hfcert`: document schemas, command execution and
//! exit-status mapping.

pub mod error;
pub mod run;
pub mod schema;

pub use error::{CliError, Status};
pub use run::{run, Command, Outcome, RunConfig, SyntheticShape};

use std::io::Write;
use std::path::Path;

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never observe a partial document.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
