//! Output directory with atomic file replacement.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub struct OutputDir {
    dir: PathBuf,
    verbose: bool,
}

impl OutputDir {
    pub fn create(dir: &Path, verbose: bool) -> CliResult<Self> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Output(format!("cannot create {}: {e}", dir.display())))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            verbose,
        })
    }

    /// Writes to a temporary file in the same directory and renames it over
    /// `name`, so readers never see a partial file.
    pub fn write_bytes(&self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let target = self.dir.join(name);
        let fail =
            |e: std::io::Error| CliError::Output(format!("cannot write {}: {e}", target.display()));
        let mut tmp = tempfile::Builder::new()
            .prefix(&format!(".{name}."))
            .tempfile_in(&self.dir)
            .map_err(fail)?;
        tmp.write_all(bytes).map_err(fail)?;
        tmp.as_file().sync_all().map_err(fail)?;
        tmp.persist(&target).map_err(|e| fail(e.error))?;
        if self.verbose {
            eprintln!("wrote {}", target.display());
        }
        Ok(())
    }

    /// Renders with one of the library's CSV writers.
    pub fn write_csv(
        &self,
        name: &str,
        render: impl FnOnce(&mut Vec<u8>) -> nvespin::Result<()>,
    ) -> CliResult<()> {
        let mut buf = Vec::new();
        render(&mut buf).map_err(|e| CliError::Output(format!("cannot render {name}: {e}")))?;
        self.write_bytes(name, &buf)
    }

    pub fn write_json(&self, name: &str, value: &impl Serialize) -> CliResult<()> {
        let mut buf = serde_json::to_vec_pretty(value)
            .map_err(|e| CliError::Output(format!("cannot render {name}: {e}")))?;
        buf.push(b'\n');
        self.write_bytes(name, &buf)
    }
}
