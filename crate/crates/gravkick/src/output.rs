//! Atomic multi-file output.
//!
//! Every file is first written to a temporary sibling and only renamed into
//! place once all of them are complete. If any step fails, files already
//! renamed in this commit are removed again and the rest are discarded.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

#[derive(Debug, Default)]
pub struct OutputBundle {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl OutputBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, path: impl Into<PathBuf>, contents: impl Into<Vec<u8>>) -> &mut Self {
        self.files.push((path.into(), contents.into()));
        self
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    /// Writes every file or none of them.
    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut staged = Vec::with_capacity(self.files.len());
        for (path, bytes) in &self.files {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
                _ => PathBuf::from("."),
            };
            std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
            let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
            tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
            tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
            staged.push((tmp, path.clone()));
        }
        let mut done: Vec<PathBuf> = Vec::with_capacity(staged.len());
        for (tmp, path) in staged {
            if let Err(e) = tmp.persist(&path) {
                for p in &done {
                    let _ = std::fs::remove_file(p);
                }
                return Err(CliError::io(&path, e.error));
            }
            done.push(path);
        }
        Ok(done)
    }
}
