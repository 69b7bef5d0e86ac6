use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

/// Output directory that remembers the hash of everything written to it.
pub struct OutputDir {
    dir: PathBuf,
    hashes: BTreeMap<String, String>,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            hashes: BTreeMap::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
        self.hashes.insert(name.to_string(), sha256_hex(bytes));
        log::info!("wrote {}", path.display());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes `manifest.json`: command, version, resolved config and the
    /// SHA-256 of every other output.
    pub fn finish(mut self, command: &str, config: &RunConfig) -> Result<(), CliError> {
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            outputs: std::mem::take(&mut self.hashes),
        };
        self.write_json("manifest.json", &manifest)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config: &'a RunConfig,
    outputs: BTreeMap<String, String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
