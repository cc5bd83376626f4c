//! On-disk formats: automaton, representation and character JSON, the
//! JSON-lines orbit database, and the header shared by every output file.

mod automaton;
mod character;
mod database;
mod representation;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub use automaton::{automaton_from_json, automaton_to_json, load_automaton, AutomatonFile, ValidationSummary};
pub use character::{character_from_json, character_to_json, load_character, CharacterFile};
pub use database::{
    load_database, read_database, save_database, CutoffField, DatabaseHeader, DatabaseWriter, RecordLine, DATABASE_FORMAT,
};
pub use representation::{load_representation, rep_digest, representation_from_json, representation_to_json, RepresentationFile};

pub const TOOL: &str = "anosov-zeta";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance block embedded in every output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub config_digest: String,
}

impl Meta {
    pub fn new(config_digest: impl Into<String>) -> Self {
        Meta { tool: TOOL.into(), version: VERSION.into(), config_digest: config_digest.into() }
    }

    /// First line of CSV outputs.
    pub fn csv_comment(&self) -> String {
        format!("# {} {} config {}", self.tool, self.version, self.config_digest)
    }
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })
}

/// Writes pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| CliError::Json { path: path.into(), source })?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

/// Writes a CSV file whose first line is the provenance comment.
pub fn write_csv<R: Serialize>(path: &Path, meta: &Meta, rows: &[R]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", meta.csv_comment()).map_err(|e| CliError::io(path, e))?;
    let mut c = csv::Writer::from_writer(w);
    for r in rows {
        c.serialize(r)?;
    }
    c.flush().map_err(|e| CliError::io(path, e))
}
