//! Column tables for plotting and JSON result documents. Every file carries
//! the toolkit version and the resolved configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::Failure;

pub struct Output {
    dir: PathBuf,
    config: Value,
    written: Vec<PathBuf>,
}

impl Output {
    /// Create the directory; call only after validation so that rejected
    /// runs leave nothing behind.
    pub fn create<C: Serialize>(dir: &Path, command: &str, config: &C) -> Result<Self, Failure> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Validation(format!("cannot create {}: {e}", dir.display())))?;
        let config = json!({ "command": command, "options": config });
        Ok(Self { dir: dir.to_path_buf(), config, written: Vec::new() })
    }

    pub fn table(&mut self, name: &str, columns: &[&str], rows: &[Vec<f64>]) -> Result<(), Failure> {
        let mut text = String::new();
        let _ = writeln!(text, "# wigmix {}", wigmix_core::VERSION);
        let _ = writeln!(text, "# config: {}", self.config);
        let _ = writeln!(text, "# {}", columns.join(" "));
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(text, "{}", cells.join(" "));
        }
        self.write(name, text)
    }

    pub fn document(&mut self, name: &str, results: Value) -> Result<(), Failure> {
        let doc = json!({
            "version": wigmix_core::VERSION,
            "config": self.config,
            "results": results,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Numerical(e.to_string()))?;
        self.write(name, text + "\n")
    }

    fn write(&mut self, name: &str, text: String) -> Result<(), Failure> {
        let path = self.dir.join(name);
        std::fs::write(&path, text)
            .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    pub fn report(&self) {
        for p in &self.written {
            eprintln!("wrote {}", p.display());
        }
    }
}

/// `serde_json::Value` of anything serializable; non-finite floats become
/// `null`.
pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}
