use std::fs;
use std::path::{Path, PathBuf};

use kinkspec::config::Format;
use kinkspec::io::write_csv;
use kinkspec::Result;
use serde::Serialize;

/// Writes tables under one directory in every requested format.
pub struct Sink {
    dir: PathBuf,
    formats: Vec<Format>,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, formats: &[Format]) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let mut formats = formats.to_vec();
        formats.sort();
        formats.dedup();
        Ok(Self { dir: dir.to_path_buf(), formats, written: Vec::new() })
    }

    pub fn table<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        for f in self.formats.clone() {
            match f {
                Format::Csv => {
                    let path = self.dir.join(format!("{name}.csv"));
                    write_csv(fs::File::create(&path)?, rows)?;
                    self.written.push(path);
                }
                Format::Json => self.json(name, &rows)?,
            }
        }
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.dir.join(format!("{name}.json"));
        let mut text = serde_json::to_string_pretty(value).map_err(|e| kinkspec::Error::Format(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, data)?;
        self.written.push(path);
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub command: &'static str,
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value ≤ bound`.
    pub fn at_most(command: &'static str, name: &str, value: f64, bound: f64) -> Self {
        Self { command, name: name.into(), value, bound, pass: value <= bound }
    }

    /// Passes when `value ≥ bound`.
    pub fn at_least(command: &'static str, name: &str, value: f64, bound: f64) -> Self {
        Self { command, name: name.into(), value, bound, pass: value >= bound }
    }

    pub fn flag(command: &'static str, name: &str, ok: bool) -> Self {
        Self { command, name: name.into(), value: f64::from(u8::from(ok)), bound: 1.0, pass: ok }
    }
}
