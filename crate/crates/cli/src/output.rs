//! CSV tables with a provenance comment line.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{LabError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A named CSV table; cells are already formatted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        let row: Vec<String> = row.into_iter().map(|c| c.to_string()).collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Parses column `name` as floats.
    pub fn floats(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column(name).ok_or_else(|| missing_column(name, &self.header))?;
        self.rows
            .iter()
            .map(|r| {
                r[idx]
                    .parse::<f64>()
                    .map_err(|e| LabError::Config(format!("column {name}: cannot parse {:?}: {e}", r[idx])))
            })
            .collect()
    }

    pub fn write(&self, dir: &Path, config_hash: &str) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
        let path = dir.join(format!("{}.csv", self.name));
        let mut buf = format!("# su2poly-lab v{VERSION} config={config_hash}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.header)?;
            for row in &self.rows {
                w.write_record(row)?;
            }
            w.flush().map_err(|e| LabError::io(&path, e))?;
        }
        fs::write(&path, buf).map_err(|e| LabError::io(&path, e))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| match e.kind() {
                csv::ErrorKind::Io(_) => LabError::Config(format!("cannot read {}: {e}", path.display())),
                _ => LabError::Csv(e),
            })?;
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let rows = rdr
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(Table { name, header, rows })
    }
}

pub fn missing_column(name: &str, available: &[String]) -> LabError {
    LabError::Config(format!("no column {name:?}; available columns: {}", available.join(", ")))
}

pub fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let path = dir.join(format!("{name}.json"));
    let text = serde_json::to_string_pretty(value).expect("json value serializes");
    fs::write(&path, text + "\n").map_err(|e| LabError::io(&path, e))?;
    Ok(path)
}
