//! CSV and JSON emission with an embedded run manifest.
//!
//! Every CSV starts with `# ` comment lines holding the manifest as JSON, then
//! a header row. Floats are written as `{:.16e}` so values round-trip exactly.

use crate::error::Result;
use serde::Serialize;
use serde_json::Value;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Version of the JSON summary layout.
pub const SCHEMA_VERSION: u32 = 1;

/// What produced an output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub out_dir: String,
    pub seed: u64,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str, config: Value, out_dir: &Path, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            config,
            out_dir: out_dir.display().to_string(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Full-precision scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV writer that prefixes the manifest.
pub struct CsvOut {
    inner: csv::Writer<BufWriter<File>>,
    path: PathBuf,
}

impl CsvOut {
    pub fn create(path: &Path, manifest: &RunManifest, header: &[String]) -> Result<Self> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut file = BufWriter::new(File::create(path)?);
        let json = serde_json::to_string(manifest)?;
        writeln!(file, "# manifest: {json}")?;
        let mut inner = csv::WriterBuilder::new().from_writer(file);
        inner.write_record(header)?;
        Ok(CsvOut {
            inner,
            path: path.to_path_buf(),
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.inner.flush()?;
        Ok(self.path)
    }
}

/// Writes `{schema_version, manifest, ...payload}` as pretty JSON.
pub fn write_summary(path: &Path, manifest: &RunManifest, payload: Value) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut doc = serde_json::Map::new();
    doc.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    doc.insert("manifest".into(), serde_json::to_value(manifest)?);
    match payload {
        Value::Object(map) => doc.extend(map),
        other => {
            doc.insert("result".into(), other);
        }
    }
    let mut file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut file, &Value::Object(doc))?;
    writeln!(file)?;
    file.flush()?;
    Ok(path.to_path_buf())
}

/// Reads back a CSV written by [`CsvOut`], skipping manifest lines.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = fs::read_to_string(path)?;
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let header = rdr.headers()?.iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_with_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let m = RunManifest::new("test", serde_json::json!({"k": 1}), dir.path(), 3);
        let path = dir.path().join("sub/out.csv");
        let mut w = CsvOut::create(&path, &m, &["a".into(), "b".into()]).unwrap();
        w.row([fmt_f64(1.5), "x".into()]).unwrap();
        w.finish().unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# manifest: {"));
        let (h, rows) = read_csv(&path).unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(rows[0][0].parse::<f64>().unwrap(), 1.5);
    }

    #[test]
    fn summary_has_schema() {
        let dir = tempfile::tempdir().unwrap();
        let m = RunManifest::new("test", Value::Null, dir.path(), 0);
        let p = write_summary(&dir.path().join("s.json"), &m, serde_json::json!({"x": 2})).unwrap();
        let v: Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["x"], 2);
        assert_eq!(v["manifest"]["command"], "test");
    }
}
