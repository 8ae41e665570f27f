//! Byte-stable CSV/JSON/SVG writers.
//!
//! Floats use Rust's shortest round-trip decimal formatting, which is
//! locale-independent. Every CSV starts with a `#` metadata line naming the
//! tool version and the SHA-256 of each input file.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::schema::InputFile;

pub const TOOL_NAME: &str = "tailsim";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// `name=sha256:<hex>` for each input, in the order given.
pub fn input_hashes(inputs: &[InputFile]) -> Vec<String> {
    inputs
        .iter()
        .map(|f| {
            let name = f
                .path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| f.path.display().to_string());
            format!("{name}=sha256:{}", hex::encode(Sha256::digest(&f.bytes)))
        })
        .collect()
}

pub fn metadata_line(inputs: &[InputFile], extra: &[(&str, String)]) -> String {
    let mut line = format!("# {TOOL_NAME} {TOOL_VERSION}");
    for (k, v) in extra {
        line.push_str(&format!(" {k}={v}"));
    }
    let hashes = input_hashes(inputs);
    if !hashes.is_empty() {
        line.push_str(" inputs=");
        line.push_str(&hashes.join(","));
    }
    line
}

/// In-memory CSV table written in one go.
#[derive(Debug, Clone)]
pub struct CsvTable {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self, metadata: &str) -> CliResult<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Internal(e.to_string()))?;
        }
        let body = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
        let body = String::from_utf8(body).map_err(|e| CliError::Internal(e.to_string()))?;
        Ok(format!("{metadata}\n{body}"))
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_shortest_roundtrip() {
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(8.108_541_7), "8.1085417");
        assert_eq!(fmt_f64(2.0), "2");
        assert_eq!(fmt_opt(None), "");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn metadata_hashes_inputs() {
        let inputs = vec![InputFile {
            path: "dir/a.json".into(),
            bytes: b"abc".to_vec(),
        }];
        let line = metadata_line(&inputs, &[("cmd", "codesign".into())]);
        assert_eq!(
            line,
            format!(
                "# tailsim {TOOL_VERSION} cmd=codesign inputs=a.json=sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
            )
        );
    }

    #[test]
    fn table_renders_header_first() {
        let mut t = CsvTable::new(vec!["a", "b"]);
        t.push(vec!["1".into(), "".into()]);
        assert_eq!(t.render("# m").unwrap(), "# m\na,b\n1,\n");
    }
}
