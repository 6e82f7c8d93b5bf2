//! Artifact writers. Floats are written with Rust's shortest round-trip
//! formatting, so identical runs give identical files.

use crate::error::CliError;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_file(dir, name, &text)
}

pub fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Simple CSV builder; cells are already-formatted strings or floats.
pub struct Csv {
    text: String,
}

pub enum Cell<'a> {
    F(f64),
    U(usize),
    S(&'a str),
    Empty,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match c {
                Cell::F(v) => write!(self.text, "{v}").unwrap(),
                Cell::U(v) => write!(self.text, "{v}").unwrap(),
                Cell::S(s) => self.text.push_str(s),
                Cell::Empty => {}
            }
        }
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}
