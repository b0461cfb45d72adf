use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub const TOOL: &str = "coherence";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Common header of every report file.
#[derive(Debug, Serialize)]
pub struct Report<'a, C: Serialize, B: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    #[serde(flatten)]
    pub body: B,
}

impl<'a, C: Serialize, B: Serialize> Report<'a, C, B> {
    pub fn new(command: &'a str, config: &'a C, body: B) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            config,
            body,
        }
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Line-delimited JSON to a file, or to stdout when no path is given.
pub struct JsonLines {
    out: Box<dyn Write>,
    path: Option<PathBuf>,
}

impl JsonLines {
    pub fn create(path: Option<PathBuf>) -> Result<Self, CliError> {
        let out: Box<dyn Write> = match &path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { out, path })
    }

    fn err(&self, e: io::Error) -> CliError {
        match &self.path {
            Some(p) => CliError::io(p, e),
            None => CliError::Runtime(format!("cannot write to stdout: {e}")),
        }
    }

    pub fn write<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let line = serde_json::to_string(value).expect("records serialize");
        writeln!(self.out, "{line}").map_err(|e| self.err(e))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush().map_err(|e| self.err(e))
    }
}
