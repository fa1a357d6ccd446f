// SPDX-License-Identifier: Apache-2.0

//! Append-only checkpoint log: one `canonical_key<TAB>status` line per
//! checked instance.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    InCore,
    Empty,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::InCore => "in_core",
            Status::Empty => "empty",
        }
    }

    fn parse(s: &str) -> Option<Status> {
        match s {
            "in_core" => Some(Status::InCore),
            "empty" => Some(Status::Empty),
            _ => None,
        }
    }
}

pub struct Checkpoint {
    path: PathBuf,
    writer: BufWriter<File>,
    pending: u64,
    every: u64,
}

fn io_error(path: &Path, source: std::io::Error) -> super::SearchError {
    super::SearchError::Io {
        path: path.display().to_string(),
        source,
    }
}

impl Checkpoint {
    /// Opens (creating if needed) the log and returns the entries already in
    /// it. Lines that do not parse, such as a torn final line, are ignored.
    pub fn open(path: &Path, every: u64) -> Result<(Checkpoint, HashMap<String, Status>), super::SearchError> {
        let mut seen = HashMap::new();
        let mut torn = false;
        if path.exists() {
            let file = File::open(path).map_err(|e| io_error(path, e))?;
            let mut reader = BufReader::new(file);
            let mut line = String::new();
            loop {
                line.clear();
                let read = reader.read_line(&mut line).map_err(|e| io_error(path, e))?;
                if read == 0 {
                    break;
                }
                torn = !line.ends_with('\n');
                if let Some((key, status)) = line.trim_end_matches('\n').split_once('\t') {
                    if let (false, Some(status)) = (torn, Status::parse(status)) {
                        seen.insert(key.to_string(), status);
                    }
                }
            }
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| io_error(path, e))?;
        if torn {
            file.write_all(b"\n").map_err(|e| io_error(path, e))?;
        }
        Ok((
            Checkpoint {
                path: path.to_path_buf(),
                writer: BufWriter::new(file),
                pending: 0,
                every: every.max(1),
            },
            seen,
        ))
    }

    pub fn record(&mut self, key: &str, status: Status) -> Result<(), super::SearchError> {
        writeln!(self.writer, "{key}\t{}", status.as_str()).map_err(|e| io_error(&self.path, e))?;
        self.pending += 1;
        if self.pending >= self.every {
            self.flush()?;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), super::SearchError> {
        self.pending = 0;
        self.writer.flush().map_err(|e| io_error(&self.path, e))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}
