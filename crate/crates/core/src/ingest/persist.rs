//! The on-disk form of a measure store: a single `measures.jsonl` log.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::{IngestOptions, IngestReport, MeasureRecord, MeasureStore};

pub const MEASURES_FILE: &str = "measures.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("cannot read measure store {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: corrupt record: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadWarning {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for LoadWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

struct Replay {
    store: MeasureStore,
    warnings: Vec<LoadWarning>,
    /// Byte length of the well-formed prefix of the file.
    valid_len: u64,
    /// Whether the well-formed prefix ends with a newline (or is empty).
    ends_with_newline: bool,
    corrupt_tail: bool,
}

fn replay(path: &Path) -> Result<Replay, StoreError> {
    let io_err = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(io_err(e)),
    };
    let mut store = MeasureStore::new();
    let mut warnings = Vec::new();
    let mut offset = 0usize;
    let mut valid_len = 0usize;
    let mut line_no = 0usize;
    let mut corrupt_tail = false;
    while offset < bytes.len() {
        line_no += 1;
        let end = bytes[offset..].iter().position(|b| *b == b'\n').map(|i| offset + i);
        let line_end = end.unwrap_or(bytes.len());
        let next = end.map_or(bytes.len(), |e| e + 1);
        let raw = &bytes[offset..line_end];
        let is_last = next >= bytes.len();
        let parsed = std::str::from_utf8(raw)
            .map_err(|e| e.to_string())
            .and_then(|s| {
                if s.trim().is_empty() {
                    Ok(None)
                } else {
                    serde_json::from_str::<MeasureRecord>(s).map(Some).map_err(|e| e.to_string())
                }
            });
        match parsed {
            Ok(Some(record)) => {
                if !store.insert(record) {
                    warnings.push(LoadWarning {
                        line: line_no,
                        message: "duplicate record ignored".into(),
                    });
                }
                valid_len = next;
            }
            Ok(None) => valid_len = next,
            Err(message) if is_last => {
                corrupt_tail = true;
                warnings.push(LoadWarning {
                    line: line_no,
                    message: format!("ignoring truncated trailing record: {message}"),
                });
            }
            Err(message) => {
                return Err(StoreError::Corrupt {
                    path: path.to_path_buf(),
                    line: line_no,
                    message,
                })
            }
        }
        offset = next;
    }
    let ends_with_newline = valid_len == 0 || bytes[valid_len - 1] == b'\n';
    Ok(Replay {
        store,
        warnings,
        valid_len: valid_len as u64,
        ends_with_newline,
        corrupt_tail,
    })
}

/// Replays `dir/measures.jsonl`. A missing log is an empty store; a corrupt
/// final line is dropped with a warning; a corrupt line anywhere else is an
/// error.
pub fn load_store(dir: &Path) -> Result<(MeasureStore, Vec<LoadWarning>), StoreError> {
    if !dir.is_dir() {
        return Err(StoreError::Io {
            path: dir.to_path_buf(),
            source: io::Error::new(io::ErrorKind::NotFound, "not a directory"),
        });
    }
    let r = replay(&dir.join(MEASURES_FILE))?;
    Ok((r.store, r.warnings))
}

/// A measure store backed by a JSONL log. Single writer: the owner must
/// serialize calls to [`PersistentStore::ingest`].
#[derive(Debug)]
pub struct PersistentStore {
    path: PathBuf,
    store: MeasureStore,
    /// Set when the file carries a corrupt tail that must be cut before the
    /// next append.
    truncate_to: Option<u64>,
    needs_newline: bool,
}

impl PersistentStore {
    /// Opens (creating when needed) the store directory.
    pub fn open(dir: &Path) -> Result<(Self, Vec<LoadWarning>), StoreError> {
        fs::create_dir_all(dir).map_err(|source| StoreError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = dir.join(MEASURES_FILE);
        let r = replay(&path)?;
        let truncate_to = r.corrupt_tail.then_some(r.valid_len);
        Ok((
            Self {
                path,
                store: r.store,
                truncate_to,
                needs_newline: !r.ends_with_newline,
            },
            r.warnings,
        ))
    }

    pub fn store(&self) -> &MeasureStore {
        &self.store
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Validates the batch, appends the accepted records to the log and
    /// only then makes them visible in memory.
    pub fn ingest(&mut self, lines: &str, options: &IngestOptions) -> io::Result<IngestReport> {
        let report = self.store.plan_batch(lines, options);
        if !report.records.is_empty() {
            self.append(&report.records)?;
            self.store.commit(&report);
        }
        Ok(report)
    }

    fn append(&mut self, records: &[MeasureRecord]) -> io::Result<()> {
        if let Some(len) = self.truncate_to.take() {
            let f = OpenOptions::new().write(true).open(&self.path)?;
            f.set_len(len)?;
            f.sync_all()?;
        }
        let mut file: File = OpenOptions::new().create(true).append(true).open(&self.path)?;
        let mut buf = String::new();
        if self.needs_newline {
            buf.push('\n');
        }
        for r in records {
            buf.push_str(&r.to_json_line());
            buf.push('\n');
        }
        file.write_all(buf.as_bytes())?;
        file.sync_data()?;
        self.needs_newline = false;
        Ok(())
    }
}
