//! Append-only revision log.
//!
//! One JSON record per line. The whole log is replayed into an in-memory
//! index on open; appends go to the file first and the index second, under a
//! single lock, so draft indices stay gapless per student.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use ideacheck::FeedbackChecklist;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("revision store {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("revision store {path}, line {line}: {message}")]
    Corrupt {
        path: String,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionRecord {
    pub student_key: String,
    pub draft_index: u32,
    pub text: String,
    pub checklist: FeedbackChecklist,
    pub submitted_at: DateTime<Utc>,
}

struct Inner {
    file: File,
    index: HashMap<String, Vec<RevisionRecord>>,
}

pub struct RevisionStore {
    path: PathBuf,
    inner: Mutex<Inner>,
}

impl RevisionStore {
    /// Opens or creates the log at `path`. An unterminated last line (a write
    /// cut short by a crash) is dropped; any other unreadable line is an error.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let io = |source| StoreError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&path)
            .map_err(io)?;
        let mut data = String::new();
        file.read_to_string(&mut data).map_err(io)?;
        let complete = data.rfind('\n').map_or(0, |i| i + 1);
        if complete < data.len() {
            file.set_len(complete as u64).map_err(io)?;
            file.seek(SeekFrom::End(0)).map_err(io)?;
        }
        let mut index: HashMap<String, Vec<RevisionRecord>> = HashMap::new();
        for (i, line) in data[..complete].lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let corrupt = |message: String| StoreError::Corrupt {
                path: path.display().to_string(),
                line: i + 1,
                message,
            };
            let record: RevisionRecord =
                serde_json::from_str(line).map_err(|e| corrupt(e.to_string()))?;
            let history = index.entry(record.student_key.clone()).or_default();
            if record.draft_index as usize != history.len() {
                return Err(corrupt(format!(
                    "student `{}` has draft {} after {} drafts",
                    record.student_key,
                    record.draft_index,
                    history.len()
                )));
            }
            history.push(record);
        }
        Ok(RevisionStore {
            path,
            inner: Mutex::new(Inner { file, index }),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Records the next draft for `student_key`.
    pub fn append(
        &self,
        student_key: &str,
        text: &str,
        checklist: FeedbackChecklist,
    ) -> Result<RevisionRecord, StoreError> {
        let mut inner = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        let draft_index = inner.index.get(student_key).map_or(0, Vec::len) as u32;
        let record = RevisionRecord {
            student_key: student_key.to_string(),
            draft_index,
            text: text.to_string(),
            checklist,
            submitted_at: Utc::now(),
        };
        let mut line = serde_json::to_string(&record).expect("revision records serialize");
        line.push('\n');
        let io = |source| StoreError::Io {
            path: self.path.display().to_string(),
            source,
        };
        inner.file.write_all(line.as_bytes()).map_err(io)?;
        inner.file.sync_data().map_err(io)?;
        inner
            .index
            .entry(student_key.to_string())
            .or_default()
            .push(record.clone());
        Ok(record)
    }

    /// All drafts of one student in draft order; empty for unknown keys.
    pub fn history(&self, student_key: &str) -> Vec<RevisionRecord> {
        let inner = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        inner.index.get(student_key).cloned().unwrap_or_default()
    }

    pub fn student_count(&self) -> usize {
        self.inner.lock().unwrap_or_else(|e| e.into_inner()).index.len()
    }
}
