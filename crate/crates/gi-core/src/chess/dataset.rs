//! Line-delimited dataset persistence: one JSON object per game (or per
//! analyzed row), schema-versioned, streamed line by line.

use std::io::{BufRead, Write};

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::chess::analyze::GameAnalysis;
use crate::chess::pgn::GameRecord;

pub const DATASET_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: schema version {got}, this build reads {expected}")]
    SchemaMismatch { line: usize, got: u32, expected: u32 },
}

#[derive(Debug, Serialize, Deserialize)]
struct Envelope<T> {
    schema: u32,
    #[serde(flatten)]
    payload: T,
}

fn write_entries<T: Serialize>(
    entries: impl IntoIterator<Item = T>,
    mut out: impl Write,
) -> Result<usize, DatasetError> {
    let mut count = 0;
    for payload in entries {
        let line = serde_json::to_string(&Envelope { schema: DATASET_SCHEMA_VERSION, payload })
            .map_err(|source| DatasetError::Json { line: count + 1, source })?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
        count += 1;
    }
    out.flush()?;
    Ok(count)
}

/// Streaming reader over dataset lines.
pub struct DatasetReader<R: BufRead, T> {
    reader: R,
    line: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<R: BufRead, T: DeserializeOwned> Iterator for DatasetReader<R, T> {
    type Item = Result<T, DatasetError>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut buf = String::new();
        loop {
            buf.clear();
            match self.reader.read_line(&mut buf) {
                Err(e) => return Some(Err(DatasetError::Io(e))),
                Ok(0) => return None,
                Ok(_) => {
                    self.line += 1;
                    if buf.trim().is_empty() {
                        continue;
                    }
                    break;
                }
            }
        }
        let line = self.line;
        // check the version before decoding the payload
        #[derive(Deserialize)]
        struct VersionOnly {
            schema: u32,
        }
        match serde_json::from_str::<VersionOnly>(&buf) {
            Err(source) => return Some(Err(DatasetError::Json { line, source })),
            Ok(v) if v.schema != DATASET_SCHEMA_VERSION => {
                return Some(Err(DatasetError::SchemaMismatch {
                    line,
                    got: v.schema,
                    expected: DATASET_SCHEMA_VERSION,
                }));
            }
            Ok(_) => {}
        }
        Some(
            serde_json::from_str::<Envelope<T>>(&buf)
                .map(|e| e.payload)
                .map_err(|source| DatasetError::Json { line, source }),
        )
    }
}

/// Write game records as JSONL.
pub fn write_records<'a>(
    records: impl IntoIterator<Item = &'a GameRecord>,
    out: impl Write,
) -> Result<usize, DatasetError> {
    write_entries(records, out)
}

/// Stream game records back.
pub fn read_records<R: BufRead>(reader: R) -> DatasetReader<R, GameRecord> {
    DatasetReader { reader, line: 0, _marker: std::marker::PhantomData }
}

/// Write per-game analyses as JSONL.
pub fn write_analyses<'a>(
    analyses: impl IntoIterator<Item = &'a GameAnalysis>,
    out: impl Write,
) -> Result<usize, DatasetError> {
    write_entries(analyses, out)
}

pub fn read_analyses<R: BufRead>(reader: R) -> DatasetReader<R, GameAnalysis> {
    DatasetReader { reader, line: 0, _marker: std::marker::PhantomData }
}
