//! File formats: edgelist and nomination parsing, artifact output with
//! a hashed manifest, and timestamp handling.
//!
//! Parsers separate hard failures from row-level problems. A file that
//! cannot be decoded at all (unreadable, bad header, malformed
//! timestamp) is an [`IoError`] carrying the line number. Rows that are
//! individually unusable (reversed spans, self-loops, spans outside the
//! window) are dropped and listed in a report instead, so one stray row
//! does not force the whole run to be discarded; callers decide how
//! strict to be.

pub mod edgelist;
pub mod nominations;
pub mod outputs;
pub mod scenario;
pub mod time;

use std::path::PathBuf;

use thiserror::Error;

use crate::aggregate::AggregateError;
use crate::model::{BadgeId, ModelError};

pub use edgelist::{
    parse_edgelist, write_edgelist, ParseReport, ParsedEdgelist, RowIssue, RowIssueKind,
    EDGELIST_HEADER,
};
pub use nominations::{
    parse_nominations, write_nominations, NominationIssue, NominationIssueKind, NominationParse,
    NominationReport, OverLimit, NOMINATION_LIMIT,
};
pub use outputs::{Manifest, ManifestEntry, OutputWriter};
pub use scenario::{parse_scenario, write_scenario, SCENARIO_HEADER};
pub use time::{format_timestamp, parse_timestamp, window_base_date};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    WriteFailed {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("output directory {path} is not writable: {source}")]
    NotWritable {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("first row looks like data; a header row is required")]
    MissingHeader,
    #[error("unexpected header {found:?}, expected {expected:?}")]
    BadHeader {
        found: Vec<String>,
        expected: Vec<String>,
    },
    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCount {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse timestamp {value:?}")]
    Timestamp { line: u64, value: String },
    #[error("line {line}: cannot parse badge id {value:?}")]
    BadgeIdFormat { line: u64, value: String },
    #[error("line {line}: badge {id} is not in the roster")]
    UnknownBadge { line: u64, id: BadgeId },
    #[error("malformed delimited text: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error(transparent)]
    Sim(#[from] crate::simgen::SimError),
}
