//! Questionnaire nomination files: `ego, alter` pairs.
//!
//! Each row records one nomination. A row with an empty alter column
//! marks its ego as a respondent who nominated nobody; respondent status
//! is otherwise implied by appearing as an ego. Badges never named as
//! ego are non-respondents and stay missing in the resulting network.

use std::collections::BTreeSet;
use std::path::Path;

use crate::aggregate::{NominationNetwork, TieState};
use crate::model::{BadgeId, Roster};

use super::edgelist::{check_header, parse_badge_field};
use super::IoError;

pub const NOMINATION_HEADER: [&str; 2] = ["ego", "alter"];

/// The questionnaire offered twenty name generators; more nominations
/// than that from one ego are suspicious and flagged, not rejected.
pub const NOMINATION_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NominationIssueKind {
    SelfNomination,
    UnknownEgo,
    UnknownAlter,
}

impl NominationIssueKind {
    pub fn describe(self) -> &'static str {
        match self {
            NominationIssueKind::SelfNomination => "ego nominated itself",
            NominationIssueKind::UnknownEgo => "ego is not in the roster",
            NominationIssueKind::UnknownAlter => "alter is not in the roster",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NominationIssue {
    pub line: u64,
    pub kind: NominationIssueKind,
}

/// An ego who nominated more alters than the questionnaire offered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverLimit {
    pub ego: BadgeId,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NominationReport {
    pub rows: usize,
    pub accepted: usize,
    pub issues: Vec<NominationIssue>,
    pub warnings: Vec<OverLimit>,
}

impl NominationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NominationParse {
    pub network: NominationNetwork,
    pub report: NominationReport,
}

/// Reads a nomination file against a known roster.
pub fn parse_nominations(
    path: impl AsRef<Path>,
    roster: &Roster,
) -> Result<NominationParse, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_nominations_str(&text, roster)
}

/// [`parse_nominations`] over in-memory text.
pub fn parse_nominations_str(text: &str, roster: &Roster) -> Result<NominationParse, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(if text.lines().next().unwrap_or("").contains('\t') {
            b'\t'
        } else {
            b','
        })
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    check_header(reader.headers()?, &NOMINATION_HEADER, None)?;

    let mut report = NominationReport::default();
    let mut respondents: BTreeSet<BadgeId> = BTreeSet::new();
    let mut pairs: BTreeSet<(BadgeId, BadgeId)> = BTreeSet::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        report.rows += 1;
        if record.is_empty() || record.len() > 2 {
            return Err(IoError::ColumnCount {
                line,
                expected: 2,
                found: record.len(),
            });
        }
        let ego = parse_badge_field(&record[0], line)?;
        if !roster.contains(ego) {
            report.issues.push(NominationIssue {
                line,
                kind: NominationIssueKind::UnknownEgo,
            });
            continue;
        }
        let alter = match record.get(1).filter(|v| !v.is_empty()) {
            None => {
                // respondent with no nominations
                respondents.insert(ego);
                report.accepted += 1;
                continue;
            }
            Some(value) => parse_badge_field(value, line)?,
        };
        let kind = if ego == alter {
            Some(NominationIssueKind::SelfNomination)
        } else if !roster.contains(alter) {
            Some(NominationIssueKind::UnknownAlter)
        } else {
            None
        };
        if let Some(kind) = kind {
            report.issues.push(NominationIssue { line, kind });
            continue;
        }
        respondents.insert(ego);
        pairs.insert((ego, alter));
        report.accepted += 1;
    }

    for &ego in &respondents {
        let count = pairs
            .range((ego, BadgeId(0))..)
            .take_while(|p| p.0 == ego)
            .count();
        if count > NOMINATION_LIMIT {
            report.warnings.push(OverLimit { ego, count });
        }
    }

    let network = NominationNetwork::new(roster.clone(), respondents, pairs)?;
    Ok(NominationParse { network, report })
}

/// Writes a network back out: one row per present tie, and a bare-ego
/// row for each respondent without nominations.
pub fn write_nominations(
    network: &NominationNetwork,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    let path = path.as_ref();
    std::fs::write(path, nominations_to_string(network)).map_err(|source| IoError::WriteFailed {
        path: path.to_path_buf(),
        source,
    })
}

pub fn nominations_to_string(network: &NominationNetwork) -> String {
    let mut out = NOMINATION_HEADER.join(",");
    out.push('\n');
    for ego in network.respondents() {
        let mut any = false;
        for alter in network.roster().iter() {
            if network.tie(ego, alter) == Some(TieState::Present) {
                out.push_str(&format!("{ego},{alter}\n"));
                any = true;
            }
        }
        if !any {
            out.push_str(&format!("{ego},\n"));
        }
    }
    out
}
