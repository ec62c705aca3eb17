//! Scenario files for the simulator: `start, end, members`.
//!
//! One row per group meeting; the members column lists badge ids
//! separated by spaces. The roster is the union of all members, and the
//! schedule is validated (group sizes, window bounds, unimodality)
//! before it is returned.

use std::path::Path;

use crate::model::{ObservationWindow, Roster};
use crate::simgen::{GroupMeeting, Scenario};

use super::edgelist::check_header;
use super::time::{format_timestamp, parse_timestamp, window_base_date};
use super::IoError;

pub const SCENARIO_HEADER: [&str; 3] = ["start", "end", "members"];

pub fn parse_scenario(
    path: impl AsRef<Path>,
    window: ObservationWindow,
) -> Result<Scenario, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario_str(&text, window)
}

/// [`parse_scenario`] over in-memory text.
pub fn parse_scenario_str(text: &str, window: ObservationWindow) -> Result<Scenario, IoError> {
    let base_date = window_base_date(window);
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(if text.lines().next().unwrap_or("").contains('\t') {
            b'\t'
        } else {
            b','
        })
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    check_header(reader.headers()?, &SCENARIO_HEADER, base_date)?;

    let mut meetings = Vec::new();
    let mut members_seen = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(IoError::ColumnCount {
                line,
                expected: 3,
                found: record.len(),
            });
        }
        let start = parse_timestamp(&record[0], base_date).ok_or_else(|| IoError::Timestamp {
            line,
            value: record[0].to_owned(),
        })?;
        let end = parse_timestamp(&record[1], base_date).ok_or_else(|| IoError::Timestamp {
            line,
            value: record[1].to_owned(),
        })?;
        let mut members = Vec::new();
        for token in record[2].split_whitespace() {
            let id = token.parse::<u32>().map_err(|_| IoError::BadgeIdFormat {
                line,
                value: token.to_owned(),
            })?;
            members.push(id);
        }
        members_seen.extend(members.iter().copied());
        meetings.push(GroupMeeting::new(members, start, end));
    }

    let scenario = Scenario {
        roster: Roster::from_ids(members_seen),
        window,
        meetings,
    };
    scenario.validate()?;
    Ok(scenario)
}

pub fn scenario_to_string(scenario: &Scenario) -> String {
    let mut out = SCENARIO_HEADER.join(",");
    out.push('\n');
    for m in &scenario.meetings {
        let members: Vec<String> = m.members.iter().map(|id| id.to_string()).collect();
        out.push_str(&format!(
            "{},{},{}\n",
            format_timestamp(m.start),
            format_timestamp(m.end),
            members.join(" "),
        ));
    }
    out
}

pub fn write_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    std::fs::write(path, scenario_to_string(scenario)).map_err(|source| IoError::WriteFailed {
        path: path.to_path_buf(),
        source,
    })
}
