//! Dyadic edgelist files: `start, id_badge_a, id_badge_b, end`.
//!
//! Comma- or tab-delimited, sniffed from the header row, which is
//! required. Timestamps may be epoch seconds, ISO-8601, or bare clock
//! times anchored to the window's date (see [`super::time`]).

use std::path::Path;

use crate::model::{normalize, BadgeId, EventLog, ObservationWindow, RawEvent, Roster};

use super::time::{format_timestamp, parse_timestamp, window_base_date};
use super::IoError;

pub const EDGELIST_HEADER: [&str; 4] = ["start", "id_badge_a", "id_badge_b", "end"];

/// What happened to a row that could be decoded but not used as-is.
/// Every kind except [`Clipped`](RowIssueKind::Clipped) drops the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowIssueKind {
    /// Both badge columns name the same badge.
    SelfLoop,
    /// The end precedes the start.
    Reversed,
    /// Start and end coincide; the row spans no time.
    ZeroLength,
    /// The span lies entirely outside the observation window.
    OutsideWindow,
    /// The span overhung the window and was cut back to it; kept.
    Clipped,
}

impl RowIssueKind {
    pub fn rejects(self) -> bool {
        self != RowIssueKind::Clipped
    }

    pub fn describe(self) -> &'static str {
        match self {
            RowIssueKind::SelfLoop => "badge paired with itself",
            RowIssueKind::Reversed => "end precedes start",
            RowIssueKind::ZeroLength => "zero-length span",
            RowIssueKind::OutsideWindow => "outside the observation window",
            RowIssueKind::Clipped => "clipped to the observation window",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowIssue {
    pub line: u64,
    pub kind: RowIssueKind,
}

/// Per-file accounting: how many rows were read, how many survived, and
/// what was wrong with the rest.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub rows: usize,
    pub accepted: usize,
    pub issues: Vec<RowIssue>,
}

impl ParseReport {
    pub fn rejected(&self) -> impl Iterator<Item = &RowIssue> {
        self.issues.iter().filter(|i| i.kind.rejects())
    }

    pub fn rejected_count(&self) -> usize {
        self.rejected().count()
    }

    /// True when no row was dropped (clipping alone still counts as
    /// clean).
    pub fn is_clean(&self) -> bool {
        self.rejected_count() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedEdgelist {
    pub log: EventLog,
    pub report: ParseReport,
}

/// Reads an edgelist file into a normalized [`EventLog`].
///
/// With `roster` supplied, a badge id outside it is a hard error;
/// without it, the roster is inferred from the accepted rows. Row-level
/// problems land in the report rather than failing the parse.
pub fn parse_edgelist(
    path: impl AsRef<Path>,
    window: ObservationWindow,
    roster: Option<&Roster>,
) -> Result<ParsedEdgelist, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_edgelist_str(&text, window, roster)
}

/// [`parse_edgelist`] over in-memory text.
pub fn parse_edgelist_str(
    text: &str,
    window: ObservationWindow,
    roster: Option<&Roster>,
) -> Result<ParsedEdgelist, IoError> {
    let base_date = window_base_date(window);
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(sniff_delimiter(text))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    check_header(reader.headers()?, &EDGELIST_HEADER, base_date)?;

    let mut report = ParseReport::default();
    let mut raw = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        report.rows += 1;
        if record.len() != 4 {
            return Err(IoError::ColumnCount {
                line,
                expected: 4,
                found: record.len(),
            });
        }
        let start = parse_time_field(&record[0], base_date, line)?;
        let a = parse_badge_field(&record[1], line)?;
        let b = parse_badge_field(&record[2], line)?;
        let end = parse_time_field(&record[3], base_date, line)?;
        if let Some(roster) = roster {
            for id in [a, b] {
                if !roster.contains(id) {
                    return Err(IoError::UnknownBadge { line, id });
                }
            }
        }

        let kind = if a == b {
            Some(RowIssueKind::SelfLoop)
        } else if end < start {
            Some(RowIssueKind::Reversed)
        } else if end == start {
            Some(RowIssueKind::ZeroLength)
        } else if end <= window.start() || start >= window.end() {
            Some(RowIssueKind::OutsideWindow)
        } else if start < window.start() || end > window.end() {
            Some(RowIssueKind::Clipped)
        } else {
            None
        };
        if let Some(kind) = kind {
            report.issues.push(RowIssue { line, kind });
            if kind.rejects() {
                continue;
            }
        }
        report.accepted += 1;
        raw.push(RawEvent {
            a,
            b,
            start: start.max(window.start()),
            end: end.min(window.end()),
        });
    }

    let inferred;
    let roster = match roster {
        Some(r) => r,
        None => {
            inferred = raw.iter().flat_map(|e| [e.a, e.b]).collect::<Roster>();
            &inferred
        }
    };
    let log = normalize(&raw, roster, window)?;
    Ok(ParsedEdgelist { log, report })
}

/// Writes a log back out, comma-delimited with ISO timestamps. Reading
/// the file with the same window and roster reproduces the log.
pub fn write_edgelist(log: &EventLog, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    std::fs::write(path, edgelist_to_string(log)).map_err(|source| IoError::WriteFailed {
        path: path.to_path_buf(),
        source,
    })
}

pub fn edgelist_to_string(log: &EventLog) -> String {
    let mut out = EDGELIST_HEADER.join(",");
    out.push('\n');
    for e in log.events() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_timestamp(e.start()),
            e.dyad().a(),
            e.dyad().b(),
            format_timestamp(e.end()),
        ));
    }
    out
}

fn sniff_delimiter(text: &str) -> u8 {
    let first_line = text.lines().next().unwrap_or("");
    if first_line.contains('\t') {
        b'\t'
    } else {
        b','
    }
}

fn normalize_header_cell(cell: &str) -> String {
    cell.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase()
}

pub(super) fn check_header(
    found: &csv::StringRecord,
    expected: &[&str],
    base_date: Option<chrono::NaiveDate>,
) -> Result<(), IoError> {
    let cells: Vec<String> = found.iter().map(normalize_header_cell).collect();
    let wanted: Vec<String> = expected.iter().map(|c| normalize_header_cell(c)).collect();
    if cells == wanted {
        return Ok(());
    }
    // a parsable first cell means the header row is simply missing
    if found
        .get(0)
        .is_some_and(|c| parse_timestamp(c, base_date).is_some())
    {
        return Err(IoError::MissingHeader);
    }
    Err(IoError::BadHeader {
        found: found.iter().map(str::to_owned).collect(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    })
}

fn parse_time_field(
    value: &str,
    base_date: Option<chrono::NaiveDate>,
    line: u64,
) -> Result<i64, IoError> {
    parse_timestamp(value, base_date).ok_or_else(|| IoError::Timestamp {
        line,
        value: value.to_owned(),
    })
}

pub(super) fn parse_badge_field(value: &str, line: u64) -> Result<BadgeId, IoError> {
    value
        .parse::<u32>()
        .map(BadgeId)
        .map_err(|_| IoError::BadgeIdFormat {
            line,
            value: value.to_owned(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    // the published example table, comma-delimited, anchored to an
    // arbitrary date
    const EXAMPLE: &str = "\
Start,ID Badge A,ID Badge B,End
18:19:46,3,5,18:19:58
18:19:47,1,10,18:20:15
18:19:47,1,8,18:22:32
18:19:49,10,8,18:22:35
18:19:53,2,5,18:20:37
18:20:04,6,11,18:20:14
";

    fn example_window() -> ObservationWindow {
        // 2015-05-22, 18:00:00 to 19:00:00 UTC
        ObservationWindow::new(1_432_317_600, 1_432_321_200).unwrap()
    }

    #[test]
    fn example_table_parses_to_six_events_and_eight_badges() {
        let parsed = parse_edgelist_str(EXAMPLE, example_window(), None).unwrap();
        assert_eq!(parsed.log.event_count(), 6);
        assert_eq!(parsed.log.roster().len(), 8);
        let ids: Vec<u32> = parsed.log.roster().iter().map(|b| b.0).collect();
        assert_eq!(ids, [1, 2, 3, 5, 6, 8, 10, 11]);
        assert_eq!(parsed.report.rows, 6);
        assert_eq!(parsed.report.accepted, 6);
        assert!(parsed.report.is_clean());
        // first row: 18:19:46 to 18:19:58 is 12 seconds
        let first = parsed
            .log
            .events()
            .iter()
            .find(|e| e.dyad().a() == BadgeId(3))
            .unwrap();
        assert_eq!(first.duration_s(), 12);
    }

    #[test]
    fn tab_delimited_parses_the_same() {
        let tabbed = EXAMPLE.replace(',', "\t");
        let a = parse_edgelist_str(EXAMPLE, example_window(), None).unwrap();
        let b = parse_edgelist_str(&tabbed, example_window(), None).unwrap();
        assert_eq!(a.log, b.log);
    }

    #[test]
    fn header_only_file_is_an_empty_log() {
        let parsed =
            parse_edgelist_str("start,id_badge_a,id_badge_b,end\n", example_window(), None)
                .unwrap();
        assert!(parsed.log.is_empty());
        assert_eq!(parsed.report.rows, 0);
        assert!(parsed.report.is_clean());
    }

    #[test]
    fn missing_header_is_detected() {
        let headerless = "18:19:46,3,5,18:19:58\n";
        assert!(matches!(
            parse_edgelist_str(headerless, example_window(), None),
            Err(IoError::MissingHeader)
        ));
        let wrong = "time,from,to,stop\n";
        assert!(matches!(
            parse_edgelist_str(wrong, example_window(), None),
            Err(IoError::BadHeader { .. })
        ));
    }

    #[test]
    fn reversed_row_is_rejected_and_reported_with_its_line() {
        let text = "\
start,id_badge_a,id_badge_b,end
18:19:46,3,5,18:19:58
18:20:15,1,10,18:19:47
";
        let parsed = parse_edgelist_str(text, example_window(), None).unwrap();
        assert_eq!(parsed.log.event_count(), 1);
        assert_eq!(
            parsed.report.issues,
            vec![RowIssue {
                line: 3,
                kind: RowIssueKind::Reversed
            }]
        );
        assert_eq!(parsed.report.rejected_count(), 1);
        // the rejected row's badges stay out of the inferred roster
        assert_eq!(parsed.log.roster().len(), 2);
    }

    #[test]
    fn self_loop_zero_length_and_outside_rows_are_rejected() {
        let text = "\
start,id_badge_a,id_badge_b,end
18:19:46,3,3,18:19:58
18:19:47,1,10,18:19:47
17:00:00,1,10,17:30:00
";
        let parsed = parse_edgelist_str(text, example_window(), None).unwrap();
        assert!(parsed.log.is_empty());
        let kinds: Vec<RowIssueKind> = parsed.report.issues.iter().map(|i| i.kind).collect();
        assert_eq!(
            kinds,
            [
                RowIssueKind::SelfLoop,
                RowIssueKind::ZeroLength,
                RowIssueKind::OutsideWindow
            ]
        );
    }

    #[test]
    fn overhanging_row_is_clipped_but_kept() {
        let text = "\
start,id_badge_a,id_badge_b,end
17:55:00,3,5,18:05:00
";
        let parsed = parse_edgelist_str(text, example_window(), None).unwrap();
        assert_eq!(parsed.report.accepted, 1);
        assert!(parsed.report.is_clean());
        assert_eq!(
            parsed.report.issues,
            vec![RowIssue {
                line: 2,
                kind: RowIssueKind::Clipped
            }]
        );
        let e = parsed.log.events()[0];
        assert_eq!(e.start(), example_window().start());
        assert_eq!(e.duration_s(), 300);
    }

    #[test]
    fn malformed_timestamp_and_id_fail_with_line_numbers() {
        let bad_time = "\
start,id_badge_a,id_badge_b,end
18:19:46,3,5,18:19:58
18:19:47,1,10,half past six
";
        match parse_edgelist_str(bad_time, example_window(), None) {
            Err(IoError::Timestamp { line: 3, value }) => {
                assert_eq!(value, "half past six");
            }
            other => panic!("expected timestamp error, got {other:?}"),
        }
        let bad_id = "\
start,id_badge_a,id_badge_b,end
18:19:46,badge-three,5,18:19:58
";
        assert!(matches!(
            parse_edgelist_str(bad_id, example_window(), None),
            Err(IoError::BadgeIdFormat { line: 2, .. })
        ));
    }

    #[test]
    fn unknown_badge_with_roster_supplied_is_a_hard_error() {
        let roster = Roster::from_ids([3, 5]);
        let ok = parse_edgelist_str(
            "start,id_badge_a,id_badge_b,end\n18:19:46,3,5,18:19:58\n",
            example_window(),
            Some(&roster),
        )
        .unwrap();
        assert_eq!(ok.log.event_count(), 1);
        assert!(matches!(
            parse_edgelist_str(EXAMPLE, example_window(), Some(&roster)),
            Err(IoError::UnknownBadge { line: 3, .. })
        ));
    }

    #[test]
    fn epoch_and_iso_timestamps_parse_too() {
        let text = "\
start,id_badge_a,id_badge_b,end
1432318786,3,5,2015-05-22T18:19:58
";
        let parsed = parse_edgelist_str(text, example_window(), None).unwrap();
        assert_eq!(parsed.log.events()[0].duration_s(), 12);
    }

    #[test]
    fn write_then_parse_round_trips() {
        let parsed = parse_edgelist_str(EXAMPLE, example_window(), None).unwrap();
        let text = edgelist_to_string(&parsed.log);
        let reparsed = parse_edgelist_str(&text, example_window(), None).unwrap();
        assert_eq!(reparsed.log, parsed.log);

        // a roster member without events needs the roster passed back in
        let roster = Roster::from_ids([1, 2, 3, 4, 5, 6, 8, 10, 11, 99]);
        let widened = normalize(
            &[RawEvent::new(3, 5, 1_432_318_786, 1_432_318_798)],
            &roster,
            example_window(),
        )
        .unwrap();
        let text = edgelist_to_string(&widened);
        let reparsed = parse_edgelist_str(&text, example_window(), Some(&roster)).unwrap();
        assert_eq!(reparsed.log, widened);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("events.csv");
        let parsed = parse_edgelist_str(EXAMPLE, example_window(), None).unwrap();
        write_edgelist(&parsed.log, &path).unwrap();
        let reparsed = parse_edgelist(&path, example_window(), None).unwrap();
        assert_eq!(reparsed.log, parsed.log);
    }
}
