//! Timestamp parsing and formatting.
//!
//! Three forms are accepted: integer epoch seconds, ISO-8601 date-times,
//! and bare clock times like `18:19:46`. Clock times carry no date, so
//! they are anchored to the calendar date of the observation window;
//! data crossing midnight must use full ISO timestamps.

use chrono::{DateTime, NaiveDate, NaiveDateTime, NaiveTime};

use crate::model::ObservationWindow;

/// Parses epoch seconds, ISO-8601 (`2015-05-22T18:19:46`, `T` or space,
/// optional offset, naive taken as UTC), or `HH:MM:SS` anchored to
/// `base_date`. Returns `None` when nothing matches.
pub fn parse_timestamp(text: &str, base_date: Option<NaiveDate>) -> Option<i64> {
    let text = text.trim();
    if let Ok(epoch) = text.parse::<i64>() {
        return Some(epoch);
    }
    for format in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(text, format) {
            return Some(dt.and_utc().timestamp());
        }
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        return Some(dt.timestamp());
    }
    if let Ok(t) = NaiveTime::parse_from_str(text, "%H:%M:%S") {
        return Some(base_date?.and_time(t).and_utc().timestamp());
    }
    None
}

/// ISO-8601 in UTC, or plain epoch seconds when the value is outside the
/// representable date range.
pub fn format_timestamp(epoch: i64) -> String {
    match DateTime::from_timestamp(epoch, 0) {
        Some(dt) => dt.naive_utc().format("%Y-%m-%dT%H:%M:%S").to_string(),
        None => epoch.to_string(),
    }
}

/// The calendar date (UTC) on which the window opens; anchor for bare
/// clock times.
pub fn window_base_date(window: ObservationWindow) -> Option<NaiveDate> {
    DateTime::from_timestamp(window.start(), 0).map(|dt| dt.date_naive())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Option<NaiveDate> {
        NaiveDate::from_ymd_opt(2015, 5, 22)
    }

    #[test]
    fn accepts_all_three_forms() {
        assert_eq!(parse_timestamp("1432318786", None), Some(1_432_318_786));
        assert_eq!(
            parse_timestamp("2015-05-22T18:19:46", None),
            Some(1_432_318_786)
        );
        assert_eq!(
            parse_timestamp("2015-05-22 18:19:46", None),
            Some(1_432_318_786)
        );
        assert_eq!(
            parse_timestamp("2015-05-22T18:19:46+02:00", None),
            Some(1_432_311_586)
        );
        assert_eq!(parse_timestamp("18:19:46", base()), Some(1_432_318_786));
    }

    #[test]
    fn clock_time_without_base_date_fails() {
        assert_eq!(parse_timestamp("18:19:46", None), None);
    }

    #[test]
    fn garbage_fails() {
        for bad in ["", "tomorrow", "18:19", "2015-05-22", "12:99:00"] {
            assert_eq!(parse_timestamp(bad, base()), None, "{bad:?}");
        }
    }

    #[test]
    fn formatting_round_trips() {
        for epoch in [0, 1_432_318_786, -86_400] {
            let text = format_timestamp(epoch);
            assert_eq!(parse_timestamp(&text, None), Some(epoch));
        }
    }

    #[test]
    fn window_date_anchors_clock_times() {
        let window = ObservationWindow::new(1_432_318_000, 1_432_320_000).unwrap();
        let date = window_base_date(window);
        assert_eq!(date, base());
        assert_eq!(parse_timestamp("18:19:46", date), Some(1_432_318_786));
    }
}
