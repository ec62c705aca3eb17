//! Signal-repair strategies for badge contact streams.
//!
//! Badge readers flicker: one sustained conversation is recorded as many
//! short fragments separated by false gaps, while brief passes and radio
//! spillover inject short spurious contacts. Three repairs address this,
//! each a pure `EventLog -> EventLog` transform:
//!
//! - [`min_duration_filter`] deletes events shorter than a cutoff;
//! - [`interpolate`] bridges short within-dyad gaps;
//! - [`triadic_closure`] adds the missing edge of open triads, second by
//!   second.
//!
//! Strategies compose; [`apply_pipeline`] runs them in the given order,
//! and order matters (interpolating first can rescue fragments that a
//! duration filter would otherwise delete).

use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{extract_events, one_runs, rasterize, BadgeId, EventLog, InteractionEvent};

/// The strategy family, without its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    MinDuration,
    Interpolate,
    TriadicClosure,
}

impl StrategyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::MinDuration => "min_duration",
            StrategyKind::Interpolate => "interpolate",
            StrategyKind::TriadicClosure => "triadic",
        }
    }

    /// Pairs the kind with a parameter value (cutoff, gap bound, or
    /// iteration count respectively).
    pub fn with_value(self, value: u64) -> Strategy {
        match self {
            StrategyKind::MinDuration => Strategy::MinDuration { cutoff_s: value },
            StrategyKind::Interpolate => Strategy::Interpolate { max_gap_s: value },
            StrategyKind::TriadicClosure => Strategy::TriadicClosure {
                iterations: u32::try_from(value).unwrap_or(u32::MAX),
            },
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = StrategyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "min_duration" => Ok(StrategyKind::MinDuration),
            "interpolate" => Ok(StrategyKind::Interpolate),
            "triadic" | "triadic_closure" => Ok(StrategyKind::TriadicClosure),
            other => Err(StrategyParseError::UnknownStrategy(other.to_string())),
        }
    }
}

/// One repair step with its tuning parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Delete events with `duration_s() < cutoff_s`.
    MinDuration { cutoff_s: u64 },
    /// Merge consecutive same-dyad events separated by at most
    /// `max_gap_s` seconds.
    Interpolate { max_gap_s: u64 },
    /// Complete open triads, `iterations` simultaneous rounds.
    TriadicClosure { iterations: u32 },
}

impl Strategy {
    pub fn kind(&self) -> StrategyKind {
        match self {
            Strategy::MinDuration { .. } => StrategyKind::MinDuration,
            Strategy::Interpolate { .. } => StrategyKind::Interpolate,
            Strategy::TriadicClosure { .. } => StrategyKind::TriadicClosure,
        }
    }

    /// The strategy's parameter value, as written after the colon.
    pub fn parameter(&self) -> u64 {
        match self {
            Strategy::MinDuration { cutoff_s } => *cutoff_s,
            Strategy::Interpolate { max_gap_s } => *max_gap_s,
            Strategy::TriadicClosure { iterations } => *iterations as u64,
        }
    }

    pub fn apply(&self, log: &EventLog) -> EventLog {
        match *self {
            Strategy::MinDuration { cutoff_s } => min_duration_filter(log, cutoff_s),
            Strategy::Interpolate { max_gap_s } => interpolate(log, max_gap_s),
            Strategy::TriadicClosure { iterations } => triadic_closure(log, iterations),
        }
    }

    /// The tuned default pipeline: interpolate 75 s, then delete events
    /// under 55 s, then one round of triadic closure.
    pub fn default_pipeline() -> Vec<Strategy> {
        vec![
            Strategy::Interpolate { max_gap_s: 75 },
            Strategy::MinDuration { cutoff_s: 55 },
            Strategy::TriadicClosure { iterations: 1 },
        ]
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind().name(), self.parameter())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrategyParseError {
    #[error("expected `name:parameter`, got {0:?}")]
    MissingParameter(String),
    #[error("unknown strategy {0:?} (expected min_duration, interpolate, or triadic)")]
    UnknownStrategy(String),
    #[error("invalid parameter {value:?} for {name}: {reason}")]
    InvalidParameter {
        name: String,
        value: String,
        reason: String,
    },
}

impl FromStr for Strategy {
    type Err = StrategyParseError;

    /// Parses `min_duration:55`, `interpolate:75`, or `triadic:1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, value) = s
            .split_once(':')
            .ok_or_else(|| StrategyParseError::MissingParameter(s.to_string()))?;
        let name = name.trim();
        let value = value.trim();
        let param: u64 = value.parse().map_err(|e: std::num::ParseIntError| {
            StrategyParseError::InvalidParameter {
                name: name.to_string(),
                value: value.to_string(),
                reason: e.to_string(),
            }
        })?;
        match name {
            "min_duration" => Ok(Strategy::MinDuration { cutoff_s: param }),
            "interpolate" => Ok(Strategy::Interpolate { max_gap_s: param }),
            "triadic" | "triadic_closure" => {
                let iterations =
                    u32::try_from(param).map_err(|_| StrategyParseError::InvalidParameter {
                        name: name.to_string(),
                        value: value.to_string(),
                        reason: "iteration count out of range".to_string(),
                    })?;
                Ok(Strategy::TriadicClosure { iterations })
            }
            _ => Err(StrategyParseError::UnknownStrategy(name.to_string())),
        }
    }
}

/// Parses a comma-separated pipeline such as
/// `interpolate:75,min_duration:55,triadic:1`. The keyword `default`
/// expands to [`Strategy::default_pipeline`].
pub fn parse_pipeline(s: &str) -> Result<Vec<Strategy>, StrategyParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s == "default" {
        return Ok(Strategy::default_pipeline());
    }
    s.split(',').map(|part| part.trim().parse()).collect()
}

/// Applies each strategy in order.
pub fn apply_pipeline(log: &EventLog, pipeline: &[Strategy]) -> EventLog {
    let mut out = log.clone();
    for step in pipeline {
        out = step.apply(&out);
    }
    out
}

/// Deletes every event strictly shorter than `cutoff_s` seconds. An event
/// lasting exactly the cutoff survives. Treats short contacts as spurious
/// (corridor passes, reflections) at the cost of also removing genuine
/// brief interactions.
pub fn min_duration_filter(log: &EventLog, cutoff_s: u64) -> EventLog {
    let events: Vec<InteractionEvent> = log
        .events()
        .iter()
        .filter(|e| e.duration_s() >= cutoff_s)
        .copied()
        .collect();
    EventLog::from_normalized_parts(log.roster().clone(), log.window(), events)
}

/// Merges consecutive events of the same dyad whenever the gap between
/// them is at most `max_gap_s` seconds (inclusive), filling the gap with
/// contact. Merging is transitive: a chain of fragments separated by
/// short gaps collapses into one event.
pub fn interpolate(log: &EventLog, max_gap_s: u64) -> EventLog {
    let mut events: Vec<InteractionEvent> = Vec::with_capacity(log.event_count());
    for &e in log.events() {
        match events.last_mut() {
            Some(last)
                if last.dyad() == e.dyad() && (e.start() - last.end()) as u64 <= max_gap_s =>
            {
                *last = InteractionEvent::new_unchecked(last.dyad(), last.start(), e.end());
            }
            _ => events.push(e),
        }
    }
    EventLog::from_normalized_parts(log.roster().clone(), log.window(), events)
}

/// Completes open triads second by second.
///
/// For each second, consider the graph whose vertices are badges and
/// whose edges are the dyads active during that second. One iteration
/// finds every open two-path (`A-B` and `A-C` active, `B-C` not) in the
/// state at the start of the round and activates all the missing third
/// edges at once. With enough iterations the graph reaches its fixed
/// point, where every connected component is complete.
///
/// `iterations = 0` returns the log unchanged. Seconds are processed
/// independently, in parallel.
pub fn triadic_closure(log: &EventLog, iterations: u32) -> EventLog {
    if iterations == 0 || log.is_empty() {
        return log.clone();
    }

    let mut raster = rasterize(log);
    let persons: Vec<BadgeId> = log.roster().iter().collect();
    let n = persons.len();
    let person_index =
        |id: BadgeId| -> usize { persons.binary_search(&id).expect("id is in the roster") };

    // (person, person) endpoints of each raster row, row order
    let endpoints: Vec<(usize, usize)> = raster
        .dyads()
        .iter()
        .map(|d| (person_index(d.a()), person_index(d.b())))
        .collect();
    let row_of_pair = |i: usize, j: usize| -> usize {
        // canonical order maps (i, j), i < j, to i*(2n-i-1)/2 + (j-i-1)
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    };

    // active rows per second
    let seconds = raster.window().seconds() as usize;
    let mut active: Vec<Vec<u32>> = vec![Vec::new(); seconds];
    for (row, (_, bits)) in raster.iter_rows().enumerate() {
        for (a, b) in one_runs(bits) {
            for second in &mut active[a..b] {
                second.push(row as u32);
            }
        }
    }

    let additions: Vec<(usize, usize)> = active
        .par_iter()
        .enumerate()
        .filter(|(_, rows)| rows.len() >= 2)
        .flat_map_iter(|(s, rows)| {
            let mut adj = vec![bitvec![u64, Lsb0; 0; n]; n];
            for &row in rows {
                let (i, j) = endpoints[row as usize];
                adj[i].set(j, true);
                adj[j].set(i, true);
            }
            let mut added_rows: Vec<usize> = Vec::new();
            for _ in 0..iterations {
                let mut round: Vec<(usize, usize)> = Vec::new();
                for i in 0..n {
                    if adj[i].not_any() {
                        continue;
                    }
                    for j in (i + 1)..n {
                        if !adj[i][j] && adj[i].iter_ones().any(|k| adj[j][k]) {
                            round.push((i, j));
                        }
                    }
                }
                if round.is_empty() {
                    break;
                }
                for &(i, j) in &round {
                    adj[i].set(j, true);
                    adj[j].set(i, true);
                    added_rows.push(row_of_pair(i, j));
                }
            }
            added_rows.into_iter().map(move |row| (row, s))
        })
        .collect();

    for (row, s) in additions {
        raster.set_at(row, s, true);
    }
    extract_events(&raster)
}
