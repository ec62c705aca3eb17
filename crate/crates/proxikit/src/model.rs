//! Canonical data types for interaction streams.
//!
//! The pipeline is anchored on three representations:
//!
//! 1. [`RawEvent`]: one row as it comes off a badge reader or a coding
//!    sheet; nothing is guaranteed about it.
//! 2. [`EventLog`]: the normalized form: canonical dyads, maximal disjoint
//!    intervals per dyad, everything clipped to the observation window.
//! 3. [`DyadRaster`]: per-second binary presence, one row per unordered
//!    dyad of the roster. This is the universe in which streams are
//!    compared: `D x S` cells, `D = N(N-1)/2` dyads, `S` seconds.
//!
//! Intervals are half-open `[start, end)` in whole seconds, so durations
//! add up exactly and rasterization round-trips losslessly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use bitvec::prelude::*;
use thiserror::Error;

/// Bit container used for raster rows.
pub type BitRow = BitVec<u64, Lsb0>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("observation window is empty or inverted ({t0}..{t_end})")]
    InvalidWindow { t0: i64, t_end: i64 },
    #[error("event {index}: badge interacting with itself (id {id})")]
    SelfLoop { index: usize, id: BadgeId },
    #[error("event {index}: badge {id} is not in the roster")]
    UnknownBadge { index: usize, id: BadgeId },
    #[error("event {index}: interval ends before it starts")]
    ReversedInterval { index: usize },
    #[error("event {index}: interval lies outside the observation window")]
    OutsideWindow { index: usize },
    #[error("new roster must be a superset of the current one (missing {id})")]
    RosterNotSuperset { id: BadgeId },
}

/// Identifier of one badge (equivalently, one participant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BadgeId(pub u32);

impl fmt::Display for BadgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for BadgeId {
    fn from(id: u32) -> Self {
        BadgeId(id)
    }
}

/// An unordered pair of distinct badges, stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dyad {
    a: BadgeId,
    b: BadgeId,
}

impl Dyad {
    /// Canonicalizes the pair; `None` if both ids are equal.
    pub fn new(x: BadgeId, y: BadgeId) -> Option<Self> {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Some(Dyad { a: x, b: y }),
            std::cmp::Ordering::Greater => Some(Dyad { a: y, b: x }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn a(&self) -> BadgeId {
        self.a
    }

    pub fn b(&self) -> BadgeId {
        self.b
    }

    pub fn contains(&self, id: BadgeId) -> bool {
        self.a == id || self.b == id
    }

    /// The partner of `id` in this dyad, if `id` is a member.
    pub fn other(&self, id: BadgeId) -> Option<BadgeId> {
        if id == self.a {
            Some(self.b)
        } else if id == self.b {
            Some(self.a)
        } else {
            None
        }
    }
}

impl fmt::Display for Dyad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// One interaction row before any validation: ids may be unordered or
/// equal, the interval may be reversed or outside the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawEvent {
    pub a: BadgeId,
    pub b: BadgeId,
    pub start: i64,
    pub end: i64,
}

impl RawEvent {
    pub fn new(a: u32, b: u32, start: i64, end: i64) -> Self {
        RawEvent {
            a: BadgeId(a),
            b: BadgeId(b),
            start,
            end,
        }
    }
}

/// One undirected dyadic contact over the half-open interval
/// `[start, end)`, in seconds. Always non-empty: `start < end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct InteractionEvent {
    dyad: Dyad,
    start: i64,
    end: i64,
}

impl InteractionEvent {
    pub fn dyad(&self) -> Dyad {
        self.dyad
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    /// Covered seconds, `end - start`.
    pub fn duration_s(&self) -> u64 {
        (self.end - self.start) as u64
    }

    pub(crate) fn new_unchecked(dyad: Dyad, start: i64, end: i64) -> Self {
        debug_assert!(start < end);
        InteractionEvent { dyad, start, end }
    }
}

/// The period over which streams are compared. Half-open `[t0, t_end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObservationWindow {
    t0: i64,
    t_end: i64,
}

impl ObservationWindow {
    pub fn new(t0: i64, t_end: i64) -> Result<Self, ModelError> {
        if t_end <= t0 {
            return Err(ModelError::InvalidWindow { t0, t_end });
        }
        Ok(ObservationWindow { t0, t_end })
    }

    pub fn start(&self) -> i64 {
        self.t0
    }

    pub fn end(&self) -> i64 {
        self.t_end
    }

    /// Total length `S` in seconds; also the raster row length.
    pub fn seconds(&self) -> u64 {
        (self.t_end - self.t0) as u64
    }

    /// Raster index of the second containing instant `t`, if inside.
    pub fn second_index(&self, t: i64) -> Option<usize> {
        (t >= self.t0 && t < self.t_end).then(|| (t - self.t0) as usize)
    }
}

/// The set of badges under observation. Defines the dyad universe: every
/// unordered pair of roster members is a dyad, whether or not it ever
/// interacts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roster(BTreeSet<BadgeId>);

impl Roster {
    pub fn new(ids: impl IntoIterator<Item = BadgeId>) -> Self {
        Roster(ids.into_iter().collect())
    }

    /// Convenience constructor from plain integers.
    pub fn from_ids(ids: impl IntoIterator<Item = u32>) -> Self {
        Roster(ids.into_iter().map(BadgeId).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: BadgeId) -> bool {
        self.0.contains(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = BadgeId> + '_ {
        self.0.iter().copied()
    }

    /// `D = N(N-1)/2`.
    pub fn dyad_count(&self) -> u64 {
        let n = self.0.len() as u64;
        n * (n - 1) / 2
    }

    /// All dyads in canonical (sorted) order.
    pub fn dyads(&self) -> impl Iterator<Item = Dyad> + '_ {
        let ids: Vec<BadgeId> = self.0.iter().copied().collect();
        (0..ids.len()).flat_map(move |i| {
            let ids = ids.clone();
            ((i + 1)..ids.len()).map(move |j| Dyad {
                a: ids[i],
                b: ids[j],
            })
        })
    }

    pub fn is_superset(&self, other: &Roster) -> bool {
        other.0.iter().all(|id| self.0.contains(id))
    }

    pub fn union(&self, other: &Roster) -> Roster {
        Roster(self.0.union(&other.0).copied().collect())
    }
}

impl FromIterator<BadgeId> for Roster {
    fn from_iter<T: IntoIterator<Item = BadgeId>>(iter: T) -> Self {
        Roster(iter.into_iter().collect())
    }
}

/// A normalized collection of interaction events over one observation
/// window.
///
/// Invariants, maintained by construction:
/// - every event's dyad is drawn from the roster;
/// - events of one dyad are maximal disjoint intervals (no overlap, no
///   abutment);
/// - events are clipped to the window and sorted by `(dyad, start)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    roster: Roster,
    window: ObservationWindow,
    events: Vec<InteractionEvent>,
}

impl EventLog {
    pub fn empty(roster: Roster, window: ObservationWindow) -> Self {
        EventLog {
            roster,
            window,
            events: Vec::new(),
        }
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn window(&self) -> ObservationWindow {
        self.window
    }

    pub fn events(&self) -> &[InteractionEvent] {
        &self.events
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Total covered dyad-seconds. Durations are additive because events
    /// are disjoint per dyad.
    pub fn covered_seconds(&self) -> u64 {
        self.events.iter().map(|e| e.duration_s()).sum()
    }

    /// Covered seconds per dyad; dyads without events are absent.
    pub fn dyad_seconds(&self) -> BTreeMap<Dyad, u64> {
        let mut out = BTreeMap::new();
        for e in &self.events {
            *out.entry(e.dyad).or_insert(0) += e.duration_s();
        }
        out
    }

    /// Rebinds the log to a larger roster (extra badges simply never
    /// interact). Needed when two logs must share one dyad universe.
    pub fn expand_roster(&self, roster: Roster) -> Result<EventLog, ModelError> {
        if let Some(id) = self.roster.iter().find(|id| !roster.contains(*id)) {
            return Err(ModelError::RosterNotSuperset { id });
        }
        Ok(EventLog {
            roster,
            window: self.window,
            events: self.events.clone(),
        })
    }

    /// Constructor for transforms that provably preserve the invariants.
    pub(crate) fn from_normalized_parts(
        roster: Roster,
        window: ObservationWindow,
        events: Vec<InteractionEvent>,
    ) -> Self {
        #[cfg(debug_assertions)]
        {
            for pair in events.windows(2) {
                debug_assert!(pair[0].dyad <= pair[1].dyad, "events not sorted by dyad");
                if pair[0].dyad == pair[1].dyad {
                    debug_assert!(
                        pair[0].end < pair[1].start,
                        "same-dyad events must be disjoint and non-abutting"
                    );
                }
            }
            for e in &events {
                debug_assert!(e.start < e.end);
                debug_assert!(e.start >= window.start() && e.end <= window.end());
                debug_assert!(roster.contains(e.dyad.a) && roster.contains(e.dyad.b));
            }
        }
        EventLog {
            roster,
            window,
            events,
        }
    }
}

/// Validates and canonicalizes raw rows into an [`EventLog`].
///
/// Rules applied, in order per event:
/// - ids must be distinct roster members;
/// - a reversed interval is an error;
/// - a zero-length interval covers no seconds and is dropped;
/// - an interval entirely outside the window is an error, a partial
///   overhang is clipped;
/// - per dyad, overlapping or abutting intervals are unioned into maximal
///   disjoint runs.
///
/// Normalization is idempotent: running it on its own output changes
/// nothing.
pub fn normalize(
    raw: &[RawEvent],
    roster: &Roster,
    window: ObservationWindow,
) -> Result<EventLog, ModelError> {
    let mut clipped: Vec<(Dyad, i64, i64)> = Vec::with_capacity(raw.len());
    for (index, ev) in raw.iter().enumerate() {
        let dyad = Dyad::new(ev.a, ev.b).ok_or(ModelError::SelfLoop { index, id: ev.a })?;
        for id in [dyad.a, dyad.b] {
            if !roster.contains(id) {
                return Err(ModelError::UnknownBadge { index, id });
            }
        }
        if ev.end < ev.start {
            return Err(ModelError::ReversedInterval { index });
        }
        if ev.start == ev.end {
            continue; // covers zero seconds
        }
        if ev.end <= window.start() || ev.start >= window.end() {
            return Err(ModelError::OutsideWindow { index });
        }
        let start = ev.start.max(window.start());
        let end = ev.end.min(window.end());
        clipped.push((dyad, start, end));
    }

    clipped.sort_unstable();
    let mut events: Vec<InteractionEvent> = Vec::with_capacity(clipped.len());
    for (dyad, start, end) in clipped {
        match events.last_mut() {
            // union overlapping or abutting same-dyad intervals
            Some(last) if last.dyad == dyad && start <= last.end => {
                last.end = last.end.max(end);
            }
            _ => events.push(InteractionEvent { dyad, start, end }),
        }
    }

    Ok(EventLog {
        roster: roster.clone(),
        window,
        events,
    })
}

/// Per-second binary presence, one row per roster dyad.
///
/// Cell `(d, i)` is 1 iff the second `[t0+i, t0+i+1)` intersects some
/// event of dyad `d`. Every dyad of the roster has a row, all-zero if the
/// pair never interacts, so the total cell count is exactly `D x S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadRaster {
    roster: Roster,
    window: ObservationWindow,
    dyads: Vec<Dyad>,
    rows: Vec<BitRow>,
}

impl DyadRaster {
    /// All-zero raster over the full dyad universe of `roster`.
    pub fn zeros(roster: Roster, window: ObservationWindow) -> Self {
        let dyads: Vec<Dyad> = roster.dyads().collect();
        let s = window.seconds() as usize;
        let rows = vec![bitvec![u64, Lsb0; 0; s]; dyads.len()];
        DyadRaster {
            roster,
            window,
            dyads,
            rows,
        }
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn window(&self) -> ObservationWindow {
        self.window
    }

    /// Dyads in canonical order, aligned with the row storage.
    pub fn dyads(&self) -> &[Dyad] {
        &self.dyads
    }

    pub fn row_index(&self, dyad: Dyad) -> Option<usize> {
        self.dyads.binary_search(&dyad).ok()
    }

    pub fn row(&self, dyad: Dyad) -> Option<&BitSlice<u64, Lsb0>> {
        self.row_index(dyad).map(|i| self.rows[i].as_bitslice())
    }

    pub fn row_at(&self, index: usize) -> &BitSlice<u64, Lsb0> {
        self.rows[index].as_bitslice()
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = (Dyad, &BitSlice<u64, Lsb0>)> {
        self.dyads
            .iter()
            .copied()
            .zip(self.rows.iter().map(|r| r.as_bitslice()))
    }

    pub fn get(&self, dyad: Dyad, second: usize) -> Option<bool> {
        self.row(dyad).map(|r| r[second])
    }

    pub fn set(&mut self, dyad: Dyad, second: usize, value: bool) {
        let i = self.row_index(dyad).expect("dyad not in raster");
        self.rows[i].set(second, value);
    }

    pub(crate) fn set_at(&mut self, row: usize, second: usize, value: bool) {
        self.rows[row].set(second, value);
    }

    /// `D x S`, the size of the classification universe.
    pub fn total_cells(&self) -> u64 {
        self.dyads.len() as u64 * self.window.seconds()
    }

    /// Number of active (one) cells.
    pub fn count_ones(&self) -> u64 {
        self.rows.iter().map(|r| r.count_ones() as u64).sum()
    }
}

/// Expands a normalized log to its per-second raster.
pub fn rasterize(log: &EventLog) -> DyadRaster {
    let mut raster = DyadRaster::zeros(log.roster().clone(), log.window());
    let t0 = log.window().start();
    for e in log.events() {
        let row = raster
            .row_index(e.dyad())
            .expect("event dyad must be in the roster");
        let a = (e.start() - t0) as usize;
        let b = (e.end() - t0) as usize;
        raster.rows[row][a..b].fill(true);
    }
    raster
}

/// Collapses a raster back to events: every maximal run of ones becomes
/// one interval. Exact inverse of [`rasterize`] on normalized logs.
pub fn extract_events(raster: &DyadRaster) -> EventLog {
    let t0 = raster.window().start();
    let mut events = Vec::new();
    for (dyad, row) in raster.iter_rows() {
        for (a, b) in one_runs(row) {
            events.push(InteractionEvent {
                dyad,
                start: t0 + a as i64,
                end: t0 + b as i64,
            });
        }
    }
    EventLog::from_normalized_parts(raster.roster().clone(), raster.window(), events)
}

/// Maximal runs of ones in `row`, as half-open `(start, end)` index pairs.
pub(crate) fn one_runs(row: &BitSlice<u64, Lsb0>) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut i = 0;
    while let Some(first) = row[i..].first_one() {
        let start = i + first;
        let end = match row[start..].first_zero() {
            Some(z) => start + z,
            None => row.len(),
        };
        runs.push((start, end));
        i = end;
    }
    runs
}
