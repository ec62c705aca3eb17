//! Synthetic ground truth and a badge-physics degradation model.
//!
//! Tests need pairs of streams where the true signal is known by
//! construction. [`generate_truth`] expands a schedule of group meetings
//! into dyadic events (every pair of co-present members interacts).
//! [`degrade`] then imitates what badge readers actually deliver:
//! contacts broken into fragments by random dropouts, and very short
//! fragments stretched to a storage quantum.
//!
//! The degradation keeps two anchors that make exact oracles possible:
//! fragments stay inside the original event with its first and last
//! second intact, and interior gaps never exceed `dropout_gap_max_s`.
//! With quantization off, bridging gaps of that length therefore restores
//! the truth bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{
    normalize, BadgeId, Dyad, EventLog, InteractionEvent, ModelError, ObservationWindow, RawEvent,
    Roster,
};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("meeting {index}: fewer than two members")]
    GroupTooSmall { index: usize },
    #[error("meeting {index}: badge {id} is not in the roster")]
    MemberOutsideRoster { index: usize, id: BadgeId },
    #[error("meeting {index}: span is empty or reversed")]
    EmptyMeeting { index: usize },
    #[error("meeting {index}: lies outside the observation window")]
    MeetingOutsideWindow { index: usize },
    #[error("badge {id} is in two meetings at once (meetings {first} and {second})")]
    OverlappingMembership {
        id: BadgeId,
        first: usize,
        second: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Detection geometry of a badge pair, in meters and degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    /// Maximum face-to-face distance at which badges detect each other.
    pub max_edge_distance_m: f64,
    pub distance_sd_m: f64,
    /// Maximum deviation from facing straight at the partner, per side.
    pub half_angle_deg: f64,
    pub half_angle_sd_deg: f64,
    /// How far a reader hears a badge with clear line of sight.
    pub reader_range_clear_m: f64,
    /// The same range with a human body in between.
    pub reader_range_person_m: f64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        GeometryParams {
            max_edge_distance_m: 1.61,
            distance_sd_m: 0.35,
            half_angle_deg: 32.6,
            half_angle_sd_deg: 7.56,
            reader_range_clear_m: 50.0,
            reader_range_person_m: 26.8,
        }
    }
}

/// Fixed-threshold detection: true iff the pair is close enough and both
/// badges face each other within the half angle. Angles are signed
/// degrees; only their magnitude matters.
pub fn detect_edge(
    distance_m: f64,
    angle_a_deg: f64,
    angle_b_deg: f64,
    geometry: &GeometryParams,
) -> bool {
    distance_m <= geometry.max_edge_distance_m
        && angle_a_deg.abs() <= geometry.half_angle_deg
        && angle_b_deg.abs() <= geometry.half_angle_deg
}

/// Stochastic detection: thresholds are drawn per call from normal
/// distributions around the configured means, mimicking pair-to-pair
/// hardware variation. Deterministic given the RNG state.
pub fn detect_edge_sampled(
    distance_m: f64,
    angle_a_deg: f64,
    angle_b_deg: f64,
    geometry: &GeometryParams,
    rng: &mut impl rand::Rng,
) -> bool {
    let dist_thr = Normal::new(geometry.max_edge_distance_m, geometry.distance_sd_m)
        .expect("positive sd")
        .sample(rng);
    let angle_a_thr = Normal::new(geometry.half_angle_deg, geometry.half_angle_sd_deg)
        .expect("positive sd")
        .sample(rng);
    let angle_b_thr = Normal::new(geometry.half_angle_deg, geometry.half_angle_sd_deg)
        .expect("positive sd")
        .sample(rng);
    distance_m <= dist_thr && angle_a_deg.abs() <= angle_a_thr && angle_b_deg.abs() <= angle_b_thr
}

/// One scheduled group interaction over `[start, end)`: every pair of
/// members is in contact for the whole span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMeeting {
    pub members: Vec<BadgeId>,
    pub start: i64,
    pub end: i64,
}

impl GroupMeeting {
    pub fn new(members: impl IntoIterator<Item = u32>, start: i64, end: i64) -> Self {
        GroupMeeting {
            members: members.into_iter().map(BadgeId).collect(),
            start,
            end,
        }
    }
}

/// A full synthetic setting: who is observed, for how long, and which
/// group meetings take place. People can only be in one meeting at a
/// time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub roster: Roster,
    pub window: ObservationWindow,
    pub meetings: Vec<GroupMeeting>,
}

impl Scenario {
    /// Checks group sizes, roster membership, spans, and that no badge
    /// sits in two overlapping meetings.
    pub fn validate(&self) -> Result<(), SimError> {
        for (index, m) in self.meetings.iter().enumerate() {
            if m.members.len() < 2 {
                return Err(SimError::GroupTooSmall { index });
            }
            if let Some(&id) = m.members.iter().find(|id| !self.roster.contains(**id)) {
                return Err(SimError::MemberOutsideRoster { index, id });
            }
            if m.end <= m.start {
                return Err(SimError::EmptyMeeting { index });
            }
            if m.start < self.window.start() || m.end > self.window.end() {
                return Err(SimError::MeetingOutsideWindow { index });
            }
        }
        for (i, a) in self.meetings.iter().enumerate() {
            for (j, b) in self.meetings.iter().enumerate().skip(i + 1) {
                if a.start < b.end && b.start < a.end {
                    if let Some(&id) = a.members.iter().find(|id| b.members.contains(id)) {
                        return Err(SimError::OverlappingMembership {
                            id,
                            first: i,
                            second: j,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Expands the schedule into ground truth: for each meeting, one event
/// per pair of members over the meeting's span. Purely deterministic.
pub fn generate_truth(scenario: &Scenario) -> Result<EventLog, SimError> {
    scenario.validate()?;
    let mut raw = Vec::new();
    for m in &scenario.meetings {
        for (i, &a) in m.members.iter().enumerate() {
            for &b in &m.members[i + 1..] {
                raw.push(RawEvent {
                    a,
                    b,
                    start: m.start,
                    end: m.end,
                });
            }
        }
    }
    Ok(normalize(&raw, &scenario.roster, scenario.window)?)
}

/// Knobs of the degradation model.
///
/// Dropouts: each event suffers a Poisson number of gaps
/// (`dropout_rate_per_min` per minute of contact), with exponentially
/// distributed lengths of mean `dropout_gap_mean_s`, clamped to
/// `[1, dropout_gap_max_s]` seconds. Gaps that do not fit (every
/// fragment keeps at least one second) are discarded.
///
/// Quantization: fragments shorter than `min_quantum_s` are stretched to
/// that length (forward, then backward at the window edge), mirroring
/// badges that store a minimum interaction length. `0` and `1` both
/// disable it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradationParams {
    pub dropout_rate_per_min: f64,
    pub dropout_gap_mean_s: f64,
    pub dropout_gap_max_s: f64,
    pub min_quantum_s: u64,
    pub seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn dyad_rng(seed: u64, dyad: Dyad) -> ChaCha8Rng {
    let mut h = splitmix64(seed ^ 0x70726f78696b6974); // "proxikit"
    h = splitmix64(h ^ u64::from(dyad.a().0));
    h = splitmix64(h ^ u64::from(dyad.b().0));
    ChaCha8Rng::seed_from_u64(h)
}

/// Applies dropout and quantization to a truth log. Deterministic for a
/// given seed: each dyad gets its own derived RNG stream, so results do
/// not depend on scheduling or on other dyads.
pub fn degrade(truth: &EventLog, params: &DegradationParams) -> EventLog {
    let window = truth.window();

    // group events per dyad, preserving order
    let mut per_dyad: Vec<(Dyad, Vec<InteractionEvent>)> = Vec::new();
    for &e in truth.events() {
        match per_dyad.last_mut() {
            Some((d, list)) if *d == e.dyad() => list.push(e),
            _ => per_dyad.push((e.dyad(), vec![e])),
        }
    }

    let raw: Vec<RawEvent> = per_dyad
        .par_iter()
        .flat_map_iter(|(dyad, events)| {
            let mut rng = dyad_rng(params.seed, *dyad);
            let mut out = Vec::new();
            for e in events {
                degrade_event(e, params, window, &mut rng, &mut out);
            }
            out
        })
        .collect();

    normalize(&raw, truth.roster(), window).expect("degradation stays inside the window")
}

fn degrade_event(
    event: &InteractionEvent,
    params: &DegradationParams,
    window: ObservationWindow,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<RawEvent>,
) {
    let len = event.duration_s();
    let gap_cap = params.dropout_gap_max_s.floor() as u64;

    // how many gaps, and how long each
    let mut gaps: Vec<u64> = Vec::new();
    let lambda = params.dropout_rate_per_min * len as f64 / 60.0;
    if lambda > 0.0 && gap_cap >= 1 && params.dropout_gap_mean_s > 0.0 {
        let count = Poisson::new(lambda).expect("positive rate").sample(rng) as usize;
        let exp = Exp::new(1.0 / params.dropout_gap_mean_s).expect("positive mean");
        for _ in 0..count {
            let g = exp.sample(rng).round() as u64;
            gaps.push(g.clamp(1, gap_cap));
        }
    }
    // drop gaps that no longer fit; every fragment keeps >= 1 s
    while !gaps.is_empty() {
        let need = gaps.iter().sum::<u64>() + gaps.len() as u64 + 1;
        if need <= len {
            break;
        }
        gaps.pop();
    }

    // distribute the free seconds among the k+1 fragments via a
    // stars-and-bars draw: choose k bar positions among free + k slots
    let k = gaps.len();
    let free = (len - gaps.iter().sum::<u64>() - (k as u64 + 1)) as usize;
    let mut extras = vec![0usize; k + 1];
    if k == 0 {
        extras[0] = free;
    } else {
        let mut bars = rand::seq::index::sample(rng, free + k, k).into_vec();
        bars.sort_unstable();
        let mut prev = -1i64;
        for (i, &b) in bars.iter().enumerate() {
            extras[i] = (b as i64 - prev - 1) as usize;
            prev = b as i64;
        }
        extras[k] = (free + k) - 1 - bars[k - 1];
    }

    let mut t = event.start();
    for i in 0..=k {
        let fragment = 1 + extras[i] as i64;
        push_quantized(
            event.dyad(),
            t,
            t + fragment,
            params.min_quantum_s,
            window,
            out,
        );
        t += fragment;
        if i < k {
            t += gaps[i] as i64;
        }
    }
    debug_assert_eq!(t, event.end());
}

/// Emits `[start, end)`, stretched to the storage quantum if shorter:
/// first forward, then backward when the window edge is in the way.
fn push_quantized(
    dyad: Dyad,
    start: i64,
    end: i64,
    min_quantum_s: u64,
    window: ObservationWindow,
    out: &mut Vec<RawEvent>,
) {
    let mut start = start;
    let mut end = end;
    let deficit = min_quantum_s as i64 - (end - start);
    if deficit > 0 {
        end = (end + deficit).min(window.end());
        let deficit = min_quantum_s as i64 - (end - start);
        if deficit > 0 {
            start = (start - deficit).max(window.start());
        }
    }
    out.push(RawEvent {
        a: dyad.a(),
        b: dyad.b(),
        start,
        end,
    });
}

/// Builds a random unimodal scenario: the window is cut into consecutive
/// slots, and in each slot the roster is shuffled and dealt into groups
/// of 2 to `max_group_size` (a remainder below 2 sits the slot out).
/// Meetings in one slot share no members, and slots do not overlap, so
/// the result always validates.
pub fn random_scenario(
    roster: Roster,
    window: ObservationWindow,
    slot_s: u64,
    max_group_size: usize,
    seed: u64,
) -> Scenario {
    assert!(slot_s >= 1, "slots must be at least one second");
    assert!(max_group_size >= 2, "groups need at least two members");
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 0x7363656e6172696f)); // "scenario"
    let mut meetings = Vec::new();
    let mut t = window.start();
    while t + slot_s as i64 <= window.end() {
        let mut ids: Vec<BadgeId> = roster.iter().collect();
        use rand::seq::SliceRandom;
        ids.shuffle(&mut rng);
        let mut i = 0;
        while ids.len() - i >= 2 {
            let size = rand::Rng::random_range(&mut rng, 2..=max_group_size.min(ids.len() - i));
            meetings.push(GroupMeeting {
                members: ids[i..i + size].to_vec(),
                start: t,
                end: t + slot_s as i64,
            });
            i += size;
        }
        t += slot_s as i64;
    }
    Scenario {
        roster,
        window,
        meetings,
    }
}
