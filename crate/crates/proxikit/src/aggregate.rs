//! Aggregation of contact streams into networks, and their comparison
//! with self-reported ties.
//!
//! A processed stream collapses into a [`WeightedNetwork`]: one weight
//! per dyad, the total minutes of contact. Survey nominations form a
//! directed [`NominationNetwork`] whose rows exist only for people who
//! actually answered; everyone else is missing, not zero. The two meet
//! in [`nomination_design`] (regression rows) and [`rank_hit_rate`]
//! (was the longest contact also a reported one?).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{BadgeId, Dyad, EventLog, Roster};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AggregateError {
    #[error("badge {0} is not in the roster")]
    UnknownBadge(BadgeId),
    #[error("{0} nominated themselves")]
    SelfNomination(BadgeId),
    #[error("{0} nominated someone but is not listed as a respondent")]
    NominatorNotRespondent(BadgeId),
    #[error("weight for dyad {0} is negative")]
    NegativeWeight(Dyad),
    #[error("networks have different rosters")]
    RosterMismatch,
}

/// Symmetric dyad-level contact weights in minutes. Every roster dyad has
/// an entry, zero if the pair never interacted.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNetwork {
    roster: Roster,
    weights: BTreeMap<Dyad, f64>,
}

impl WeightedNetwork {
    /// Builds a network from explicit weights; unlisted dyads get zero.
    pub fn from_minutes(
        roster: Roster,
        minutes: impl IntoIterator<Item = (Dyad, f64)>,
    ) -> Result<Self, AggregateError> {
        let mut weights: BTreeMap<Dyad, f64> = roster.dyads().map(|d| (d, 0.0)).collect();
        for (dyad, w) in minutes {
            if !w.is_finite() || w < 0.0 {
                return Err(AggregateError::NegativeWeight(dyad));
            }
            match weights.get_mut(&dyad) {
                Some(slot) => *slot = w,
                None => {
                    let id = [dyad.a(), dyad.b()]
                        .into_iter()
                        .find(|id| !roster.contains(*id))
                        .unwrap_or(dyad.a());
                    return Err(AggregateError::UnknownBadge(id));
                }
            }
        }
        Ok(WeightedNetwork { roster, weights })
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    /// Minutes of contact for a dyad; `None` if either id is outside the
    /// roster or the ids are equal.
    pub fn weight(&self, a: BadgeId, b: BadgeId) -> Option<f64> {
        let dyad = Dyad::new(a, b)?;
        self.weights.get(&dyad).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Dyad, f64)> + '_ {
        self.weights.iter().map(|(d, w)| (*d, *w))
    }

    /// Sum of all dyadic weights.
    pub fn total_minutes(&self) -> f64 {
        self.weights.values().sum()
    }

    /// One person's total contact minutes, summed over their dyads.
    pub fn person_total(&self, id: BadgeId) -> Option<f64> {
        if !self.roster.contains(id) {
            return None;
        }
        Some(
            self.weights
                .iter()
                .filter(|(d, _)| d.contains(id))
                .map(|(_, w)| w)
                .sum(),
        )
    }
}

/// Collapses a normalized log into per-dyad contact minutes
/// (covered seconds divided by 60).
pub fn aggregate_minutes(log: &EventLog) -> WeightedNetwork {
    let mut weights: BTreeMap<Dyad, f64> = log.roster().dyads().map(|d| (d, 0.0)).collect();
    for (dyad, seconds) in log.dyad_seconds() {
        weights.insert(dyad, seconds as f64 / 60.0);
    }
    WeightedNetwork {
        roster: log.roster().clone(),
        weights,
    }
}

/// Count, mean, and sample standard deviation of one batch of values.
/// `mean` is `None` for an empty batch, `sd` additionally for a single
/// value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
}

impl SummaryStats {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return SummaryStats {
                n,
                mean: None,
                sd: None,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = (n >= 2).then(|| {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        });
        SummaryStats {
            n,
            mean: Some(mean),
            sd,
        }
    }
}

/// Headline descriptives of one processed stream:
///
/// - `interaction_duration`: seconds per event, over all events;
/// - `aggregated_dyadic_duration`: minutes per dyad, over dyads with at
///   least one event;
/// - `individual_total_duration`: minutes per person, over persons with
///   at least one event.
///
/// On an empty log all three have `n = 0` and undefined moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Descriptives {
    pub interaction_duration: SummaryStats,
    pub aggregated_dyadic_duration: SummaryStats,
    pub individual_total_duration: SummaryStats,
}

pub fn descriptives(log: &EventLog) -> Descriptives {
    let event_durations: Vec<f64> = log.events().iter().map(|e| e.duration_s() as f64).collect();

    let dyad_seconds = log.dyad_seconds();
    let dyad_minutes: Vec<f64> = dyad_seconds.values().map(|&s| s as f64 / 60.0).collect();

    let mut person_seconds: BTreeMap<BadgeId, u64> = BTreeMap::new();
    for (dyad, seconds) in &dyad_seconds {
        *person_seconds.entry(dyad.a()).or_insert(0) += seconds;
        *person_seconds.entry(dyad.b()).or_insert(0) += seconds;
    }
    let person_minutes: Vec<f64> = person_seconds.values().map(|&s| s as f64 / 60.0).collect();

    Descriptives {
        interaction_duration: SummaryStats::from_values(&event_durations),
        aggregated_dyadic_duration: SummaryStats::from_values(&dyad_minutes),
        individual_total_duration: SummaryStats::from_values(&person_minutes),
    }
}

/// State of one directed tie in a nomination network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieState {
    Present,
    Absent,
    Missing,
}

/// Directed self-report adjacency with explicit missingness.
///
/// A tie `(ego, alter)` is `Present` when the ego named the alter,
/// `Absent` when the ego answered the survey and did not, and `Missing`
/// when the ego never answered. Treating non-response as zero would
/// fabricate negatives, so it is kept distinct throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct NominationNetwork {
    roster: Roster,
    respondents: BTreeSet<BadgeId>,
    ties: BTreeMap<(BadgeId, BadgeId), TieState>,
}

impl NominationNetwork {
    /// Builds the dense directed network: rows of non-respondents are
    /// missing, respondent rows default to absent and carry the listed
    /// nominations.
    pub fn new(
        roster: Roster,
        respondents: impl IntoIterator<Item = BadgeId>,
        nominations: impl IntoIterator<Item = (BadgeId, BadgeId)>,
    ) -> Result<Self, AggregateError> {
        let respondents: BTreeSet<BadgeId> = respondents.into_iter().collect();
        if let Some(&id) = respondents.iter().find(|id| !roster.contains(**id)) {
            return Err(AggregateError::UnknownBadge(id));
        }

        let mut ties = BTreeMap::new();
        for ego in roster.iter() {
            let default = if respondents.contains(&ego) {
                TieState::Absent
            } else {
                TieState::Missing
            };
            for alter in roster.iter() {
                if ego != alter {
                    ties.insert((ego, alter), default);
                }
            }
        }

        for (ego, alter) in nominations {
            if ego == alter {
                return Err(AggregateError::SelfNomination(ego));
            }
            for id in [ego, alter] {
                if !roster.contains(id) {
                    return Err(AggregateError::UnknownBadge(id));
                }
            }
            if !respondents.contains(&ego) {
                return Err(AggregateError::NominatorNotRespondent(ego));
            }
            ties.insert((ego, alter), TieState::Present);
        }

        Ok(NominationNetwork {
            roster,
            respondents,
            ties,
        })
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn respondents(&self) -> impl Iterator<Item = BadgeId> + '_ {
        self.respondents.iter().copied()
    }

    pub fn is_respondent(&self, id: BadgeId) -> bool {
        self.respondents.contains(&id)
    }

    /// State of the directed tie `ego -> alter`; `None` if the pair is
    /// not two distinct roster members.
    pub fn tie(&self, ego: BadgeId, alter: BadgeId) -> Option<TieState> {
        self.ties.get(&(ego, alter)).copied()
    }

    /// All directed pairs in `Present` state.
    pub fn present_pairs(&self) -> impl Iterator<Item = (BadgeId, BadgeId)> + '_ {
        self.ties
            .iter()
            .filter(|(_, s)| **s == TieState::Present)
            .map(|(p, _)| *p)
    }

    /// Number of alters the ego named; `None` for non-respondents.
    pub fn out_degree(&self, ego: BadgeId) -> Option<usize> {
        if !self.respondents.contains(&ego) {
            return None;
        }
        Some(
            self.ties
                .range((ego, BadgeId(0))..)
                .take_while(|((e, _), _)| *e == ego)
                .filter(|(_, s)| **s == TieState::Present)
                .count(),
        )
    }

    pub fn is_symmetric(&self) -> bool {
        self.ties
            .iter()
            .all(|(&(i, j), s)| self.ties.get(&(j, i)) == Some(s))
    }
}

/// How to collapse a directed nomination network into an undirected one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetrization {
    /// Leave the network as reported.
    None,
    /// A tie exists if at least one of the two named the other; missing
    /// only when both directions are missing.
    Weak,
    /// A tie exists only if both named each other; missing when either
    /// direction is missing.
    Strong,
}

/// Applies the chosen symmetrization; `Weak` and `Strong` return networks
/// whose tie map is symmetric.
pub fn symmetrize(net: &NominationNetwork, mode: Symmetrization) -> NominationNetwork {
    if mode == Symmetrization::None {
        return net.clone();
    }
    let mut ties = BTreeMap::new();
    for (&(i, j), &fwd) in &net.ties {
        if i > j {
            continue;
        }
        let rev = net.ties[&(j, i)];
        let merged = match mode {
            Symmetrization::Weak => match (fwd, rev) {
                (TieState::Present, _) | (_, TieState::Present) => TieState::Present,
                (TieState::Missing, TieState::Missing) => TieState::Missing,
                _ => TieState::Absent,
            },
            Symmetrization::Strong => match (fwd, rev) {
                (TieState::Missing, _) | (_, TieState::Missing) => TieState::Missing,
                (TieState::Present, TieState::Present) => TieState::Present,
                _ => TieState::Absent,
            },
            Symmetrization::None => unreachable!(),
        };
        ties.insert((i, j), merged);
        ties.insert((j, i), merged);
    }
    NominationNetwork {
        roster: net.roster.clone(),
        respondents: net.respondents.clone(),
        ties,
    }
}

/// One computed rank of the rank/report analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankHit {
    /// Within-ego contact rank, 1 = the alter with the most minutes.
    pub rank: usize,
    /// Respondent egos having an untied alter at this rank.
    pub egos: usize,
    /// Share of those egos that nominated the rank's alter, 0 to 100.
    pub percent: f64,
}

/// For each respondent ego, ranks all alters by decreasing contact
/// minutes and checks whether the alter at each rank was nominated.
///
/// Alters with equal weight cannot be ordered, so every member of a tied
/// group is dropped from the ranks the group spans (later alters keep
/// their positions). Ranks where no ego contributes are omitted from the
/// result.
pub fn rank_hit_rate(
    net: &WeightedNetwork,
    nom: &NominationNetwork,
) -> Result<Vec<RankHit>, AggregateError> {
    if net.roster() != nom.roster() {
        return Err(AggregateError::RosterMismatch);
    }
    let mut hits: BTreeMap<usize, (usize, usize)> = BTreeMap::new(); // rank -> (egos, nominated)
    for ego in nom.respondents() {
        let mut alters: Vec<(BadgeId, f64)> = net
            .roster()
            .iter()
            .filter(|&a| a != ego)
            .map(|a| (a, net.weight(ego, a).unwrap()))
            .collect();
        alters.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));

        let mut position = 1;
        let mut i = 0;
        while i < alters.len() {
            let mut group_end = i + 1;
            while group_end < alters.len() && alters[group_end].1 == alters[i].1 {
                group_end += 1;
            }
            if group_end - i == 1 {
                let (alter, _) = alters[i];
                let entry = hits.entry(position).or_insert((0, 0));
                entry.0 += 1;
                if nom.tie(ego, alter) == Some(TieState::Present) {
                    entry.1 += 1;
                }
            }
            position += group_end - i;
            i = group_end;
        }
    }
    Ok(hits
        .into_iter()
        .map(|(rank, (egos, nominated))| RankHit {
            rank,
            egos,
            percent: 100.0 * nominated as f64 / egos as f64,
        })
        .collect())
}

/// Regression rows pairing contact minutes with the nomination outcome:
/// one row per directed pair whose tie state is observed (ego responded),
/// `(minutes, nominated)`. The effective n is simply the length of the
/// returned vector, kept explicit because respondent filters change it.
pub fn nomination_design(
    net: &WeightedNetwork,
    nom: &NominationNetwork,
) -> Result<Vec<(f64, bool)>, AggregateError> {
    if net.roster() != nom.roster() {
        return Err(AggregateError::RosterMismatch);
    }
    let mut rows = Vec::new();
    for ego in net.roster().iter() {
        for alter in net.roster().iter() {
            if ego == alter {
                continue;
            }
            match nom.tie(ego, alter) {
                Some(TieState::Present) => {
                    rows.push((net.weight(ego, alter).unwrap(), true));
                }
                Some(TieState::Absent) => {
                    rows.push((net.weight(ego, alter).unwrap(), false));
                }
                _ => {}
            }
        }
    }
    Ok(rows)
}
