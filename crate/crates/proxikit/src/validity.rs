//! Second-level validation of a processed stream against ground truth.
//!
//! Both streams are rasterized over the same roster and observation
//! window, and every dyad-second cell is classified: contact in both is a
//! true positive, contact only in the measured stream a false positive,
//! and so on. The universe has exactly `D x S` cells, so the four counts
//! always add up.
//!
//! Ratios whose denominator is zero are reported as `None` rather than
//! NaN or a silent zero; downstream code must decide what an undefined
//! sensitivity means for its use case.

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{rasterize, DyadRaster, EventLog};
use crate::preprocess::{apply_pipeline, Strategy, StrategyKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidityError {
    #[error("streams have different rosters")]
    RosterMismatch,
    #[error("streams have different observation windows")]
    WindowMismatch,
    #[error("sweep values must be strictly increasing")]
    GridNotIncreasing,
}

/// Dyad-second confusion counts. `total()` always equals `D x S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassificationTable {
    pub true_positive: u64,
    pub false_positive: u64,
    pub false_negative: u64,
    pub true_negative: u64,
}

impl ClassificationTable {
    pub fn total(&self) -> u64 {
        self.true_positive + self.false_positive + self.false_negative + self.true_negative
    }

    /// Seconds of contact in the ground truth, `TP + FN`.
    pub fn actual_positive(&self) -> u64 {
        self.true_positive + self.false_negative
    }

    /// Seconds without contact in the ground truth, `TN + FP`.
    pub fn actual_negative(&self) -> u64 {
        self.true_negative + self.false_positive
    }

    pub fn metrics(&self) -> ValidityMetrics {
        let sensitivity = ratio(self.true_positive, self.actual_positive());
        let specificity = ratio(self.true_negative, self.actual_negative());
        let accuracy = ratio(self.true_positive + self.true_negative, self.total());
        let sum_sens_spec = match (sensitivity, specificity) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        ValidityMetrics {
            sensitivity,
            specificity,
            accuracy,
            sum_sens_spec,
        }
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den != 0).then(|| num as f64 / den as f64)
}

/// The headline ratios. Each is `None` when its denominator is zero.
///
/// - sensitivity: `TP / (TP + FN)`, share of true contact recovered;
/// - specificity: `TN / (TN + FP)`, share of true non-contact kept clean;
/// - accuracy: `(TP + TN) / total`, the primary tuning criterion;
/// - sum_sens_spec: sensitivity plus specificity, an alternative tuning
///   criterion that weights the rare positive class equally (range 0
///   to 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityMetrics {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub accuracy: Option<f64>,
    pub sum_sens_spec: Option<f64>,
}

/// Classifies every dyad-second of `measured` against `truth`. Rows are
/// compared with bitwise AND and popcounts, one pass per dyad.
///
/// The rasters must share roster and window; expand rosters beforehand
/// if one side observed extra badges.
pub fn classify(
    measured: &DyadRaster,
    truth: &DyadRaster,
) -> Result<ClassificationTable, ValidityError> {
    if measured.roster() != truth.roster() {
        return Err(ValidityError::RosterMismatch);
    }
    if measured.window() != truth.window() {
        return Err(ValidityError::WindowMismatch);
    }
    let s = measured.window().seconds();
    let mut table = ClassificationTable::default();
    for ((_, r), (_, v)) in measured.iter_rows().zip(truth.iter_rows()) {
        let mut both = r.to_bitvec();
        both &= v;
        let tp = both.count_ones() as u64;
        let r1 = r.count_ones() as u64;
        let v1 = v.count_ones() as u64;
        table.true_positive += tp;
        table.false_positive += r1 - tp;
        table.false_negative += v1 - tp;
        table.true_negative += s - r1 + tp - v1;
    }
    Ok(table)
}

/// [`classify`] for event logs; rasterizes both sides first.
pub fn classify_logs(
    measured: &EventLog,
    truth: &EventLog,
) -> Result<ClassificationTable, ValidityError> {
    classify(&rasterize(measured), &rasterize(truth))
}

/// One evaluated point of a parameter sweep. `value` is `None` for the
/// unprocessed baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: Option<u64>,
    pub table: ClassificationTable,
    pub metrics: ValidityMetrics,
}

impl SweepPoint {
    /// `"none"` for the baseline, otherwise the parameter value.
    pub fn label(&self) -> String {
        match self.value {
            Some(v) => v.to_string(),
            None => "none".to_string(),
        }
    }
}

/// A swept strategy's curve: the baseline first, then one point per
/// parameter value in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: StrategyKind,
    /// Pipeline applied before every point, empty for plain sweeps.
    pub base: Vec<Strategy>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Point with the highest accuracy; earlier points win ties.
    /// `None` when every point's accuracy is undefined.
    pub fn best_by_accuracy(&self) -> Option<&SweepPoint> {
        best_by(&self.points, |p| p.metrics.accuracy)
    }

    /// Point with the highest sensitivity + specificity sum; earlier
    /// points win ties.
    pub fn best_by_sum(&self) -> Option<&SweepPoint> {
        best_by(&self.points, |p| p.metrics.sum_sens_spec)
    }
}

fn best_by(points: &[SweepPoint], key: impl Fn(&SweepPoint) -> Option<f64>) -> Option<&SweepPoint> {
    let mut best: Option<(&SweepPoint, f64)> = None;
    for p in points {
        if let Some(v) = key(p) {
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((p, v));
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Applies one strategy kind at each of the given parameter values and
/// classifies every result against the truth. The untouched stream is
/// included first as the baseline point. Values must be strictly
/// increasing. Points are evaluated in parallel.
pub fn sweep(
    measured: &EventLog,
    truth: &EventLog,
    kind: StrategyKind,
    values: &[u64],
) -> Result<SweepResult, ValidityError> {
    sweep_combined(measured, truth, &[], kind, values)
}

/// Like [`sweep`], but applies `base` to the measured stream first and
/// sweeps each value on top of it. The baseline point is the base
/// pipeline alone.
pub fn sweep_combined(
    measured: &EventLog,
    truth: &EventLog,
    base: &[Strategy],
    kind: StrategyKind,
    values: &[u64],
) -> Result<SweepResult, ValidityError> {
    if !values.windows(2).all(|w| w[0] < w[1]) {
        return Err(ValidityError::GridNotIncreasing);
    }
    let prepared = apply_pipeline(measured, base);
    let truth_raster = rasterize(truth);

    let baseline_table = classify(&rasterize(&prepared), &truth_raster)?;
    let mut points = vec![SweepPoint {
        value: None,
        table: baseline_table,
        metrics: baseline_table.metrics(),
    }];

    let swept: Vec<SweepPoint> = values
        .par_iter()
        .map(|&value| {
            let processed = kind.with_value(value).apply(&prepared);
            let table = classify(&rasterize(&processed), &truth_raster)
                .expect("processing preserves roster and window");
            SweepPoint {
                value: Some(value),
                table,
                metrics: table.metrics(),
            }
        })
        .collect();
    points.extend(swept);

    Ok(SweepResult {
        kind,
        base: base.to_vec(),
        points,
    })
}

/// The default sweep grid for each strategy kind: deletion cutoffs 5 s
/// to 120 s and gap bounds 5 s to 340 s, both in steps of 5, and one to
/// four closure rounds.
pub fn default_grid(kind: StrategyKind) -> Vec<u64> {
    match kind {
        StrategyKind::MinDuration => (1..=24).map(|k| k * 5).collect(),
        StrategyKind::Interpolate => (1..=68).map(|k| k * 5).collect(),
        StrategyKind::TriadicClosure => (1..=4).collect(),
    }
}
