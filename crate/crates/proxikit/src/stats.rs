//! Self-contained statistics kernel: two-parameter logistic regression,
//! likelihood-ratio comparison, pooled t-test with Cohen's d, and
//! Cohen's kappa.
//!
//! Fitting is implemented here from first principles (Newton-Raphson on
//! the log-likelihood); an external library supplies only the chi-square
//! and Student-t distribution functions used for p-values.

use std::collections::HashMap;
use std::hash::Hash;

use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("outcome and predictor vectors have different lengths")]
    LengthMismatch,
    #[error("too few observations")]
    TooFewObservations,
    #[error("outcome is constant; the intercept has no finite estimate")]
    ConstantOutcome,
    #[error("fits were made on different sample sizes")]
    SampleSizeMismatch,
    #[error("pooled variance is zero; t is undefined")]
    ZeroVariance,
    #[error("both raters are constant and equal; kappa is undefined")]
    DegenerateAgreement,
}

/// A fitted two-parameter logistic model
/// `P(y=1 | x) = 1 / (1 + exp(-(intercept + slope x)))`.
///
/// When `converged` is false (complete separation, or the iteration cap
/// was hit) the coefficients are the last iterate and must not be
/// interpreted as estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogitFit {
    pub intercept: f64,
    pub slope: f64,
    /// Standard errors from the inverse observed information;
    /// `se_slope` is infinite when the slope is not identifiable
    /// (constant predictor).
    pub se_intercept: f64,
    pub se_slope: f64,
    pub log_likelihood: f64,
    pub null_log_likelihood: f64,
    /// McFadden pseudo R-squared, `1 - LL / LL_null`.
    pub mcfadden_r2: f64,
    pub n: usize,
    pub converged: bool,
}

impl LogitFit {
    /// Akaike information criterion with the model's two parameters,
    /// `4 - 2 LL`. Comparable across same-data fits.
    pub fn aic(&self) -> f64 {
        4.0 - 2.0 * self.log_likelihood
    }

    /// Fitted probability at a predictor value.
    pub fn predict(&self, x: f64) -> f64 {
        sigmoid(self.intercept + self.slope * x)
    }
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + exp(x))` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Log-likelihood of the logistic model at the given coefficients.
pub fn logistic_log_likelihood(
    outcome: &[bool],
    predictor: &[f64],
    intercept: f64,
    slope: f64,
) -> f64 {
    debug_assert_eq!(outcome.len(), predictor.len());
    outcome
        .iter()
        .zip(predictor)
        .map(|(&y, &x)| {
            let eta = intercept + slope * x;
            let y = y as i32 as f64;
            y * eta - softplus(eta)
        })
        .sum()
}

/// Gradient of the log-likelihood with respect to (intercept, slope).
pub fn logistic_score(
    outcome: &[bool],
    predictor: &[f64],
    intercept: f64,
    slope: f64,
) -> (f64, f64) {
    debug_assert_eq!(outcome.len(), predictor.len());
    let mut g0 = 0.0;
    let mut g1 = 0.0;
    for (&y, &x) in outcome.iter().zip(predictor) {
        let r = (y as i32 as f64) - sigmoid(intercept + slope * x);
        g0 += r;
        g1 += r * x;
    }
    (g0, g1)
}

/// Observed information (negative Hessian) entries at the coefficients:
/// `(h00, h01, h11)`.
fn information(outcome: &[bool], predictor: &[f64], intercept: f64, slope: f64) -> (f64, f64, f64) {
    let _ = outcome;
    let mut h00 = 0.0;
    let mut h01 = 0.0;
    let mut h11 = 0.0;
    for &x in predictor {
        let p = sigmoid(intercept + slope * x);
        let w = p * (1.0 - p);
        h00 += w;
        h01 += w * x;
        h11 += w * x * x;
    }
    (h00, h01, h11)
}

/// Maximum-likelihood fit by Newton-Raphson, converging when the largest
/// coefficient change drops below 1e-10 (at most 100 iterations).
///
/// A constant predictor yields the closed-form null model: slope zero,
/// intercept at the log-odds of the outcome prevalence, and an exactly
/// zero pseudo R-squared. A constant outcome has no finite intercept and
/// is rejected. Under complete separation the likelihood has no maximum;
/// the fit comes back with `converged: false`.
pub fn fit_logistic(outcome: &[bool], predictor: &[f64]) -> Result<LogitFit, StatsError> {
    if outcome.len() != predictor.len() {
        return Err(StatsError::LengthMismatch);
    }
    let n = outcome.len();
    if n < 2 {
        return Err(StatsError::TooFewObservations);
    }
    let ones = outcome.iter().filter(|&&y| y).count();
    if ones == 0 || ones == n {
        return Err(StatsError::ConstantOutcome);
    }
    let pbar = ones as f64 / n as f64;
    let ll0 = n as f64 * (pbar * pbar.ln() + (1.0 - pbar) * (1.0 - pbar).ln());

    if predictor.iter().all(|&x| x == predictor[0]) {
        return Ok(LogitFit {
            intercept: (pbar / (1.0 - pbar)).ln(),
            slope: 0.0,
            se_intercept: 1.0 / (n as f64 * pbar * (1.0 - pbar)).sqrt(),
            se_slope: f64::INFINITY,
            log_likelihood: ll0,
            null_log_likelihood: ll0,
            mcfadden_r2: 0.0,
            n,
            converged: true,
        });
    }

    let mut b0 = 0.0;
    let mut b1 = 0.0;
    let mut converged = false;
    for _ in 0..100 {
        let (g0, g1) = logistic_score(outcome, predictor, b0, b1);
        let (h00, h01, h11) = information(outcome, predictor, b0, b1);
        let det = h00 * h11 - h01 * h01;
        if !det.is_finite() || det <= 0.0 {
            break;
        }
        let d0 = (h11 * g0 - h01 * g1) / det;
        let d1 = (h00 * g1 - h01 * g0) / det;
        b0 += d0;
        b1 += d1;
        if !(b0.is_finite() && b1.is_finite()) {
            break;
        }
        if d0.abs().max(d1.abs()) < 1e-10 {
            converged = true;
            break;
        }
    }

    let ll = logistic_log_likelihood(outcome, predictor, b0, b1);
    let (h00, h01, h11) = information(outcome, predictor, b0, b1);
    let det = h00 * h11 - h01 * h01;
    let (se_intercept, se_slope) = if det > 0.0 && det.is_finite() {
        ((h11 / det).sqrt(), (h00 / det).sqrt())
    } else {
        (f64::INFINITY, f64::INFINITY)
    };

    Ok(LogitFit {
        intercept: b0,
        slope: b1,
        se_intercept,
        se_slope,
        log_likelihood: ll,
        null_log_likelihood: ll0,
        mcfadden_r2: 1.0 - ll / ll0,
        n,
        converged,
    })
}

/// A likelihood-ratio comparison of two fits on the same data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrTest {
    pub chi2: f64,
    pub df: u64,
    pub p: f64,
}

/// Compares two same-sample fits: `chi2 = 2 |LL_a - LL_b|`, referred to a
/// chi-square distribution with the stated degrees of freedom.
///
/// The test is exact only for nested models (there `df` is the number of
/// constrained parameters); for non-nested same-data models it is a
/// heuristic comparison and [`LogitFit::aic`] should be consulted
/// alongside.
pub fn likelihood_ratio_test(
    fit_a: &LogitFit,
    fit_b: &LogitFit,
    df: u64,
) -> Result<LrTest, StatsError> {
    if fit_a.n != fit_b.n {
        return Err(StatsError::SampleSizeMismatch);
    }
    if df == 0 {
        return Err(StatsError::TooFewObservations);
    }
    let chi2 = 2.0 * (fit_a.log_likelihood - fit_b.log_likelihood).abs();
    let dist = ChiSquared::new(df as f64).expect("df > 0");
    Ok(LrTest {
        chi2,
        df,
        p: dist.sf(chi2),
    })
}

/// A pooled two-sample t-test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    /// Signed as the first group's mean minus the second's.
    pub t: f64,
    pub df: u64,
    /// Two-sided.
    pub p: f64,
    /// Effect size as a magnitude: `|mean difference| / pooled sd`.
    pub cohen_d: f64,
}

/// Pooled-variance two-sample t-test with `df = n0 + n1 - 2` and a
/// two-sided p-value, plus Cohen's d.
pub fn t_test_cohen_d(group0: &[f64], group1: &[f64]) -> Result<TTestResult, StatsError> {
    let n0 = group0.len();
    let n1 = group1.len();
    if n0 < 2 || n1 < 2 {
        return Err(StatsError::TooFewObservations);
    }
    let mean = |g: &[f64]| g.iter().sum::<f64>() / g.len() as f64;
    let m0 = mean(group0);
    let m1 = mean(group1);
    let ss = |g: &[f64], m: f64| g.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
    let df = (n0 + n1 - 2) as u64;
    let pooled_var = (ss(group0, m0) + ss(group1, m1)) / df as f64;
    if pooled_var <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let sp = pooled_var.sqrt();
    let t = (m0 - m1) / (sp * (1.0 / n0 as f64 + 1.0 / n1 as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 2");
    Ok(TTestResult {
        t,
        df,
        p: 2.0 * dist.sf(t.abs()),
        cohen_d: (m0 - m1).abs() / sp,
    })
}

/// Chance-corrected agreement between two raters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaResult {
    /// `(p_o - p_e) / (1 - p_e)`, in [-1, 1].
    pub kappa: f64,
    pub observed_agreement: f64,
    pub chance_agreement: f64,
}

/// Cohen's kappa over two equal-length categorical ratings.
///
/// Chance agreement is the product of the raters' marginal category
/// frequencies; when both raters are constant on the same category the
/// correction divides by zero and the statistic is undefined.
pub fn cohens_kappa<T: Eq + Hash>(
    ratings_a: &[T],
    ratings_b: &[T],
) -> Result<KappaResult, StatsError> {
    if ratings_a.len() != ratings_b.len() {
        return Err(StatsError::LengthMismatch);
    }
    let n = ratings_a.len();
    if n == 0 {
        return Err(StatsError::TooFewObservations);
    }

    let agreements = ratings_a
        .iter()
        .zip(ratings_b)
        .filter(|(a, b)| a == b)
        .count();
    let p_o = agreements as f64 / n as f64;

    fn marginals<T: Eq + Hash>(ratings: &[T]) -> HashMap<&T, usize> {
        let mut counts = HashMap::new();
        for r in ratings {
            *counts.entry(r).or_insert(0) += 1;
        }
        counts
    }
    let ma = marginals(ratings_a);
    let mb = marginals(ratings_b);
    let p_e: f64 = ma
        .iter()
        .filter_map(|(cat, &ca)| mb.get(cat).map(|&cb| (ca * cb) as f64))
        .sum::<f64>()
        / (n * n) as f64;

    if p_e >= 1.0 {
        return Err(StatsError::DegenerateAgreement);
    }
    Ok(KappaResult {
        kappa: (p_o - p_e) / (1.0 - p_e),
        observed_agreement: p_o,
        chance_agreement: p_e,
    })
}
