//! Gap statistics for Tauberian conditions and a finite-prefix rate
//! classifier.
//!
//! For a sequence the statistic is `g_n = √n·D(u_{n−1}, u_n)`; for a series
//! it is `g_n = √n·D(u_n, 0̄)`, which for real series is the condition
//! `a_n = o(1/√n)`. Neither `o(1)` nor `O(1)` can be decided from a finite
//! prefix, so [`classify_rate`] only reports what the prefix looks like,
//! using explicit thresholds.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyNumber, FuzzySequence};

/// Default share of trailing indices treated as the tail.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.25;
/// Minimum number of gap values [`classify_rate`] accepts.
pub const MIN_CLASSIFY_POINTS: usize = 8;
/// Slope magnitude separating "flat" from "growing"/"decaying".
pub const SLOPE_THRESHOLD: f64 = 0.1;
/// A vanishing tail must sit below this fraction of the head supremum.
pub const VANISHING_RATIO: f64 = 0.1;

/// Nonnegative gap values `g_1, g_2, …` (index 1 first).
#[derive(Debug, Clone, PartialEq)]
pub struct GapSeries {
    values: Vec<f64>,
}

impl GapSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "g",
                value: bad,
                reason: "gap values must be finite and nonnegative",
            });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(n, g_n)` pairs starting at `n = 1`.
    pub fn indexed(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &g)| (i + 1, g))
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// `g_n = √n·D(u_{n−1}, u_n)` for `n = 1..len`.
pub fn sequence_gap(seq: &FuzzySequence) -> Result<GapSeries> {
    if seq.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: seq.len(),
        });
    }
    let values = seq
        .terms()
        .windows(2)
        .enumerate()
        .map(|(i, w)| ((i + 1) as f64).sqrt() * w[0].distance(&w[1]))
        .collect();
    GapSeries::new(values)
}

/// `g_n = √n·D(u_n, 0̄)` for `n = 1..len`. The `n = 0` term carries weight
/// `√0` and is omitted, so a one-term series yields an empty gap series.
pub fn series_gap(terms: &FuzzySequence) -> GapSeries {
    let values = terms
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, u)| (n as f64).sqrt() * u.magnitude())
        .collect();
    GapSeries { values }
}

/// Same statistic as [`series_gap`], for real terms `a_n`.
pub fn knopp_gap(terms: &[f64]) -> GapSeries {
    let values = terms
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, a)| (n as f64).sqrt() * a.abs())
        .collect();
    GapSeries { values }
}

/// `sup_n D(u_n, 0̄)` over the prefix.
pub fn prefix_sup_norm(seq: &FuzzySequence) -> f64 {
    seq.iter().map(FuzzyNumber::magnitude).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RateClass {
    Vanishing,
    Bounded,
    Unbounded,
    Inconclusive,
}

impl fmt::Display for RateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RateClass::Vanishing => "vanishing",
            RateClass::Bounded => "bounded",
            RateClass::Unbounded => "unbounded",
            RateClass::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for RateClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "vanishing" => Ok(RateClass::Vanishing),
            "bounded" => Ok(RateClass::Bounded),
            "unbounded" => Ok(RateClass::Unbounded),
            "inconclusive" => Ok(RateClass::Inconclusive),
            other => Err(format!("unknown rate class `{other}`")),
        }
    }
}

/// Finite-prefix verdict on a gap series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateVerdict {
    pub classification: RateClass,
    pub tail_sup: f64,
    pub head_sup: f64,
    /// Least-squares slope of `ln g_n` against `ln n` over the positive tail
    /// values; `−∞` when fewer than two tail values are positive.
    pub slope_estimate: f64,
}

/// Classifies a gap series from its trailing `tail_fraction` of indices.
///
/// * vanishing: `tail_sup < 0.1·head_sup` and slope `≤ −0.1` (or the tail is
///   identically zero)
/// * unbounded: slope `≥ 0.1` and `tail_sup > head_sup`
/// * bounded: `|slope| < 0.1`
/// * otherwise inconclusive
pub fn classify_rate(g: &GapSeries, tail_fraction: f64) -> Result<RateVerdict> {
    if g.len() < MIN_CLASSIFY_POINTS {
        return Err(Error::TooShort {
            needed: MIN_CLASSIFY_POINTS,
            got: g.len(),
        });
    }
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tail_fraction",
            value: tail_fraction,
            reason: "must lie in (0, 1)",
        });
    }
    let len = g.len();
    let tail_len = ((len as f64 * tail_fraction).ceil() as usize).clamp(2, len - 1);
    let split = len - tail_len;
    let sup = |s: &[f64]| s.iter().copied().fold(0.0, f64::max);
    let head_sup = sup(&g.values[..split]);
    let tail_sup = sup(&g.values[split..]);

    let points: Vec<(f64, f64)> = g
        .values
        .iter()
        .enumerate()
        .skip(split)
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, &v)| (((i + 1) as f64).ln(), v.ln()))
        .collect();
    let slope = least_squares_slope(&points).unwrap_or(f64::NEG_INFINITY);

    let classification = if tail_sup == 0.0
        || (tail_sup < VANISHING_RATIO * head_sup && slope <= -SLOPE_THRESHOLD)
    {
        RateClass::Vanishing
    } else if slope >= SLOPE_THRESHOLD && tail_sup > head_sup {
        RateClass::Unbounded
    } else if slope.abs() < SLOPE_THRESHOLD && tail_sup.is_finite() {
        RateClass::Bounded
    } else {
        RateClass::Inconclusive
    };
    Ok(RateVerdict {
        classification,
        tail_sup,
        head_sup,
        slope_estimate: slope,
    })
}

/// Slope of the least-squares line through `points`; `None` with fewer than
/// two distinct abscissae.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
