//! Fuzzy numbers in α-cut form.
//!
//! A [`FuzzyNumber`] stores its lower and upper endpoint functions sampled on
//! a strictly increasing grid of levels `0 = α₀ < α₁ < … < αₘ = 1`. Between
//! grid nodes the endpoints are linear, so sums and nonnegative combinations
//! computed node by node are exact, and the supremum metric is attained at a
//! node.
//!
//! Binary operations on numbers carried on different grids first resample
//! both operands onto the union of the two grids.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of levels in the default uniform grid `{j/100 : j = 0..=100}`.
pub const DEFAULT_GRID_SIZE: usize = 101;

/// Tolerance used when snapping endpoint functions back onto the set of
/// valid (nested) α-cuts. Scaled by the magnitude of the endpoints.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Levels closer than this are treated as the same node when grids merge.
const LEVEL_MERGE_EPS: f64 = 1e-12;

/// Uniform grid with `size` levels from 0 to 1 inclusive.
pub fn uniform_grid(size: usize) -> Result<Vec<f64>> {
    if size < 2 {
        return Err(Error::InvalidGrid(format!(
            "a grid needs at least 2 levels, got {size}"
        )));
    }
    let last = (size - 1) as f64;
    Ok((0..size).map(|j| j as f64 / last).collect())
}

/// Checks that `levels` is strictly increasing, starts at 0 and ends at 1.
pub fn validate_grid(levels: &[f64]) -> Result<()> {
    if levels.len() < 2 {
        return Err(Error::InvalidGrid(format!(
            "a grid needs at least 2 levels, got {}",
            levels.len()
        )));
    }
    if levels[0] != 0.0 {
        return Err(Error::InvalidGrid(format!(
            "first level must be 0, got {}",
            levels[0]
        )));
    }
    if levels[levels.len() - 1] != 1.0 {
        return Err(Error::InvalidGrid(format!(
            "last level must be 1, got {}",
            levels[levels.len() - 1]
        )));
    }
    if let Some(w) = levels
        .windows(2)
        .find(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::InvalidGrid(format!(
            "levels must be strictly increasing, found {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Union of two valid grids. Levels within `1e-12` of each other collapse to
/// the one from `a`.
pub fn merge_grids(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a == b {
        return a.to_vec();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if (x - y).abs() <= LEVEL_MERGE_EPS => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        match out.last() {
            Some(&prev) if next - prev <= LEVEL_MERGE_EPS => {}
            _ => out.push(next),
        }
    }
    // endpoints are exactly 0 and 1 on both inputs
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}

/// A fuzzy number given by its α-cuts `[u⁻_α, u⁺_α]` on a level grid.
///
/// Invariants: the three vectors have equal length; the grid is valid; all
/// endpoints are finite; `lower` is nondecreasing, `upper` nonincreasing and
/// `lower ≤ upper` at every node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FuzzyNumberDoc")]
pub struct FuzzyNumber {
    levels: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl FuzzyNumber {
    /// Validates and builds a fuzzy number.
    ///
    /// Monotonicity or ordering violations no larger than [`MONOTONE_SLACK`]
    /// (relative to the endpoint magnitude) are projected away; larger ones
    /// are rejected.
    pub fn new(levels: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        validate_grid(&levels)?;
        if lower.len() != levels.len() || upper.len() != levels.len() {
            return Err(Error::InvalidFuzzyNumber(format!(
                "{} levels but {} lower and {} upper endpoints",
                levels.len(),
                lower.len(),
                upper.len()
            )));
        }
        if let Some(x) = lower.iter().chain(upper.iter()).find(|x| !x.is_finite()) {
            return Err(Error::InvalidFuzzyNumber(format!(
                "endpoint {x} is not finite"
            )));
        }
        let slack = slack_for(&lower, &upper);
        for j in 1..levels.len() {
            if lower[j] < lower[j - 1] - slack {
                return Err(Error::InvalidFuzzyNumber(format!(
                    "lower endpoint decreases between α = {} and α = {}",
                    levels[j - 1],
                    levels[j]
                )));
            }
            if upper[j] > upper[j - 1] + slack {
                return Err(Error::InvalidFuzzyNumber(format!(
                    "upper endpoint increases between α = {} and α = {}",
                    levels[j - 1],
                    levels[j]
                )));
            }
        }
        if let Some(j) = (0..levels.len()).find(|&j| lower[j] > upper[j] + slack) {
            return Err(Error::InvalidFuzzyNumber(format!(
                "empty α-cut at α = {}: [{}, {}]",
                levels[j], lower[j], upper[j]
            )));
        }
        Ok(Self::from_parts(levels, lower, upper))
    }

    /// Builds a fuzzy number without validation.
    ///
    /// The caller guarantees every invariant of [`FuzzyNumber`]; this is
    /// meant for internal loops whose inputs are already valid. Debug builds
    /// still assert the invariants.
    pub fn new_unchecked(levels: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let u = Self {
            levels,
            lower,
            upper,
        };
        u.debug_check();
        u
    }

    /// Snaps near-valid endpoints (rounding noise) and wraps them.
    fn from_parts(levels: Vec<f64>, mut lower: Vec<f64>, mut upper: Vec<f64>) -> Self {
        project_nested(&mut lower, &mut upper);
        Self::new_unchecked(levels, lower, upper)
    }

    /// The crisp number `r̄` on the two-level grid `{0, 1}`.
    pub fn crisp(r: f64) -> Result<Self> {
        Self::crisp_on(r, vec![0.0, 1.0])
    }

    /// The crisp number `r̄` sampled on `levels`.
    pub fn crisp_on(r: f64, levels: Vec<f64>) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::InvalidParameter {
                name: "r",
                value: r,
                reason: "crisp value must be finite",
            });
        }
        validate_grid(&levels)?;
        let n = levels.len();
        Ok(Self::new_unchecked(levels, vec![r; n], vec![r; n]))
    }

    /// The neutral element `0̄`.
    pub fn zero() -> Self {
        Self::new_unchecked(vec![0.0, 1.0], vec![0.0; 2], vec![0.0; 2])
    }

    /// Triangular number with support `[a, c]` and peak `b`, sampled on
    /// `levels`: `[u]_α = [a + α(b − a), c − α(c − b)]`.
    pub fn triangular(a: f64, b: f64, c: f64, levels: Vec<f64>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidFuzzyNumber(
                "triangular parameters must be finite".into(),
            ));
        }
        if !(a <= b && b <= c) {
            return Err(Error::InvalidFuzzyNumber(format!(
                "triangular parameters must satisfy a <= b <= c, got ({a}, {b}, {c})"
            )));
        }
        Self::from_cut_fn(levels, |alpha| (a + alpha * (b - a), c - alpha * (c - b)))
    }

    /// Samples an α-cut function `α ↦ (u⁻_α, u⁺_α)` on `levels`.
    pub fn from_cut_fn<F>(levels: Vec<f64>, cut: F) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64),
    {
        let (lower, upper) = levels.iter().map(|&alpha| cut(alpha)).unzip();
        Self::new(levels, lower, upper)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// The α-cut `[u⁻_α, u⁺_α]` at an arbitrary level, by linear
    /// interpolation between grid nodes. `alpha` is clamped to `[0, 1]`.
    pub fn cut(&self, alpha: f64) -> (f64, f64) {
        let alpha = alpha.clamp(0.0, 1.0);
        let m = self.levels.len();
        // index of the first node strictly above alpha
        let hi = self.levels.partition_point(|&l| l <= alpha);
        if hi == 0 {
            return (self.lower[0], self.upper[0]);
        }
        if hi >= m {
            return (self.lower[m - 1], self.upper[m - 1]);
        }
        let lo = hi - 1;
        if self.levels[lo] == alpha {
            return (self.lower[lo], self.upper[lo]);
        }
        let t = (alpha - self.levels[lo]) / (self.levels[hi] - self.levels[lo]);
        (
            lerp(self.lower[lo], self.lower[hi], t),
            lerp(self.upper[lo], self.upper[hi], t),
        )
    }

    /// True when every α-cut is a single point.
    pub fn is_crisp(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(l, u)| l == u)
            && self.lower.iter().all(|&l| l == self.lower[0])
    }

    /// Resamples onto `levels` by piecewise-linear interpolation.
    pub fn refine_to_grid(&self, levels: &[f64]) -> Result<Self> {
        validate_grid(levels)?;
        Ok(self.resample(levels))
    }

    fn resample(&self, levels: &[f64]) -> Self {
        if levels == self.levels.as_slice() {
            return self.clone();
        }
        let (lower, upper) = levels.iter().map(|&alpha| self.cut(alpha)).unzip();
        Self::from_parts(levels.to_vec(), lower, upper)
    }

    /// `[u + v]_α = [u⁻_α + v⁻_α, u⁺_α + v⁺_α]`.
    pub fn add(&self, other: &Self) -> Self {
        let (u, v) = on_shared_grid(self, other);
        let lower = u.lower.iter().zip(&v.lower).map(|(a, b)| a + b).collect();
        let upper = u.upper.iter().zip(&v.upper).map(|(a, b)| a + b).collect();
        Self::from_parts(u.levels.clone(), lower, upper)
    }

    /// `[ku]_α = k[u]_α` as an interval image: endpoints swap when `k < 0`.
    pub fn scale(&self, k: f64) -> Self {
        let (lower, upper): (Vec<f64>, Vec<f64>) = if k >= 0.0 {
            (
                self.lower.iter().map(|x| k * x).collect(),
                self.upper.iter().map(|x| k * x).collect(),
            )
        } else {
            (
                self.upper.iter().map(|x| k * x).collect(),
                self.lower.iter().map(|x| k * x).collect(),
            )
        };
        // k * 0.0 with k < 0 yields -0.0; normalise so crisp zero stays +0
        let fix = |v: Vec<f64>| v.into_iter().map(|x| x + 0.0).collect();
        Self::from_parts(self.levels.clone(), fix(lower), fix(upper))
    }

    /// Supremum metric `D(u, v) = sup_α max(|u⁻_α − v⁻_α|, |u⁺_α − v⁺_α|)`.
    ///
    /// Evaluated on the merged grid, where it is exact for piecewise-linear
    /// endpoints.
    pub fn distance(&self, other: &Self) -> f64 {
        let (u, v) = on_shared_grid(self, other);
        u.lower
            .iter()
            .zip(&v.lower)
            .zip(u.upper.iter().zip(&v.upper))
            .map(|((a, b), (c, d))| (a - b).abs().max((c - d).abs()))
            .fold(0.0, f64::max)
    }

    /// `D(u, 0̄)`, the largest endpoint magnitude.
    pub fn magnitude(&self) -> f64 {
        self.lower
            .iter()
            .chain(&self.upper)
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }

    fn debug_check(&self) {
        debug_assert_eq!(self.lower.len(), self.levels.len());
        debug_assert_eq!(self.upper.len(), self.levels.len());
        debug_assert!(validate_grid(&self.levels).is_ok());
        debug_assert!(self.lower.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(self.upper.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(self.lower.iter().zip(&self.upper).all(|(l, u)| l <= u));
    }
}

impl Add for &FuzzyNumber {
    type Output = FuzzyNumber;

    fn add(self, rhs: &FuzzyNumber) -> FuzzyNumber {
        FuzzyNumber::add(self, rhs)
    }
}

impl Mul<&FuzzyNumber> for f64 {
    type Output = FuzzyNumber;

    fn mul(self, rhs: &FuzzyNumber) -> FuzzyNumber {
        rhs.scale(self)
    }
}

/// Serialized forms: explicit endpoint arrays, or the `{"tri": [a, b, c]}`
/// shorthand on the default grid.
#[derive(Deserialize)]
#[serde(untagged)]
enum FuzzyNumberDoc {
    Explicit {
        levels: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Triangular {
        tri: [f64; 3],
    },
}

impl TryFrom<FuzzyNumberDoc> for FuzzyNumber {
    type Error = Error;

    fn try_from(doc: FuzzyNumberDoc) -> Result<Self> {
        match doc {
            FuzzyNumberDoc::Explicit {
                levels,
                lower,
                upper,
            } => FuzzyNumber::new(levels, lower, upper),
            FuzzyNumberDoc::Triangular { tri: [a, b, c] } => {
                FuzzyNumber::triangular(a, b, c, uniform_grid(DEFAULT_GRID_SIZE)?)
            }
        }
    }
}

/// A nonempty finite prefix `(u_0, u_1, …)` of a sequence of fuzzy numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FuzzyNumber>", into = "Vec<FuzzyNumber>")]
pub struct FuzzySequence {
    terms: Vec<FuzzyNumber>,
}

impl FuzzySequence {
    pub fn new(terms: Vec<FuzzyNumber>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(Self { terms })
    }

    /// Builds `(f(0), f(1), …, f(upto))`.
    pub fn generate<F>(upto: usize, f: F) -> Result<Self>
    where
        F: FnMut(usize) -> Result<FuzzyNumber>,
    {
        Self::new((0..=upto).map(f).collect::<Result<Vec<_>>>()?)
    }

    /// Crisp embedding of a real sequence.
    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&r| FuzzyNumber::crisp(r))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn terms(&self) -> &[FuzzyNumber] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, n: usize) -> Result<&FuzzyNumber> {
        self.terms.get(n).ok_or(Error::IndexOutOfRange {
            index: n,
            len: self.terms.len(),
        })
    }

    pub fn last(&self) -> &FuzzyNumber {
        // nonempty by construction
        &self.terms[self.terms.len() - 1]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FuzzyNumber> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> Vec<FuzzyNumber> {
        self.terms
    }

    /// Union of the level grids of all terms.
    pub fn merged_grid(&self) -> Vec<f64> {
        common_grid(self.terms.iter())
    }

    /// Termwise sum of two sequences, truncated to the shorter one.
    pub fn add(&self, other: &Self) -> Self {
        let terms = self
            .terms
            .iter()
            .zip(&other.terms)
            .map(|(u, v)| u.add(v))
            .collect();
        Self { terms }
    }

    /// Multiplies every term by `k`.
    pub fn scale(&self, k: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|u| u.scale(k)).collect(),
        }
    }

    /// Adds `v` to every term.
    pub fn translate(&self, v: &FuzzyNumber) -> Self {
        Self {
            terms: self.terms.iter().map(|u| u.add(v)).collect(),
        }
    }
}

impl TryFrom<Vec<FuzzyNumber>> for FuzzySequence {
    type Error = Error;

    fn try_from(terms: Vec<FuzzyNumber>) -> Result<Self> {
        Self::new(terms)
    }
}

impl From<FuzzySequence> for Vec<FuzzyNumber> {
    fn from(seq: FuzzySequence) -> Self {
        seq.terms
    }
}

impl<'a> IntoIterator for &'a FuzzySequence {
    type Item = &'a FuzzyNumber;
    type IntoIter = std::slice::Iter<'a, FuzzyNumber>;

    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

/// `r̄`, rejecting non-finite `r`.
pub fn crisp(r: f64) -> Result<FuzzyNumber> {
    FuzzyNumber::crisp(r)
}

pub fn add(u: &FuzzyNumber, v: &FuzzyNumber) -> FuzzyNumber {
    u.add(v)
}

pub fn scale(k: f64, u: &FuzzyNumber) -> Result<FuzzyNumber> {
    if !k.is_finite() {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k,
            reason: "scalar must be finite",
        });
    }
    Ok(u.scale(k))
}

pub fn metric_d(u: &FuzzyNumber, v: &FuzzyNumber) -> f64 {
    u.distance(v)
}

pub fn refine_to_grid(u: &FuzzyNumber, levels: &[f64]) -> Result<FuzzyNumber> {
    u.refine_to_grid(levels)
}

/// `Σ wᵢ·uᵢ` computed endpoint-wise on the merged grid.
///
/// Weights must be nonnegative: with mixed signs `(a + b)u ≠ au + bu` and the
/// endpoint-wise formula no longer describes the fuzzy sum.
pub fn weighted_sum(weights: &[f64], us: &[FuzzyNumber]) -> Result<FuzzyNumber> {
    if weights.len() != us.len() {
        return Err(Error::LengthMismatch {
            weights: weights.len(),
            terms: us.len(),
        });
    }
    if us.is_empty() {
        return Err(Error::EmptySequence);
    }
    if let Some((index, &weight)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
    {
        return Err(Error::NegativeWeight { index, weight });
    }
    let grid = common_grid(us.iter());
    Ok(weighted_sum_on_grid(weights, us, grid))
}

/// Weighted sum when the caller has already checked weights and lengths.
pub(crate) fn weighted_sum_on_grid(
    weights: &[f64],
    us: &[FuzzyNumber],
    grid: Vec<f64>,
) -> FuzzyNumber {
    let m = grid.len();
    let mut lower = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut add_term = |w: f64, u: &FuzzyNumber| {
        for j in 0..m {
            lower[j] += w * u.lower[j];
            upper[j] += w * u.upper[j];
        }
    };
    for (&w, u) in weights.iter().zip(us) {
        if w == 0.0 {
            continue;
        }
        if u.levels == grid {
            add_term(w, u);
        } else {
            add_term(w, &u.resample(&grid));
        }
    }
    FuzzyNumber::from_parts(grid, lower, upper)
}

pub(crate) fn common_grid<'a, I>(terms: I) -> Vec<f64>
where
    I: IntoIterator<Item = &'a FuzzyNumber>,
{
    let mut iter = terms.into_iter();
    let mut grid = match iter.next() {
        Some(u) => u.levels.clone(),
        None => return vec![0.0, 1.0],
    };
    for u in iter {
        if u.levels != grid {
            grid = merge_grids(&grid, &u.levels);
        }
    }
    grid
}

fn on_shared_grid<'a>(
    u: &'a FuzzyNumber,
    v: &'a FuzzyNumber,
) -> (
    std::borrow::Cow<'a, FuzzyNumber>,
    std::borrow::Cow<'a, FuzzyNumber>,
) {
    use std::borrow::Cow;
    if u.levels == v.levels {
        return (Cow::Borrowed(u), Cow::Borrowed(v));
    }
    let grid = merge_grids(&u.levels, &v.levels);
    (Cow::Owned(u.resample(&grid)), Cow::Owned(v.resample(&grid)))
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

fn slack_for(lower: &[f64], upper: &[f64]) -> f64 {
    let scale = lower
        .iter()
        .chain(upper)
        .map(|x| x.abs())
        .fold(1.0, f64::max);
    MONOTONE_SLACK * scale
}

/// Monotone projection: running max on `lower`, running min on `upper`, then
/// collapse any crossed tail onto a single admissible value.
fn project_nested(lower: &mut [f64], upper: &mut [f64]) {
    for j in 1..lower.len() {
        if lower[j] < lower[j - 1] {
            lower[j] = lower[j - 1];
        }
        if upper[j] > upper[j - 1] {
            upper[j] = upper[j - 1];
        }
    }
    if let Some(j0) = (0..lower.len()).find(|&j| lower[j] > upper[j]) {
        let mut c = 0.5 * (lower[j0] + upper[j0]);
        if j0 > 0 {
            c = c.clamp(lower[j0 - 1], upper[j0 - 1]);
        }
        for j in j0..lower.len() {
            lower[j] = c;
            upper[j] = c;
        }
    }
}
