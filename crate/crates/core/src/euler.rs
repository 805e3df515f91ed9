//! Euler means of fuzzy sequences.
//!
//! The Euler mean with parameter `p` is
//!
//! ```text
//! t^p_n = (p+1)^{−n} Σ_{k=0}^{n} C(n,k) p^{n−k} u_k,
//! ```
//!
//! a convex combination of `u_0, …, u_n` whose weights are the
//! `Bin(n, 1/(p+1))` probabilities. A sequence is `E_p` summable when its
//! Euler means converge; a series is `E_p` summable when its partial sums
//! are.

use crate::binomial::pmf_exact_complement;
use crate::error::{Error, Result};
use crate::fuzzy::{weighted_sum_on_grid, FuzzyNumber, FuzzySequence};

/// Default trailing window for [`detect_limit`].
pub const DEFAULT_WINDOW: usize = 10;
/// Default Cauchy tolerance for [`detect_limit`].
pub const DEFAULT_LIMIT_TOL: f64 = 1e-8;

/// Method parameter `p > 0`, its ceiling `q = ⌈p⌉`, and the composition
/// parameter `r = (q − p)/(p + 1) ∈ [0, 1)` for which `E_r ∘ E_p = E_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerParams {
    p: f64,
    q: u64,
    r: f64,
}

impl EulerParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "Euler parameter must be positive and finite",
            });
        }
        let q = p.ceil();
        Ok(Self {
            p,
            q: q as u64,
            r: (q - p) / (p + 1.0),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// The weights `w_k = C(n,k) p^{n−k} / (p+1)^n`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerWeights {
    n: usize,
    p: f64,
    w: Vec<f64>,
}

impl EulerWeights {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn sum(&self) -> f64 {
        let mut acc = crate::special::NeumaierSum::new();
        self.w.iter().for_each(|&w| acc.add(w));
        acc.value()
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "Euler parameter must be nonnegative and finite",
        })
    }
}

/// Euler weights for index `n`. `p = 0` gives the identity weights
/// `(0, …, 0, 1)`.
///
/// Each weight is a `Bin(n, 1/(p+1))` probability evaluated directly in
/// saddle-point form, so there is no underflowing start value and no
/// recurrence drift for large `n`.
pub fn euler_weights(n: usize, p: f64) -> Result<EulerWeights> {
    check_p(p)?;
    let w = if p == 0.0 {
        let mut w = vec![0.0; n + 1];
        w[n] = 1.0;
        w
    } else {
        let success = 1.0 / (p + 1.0);
        (0..=n as u64)
            .map(|k| pmf_exact_complement(n as u64, k, success))
            .collect()
    };
    Ok(EulerWeights { n, p, w })
}

/// `t^p_n` for the first `n + 1` terms of `seq`.
pub fn euler_mean(seq: &FuzzySequence, n: usize, p: f64) -> Result<FuzzyNumber> {
    check_p(p)?;
    if n >= seq.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: seq.len(),
        });
    }
    let weights = euler_weights(n, p)?;
    crate::fuzzy::weighted_sum(weights.as_slice(), &seq.terms()[..=n])
}

/// `(t^p_0, …, t^p_upto)`, all on the merged grid of the input prefix.
pub fn euler_transform(seq: &FuzzySequence, upto: usize, p: f64) -> Result<FuzzySequence> {
    check_p(p)?;
    if upto >= seq.len() {
        return Err(Error::IndexOutOfRange {
            index: upto,
            len: seq.len(),
        });
    }
    let prefix = &seq.terms()[..=upto];
    let grid = crate::fuzzy::common_grid(prefix.iter());
    let aligned: Vec<FuzzyNumber> = prefix
        .iter()
        .map(|u| u.refine_to_grid(&grid))
        .collect::<Result<_>>()?;
    let means = (0..=upto)
        .map(|n| {
            let weights = euler_weights(n, p)?;
            Ok(weighted_sum_on_grid(
                weights.as_slice(),
                &aligned[..=n],
                grid.clone(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    FuzzySequence::new(means)
}

/// Euler means of a real sequence, `Σ_k w_k x_k` for `n = 0..=upto`.
pub fn euler_transform_reals(values: &[f64], upto: usize, p: f64) -> Result<Vec<f64>> {
    check_p(p)?;
    if upto >= values.len() {
        return Err(Error::IndexOutOfRange {
            index: upto,
            len: values.len(),
        });
    }
    (0..=upto)
        .map(|n| {
            let weights = euler_weights(n, p)?;
            Ok(weights
                .as_slice()
                .iter()
                .zip(values)
                .map(|(w, x)| w * x)
                .sum())
        })
        .collect()
}

/// Both sides of `E_r(E_p(u)) = E_q(u)`: returns `(E_r(E_p(u)), E_q(u))`
/// up to index `upto`.
pub fn ceiling_composition(
    seq: &FuzzySequence,
    upto: usize,
    params: &EulerParams,
) -> Result<(FuzzySequence, FuzzySequence)> {
    let inner = euler_transform(seq, upto, params.p())?;
    let composed = euler_transform(&inner, upto, params.r())?;
    let direct = euler_transform(seq, upto, params.q() as f64)?;
    Ok((composed, direct))
}

/// Partial sums `s_n = u_0 + … + u_n`.
pub fn partial_sums(terms: &FuzzySequence) -> FuzzySequence {
    let mut sums: Vec<FuzzyNumber> = Vec::with_capacity(terms.len());
    for u in terms {
        let next = match sums.last() {
            Some(prev) => prev.add(u),
            None => u.clone(),
        };
        sums.push(next);
    }
    FuzzySequence::new(sums).expect("nonempty input")
}

/// Finite-prefix limit estimate: if every pair among the last `window`
/// terms is within `tol` in `D`, returns the final term.
pub fn detect_limit(seq: &FuzzySequence, tol: f64, window: usize) -> Result<Option<FuzzyNumber>> {
    if window < 2 {
        return Err(Error::InvalidParameter {
            name: "window",
            value: window as f64,
            reason: "window must hold at least two terms",
        });
    }
    if window > seq.len() {
        return Err(Error::TooShort {
            needed: window,
            got: seq.len(),
        });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "tolerance must be positive",
        });
    }
    let tail = &seq.terms()[seq.len() - window..];
    let spread = tail
        .iter()
        .enumerate()
        .flat_map(|(i, u)| tail[i + 1..].iter().map(move |v| u.distance(v)))
        .fold(0.0, f64::max);
    Ok((spread <= tol).then(|| seq.last().clone()))
}
