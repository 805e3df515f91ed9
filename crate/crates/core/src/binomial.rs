//! Normal-approximation bounds on the binomial CDF.
//!
//! For `X ~ Bin(n, p)` and `k ∈ {0, …, n−1}`,
//!
//! ```text
//! C(k) ≤ P{X ≤ k} ≤ C(k+1),
//! C(0) = (1−p)ⁿ,  C(n) = 1 − pⁿ,
//! C(k) = Φ(sgn(k − np)·√(2n·H(k/n, p)))   for 1 ≤ k < n,
//! ```
//!
//! where `H` is the Bernoulli relative entropy. This module evaluates the
//! bounds, an exact CDF to check them against (floating and rational), and
//! two auxiliary sequences `Lₙ → (q+1)/(2q)`, `Rₙ → q/(2(q+1))`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
pub use crate::special::std_normal_cdf;
use crate::special::{log1p_minus_x, NeumaierSum};

/// Absolute slack used by [`verify_bounds`] unless the caller overrides it.
pub const DEFAULT_SLACK: f64 = 1e-12;

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "success probability must lie in (0, 1)",
        })
    }
}

/// Bernoulli relative entropy
/// `H(x, p) = x ln(x/p) + (1−x) ln((1−x)/(1−p))`, with `0·ln 0 = 0`.
pub fn relative_entropy(x: f64, p: f64) -> Result<f64> {
    check_probability(p)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "must lie in [0, 1]",
        });
    }
    if x == 0.0 {
        return Ok(-(-p).ln_1p());
    }
    if x == 1.0 {
        return Ok(-p.ln());
    }
    // Split each logarithm as ln(1+d) = d + (ln(1+d) − d). The linear parts
    // add up to (x−p)²/(p(1−p)) exactly, which removes the cancellation
    // near x = p.
    let up = (x - p) / p;
    let down = (p - x) / (1.0 - p);
    let quadratic = (x - p) * (x - p) / (p * (1.0 - p));
    let h = quadratic + x * log1p_minus_x(up) + (1.0 - x) * log1p_minus_x(down);
    Ok(h.max(0.0))
}

/// The bound `C_{n,p}(k)`.
pub fn zubkov_serov_c(n: u64, p: f64, k: u64) -> Result<f64> {
    check_probability(p)?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "need at least one trial",
        });
    }
    if k > n {
        return Err(Error::IndexOutOfRange {
            index: k as usize,
            len: n as usize + 1,
        });
    }
    Ok(c_unchecked(n, p, k))
}

fn c_unchecked(n: u64, p: f64, k: u64) -> f64 {
    let nf = n as f64;
    if k == 0 {
        return ((-p).ln_1p() * nf).exp();
    }
    if k == n {
        return -(p.ln() * nf).exp_m1();
    }
    let kf = k as f64;
    let x = kf / nf;
    let h = relative_entropy(x, p).expect("k/n in (0,1) and p in (0,1)");
    let magnitude = (2.0 * nf * h).sqrt();
    let signed = match kf.partial_cmp(&(nf * p)) {
        Some(std::cmp::Ordering::Greater) => magnitude,
        Some(std::cmp::Ordering::Less) => -magnitude,
        _ => 0.0,
    };
    std_normal_cdf(signed)
}

/// `P{X = k}` for every `k = 0..=n`.
///
/// `q = 1 − p` is generally not representable; each term is corrected to
/// first order for the rounding of `q`, which keeps the row consistent with
/// the exact complement of the given `p`.
pub fn binomial_pmf_row(n: u64, p: f64) -> Vec<f64> {
    (0..=n).map(|k| pmf_exact_complement(n, k, p)).collect()
}

pub(crate) fn pmf_exact_complement(n: u64, k: u64, p: f64) -> f64 {
    let q = 1.0 - p;
    // 1 − q is exact for q ∈ [0.5, 1] and so is its difference with p
    let dq = if q >= 0.5 { (1.0 - q) - p } else { 0.0 };
    let base = crate::special::binomial_pmf(n, k, p, q);
    if dq == 0.0 || k == n {
        base
    } else {
        base * ((n - k) as f64 * (dq / q)).exp()
    }
}

/// Cumulative distribution `P{X ≤ k}` for every `k = 0..=n`, summed left to
/// right with compensation.
pub fn binomial_cdf_row(n: u64, p: f64) -> Result<Vec<f64>> {
    check_probability(p)?;
    let mut acc = NeumaierSum::new();
    Ok((0..=n)
        .map(|k| {
            acc.add(pmf_exact_complement(n, k, p));
            acc.value().min(1.0)
        })
        .collect())
}

/// `P{X_{n,p} ≤ k}` in floating point.
pub fn binomial_cdf_exact(n: u64, p: f64, k: u64) -> Result<f64> {
    check_probability(p)?;
    if k > n {
        return Err(Error::IndexOutOfRange {
            index: k as usize,
            len: n as usize + 1,
        });
    }
    if k == n {
        return Ok(1.0);
    }
    let mut acc = NeumaierSum::new();
    for i in 0..=k {
        acc.add(pmf_exact_complement(n, i, p));
    }
    Ok(acc.value().min(1.0))
}

/// `P{X ≤ k}` exactly for a rational success probability `p = num/den`.
pub fn binomial_cdf_rational(n: u64, num: u64, den: u64, k: u64) -> Result<BigRational> {
    if k > n {
        return Err(Error::IndexOutOfRange {
            index: k as usize,
            len: n as usize + 1,
        });
    }
    let mut row = binomial_cdf_rational_row(n, num, den)?;
    Ok(row.swap_remove(k as usize))
}

/// `P{X ≤ k}` exactly for `k = 0..=n` and `p = num/den`.
pub fn binomial_cdf_rational_row(n: u64, num: u64, den: u64) -> Result<Vec<BigRational>> {
    if den == 0 || num == 0 || num >= den {
        return Err(Error::InvalidParameter {
            name: "p",
            value: num as f64 / den as f64,
            reason: "rational probability must lie in (0, 1)",
        });
    }
    let a = BigInt::from(num);
    let b = BigInt::from(den - num);
    let denom = num_traits::pow(BigInt::from(den), n as usize);
    // Terms C(n,i)·aⁱ·bⁿ⁻ⁱ, built from i = n downwards so only one power is needed.
    let mut terms = vec![BigInt::zero(); n as usize + 1];
    let mut binom = BigInt::one();
    let mut a_pow = num_traits::pow(a, n as usize);
    let mut b_pow = BigInt::one();
    for i in (0..=n).rev() {
        if i < n {
            binom = binom * BigInt::from(i + 1) / BigInt::from(n - i);
            b_pow *= &b;
        }
        terms[i as usize] = &binom * &a_pow * &b_pow;
        if i > 0 {
            a_pow /= BigInt::from(num);
        }
    }
    let mut total = BigInt::zero();
    Ok(terms
        .into_iter()
        .map(|t| {
            total += t;
            BigRational::new(total.clone(), denom.clone())
        })
        .collect())
}

/// One comparison `C(k) ≤ P{X ≤ k} ≤ C(k+1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckRecord {
    pub n: u64,
    pub p: f64,
    pub k: u64,
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
    pub pass: bool,
}

impl BoundCheckRecord {
    /// `k = 0` and `k = n − 1`, where one side of the sandwich is an
    /// identity and may hold with equality.
    pub fn is_endpoint(&self) -> bool {
        self.k == 0 || self.k + 1 == self.n
    }

    /// Distance from the exact value to the nearer bound; negative when a
    /// bound is violated.
    pub fn margin(&self) -> f64 {
        (self.exact - self.lower).min(self.upper - self.exact)
    }
}

/// Checks the sandwich for every `k ∈ {0, …, n−1}`.
pub fn verify_bounds(n: u64, p: f64, slack: f64) -> Result<Vec<BoundCheckRecord>> {
    check_probability(p)?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "need at least one trial",
        });
    }
    let cdf = binomial_cdf_row(n, p)?;
    let bounds: Vec<f64> = (0..=n).map(|k| c_unchecked(n, p, k)).collect();
    Ok((0..n)
        .map(|k| {
            let (lower, exact, upper) =
                (bounds[k as usize], cdf[k as usize], bounds[k as usize + 1]);
            BoundCheckRecord {
                n,
                p,
                k,
                lower,
                exact,
                upper,
                pass: lower <= exact + slack && exact <= upper + slack,
            }
        })
        .collect())
}

/// The pair `(Lₙ, Rₙ)`:
///
/// ```text
/// Lₙ = n·ln( ((n+1)/n)^{n+1} · ((qn−1)/(qn))^{qn−1} )
/// Rₙ = n·ln( ((q+1)(n−1)/((q+1)n−1))^{n−1} · ((q+1)n/((q+1)n−1))^{qn} )
/// ```
///
/// Each factor is written as `ln(1 + d)` with small `d`; the linear parts are
/// summed in closed form and only `ln(1+d) − d` is evaluated numerically.
pub fn proof_limit_terms(n: u64, q: u64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "need n >= 2 for positive logarithm arguments",
        });
    }
    if q < 1 {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q as f64,
            reason: "ceiling parameter must be at least 1",
        });
    }
    let nf = n as f64;
    let qf = q as f64;
    let qn = qf * nf;

    // (n+1)ln(1+1/n) + (qn−1)ln(1−1/(qn)) = 1/n + 1/(qn) + nonlinear parts
    let left = 1.0 / nf
        + 1.0 / qn
        + (nf + 1.0) * log1p_minus_x(1.0 / nf)
        + (qn - 1.0) * log1p_minus_x(-1.0 / qn);

    // with m = (q+1)n − 1: (n−1)ln(1 − q/m) + qn·ln(1 + 1/m) = q/m + nonlinear parts
    let m = (qf + 1.0) * nf - 1.0;
    let right = qf / m + (nf - 1.0) * log1p_minus_x(-qf / m) + qn * log1p_minus_x(1.0 / m);

    Ok((nf * left, nf * right))
}

/// Limits of [`proof_limit_terms`]: `((q+1)/(2q), q/(2(q+1)))`.
pub fn proof_limits(q: u64) -> (f64, f64) {
    let qf = q as f64;
    ((qf + 1.0) / (2.0 * qf), qf / (2.0 * (qf + 1.0)))
}

/// Converts an exact rational to the nearest `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
