//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fuzzy_euler::binomial::{proof_limit_terms, proof_limits, verify_bounds};
use fuzzy_euler::euler::{self, detect_limit, euler_transform, euler_weights, EulerParams};
use fuzzy_euler::experiment::{self, error_decay, DECAY_SLOPE_MAX};
use fuzzy_euler::fuzzy::DEFAULT_GRID_SIZE;
use fuzzy_euler::special::std_normal_cdf;
use fuzzy_euler::tauberian::{classify_rate, sequence_gap, DEFAULT_TAIL_FRACTION};
use fuzzy_euler::{FuzzyNumber, FuzzySequence, RateClass};
use rand::Rng;

use common::{random_fuzzy, random_sequence, rng, scale_of, unit_triangular};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn within(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

/// Example: `|D(t²_n, μ) − (1/3)ⁿ| ≤ 1e-12` for `n = 0..=40`.
fn example_reproduction() -> Outcome {
    let start = Instant::now();
    let report = experiment::reproduce_example(2.0, 40, DEFAULT_GRID_SIZE).unwrap();
    let dev = report.max_deviation.unwrap();
    let elapsed = start.elapsed();
    let ok = report.rows.len() == 41 && dev <= 1e-12 && within(elapsed, 1.0);
    outcome(
        ok,
        format!("max deviation {dev:.3e} (tol 1e-12), {elapsed:.2?} (limit 1 s)"),
    )
}

/// Raw example has no detectable limit; its E_2 transform does.
fn example_divergence() -> Outcome {
    let start = Instant::now();
    let raw = experiment::generate_example(99, DEFAULT_GRID_SIZE).unwrap();
    let mu = experiment::example_limit(DEFAULT_GRID_SIZE).unwrap();
    let raw_limit = detect_limit(&raw, 1e-6, euler::DEFAULT_WINDOW).unwrap();
    let means = euler_transform(&raw, 99, 2.0).unwrap();
    let mean_limit = detect_limit(&means, 1e-6, euler::DEFAULT_WINDOW).unwrap();
    let dist = mean_limit.as_ref().map(|l| l.distance(&mu));
    let elapsed = start.elapsed();
    let ok = raw.len() == 100
        && raw_limit.is_none()
        && dist.is_some_and(|d| d <= 1e-6)
        && within(elapsed, 1.0);
    outcome(
        ok,
        format!(
            "raw limit detected: {}, D(E_2 limit, mu) = {:?} (tol 1e-6), {elapsed:.2?} (limit 1 s)",
            raw_limit.is_some(),
            dist
        ),
    )
}

/// `E_r(E_p) = E_⌈p⌉` termwise up to 20.
fn ceiling_composition() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(3);
    let mut inputs = vec![experiment::generate_example(20, DEFAULT_GRID_SIZE).unwrap()];
    for _ in 0..5 {
        inputs.push(random_sequence(&mut rng, 21, 10.0));
    }
    let mut worst = 0.0f64;
    for p in [0.5, 1.5, 2.7] {
        let params = EulerParams::new(p).unwrap();
        for seq in &inputs {
            let (a, b) = euler::ceiling_composition(seq, 20, &params).unwrap();
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max(x.distance(y));
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-10 && within(elapsed, 5.0);
    outcome(
        ok,
        format!(
            "{} sequences x 3 values of p, max D {worst:.3e} (tol 1e-10), {elapsed:.2?} (limit 5 s)",
            inputs.len()
        ),
    )
}

/// Composite Simpson quadrature of the normal density on `[lo, x]`.
fn normal_cdf_quadrature(x: f64) -> f64 {
    let lo = -40.0;
    let steps = 40_000usize;
    let h = (x - lo) / steps as f64;
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = phi(lo) + phi(x);
    for i in 1..steps {
        let t = lo + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * phi(t);
    }
    s * h / 3.0
}

/// Sandwich bounds for `n ≤ 200` and 20 probabilities, with the floating
/// CDF checked against rational arithmetic and `Φ` against quadrature.
fn binomial_bounds() -> Outcome {
    let start = Instant::now();
    let slack = 1e-12;
    let mut records = 0usize;
    let mut failures = 0usize;
    for n in 1..=200u64 {
        for p in experiment::probability_grid(20) {
            for r in verify_bounds(n, p, slack).unwrap() {
                records += 1;
                if !(r.lower <= r.exact + slack && r.exact <= r.upper + slack) || !r.pass {
                    failures += 1;
                }
            }
        }
    }
    let oracle = experiment::oracle_rational_deviation(64).unwrap();
    let phi_dev = [-8.0, -5.0, -2.5, -1.0, -0.3, 0.0, 0.7, 1.9, 4.0]
        .into_iter()
        .map(|x| {
            let q = normal_cdf_quadrature(x);
            ((std_normal_cdf(x) - q) / q).abs()
        })
        .fold(0.0f64, f64::max);
    let elapsed = start.elapsed();
    let ok =
        records > 0 && failures == 0 && oracle <= 1e-12 && phi_dev <= 1e-9 && within(elapsed, 30.0);
    outcome(
        ok,
        format!(
            "{records} records, {failures} violations (slack 1e-12); rational oracle rel err {oracle:.2e} (tol 1e-12); Phi vs quadrature {phi_dev:.2e}; {elapsed:.2?} (limit 30 s)"
        ),
    )
}

/// `Lₙ, Rₙ` within 1e-4 of their limits at 10⁶, error decaying at least
/// like `1/n`.
fn proof_limit_sequences() -> Outcome {
    let start = Instant::now();
    let ns = [1_000u64, 10_000, 100_000, 1_000_000];
    let mut ok = true;
    let mut parts = Vec::new();
    for q in 1..=3u64 {
        let (l_lim, r_lim) = proof_limits(q);
        let (l_err, r_err): (Vec<f64>, Vec<f64>) = ns
            .iter()
            .map(|&n| {
                let (l, r) = proof_limit_terms(n, q).unwrap();
                ((l - l_lim).abs(), (r - r_lim).abs())
            })
            .unzip();
        let (ls, lc) = error_decay(&ns, &l_err);
        let (rs, rc) = error_decay(&ns, &r_err);
        let decays = [ls, rs]
            .iter()
            .all(|s| s.is_some_and(|s| s <= DECAY_SLOPE_MAX));
        let final_ok = l_err[3] <= 1e-4 && r_err[3] <= 1e-4;
        ok &= decays && final_ok;
        parts.push(format!(
            "q={q}: |L-lim| {:.2e} slope {:.2} C {lc:.3}, |R-lim| {:.2e} slope {:.2} C {rc:.3}",
            l_err[3],
            ls.unwrap_or(f64::NAN),
            r_err[3],
            rs.unwrap_or(f64::NAN)
        ));
    }
    let elapsed = start.elapsed();
    ok &= within(elapsed, 1.0);
    outcome(
        ok,
        format!("{}; {elapsed:.2?} (limit 1 s)", parts.join("; ")),
    )
}

/// Convergent sequences `μ + ρⁿ·c·v`: Euler means at 60 are within 1e-3.
fn regularity() -> Outcome {
    let mut rng = rng(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mu = random_fuzzy(&mut rng, 10.0);
        let v = random_fuzzy(&mut rng, 10.0);
        let rho: f64 = rng.gen_range(0.05..=0.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let c: f64 = rng.gen_range(-1.0..=1.0);
        let seq =
            FuzzySequence::generate(60, |n| Ok(mu.add(&v.scale(c * rho.powi(n as i32))))).unwrap();
        for p in [1.0, 2.0] {
            let t = euler::euler_mean(&seq, 60, p).unwrap();
            worst = worst.max(t.distance(&mu));
        }
    }
    outcome(
        worst < 1e-3,
        format!("100 sequences x p in {{1, 2}}, max D(t_60, mu) {worst:.3e} (tol 1e-3)"),
    )
}

/// Metric and algebra identities on 1000 random instances.
fn metric_and_algebra() -> Outcome {
    let tol = 1e-12;
    let mut rng = rng(7);
    let mut worst = 0.0f64;
    let mut check = |err: f64, scale: f64| worst = worst.max(err / scale);
    for _ in 0..1000 {
        let [u, v, w, z] = std::array::from_fn(|_| random_fuzzy(&mut rng, 10.0));
        let s = scale_of(&[&u, &v, &w, &z]);
        let k: f64 = rng.gen_range(-5.0..=5.0);
        let a: f64 = rng.gen_range(0.0..=3.0);
        let b: f64 = rng.gen_range(0.0..=3.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let (a, b) = (sign * a, sign * b);
        let c: f64 = rng.gen_range(-3.0..=3.0);

        // homogeneity
        check(
            (u.scale(k).distance(&v.scale(k)) - k.abs() * u.distance(&v)).abs(),
            s * 5.0,
        );
        // translation invariance
        check((u.add(&v).distance(&w.add(&v)) - u.distance(&w)).abs(), s);
        // subadditivity
        check(
            (u.add(&v).distance(&w.add(&z)) - u.distance(&w) - v.distance(&z)).max(0.0),
            s,
        );
        // bound chain
        let (du, dv, duv) = (u.magnitude(), v.magnitude(), u.distance(&v));
        check(((du - dv).abs() - duv).max(0.0), s);
        check((duv - du - dv).max(0.0), s);
        // neutral element
        let zero = FuzzyNumber::zero();
        check(u.add(&zero).distance(&u) + zero.add(&u).distance(&u), s);
        // same-sign distributivity
        check(
            u.scale(a + b).distance(&u.scale(a).add(&u.scale(b))),
            s * 6.0,
        );
        // scalar over sums
        check(
            u.add(&v).scale(c).distance(&u.scale(c).add(&v.scale(c))),
            s * 3.0,
        );
        // associativity of scalars
        check(u.scale(b).scale(c).distance(&u.scale(b * c)), s * 9.0);
        // summation interchange
        let n = rng.gen_range(1..6);
        let xs: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.0..=2.0)).collect();
        let us: Vec<FuzzyNumber> = (0..=n).map(|_| random_fuzzy(&mut rng, 10.0)).collect();
        let mut lhs = FuzzyNumber::zero();
        let mut partial = FuzzyNumber::zero();
        for k in 0..=n {
            partial = partial.add(&us[k]);
            lhs = lhs.add(&partial.scale(xs[k]));
        }
        let mut rhs = FuzzyNumber::zero();
        for m in 0..=n {
            let tail: f64 = xs[m..].iter().sum();
            rhs = rhs.add(&us[m].scale(tail));
        }
        let scale = us.iter().map(|u| u.magnitude()).sum::<f64>() * xs.iter().sum::<f64>();
        check(lhs.distance(&rhs), scale.max(1.0));
    }
    let t = unit_triangular();
    let witness = t.scale(0.0).distance(&t.scale(1.0).add(&t.scale(-1.0)));
    let ok = worst <= tol && witness > 0.5;
    outcome(
        ok,
        format!("1000 instances, worst scaled error {worst:.2e} (tol 1e-12); mixed-sign witness D = {witness}"),
    )
}

/// Sequences with a vanishing gap and a known limit are recognised; the
/// example is classified unbounded.
fn tauberian_pipeline() -> Outcome {
    let mut rng = rng(8);
    let mut vanishing = 0;
    let mut agree = 0;
    let mut worst_limit = 0.0f64;
    let mut worst_mean = 0.0f64;
    let len = 200usize;
    for i in 0..20 {
        let mu = random_fuzzy(&mut rng, 10.0);
        let v = random_fuzzy(&mut rng, 2.0);
        let decay: Box<dyn Fn(usize) -> f64> = if i < 10 {
            let rho: f64 = rng.gen_range(0.3..=0.8);
            Box::new(move |n| rho.powi(n as i32))
        } else {
            let a: f64 = rng.gen_range(2.0..=3.0);
            Box::new(move |n| ((n + 1) as f64).powf(-a))
        };
        let seq = FuzzySequence::generate(len - 1, |n| Ok(mu.add(&v.scale(decay(n))))).unwrap();
        let p = if i % 2 == 0 { 1.0 } else { 2.0 };
        let mean = euler::euler_mean(&seq, len - 1, p).unwrap();
        worst_mean = worst_mean.max(mean.distance(&mu));
        let verdict = classify_rate(&sequence_gap(&seq).unwrap(), DEFAULT_TAIL_FRACTION).unwrap();
        if verdict.classification == RateClass::Vanishing {
            vanishing += 1;
        }
        if let Some(l) = detect_limit(&seq, 1e-4, euler::DEFAULT_WINDOW).unwrap() {
            let d = l.distance(&mu);
            worst_limit = worst_limit.max(d);
            if d <= 1e-4 {
                agree += 1;
            }
        }
    }
    let example = experiment::generate_example(len - 1, DEFAULT_GRID_SIZE).unwrap();
    let example_class = classify_rate(&sequence_gap(&example).unwrap(), DEFAULT_TAIL_FRACTION)
        .unwrap()
        .classification;
    let ok = vanishing == 20
        && agree == 20
        && worst_mean <= 1e-3
        && example_class == RateClass::Unbounded;
    outcome(
        ok,
        format!(
            "vanishing {vanishing}/20, limit within 1e-4 {agree}/20 (worst {worst_limit:.2e}), E_p mean at n=199 within {worst_mean:.2e}; example classified {example_class}"
        ),
    )
}

/// `|Σ w_k − 1| ≤ 1e-12` for `n ≤ 10⁴`.
fn weight_normalization() -> Outcome {
    let start = Instant::now();
    let ns: Vec<usize> = (0..=1000)
        .chain((1001..10_000).step_by(37))
        .chain([10_000])
        .collect();
    let mut worst = 0.0f64;
    let mut negative = false;
    for p in [0.3, 1.0, 2.0, 5.7] {
        for &n in &ns {
            let w = euler_weights(n, p).unwrap();
            negative |= w.as_slice().iter().any(|&x| x < 0.0);
            worst = worst.max((w.sum() - 1.0).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-12 && !negative,
        format!("{} values of n up to 10000 x 4 values of p, max |sum - 1| {worst:.2e} (tol 1e-12), {elapsed:.2?}", ns.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("example reproduction", example_reproduction),
        ("divergence of the raw example", example_divergence),
        ("ceiling composition", ceiling_composition),
        ("binomial sandwich bounds", binomial_bounds),
        ("auxiliary limit sequences", proof_limit_sequences),
        ("regularity", regularity),
        ("metric and algebra identities", metric_and_algebra),
        ("gap diagnostics pipeline", tauberian_pipeline),
        ("weight normalization", weight_normalization),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {}. {name}: {}", i + 1, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
