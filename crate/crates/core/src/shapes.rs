//! Grid deciders for convexity, star shape, super-additivity, monotonicity,
//! pointwise dominance and sign-change patterns.
//!
//! Every decider reduces to a list of slacks that are nonnegative exactly
//! when the predicate holds. Slacks are divided by the largest sampled
//! magnitude of the quantity they difference (the function, or its secant
//! slopes for convexity), so verdicts do not change under positive rescaling
//! of either axis. With `lo` and `hi` the smallest and largest normalized slack:
//! `lo < −tol` fails, otherwise `hi > tol` holds, otherwise the sample is
//! indistinguishable from the boundary case and the verdict is inconclusive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CONVEXITY_TOL: f64 = 1e-6;
pub const MONOTONE_TOL: f64 = 1e-7;
pub const SUPERADDITIVE_TOL: f64 = 1e-7;
pub const DOMINANCE_TOL: f64 = 1e-7;
pub const DEAD_BAND: f64 = 1e-9;
pub const DEFAULT_PAIR_BUDGET: usize = 4096;
pub const MIN_SAMPLES: usize = 16;

const SCALE_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

impl Outcome {
    pub fn is_conclusive(self) -> bool {
        self != Outcome::Inconclusive
    }
}

/// A sample point where the predicate is tightest or violated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    /// Second coordinate for pair predicates.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y: Option<f64>,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeVerdict {
    pub outcome: Outcome,
    /// Smallest normalized slack when failing, largest otherwise.
    #[serde(with = "crate::report::finite_or_null")]
    pub margin: f64,
    pub tolerance: f64,
    pub witnesses: Vec<Witness>,
    pub window: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl ShapeVerdict {
    /// An inconclusive verdict carrying the reason the test could not run.
    pub fn unavailable(window: (f64, f64), note: impl Into<String>) -> Self {
        Self {
            outcome: Outcome::Inconclusive,
            margin: f64::NAN,
            tolerance: 0.0,
            witnesses: Vec::new(),
            window,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// One normalized slack with its location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slack {
    pub x: f64,
    pub y: Option<f64>,
    pub value: f64,
}

/// Turns normalized slacks into a verdict.
pub fn decide(slacks: &[Slack], tol: f64, window: (f64, f64)) -> ShapeVerdict {
    let finite: Vec<&Slack> = slacks.iter().filter(|s| s.value.is_finite()).collect();
    if finite.is_empty() {
        return ShapeVerdict::unavailable(window, "no finite slack values");
    }
    let mut order: Vec<usize> = (0..finite.len()).collect();
    order.sort_by(|&a, &b| finite[a].value.total_cmp(&finite[b].value).then(a.cmp(&b)));
    let lo = finite[order[0]].value;
    let hi = finite[*order.last().expect("nonempty")].value;
    let (outcome, margin) = if lo < -tol {
        (Outcome::Fails, lo)
    } else if hi > tol {
        (Outcome::Holds, hi)
    } else {
        (Outcome::Inconclusive, hi)
    };
    let witnesses = order
        .iter()
        .take(3)
        .map(|&i| Witness {
            x: finite[i].x,
            y: finite[i].y,
            slack: finite[i].value,
        })
        .collect();
    let dropped = slacks.len() - finite.len();
    ShapeVerdict {
        outcome,
        margin,
        tolerance: tol,
        witnesses,
        window,
        note: (dropped > 0).then(|| format!("{dropped} non-finite samples ignored")),
    }
}

fn amplitude(ys: &[f64]) -> f64 {
    ys.iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(SCALE_FLOOR)
}

fn check_samples(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::Grid(format!(
            "abscissae and values differ in length ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < MIN_SAMPLES {
        return Err(Error::Grid(format!(
            "at least {MIN_SAMPLES} samples are required, got {}",
            xs.len()
        )));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Grid("abscissae must be strictly increasing".into()));
    }
    Ok((xs[0], xs[xs.len() - 1]))
}

/// Jumps of the secant slope at interior samples, divided by the largest
/// secant slope magnitude; nonnegative everywhere exactly for convex samples.
fn slope_jumps(xs: &[f64], ys: &[f64], sign: f64) -> Vec<Slack> {
    let slopes: Vec<f64> = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    let scale = amplitude(&slopes);
    slopes
        .windows(2)
        .zip(&xs[1..])
        .map(|(d, x)| Slack {
            x: *x,
            y: None,
            value: sign * (d[1] - d[0]) / scale,
        })
        .collect()
}

pub fn is_convex(xs: &[f64], ys: &[f64], tol: f64) -> Result<ShapeVerdict> {
    let window = check_samples(xs, ys)?;
    Ok(decide(&slope_jumps(xs, ys, 1.0), tol, window))
}

pub fn is_concave(xs: &[f64], ys: &[f64], tol: f64) -> Result<ShapeVerdict> {
    let window = check_samples(xs, ys)?;
    Ok(decide(&slope_jumps(xs, ys, -1.0), tol, window))
}

/// Nondecreasing (`increasing = true`) or nonincreasing test on first differences.
pub fn is_monotone(xs: &[f64], ys: &[f64], increasing: bool, tol: f64) -> Result<ShapeVerdict> {
    let window = check_samples(xs, ys)?;
    let scale = amplitude(ys);
    let sign = if increasing { 1.0 } else { -1.0 };
    let slacks: Vec<Slack> = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| Slack {
            x: x[1],
            y: None,
            value: sign * (y[1] - y[0]) / scale,
        })
        .collect();
    Ok(decide(&slacks, tol, window))
}

fn ratios(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::Grid("star-shape tests need strictly positive abscissae".into()));
    }
    Ok(xs.iter().zip(ys).map(|(x, y)| y / x).collect())
}

/// `f(x)/x` nondecreasing.
pub fn is_star_shaped(xs: &[f64], ys: &[f64], tol: f64) -> Result<ShapeVerdict> {
    check_samples(xs, ys)?;
    is_monotone(xs, &ratios(xs, ys)?, true, tol)
}

/// `f(x)/x` nonincreasing.
pub fn is_antistar_shaped(xs: &[f64], ys: &[f64], tol: f64) -> Result<ShapeVerdict> {
    check_samples(xs, ys)?;
    is_monotone(xs, &ratios(xs, ys)?, false, tol)
}

/// `lhs ≥ rhs` pointwise, slack normalized by the larger amplitude.
pub fn dominance(xs: &[f64], lhs: &[f64], rhs: &[f64], tol: f64) -> Result<ShapeVerdict> {
    let scale = amplitude(lhs).max(amplitude(rhs));
    dominance_scaled(xs, lhs, rhs, &vec![scale; xs.len()], tol)
}

/// `lhs ≥ rhs` pointwise, slack normalized by `max(|lhs|, |rhs|)` at each point.
pub fn relative_dominance(xs: &[f64], lhs: &[f64], rhs: &[f64], tol: f64) -> Result<ShapeVerdict> {
    let scales: Vec<f64> = lhs
        .iter()
        .zip(rhs)
        .map(|(a, b)| a.abs().max(b.abs()).max(SCALE_FLOOR))
        .collect();
    dominance_scaled(xs, lhs, rhs, &scales, tol)
}

fn dominance_scaled(xs: &[f64], lhs: &[f64], rhs: &[f64], scales: &[f64], tol: f64) -> Result<ShapeVerdict> {
    let window = check_samples(xs, lhs)?;
    check_samples(xs, rhs)?;
    let slacks: Vec<Slack> = xs
        .iter()
        .zip(lhs.iter().zip(rhs))
        .zip(scales)
        .map(|((x, (a, b)), sc)| Slack {
            x: *x,
            y: None,
            value: (a - b) / sc,
        })
        .collect();
    Ok(decide(&slacks, tol, window))
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Deterministic pairs `(x, y)` with `x, y ≥ lo` and `x + y ≤ max` from the
/// base-(2, 3) Halton sequence folded into the triangle.
pub fn superadditivity_pairs(lo: f64, max: f64, budget: usize) -> Result<Vec<(f64, f64)>> {
    let span = max - 2.0 * lo;
    if !(span > 0.0) || !lo.is_finite() || !max.is_finite() {
        return Err(Error::Grid(format!(
            "no admissible pairs with x, y ≥ {lo} and x + y ≤ {max}"
        )));
    }
    if budget == 0 {
        return Err(Error::Grid("pair budget must be positive".into()));
    }
    Ok((1..=budget as u64)
        .map(|i| {
            let mut a = radical_inverse(i, 2);
            let mut b = radical_inverse(i, 3);
            if a + b > 1.0 {
                (a, b) = (1.0 - b, 1.0 - a);
            }
            (lo + span * a, lo + span * b)
        })
        .collect())
}

/// `f(x + y) ≥ f(x) + f(y)` over [`superadditivity_pairs`].
pub fn is_superadditive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    max: f64,
    budget: usize,
    tol: f64,
) -> Result<ShapeVerdict> {
    additivity(f, lo, max, budget, tol, 1.0)
}

/// `f(x + y) ≤ f(x) + f(y)` over [`superadditivity_pairs`].
pub fn is_subadditive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    max: f64,
    budget: usize,
    tol: f64,
) -> Result<ShapeVerdict> {
    additivity(f, lo, max, budget, tol, -1.0)
}

fn additivity<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    max: f64,
    budget: usize,
    tol: f64,
    sign: f64,
) -> Result<ShapeVerdict> {
    let pairs = superadditivity_pairs(lo, max, budget)?;
    let raw: Vec<(f64, f64, f64, f64, f64)> = pairs
        .iter()
        .map(|&(x, y)| (x, y, f(x), f(y), f(x + y)))
        .collect();
    let scale = raw
        .iter()
        .flat_map(|r| [r.2, r.3, r.4])
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(SCALE_FLOOR);
    let slacks: Vec<Slack> = raw
        .iter()
        .map(|&(x, y, fx, fy, fxy)| Slack {
            x,
            y: Some(y),
            value: sign * (fxy - fx - fy) / scale,
        })
        .collect();
    Ok(decide(&slacks, tol, (lo, max)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// Alternating sign sequence of a sampled function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPattern {
    pub signs: Vec<Sign>,
    pub change_count: usize,
}

impl SignPattern {
    pub fn negated(&self) -> SignPattern {
        SignPattern {
            signs: self
                .signs
                .iter()
                .map(|s| match s {
                    Sign::Plus => Sign::Minus,
                    Sign::Minus => Sign::Plus,
                })
                .collect(),
            change_count: self.change_count,
        }
    }
}

/// Signs of `values` after dropping entries within `dead_band·max|v|` of zero.
pub fn sign_pattern(values: &[f64], dead_band: f64) -> Result<SignPattern> {
    if values.is_empty() {
        return Err(Error::Grid("sign pattern of an empty sample".into()));
    }
    let scale = amplitude(values);
    let mut signs: Vec<Sign> = Vec::new();
    for v in values {
        if !v.is_finite() || v.abs() <= dead_band * scale || *v == 0.0 {
            continue;
        }
        let s = if *v > 0.0 { Sign::Plus } else { Sign::Minus };
        if signs.last() != Some(&s) {
            signs.push(s);
        }
    }
    let change_count = signs.len().saturating_sub(1);
    Ok(SignPattern {
        signs,
        change_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    fn sample(xs: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
        xs.iter().map(|&x| f(x)).collect()
    }

    #[test]
    fn convexity_examples() {
        let xs = grid(0.0, 4.0, 256);
        let v = is_convex(&xs, &sample(&xs, |x| x * x), CONVEXITY_TOL).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert!(v.margin > 0.0);
        let xs = grid(0.01, 4.0, 256);
        let sq = sample(&xs, f64::sqrt);
        assert_eq!(is_convex(&xs, &sq, CONVEXITY_TOL).unwrap().outcome, Outcome::Fails);
        assert_eq!(is_concave(&xs, &sq, CONVEXITY_TOL).unwrap().outcome, Outcome::Holds);
        let lin = sample(&xs, |x| x);
        assert_eq!(is_convex(&xs, &lin, CONVEXITY_TOL).unwrap().outcome, Outcome::Inconclusive);
        assert_eq!(is_concave(&xs, &lin, CONVEXITY_TOL).unwrap().outcome, Outcome::Inconclusive);
        assert!(matches!(is_convex(&xs[..8], &lin[..8], 1e-6), Err(Error::Grid(_))));
    }

    #[test]
    fn failing_verdict_has_witness() {
        let xs = grid(0.01, 4.0, 64);
        let v = is_convex(&xs, &sample(&xs, f64::sqrt), CONVEXITY_TOL).unwrap();
        assert!(v.margin < -v.tolerance);
        assert!(!v.witnesses.is_empty());
        assert_eq!(v.witnesses[0].slack, v.margin);
    }

    #[test]
    fn star_shape_examples() {
        let xs = grid(0.1, 20.0, 512);
        assert_eq!(
            is_star_shaped(&xs, &sample(&xs, |x| x * x), MONOTONE_TOL).unwrap().outcome,
            Outcome::Holds
        );
        assert_eq!(
            is_antistar_shaped(&xs, &sample(&xs, f64::sqrt), MONOTONE_TOL).unwrap().outcome,
            Outcome::Holds
        );
        let wobble = sample(&xs, |x| x * (1.0 + 0.5 * x.sin()));
        let v = is_star_shaped(&xs, &wobble, MONOTONE_TOL).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        // The ratio 1 + 0.5 sin x descends on (π/2, 3π/2) + 2πk.
        let w = v.witnesses[0].x;
        assert!(w.cos() < 0.0, "witness at {w}");
        let zero = grid(0.0, 1.0, 32);
        assert!(is_star_shaped(&zero, &zero, MONOTONE_TOL).is_err());
    }

    #[test]
    fn superadditivity_examples() {
        let b = DEFAULT_PAIR_BUDGET;
        assert_eq!(
            is_superadditive(|x| x * x, 0.0, 4.0, b, SUPERADDITIVE_TOL).unwrap().outcome,
            Outcome::Holds
        );
        assert_eq!(
            is_superadditive(f64::sqrt, 0.0, 4.0, b, SUPERADDITIVE_TOL).unwrap().outcome,
            Outcome::Fails
        );
        assert_eq!(
            is_subadditive(f64::sqrt, 0.0, 4.0, b, SUPERADDITIVE_TOL).unwrap().outcome,
            Outcome::Holds
        );
        assert_eq!(
            is_superadditive(|x| x, 0.0, 4.0, b, SUPERADDITIVE_TOL).unwrap().outcome,
            Outcome::Inconclusive
        );
        assert!(is_superadditive(|x| x, 2.0, 4.0, b, SUPERADDITIVE_TOL).is_err());
    }

    #[test]
    fn pairs_are_deterministic_and_admissible() {
        let p = superadditivity_pairs(0.5, 3.0, 1000).unwrap();
        assert_eq!(p, superadditivity_pairs(0.5, 3.0, 1000).unwrap());
        assert!(p.iter().all(|(x, y)| *x >= 0.5 && *y >= 0.5 && x + y <= 3.0 + 1e-12));
    }

    #[test]
    fn sign_pattern_examples() {
        let xs = grid(0.0, 3.0, 301);
        let diff = sample(&xs, |x| (-x * x).exp() - (-x).exp());
        let p = sign_pattern(&diff, DEAD_BAND).unwrap();
        assert_eq!(p.signs, vec![Sign::Plus, Sign::Minus]);
        assert_eq!(p.change_count, 1);
        let zero = sample(&xs, |x| (-x).exp() - (-x).exp());
        let p = sign_pattern(&zero, DEAD_BAND).unwrap();
        assert!(p.signs.is_empty());
        assert_eq!(p.change_count, 0);
        let xs = grid(0.0, 1.0, 201);
        let d = sample(&xs, |x| (1.0 - x) * (1.0 - x) - (-2.0 * x).exp());
        assert!(sign_pattern(&d, DEAD_BAND).unwrap().change_count <= 2);
        assert!(sign_pattern(&[], DEAD_BAND).is_err());
    }
}
