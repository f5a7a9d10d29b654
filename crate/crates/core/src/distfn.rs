//! Lifetime distributions: parametric families with closed forms where they
//! exist, and empirical step distributions built from samples.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::interp::solve_decreasing;
use crate::quadrature::{integrate, integrate_to_infinity, QuadTol};

/// Support `[0, upper)` of a lifetime law; `upper` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportInterval {
    pub lower: f64,
    pub upper: f64,
}

impl SupportInterval {
    pub fn new(upper: f64) -> Result<Self> {
        if !(upper > 0.0) {
            return Err(Error::Parameter(format!("support upper bound {upper} must be positive")));
        }
        Ok(Self { lower: 0.0, upper })
    }

    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Family {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Gamma { shape: f64, rate: f64 },
    Uniform { upper: f64 },
    Empirical { sorted: Arc<[f64]> },
}

/// Analytic formulas for the whole equilibrium ladder of a family.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedChain {
    /// Every level is the same exponential law.
    Exponential { rate: f64 },
    /// Level `s` has survival `(1 − x/upper)^s`.
    Uniform { upper: f64 },
    /// Integer-shape gamma: each level is a mixture of Erlang kernels.
    Erlang { shape: usize, rate: f64 },
}

/// Level `s` of a [`ClosedChain`], ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedLevel {
    Exponential { rate: f64 },
    Uniform { upper: f64, power: f64 },
    /// `T̄(x) = Σ_j coeffs[j]·e^{−λx}(λx)^j/j!`
    Erlang { rate: f64, coeffs: Vec<f64> },
}

impl ClosedChain {
    /// Formulas for level `s ≥ 1`.
    pub fn level(&self, s: usize) -> ClosedLevel {
        match *self {
            ClosedChain::Exponential { rate } => ClosedLevel::Exponential { rate },
            ClosedChain::Uniform { upper } => ClosedLevel::Uniform {
                upper,
                power: s as f64,
            },
            ClosedChain::Erlang { shape, rate } => {
                // Integrating Σ c_j p_j from x to ∞ gives (1/λ) Σ_i (Σ_{j≥i} c_j) p_i.
                let mut coeffs = vec![1.0; shape];
                for _ in 1..s {
                    let mut suffix = 0.0;
                    let mut next = vec![0.0; shape];
                    for i in (0..shape).rev() {
                        suffix += coeffs[i];
                        next[i] = suffix;
                    }
                    let head = next[0];
                    coeffs = next.into_iter().map(|c| c / head).collect();
                }
                ClosedLevel::Erlang { rate, coeffs }
            }
        }
    }
}

fn erlang_kernel(rate: f64, j: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    let lx = rate * x;
    if j == 0 {
        return (-lx).exp();
    }
    (j as f64 * lx.ln() - lx - ln_gamma(j as f64 + 1.0)).exp()
}

impl ClosedLevel {
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match self {
            ClosedLevel::Exponential { rate } => (-rate * x).exp(),
            ClosedLevel::Uniform { upper, power } => {
                if x >= *upper {
                    0.0
                } else {
                    (1.0 - x / upper).powf(*power)
                }
            }
            ClosedLevel::Erlang { rate, coeffs } => coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * erlang_kernel(*rate, j, x))
                .sum(),
        }
    }

    /// Generalized mean: the integral of the level survival.
    pub fn mean(&self) -> f64 {
        match self {
            ClosedLevel::Exponential { rate } => 1.0 / rate,
            ClosedLevel::Uniform { upper, power } => upper / (power + 1.0),
            ClosedLevel::Erlang { rate, coeffs } => coeffs.iter().sum::<f64>() / rate,
        }
    }

    /// `∫ₓ^∞` of the level survival.
    pub fn tail_integral(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self {
            ClosedLevel::Exponential { rate } => (-rate * x).exp() / rate,
            ClosedLevel::Uniform { upper, power } => {
                if x >= *upper {
                    0.0
                } else {
                    upper * (1.0 - x / upper).powf(power + 1.0) / (power + 1.0)
                }
            }
            ClosedLevel::Erlang { rate, coeffs } => {
                let mut suffix = 0.0;
                let mut total = 0.0;
                for i in (0..coeffs.len()).rev() {
                    suffix += coeffs[i];
                    total += suffix * erlang_kernel(*rate, i, x);
                }
                total / rate
            }
        }
    }

    /// Closed-form inverse where one exists.
    pub fn survival_inverse(&self, u: f64) -> Option<f64> {
        match self {
            ClosedLevel::Exponential { rate } => Some(-u.ln() / rate),
            ClosedLevel::Uniform { upper, power } => Some(upper * (1.0 - u.powf(1.0 / power))),
            ClosedLevel::Erlang { .. } => None,
        }
    }
}

/// One lifetime law: survival, density and quantile evaluators plus support
/// and mean. Immutable once built and cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionModel {
    name: String,
    family: Family,
    mean: f64,
    support: SupportInterval,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parameter(format!("{name} must be a positive finite number, got {v}")))
    }
}

fn fmt_param(v: f64) -> String {
    format!("{v}")
}

/// Exponential law with survival `exp(−rate·x)`.
pub fn make_exponential(rate: f64) -> Result<DistributionModel> {
    let rate = positive("rate", rate)?;
    Ok(DistributionModel {
        name: format!("exponential(rate={})", fmt_param(rate)),
        family: Family::Exponential { rate },
        mean: 1.0 / rate,
        support: SupportInterval::new(f64::INFINITY)?,
    })
}

/// Weibull law with survival `exp(−(x/scale)^shape)`.
pub fn make_weibull(shape: f64, scale: f64) -> Result<DistributionModel> {
    let shape = positive("shape", shape)?;
    let scale = positive("scale", scale)?;
    let mean = scale * gamma(1.0 + 1.0 / shape);
    if !mean.is_finite() {
        return Err(Error::Parameter(format!("weibull shape {shape} gives a non-finite mean")));
    }
    Ok(DistributionModel {
        name: format!("weibull(shape={}, scale={})", fmt_param(shape), fmt_param(scale)),
        family: Family::Weibull { shape, scale },
        mean,
        support: SupportInterval::new(f64::INFINITY)?,
    })
}

/// Gamma law with the given shape and rate.
pub fn make_gamma(shape: f64, rate: f64) -> Result<DistributionModel> {
    let shape = positive("shape", shape)?;
    let rate = positive("rate", rate)?;
    Ok(DistributionModel {
        name: format!("gamma(shape={}, rate={})", fmt_param(shape), fmt_param(rate)),
        family: Family::Gamma { shape, rate },
        mean: shape / rate,
        support: SupportInterval::new(f64::INFINITY)?,
    })
}

/// Uniform law on `[0, upper]`.
pub fn make_uniform(upper: f64) -> Result<DistributionModel> {
    let upper = positive("upper", upper)?;
    Ok(DistributionModel {
        name: format!("uniform(upper={})", fmt_param(upper)),
        family: Family::Uniform { upper },
        mean: 0.5 * upper,
        support: SupportInterval::new(upper)?,
    })
}

/// Empirical step distribution of a sample of positive lifetimes.
pub fn make_empirical(sample: &[f64]) -> Result<DistributionModel> {
    if sample.is_empty() {
        return Err(Error::Data("empirical sample is empty".into()));
    }
    if let Some(bad) = sample.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Data(format!("sample values must be positive and finite, got {bad}")));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    let upper = *sorted.last().expect("nonempty");
    Ok(DistributionModel {
        name: format!("empirical(n={})", sorted.len()),
        family: Family::Empirical {
            sorted: sorted.into(),
        },
        mean,
        support: SupportInterval::new(upper)?,
    })
}

impl DistributionModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn support(&self) -> SupportInterval {
        self.support
    }

    /// False for empirical step distributions.
    pub fn is_absolutely_continuous(&self) -> bool {
        !matches!(self.family, Family::Empirical { .. })
    }

    /// The sorted sample behind an empirical law.
    pub fn sample(&self) -> Option<&[f64]> {
        match &self.family {
            Family::Empirical { sorted } => Some(sorted),
            _ => None,
        }
    }

    /// Law of `θ·X`; its distribution function satisfies `F_θX(θx) = F_X(x)`.
    pub fn scaled(&self, theta: f64) -> Result<DistributionModel> {
        let theta = positive("scale factor", theta)?;
        match &self.family {
            Family::Exponential { rate } => make_exponential(rate / theta),
            Family::Weibull { shape, scale } => make_weibull(*shape, scale * theta),
            Family::Gamma { shape, rate } => make_gamma(*shape, rate / theta),
            Family::Uniform { upper } => make_uniform(upper * theta),
            Family::Empirical { sorted } => {
                let v: Vec<f64> = sorted.iter().map(|x| x * theta).collect();
                make_empirical(&v)
            }
        }
    }

    /// Right-continuous survival `P(X > x)`.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match &self.family {
            Family::Exponential { rate } => (-rate * x).exp(),
            Family::Weibull { shape, scale } => (-(x / scale).powf(*shape)).exp(),
            Family::Gamma { shape, rate } => gamma_ur(*shape, rate * x),
            Family::Uniform { upper } => (1.0 - x / upper).max(0.0),
            Family::Empirical { sorted } => {
                let at_or_below = sorted.partition_point(|v| *v <= x);
                (sorted.len() - at_or_below) as f64 / sorted.len() as f64
            }
        }
    }

    /// Left limit `P(X ≥ x)`; equals [`survival`](Self::survival) for continuous laws.
    pub fn survival_left(&self, x: f64) -> f64 {
        match &self.family {
            Family::Empirical { sorted } if x > 0.0 => {
                let below = sorted.partition_point(|v| *v < x);
                (sorted.len() - below) as f64 / sorted.len() as f64
            }
            _ => self.survival(x),
        }
    }

    /// Density; infinite at the origin for shapes below one, zero for step laws.
    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match &self.family {
            Family::Exponential { rate } => rate * (-rate * x).exp(),
            Family::Weibull { shape, scale } => {
                if x == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0 / scale,
                        _ => 0.0,
                    };
                }
                let z = x / scale;
                shape / scale * z.powf(shape - 1.0) * (-z.powf(*shape)).exp()
            }
            Family::Gamma { shape, rate } => {
                if x == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => *rate,
                        _ => 0.0,
                    };
                }
                let lx = rate * x;
                rate * ((shape - 1.0) * lx.ln() - lx - ln_gamma(*shape)).exp()
            }
            Family::Uniform { upper } => {
                if x < *upper {
                    1.0 / upper
                } else {
                    0.0
                }
            }
            Family::Empirical { .. } => 0.0,
        }
    }

    /// Generalized inverse of the survival: `inf{x : P(X > x) ≤ u}`.
    pub fn survival_inverse(&self, u: f64) -> f64 {
        if u >= 1.0 {
            return 0.0;
        }
        if u <= 0.0 {
            return self.support.upper;
        }
        match &self.family {
            Family::Exponential { rate } => -u.ln() / rate,
            Family::Weibull { shape, scale } => scale * (-u.ln()).powf(1.0 / shape),
            Family::Uniform { upper } => upper * (1.0 - u),
            Family::Gamma { .. } => self.invert_survival_numerically(u),
            Family::Empirical { sorted } => {
                let n = sorted.len();
                // Smallest k with #{X_i > x_(k)} ≤ n·u.
                let allowed_above = ((n as f64) * u + 1e-9).floor() as usize;
                let k = n.saturating_sub(allowed_above);
                if k == 0 {
                    0.0
                } else {
                    sorted[k - 1]
                }
            }
        }
    }

    /// Quantile `F⁻¹(u) = inf{x : F(x) ≥ u}`.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return self.support.upper;
        }
        match &self.family {
            Family::Exponential { rate } => -(-u).ln_1p() / rate,
            Family::Weibull { shape, scale } => scale * (-(-u).ln_1p()).powf(1.0 / shape),
            Family::Uniform { upper } => upper * u,
            Family::Empirical { sorted } => {
                let n = sorted.len();
                let k = ((n as f64) * u - 1e-9).ceil().max(1.0) as usize;
                sorted[k.min(n) - 1]
            }
            Family::Gamma { .. } => self.survival_inverse(1.0 - u),
        }
    }

    fn invert_survival_numerically(&self, u: f64) -> f64 {
        let mut hi = self.mean.max(1e-300);
        let mut guard = 0;
        while self.survival(hi) > u && guard < 2000 {
            hi *= 2.0;
            guard += 1;
        }
        solve_decreasing(
            |x| (self.survival(x), -self.density(x)),
            u,
            0.0,
            hi,
            None,
        )
    }

    /// Excess moment `E[(X − x)₊^k]`; `k = 0` gives the survival.
    pub fn excess_moment(&self, k: usize, x: f64) -> f64 {
        let x = x.max(0.0);
        if k == 0 {
            return self.survival(x);
        }
        match &self.family {
            Family::Empirical { sorted } => {
                let start = sorted.partition_point(|v| *v <= x);
                sorted[start..]
                    .iter()
                    .map(|v| (v - x).powi(k as i32))
                    .sum::<f64>()
                    / sorted.len() as f64
            }
            Family::Exponential { rate } => {
                (gamma(k as f64 + 1.0) / rate.powi(k as i32)) * (-rate * x).exp()
            }
            Family::Uniform { upper } => {
                if x >= *upper {
                    0.0
                } else {
                    (upper - x).powi(k as i32 + 1) / ((k as f64 + 1.0) * upper)
                }
            }
            _ => {
                let kf = k as f64;
                let integrand = |t: f64| {
                    let surv = self.survival(t);
                    if surv == 0.0 {
                        0.0
                    } else if k == 1 {
                        surv
                    } else {
                        kf * (t - x).powi(k as i32 - 1) * surv
                    }
                };
                let scale = self.mean.max(x * 0.1).max(1e-12);
                let tol = QuadTol {
                    abs: 1e-300,
                    rel: 1e-13,
                    max_intervals: 2000,
                };
                integrate_to_infinity(integrand, x, scale, tol).value
            }
        }
    }

    /// `∫ₓ^∞ P(X > t) dt`.
    pub fn tail_integral(&self, x: f64) -> f64 {
        self.excess_moment(1, x)
    }

    /// `∫ₐᵇ P(X > t) dt`.
    pub fn survival_integral(&self, a: f64, b: f64) -> f64 {
        let b = b.min(self.support.upper);
        if b <= a {
            return 0.0;
        }
        match &self.family {
            Family::Empirical { .. } => self.tail_integral(a) - self.tail_integral(b),
            Family::Exponential { rate } => ((-rate * a).exp() - (-rate * b).exp()) / rate,
            Family::Uniform { upper } => {
                let f = |t: f64| t - 0.5 * t * t / upper;
                f(b) - f(a)
            }
            _ => {
                let tol = QuadTol {
                    abs: 1e-300,
                    rel: 1e-14,
                    max_intervals: 200,
                };
                integrate(|t| self.survival(t), a, b, tol).value
            }
        }
    }

    /// Analytic ladder formulas, when the family has them.
    pub fn closed_form_chain(&self) -> Option<ClosedChain> {
        match &self.family {
            Family::Exponential { rate } => Some(ClosedChain::Exponential { rate: *rate }),
            Family::Uniform { upper } => Some(ClosedChain::Uniform { upper: *upper }),
            Family::Weibull { shape, scale } if *shape == 1.0 => Some(ClosedChain::Exponential { rate: 1.0 / scale }),
            Family::Gamma { shape, rate } => {
                let n = shape.round();
                if (shape - n).abs() < 1e-12 && (1.0..=128.0).contains(&n) {
                    Some(ClosedChain::Erlang {
                        shape: n as usize,
                        rate: *rate,
                    })
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Parses a distribution spec of the form
    /// `family=<name> param.<key>=<value> ...` or `data=<path>`.
    ///
    /// Tokens may be separated by whitespace or commas.
    pub fn from_spec(spec: &str) -> Result<DistributionModel> {
        let mut family: Option<String> = None;
        let mut data: Option<String> = None;
        let mut params: Vec<(String, f64)> = Vec::new();
        for token in spec.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, found '{token}'")))?;
            match key {
                "family" => family = Some(value.to_ascii_lowercase()),
                "data" => data = Some(value.to_string()),
                k if k.starts_with("param.") => {
                    let name = &k["param.".len()..];
                    let v: f64 = value.parse().map_err(|_| {
                        Error::Parse(format!("parameter {name} has non-numeric value '{value}'"))
                    })?;
                    params.push((name.to_string(), v));
                }
                other => return Err(Error::Parse(format!("unknown key '{other}'"))),
            }
        }
        let get = |name: &str| -> Result<f64> {
            params
                .iter()
                .find(|(k, _)| k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Parse(format!("missing parameter param.{name}")))
        };
        let allow = |names: &[&str]| -> Result<()> {
            match params.iter().find(|(k, _)| !names.contains(&k.as_str())) {
                Some((k, _)) => Err(Error::Parse(format!("unexpected parameter param.{k}"))),
                None => Ok(()),
            }
        };
        match (family.as_deref(), data) {
            (None | Some("empirical"), Some(path)) => {
                allow(&[])?;
                let sample = read_sample_file(Path::new(&path))?;
                make_empirical(&sample)
            }
            (Some("empirical"), None) => Err(Error::Parse("empirical family needs data=<path>".into())),
            (Some(_), Some(_)) => Err(Error::Parse("data= is only valid for the empirical family".into())),
            (None, None) => Err(Error::Parse("spec needs family= or data=".into())),
            (Some("exponential"), None) => {
                allow(&["rate"])?;
                make_exponential(get("rate")?)
            }
            (Some("weibull"), None) => {
                allow(&["shape", "scale"])?;
                make_weibull(get("shape")?, get("scale")?)
            }
            (Some("gamma"), None) => {
                allow(&["shape", "rate"])?;
                make_gamma(get("shape")?, get("rate")?)
            }
            (Some("uniform"), None) => {
                allow(&["upper"])?;
                make_uniform(get("upper")?)
            }
            (Some(other), None) => Err(Error::Parse(format!("unknown family '{other}'"))),
        }
    }
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Reads one positive real per line; a non-numeric first line is a header.
pub fn read_sample_file(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_sample_text(&text)
}

pub fn parse_sample_text(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::Data(format!("line {}: '{field}' is not a number", i + 1))),
        }
    }
    if out.is_empty() {
        return Err(Error::Data("sample file holds no values".into()));
    }
    Ok(out)
}
