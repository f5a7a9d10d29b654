//! Generalized ageing orderings between two ladders, decided through the
//! shape of `α_s = T̄⁻¹_{Y,s} ∘ T̄_{X,s}`, with the equivalent quantile,
//! transform and dominance forms evaluated alongside as consistency checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distfn::make_exponential;
use crate::equilibrium::{EquilibriumChain, NumericSettings};
use crate::error::{Error, Result};
use crate::shapes::{
    self, decide, is_convex, is_monotone, is_star_shaped, relative_dominance, sign_pattern,
    superadditivity_pairs, Outcome, ShapeVerdict, SignPattern, Slack, CONVEXITY_TOL, DEAD_BAND,
    DEFAULT_PAIR_BUDGET, DOMINANCE_TOL, MONOTONE_TOL, SUPERADDITIVE_TOL,
};
use crate::transforms::lorenz_raw;

/// Largest allowed survival gap for a scale-equivalence finding.
pub const EQUIVALENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "s-IFR")]
    Ifr,
    #[serde(rename = "s-IFRA")]
    Ifra,
    #[serde(rename = "s-NBU")]
    Nbu,
    #[serde(rename = "s-NBUFR")]
    Nbufr,
    #[serde(rename = "s-NBAFR")]
    Nbafr,
}

impl Relation {
    /// Strongest first; each relation implies every later one.
    pub const ALL: [Relation; 5] = [
        Relation::Ifr,
        Relation::Ifra,
        Relation::Nbu,
        Relation::Nbufr,
        Relation::Nbafr,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Relation::Ifr => "s-IFR",
            Relation::Ifra => "s-IFRA",
            Relation::Nbu => "s-NBU",
            Relation::Nbufr => "s-NBUFR",
            Relation::Nbafr => "s-NBAFR",
        }
    }

    /// Classical ageing-class name of the level-`s` class, where one exists.
    pub fn classical_name(self, s: usize) -> Option<&'static str> {
        match (self, s) {
            (Relation::Ifr, 1) => Some("IFR"),
            (Relation::Ifr, 2) => Some("DMRL"),
            (Relation::Ifr, 3) => Some("DVRL"),
            (Relation::Ifra, 1) => Some("IFRA"),
            (Relation::Ifra, 2) => Some("DMRLHA"),
            (Relation::Nbu, 1) => Some("NBU"),
            (Relation::Nbufr, 1) => Some("NBUFR"),
            (Relation::Nbufr, 2) => Some("NBUE"),
            (Relation::Nbufr, 3) => Some("NDVRL"),
            (Relation::Nbafr, 1) => Some("NBAFR"),
            (Relation::Nbafr, 2) => Some("HNBUE"),
            _ => None,
        }
    }
}

/// `α_s(x) = T̄⁻¹_{Y,s}(T̄_{X,s}(x))` with its analytic derivative.
#[derive(Debug, Clone, Copy)]
pub struct AlphaMap<'a> {
    x: &'a EquilibriumChain,
    y: &'a EquilibriumChain,
    level: usize,
    window: (f64, f64),
}

pub fn alpha_map<'a>(
    chain_x: &'a EquilibriumChain,
    chain_y: &'a EquilibriumChain,
    s: usize,
) -> Result<AlphaMap<'a>> {
    if s < 1 {
        return Err(Error::Level {
            requested: s,
            max: chain_x.max_level().min(chain_y.max_level()),
        });
    }
    let window = chain_x.window(s)?;
    chain_y.window(s)?;
    if !(window.1 > window.0) {
        return Err(Error::Domain(format!(
            "empty comparison window [{}, {}] at level {s}",
            window.0, window.1
        )));
    }
    Ok(AlphaMap {
        x: chain_x,
        y: chain_y,
        level: s,
        window,
    })
}

impl<'a> AlphaMap<'a> {
    pub fn level(&self) -> usize {
        self.level
    }

    /// x-range where `T̄_{X,s}` lies in the quantile window.
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.y.inv(self.level, self.x.tb(self.level, x))
    }

    /// `(μ̃_{Y,s−1}/μ̃_{X,s−1})·T̄_{X,s−1}(x)/T̄_{Y,s−1}(α_s(x))`.
    pub fn deriv(&self, x: f64) -> f64 {
        self.deriv_with(x, self.eval(x))
    }

    fn deriv_with(&self, x: f64, alpha: f64) -> f64 {
        let s = self.level;
        let ratio = self.y.mean_at(s - 1) / self.x.mean_at(s - 1);
        ratio * self.x.tb(s - 1, x) / self.y.tb(s - 1, alpha)
    }

    /// Slope of `α_s` at the origin.
    ///
    /// From level 2 on both lower-level survivals equal one at the origin and
    /// the value is the ratio of generalized means. At level 1 the densities
    /// may vanish or blow up at the origin, so the secant `α_1(a)/a` from the
    /// origin to the left window edge `a` is used instead.
    pub fn deriv_at_origin(&self) -> f64 {
        if self.level >= 2 {
            self.y.mean_at(self.level - 1) / self.x.mean_at(self.level - 1)
        } else {
            self.eval(self.window.0) / self.window.0
        }
    }

    fn x_grid(&self) -> Vec<f64> {
        let n = self.x.settings().grid_points;
        let (a, b) = self.window;
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// A secondary form of an ordering with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedForm {
    pub name: String,
    pub verdict: ShapeVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingVerdict {
    pub relation: Relation,
    pub level: usize,
    /// Decision of the relation, taken from the primary form.
    pub outcome: Outcome,
    pub primary_form: NamedForm,
    pub secondary_forms: Vec<NamedForm>,
    /// All conclusive forms agree.
    pub agreement: bool,
    /// Primary form sits on the boundary; both directions may hold up to scale.
    pub equivalence_candidate: bool,
}

impl OrderingVerdict {
    fn assemble(relation: Relation, level: usize, primary: NamedForm, secondary: Vec<NamedForm>) -> Self {
        let mut seen = std::iter::once(&primary)
            .chain(&secondary)
            .map(|f| f.verdict.outcome)
            .filter(|o| o.is_conclusive());
        let first = seen.next();
        let agreement = seen.all(|o| Some(o) == first);
        let outcome = primary.verdict.outcome;
        Self {
            relation,
            level,
            outcome,
            equivalence_candidate: outcome == Outcome::Inconclusive && primary.verdict.margin.is_finite(),
            primary_form: primary,
            secondary_forms: secondary,
            agreement,
        }
    }

    /// Secondary forms whose conclusive verdict contradicts the primary one.
    pub fn disagreements(&self) -> Vec<&NamedForm> {
        let p = self.primary_form.verdict.outcome;
        if !p.is_conclusive() {
            return Vec::new();
        }
        self.secondary_forms
            .iter()
            .filter(|f| f.verdict.outcome.is_conclusive() && f.verdict.outcome != p)
            .collect()
    }
}

fn form(name: &str, verdict: Result<ShapeVerdict>, window: (f64, f64)) -> NamedForm {
    NamedForm {
        name: name.to_string(),
        verdict: verdict.unwrap_or_else(|e| ShapeVerdict::unavailable(window, e.to_string())),
    }
}

/// Quantities of both ladders along a common survival level `v = 1 − p`,
/// with `p` increasing over the quantile window.
struct QuantileTrack {
    p: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    /// `r_{X,s}(x_p)/r_{Y,s}(y_p)`, which equals `α′_s(x_p)`.
    hazard_ratio: Vec<f64>,
}

impl QuantileTrack {
    fn new(a: &AlphaMap<'_>) -> Self {
        let p = a.x.u_grid();
        let s = a.level;
        let mut x = Vec::with_capacity(p.len());
        let mut y = Vec::with_capacity(p.len());
        let mut hazard_ratio = Vec::with_capacity(p.len());
        for &pi in &p {
            let v = 1.0 - pi;
            let xi = a.x.inv(s, v);
            let yi = a.y.inv(s, v);
            x.push(xi);
            y.push(yi);
            hazard_ratio.push(a.deriv_with(xi, yi));
        }
        Self {
            p,
            x,
            y,
            hazard_ratio,
        }
    }

    fn window(&self) -> (f64, f64) {
        (self.p[0], self.p[self.p.len() - 1])
    }
}

fn need_level(chain: &EquilibriumChain, level: usize) -> Result<()> {
    if level > chain.max_level() {
        return Err(Error::Level {
            requested: level,
            max: chain.max_level(),
        });
    }
    Ok(())
}

/// `α_s` convex; secondary: the hazard ratio along quantiles increases, the
/// ratio of complemented inverse TTT transforms increases (from level 2),
/// and `R⁻¹_{Y,s} ∘ R_{X,s}` is concave (needs level `s + 1`).
pub fn check_s_ifr(chain_x: &EquilibriumChain, chain_y: &EquilibriumChain, s: usize) -> Result<OrderingVerdict> {
    let a = alpha_map(chain_x, chain_y, s)?;
    let xs = a.x_grid();
    let alpha: Vec<f64> = xs.iter().map(|&x| a.eval(x)).collect();
    let primary = form("alpha-convex", is_convex(&xs, &alpha, CONVEXITY_TOL), a.window);

    let t = QuantileTrack::new(&a);
    let w = t.window();
    let mut secondary = vec![form(
        "hazard-ratio-increasing",
        is_monotone(&t.p, &t.hazard_ratio, true, MONOTONE_TOL),
        w,
    )];
    if s >= 2 {
        // 1 − H_{s−1}(p) = T̄_{s−1}(T̄_s⁻¹(1 − p)).
        let ratio: Vec<f64> = t
            .x
            .iter()
            .zip(&t.y)
            .map(|(&xi, &yi)| chain_x.tb(s - 1, xi) / chain_y.tb(s - 1, yi))
            .collect();
        secondary.push(form(
            "ttt-complement-ratio-increasing",
            is_monotone(&t.p, &ratio, true, MONOTONE_TOL),
            w,
        ));
    }
    let composed = need_level(chain_x, s + 1).and_then(|_| need_level(chain_y, s + 1)).and_then(|_| {
        // R⁻¹_{Y,s}(R_{X,s}(u)) = T̄_{Y,s+1}(α_s(T̄⁻¹_{X,s+1}(u))), sampled on
        // the level-(s+1) window of X.
        let us: Vec<f64> = chain_x.u_grid();
        let vals: Vec<f64> = us
            .iter()
            .map(|&u| chain_y.tb(s + 1, a.eval(chain_x.inv(s + 1, u))))
            .collect();
        shapes::is_concave(&us, &vals, CONVEXITY_TOL)
    });
    secondary.push(form("r-composition-concave", composed, w));
    Ok(OrderingVerdict::assemble(Relation::Ifr, s, primary, secondary))
}

/// `α_s` star-shaped; secondary: `T̄⁻¹_{Y,s}/T̄⁻¹_{X,s}` decreases in the
/// survival level, and the hazard ratio dominates the quantile ratio.
pub fn check_s_ifra(chain_x: &EquilibriumChain, chain_y: &EquilibriumChain, s: usize) -> Result<OrderingVerdict> {
    let a = alpha_map(chain_x, chain_y, s)?;
    let xs = a.x_grid();
    let alpha: Vec<f64> = xs.iter().map(|&x| a.eval(x)).collect();
    let primary = form("alpha-star-shaped", is_star_shaped(&xs, &alpha, MONOTONE_TOL), a.window);

    let t = QuantileTrack::new(&a);
    let w = t.window();
    let quantile_ratio: Vec<f64> = t.y.iter().zip(&t.x).map(|(y, x)| y / x).collect();
    // Increasing in p is decreasing in the survival level 1 − p.
    let secondary = vec![
        form(
            "quantile-ratio-decreasing",
            is_monotone(&t.p, &quantile_ratio, true, MONOTONE_TOL),
            w,
        ),
        form(
            "hazard-ratio-above-quantile-ratio",
            relative_dominance(&t.p, &t.hazard_ratio, &quantile_ratio, DOMINANCE_TOL),
            w,
        ),
    ];
    Ok(OrderingVerdict::assemble(Relation::Ifra, s, primary, secondary))
}

/// `α_s` super-additive; secondary: the survival of the sum of two quantiles
/// of X is dominated by the corresponding survival of Y, over the same pairs.
pub fn check_s_nbu(chain_x: &EquilibriumChain, chain_y: &EquilibriumChain, s: usize) -> Result<OrderingVerdict> {
    check_s_nbu_with_budget(chain_x, chain_y, s, DEFAULT_PAIR_BUDGET)
}

pub fn check_s_nbu_with_budget(
    chain_x: &EquilibriumChain,
    chain_y: &EquilibriumChain,
    s: usize,
    budget: usize,
) -> Result<OrderingVerdict> {
    let a = alpha_map(chain_x, chain_y, s)?;
    let (lo, hi) = a.window;
    let pairs = match superadditivity_pairs(lo, hi, budget) {
        Ok(p) => p,
        Err(e) => {
            let primary = form("alpha-superadditive", Err(e.clone()), a.window);
            let secondary = vec![form("quantile-sum-dominance", Err(e), a.window)];
            return Ok(OrderingVerdict::assemble(Relation::Nbu, s, primary, secondary));
        }
    };
    let mut primary_slacks = Vec::with_capacity(pairs.len());
    let mut secondary_slacks = Vec::with_capacity(pairs.len());
    for &(x1, x2) in &pairs {
        let (a1, a2, a12) = (a.eval(x1), a.eval(x2), a.eval(x1 + x2));
        primary_slacks.push(Slack {
            x: x1,
            y: Some(x2),
            value: (a12 - a1 - a2) / a12.abs().max(1e-300),
        });
        // u = T̄_X(x1), v = T̄_X(x2): quantiles are x1, x2 for X and α(x1), α(x2) for Y.
        let sx = chain_x.tb(s, x1 + x2);
        let sy = chain_y.tb(s, a1 + a2);
        secondary_slacks.push(Slack {
            x: chain_x.tb(s, x1),
            y: Some(chain_x.tb(s, x2)),
            value: (sy - sx) / sx.max(sy).max(1e-300),
        });
    }
    let primary = NamedForm {
        name: "alpha-superadditive".into(),
        verdict: decide(&primary_slacks, SUPERADDITIVE_TOL, a.window),
    };
    let (ulo, uhi) = chain_x.settings().quantile_window;
    let secondary = vec![NamedForm {
        name: "quantile-sum-dominance".into(),
        verdict: decide(&secondary_slacks, SUPERADDITIVE_TOL, (ulo, uhi)),
    }];
    Ok(OrderingVerdict::assemble(Relation::Nbu, s, primary, secondary))
}

/// `α′_s(x) ≥ α′_s(0)`; secondary from level 2: `α_s ≥ α_{s−1}`,
/// `H_{X,s−1} ≤ H_{Y,s−1}`, and the hazard ratio stays above
/// `μ̃_{Y,s−1}/μ̃_{X,s−1}`.
pub fn check_s_nbufr(chain_x: &EquilibriumChain, chain_y: &EquilibriumChain, s: usize) -> Result<OrderingVerdict> {
    let a = alpha_map(chain_x, chain_y, s)?;
    let xs = a.x_grid();
    let origin = a.deriv_at_origin();
    let primary = if origin.is_finite() && origin > 0.0 {
        let d: Vec<f64> = xs.iter().map(|&x| a.deriv(x)).collect();
        form(
            "alpha-derivative-minimum-at-origin",
            relative_dominance(&xs, &d, &vec![origin; xs.len()], DOMINANCE_TOL),
            a.window,
        )
    } else {
        form(
            "alpha-derivative-minimum-at-origin",
            Err(Error::numeric(s, "slope of alpha at the origin is not finite")),
            a.window,
        )
    };
    let mut secondary = Vec::new();
    if s >= 2 {
        let prev = alpha_map(chain_x, chain_y, s - 1);
        let above_prev = prev.and_then(|b| {
            let lhs: Vec<f64> = xs.iter().map(|&x| a.eval(x)).collect();
            let rhs: Vec<f64> = xs.iter().map(|&x| b.eval(x)).collect();
            relative_dominance(&xs, &lhs, &rhs, DOMINANCE_TOL)
        });
        secondary.push(form("alpha-above-previous-level", above_prev, a.window));

        let t = QuantileTrack::new(&a);
        let w = t.window();
        // H_{s−1}(p) ≤ H'_{s−1}(p) ⟺ T̄_{X,s−1}(T̄⁻¹_{X,s}(v)) ≥ T̄_{Y,s−1}(T̄⁻¹_{Y,s}(v)), v = 1 − p.
        let rx: Vec<f64> = t.x.iter().map(|&x| chain_x.tb(s - 1, x)).collect();
        let ry: Vec<f64> = t.y.iter().map(|&y| chain_y.tb(s - 1, y)).collect();
        secondary.push(form(
            "ttt-inverse-dominance",
            relative_dominance(&t.p, &rx, &ry, DOMINANCE_TOL),
            w,
        ));
        let floor = chain_y.mean_at(s - 1) / chain_x.mean_at(s - 1);
        secondary.push(form(
            "hazard-ratio-above-mean-ratio",
            relative_dominance(&t.p, &t.hazard_ratio, &vec![floor; t.p.len()], DOMINANCE_TOL),
            w,
        ));
    }
    Ok(OrderingVerdict::assemble(Relation::Nbufr, s, primary, secondary))
}

/// `α_s(x) ≥ x·α′_s(0)`; secondary from level 2: survival dominance at
/// arguments scaled by `μ̃_{·,s−1}`, and `L_{X,s−1} ≥ L_{Y,s−1}`.
pub fn check_s_nbafr(chain_x: &EquilibriumChain, chain_y: &EquilibriumChain, s: usize) -> Result<OrderingVerdict> {
    let a = alpha_map(chain_x, chain_y, s)?;
    let xs = a.x_grid();
    let origin = a.deriv_at_origin();
    let primary = if origin.is_finite() && origin > 0.0 {
        let lhs: Vec<f64> = xs.iter().map(|&x| a.eval(x)).collect();
        let rhs: Vec<f64> = xs.iter().map(|&x| x * origin).collect();
        form(
            "alpha-above-origin-tangent",
            relative_dominance(&xs, &lhs, &rhs, DOMINANCE_TOL),
            a.window,
        )
    } else {
        form(
            "alpha-above-origin-tangent",
            Err(Error::numeric(s, "slope of alpha at the origin is not finite")),
            a.window,
        )
    };
    let mut secondary = Vec::new();
    if s >= 2 {
        let mx = chain_x.mean_at(s - 1);
        let my = chain_y.mean_at(s - 1);
        // T̄_{X,s}(t·μ̃_X) ≤ T̄_{Y,s}(t·μ̃_Y) with t = x/μ̃_X over the X window.
        let ts: Vec<f64> = xs.iter().map(|x| x / mx).collect();
        let lhs: Vec<f64> = ts.iter().map(|&t| chain_y.tb(s, t * my)).collect();
        let rhs: Vec<f64> = ts.iter().map(|&t| chain_x.tb(s, t * mx)).collect();
        secondary.push(form(
            "scaled-survival-dominance",
            relative_dominance(&ts, &lhs, &rhs, DOMINANCE_TOL),
            (ts[0], ts[ts.len() - 1]),
        ));
        let us = chain_x.u_grid();
        let lx: Vec<f64> = us.iter().map(|&u| lorenz_raw(chain_x, s - 1, u)).collect();
        let ly: Vec<f64> = us.iter().map(|&u| lorenz_raw(chain_y, s - 1, u)).collect();
        secondary.push(form(
            "lorenz-dominance",
            relative_dominance(&us, &lx, &ly, DOMINANCE_TOL),
            (us[0], us[us.len() - 1]),
        ));
    }
    Ok(OrderingVerdict::assemble(Relation::Nbafr, s, primary, secondary))
}

pub fn check_relation(
    relation: Relation,
    chain_x: &EquilibriumChain,
    chain_y: &EquilibriumChain,
    s: usize,
) -> Result<OrderingVerdict> {
    match relation {
        Relation::Ifr => check_s_ifr(chain_x, chain_y, s),
        Relation::Ifra => check_s_ifra(chain_x, chain_y, s),
        Relation::Nbu => check_s_nbu(chain_x, chain_y, s),
        Relation::Nbufr => check_s_nbufr(chain_x, chain_y, s),
        Relation::Nbafr => check_s_nbafr(chain_x, chain_y, s),
    }
}

/// Sign pattern of `T̄_{X,s}(x) − T̄_{Y,s}(a·x + b)` over the X window,
/// restricted to `x` with `a·x + b` inside the support of Y.
pub fn sign_change_form(
    chain_x: &EquilibriumChain,
    chain_y: &EquilibriumChain,
    s: usize,
    a: f64,
    b: f64,
) -> Result<SignPattern> {
    if !(a > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "sign-change forms need a > 0 and finite b, got a = {a}, b = {b}"
        )));
    }
    need_level(chain_y, s)?;
    let xs = chain_x.x_grid(s)?;
    let upper = chain_y.base().support().upper;
    let diffs: Vec<f64> = xs
        .iter()
        .filter(|&&x| {
            let z = a * x + b;
            z >= 0.0 && z <= upper
        })
        .map(|&x| chain_x.tb(s, x) - chain_y.tb(s, a * x + b))
        .collect();
    if diffs.is_empty() {
        return Err(Error::Domain("shifted argument leaves the support on the whole window".into()));
    }
    sign_pattern(&diffs, DEAD_BAND)
}

/// `θ = mean_Y/mean_X` when `F̄_X(x) = F̄_Y(θx)` within [`EQUIVALENCE_TOL`].
pub fn scale_equivalence(chain_x: &EquilibriumChain, chain_y: &EquilibriumChain) -> Option<f64> {
    let bx = chain_x.base();
    let by = chain_y.base();
    let theta = by.mean() / bx.mean();
    let xs = chain_x.x_grid(1).ok()?;
    let gap = xs
        .iter()
        .map(|&x| (bx.survival(x) - by.survival(theta * x)).abs())
        .fold(0.0f64, f64::max);
    (gap <= EQUIVALENCE_TOL).then_some(theta)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyViolation {
    pub level: usize,
    pub stronger: Relation,
    pub weaker: Relation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub x: String,
    pub y: String,
    pub max_level: usize,
    /// Level-major, relations strongest first within a level.
    pub matrix: Vec<OrderingVerdict>,
    pub chain_consistency: Vec<ConsistencyViolation>,
    pub equivalence: Option<f64>,
    pub notes: Vec<String>,
}

impl OrderingReport {
    pub fn verdict(&self, relation: Relation, s: usize) -> Option<&OrderingVerdict> {
        self.matrix.iter().find(|v| v.relation == relation && v.level == s)
    }
}

/// Stronger-holds/weaker-fails pairs along the implication chain.
pub fn consistency_violations(matrix: &[OrderingVerdict]) -> Vec<ConsistencyViolation> {
    let mut out = Vec::new();
    let mut levels: Vec<usize> = matrix.iter().map(|v| v.level).collect();
    levels.sort_unstable();
    levels.dedup();
    for s in levels {
        let at = |r: Relation| matrix.iter().find(|v| v.level == s && v.relation == r).map(|v| v.outcome);
        for (i, &strong) in Relation::ALL.iter().enumerate() {
            for &weak in &Relation::ALL[i + 1..] {
                if at(strong) == Some(Outcome::Holds) && at(weak) == Some(Outcome::Fails) {
                    out.push(ConsistencyViolation {
                        level: s,
                        stronger: strong,
                        weaker: weak,
                    });
                }
            }
        }
    }
    out
}

/// Full relation × level matrix for levels `1..=S`; the chains must hold
/// level `S + 1` for the R-transform form at the top level.
pub fn ordering_report(chain_x: &EquilibriumChain, chain_y: &EquilibriumChain, max_level: usize) -> Result<OrderingReport> {
    need_level(chain_x, max_level)?;
    need_level(chain_y, max_level)?;
    let cells: Vec<(usize, Relation)> = (1..=max_level)
        .flat_map(|s| Relation::ALL.iter().map(move |&r| (s, r)))
        .collect();
    let matrix = cells
        .par_iter()
        .map(|&(s, r)| check_relation(r, chain_x, chain_y, s))
        .collect::<Result<Vec<_>>>()?;
    let mut notes = Vec::new();
    for (chain, tag) in [(chain_x, "first"), (chain_y, "second")] {
        if !chain.base().is_absolutely_continuous() {
            notes.push(format!(
                "{tag} input {} is an empirical step law; ordering verdicts are best-effort",
                chain.base()
            ));
        }
    }
    if chain_x.max_level() <= max_level || chain_y.max_level() <= max_level {
        notes.push(format!(
            "chains stop at level {max_level}; the R-composition form at that level is unavailable"
        ));
    }
    Ok(OrderingReport {
        x: chain_x.base().name().to_string(),
        y: chain_y.base().name().to_string(),
        max_level,
        chain_consistency: consistency_violations(&matrix),
        equivalence: scale_equivalence(chain_x, chain_y),
        matrix,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeingEntry {
    pub relation: Relation,
    pub level: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classical_name: Option<String>,
    /// Test of the single-distribution definition on `r_{X,s}` and `T̄_{X,s}`.
    pub direct: ShapeVerdict,
    /// Primary form of the ordering against the exponential reference.
    pub bridge: ShapeVerdict,
    pub agreement: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeingClassification {
    pub distribution: String,
    pub reference_rate: f64,
    pub entries: Vec<AgeingEntry>,
    /// Every verdict sits on the boundary, as for the exponential law.
    pub exponential_borderline: bool,
}

fn reference_chain(rate: f64, levels: usize, settings: NumericSettings) -> Result<EquilibriumChain> {
    let reference = make_exponential(rate)?;
    EquilibriumChain::build(
        &reference,
        levels,
        NumericSettings {
            use_closed_forms: true,
            ..settings
        },
    )
}

/// Direct single-distribution test of `relation` at level `s`.
pub fn direct_check(chain: &EquilibriumChain, relation: Relation, s: usize) -> Result<ShapeVerdict> {
    need_level(chain, s)?;
    let xs = chain.x_grid(s)?;
    let window = (xs[0], xs[xs.len() - 1]);
    // Cumulative hazard of level s.
    let hazard = |x: f64| -chain.tb(s, x).ln();
    let rate = |x: f64| chain.tb(s - 1, x) / (chain.mean_at(s - 1) * chain.tb(s, x));
    let rate_at_origin = if s >= 2 {
        1.0 / chain.mean_at(s - 1)
    } else {
        hazard(window.0) / window.0
    };
    match relation {
        Relation::Ifr => {
            let r: Vec<f64> = xs.iter().map(|&x| rate(x)).collect();
            is_monotone(&xs, &r, true, MONOTONE_TOL)
        }
        Relation::Ifra => {
            let h: Vec<f64> = xs.iter().map(|&x| hazard(x)).collect();
            is_star_shaped(&xs, &h, MONOTONE_TOL)
        }
        Relation::Nbu => {
            // T̄(x+t) ≤ T̄(x)·T̄(t), compared on the logarithmic scale.
            let pairs = superadditivity_pairs(window.0, window.1, DEFAULT_PAIR_BUDGET)?;
            let slacks: Vec<Slack> = pairs
                .iter()
                .map(|&(x, t)| {
                    let whole = hazard(x + t);
                    Slack {
                        x,
                        y: Some(t),
                        value: (whole - hazard(x) - hazard(t)) / whole.abs().max(1e-300),
                    }
                })
                .collect();
            Ok(decide(&slacks, SUPERADDITIVE_TOL, window))
        }
        Relation::Nbufr => {
            if !(rate_at_origin.is_finite() && rate_at_origin > 0.0) {
                return Err(Error::numeric(s, "failure rate at the origin is not finite"));
            }
            let r: Vec<f64> = xs.iter().map(|&x| rate(x)).collect();
            relative_dominance(&xs, &r, &vec![rate_at_origin; xs.len()], DOMINANCE_TOL)
        }
        Relation::Nbafr => {
            if !(rate_at_origin.is_finite() && rate_at_origin > 0.0) {
                return Err(Error::numeric(s, "failure rate at the origin is not finite"));
            }
            // (1/x)∫₀ˣ r_{X,s} = −ln T̄_{X,s}(x)/x.
            let avg: Vec<f64> = xs.iter().map(|&x| hazard(x) / x).collect();
            relative_dominance(&xs, &avg, &vec![rate_at_origin; xs.len()], DOMINANCE_TOL)
        }
    }
}

/// Classifies one ladder at level `s` against an exponential reference of
/// rate `1/mean`.
pub fn classify_ageing(chain: &EquilibriumChain, s: usize) -> Result<Vec<AgeingEntry>> {
    classify_ageing_with_rate(chain, s, 1.0 / chain.base().mean())
}

/// As [`classify_ageing`] with an explicit reference rate.
pub fn classify_ageing_with_rate(chain: &EquilibriumChain, s: usize, rate: f64) -> Result<Vec<AgeingEntry>> {
    need_level(chain, s)?;
    let reference = reference_chain(rate, chain.max_level().max(s + 1), *chain.settings())?;
    Relation::ALL
        .iter()
        .map(|&relation| {
            let window = chain.window(s)?;
            let direct = direct_check(chain, relation, s)
                .unwrap_or_else(|e| ShapeVerdict::unavailable(window, e.to_string()));
            let bridge = check_relation(relation, chain, &reference, s)?.primary_form.verdict;
            let agreement = !(direct.outcome.is_conclusive()
                && bridge.outcome.is_conclusive()
                && direct.outcome != bridge.outcome);
            Ok(AgeingEntry {
                relation,
                level: s,
                classical_name: relation.classical_name(s).map(str::to_string),
                direct,
                bridge,
                agreement,
            })
        })
        .collect()
}

/// Classification across levels `1..=max_level`.
pub fn classify_all(chain: &EquilibriumChain, max_level: usize) -> Result<AgeingClassification> {
    need_level(chain, max_level)?;
    let levels: Vec<usize> = (1..=max_level).collect();
    let per_level = levels
        .par_iter()
        .map(|&s| classify_ageing(chain, s))
        .collect::<Result<Vec<_>>>()?;
    let entries: Vec<AgeingEntry> = per_level.into_iter().flatten().collect();
    let exponential_borderline = entries
        .iter()
        .all(|e| !e.direct.outcome.is_conclusive() && !e.bridge.outcome.is_conclusive());
    Ok(AgeingClassification {
        distribution: chain.base().name().to_string(),
        reference_rate: 1.0 / chain.base().mean(),
        entries,
        exponential_borderline,
    })
}
