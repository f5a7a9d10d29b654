//! The iterated equilibrium ladder `T̄_{X,0..S}` with generalized means,
//! failure rates, mean residual life and monotone inversion.
//!
//! Level 0 is the density and level 1 the base survival. Higher levels come
//! from closed forms when the family has them, otherwise each level is a
//! piecewise cubic Hermite interpolant whose knot values are exact tail
//! integrals of the level below and whose knot slopes are the exact
//! derivatives `−T̄_{s−1}/μ̃_{s−1}`. Beyond the last knot the exact moment
//! identity `T̄_s(x) = E[(X−x)₊^{s−1}] / E[X^{s−1}]` takes over.

use serde::{Deserialize, Serialize};

use crate::distfn::{ClosedLevel, DistributionModel};
use crate::error::{Error, Result};
use crate::interp::{bisect_decreasing, solve_decreasing, HermitePiece};

/// Tolerances and grid sizes shared by every numeric stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericSettings {
    pub quad_abs_tol: f64,
    pub tail_survival_cut: f64,
    pub invert_tol: f64,
    pub grid_points: usize,
    /// Survival levels `(lo, hi)` bounding the evaluation window.
    pub quantile_window: (f64, f64),
    /// Use analytic ladders where the family provides them.
    pub use_closed_forms: bool,
}

impl Default for NumericSettings {
    fn default() -> Self {
        Self {
            quad_abs_tol: 1e-9,
            tail_survival_cut: 1e-12,
            invert_tol: 1e-10,
            grid_points: 512,
            quantile_window: (1e-4, 1.0 - 1e-4),
            use_closed_forms: true,
        }
    }
}

/// Upper bound on window grids; keeps a mistyped `--grid` from exhausting memory.
pub const MAX_GRID_POINTS: usize = 1 << 20;

impl NumericSettings {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} must be positive, got {v}")))
            }
        };
        pos("quad_abs_tol", self.quad_abs_tol)?;
        pos("tail_survival_cut", self.tail_survival_cut)?;
        pos("invert_tol", self.invert_tol)?;
        if !(16..=MAX_GRID_POINTS).contains(&self.grid_points) {
            return Err(Error::Parameter(format!(
                "grid_points must lie in [16, {MAX_GRID_POINTS}], got {}",
                self.grid_points
            )));
        }
        let (lo, hi) = self.quantile_window;
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return Err(Error::Parameter(format!(
                "quantile window ({lo}, {hi}) must satisfy 0 < lo < hi < 1"
            )));
        }
        Ok(())
    }

    /// Refinement target for grid levels: `abs + rel·value`.
    fn refine_tol(&self) -> (f64, f64) {
        (1e-7 * self.quad_abs_tol, 0.1 * self.quad_abs_tol)
    }
}

#[derive(Debug, Clone)]
struct GridLevel {
    pieces: Vec<HermitePiece>,
    /// `∫_{x_j}^∞ T̄` at every knot, including the right end.
    tails: Vec<f64>,
    x_end: f64,
}

impl GridLevel {
    fn knots(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces
            .iter()
            .map(|p| p.x0)
            .chain(std::iter::once(self.x_end))
    }

    fn locate(&self, x: f64) -> usize {
        let j = self.pieces.partition_point(|p| p.x1 <= x);
        j.min(self.pieces.len() - 1)
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Density,
    Base,
    Closed(ClosedLevel),
    Grid(GridLevel),
}

#[derive(Debug, Clone)]
struct Level {
    repr: Repr,
    mean: f64,
}

/// The ladder of one distribution, immutable once built.
#[derive(Debug, Clone)]
pub struct EquilibriumChain {
    base: DistributionModel,
    levels: Vec<Level>,
    /// Raw moments `E[X^k]` for `k = 0..=S`.
    moments: Vec<f64>,
    settings: NumericSettings,
}

/// Builds levels `0..=max_level` of the ladder of `d`.
pub fn build_chain(
    d: &DistributionModel,
    max_level: usize,
    settings: NumericSettings,
) -> Result<EquilibriumChain> {
    EquilibriumChain::build(d, max_level, settings)
}

impl EquilibriumChain {
    pub fn build(d: &DistributionModel, max_level: usize, settings: NumericSettings) -> Result<Self> {
        settings.validate()?;
        if max_level < 1 {
            return Err(Error::Parameter("chain needs at least level 1".into()));
        }
        let mut moments = vec![1.0];
        for k in 1..=max_level {
            let m = d.excess_moment(k, 0.0);
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::numeric(k + 1, format!("moment of order {k} is not finite")));
            }
            moments.push(m);
        }
        let mut chain = Self {
            base: d.clone(),
            levels: vec![
                Level {
                    repr: Repr::Density,
                    mean: 1.0,
                },
                Level {
                    repr: Repr::Base,
                    mean: d.mean(),
                },
            ],
            moments,
            settings,
        };
        let closed = if settings.use_closed_forms {
            d.closed_form_chain()
        } else {
            None
        };
        for s in 2..=max_level {
            let level = match &closed {
                Some(c) => {
                    let l = c.level(s);
                    Level {
                        mean: l.mean(),
                        repr: Repr::Closed(l),
                    }
                }
                None => chain.build_grid_level(s)?,
            };
            if !(level.mean.is_finite() && level.mean > 0.0) {
                return Err(Error::numeric(s, "generalized mean is not finite"));
            }
            chain.levels.push(level);
        }
        Ok(chain)
    }

    pub fn base(&self) -> &DistributionModel {
        &self.base
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn settings(&self) -> &NumericSettings {
        &self.settings
    }

    /// True when levels above 1 come from analytic formulas.
    pub fn is_closed_form(&self) -> bool {
        self.levels.iter().any(|l| matches!(l.repr, Repr::Closed(_)))
    }

    /// Knot count of a gridded level, `None` for analytic levels.
    pub fn knot_count(&self, s: usize) -> Option<usize> {
        match &self.levels.get(s)?.repr {
            Repr::Grid(g) => Some(g.pieces.len() + 1),
            _ => None,
        }
    }

    fn check_level(&self, s: usize, min: usize) -> Result<()> {
        if s > self.max_level() || s < min {
            return Err(Error::Level {
                requested: s,
                max: self.max_level(),
            });
        }
        Ok(())
    }

    /// `μ̃_{X,s}`, with `μ̃_{X,0} = 1`.
    pub fn generalized_mean(&self, s: usize) -> Result<f64> {
        self.check_level(s, 0)?;
        Ok(self.levels[s].mean)
    }

    pub(crate) fn mean_at(&self, s: usize) -> f64 {
        self.levels[s].mean
    }

    /// Exact survival of level `s ≥ 1` via excess moments of the base law.
    fn moment_survival(&self, s: usize, x: f64) -> f64 {
        self.base.excess_moment(s - 1, x) / self.moments[s - 1]
    }

    /// Exact `∫ₓ^∞ T̄_s` via excess moments of the base law.
    fn moment_tail(&self, s: usize, x: f64) -> f64 {
        self.base.excess_moment(s, x) / (s as f64 * self.moments[s - 1])
    }

    /// `T̄_{X,s}(x)`; level 0 is the density.
    pub fn t_bar(&self, s: usize, x: f64) -> Result<f64> {
        self.check_level(s, 0)?;
        if x.is_nan() {
            return Err(Error::Domain("x is NaN".into()));
        }
        Ok(self.tb(s, x))
    }

    pub(crate) fn tb(&self, s: usize, x: f64) -> f64 {
        match &self.levels[s].repr {
            Repr::Density => self.base.density(x),
            _ if x <= 0.0 => 1.0,
            Repr::Base => self.base.survival(x),
            Repr::Closed(c) => c.survival(x),
            Repr::Grid(g) => {
                if x >= g.x_end {
                    if self.base.support().is_bounded() {
                        0.0
                    } else {
                        self.moment_survival(s, x)
                    }
                } else {
                    g.pieces[g.locate(x)].value(x)
                }
            }
        }
    }

    /// Left limit of `T̄_{X,s}` at `x`; differs from the value only for step laws.
    pub(crate) fn tb_left(&self, s: usize, x: f64) -> f64 {
        match self.levels[s].repr {
            Repr::Base => self.base.survival_left(x),
            _ => self.tb(s, x),
        }
    }

    /// Derivative of `T̄_{X,s}` for `s ≥ 1`: `−T̄_{X,s−1}(x)/μ̃_{X,s−1}`.
    pub fn t_bar_derivative(&self, s: usize, x: f64) -> Result<f64> {
        self.check_level(s, 1)?;
        Ok(-self.tb(s - 1, x) / self.levels[s - 1].mean)
    }

    /// `∫ₓ^∞ T̄_{X,s}(t) dt` for `s ≥ 1`.
    pub fn tail_integral(&self, s: usize, x: f64) -> Result<f64> {
        self.check_level(s, 1)?;
        Ok(self.tail(s, x))
    }

    pub(crate) fn tail(&self, s: usize, x: f64) -> f64 {
        let x = x.max(0.0);
        match &self.levels[s].repr {
            Repr::Density => self.base.survival(x),
            Repr::Base => self.base.tail_integral(x),
            Repr::Closed(c) => c.tail_integral(x),
            Repr::Grid(g) => {
                if x >= g.x_end {
                    if self.base.support().is_bounded() {
                        0.0
                    } else {
                        self.moment_tail(s, x)
                    }
                } else {
                    let j = g.locate(x);
                    let p = &g.pieces[j];
                    g.tails[j + 1] + p.integral() - p.integral_from_start(x)
                }
            }
        }
    }

    /// `∫ₐᵇ T̄_{X,s}` for `s ≥ 1`.
    fn integral(&self, s: usize, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match &self.levels[s].repr {
            Repr::Base => self.base.survival_integral(a, b),
            Repr::Grid(g) if b <= g.x_end => {
                let ja = g.locate(a);
                let jb = g.locate(b);
                let pa = &g.pieces[ja];
                if ja == jb {
                    return pa.integral_from_start(b) - pa.integral_from_start(a);
                }
                let pb = &g.pieces[jb];
                let head = pa.integral() - pa.integral_from_start(a);
                let middle = g.tails[ja + 1] - g.tails[jb];
                head + middle + pb.integral_from_start(b)
            }
            _ => self.tail(s, a) - self.tail(s, b),
        }
    }

    /// Generalized inverse `inf{x : T̄_{X,s}(x) ≤ u}` for `s ≥ 1`, `u ∈ (0,1)`.
    pub fn t_bar_inverse(&self, s: usize, u: f64) -> Result<f64> {
        self.check_level(s, 1)?;
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("inverse argument {u} is outside (0, 1)")));
        }
        Ok(self.inv(s, u))
    }

    /// Inverse with `inv(s, 1) = 0` and `inv(s, 0) = support upper`.
    pub(crate) fn inv(&self, s: usize, u: f64) -> f64 {
        if u >= 1.0 {
            return 0.0;
        }
        if u <= 0.0 {
            return self.base.support().upper;
        }
        let mean_below = self.levels[s - 1].mean;
        match &self.levels[s].repr {
            Repr::Density => f64::NAN,
            Repr::Base => self.base.survival_inverse(u),
            Repr::Closed(c) => match c.survival_inverse(u) {
                Some(x) => x,
                None => {
                    let hi = self.bracket_above(s, u, self.base.mean());
                    solve_decreasing(
                        |x| (c.survival(x), -self.tb(s - 1, x) / mean_below),
                        u,
                        0.0,
                        hi,
                        None,
                    )
                }
            },
            Repr::Grid(g) => {
                let end_value = g.pieces.last().map(|p| p.v1).unwrap_or(0.0);
                if u <= end_value {
                    if self.base.support().is_bounded() {
                        return g.x_end;
                    }
                    let hi = self.bracket_above(s, u, g.x_end);
                    return solve_decreasing(
                        |x| (self.tb(s, x), -self.tb(s - 1, x) / mean_below),
                        u,
                        g.x_end,
                        hi,
                        None,
                    );
                }
                // Knot values decrease; first piece whose right value is ≤ u.
                let j = g.pieces.partition_point(|p| p.v1 > u);
                let p = &g.pieces[j.min(g.pieces.len() - 1)];
                let guess = if p.v0 > p.v1 {
                    p.x0 + (p.x1 - p.x0) * (p.v0 - u) / (p.v0 - p.v1)
                } else {
                    p.x0
                };
                let x = solve_decreasing(|x| (p.value(x), p.derivative(x)), u, p.x0, p.x1, Some(guess));
                if (p.value(x) - u).abs() <= self.settings.invert_tol {
                    x
                } else {
                    bisect_decreasing(|x| p.value(x), u, p.x0, p.x1)
                }
            }
        }
    }

    fn bracket_above(&self, s: usize, u: f64, start: f64) -> f64 {
        let mut hi = start.max(1e-300);
        for _ in 0..4000 {
            if self.tb(s, hi) <= u {
                break;
            }
            hi *= 1.5;
        }
        hi
    }

    /// `r_{X,s}(x) = T̄_{X,s−1}(x) / (μ̃_{X,s−1}·T̄_{X,s}(x))` for `s ≥ 1`.
    pub fn failure_rate(&self, s: usize, x: f64) -> Result<f64> {
        self.check_level(s, 1)?;
        let surv = self.in_window_survival(s, x)?;
        Ok(self.tb(s - 1, x) / (self.levels[s - 1].mean * surv))
    }

    /// `μ_{X,s}(x) = ∫ₓ^∞ T̄_{X,s} / T̄_{X,s}(x)` for `s ≥ 1`.
    pub fn mrl(&self, s: usize, x: f64) -> Result<f64> {
        self.check_level(s, 1)?;
        let surv = self.in_window_survival(s, x)?;
        if x <= 0.0 {
            return Ok(self.levels[s].mean);
        }
        Ok(self.tail(s, x) / surv)
    }

    fn in_window_survival(&self, s: usize, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("x = {x} must be nonnegative")));
        }
        let surv = self.tb(s, x);
        if surv <= self.settings.tail_survival_cut {
            return Err(Error::Tail { level: s, x });
        }
        Ok(surv)
    }

    /// The x-range where the level-`s` survival lies inside the quantile window.
    pub fn window(&self, s: usize) -> Result<(f64, f64)> {
        self.check_level(s, 1)?;
        let (lo, hi) = self.settings.quantile_window;
        Ok((self.inv(s, hi), self.inv(s, lo)))
    }

    /// `grid_points` survival levels equispaced over the quantile window, in
    /// increasing order.
    pub fn u_grid(&self) -> Vec<f64> {
        let (lo, hi) = self.settings.quantile_window;
        let n = self.settings.grid_points;
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// `grid_points` abscissae equispaced over the level-`s` window.
    pub fn x_grid(&self, s: usize) -> Result<Vec<f64>> {
        let (a, b) = self.window(s)?;
        let n = self.settings.grid_points;
        Ok((0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect())
    }

    fn build_grid_level(&self, s: usize) -> Result<Level> {
        let below = s - 1;
        let mean_below = self.levels[below].mean;
        let bounded = self.base.support().is_bounded();
        let x_end = if bounded {
            self.base.support().upper
        } else {
            self.tail_end(s)?
        };
        let seeds = self.seed_knots(s, x_end);

        let (abs_tol, rel_tol) = self.settings.refine_tol();
        let piece_integral = |a: f64, b: f64| self.integral(below, a, b) / mean_below;
        let slope_right = |x: f64| -self.tb(below, x) / mean_below;
        let slope_left = |x: f64| -self.tb_left(below, x) / mean_below;

        // Knot values from the right: V_end is exact, V_j = V_{j+1} + ∫ piece.
        let end_value = if bounded {
            0.0
        } else {
            self.tail(below, x_end) / mean_below
        };
        let mut xs = seeds;
        let mut vs = vec![0.0; xs.len()];
        let last = xs.len() - 1;
        vs[last] = end_value;
        for j in (0..last).rev() {
            vs[j] = vs[j + 1] + piece_integral(xs[j], xs[j + 1]);
        }
        if !vs[0].is_finite() {
            return Err(Error::numeric(s, "tail integral diverged"));
        }

        // Adaptive bisection: each candidate piece is accepted when the cubic
        // midpoint value matches the exact value there.
        const MAX_KNOTS: usize = 1 << 18;
        let mut out_x = Vec::with_capacity(xs.len() * 2);
        let mut out_v = Vec::with_capacity(xs.len() * 2);
        out_x.push(xs[0]);
        out_v.push(vs[0]);
        let mut stack: Vec<(f64, f64, f64, f64)> = Vec::new();
        for j in 0..last {
            stack.clear();
            stack.push((xs[j], vs[j], xs[j + 1], vs[j + 1]));
            while let Some((a, va, b, vb)) = stack.pop() {
                let mid = 0.5 * (a + b);
                let piece = HermitePiece {
                    x0: a,
                    x1: b,
                    v0: va,
                    v1: vb,
                    d0: slope_right(a),
                    d1: slope_left(b),
                };
                let exact_mid = vb + piece_integral(mid, b);
                let err = (piece.value(mid) - exact_mid).abs();
                let splittable = mid > a && mid < b && (b - a) > 1e-13 * b.abs().max(1e-300);
                if err > abs_tol + rel_tol * exact_mid && splittable && out_x.len() + stack.len() < MAX_KNOTS {
                    // Right half is pushed first so the left half is emitted first.
                    stack.push((mid, exact_mid, b, vb));
                    stack.push((a, va, mid, exact_mid));
                } else {
                    out_x.push(b);
                    out_v.push(vb);
                }
            }
        }
        xs = out_x;
        vs = out_v;

        let mut pieces = Vec::with_capacity(xs.len() - 1);
        for j in 0..xs.len() - 1 {
            let mut p = HermitePiece {
                x0: xs[j],
                x1: xs[j + 1],
                v0: vs[j],
                v1: vs[j + 1],
                d0: slope_right(xs[j]),
                d1: slope_left(xs[j + 1]),
            };
            p.limit_monotone_decreasing();
            pieces.push(p);
        }
        let mut tails = vec![0.0; xs.len()];
        let n = xs.len() - 1;
        tails[n] = if bounded { 0.0 } else { self.moment_tail(s, x_end) };
        for j in (0..n).rev() {
            tails[j] = tails[j + 1] + pieces[j].integral();
        }
        let mean = tails[0];
        Ok(Level {
            repr: Repr::Grid(GridLevel {
                pieces,
                tails,
                x_end,
            }),
            mean,
        })
    }

    /// First point of a geometric sweep where the level-`s` survival is
    /// negligible against the tail cut.
    fn tail_end(&self, s: usize) -> Result<f64> {
        let target = 1e-4 * self.settings.tail_survival_cut;
        let mut x = match &self.levels[s - 1].repr {
            Repr::Grid(g) => g.x_end,
            _ => self.base.survival_inverse(target),
        }
        .max(self.base.mean());
        for _ in 0..400 {
            let v = self.moment_survival(s, x);
            if !v.is_finite() {
                break;
            }
            if v <= target {
                return Ok(x);
            }
            x *= 1.25;
        }
        Err(Error::numeric(s, "tail of the level does not decay within range"))
    }

    fn seed_knots(&self, s: usize, x_end: f64) -> Vec<f64> {
        let mut seeds = vec![0.0, x_end];
        match &self.levels[s - 1].repr {
            Repr::Grid(g) => {
                seeds.extend(g.knots());
                let mut x = g.x_end;
                while x < x_end {
                    seeds.push(x);
                    x *= 1.25;
                }
            }
            _ => {
                for k in 1..64 {
                    seeds.push(self.base.quantile(k as f64 / 64.0));
                }
                for j in 2..=8 {
                    seeds.push(self.base.quantile(10f64.powi(-j)));
                }
                let mut j = 1;
                loop {
                    let u = 10f64.powi(-j);
                    if u < 1e-4 * self.settings.tail_survival_cut {
                        break;
                    }
                    seeds.push(self.base.survival_inverse(u));
                    j += 1;
                }
                if let Some(sample) = self.base.sample() {
                    seeds.extend_from_slice(sample);
                }
            }
        }
        seeds.retain(|x| x.is_finite() && *x >= 0.0 && *x <= x_end);
        seeds.sort_by(|a, b| a.total_cmp(b));
        seeds.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1e-300));
        seeds
    }
}
