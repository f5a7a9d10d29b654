//! Scaled TTT transform, the R-transform pair and the Lorenz curve of a
//! ladder level, plus the empirical scaled TTT statistic.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::distfn::make_empirical;
use crate::equilibrium::EquilibriumChain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CurveKind {
    #[serde(rename = "TTT")]
    Ttt,
    #[serde(rename = "R_inv")]
    RInv,
    #[serde(rename = "R")]
    R,
    #[serde(rename = "Lorenz")]
    Lorenz,
}

impl CurveKind {
    pub const ALL: [CurveKind; 4] = [CurveKind::Ttt, CurveKind::RInv, CurveKind::R, CurveKind::Lorenz];

    pub fn label(self) -> &'static str {
        match self {
            CurveKind::Ttt => "TTT",
            CurveKind::RInv => "R_inv",
            CurveKind::R => "R",
            CurveKind::Lorenz => "Lorenz",
        }
    }
}

/// A function on `[0, 1]` sampled at increasing knots; linear in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitCurve {
    pub kind: CurveKind,
    pub level: usize,
    pub u_knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl UnitCurve {
    /// Linear interpolation between knots, clamped at the ends.
    pub fn value_at(&self, u: f64) -> f64 {
        let n = self.u_knots.len();
        if n == 0 {
            return f64::NAN;
        }
        if u <= self.u_knots[0] {
            return self.values[0];
        }
        if u >= self.u_knots[n - 1] {
            return self.values[n - 1];
        }
        let j = self.u_knots.partition_point(|k| *k <= u);
        let (u0, u1) = (self.u_knots[j - 1], self.u_knots[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        v0 + (v1 - v0) * (u - u0) / (u1 - u0)
    }

    /// CSV rows in the `u,value,kind,s` schema, without header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.u_knots.iter().zip(&self.values) {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                format_decimal(*u),
                format_decimal(*v),
                self.kind.label(),
                self.level
            );
        }
        out
    }
}

pub const CSV_HEADER: &str = "u,value,kind,s";

/// Writes curves with a single header line.
pub fn write_csv<W: Write>(mut w: W, curves: &[UnitCurve]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for c in curves {
        w.write_all(c.csv_rows().as_bytes())?;
    }
    Ok(())
}

/// Plain decimal with 15 significant digits.
pub fn format_decimal(v: f64) -> String {
    if !v.is_finite() {
        return "nan".into();
    }
    if v == 0.0 {
        return format!("{:.14}", 0.0);
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (14 - magnitude).clamp(0, 340) as usize;
    format!("{v:.decimals$}")
}

fn check_levels(chain: &EquilibriumChain, s: usize) -> Result<()> {
    if s < 1 || s + 1 > chain.max_level() {
        return Err(Error::Level {
            requested: s + 1,
            max: chain.max_level(),
        });
    }
    Ok(())
}

fn check_unit(u: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("curve argument {u} is outside [0, 1]")));
    }
    Ok(())
}

/// Scaled TTT transform `H⁻¹_{X,s}(u) = T_{X,s+1}(T⁻¹_{X,s}(u))`.
pub fn ttt(chain: &EquilibriumChain, s: usize, u: f64) -> Result<f64> {
    check_levels(chain, s)?;
    check_unit(u)?;
    Ok(1.0 - r_inv_raw(chain, s, 1.0 - u))
}

/// Functional inverse `H_{X,s}` of the scaled TTT transform.
pub fn ttt_inverse(chain: &EquilibriumChain, s: usize, u: f64) -> Result<f64> {
    check_levels(chain, s)?;
    check_unit(u)?;
    Ok(1.0 - r_raw(chain, s, 1.0 - u))
}

/// `R⁻¹_{X,s}(u) = T̄_{X,s+1}(T̄⁻¹_{X,s}(u))`.
pub fn r_transform_inv(chain: &EquilibriumChain, s: usize, u: f64) -> Result<f64> {
    check_levels(chain, s)?;
    check_unit(u)?;
    Ok(r_inv_raw(chain, s, u))
}

/// `R_{X,s}(u) = T̄_{X,s}(T̄⁻¹_{X,s+1}(u))`.
pub fn r_transform(chain: &EquilibriumChain, s: usize, u: f64) -> Result<f64> {
    check_levels(chain, s)?;
    check_unit(u)?;
    Ok(r_raw(chain, s, u))
}

fn r_inv_raw(chain: &EquilibriumChain, s: usize, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    chain.tb(s + 1, chain.inv(s, u))
}

fn r_raw(chain: &EquilibriumChain, s: usize, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    chain.tb(s, chain.inv(s + 1, u))
}

/// Lorenz curve `L_{X,s}(u)`, the normalized partial integral of the
/// level-`s` quantile.
///
/// Uses `∫ᵤ¹ Q = q·(1−u) + ∫_q^∞ T̄_{X,s}` with `q = Q(u)`, which needs no
/// quantile evaluation near `u = 1`.
pub fn lorenz(chain: &EquilibriumChain, s: usize, u: f64) -> Result<f64> {
    if s < 1 || s > chain.max_level() {
        return Err(Error::Level {
            requested: s,
            max: chain.max_level(),
        });
    }
    check_unit(u)?;
    Ok(lorenz_raw(chain, s, u))
}

pub(crate) fn lorenz_raw(chain: &EquilibriumChain, s: usize, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let q = chain.inv(s, 1.0 - u);
    let upper = q * (1.0 - u) + chain.tail(s, q);
    (1.0 - upper / chain.mean_at(s)).max(0.0)
}

/// Samples one curve on the chain's u-grid with the exact endpoints added.
pub fn curve(chain: &EquilibriumChain, kind: CurveKind, s: usize) -> Result<UnitCurve> {
    match kind {
        CurveKind::Lorenz => lorenz(chain, s, 0.5)?,
        _ => ttt(chain, s, 0.5)?,
    };
    let mut u_knots = vec![0.0];
    u_knots.extend(chain.u_grid());
    u_knots.push(1.0);
    let values = u_knots
        .iter()
        .map(|&u| match kind {
            CurveKind::Ttt => 1.0 - r_inv_raw(chain, s, 1.0 - u),
            CurveKind::RInv => r_inv_raw(chain, s, u),
            CurveKind::R => r_raw(chain, s, u),
            CurveKind::Lorenz => lorenz_raw(chain, s, u),
        })
        .collect();
    Ok(UnitCurve {
        kind,
        level: s,
        u_knots,
        values,
    })
}

/// Scaled TTT statistic of a sample at `u = i/n`, `i = 0..n`.
pub fn empirical_ttt(sample: &[f64]) -> Result<UnitCurve> {
    let d = make_empirical(sample)?;
    let sorted = d.sample().expect("empirical law keeps its sample");
    let n = sorted.len();
    let total: f64 = sorted.iter().sum();
    let mut u_knots = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    u_knots.push(0.0);
    values.push(0.0);
    let mut partial = 0.0;
    for (k, x) in sorted.iter().enumerate() {
        let i = k + 1;
        partial += x;
        u_knots.push(i as f64 / n as f64);
        values.push(if i == n {
            1.0
        } else {
            (partial + (n - i) as f64 * x) / total
        });
    }
    Ok(UnitCurve {
        kind: CurveKind::Ttt,
        level: 1,
        u_knots,
        values,
    })
}
