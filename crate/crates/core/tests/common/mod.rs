#![allow(dead_code)]

use ageorder::{
    make_exponential, make_gamma, make_uniform, make_weibull, DistributionModel, EquilibriumChain, NumericSettings,
};

/// Nine laws covering increasing, constant and decreasing hazards plus a
/// bounded support.
pub fn corpus() -> Vec<DistributionModel> {
    vec![
        make_exponential(1.0).unwrap(),
        make_exponential(2.0).unwrap(),
        make_weibull(0.5, 1.0).unwrap(),
        make_weibull(2.0, 1.0).unwrap(),
        make_weibull(3.0, 1.0).unwrap(),
        make_weibull(1.5, 2.0).unwrap(),
        make_gamma(2.0, 1.0).unwrap(),
        make_gamma(0.5, 1.0).unwrap(),
        make_uniform(1.0).unwrap(),
    ]
}

pub fn chains(levels: usize) -> Vec<EquilibriumChain> {
    chains_with(levels, NumericSettings::default())
}

pub fn chains_with(levels: usize, settings: NumericSettings) -> Vec<EquilibriumChain> {
    corpus()
        .iter()
        .map(|d| EquilibriumChain::build(d, levels, settings).unwrap())
        .collect()
}

pub fn numeric_settings() -> NumericSettings {
    NumericSettings {
        use_closed_forms: false,
        ..NumericSettings::default()
    }
}

pub fn build(d: &DistributionModel, levels: usize) -> EquilibriumChain {
    EquilibriumChain::build(d, levels, NumericSettings::default()).unwrap()
}

/// Every `step`-th point of the level-`s` window grid.
pub fn sparse_grid(chain: &EquilibriumChain, s: usize, step: usize) -> Vec<f64> {
    chain.x_grid(s).unwrap().into_iter().step_by(step).collect()
}

/// `∫₀^∞ f` by double-exponential quadrature after `x = t/(1−t)`.
pub fn integrate_half_line(f: impl Fn(f64) -> f64) -> f64 {
    quadrature::double_exponential::integrate(
        |t: f64| {
            let w = 1.0 - t;
            f(t / w) / (w * w)
        },
        0.0,
        1.0,
        1e-12,
    )
    .integral
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    quadrature::double_exponential::integrate(f, a, b, 1e-12).integral
}
