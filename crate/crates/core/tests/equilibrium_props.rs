mod common;

use ageorder::{make_exponential, make_gamma, make_weibull, DistributionModel, EquilibriumChain, NumericSettings};
use proptest::prelude::*;

use common::{chains, sparse_grid};

fn smooth_family() -> impl Strategy<Value = DistributionModel> {
    prop_oneof![
        (0.5f64..4.0, 0.2f64..5.0).prop_map(|(k, l)| make_weibull(k, l).unwrap()),
        (0.5f64..6.0, 0.2f64..5.0).prop_map(|(a, b)| make_gamma(a, b).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scale_equivariance(d in smooth_family(), theta in 0.2f64..5.0) {
        let settings = NumericSettings::default();
        let x_chain = EquilibriumChain::build(&d, 3, settings).unwrap();
        let y_chain = EquilibriumChain::build(&d.scaled(theta).unwrap(), 3, settings).unwrap();
        for s in 1..=3 {
            let mx = x_chain.generalized_mean(s).unwrap();
            let my = y_chain.generalized_mean(s).unwrap();
            prop_assert!((my - theta * mx).abs() <= 1e-6 * my);
            for x in sparse_grid(&x_chain, s, 4) {
                let tx = x_chain.t_bar(s, x).unwrap();
                let ty = y_chain.t_bar(s, theta * x).unwrap();
                prop_assert!((tx - ty).abs() <= 1e-6, "{d} θ={theta} s={s} x={x}: {tx} vs {ty}");
                let rx = x_chain.failure_rate(s, x).unwrap();
                let ry = y_chain.failure_rate(s, theta * x).unwrap();
                prop_assert!((rx - theta * ry).abs() <= 1e-5 * rx, "{d} θ={theta} s={s} x={x}: {rx} vs θ·{ry}");
            }
        }
    }

    #[test]
    fn exponential_is_a_fixed_point(rate in 0.1f64..10.0) {
        let settings = NumericSettings { use_closed_forms: false, ..Default::default() };
        let chain = EquilibriumChain::build(&make_exponential(rate).unwrap(), 5, settings).unwrap();
        for s in 1..=5 {
            for x in sparse_grid(&chain, s, 8) {
                prop_assert!((chain.t_bar(s, x).unwrap() - (-rate * x).exp()).abs() <= 1e-6);
                prop_assert!((chain.failure_rate(s, x).unwrap() - rate).abs() <= 1e-5 * rate);
            }
        }
    }
}

#[test]
fn residual_life_at_origin_is_the_generalized_mean() {
    for chain in chains(4) {
        for s in 1..=4 {
            let m = chain.generalized_mean(s).unwrap();
            let at_zero = chain.mrl(s, 0.0).unwrap();
            assert!((at_zero - m).abs() <= 1e-6 * m, "{} s={s}: {at_zero} vs {m}", chain.base());
        }
    }
}

#[test]
fn reciprocal_identity_over_the_corpus() {
    for chain in chains(4) {
        for s in 2..=4 {
            for x in chain.x_grid(s).unwrap() {
                let product = chain.failure_rate(s, x).unwrap() * chain.mrl(s - 1, x).unwrap();
                assert!((product - 1.0).abs() <= 1e-5, "{} s={s} x={x}: {product}", chain.base());
            }
        }
    }
}

#[test]
fn ladder_levels_are_survivals() {
    for chain in chains(4) {
        for s in 1..=4 {
            let xs = chain.x_grid(s).unwrap();
            let values: Vec<f64> = xs.iter().map(|&x| chain.t_bar(s, x).unwrap()).collect();
            assert!(values.windows(2).all(|w| w[1] <= w[0]), "{} s={s} not monotone", chain.base());
            assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
            let (lo, hi) = chain.window(s).unwrap();
            assert!(lo < hi);
        }
    }
}
