mod common;

use ageorder::{
    make_exponential, make_gamma, make_uniform, make_weibull, DistributionModel, EquilibriumChain, NumericSettings,
};
use proptest::prelude::*;

use common::{integrate, integrate_half_line};

fn family() -> impl Strategy<Value = DistributionModel> {
    prop_oneof![
        (0.1f64..10.0).prop_map(|r| make_exponential(r).unwrap()),
        (0.3f64..5.0, 0.1f64..10.0).prop_map(|(k, l)| make_weibull(k, l).unwrap()),
        (0.3f64..8.0, 0.1f64..10.0).prop_map(|(a, b)| make_gamma(a, b).unwrap()),
        (0.1f64..10.0).prop_map(|u| make_uniform(u).unwrap()),
    ]
}

fn survival_integral(d: &DistributionModel) -> f64 {
    match d.support().upper {
        u if u.is_finite() => integrate(|x| d.survival(x), 0.0, u),
        _ => integrate_half_line(|x| d.survival(x)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn survival_is_a_proper_tail(d in family()) {
        prop_assert_eq!(d.survival(0.0), 1.0);
        let top = d.quantile(0.9999);
        let mut prev = 1.0;
        for i in 0..512 {
            let v = d.survival(top * i as f64 / 511.0);
            prop_assert!((0.0..=prev).contains(&v), "{d}: survival rose to {v}");
            prev = v;
        }
        let area = survival_integral(&d);
        prop_assert!((area - d.mean()).abs() <= 1e-6 * d.mean(), "{d}: ∫F̄ = {area}, mean {}", d.mean());
    }

    #[test]
    fn quantile_round_trip(d in family()) {
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let back = 1.0 - d.survival(d.quantile(u));
            prop_assert!((back - u).abs() <= 1e-8, "{d}: F(Q({u})) = {back}");
        }
    }
}

fn closed_family() -> impl Strategy<Value = DistributionModel> {
    prop_oneof![
        (0.2f64..5.0).prop_map(|r| make_exponential(r).unwrap()),
        (0.2f64..5.0).prop_map(|u| make_uniform(u).unwrap()),
        (1u32..7, 0.2f64..5.0).prop_map(|(k, b)| make_gamma(k as f64, b).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_forms_match_numeric_ladder(d in closed_family()) {
        prop_assert!(d.closed_form_chain().is_some());
        let closed = EquilibriumChain::build(&d, 4, NumericSettings::default()).unwrap();
        let numeric = EquilibriumChain::build(&d, 4, NumericSettings { use_closed_forms: false, ..Default::default() }).unwrap();
        prop_assert!(closed.is_closed_form() && !numeric.is_closed_form());
        for s in 1..=4 {
            for x in closed.x_grid(s).unwrap() {
                let gap = (closed.t_bar(s, x).unwrap() - numeric.t_bar(s, x).unwrap()).abs();
                prop_assert!(gap <= 1e-6, "{d} s={s} x={x}: gap {gap:e}");
            }
        }
    }
}

#[test]
fn gamma_shapes_beyond_integers_have_no_closed_chain() {
    assert!(make_gamma(2.5, 1.0).unwrap().closed_form_chain().is_none());
    assert!(make_weibull(2.0, 1.0).unwrap().closed_form_chain().is_none());
    assert!(make_weibull(1.0, 2.0).unwrap().closed_form_chain().is_some());
}
