//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ageorder::orderings::classify_ageing_with_rate;
use ageorder::shapes::{
    is_concave, is_convex, is_star_shaped, is_antistar_shaped, is_subadditive, is_superadditive, CONVEXITY_TOL,
    DEFAULT_PAIR_BUDGET, MONOTONE_TOL, SUPERADDITIVE_TOL,
};
use ageorder::{
    alpha_map, classify_all, lorenz, make_exponential, make_gamma, make_uniform, ordering_report,
    r_transform_inv, ttt, EquilibriumChain, OrderingReport, Outcome, Relation, ShapeVerdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{build, chains, corpus, numeric_settings, sparse_grid};

type Check = std::result::Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(elapsed: Duration, limit: f64) -> std::result::Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, || {
        format!("runtime {:.2}s exceeds {limit}s", elapsed.as_secs_f64())
    })
}

fn c1_exponential_fixed_point() -> Check {
    let start = Instant::now();
    let (mut grid_err, mut mean_err) = (0.0f64, 0.0f64);
    for lambda in [0.5, 1.0, 2.0] {
        let chain = EquilibriumChain::build(&make_exponential(lambda).unwrap(), 5, numeric_settings()).unwrap();
        ensure(!chain.is_closed_form(), || "numeric path not taken".into())?;
        for s in 1..=5 {
            for x in chain.x_grid(s).unwrap() {
                grid_err = grid_err.max((chain.t_bar(s, x).unwrap() - (-lambda * x).exp()).abs());
            }
            mean_err = mean_err.max((chain.generalized_mean(s).unwrap() - 1.0 / lambda).abs());
        }
    }
    ensure(grid_err <= 1e-6, || format!("sup grid error {grid_err:.3e}"))?;
    ensure(mean_err <= 1e-6, || format!("mean error {mean_err:.3e}"))?;
    within_budget(start.elapsed(), 5.0)?;
    Ok(format!("sup error {grid_err:.2e}, mean error {mean_err:.2e}, {:.2?}", start.elapsed()))
}

fn c2_ladder_oracles() -> Check {
    let start = Instant::now();
    let uniform = EquilibriumChain::build(&make_uniform(1.0).unwrap(), 4, numeric_settings()).unwrap();
    let (mut err, mut mean_err) = (0.0f64, 0.0f64);
    for s in 1..=4 {
        for x in uniform.x_grid(s).unwrap() {
            err = err.max((uniform.t_bar(s, x).unwrap() - (1.0 - x).powi(s as i32)).abs());
        }
        mean_err = mean_err.max((uniform.generalized_mean(s).unwrap() - 1.0 / (s as f64 + 1.0)).abs());
    }
    let gamma = EquilibriumChain::build(&make_gamma(2.0, 1.0).unwrap(), 2, numeric_settings()).unwrap();
    let mut gamma_err = 0.0f64;
    for x in gamma.x_grid(2).unwrap() {
        gamma_err = gamma_err.max((gamma.t_bar(2, x).unwrap() - (2.0 + x) * (-x).exp() / 2.0).abs());
    }
    ensure(err <= 1e-6 && mean_err <= 1e-6, || format!("uniform error {err:.3e}, mean {mean_err:.3e}"))?;
    ensure(gamma_err <= 1e-6, || format!("gamma level-2 error {gamma_err:.3e}"))?;
    within_budget(start.elapsed(), 5.0)?;
    Ok(format!(
        "uniform {err:.2e}, means {mean_err:.2e}, gamma {gamma_err:.2e}, {:.2?}",
        start.elapsed()
    ))
}

fn c3_reciprocal_identity() -> Check {
    let mut worst = 0.0f64;
    for chain in chains(4) {
        for s in 2..=4 {
            for x in chain.x_grid(s).unwrap() {
                let r = chain.failure_rate(s, x).unwrap();
                let m = chain.mrl(s - 1, x).unwrap();
                worst = worst.max((r * m - 1.0).abs());
            }
        }
    }
    ensure(worst <= 1e-5, || format!("worst |r·μ − 1| = {worst:.3e}"))?;
    Ok(format!("worst |r·μ − 1| = {worst:.2e}"))
}

fn c4_transform_identities() -> Check {
    let us: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
    let mut gap = 0.0f64;
    for chain in chains(4) {
        for s in 1..=3 {
            for &u in &us {
                let r_inv = r_transform_inv(&chain, s, u).unwrap();
                // TTT built from level-(s+1) and level-s distribution functions.
                let q = chain.t_bar_inverse(s, u).unwrap();
                let h_inv = 1.0 - chain.t_bar(s + 1, q).unwrap();
                gap = gap.max((r_inv - (1.0 - h_inv)).abs());
                gap = gap.max((r_inv - (1.0 - ttt(&chain, s, 1.0 - u).unwrap())).abs());
            }
        }
    }
    ensure(gap <= 1e-8, || format!("R⁻¹/TTT reflection gap {gap:.3e}"))?;

    let uniform = build(&make_uniform(1.0).unwrap(), 2);
    let mut uniform_gap = 0.0f64;
    for &u in &us {
        uniform_gap = uniform_gap.max((r_transform_inv(&uniform, 1, u).unwrap() - u * u).abs());
    }
    ensure(uniform_gap <= 1e-8, || format!("uniform R⁻¹ oracle gap {uniform_gap:.3e}"))?;

    let mut diag = 0.0f64;
    for lambda in [0.5, 1.0, 2.0] {
        for closed in [true, false] {
            let settings = ageorder::NumericSettings {
                use_closed_forms: closed,
                ..Default::default()
            };
            let chain = EquilibriumChain::build(&make_exponential(lambda).unwrap(), 4, settings).unwrap();
            for s in 1..=3 {
                for &u in &us {
                    diag = diag.max((ttt(&chain, s, u).unwrap() - u).abs());
                }
            }
        }
    }
    ensure(diag <= 1e-6, || format!("exponential TTT off diagonal by {diag:.3e}"))?;

    let lu = lorenz(&uniform, 1, 0.5).unwrap();
    ensure((lu - 0.25).abs() <= 1e-8, || format!("uniform L(0.5) = {lu}"))?;
    let le = lorenz(&build(&make_exponential(1.0).unwrap(), 1), 1, 0.5).unwrap();
    ensure((le - 0.153426).abs() <= 1e-5, || format!("exponential L(0.5) = {le}"))?;
    Ok(format!("gap {gap:.2e}, diagonal {diag:.2e}, L_unif(0.5) {lu:.8}, L_exp(0.5) {le:.6}"))
}

struct Matrix {
    reports: Vec<OrderingReport>,
    elapsed: Duration,
}

fn corpus_matrix() -> Matrix {
    let start = Instant::now();
    let cs = chains(4);
    let mut reports = Vec::new();
    for x in &cs {
        for y in &cs {
            reports.push(ordering_report(x, y, 3).unwrap());
        }
    }
    Matrix {
        reports,
        elapsed: start.elapsed(),
    }
}

fn c5_ordering_oracles(matrix: &Matrix) -> Check {
    let start = Instant::now();
    let weibull2 = build(&ageorder::make_weibull(2.0, 1.0).unwrap(), 4);
    let weibull_half = build(&ageorder::make_weibull(0.5, 1.0).unwrap(), 4);
    let exp1 = build(&make_exponential(1.0).unwrap(), 4);
    let exp2 = build(&make_exponential(2.0).unwrap(), 4);

    let forward = ordering_report(&weibull2, &exp1, 3).unwrap();
    for v in &forward.matrix {
        ensure(v.outcome == Outcome::Holds, || {
            format!("Weibull(2,1) vs Exp(1): {} at s={} is {:?}", v.relation.label(), v.level, v.outcome)
        })?;
    }
    let swapped = ordering_report(&exp1, &weibull2, 1).unwrap();
    for rel in [Relation::Ifr, Relation::Ifra, Relation::Nbu] {
        let o = swapped.verdict(rel, 1).unwrap().outcome;
        ensure(o == Outcome::Fails, || format!("Exp(1) vs Weibull(2,1): {} is {o:?}", rel.label()))?;
    }
    let dfr = ordering_report(&weibull_half, &exp1, 1).unwrap();
    for v in &dfr.matrix {
        ensure(v.outcome == Outcome::Fails, || {
            format!("Weibull(0.5,1) vs Exp(1): {} is {:?}", v.relation.label(), v.outcome)
        })?;
    }
    for (a, b, theta) in [(&exp1, &exp2, 0.5), (&exp2, &exp1, 2.0)] {
        let r = ordering_report(a, b, 3).unwrap();
        for v in &r.matrix {
            ensure(v.outcome == Outcome::Inconclusive, || {
                format!("exponential pair: {} at s={} is {:?}", v.relation.label(), v.level, v.outcome)
            })?;
        }
        let got = r.equivalence.ok_or_else(|| "scale equivalence not detected".to_string())?;
        ensure((got - theta).abs() <= 1e-6, || format!("θ = {got}, expected {theta}"))?;
    }
    within_budget(matrix.elapsed, 60.0)?;
    Ok(format!(
        "oracles {:.2?}, full 9×9 matrix s=1..3 {:.2?}",
        start.elapsed(),
        matrix.elapsed
    ))
}

fn c6_form_agreement(matrix: &Matrix) -> Check {
    let (mut compared, mut disagreements) = (0usize, Vec::new());
    for r in &matrix.reports {
        for v in r.matrix.iter().filter(|v| v.level >= 2) {
            if v.outcome.is_conclusive() {
                compared += v.secondary_forms.iter().filter(|f| f.verdict.outcome.is_conclusive()).count();
            }
            for f in v.disagreements() {
                disagreements.push(format!("{} vs {}: {} s={} form {}", r.x, r.y, v.relation.label(), v.level, f.name));
            }
        }
    }
    ensure(disagreements.is_empty(), || {
        format!("{} disagreement(s), first: {}", disagreements.len(), disagreements[0])
    })?;
    ensure(compared > 0, || "no conclusive pairs were compared".into())?;
    Ok(format!("{compared} conclusive (primary, secondary) pairs, 0 disagreements"))
}

fn c7_implication_chain(matrix: &Matrix) -> Check {
    let violations: Vec<String> = matrix
        .reports
        .iter()
        .flat_map(|r| {
            r.chain_consistency.iter().map(move |c| {
                format!("{} vs {} s={}: {} without {}", r.x, r.y, c.level, c.stronger.label(), c.weaker.label())
            })
        })
        .collect();
    ensure(violations.is_empty(), || format!("{} violation(s), first: {}", violations.len(), violations[0]))?;
    let holds = matrix
        .reports
        .iter()
        .flat_map(|r| &r.matrix)
        .filter(|v| v.outcome == Outcome::Holds)
        .count();
    Ok(format!("{} reports, {holds} holding verdicts, 0 violations", matrix.reports.len()))
}

/// Increasing convex cubic with `f(0) = 0`.
fn convex_poly(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [rng.gen_range(0.1..1.0), rng.gen_range(0.05..1.0), rng.gen_range(0.0..0.5)]
}

fn eval_poly(c: &[f64; 3], x: f64) -> f64 {
    x * (c[0] + x * (c[1] + x * c[2]))
}

/// `x·(a + b·tanh(c·x))`: increasing and star-shaped, convex only for some draws.
fn star_fn(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [rng.gen_range(0.2..1.0), rng.gen_range(0.1..1.0), rng.gen_range(0.5..3.0)]
}

fn eval_star(p: &[f64; 3], x: f64) -> f64 {
    x * (p[0] + p[1] * (p[2] * x).tanh())
}

/// Inverse of an increasing function with `f(0) = 0` by bisection.
fn invert(f: impl Fn(f64) -> f64, y: f64) -> f64 {
    let mut hi = 1.0;
    while f(hi) < y {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

struct ClosureTally {
    name: &'static str,
    holds: usize,
    contradictions: usize,
}

fn tally(name: &'static str, verdicts: impl Iterator<Item = ShapeVerdict>) -> ClosureTally {
    let mut t = ClosureTally {
        name,
        holds: 0,
        contradictions: 0,
    };
    for v in verdicts {
        match v.outcome {
            Outcome::Holds => t.holds += 1,
            Outcome::Fails => t.contradictions += 1,
            Outcome::Inconclusive => {}
        }
    }
    t
}

const DRAWS: usize = 200;

fn c8_shape_closure() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let xs = linspace(0.01, 2.0, 400);
    let mut tallies = Vec::new();

    let mut draws = |gen: fn(&mut ChaCha8Rng) -> [f64; 3]| -> Vec<([f64; 3], [f64; 3])> {
        (0..DRAWS).map(|_| (gen(&mut rng), gen(&mut rng))).collect()
    };
    let convex_pairs = draws(convex_poly);
    let star_pairs = draws(star_fn);

    tallies.push(tally(
        "convex∘convex convex",
        convex_pairs.iter().map(|(f, g)| {
            let ys: Vec<f64> = xs.iter().map(|&x| eval_poly(f, eval_poly(g, x))).collect();
            is_convex(&xs, &ys, CONVEXITY_TOL).unwrap()
        }),
    ));
    tallies.push(tally(
        "convex inverse concave",
        convex_pairs.iter().map(|(f, _)| {
            let ys = linspace(eval_poly(f, 0.01), eval_poly(f, 2.0), 400);
            let inv: Vec<f64> = ys.iter().map(|&y| invert(|x| eval_poly(f, x), y)).collect();
            is_concave(&ys, &inv, CONVEXITY_TOL).unwrap()
        }),
    ));
    tallies.push(tally(
        "star∘star star-shaped",
        star_pairs.iter().map(|(f, g)| {
            let ys: Vec<f64> = xs.iter().map(|&x| eval_star(f, eval_star(g, x))).collect();
            is_star_shaped(&xs, &ys, MONOTONE_TOL).unwrap()
        }),
    ));
    tallies.push(tally(
        "star inverse antistar",
        star_pairs.iter().map(|(f, _)| {
            let ys = linspace(eval_star(f, 0.01), eval_star(f, 2.0), 400);
            let inv: Vec<f64> = ys.iter().map(|&y| invert(|x| eval_star(f, x), y)).collect();
            is_antistar_shaped(&ys, &inv, MONOTONE_TOL).unwrap()
        }),
    ));
    // Super-additive draws mix convex polynomials and star-shaped functions.
    let superadditive = |i: usize, p: &[f64; 3], x: f64| if i.is_multiple_of(2) { eval_poly(p, x) } else { eval_star(p, x) };
    tallies.push(tally(
        "superadditive∘superadditive",
        convex_pairs.iter().zip(&star_pairs).enumerate().map(|(i, ((f, _), (_, g)))| {
            let h = |x: f64| superadditive(i, f, eval_star(g, x));
            is_superadditive(h, 0.01, 2.0, DEFAULT_PAIR_BUDGET, SUPERADDITIVE_TOL).unwrap()
        }),
    ));
    tallies.push(tally(
        "superadditive inverse subadditive",
        convex_pairs.iter().zip(&star_pairs).enumerate().map(|(i, ((f, _), (g, _)))| {
            let p = if i % 2 == 0 { f } else { g };
            let top = superadditive(i, p, 2.0);
            let inv = |y: f64| invert(|x| superadditive(i, p, x), y);
            is_subadditive(inv, 0.01 * top, top, DEFAULT_PAIR_BUDGET, SUPERADDITIVE_TOL).unwrap()
        }),
    ));

    let bad: Vec<&ClosureTally> = tallies.iter().filter(|t| t.contradictions > 0 || t.holds == 0).collect();
    ensure(bad.is_empty(), || {
        bad.iter()
            .map(|t| format!("{}: {} contradictions, {} holds", t.name, t.contradictions, t.holds))
            .collect::<Vec<_>>()
            .join("; ")
    })?;

    // Convex ⇒ star-shaped ⇒ super-additive on a mixed family with f(0) = 0.
    let (mut convex_n, mut star_n, mut ladder_breaks) = (0, 0, Vec::new());
    let xs = linspace(0.01, 3.0, 400);
    for i in 0..DRAWS {
        let a = rng.gen_range(0.1..1.0);
        let b = rng.gen_range(-0.5..1.0);
        let c = if rng.gen_bool(0.3) { rng.gen_range(0.0..0.5) } else { 0.0 };
        let (d, w) = if rng.gen_bool(0.3) {
            (rng.gen_range(0.0..0.3), rng.gen_range(1.0..6.0))
        } else {
            (0.0, 1.0)
        };
        let f = move |x: f64| a * x + b * x * x + c * x.sqrt() + d * x * (w * x).sin();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        // The implication needs convexity on an interval containing the origin.
        let xs0: Vec<f64> = std::iter::once(0.0).chain(xs.iter().copied()).collect();
        let ys0: Vec<f64> = std::iter::once(0.0).chain(ys.iter().copied()).collect();
        let convex = is_convex(&xs0, &ys0, CONVEXITY_TOL).unwrap().outcome;
        let star = is_star_shaped(&xs, &ys, MONOTONE_TOL).unwrap().outcome;
        let sup = is_superadditive(f, 0.01, 3.0, DEFAULT_PAIR_BUDGET, SUPERADDITIVE_TOL)
            .unwrap()
            .outcome;
        if convex == Outcome::Holds {
            convex_n += 1;
            if star == Outcome::Fails {
                ladder_breaks.push(format!("draw {i}: convex but not star-shaped"));
            }
        }
        if star == Outcome::Holds {
            star_n += 1;
            if sup == Outcome::Fails {
                ladder_breaks.push(format!("draw {i}: star-shaped but not super-additive"));
            }
        }
    }
    ensure(ladder_breaks.is_empty(), || ladder_breaks.join("; "))?;
    ensure(convex_n > 0 && star_n > convex_n, || format!("degenerate ladder sample: {convex_n} convex, {star_n} star"))?;
    let summary = tallies
        .iter()
        .map(|t| format!("{} {}/{DRAWS}", t.name, t.holds))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(format!("{summary}; ladder {convex_n} convex, {star_n} star, 0 breaks"))
}

fn c9_bridge() -> Check {
    let (mut entries, mut rate_checks) = (0usize, 0usize);
    for chain in chains(4) {
        let c = classify_all(&chain, 3).unwrap();
        for e in &c.entries {
            entries += 1;
            ensure(e.agreement, || {
                format!(
                    "{}: {} s={} direct {:?} vs bridge {:?}",
                    c.distribution,
                    e.relation.label(),
                    e.level,
                    e.direct.outcome,
                    e.bridge.outcome
                )
            })?;
        }
        let mean = chain.base().mean();
        for s in 1..=3 {
            let reference = classify_ageing_with_rate(&chain, s, 1.0 / mean).unwrap();
            for k in [0.5, 2.0] {
                let other = classify_ageing_with_rate(&chain, s, k / mean).unwrap();
                for (a, b) in reference.iter().zip(&other) {
                    rate_checks += 1;
                    ensure(a.bridge.outcome == b.bridge.outcome && a.direct.outcome == b.direct.outcome, || {
                        format!(
                            "{}: {} s={} changes with reference rate {k}/mean",
                            c.distribution,
                            a.relation.label(),
                            s
                        )
                    })?;
                }
            }
        }
    }
    let gamma = classify_all(&build(&make_gamma(2.0, 1.0).unwrap(), 4), 3).unwrap();
    for name in ["IFR", "DMRL", "NBUE", "HNBUE"] {
        let e = gamma
            .entries
            .iter()
            .find(|e| e.classical_name.as_deref() == Some(name))
            .ok_or_else(|| format!("no {name} row"))?;
        ensure(e.direct.outcome == Outcome::Holds && e.bridge.outcome == Outcome::Holds, || {
            format!("Gamma(2,1) {name}: direct {:?}, bridge {:?}", e.direct.outcome, e.bridge.outcome)
        })?;
    }
    Ok(format!("{entries} entries agree, {rate_checks} rate-invariance checks, Gamma(2,1) name rows hold"))
}

fn c10_alpha_derivative() -> Check {
    let cs = chains(4);
    let (mut worst, mut points, mut at) = (0.0f64, 0usize, String::new());
    for x_chain in &cs {
        for y_chain in &cs {
            for s in 1..=3 {
                let am = alpha_map(x_chain, y_chain, s).unwrap();
                for x in sparse_grid(x_chain, s, 8) {
                    let r = x_chain.failure_rate(s, x).unwrap();
                    let h = (1e-3 * x).min(1e-4 / r);
                    let fd = (am.eval(x + h) - am.eval(x - h)) / (2.0 * h);
                    let an = am.deriv(x);
                    let rel = (fd - an).abs() / an.abs();
                    points += 1;
                    if rel > worst || rel.is_nan() {
                        worst = rel;
                        at = format!("{} vs {} s={s} x={x:.4e}", x_chain.base(), y_chain.base());
                    }
                }
            }
        }
    }
    ensure(worst <= 1e-4, || format!("worst relative error {worst:.3e} at {at}"))?;
    Ok(format!("{points} points, worst relative error {worst:.2e}"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let matrix = corpus_matrix();
    let criteria: Vec<Criterion> = vec![
        ("exponential fixed point", Box::new(c1_exponential_fixed_point)),
        ("closed-form ladder oracles", Box::new(c2_ladder_oracles)),
        ("reciprocal identity", Box::new(c3_reciprocal_identity)),
        ("transform identities", Box::new(c4_transform_identities)),
        ("ordering oracles", Box::new(|| c5_ordering_oracles(&matrix))),
        ("form agreement", Box::new(|| c6_form_agreement(&matrix))),
        ("implication chain", Box::new(|| c7_implication_chain(&matrix))),
        ("shape closure suite", Box::new(c8_shape_closure)),
        ("bridge classification", Box::new(c9_bridge)),
        ("alpha derivative consistency", Box::new(c10_alpha_derivative)),
    ];
    let corpus_size = corpus().len();
    println!("acceptance: {corpus_size}-law corpus, {} criteria", criteria.len());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {:>2}  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed, {:.2?}",
        criteria.len() - failed,
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
