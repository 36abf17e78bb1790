use super::*;
use crate::monoid::{cauchy_series_check, is_null_trace, Decision, RealNonneg, TestLadder};
use crate::spaces::{dyadic_rungs, RealDistance, RealLine};

fn line() -> RealLine<f64> {
    RealLine::new(RealDistance::Abs)
}

fn fine_line() -> RealLine<f64> {
    RealLine::new(RealDistance::Abs).with_ladder(dyadic_rungs(21)).unwrap()
}

fn opts(budget: usize) -> IterateOptions {
    IterateOptions::with_budget(budget)
}

fn halve() -> MapSpec<f64> {
    MapSpec::new("x/2", |x: &f64| x / 2.0).with_order(|a: &f64, b: &f64| a <= b)
}

fn mk_data() -> MeirKeelerData<f64, f64> {
    MeirKeelerData::new(|e: &f64| e / 2.0, |a: &f64, b: &f64| a + b)
}

/// Dyadic pairs at every scale the ladder uses.
fn pairs() -> Vec<(f64, f64)> {
    let mut v = Vec::new();
    for k in -16i32..=16 {
        let x = k as f64 / 4.0;
        for j in 0..8 {
            v.push((x, x + 1.5f64.powi(j) / 64.0));
        }
    }
    v
}

#[test]
fn picard_affine_orbit_matches_closed_form() {
    let f = MapSpec::new("x/2+1", |x: &f64| x / 2.0 + 1.0);
    let t = picard_iterate(&line(), &f, 0.0, &opts(40)).unwrap();
    for (n, x) in t.points.iter().enumerate() {
        assert_eq!(*x, 2.0 * (1.0 - 0.5f64.powi(n as i32)));
    }
    assert_eq!(t.stop, StopReason::Window);
    assert_eq!(t.consec.len(), t.points.len() - 1);
}

#[test]
fn picard_identity_and_translation() {
    let id = MapSpec::new("id", |x: &f64| *x);
    let t = picard_iterate(&line(), &id, 3.0, &opts(10)).unwrap();
    assert_eq!(t.points, vec![3.0, 3.0]);
    assert_eq!(t.consec.elements, vec![0.0]);
    assert_eq!(t.stop, StopReason::Exact);

    let shift = MapSpec::new("x+1", |x: &f64| x + 1.0);
    let t = picard_iterate(&line(), &shift, 0.0, &opts(10)).unwrap();
    assert_eq!(t.points.len(), 11);
    assert_eq!(t.stop, StopReason::Budget);
    assert_eq!(picard_iterate(&line(), &shift, 0.0, &opts(0)).unwrap_err(), EngineError::ZeroBudget);
}

#[test]
fn apply_failure_propagates() {
    let f = MapSpec::fallible("log", |x: &f64| if *x > 0.0 { Ok(x.ln()) } else { Err(format!("log of {x}")) });
    let err = picard_iterate(&line(), &f, 0.5, &opts(10)).unwrap_err();
    assert!(matches!(err, EngineError::Apply { step: 1, .. }), "{err:?}");
}

#[test]
fn verify_fixed_point_examples() {
    let f = MapSpec::new("x/2+1", |x: &f64| x / 2.0 + 1.0);
    assert_eq!(verify_fixed_point(&line(), &f, &2.0).unwrap(), (0.0, true));
    let (r, below) = verify_fixed_point(&line(), &f, &2.1).unwrap();
    assert!((r - 0.05).abs() < 1e-12);
    assert!(below);
    let coarse = line().with_ladder(vec![1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125]).unwrap();
    assert!(!verify_fixed_point(&coarse, &f, &2.1).unwrap().1);

    let dislocated = RealLine::<f64>::new(RealDistance::DislocatedMax);
    let id = MapSpec::new("id", |x: &f64| *x);
    assert_eq!(verify_fixed_point(&dislocated, &id, &3.0).unwrap(), (3.0, false));
}

#[test]
fn meir_keeler_examples() {
    let r = solve_meir_keeler(&line(), &halve(), &mk_data(), 8.0, &pairs(), &opts(200)).unwrap();
    assert!(r.is_certified(), "{}", r.to_text());
    assert!(r.fixed_point.unwrap().abs() < 1.0 / 16.0);
    assert!(line().below_bottom(&r.residual));

    let shift = MapSpec::new("x+1", |x: &f64| x + 1.0);
    let r = solve_meir_keeler(&line(), &shift, &mk_data(), 0.0, &pairs(), &opts(200)).unwrap();
    assert!(matches!(&r.status, Status::HypothesisViolated { which, .. } if which == "ε-δ contraction"));

    let id = MapSpec::new("id", |x: &f64| *x);
    let r = solve_meir_keeler(&line(), &id, &mk_data(), 5.0, &pairs(), &opts(200)).unwrap();
    assert!(matches!(r.status, Status::HypothesisViolated { step: 0, .. }));
}

#[test]
fn meir_keeler_rejects_bad_zeta() {
    let max = MeirKeelerData::new(|e: &f64| e / 2.0, |a: &f64, b: &f64| a.min(*b));
    let r = solve_meir_keeler(&line(), &halve(), &max, 8.0, &pairs(), &opts(200)).unwrap();
    assert!(matches!(&r.status, Status::HypothesisViolated { which, .. } if which.starts_with("ζ dominates")));

    let sq = RealLine::<f64>::new(RealDistance::Squared);
    let r = solve_meir_keeler(&sq, &halve(), &mk_data(), 8.0, &[(0.0, 1.0), (1.0, 2.0)], &opts(200)).unwrap();
    assert!(matches!(&r.status, Status::HypothesisViolated { which, .. } if which == "ζ-triangle"));
}

#[test]
fn meir_keeler_uniqueness_diagnostics() {
    let mk = mk_data().with_midpoint(|x: &f64, y: &f64, a: &f64, b: &f64| {
        let d = (y - x).abs();
        let t = if d == 0.0 { 0.0 } else { a / (a + b) };
        Some(x + (y - x) * t)
    });
    let r = solve_meir_keeler(&line(), &halve(), &mk, 8.0, &pairs(), &opts(200)).unwrap();
    assert!(r.diagnostics.iter().any(|d| d == "uniqueness conditions hold on samples"), "{:?}", r.diagnostics);
    let r = solve_meir_keeler(&line(), &halve(), &mk_data(), 8.0, &pairs(), &opts(200)).unwrap();
    assert!(r.diagnostics.iter().any(|d| d.contains("not sampled")));
}

#[test]
fn caristi_examples() {
    let nonneg = RealLine::<f64>::new(RealDistance::Abs);
    let good = CaristiData::new(|x: &f64| 2.0 * x.abs(), |e: &f64| *e);
    let r = solve_caristi(&nonneg, &halve(), &good, 8.0, &opts(200)).unwrap();
    assert!(r.is_certified(), "{}", r.to_text());

    let bad = CaristiData::new(|x: &f64| x.abs() / 4.0, |e: &f64| *e);
    let r = solve_caristi(&nonneg, &halve(), &bad, 1.0, &opts(200)).unwrap();
    assert!(matches!(&r.status, Status::HypothesisViolated { step: 0, which, .. } if which == "potential descent"));

    let r = solve_caristi(&nonneg, &halve(), &good, 0.0, &opts(200)).unwrap();
    assert!(r.is_certified());
    assert_eq!((r.iterations, r.residual), (0, 0.0));
}

#[test]
fn caristi_needs_weierstrass() {
    use crate::spaces::catalog::uniform_catalog;
    let s = uniform_catalog(4, false).unwrap();
    let f = MapSpec::new("id", |x: &usize| *x);
    let cd = CaristiData::new(|_: &usize| crate::monoid::Relation::full(4), |e: &crate::monoid::Relation| e.clone());
    assert!(matches!(solve_caristi(&s, &f, &cd, 0, &opts(10)), Err(EngineError::NotWeierstrass(_))));
}

#[test]
fn sequential_examples() {
    let half = LambdaSequence::constant("t/2", |t: &f64| t / 2.0);
    for mode in [SequentialMode::Series, SequentialMode::OrbitBounded] {
        let r = solve_sequential(&line(), &halve(), &half, 8.0, mode, &opts(500)).unwrap();
        assert!(r.is_certified(), "{mode:?}: {}", r.to_text());
        assert!(r.fixed_point.unwrap().abs() < 1.0 / 16.0);
    }

    let harmonic = LambdaSequence::new("n/(n+1) t", |n, t: &f64| n as f64 / (n + 1) as f64 * t);
    let r = solve_sequential(&line(), &halve(), &harmonic, 8.0, SequentialMode::Series, &opts(2_000)).unwrap();
    assert!(matches!(r.status, Status::BudgetExhausted { .. }), "{}", r.to_text());
    assert_eq!(r.iterations, 0);

    let tripler = MapSpec::new("3x", |x: &f64| 3.0 * x);
    let r = solve_sequential(&line(), &tripler, &half, 1.0, SequentialMode::Series, &opts(100)).unwrap();
    assert!(matches!(&r.status, Status::HypothesisViolated { step: 1, which, .. } if which == "step contraction"));
}

#[test]
fn lambda_product_traces() {
    let half = LambdaSequence::constant("t/2", |t: &f64| t / 2.0);
    assert_eq!(lambda_product_trace(&half, &1.0, 4).elements, vec![0.5, 0.25, 0.125, 0.0625]);

    let harmonic = LambdaSequence::new("n/(n+1) t", |n, t: &f64| n as f64 / (n + 1) as f64 * t);
    let t = lambda_product_trace(&harmonic, &1.0, 50);
    for (k, v) in t.elements.iter().enumerate() {
        assert!((v - 1.0 / (k as f64 + 2.0)).abs() < 1e-14);
    }
    let squares = LambdaSequence::new("(n/(n+1))² t", |n, t: &f64| (n as f64 / (n + 1) as f64).powi(2) * t);
    let t = lambda_product_trace(&squares, &1.0, 50);
    for (k, v) in t.elements.iter().enumerate() {
        assert!((v - 1.0 / (k as f64 + 2.0).powi(2)).abs() < 1e-14);
    }
}

#[test]
fn lambda_order_matters_for_non_commuting_operators() {
    // λ_1 adds 1, λ_2 doubles: λ_1(λ_2(0)) = 1 while the reverse order gives 2.
    let lam = LambdaSequence::new("mixed", |n, t: &f64| if n == 1 { t + 1.0 } else { 2.0 * t });
    assert_eq!(lambda_product_trace(&lam, &0.0, 2).elements, vec![1.0, 1.0]);
    assert_eq!(lambda_product_trace(&lam, &1.0, 2).elements, vec![2.0, 3.0]);
}

#[test]
fn harmonic_lambda_is_null_but_not_a_series() {
    let m = RealNonneg::<f64>::new();
    let ladder = TestLadder::new(&m, dyadic_rungs(5)).unwrap();
    let harmonic = LambdaSequence::new("n/(n+1) t", |n, t: &f64| n as f64 / (n + 1) as f64 * t);
    let t = lambda_product_trace(&harmonic, &1.0, 2_000);
    assert_eq!(is_null_trace(&t, &ladder, &m).unwrap(), Decision::Null);
    assert_eq!(cauchy_series_check(&t, &ladder, &m).unwrap(), Decision::NotNullWithin);
}

#[test]
fn monotone_examples() {
    let lam = LambdaSequence::constant("t/2", |t: &f64| t / 2.0);
    let f = MapSpec::new("(x+2)/2", |x: &f64| (x + 2.0) / 2.0).with_order(|a: &f64, b: &f64| a <= b);
    let r = solve_monotone(&line(), &f, &lam, 0.0, SequentialMode::Series, &opts(200)).unwrap();
    assert!(r.is_certified());
    assert!((r.fixed_point.unwrap() - 2.0).abs() < 1.0 / 16.0);
    assert!(r.trace.points.windows(2).all(|w| w[0] <= w[1]));

    let r = solve_monotone(&line(), &f, &lam, 5.0, SequentialMode::Series, &opts(200)).unwrap();
    assert!(matches!(&r.status, Status::HypothesisViolated { step: 0, which, .. } if which == "seed below image"));

    let id = MapSpec::new("id", |x: &f64| *x).with_order(|a: &f64, b: &f64| a <= b);
    let r = solve_monotone(&line(), &id, &lam, 7.0, SequentialMode::Series, &opts(200)).unwrap();
    assert!(r.is_certified());
    assert_eq!(r.iterations, 0);

    let unordered = MapSpec::new("x/2", |x: &f64| x / 2.0);
    assert_eq!(solve_monotone(&line(), &unordered, &lam, 0.0, SequentialMode::Series, &opts(10)).unwrap_err(), EngineError::NoOrder);
}

#[test]
fn uniqueness_probes() {
    let lam = LambdaSequence::constant("t/2", |t: &f64| t / 2.0);
    let d = sequential_uniqueness_probe(&fine_line(), &halve(), &lam, 8.0, -3.0, &opts(200)).unwrap();
    assert!(d.iter().any(|s| s.ends_with("below bottom rung: true")), "{d:?}");
    let f = MapSpec::new("(x+2)/2", |x: &f64| (x + 2.0) / 2.0).with_order(|a: &f64, b: &f64| a <= b);
    let d = monotone_uniqueness_probe(&fine_line(), &f, &lam, SequentialMode::Series, |a: &f64, b: &f64| a.max(*b), &2.0, &1.9999999, &opts(200))
        .unwrap();
    assert!(d[0].ends_with("true"), "{d:?}");
}

#[test]
fn driver_agreement_on_halving() {
    let s = fine_line();
    let lam = LambdaSequence::constant("t/2", |t: &f64| t / 2.0);
    let o = opts(500);
    let reports = [
        solve_meir_keeler(&s, &halve(), &mk_data(), 8.0, &pairs(), &o).unwrap(),
        solve_caristi(&s, &halve(), &CaristiData::new(|x: &f64| 2.0 * x.abs(), |e: &f64| *e), 8.0, &o).unwrap(),
        solve_sequential(&s, &halve(), &lam, 8.0, SequentialMode::Series, &o).unwrap(),
        solve_monotone(&s, &halve(), &lam, -8.0, SequentialMode::Series, &o).unwrap(),
    ];
    let bottom = *s.ladder().bottom();
    for r in &reports {
        assert!(r.is_certified(), "{}", r.to_text());
        let x = r.fixed_point.unwrap();
        assert!(x.abs() <= bottom);
        assert!(r.residual < bottom);
        assert!(verify_fixed_point(&s, &halve(), &x).unwrap().1);
    }
}

#[test]
fn parametrized_family() {
    let solve = |_: &f64, map: MapSpec<f64>| {
        let lam = LambdaSequence::constant("t/2", |t: &f64| t / 2.0);
        solve_sequential(&fine_line(), &map, &lam, 0.0, SequentialMode::Series, &opts(500))
    };
    let monotone = |rows: &[(&f64, Option<&f64>)]| rows.windows(2).all(|w| matches!((w[0].1, w[1].1), (Some(a), Some(b)) if a <= b));
    let t = solve_parametrized(&[0.0, 1.0, 2.0], |w: &f64, x: &f64| x / 2.0 + w, solve, Some(&monotone));
    assert!(t.all_certified());
    for (w, x) in t.fixed_points() {
        assert!((x.unwrap() - 2.0 * w).abs() < 1e-5);
    }
    assert_eq!(t.admissible, Some(true));

    let t = solve_parametrized(&[0.0, 1.0, 2.0], |w: &f64, x: &f64| if *w == 1.0 { 3.0 * x + 1.0 } else { x / 2.0 + w }, solve, None);
    let labels: Vec<_> = t.rows.iter().map(|r| r.outcome.as_ref().unwrap().status.label()).collect();
    assert_eq!(labels, ["Certified", "HypothesisViolated", "Certified"]);
}

#[test]
fn trace_export_and_report_text() {
    let lam = LambdaSequence::constant("t/2", |t: &f64| t / 2.0);
    let r = solve_sequential(&line(), &halve(), &lam, 1.0, SequentialMode::Series, &opts(50)).unwrap();
    let mut buf = Vec::new();
    write_trace_csv(&r.trace, &mut buf).unwrap();
    let csv = String::from_utf8(buf).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("index,point,consec,flags"));
    assert_eq!(lines.next(), Some("0,1,0.5,"));
    assert_eq!(lines.next(), Some("1,0.5,0.25,step contraction=ok"));
    assert_eq!(csv.lines().count(), r.trace.points.len() + 1);
    let text = r.to_text();
    assert!(text.starts_with("driver: sequential\nstatus: Certified"));
}

#[test]
fn affine_consec_dominated_by_product_trace() {
    for c in [0.25, 0.5, 0.75] {
        let f = MapSpec::new("affine", move |x: &f64| c * x + 1.0);
        let t = picard_iterate(&line(), &f, 0.0, &opts(60)).unwrap();
        let lam = LambdaSequence::constant("c t", move |x: &f64| c * x);
        let p = lambda_product_trace(&lam, &t.consec.elements[0], t.consec.len());
        for (k, d) in t.consec.elements.iter().enumerate().skip(1) {
            assert!(*d <= p.elements[k - 1] * (1.0 + 1e-12), "c={c}, k={k}");
        }
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn certified_reports_reproduce_their_flag(c in 0.05f64..0.9, b in -4.0f64..4.0, x0 in -8.0f64..8.0) {
            let f = MapSpec::new("affine", move |x: &f64| c * x + b).with_order(|a: &f64, b: &f64| a <= b);
            let lam = LambdaSequence::constant("c t", move |t: &f64| c * t * (1.0 + 1e-9));
            let r = solve_sequential(&fine_line(), &f, &lam, x0, SequentialMode::Series, &opts(2_000)).unwrap();
            if let Some(x) = r.fixed_point {
                prop_assert!(fine_line().below_bottom(&r.residual));
                prop_assert!(verify_fixed_point(&fine_line(), &f, &x).unwrap().1);
                prop_assert!((x - b / (1.0 - c)).abs() < 1e-4);
            }
            let m = solve_monotone(&fine_line(), &f, &lam, x0, SequentialMode::Series, &opts(2_000)).unwrap();
            if m.is_certified() {
                prop_assert!(m.trace.points.windows(2).all(|w| w[0] <= w[1]));
            }
        }

        #[test]
        fn meir_keeler_certified_maps_do_not_expand(c in 0.05f64..0.6, u in -8.0f64..8.0, v in -8.0f64..8.0) {
            let f = MapSpec::new("cx", move |x: &f64| c * x);
            let r = solve_meir_keeler(&line(), &f, &mk_data(), 4.0, &pairs(), &opts(200)).unwrap();
            prop_assert!(r.is_certified());
            let (d, dd) = ((u - v).abs(), (c * u - c * v).abs());
            for eps in line().ladder().rungs() {
                if d < *eps {
                    prop_assert!(dd < *eps);
                }
            }
        }
    }
}
