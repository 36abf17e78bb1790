use super::*;
use crate::monoid::{Relation, RealNonneg};
use crate::report::Outcome;
use crate::rng::stream;

fn real(v: RealDistance) -> RealLine<f64> {
    RealLine::new(v)
}

fn points(space: &impl PointSampler<Point = f64>, n: usize) -> Vec<f64> {
    space.sample_points(&mut stream(5, 1), n)
}

#[test]
fn real_metric_validates() {
    let s = real(RealDistance::Abs);
    let r = validate_space(&s, &points(&s, 200), 10_000, &mut stream(1, 2)).unwrap();
    assert!(r.is_pass(), "{r}");
}

#[test]
fn dislocated_max_reports_self_distance() {
    let s = real(RealDistance::DislocatedMax);
    let mut pts = points(&s, 100);
    pts.push(2.0);
    assert_eq!(s.distance(&2.0, &2.0), 2.0);
    let r = validate_space(&s, &pts, 10_000, &mut stream(1, 2)).unwrap();
    assert!(r.is_pass(), "{r}");
    assert!(matches!(r.get("self-distance"), Some(Outcome::Note { .. })));
}

#[test]
fn collapsed_pseudo_distance_declared_dislocated_fails() {
    let m = RealNonneg::<f64>::new();
    let ladder = TestLadder::new(&m, dyadic_rungs(5)).unwrap();
    let s = FnSpace::new("floor", m, ladder, SpaceKind::Dislocated, |x: &f64, y: &f64| (x.floor() - y.floor()).abs());
    let r = validate_space(&s, &[1.0, 1.5, 2.0], 100, &mut stream(1, 2)).unwrap();
    match r.get("θ only on the diagonal") {
        Some(Outcome::Fail { witness }) => assert!(witness.contains("1.0") && witness.contains("1.5")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn triangle_checks() {
    let s = real(RealDistance::Abs);
    let pts = points(&s, 50);
    assert!(check_triangle(&s, &random_triples(&pts, 5000, &mut stream(2, 1))).is_pass());

    let snow = real(RealDistance::Snowflake);
    assert_eq!(snow.distance(&0.0, &2.0), 4.0);
    let r = check_triangle(&snow, &[(0.0, 1.0, 2.0)]);
    assert!(!r.is_pass());
}

#[test]
fn zeta_triangles_on_squared_distance() {
    let sq = real(RealDistance::Squared);
    let pts = points(&sq, 40);
    let triples = all_triples(&pts);
    let doubled = ZetaSpec::identity_phi(|a: &f64, b: &f64| 2.0 * (a + b));
    assert!(check_zeta_triangle(&sq, &doubled, &triples).is_pass());
    let plain = ZetaSpec::triangle(RealNonneg::<f64>::new());
    assert!(!check_zeta_triangle(&sq, &plain, &[(0.0, 1.0, 2.0)]).is_pass());
    let abs = real(RealDistance::Abs);
    assert!(check_zeta_triangle(&abs, &plain, &triples).is_pass());
}

#[test]
fn zeta_triangle_skips_theta_when_domain_excludes_zero() {
    let sq = real(RealDistance::Squared);
    let z = ZetaSpec::new(|a: &f64| *a, |a: &f64, b: &f64| a + b, true);
    let r = check_zeta_triangle(&sq, &z, &[(0.0, 0.0, 2.0), (1.0, 1.0, 1.0)]);
    assert!(r.is_pass());
    assert!(matches!(r.get("skipped"), Some(Outcome::Note { text }) if text.starts_with('2')));
}

#[test]
fn zeta_audit_battery() {
    let m = RealNonneg::<f64>::new();
    let l = TestLadder::new(&m, dyadic_rungs(5)).unwrap();
    let battery = vec![
        MTrace::new((1..=1000).map(|n| 1.0 / n as f64).collect()),
        MTrace::new((1..=100).map(|n| 1.0 / (n * n) as f64).collect()),
        MTrace::new(vec![0.5; 100]),
    ];
    let good = ZetaSpec::identity_phi(|a: &f64, b: &f64| 2.0 * (a + b));
    assert!(good.audit(&m, &l, &battery).unwrap().is_pass());
    let bad = ZetaSpec::identity_phi(|a: &f64, b: &f64| a + b + 1.0);
    assert!(!bad.audit(&m, &l, &battery).unwrap().is_pass());
    let bad_phi = ZetaSpec::new(|a: &f64| a / 100.0, |a: &f64, b: &f64| a + b, false);
    assert!(!bad_phi.audit(&m, &l, &battery).unwrap().is_pass());
}

#[test]
fn sequences_on_the_line() {
    let s = real(RealDistance::Abs);
    let harmonic = PointTrace::new((1..=400).map(|n| 1.0 / n as f64).collect());
    assert_eq!(is_cauchy_sequence(&s, &harmonic).unwrap(), Decision::Null);
    assert_eq!(converges_to(&s, &harmonic, &0.0).unwrap(), Decision::Null);
    assert_eq!(converges_to(&s, &harmonic, &1.0).unwrap(), Decision::NotNullWithin);
    let constant = PointTrace::new(vec![3.0; 10]);
    assert_eq!(is_cauchy_sequence(&s, &constant).unwrap(), Decision::Null);

    let geometric = PointTrace::new((0..60).map(|n| 0.5f64.powi(n)).collect());
    assert_eq!(is_cw_sequence(&s, &geometric).unwrap(), Decision::Null);
    let mut acc = 0.0;
    let walk = PointTrace::new(
        (1..=10_000)
            .map(|k| {
                acc += 1.0 / k as f64;
                acc
            })
            .collect(),
    );
    assert_eq!(is_cw_sequence(&s, &walk).unwrap(), Decision::NotNullWithin);
    assert!(matches!(is_cauchy_sequence(&s, &PointTrace::new(vec![1.0])), Err(SpaceError::TraceTooShort { .. })));
}

#[test]
fn omega_interleaved_sequence() {
    let s = OmegaSpace::new(200);
    let t = PointTrace::new(interleaved_sequence(200));
    assert_eq!(is_cw_sequence(&s, &t).unwrap(), Decision::Null);
    assert_eq!(is_cauchy_sequence(&s, &t).unwrap(), Decision::NotNullWithin);
    assert_eq!(converges_to(&s, &t, &OmegaPoint::Infinity).unwrap(), Decision::Null);
    use OmegaPoint::*;
    assert_eq!(s.distance(&Nat(2), &Nat(7)), 1.0);
    assert_eq!(s.distance(&Omega(2), &Omega(7)), 1.0);
    assert_eq!(s.distance(&Nat(4), &Omega(9)), 1.0 / 16.0);
    assert_eq!(s.distance(&Infinity, &Nat(3)), 1.0 / 9.0);
    assert_eq!(s.distance(&Omega(5), &Infinity), 1.0 / 25.0);
    assert_eq!(s.distance(&Omega(5), &Omega(5)), 0.0);
}

#[test]
fn fw_strong_discriminates_real_spaces() {
    let sq = real(RealDistance::Squared);
    let c = falsify_frechet_wilson(&sq, FwLevel::Strong, &RealChains::default(), 20_000, 7).unwrap().expect("counterexample");
    assert_eq!(c.level, FwLevel::Strong);
    assert!(c.to_record().contains("level: strong"));

    // The hand-built chain x_i = i/100.
    let chain: Vec<f64> = (0..100).map(|i| i as f64 * 0.01).collect();
    let sum: f64 = chain.windows(2).map(|w| sq.distance(&w[0], &w[1])).sum();
    assert!(sum < 1.0 / 16.0);
    assert!(sq.distance(&chain[0], &chain[99]) > 0.5);

    for v in [RealDistance::Snowflake, RealDistance::Abs] {
        let s = real(v);
        assert!(falsify_frechet_wilson(&s, FwLevel::Strong, &RealChains::default(), 20_000, 7).unwrap().is_none());
    }
}

#[test]
fn fw_sequence_levels() {
    let s = OmegaSpace::new(400);
    let c = falsify_frechet_wilson(&s, FwLevel::Standard, &OmegaChains { n_max: 400 }, 20_000, 3).unwrap();
    assert!(c.is_some());
    let abs = real(RealDistance::Abs);
    for level in [FwLevel::Weak, FwLevel::Standard] {
        assert!(falsify_frechet_wilson(&abs, level, &RealChains::default(), 5_000, 3).unwrap().is_none());
    }
    let sq = real(RealDistance::Squared);
    assert!(falsify_frechet_wilson(&sq, FwLevel::Standard, &RealChains::default(), 5_000, 3).unwrap().is_none());
}

#[test]
fn fw_result_is_deterministic() {
    let sq = real(RealDistance::Squared);
    let a = falsify_frechet_wilson(&sq, FwLevel::Strong, &RealChains::default(), 4_000, 11).unwrap();
    let b = falsify_frechet_wilson(&sq, FwLevel::Strong, &RealChains::default(), 4_000, 11).unwrap();
    assert_eq!(a, b);
}

#[test]
fn entourage_distances() {
    let n = 3;
    let rho = [[0.0, 1.5, 3.0], [1.5, 0.0, 1.5], [3.0, 1.5, 0.0]];
    let sub = |r: f64| Relation::from_pairs(n, (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| rho[i][j] <= r).collect::<Vec<_>>());
    let base = vec![sub(2.0), sub(1.0)];
    // ρ(a,b) = 1.5: only the sublevel-2 relation contains (a,b).
    assert_eq!(entourage_distance(&base, 0, 1).unwrap(), sub(2.0));
    assert_eq!(entourage_distance(&base, 0, 2).unwrap(), Relation::full(n));
    assert_eq!(entourage_distance(&base, 1, 1).unwrap(), sub(1.0));
    assert_eq!(sub(1.0), Relation::diagonal(n));
    assert_eq!(entourage_distance(&[], 0, 1).unwrap_err(), SpaceError::EmptyBase);
}

#[test]
fn uniform_space_edge_cases() {
    let single = make_uniform_from_pseudometric(&[()], |_, _| 0.0, &[1.0]).unwrap();
    assert_eq!(single.distance(&0, &0), Relation::diagonal(1));
    assert_eq!(single.kind(), SpaceKind::Distance);

    let twins = make_uniform_from_pseudometric(&[0.0, 0.0, 1.0], |a: &f64, b: &f64| (a - b).abs(), &[1.0, 0.5]).unwrap();
    assert_eq!(twins.kind(), SpaceKind::Pseudo);
    assert_eq!(twins.distance(&0, &1), Relation::diagonal(3));
    let r = validate_space(&twins, &twins.points(), 100, &mut stream(1, 1)).unwrap();
    assert!(r.is_pass(), "{r}");

    let err = make_uniform_from_pseudometric(&[0.0, 1.0], |a: &f64, b: &f64| (a - b).abs(), &[1.0, 0.6]).unwrap_err();
    assert_eq!(err, SpaceError::ThresholdsNotHalving { index: 1, value: 0.6 });
    assert!(matches!(
        make_uniform_from_pseudometric(&[0.0, 1.0], |a: &f64, b: &f64| a - b, &[1.0]),
        Err(SpaceError::InvalidPseudometric(_))
    ));
}

#[test]
fn ultrametric_layout_passes_triangle() {
    let s = catalog::uniform_catalog(8, false).unwrap();
    assert!(crate::monoid::validate_ladder(s.monoid(), s.ladder()).is_pass());
    assert!(check_triangle(&s, &all_triples(&s.points())).is_pass());
    assert!(validate_space(&s, &s.points(), 100, &mut stream(1, 1)).unwrap().is_pass());
}

#[test]
fn evenly_spaced_layout_violates_triangle() {
    // Oracle: brute-force composition over every triple.
    let s = catalog::uniform_catalog(8, true).unwrap();
    let triples = all_triples(&s.points());
    let brute = triples.iter().find(|(a, b, c)| {
        let comp = s.distance(a, b).then(&s.distance(b, c));
        !s.distance(a, c).is_subset(&comp)
    });
    let report = check_triangle(&s, &triples);
    assert_eq!(brute.is_some(), !report.is_pass());
    assert!(!report.is_pass());
}

#[test]
fn products() {
    let abs = real(RealDistance::Abs);
    let sigma = SumProduct::new(vec![abs.clone(), abs.clone()], SumMode::Sigma).unwrap();
    let vee = SumProduct::new(vec![abs.clone(), abs.clone()], SumMode::Vee).unwrap();
    let coord = CoordinateProduct::new(vec![abs.clone(), abs.clone()]).unwrap();
    let (p, q) = (vec![0.0, 0.0], vec![1.0, 2.0]);
    assert_eq!(sigma.distance(&p, &q), 3.0);
    assert_eq!(vee.distance(&p, &q), 2.0);
    assert_eq!(coord.distance(&p, &q), vec![1.0, 2.0]);
    assert_eq!(coord.ladder().rung(1), &vec![0.5, 0.5]);
    assert_eq!(coord.kind(), SpaceKind::Distance);

    let mixed = SumProduct::new(vec![real(RealDistance::DislocatedMax), abs.clone()], SumMode::Sigma).unwrap();
    assert_eq!(mixed.kind(), SpaceKind::Dislocated);

    let g1 = GridSpace::<f64>::new(2);
    let g2 = GridSpace::<f64>::new(3);
    assert!(matches!(SumProduct::new(vec![g1, g2], SumMode::Sigma), Err(SpaceError::MixedMonoids { .. })));

    let short = abs.clone().with_ladder(vec![1.0, 0.5]).unwrap();
    assert!(matches!(CoordinateProduct::new(vec![abs, short]), Err(SpaceError::LadderMismatch(5, 2))));
}

#[test]
fn gauge_kinds() {
    let pts: Vec<Vec<f64>> = (0..6).flat_map(|i| (0..6).map(move |j| vec![i as f64 / 2.0, j as f64 / 2.0])).collect();
    let two = catalog::coordinate_gauge(2, 2, &pts).unwrap();
    assert_eq!(two.kind(), SpaceKind::Distance);
    let one = catalog::coordinate_gauge(2, 1, &pts).unwrap();
    assert_eq!(one.kind(), SpaceKind::Pseudo);
    assert!(validate_space(&one, &pts, 2_000, &mut stream(1, 1)).unwrap().is_pass());
}

#[test]
fn gauge_of_scaled_metrics_matches_real_convergence() {
    let m = RealNonneg::<f64>::new();
    let l = TestLadder::new(&m, dyadic_rungs(5)).unwrap();
    let factors: Vec<_> = [1.0, 2.0, 4.0]
        .into_iter()
        .map(|c| FnSpace::new(format!("{c}|x-y|"), m, l.clone(), SpaceKind::Distance, move |x: &f64, y: &f64| c * (x - y).abs()))
        .collect();
    let g = GaugeSpace::new(factors, &[0.0, 1.0, 2.0]).unwrap();
    let abs = real(RealDistance::Abs);
    for rate in [1, 2, 3] {
        let t = PointTrace::new((1..=300).map(|n| 1.0 / (n as f64).powi(rate)).collect());
        assert_eq!(converges_to(&g, &t, &0.0).unwrap().is_null(), converges_to(&abs, &t, &0.0).unwrap().is_null());
    }
    let stuck = PointTrace::new(vec![0.1; 100]);
    assert_eq!(converges_to(&g, &stuck, &0.0).unwrap(), converges_to(&abs, &stuck, &0.0).unwrap());
    assert_eq!(converges_to(&g, &stuck, &0.1).unwrap(), Decision::Null);
}

#[test]
fn catalog_names() {
    let opts = catalog::SpaceCheckOptions { axioms: true, fw: Some(FwLevel::Strong), trials: 2_000, seed: 1 };
    for name in [
        "real_abs",
        "snowflake",
        "dislocated_max",
        "omega_counterexample{10}",
        "uniform_pseudometric{8}",
        "gauge{2}",
        "gauge{3,1}",
        "product{sigma,real_abs,snowflake}",
        "product{vee,real_abs,real_abs}",
        "product{coord,real_abs,real_abs}",
    ] {
        let r = catalog::check_named_space(name, &opts).unwrap();
        assert!(r.axioms.as_ref().unwrap().is_pass(), "{name}: {}", r.axioms.unwrap());
    }
    let sq = catalog::check_named_space("squared", &opts).unwrap();
    assert!(sq.counterexample().is_some());
    assert!(!sq.is_success());
    for bad in ["nope", "omega_counterexample{x}", "product{sigma}", "product{mix,real_abs}", "gauge{2,3}", "uniform_pseudometric{8,square}"] {
        assert!(catalog::check_named_space(bad, &opts).is_err(), "{bad}");
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn abs_convergence_matches_classical(c in -4.0f64..4.0, rate in 0.5f64..3.0, limit in -4.0f64..4.0, len in 40usize..300) {
            let s = real(RealDistance::Abs);
            let xs: Vec<f64> = (1..=len).map(|n| c + 1.0 / (n as f64).powf(rate)).collect();
            let t = PointTrace::new(xs.clone());
            let budget = t.budget;
            // Oracle: direct real comparison against the bottom rung 1/16.
            let last_bad = xs.iter().rposition(|x| (x - limit).abs() >= 1.0 / 16.0);
            let onset = last_bad.map_or(1, |i| i + 2);
            let expected = if onset <= budget && onset <= len { Decision::Null } else { Decision::NotNullWithin };
            prop_assert_eq!(converges_to(&s, &t, &limit).unwrap(), expected);
        }

        #[test]
        fn hausdorff_uniqueness_at_trace_scale(c in -4.0f64..4.0, a in -4.0f64..4.0, b in -4.0f64..4.0) {
            let s = real(RealDistance::Abs);
            let t = PointTrace::new((1..=200).map(|n| c + 1.0 / n as f64).collect());
            if converges_to(&s, &t, &a).unwrap().is_null() && converges_to(&s, &t, &b).unwrap().is_null() {
                let coarse = s.ladder().coarser().unwrap();
                prop_assert!(coarse.below_bottom(s.monoid(), &s.distance(&a, &b)));
            }
        }
    }
}
