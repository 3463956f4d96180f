use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use structured_persistence::ainfty::TransferOptions;
use structured_persistence::barcode::barcode;
use structured_persistence::bottleneck::{bottleneck, d_grvect};
use structured_persistence::bounds::{
    combined_distances, distance_report, ledger_pair, prime_lower_bound, stability_check, structured_lower_bound,
    trivial_upper_bound, BoundKind, Certificate, PersistenceModuleView, ReportOptions, Structure,
};
use structured_persistence::complex::{build_rips, Correspondence, Metric, PointCloud};
use structured_persistence::dga;
use structured_persistence::ledger::{build_ledger, Op};
use structured_persistence::samples;
use structured_persistence::transfer::ModelTransfer;
use structured_persistence::Field;

#[test]
fn circle_has_one_long_loop() {
    let cloud = samples::circle_cloud(12, 1.0);
    let cx = build_rips(&cloud, &Metric::euclidean(), 2, f64::INFINITY).unwrap();
    let bc = barcode(&cx, Field::f2()).unwrap();
    let d1 = bc.diagram(1);
    assert_eq!(d1.len(), 1);
    let side = 2.0 * (std::f64::consts::PI / 12.0).sin();
    assert!((d1[0].0 - side).abs() < 1e-9);
    assert!(d1[0].1 > 1.7);
}

#[test]
fn wedge_has_no_products_and_torus_does() {
    let (w, t) = samples::torus_vs_wedge(0.1);
    let (lw, lt) = ledger_pair(&w, &t, Field::f2(), ReportOptions::default()).unwrap();
    assert!(lw.snapshots.iter().all(|s| s.entries.iter().all(|e| e.op != Op::Cup)));
    // the product of the two degree-1 bars is the degree-2 bar over their common lifespan
    let k = lt.snapshot_index_at(0.5).unwrap();
    let cup: Vec<_> = lt.entries(k, Op::Cup).collect();
    let h2: Vec<usize> = (0..lt.bars.len()).filter(|&b| lt.bars[b].degree == 2).collect();
    assert_eq!(h2.len(), 1);
    assert!(cup.iter().any(|e| e.inputs[0] != e.inputs[1] && e.output == vec![(h2[0], 1)]));
    assert!(lt.entries(lt.snapshot_index_at(1.0).unwrap(), Op::Cup).next().is_none());
}

#[test]
fn heisenberg_ledger_records_the_triple_product() {
    let f = Field::f2();
    let a = dga::heisenberg(f);
    let l = samples::model_ledger(&a, 3, |_, _| (0.0, 1.0)).unwrap();
    let mt = ModelTransfer::new(&a, a.contraction(Default::default()));
    let (al, be, ga) = (mt.class_of("x").unwrap(), mt.class_of("y").unwrap(), mt.class_of("xz").unwrap());
    let e = l.entries(0, Op::M(3)).find(|e| e.inputs == vec![al, al, be]).unwrap();
    assert_eq!(e.output, vec![(ga, 1)]);
}

#[test]
fn materialized_ledger_matches_streaming() {
    let f = Field::f3();
    let (w, t) = samples::torus_vs_wedge(0.2);
    for cx in [w, t] {
        let (bc, streamed) = structured_persistence::ledger::ledger_from_complex(&cx, f, Default::default()).unwrap();
        let ptd = structured_persistence::contraction::incremental_contraction(&cx, f).unwrap();
        let pa = structured_persistence::ainfty::persistent_ainfty(&cx, &ptd, TransferOptions::new(3).positive_only()).unwrap();
        assert_eq!(build_ledger(&pa, None, &bc).unwrap(), streamed);
    }
}

#[test]
fn torus_vs_wedge_bounds_follow_alpha() {
    for alpha in [0.05, 0.1, 0.2] {
        let (w, t) = samples::torus_vs_wedge(alpha);
        let (lw, lt) = ledger_pair(&w, &t, Field::f2(), ReportOptions::default()).unwrap();
        let g = structured_lower_bound(&lw, &lt, Structure::Graded).unwrap().value;
        let c = structured_lower_bound(&lw, &lt, Structure::Cup).unwrap();
        assert!(g <= 2.0 * alpha + 1e-9);
        assert!(c.value >= (1.0 - 2.0 * alpha) / 2.0 - 1e-9, "α={alpha}: {}", c.value);
        assert!(matches!(c.certificate, Certificate::Obstruction { .. }));
        let up = trivial_upper_bound(&PersistenceModuleView::from_ledger(&lw), &PersistenceModuleView::from_ledger(&lt));
        assert!(c.value <= up.value && up.value <= 0.5);
        assert_eq!(d_grvect(&barcode(&w, Field::f2()).unwrap(), &barcode(&t, Field::f2()).unwrap()), g);
    }
}

#[test]
fn borromean_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (ell, alpha) = (0.5, 0.05);
    for f in [Field::f2(), Field::f3()] {
        let (lx, ly) = samples::borromean_vs_unlinked(&mut rng, f, ell, alpha).unwrap();
        let a = structured_lower_bound(&lx, &ly, Structure::AInfty).unwrap().value;
        let c = structured_lower_bound(&lx, &ly, Structure::Cup).unwrap().value;
        let up = trivial_upper_bound(&PersistenceModuleView::from_ledger(&lx), &PersistenceModuleView::from_ledger(&ly)).value;
        assert!(a >= (ell - 2.0 * alpha) / 2.0 - 1e-9);
        assert!(c <= 2.0 * alpha + 1e-9);
        assert!(a <= up && up <= (ell + alpha) / 2.0 + 1e-9);
    }
}

#[test]
fn suspended_rp2_separation_needs_the_prime_two() {
    let (x, ball) = samples::suspended_rp2_vs_ball(0.1);
    let opts = ReportOptions::default();
    let (a2, b2) = ledger_pair(&x, &ball, Field::f2(), opts).unwrap();
    let (a0, b0) = ledger_pair(&x, &ball, Field::char_zero_proxy(), opts).unwrap();
    let p2 = prime_lower_bound(&a2, &b2).unwrap();
    let p0 = prime_lower_bound(&a0, &b0).unwrap();
    assert!(p2.value > p0.value);
    let all = combined_distances(&[p0.clone(), p2.clone()]).unwrap();
    assert_eq!(all["d_{0∞,2∞}"].value, p2.value);
    assert_eq!(all["d_P"].value, p2.value);
    // same 𝔽2 cohomology and products, told apart only by Sq¹
    let (x, y) = samples::suspended_rp2_vs_sphere_wedge(0.1);
    let (a, b) = ledger_pair(&x, &y, Field::f2(), opts).unwrap();
    let cup = structured_lower_bound(&a, &b, Structure::Cup).unwrap().value;
    let sq = structured_lower_bound(&a, &b, Structure::Steenrod).unwrap();
    assert!(cup < 0.05 && sq.value > 0.4);
    if let Certificate::Obstruction { violation, .. } = &sq.certificate {
        assert!(violation.family.contains("Sq1") || violation.family.contains("squares"));
    } else {
        panic!("expected an obstruction");
    }
}

#[test]
fn report_is_consistent() {
    let (w, t) = samples::torus_vs_wedge(0.1);
    let r = distance_report(&w, &t, &[Field::f2(), Field::f3()], ReportOptions::default()).unwrap();
    for f in [2, 3] {
        let up = r.iter().find(|b| b.kind == BoundKind::Upper && b.field == f).unwrap().value;
        for b in r.iter().filter(|b| b.kind == BoundKind::Lower && b.field == f) {
            assert!(b.value <= up, "{} {} > {up}", b.distance, b.value);
        }
    }
    assert!(r.iter().any(|b| b.distance == "d_{2∞,3∞}"));
    assert!(r.iter().all(|b| b.to_json()["kind"].is_string()));
}

#[test]
fn stability_trivial_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = samples::random_cloud(&mut rng, 15, 2);
    let moved = PointCloud::new(x.points().iter().map(|p| vec![p[0] + 3.0, p[1] - 1.0]).collect()).unwrap();
    for y in [&x, &moved] {
        let rep = stability_check(&x, y, &Correspondence::identity(15), 2, &[Field::f2()], ReportOptions::default()).unwrap();
        assert!(rep.distortion < 1e-12);
        assert!(rep.violations.is_empty());
        assert!(rep.bounds.iter().all(|b| b.value < 1e-12), "{:?}", rep.bounds);
    }
}

#[test]
fn two_empty_modules_have_zero_upper_bound() {
    let v = PersistenceModuleView::new(1, Vec::new());
    assert_eq!(trivial_upper_bound(&v, &v).value, 0.0);
}

fn diagram() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0u8..20, 1u8..10), 0..8)
        .prop_map(|v| v.into_iter().map(|(b, l)| (b as f64 * 0.5, (b + l) as f64 * 0.5)).collect())
}

proptest! {
    #[test]
    fn bottleneck_is_a_metric_on_samples(a in diagram(), b in diagram(), c in diagram()) {
        prop_assert_eq!(bottleneck(&a, &a), 0.0);
        prop_assert_eq!(bottleneck(&a, &b), bottleneck(&b, &a));
        prop_assert!(bottleneck(&a, &c) <= bottleneck(&a, &b) + bottleneck(&b, &c) + 1e-12);
    }
}
