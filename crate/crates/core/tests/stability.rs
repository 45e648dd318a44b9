use mtstab_core::stability::{
    check_bound, counterexample_fields, instability_growth, run_finite_stability, run_stability_suite,
    CounterexampleFamily, SuiteConfig,
};
use mtstab_core::{compute, ChangeClass, MetricId};

#[test]
fn edge_split_fields_pass_for_e() {
    let (f, g) = counterexample_fields(CounterexampleFamily::EdgeSplit, 10.0, 0.1).unwrap();
    let r = check_bound(&f, &g, MetricId::E).unwrap();
    assert_eq!(r.class, ChangeClass::EdgeSplit);
    assert!(r.claimed && r.pass);
    assert!((r.distance - 0.1).abs() < 1e-9, "{}", r.distance);
}

#[test]
fn horizontal_fields_are_informational_for_p() {
    let (f, g) = counterexample_fields(CounterexampleFamily::Horizontal, 10.0, 0.1).unwrap();
    let r = check_bound(&f, &g, MetricId::P).unwrap();
    assert!(r.class.is_horizontal());
    assert!(!r.claimed);
    assert!(r.distance >= 9.9, "{}", r.distance);
    assert!(r.witness.is_none());
}

#[test]
fn growth_tables() {
    let xs = [10.0, 20.0];
    for (fam, m) in [
        (CounterexampleFamily::Horizontal, MetricId::W),
        (CounterexampleFamily::Vertical, MetricId::X),
    ] {
        let t = instability_growth(fam, m, &xs, 0.1).unwrap();
        assert!(t.is_linear(0.1), "{fam} {m}: {:?}", t.rows);
    }
    let t = instability_growth(CounterexampleFamily::EdgeSplit, MetricId::E, &xs, 0.1).unwrap();
    assert!(t.is_constant(1e-9) && (t.rows[0].1 - 0.1).abs() < 1e-9);
}

#[test]
fn suite_report_is_byte_identical_per_seed() {
    let metrics = vec![MetricId::E, MetricId::P, MetricId::L, MetricId::W];
    let cfg = SuiteConfig::new(11, 20, 4, metrics);
    let a = serde_json::to_string(&run_stability_suite(&cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&run_stability_suite(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    let other = SuiteConfig { seed: 12, ..cfg };
    assert_ne!(a, serde_json::to_string(&run_stability_suite(&other).unwrap()).unwrap());
}

#[test]
fn uniform_shift_costs_nothing_for_e() {
    let cfg = SuiteConfig::new(3, 1, 3, vec![MetricId::E]);
    let r = run_finite_stability(&cfg, 0.05).unwrap();
    let f = r.trials[0].f.clone().into_field().unwrap();
    let g = f.with_values(f.values().iter().map(|v| v + 0.05).collect()).unwrap();
    assert!(compute(MetricId::E, &f, &g).unwrap() < 1e-9);
}

#[test]
fn finite_suite_checks_e_on_every_trial() {
    let cfg = SuiteConfig::new(9, 20, 3, vec![MetricId::E, MetricId::L]);
    let r = run_finite_stability(&cfg, 0.05).unwrap();
    let e = r.stats(MetricId::E).unwrap();
    assert_eq!(e.applicable + e.guard_skipped, 20);
    assert_eq!(e.passed, e.applicable);
}
