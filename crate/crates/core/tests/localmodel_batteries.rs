use momentcut::localmodel::*;

#[test]
fn batteries_pass_at_stated_tolerances() {
    let reports = vec![
        monotone_battery(None, 1000, 1, 1e-6).unwrap(),
        solve_battery(None, 1000, 2, 1e-10).unwrap(),
        npm_battery(None, 1000, 3, 1e-10).unwrap(),
        psh_battery(1000, 4, 1e-9).unwrap(),
        cut_battery(None, 1000, 5, 1e-9).unwrap(),
        blowup_potential_battery(None, 1000, 6, 1e-5).unwrap(),
    ];
    for r in &reports {
        assert!(r.ok(), "{r:?}");
    }
}

#[test]
fn batteries_are_reproducible() {
    let a = cut_battery(None, 50, 11, 1e-9).unwrap();
    let b = cut_battery(None, 50, 11, 1e-9).unwrap();
    assert_eq!(a.worst_residual, b.worst_residual);
}

#[test]
fn convexity_probe_thousand_trials() {
    let a = LinearAction::new(vec![-1, 1]).unwrap();
    let spec = NeighborhoodSpec::certified(&a, 0.5, 0.25, 1.0).unwrap();
    let r = orbital_convexity_probe(&a, &spec, 1000, 3).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn convexity_probe_with_trivial_and_higher_weights() {
    let a = LinearAction::new(vec![-2, -1, 1, 3, 0]).unwrap();
    let spec = NeighborhoodSpec::certified(&a, 0.5, 0.02, 1.0).unwrap();
    let r = orbital_convexity_probe(&a, &spec, 200, 9).unwrap();
    assert!(r.passed, "{r:?}");
}
