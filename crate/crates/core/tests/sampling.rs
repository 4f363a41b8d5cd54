use helpercap_core::gaussian::Var;
use helpercap_core::*;

fn cfg(v: [f64; 7]) -> ChannelConfig {
    validate_config(v).unwrap()
}

fn fixtures() -> Vec<ChannelConfig> {
    vec![
        cfg([1.0, 1.0, 2.0, 5.0, 5.0, 12.0, 12.0]),
        cfg([0.8, 1.0, 2.0, 5.0, 5.0, 12.0, 12.0]),
        cfg([1.0, 1.0, 50.0, 5.0, 5.0, 100.0, 100.0]),
        cfg([0.5, 1.0, 50.0, 5.0, 5.0, 100.0, 100.0]),
    ]
}

/// Half the power on each auxiliary, dirty-paper coefficients for both users.
fn dpc_strategy(c: &ChannelConfig, gamma: f64) -> HelperStrategy {
    let beta = [0.0; 2];
    HelperStrategy::new([0.0; 2], [0.0; 3], beta, gamma)
        .with_alpha(alpha_star_dpc(User::One, c, beta, gamma))
        .with_alpha(alpha_star_dpc(User::Two, c, beta, gamma))
}

#[test]
fn output_variance_matches_at_one_million() {
    let c = fixtures()[0];
    let s = HelperStrategy::new([2.0 / 3.0, 0.0], [0.0; 3], [0.0; 2], 1.0);
    let emp = sample_empirical_covariance(&c, &s, 1_000_000, 7).unwrap();
    let n = 1e6f64;
    assert!((emp.get(Var::Y1, Var::Y1) - 20.0).abs() <= 3.0 * (2.0 / n).sqrt() * 20.0);
    assert!((emp.get(Var::Y1, Var::Y1) - 20.0).abs() <= 0.2);
    assert!(emp.get(Var::S1, Var::S2).abs() <= 3.0 * (12.0 * 12.0 / n).sqrt());
}

#[test]
fn default_check_passes() {
    let c = fixtures()[0];
    let rep = covariance_check(&c, &dpc_strategy(&c, 0.5), 1_000_000, 7, 0.01).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(rep.max_abs_error >= 0.0 && rep.max_rel_error >= 0.0);
    assert!(covariance_check(&c, &dpc_strategy(&c, 0.5), 1_000, 7, 10.0).unwrap().pass);
}

#[test]
fn error_shrinks_with_more_samples() {
    for c in fixtures() {
        let s = dpc_strategy(&c, 0.5);
        let mean = |n: usize| {
            let total: f64 = (1..=5u64)
                .map(|seed| covariance_check(&c, &s, n, seed, 1.0).unwrap().max_rel_error)
                .sum();
            total / 5.0
        };
        let (small, large) = (mean(10_000), mean(1_000_000));
        assert!(large <= small, "{c:?}: {large} > {small}");
    }
}

#[test]
fn reports_are_reproducible() {
    let c = fixtures()[3];
    let s = dpc_strategy(&c, 0.3);
    let a = covariance_check(&c, &s, 200_000, 42, 0.01).unwrap();
    let b = covariance_check(&c, &s, 200_000, 42, 0.01).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let single = pool.install(|| covariance_check(&c, &s, 200_000, 42, 0.01).unwrap());
    assert_eq!(a, single);
}
