//! End-to-end acceptance checks. Each criterion prints one line with its
//! verdict; the test fails if any criterion fails.

use std::f64::consts::FRAC_PI_4;
use std::io::Write;
use std::time::{Duration, Instant};

use helpercap_core::closed_form::rate_fg;
use helpercap_core::gaussian::{sequential_terms, Var};
use helpercap_core::outer::outer_first_term;
use helpercap_core::verify::{random_config, random_rho, random_strategy};
use helpercap_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;
const DRAWS: usize = 1000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn cfg(v: [f64; 7]) -> ChannelConfig {
    validate_config(v).unwrap()
}

fn half_log2(x: f64) -> f64 {
    0.5 * x.log2()
}

/// Largest deviation, with NaN counted as infinite.
fn track(worst: &mut f64, dev: f64) {
    *worst = worst.max(if dev.is_nan() { f64::INFINITY } else { dev });
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..DRAWS {
        let c = random_config(&mut rng);
        let s = random_strategy(&mut rng, &c);
        let oracle = sequential_terms(&c, &s).unwrap();
        let (f1, g1) = rate_fg(User::One, &c, &s).unwrap();
        let (f2, g2) = rate_fg(User::Two, &c, &s).unwrap();
        for (a, b) in [(f1, oracle.f1), (g1, oracle.g1), (f2, oracle.f2), (g2, oracle.g2)] {
            track(&mut worst, (a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && elapsed < Duration::from_secs(5),
        format!("worst |closed form - oracle| = {worst:.3e} bits over {DRAWS} draws in {elapsed:.2?}"),
    )
}

fn tightness_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst: f64 = 0.0;
    for _ in 0..DRAWS {
        let c = random_config(&mut rng);
        let beta = beta_from_rho(&c, &random_rho(&mut rng));
        let rho = rho_from_beta(&c, beta[0], beta[1]).unwrap();
        let d1 = reduced_f(User::One, &c, beta, 1.0).unwrap() - outer_first_term(User::One, &c, &rho).unwrap();
        let d2 = reduced_f(User::Two, &c, beta, 0.0).unwrap() - outer_first_term(User::Two, &c, &rho).unwrap();
        track(&mut worst, d1.abs());
        track(&mut worst, d2.abs());
    }
    outcome(worst <= 1e-9, format!("worst |reduced rate - outer term| = {worst:.3e} bits"))
}

fn cancellation_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..DRAWS {
        let c = random_config(&mut rng);
        let s = random_strategy(&mut rng, &c);
        let beta = s.beta();
        let base = |gamma: f64| HelperStrategy::new([0.0; 2], [0.0; 3], beta, gamma);
        let s1 = base(1.0).with_alpha(alpha_star_cancel(User::One, &c, beta));
        let s2 = base(s.gamma).with_alpha(alpha_star_cancel(User::Two, &c, beta));
        track(&mut worst, (rate_g(User::One, &c, &s1).unwrap() - c.awgn_rate(User::One)).abs());
        track(&mut worst, (rate_g(User::Two, &c, &s2).unwrap() - c.awgn_rate(User::Two)).abs());
    }
    outcome(worst <= 1e-12, format!("worst |g - interference-free rate| = {worst:.3e} bits"))
}

fn worked_fixture() -> Outcome {
    let c = cfg([1.0, 1.0, 2.0, 5.0, 5.0, 12.0, 12.0]);
    let s = HelperStrategy::new([2.0 / 3.0, 0.0], [0.0; 3], [0.0; 2], 1.0);
    let (f1, g1) = rate_fg(User::One, &c, &s).unwrap();
    let ob = outer_rate_bounds(&c, &CorrelationPoint::new(0.0, 0.0).unwrap()).unwrap();
    let devs = [
        (f1 - 1.0).abs(),
        (g1 - half_log2(14.0 / 3.0)).abs(),
        (ob.ub1 - 1.0).abs(),
        (ob.ub2 - 1.0).abs(),
    ];
    let worst = devs.iter().fold(0.0f64, |a, b| a.max(*b));
    outcome(
        worst <= 1e-9,
        format!("f1 = {f1:.12}, g1 = {g1:.12}, outer(0,0) = ({:.12}, {:.12})", ob.ub1, ob.ub2),
    )
}

/// 45-degree margins of the inner hull over time sharing, frozen from a
/// converged run with 16 directions and the default budget.
const GOLDEN_MARGINS: [(usize, f64); 2] = [(1, 0.157340176485), (3, 0.591097236233)];

fn region_containment() -> Outcome {
    let fixtures = [
        cfg([1.0, 1.0, 2.0, 5.0, 5.0, 12.0, 12.0]),
        cfg([0.8, 1.0, 2.0, 5.0, 5.0, 12.0, 12.0]),
        cfg([1.0, 1.0, 50.0, 5.0, 5.0, 100.0, 100.0]),
        cfg([0.5, 1.0, 50.0, 5.0, 5.0, 100.0, 100.0]),
    ];
    let budget = OptimizerBudget::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, c) in fixtures.iter().enumerate() {
        let start = Instant::now();
        let outer = outer_region_boundary(c, 16);
        let inner = inner_region_boundary(c, 16, &budget);
        let ts = time_sharing_boundary(c, 33, &budget);
        let elapsed = start.elapsed();
        let inner_ok = inner.vertices().iter().all(|v| outer.contains(v.rate, 1e-6));
        let ts_ok = ts.vertices().iter().all(|v| inner.contains(v.rate, 1e-6));
        let margin = inner.support(FRAC_PI_4) - ts.support(FRAC_PI_4);
        let margin_ok = match GOLDEN_MARGINS.iter().find(|(j, _)| *j == i) {
            Some((_, golden)) => margin > 0.0 && (margin - golden).abs() <= 1e-6,
            None => true,
        };
        pass &= inner_ok && ts_ok && margin_ok && elapsed < Duration::from_secs(10);
        parts.push(format!(
            "#{}: inner<=outer {inner_ok}, ts<=inner {ts_ok}, margin {margin:.9} ({elapsed:.2?})",
            i + 1
        ));
    }
    outcome(pass, parts.join("; "))
}

fn classifier_fixtures() -> Outcome {
    let budget = OptimizerBudget::default();
    let mut pass = true;
    let mut parts = Vec::new();

    let c = cfg([1.0, 1.0, 2.0, 5.0, 5.0, 12.0, 12.0]);
    let class = classify(User::One, &c, [0.0; 2], 1.0).unwrap();
    let rate = reduced_f(User::One, &c, [0.0; 2], 1.0).unwrap();
    let seg = capacity_segments(&c, &budget);
    pass &= class == SegmentClass::A && (rate - 1.0).abs() <= 1e-9;
    pass &= seg.user1.class == SegmentClass::A && seg.user1.rate.is_some_and(|r| r >= 1.0 - 1e-9);
    parts.push(format!("weak helper user 1 {class:?} at zero correlation, rate {rate:.12}"));

    let c = cfg([1.0, 1.0, 50.0, 5.0, 5.0, 100.0, 100.0]);
    let seg = capacity_segments(&c, &budget);
    let target = half_log2(6.0);
    pass &= seg.user1.class == SegmentClass::C && seg.user1.rate.is_some_and(|r| (r - target).abs() <= 1e-9);
    parts.push(format!("strong helper user 1 {:?} rate {:?}", seg.user1.class, seg.user1.rate));

    let c = cfg([0.7, 1.2, 3.0, 4.0, 9.0, 0.0, 0.0]);
    let seg = capacity_segments(&c, &budget);
    for k in User::BOTH {
        let s = seg.get(k);
        pass &= s.class == SegmentClass::C && s.rate.is_some_and(|r| (r - c.awgn_rate(k)).abs() <= 1e-9);
    }
    parts.push(format!("stateless {:?}/{:?}", seg.user1.class, seg.user2.class));
    outcome(pass, parts.join("; "))
}

fn sequential_within_joint() -> Outcome {
    use Var::*;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut excess: f64 = 0.0;
    let mut chain: f64 = 0.0;
    for _ in 0..DRAWS {
        let c = random_config(&mut rng);
        let s = random_strategy(&mut rng, &c);
        let u = sequential_terms(&c, &s).unwrap().unclamped();
        let joint = joint_bounds(&c, &s).unwrap();
        track(&mut excess, (u.r1 + u.r2 - joint.bsum).max(0.0));
        let cov = build_joint_covariance(&c, &s).unwrap();
        let set = VariableSet::of;
        let lhs = gaussian_mi(&cov, set(&[V]), set(&[U, S1, S2])).unwrap();
        let rhs = gaussian_mi(&cov, set(&[V]), set(&[S1, S2])).unwrap()
            + gaussian_cmi(&cov, set(&[V]), set(&[U]), set(&[S1, S2])).unwrap();
        track(&mut chain, (lhs - rhs).abs());
    }
    outcome(
        excess <= 1e-9 && chain <= 1e-9,
        format!("sum-rate excess {excess:.3e}, chain-rule deviation {chain:.3e}"),
    )
}

fn monte_carlo() -> Outcome {
    let c = cfg([1.0, 1.0, 2.0, 5.0, 5.0, 12.0, 12.0]);
    let beta = [0.0; 2];
    let s = HelperStrategy::new([0.0; 2], [0.0; 3], beta, 0.5)
        .with_alpha(alpha_star_dpc(User::One, &c, beta, 0.5))
        .with_alpha(alpha_star_dpc(User::Two, &c, beta, 0.5));
    let start = Instant::now();
    let a = covariance_check(&c, &s, 1_000_000, 7, 0.01).unwrap();
    let elapsed = start.elapsed();
    let b = covariance_check(&c, &s, 1_000_000, 7, 0.01).unwrap();
    outcome(
        a.pass && a == b && elapsed < Duration::from_secs(5),
        format!(
            "max relative error {:.3e} at {:?}, rerun identical {}, {elapsed:.2?}",
            a.max_rel_error,
            a.worst_entry,
            a == b
        ),
    )
}

fn degenerate_sweep() -> Outcome {
    let budget = OptimizerBudget::default();
    let mut pass = true;
    let mut parts = Vec::new();

    let c = cfg([0.9, 1.3, 4.0, 3.0, 6.0, 0.0, 0.0]);
    let corner = RatePair::new(c.awgn_rate(User::One), c.awgn_rate(User::Two));
    let outer = outer_region_boundary(&c, 16);
    let inner = inner_region_boundary(&c, 16, &budget);
    let within = |b: &RegionBoundary| {
        b.contains(corner, 1e-12)
            && b.points().iter().all(|p| p.r1 <= corner.r1 + 1e-12 && p.r2 <= corner.r2 + 1e-12)
    };
    pass &= within(&outer) && within(&inner);
    parts.push(format!("stateless rectangle outer {} inner {}", within(&outer), within(&inner)));

    let c = cfg([0.0, 0.0, 2.0, 5.0, 5.0, 12.0, 12.0]);
    let noise = |k: User| half_log2(1.0 + c.p(k) / (c.q(k) + 1.0));
    let inner = inner_region_boundary(&c, 16, &budget);
    let seg = capacity_segments(&c, &budget);
    let mut worst: f64 = 0.0;
    track(&mut worst, (inner.max_r1() - noise(User::One)).abs());
    track(&mut worst, (inner.max_r2() - noise(User::Two)).abs());
    for k in User::BOTH {
        let s = seg.get(k);
        let dev = s.rate.map_or(f64::INFINITY, |r| (r - noise(k)).abs());
        track(&mut worst, dev);
        pass &= s.class != SegmentClass::B;
    }
    pass &= worst <= 1e-9;
    parts.push(format!(
        "zero gains worst deviation {worst:.3e}, classes {:?}/{:?}",
        seg.user1.class, seg.user2.class
    ));
    outcome(pass, parts.join("; "))
}

#[test]
fn acceptance_criteria() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 9] = [
        ("closed form matches covariance oracle", oracle_equivalence),
        ("dirty-paper rate meets outer term", tightness_identity),
        ("aligned auxiliary cancels state", cancellation_identity),
        ("worked fixture", worked_fixture),
        ("region containment and margin", region_containment),
        ("classifier fixtures", classifier_fixtures),
        ("sequential region inside joint region", sequential_within_joint),
        ("Monte Carlo covariance", monte_carlo),
        ("degenerate channels", degenerate_sweep),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        // direct writes are not captured by the test harness
        writeln!(std::io::stdout(), "criterion {} [{name}]: {verdict} - {}", i + 1, o.detail).unwrap();
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
