//! Distributional checks of the samplers and the small-ball estimator.

use smallball::estimator::MCConfig;
use smallball::oracle::levy_cdf;
use smallball::path::{fill_grid, simulate_jumps, simulate_subordinated};
use smallball::stable::{sample_one_sided, sample_stable};
use smallball::stats::{critical_value, ks_two_sample, wilson_interval, MeanAccumulator};
use smallball::variation::sup_norm;
use smallball::{estimate_smallball, Route, RngStream, SemiNorm, StableLaw64, StreamDomain, SubordinatorLaw64};

const N: usize = 100_000;

fn mean_of(n: usize, seed: u64, f: impl Fn(&mut RngStream) -> f64) -> MeanAccumulator {
    let mut acc = MeanAccumulator::new();
    for i in 0..n {
        let mut rng = RngStream::replicate(seed, StreamDomain::Main, i as u64);
        acc.add(f(&mut rng));
    }
    acc
}

#[test]
fn subordinator_laplace_transform() {
    for &(alpha, kappa) in &[(0.5, 1.0), (0.2, 0.7), (0.9, 2.0)] {
        let law = SubordinatorLaw64::new(alpha, kappa).unwrap();
        for lambda in [0.5, 1.0, 3.0] {
            let acc = mean_of(N, 11, |rng| (-lambda * sample_one_sided(&law, rng)).exp());
            let exact = (-kappa * f64::powf(lambda, alpha)).exp();
            assert!(
                (acc.mean() - exact).abs() < 4.0 * acc.std_error(),
                "alpha {alpha} lambda {lambda}: {} vs {exact}",
                acc.mean()
            );
        }
    }
}

#[test]
fn characteristic_function_of_skewed_laws() {
    for &(alpha, cm, cp) in &[(0.6, 0.1, 0.5), (1.4, 0.7, 0.1), (1.8, 0.3, 0.3)] {
        let law = StableLaw64::from_levy_measure(alpha, cm, cp).unwrap();
        let scale_a = law.scale().powf(alpha);
        let beta = law.beta();
        for lambda in [0.5, 1.5] {
            let modulus = (-scale_a * f64::powf(lambda, alpha)).exp();
            let phase = scale_a * f64::powf(lambda, alpha) * beta * (std::f64::consts::PI * alpha / 2.0).tan();
            let re = mean_of(N, 12, |rng| (lambda * sample_stable(&law, 1.0, rng)).cos());
            let im = mean_of(N, 12, |rng| (lambda * sample_stable(&law, 1.0, rng)).sin());
            assert!((re.mean() - modulus * phase.cos()).abs() < 4.0 * re.std_error(), "{law:?} re");
            assert!((im.mean() - modulus * phase.sin()).abs() < 4.0 * im.std_error(), "{law:?} im");
        }
    }
}

#[test]
fn symmetric_characteristic_function() {
    for &alpha in &[0.7, 1.0, 1.5, 2.0] {
        let law = StableLaw64::from_symmetric(alpha, 1.0).unwrap();
        let acc = mean_of(N, 13, |rng| sample_stable(&law, 1.0, rng).cos());
        let exact = (-1.0f64).exp();
        assert!((acc.mean() - exact).abs() < 4.0 * acc.std_error(), "alpha {alpha}: {}", acc.mean());
    }
}

#[test]
fn self_similarity() {
    let t: f64 = 0.3;
    for law in [
        StableLaw64::from_symmetric(1.3, 1.0).unwrap(),
        StableLaw64::from_levy_measure(0.7, 0.2, 0.9).unwrap(),
    ] {
        let scale = t.powf(law.alpha().recip());
        let at_t: Vec<f64> = (0..N)
            .map(|i| sample_stable(&law, t, &mut RngStream::replicate(1, StreamDomain::Main, i as u64)))
            .collect();
        let rescaled: Vec<f64> = (0..N)
            .map(|i| scale * sample_stable(&law, 1.0, &mut RngStream::replicate(1, StreamDomain::Direct, i as u64)))
            .collect();
        let ks = ks_two_sample(&at_t, &rescaled, 0.001).unwrap();
        assert!(!ks.reject, "{law:?}: {ks:?}");
    }
}

#[test]
fn jump_count_matches_tail_mass() {
    let law = StableLaw64::from_levy_measure(0.7, 0.3, 1.1).unwrap();
    let eta = 0.05;
    let n = 20_000;
    let mut count = MeanAccumulator::new();
    let mut up = 0usize;
    let mut total = 0usize;
    for i in 0..n {
        let mut rng = RngStream::replicate(3, StreamDomain::Main, i as u64);
        let jumps = simulate_jumps(&law, eta, &mut rng).unwrap();
        count.add(jumps.len() as f64);
        up += jumps.sizes().iter().filter(|&&s| s > 0.0).count();
        total += jumps.len();
    }
    let expected = law.tail_mass(eta);
    assert!((count.mean() - expected).abs() < 4.0 * count.std_error());
    let share = up as f64 / total as f64;
    let want = 1.1 / 1.4;
    assert!((share - want).abs() < 4.0 * (want * (1.0 - want) / total as f64).sqrt());
}

#[test]
fn grid_and_subordinated_sup_agree_in_law() {
    let n = 1 << 10;
    let paths = 10_000;
    let law = StableLaw64::from_symmetric(1.0, 1.0).unwrap();
    let mut grid = Vec::with_capacity(paths);
    let mut sub = Vec::with_capacity(paths);
    let mut buf = Vec::new();
    for i in 0..paths {
        let mut rng = RngStream::replicate(5, StreamDomain::Main, i as u64);
        fill_grid(&law, n, &mut rng, &mut buf);
        grid.push(sup_norm(&buf));
        let mut rng = RngStream::replicate(5, StreamDomain::Direct, i as u64);
        let path = simulate_subordinated(1.0, 1.0, n, &mut rng).unwrap();
        assert!(path.clock.windows(2).all(|w| w[0] <= w[1]));
        sub.push(sup_norm(&path.composed));
    }
    let ks = ks_two_sample(&grid, &sub, 0.001).unwrap();
    assert!(!ks.reject, "{ks:?}");
}

fn endpoint_config(n_paths: usize, seed: u64, threads: usize) -> MCConfig {
    MCConfig {
        n_paths,
        master_seed: seed,
        epsilons: vec![0.05, 0.2],
        threads,
        confidence: 0.95,
        pilot: false,
        ..MCConfig::default()
    }
}

#[test]
fn interval_coverage() {
    let law = StableLaw64::from_subordinator(0.5, 1.0).unwrap();
    let exact = levy_cdf(0.2, 1.0);
    let runs = 200;
    let mut covered = 0;
    for r in 0..runs {
        let est = estimate_smallball(&law, SemiNorm::PVariation { p: 2.0 }, &endpoint_config(2_000, r, 1)).unwrap();
        assert_eq!(est.route, Route::Endpoint);
        let pt = &est.points[1];
        assert_eq!(pt.interval, wilson_interval(pt.hits, 2_000, critical_value(0.95)));
        if pt.interval.0 <= exact && exact <= pt.interval.1 {
            covered += 1;
        }
    }
    // nominal 95%; 200 runs leave about ±3% of binomial noise
    assert!(covered >= 180, "covered {covered} of {runs}");
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let law = StableLaw64::from_symmetric(1.5, 1.0).unwrap();
    let cfg = |threads| MCConfig {
        n_paths: 3_000,
        grid_n: 256,
        epsilons: vec![1.5, 2.5],
        threads,
        ..MCConfig::default()
    };
    let norm = SemiNorm::PVariation { p: 2.0 };
    let one = estimate_smallball(&law, norm, &cfg(1)).unwrap();
    let four = estimate_smallball(&law, norm, &cfg(4)).unwrap();
    assert_eq!(one.points, four.points);
    assert_eq!(one.raw_grid_points, four.raw_grid_points);
}

#[test]
fn hits_are_monotone_in_epsilon() {
    let law = StableLaw64::from_symmetric(1.0, 1.0).unwrap();
    let cfg = MCConfig {
        n_paths: 5_000,
        grid_n: 128,
        epsilons: vec![0.3, 0.6, 1.0, 2.0],
        pilot: false,
        refine_check: false,
        ..MCConfig::default()
    };
    let est = estimate_smallball(&law, SemiNorm::Oscillation, &cfg).unwrap();
    let p: Vec<f64> = est.points.iter().map(|pt| pt.p_hat).collect();
    assert!(p.windows(2).all(|w| w[0] <= w[1]), "{p:?}");
    assert!(est.points.iter().all(|pt| (0.0..=1.0).contains(&pt.p_hat)));
}
