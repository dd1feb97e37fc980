use proptest::prelude::*;
use smallball::variation::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn sequence(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec(-5.0..5.0f64, 1..=max_len),
        // coarse values produce ties and plateaus
        prop::collection::vec((-3i32..=3).prop_map(f64::from), 1..=max_len),
    ]
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), Just(5.0), 1.0..6.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn dp_matches_exhaustive_search(x in sequence(12), p in exponent()) {
        let dp = pvar_dp(&x, p).unwrap();
        let bf = pvar_bruteforce(&x, p).unwrap();
        prop_assert!(rel_close(dp.value, bf.value, 1e-12), "{} vs {}", dp.value, bf.value);
        // the exhaustive search may prefer partitions through plateau or
        // mid-run points; the DP partition uses turning points only
        let tp = turning_points(&x);
        prop_assert!(dp.optimal_indices.iter().all(|i| tp.contains(i)));
    }

    #[test]
    fn value_is_reproduced_by_the_partition(x in sequence(200), p in exponent()) {
        let r = pvar_dp(&x, p).unwrap();
        let again: f64 = r.optimal_indices.windows(2).map(|w| (x[w[1]] - x[w[0]]).abs().powf(p)).sum();
        prop_assert!(rel_close(r.value, again, 1e-12));
        prop_assert!(r.optimal_indices.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(rel_close(pvar_value(&x, p).unwrap(), r.value, 1e-12));
    }

    #[test]
    fn norm_decreases_in_p(x in sequence(60), p in 1.0..4.0f64, dq in 0.0..4.0f64) {
        let q = p + dq;
        let np = pvar_value(&x, p).unwrap().powf(p.recip());
        let nq = pvar_value(&x, q).unwrap().powf(q.recip());
        prop_assert!(nq <= np * (1.0 + 1e-12));
        prop_assert!(nq >= oscillation(&x) * (1.0 - 1e-12));
    }

    #[test]
    fn oscillation_dominates_sup(x in sequence(60)) {
        let mut y = x.clone();
        let x0 = y[0];
        y.iter_mut().for_each(|v| *v -= x0);
        prop_assert!(oscillation(&y) >= sup_norm(&y));
        prop_assert!(l2_norm(&y) <= sup_norm(&y) * (1.0 + 1e-12));
    }

    #[test]
    fn superadditive_at_every_split(x in sequence(40), p in exponent()) {
        let whole = pvar_value(&x, p).unwrap();
        for m in 1..x.len().saturating_sub(1) {
            let split = pvar_value(&x[..=m], p).unwrap() + pvar_value(&x[m..], p).unwrap();
            prop_assert!(whole >= split * (1.0 - 1e-12), "m = {}", m);
        }
    }

    #[test]
    fn mesh_restriction_is_monotone(x in sequence(40), p in exponent()) {
        let full = pvar_value(&x, p).unwrap();
        let mut last = 0.0;
        for gap in 1..x.len().max(2) {
            let v = pvar_mesh(&x, p, gap).unwrap();
            prop_assert!(v >= last * (1.0 - 1e-12));
            prop_assert!(v <= full * (1.0 + 1e-12));
            last = v;
        }
    }

    #[test]
    fn block_sum_below_whole(x in prop::collection::vec(-5.0..5.0f64, 2..=9), blocks in prop::sample::select(vec![1usize, 2, 4, 8]), p in exponent()) {
        let n = 8;
        let mut y = x;
        y.resize(n + 1, 0.0);
        let b = block_pvars(&y, p, blocks).unwrap();
        prop_assert!(b.total() <= pvar_value(&y, p).unwrap() * (1.0 + 1e-12));
        prop_assert!(lemma1_check(&y, p, blocks).unwrap().holds);
    }

    #[test]
    fn holder_controls_increments(x in prop::collection::vec(-5.0..5.0f64, 2..=40), p in 1.0..5.0f64) {
        let n = x.len() - 1;
        let h = holder_seminorm(&x, p, n).unwrap();
        for i in 0..n {
            for j in i + 1..=n {
                let gap = (j - i) as f64 / n as f64;
                prop_assert!((x[j] - x[i]).abs() <= h * gap.powf(p.recip()) * (1.0 + 1e-12));
            }
        }
        // p-variation over unit time is at most the Hölder bound
        prop_assert!(pvar_value(&x, p).unwrap() <= h.powf(p) * (1.0 + 1e-10));
    }
}

#[test]
fn variation_converges_to_oscillation() {
    let x: [f64; 7] = [0.0, 0.4, -0.3, 0.9, 0.1, -0.8, 0.2];
    let q = 1024.0;
    let norm = pvar_value(&x, q).unwrap().powf(1.0 / q);
    assert!(norm >= oscillation(&x));
    assert!(norm - oscillation(&x) < 1e-6);
}

#[test]
fn f32_and_f64_agree() {
    let x64 = [0.0, 1.0, -0.5, 2.0, 1.5, 3.0, -1.0];
    let x32: Vec<f32> = x64.iter().map(|&v| v as f32).collect();
    for p in [1.0, 2.0, 3.5] {
        let a = pvar_dp(&x64, p).unwrap();
        let b = pvar_dp(&x32, p as f32).unwrap();
        assert_eq!(a.optimal_indices, b.optimal_indices);
        assert!(rel_close(a.value, b.value as f64, 1e-5));
    }
}
