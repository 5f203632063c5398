use proptest::prelude::*;
use rand::Rng;

use realonline::entropy::{
    covering_number, covering_profile, entropy_potential, greedy_branch_descent, hypercube_class,
    online_dim_lower_bound, FiniteClass, RowSet, ScaledTree,
};
use realonline::exec::{stream_rng, Exec};
use realonline::lipschitz::{envelope_potential, linf, mcshane_extend, random_lipschitz_target, EnvelopeState};
use realonline::losses::{check_approx_triangle, Loss};
use realonline::protocol::{
    certify_realizable, elimination_learner, run_game, BoxHypothesis, Hypothesis, TargetEnv, CERTIFY_TOL,
};
use realonline::registry::{cube_point, play, unit_ball_point, GameSpec};
use realonline::relu::update_inequality_slack;

fn random_triples(seed: u64, n: usize) -> Vec<(f64, f64, f64)> {
    let mut rng = stream_rng(seed, 0);
    (0..n).map(|_| (rng.gen(), rng.gen(), rng.gen())).collect()
}

#[test]
fn power_loss_relaxed_triangle_sampled() {
    for (k, q) in [1.0, 1.5, 2.0, 3.0].into_iter().enumerate() {
        let loss = Loss::power(q).unwrap();
        let report = check_approx_triangle(&loss, &random_triples(k as u64, 10_000)).unwrap();
        assert!(report.violations.is_empty(), "q={q}: {:?}", &report.violations[..1]);
        assert!(report.max_required_c <= loss.c() * (1.0 + 1e-12));
    }
}

#[test]
fn power_loss_constant_is_tight() {
    // a third label at the midpoint needs the full constant
    for q in [2.0, 3.0] {
        let loss = Loss::power(q).unwrap();
        let mut triples = random_triples(q as u64, 10_000);
        triples.extend((0..100).map(|i| {
            let a = i as f64 / 200.0;
            (a, 1.0 - a, 0.5)
        }));
        let report = check_approx_triangle(&loss, &triples).unwrap();
        assert!(report.max_required_c > 2f64.powf(q - 1.0) - 0.05, "q={q}: {}", report.max_required_c);
    }
}

#[test]
fn zero_one_exact_triangle() {
    let labels = [0.0, 0.25, 0.5, 1.0];
    let mut triples = Vec::new();
    for &a in &labels {
        for &b in &labels {
            for &c in &labels {
                triples.push((a, b, c));
            }
        }
    }
    let report = check_approx_triangle(&Loss::zero_one(), &triples).unwrap();
    assert!(report.violations.is_empty());
    assert_eq!(report.max_required_c, 1.0);
}

proptest! {
    #[test]
    fn power_triangle_single(a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0, q in 1.0f64..4.0) {
        let loss = Loss::power(q).unwrap();
        let report = check_approx_triangle(&loss, &[(a, b, c)]).unwrap();
        prop_assert!(report.violations.is_empty());
    }

    #[test]
    fn elimination_mistakes_bounded(
        n in 1usize..8,
        m in 1usize..6,
        seed in any::<u64>(),
        eps in 0.05f64..0.5,
    ) {
        let mut rng = stream_rng(seed, 0);
        let table: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.gen()).collect()).collect();
        let j = rng.gen_range(0..n);
        // target within eps of member j everywhere
        let target: Vec<f64> = table[j].iter().map(|v| (v + rng.gen_range(-eps..eps) * 0.99).clamp(0.0, 1.0)).collect();
        let net: Vec<BoxHypothesis> = table
            .into_iter()
            .map(|row| Box::new(move |x: &[f64]| row[x[0] as usize]) as BoxHypothesis)
            .collect();
        let xs: Vec<Vec<f64>> = (0..60).map(|_| vec![rng.gen_range(0..m) as f64]).collect();
        let t = target.clone();
        let mut env = TargetEnv::new(xs, Box::new(move |x: &[f64]| t[x[0] as usize]), (0.0, 1.0));
        let mut learner = elimination_learner(net, Loss::absolute(), eps).unwrap();
        let tr = run_game(&mut learner, &mut env, &Loss::absolute(), 60).unwrap();
        prop_assert!(tr.count_loss_above(eps) < n);
        prop_assert!(!tr.flagged);
        let witness = move |x: &[f64]| target[x[0] as usize];
        prop_assert!(certify_realizable(&tr, &witness, CERTIFY_TOL));
    }

    #[test]
    fn certify_monotone_in_tol(seed in any::<u64>(), shift in 0.0f64..0.01, t1 in 0.0f64..0.02, t2 in 0.0f64..0.02) {
        let mut rng = stream_rng(seed, 1);
        let f = random_lipschitz_target(&mut rng, 1.0, 1, 8).unwrap();
        let xs: Vec<Vec<f64>> = (0..20).map(|_| cube_point(&mut rng, 1)).collect();
        let g = f.clone();
        let mut env = TargetEnv::new(xs, Box::new(f), (0.0, 1.0));
        let tr = run_game(&mut realonline::protocol::ConstantLearner(0.5), &mut env, &Loss::absolute(), 20).unwrap();
        let off = move |x: &[f64]| g.eval(x) + shift;
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        if certify_realizable(&tr, &off, lo) {
            prop_assert!(certify_realizable(&tr, &off, hi));
        }
    }

    #[test]
    fn envelope_sandwich_and_lipschitz_width(seed in any::<u64>(), d in 1usize..=3, l in 1.0f64..4.0, k in 1usize..12) {
        let mut rng = stream_rng(seed, 2);
        let f = random_lipschitz_target(&mut rng, l, d, 16).unwrap();
        let mut state = EnvelopeState::new(l, d).unwrap();
        for _ in 0..k {
            let x = cube_point(&mut rng, d);
            let y = f.eval(&x);
            state.push(x, y).unwrap();
        }
        for _ in 0..20 {
            let x = cube_point(&mut rng, d);
            let y = cube_point(&mut rng, d);
            let (lo, hi) = state.bounds(&x);
            let v = f.eval(&x);
            prop_assert!(lo <= v + 1e-9 && v <= hi + 1e-9);
            prop_assert!((state.width(&x) - state.width(&y)).abs() <= 2.0 * l * linf(&x, &y) + 1e-9);
        }
    }

    #[test]
    fn envelope_tightens(seed in any::<u64>(), d in 1usize..=2) {
        let mut rng = stream_rng(seed, 3);
        let f = random_lipschitz_target(&mut rng, 1.0, d, 16).unwrap();
        let probes: Vec<Vec<f64>> = (0..30).map(|_| cube_point(&mut rng, d)).collect();
        let mut state = EnvelopeState::new(1.0, d).unwrap();
        let mut widths: Vec<f64> = probes.iter().map(|p| state.width(p)).collect();
        let mut psi = envelope_potential(&state, d as f64 + 1.0, 16).unwrap();
        for _ in 0..8 {
            let x = cube_point(&mut rng, d);
            let y = f.eval(&x);
            state.push(x, y).unwrap();
            for (p, w) in probes.iter().zip(widths.iter_mut()) {
                let now = state.width(p);
                prop_assert!(now <= *w + 1e-12);
                *w = now;
            }
            let next = envelope_potential(&state, d as f64 + 1.0, 16).unwrap();
            prop_assert!(next <= psi + 1e-12);
            psi = next;
        }
    }

    #[test]
    fn one_relu_slack(seed in any::<u64>(), d in 1usize..20) {
        let mut rng = stream_rng(seed, 4);
        for _ in 0..50 {
            let (w_t, w, x) = (unit_ball_point(&mut rng, d), unit_ball_point(&mut rng, d), unit_ball_point(&mut rng, d));
            prop_assert!(update_inequality_slack(&w_t, &w, &x) >= -1e-12);
        }
    }
}

#[test]
fn one_relu_slack_sampled() {
    let mut rng = stream_rng(99, 0);
    let mut worst = f64::INFINITY;
    for i in 0..100_000 {
        let d = 1 + i % 10;
        let (w_t, w, x) = (unit_ball_point(&mut rng, d), unit_ball_point(&mut rng, d), unit_ball_point(&mut rng, d));
        worst = worst.min(update_inequality_slack(&w_t, &w, &x));
    }
    assert!(worst >= -1e-12, "{worst}");
}

#[test]
fn game_determinism() {
    let spec = GameSpec { l: 2.0, d: 2, q: 2.0, t: 200, ..GameSpec::default() };
    let loss = Loss::squared();
    for env in ["far-endpoint", "random-lipschitz", "dyadic", "grid"] {
        let a = play("envelope", env, &spec, &loss, 7, 3).unwrap().transcript;
        let b = play("envelope", env, &spec, &loss, 7, 3).unwrap().transcript;
        assert_eq!(a, b, "{env}");
    }
    let run = |exec: Exec| {
        exec.map_range(8, |i| play("envelope", "far-endpoint", &spec, &loss, 7, i as u64).unwrap().transcript)
    };
    assert_eq!(run(Exec::Sequential), run(Exec::Parallel));
}

fn class_strategy(max_n: usize) -> impl Strategy<Value = FiniteClass> {
    (2usize..=max_n, 1usize..=5).prop_flat_map(|(n, m)| {
        proptest::collection::vec(proptest::collection::vec(0u8..=4, m), n).prop_map(|rows| {
            let values = rows.into_iter().map(|r| r.into_iter().map(|v| v as f64 / 4.0).collect()).collect();
            FiniteClass::new(values, Loss::absolute()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cover_monotone_in_subset_and_scale(c in class_strategy(12), mask in any::<u16>(), seed in any::<u64>()) {
        let all = c.all();
        let sub = RowSet::from_rows(all.iter().filter(|&i| mask >> i & 1 == 1));
        prop_assume!(!sub.is_empty());
        let mut rng = stream_rng(seed, 5);
        let mut scales: Vec<f64> = (0..10).map(|_| rng.gen_range(0.0..1.2)).collect();
        scales.sort_by(f64::total_cmp);
        let mut prev = usize::MAX;
        for eps in scales {
            let n_sub = covering_number(&c, sub, eps).unwrap();
            let n_all = covering_number(&c, all, eps).unwrap();
            prop_assert!(n_sub <= n_all);
            prop_assert!(n_all <= prev);
            prev = n_all;
        }
    }

    #[test]
    fn breakpoint_profile_agrees(c in class_strategy(10), seed in any::<u64>()) {
        let profile = covering_profile(&c, c.all()).unwrap();
        let mut rng = stream_rng(seed, 6);
        for _ in 0..100 {
            let eps = rng.gen_range(0.0..c.diam() * 1.1 + 1e-3);
            let expected = profile.iter().rev().find(|p| p.0 <= eps).map(|p| p.1).unwrap();
            prop_assert_eq!(covering_number(&c, c.all(), eps).unwrap(), expected);
        }
    }

    #[test]
    fn descent_and_dimension_sandwich(c in class_strategy(8), seed in any::<u64>(), depth in 0usize..=5) {
        let mut rng = stream_rng(seed, 7);
        let phi = entropy_potential(&c, c.all()).unwrap();
        let tree = ScaledTree::random(&mut rng, &c, depth).unwrap();
        let desc = greedy_branch_descent(&c, &tree).unwrap();
        prop_assert!(desc.gap_sum <= 4.0 * phi + 1e-9);
        for w in desc.potential_trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9);
        }
        let dim = online_dim_lower_bound(&c, 2).unwrap();
        prop_assert!(dim <= 4.0 * phi + 1e-9);
    }
}

#[test]
fn lipschitz_baseline_dimension() {
    // (2L)^d = 2 points at distance 1/L with all {0,1} labelings
    let c = hypercube_class(2, Loss::absolute()).unwrap();
    assert_eq!(online_dim_lower_bound(&c, 2).unwrap(), 2.0);
    let xs = [vec![-0.5], vec![0.5]];
    for row in c.rows() {
        let anchors: Vec<(Vec<f64>, f64)> = xs.iter().cloned().zip(row.iter().copied()).collect();
        assert!(mcshane_extend(anchors, 1.0).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn class_file_roundtrip(c in class_strategy(12)) {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        c.write_csv(&mut file).unwrap();
        let back = FiniteClass::from_csv(std::fs::File::open(file.path()).unwrap(), Loss::absolute()).unwrap();
        prop_assert_eq!(back.rows(), c.rows());
        prop_assert_eq!(entropy_potential(&back, back.all()).unwrap(), entropy_potential(&c, c.all()).unwrap());
    }
}
