use besn::dynamics::{step, StepConfig};
use besn::metrics::{energy, entropy, hamming, mean_entropy_of, positive_fraction};
use besn::rng::{self, streams};
use besn::theory::{
    chaos_condition, critical_asymmetry, critical_degree, mean_field_stats, CriticalDegree,
};
use besn::{generate_reservoir, run, FieldKernel, Reservoir, ReservoirParams, SignalSpec, State};
use proptest::prelude::*;

fn signs(n: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1i8 } else { -1 }), n)
}

fn params() -> impl Strategy<Value = ReservoirParams> {
    (1usize..150, 0.0f64..1.0, -0.49f64..0.49, any::<u64>())
        .prop_map(|(n, f, d, seed)| ReservoirParams::new(n, f * n.min(40) as f64, d, seed))
}

fn dense_step(w: &[Vec<i8>], x: &[i8], u: f64) -> Vec<i8> {
    w.iter()
        .map(|row| {
            let s: i64 = row.iter().zip(x).map(|(&a, &b)| a as i64 * b as i64).sum();
            if s as f64 + u >= 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

proptest! {
    #[test]
    fn generation_is_deterministic(p in params()) {
        let a = generate_reservoir(p).unwrap();
        let b = generate_reservoir(p).unwrap();
        prop_assert_eq!(&a, &b);
        let dense = a.to_dense();
        prop_assert_eq!(dense.len(), p.n_neurons);
        for row in &dense {
            prop_assert_eq!(row.len(), p.n_neurons);
            prop_assert!(row.iter().all(|w| [-1, 0, 1].contains(w)));
        }
    }

    #[test]
    fn sampled_oracle_equivalence(
        (n, x) in (13usize..=20).prop_flat_map(|n| (Just(n), signs(n))),
        f in 0.0f64..1.0,
        d in -0.49f64..0.49,
        seed in any::<u64>(),
        u in prop::sample::select(vec![0.0, -2.0, -0.5, 1.0, 3.0]),
    ) {
        let base = generate_reservoir(ReservoirParams::new(n, f * n as f64, d, seed)).unwrap();
        let expected = dense_step(&base.to_dense(), &x, u);
        let state = State::from_signs(&x).unwrap();
        for kernel in [FieldKernel::Sparse, FieldKernel::Packed] {
            let r = base.clone().with_field_kernel(kernel);
            let got = step(&r, &state, &StepConfig::for_reservoir(&r, 0.0, u), None).unwrap();
            prop_assert_eq!(got.to_signs(), expected.clone());
        }
    }

    #[test]
    fn trajectories_stay_binary_and_reproducible(
        p in params(),
        nu in 0.0f64..0.5,
        bias in 0.0f64..1.0,
    ) {
        let r = generate_reservoir(p).unwrap();
        let x0 = State::random(p.n_neurons, bias, &mut rng::stream(p.seed, streams::INITIAL_STATE)).unwrap();
        let go = || {
            let mut noise = rng::stream(p.seed, streams::NOISE);
            run(&r, &x0, &SignalSpec::multisine(1.0), nu, 25, Some(&mut noise)).unwrap()
        };
        let t = go();
        prop_assert_eq!(&t, &go());
        for s in &t.states {
            let signs = s.to_signs();
            prop_assert!(signs.iter().all(|&v| v == 1 || v == -1));
            prop_assert_eq!(State::from_signs(&signs).unwrap(), s.clone());
        }
    }

    #[test]
    fn fixed_points_absorb(
        p in params(),
        u in -3.0f64..3.0,
    ) {
        let r = generate_reservoir(p).unwrap();
        let cfg = StepConfig::for_reservoir(&r, 0.0, u);
        let mut x = State::random(p.n_neurons, 0.5, &mut rng::stream(p.seed, streams::INITIAL_STATE)).unwrap();
        let mut absorbed: Option<State> = None;
        for _ in 0..60 {
            let next = step(&r, &x, &cfg, None).unwrap();
            if let Some(fixed) = &absorbed {
                prop_assert_eq!(&next, fixed);
            } else if next == x {
                absorbed = Some(next.clone());
            }
            x = next;
        }
    }

    #[test]
    fn hamming_is_a_metric(
        (a, b, c) in (1usize..300).prop_flat_map(|n| (signs(n), signs(n), signs(n)))
    ) {
        let (a, b, c) = (
            State::from_signs(&a).unwrap(),
            State::from_signs(&b).unwrap(),
            State::from_signs(&c).unwrap(),
        );
        let ab = hamming(&a, &b).unwrap();
        prop_assert_eq!(ab, hamming(&b, &a).unwrap());
        prop_assert_eq!(ab == 0.0, a == b);
        prop_assert!(hamming(&a, &c).unwrap() <= ab + hamming(&b, &c).unwrap() + 1e-12);
    }

    #[test]
    fn entropy_and_energy_identities(x in (1usize..500).prop_flat_map(signs)) {
        let s = State::from_signs(&x).unwrap();
        let h = entropy(&s);
        prop_assert!((0.0..=1.0).contains(&h));
        prop_assert_eq!(h, entropy(&s.negated()));
        prop_assert_eq!(energy(&s), 2.0 * positive_fraction(&s) - 1.0);
    }

    #[test]
    fn mean_entropy_ignores_neuron_order(
        (states, perm) in (2usize..80).prop_flat_map(|n| (
            prop::collection::vec(signs(n), 4..12),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )),
    ) {
        let states: Vec<State> = states.iter().map(|x| State::from_signs(x).unwrap()).collect();
        let permuted: Vec<State> = states.iter().map(|s| s.permuted(&perm)).collect();
        let t_end = states.len() - 1;
        prop_assert_eq!(
            mean_entropy_of(&states, 1, t_end).unwrap(),
            mean_entropy_of(&permuted, 1, t_end).unwrap()
        );
    }

    #[test]
    fn critical_curves_decrease(a in 0.001f64..0.5, b in 0.001f64..0.5, k1 in 2.0f64..1e5, k2 in 2.0f64..1e5) {
        prop_assume!(a != b && k1 != k2);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(critical_degree(hi).unwrap().value() < critical_degree(lo).unwrap().value());
        prop_assert!(critical_degree(-hi).unwrap().value() < critical_degree(lo).unwrap().value());
        let (klo, khi) = if k1 < k2 { (k1, k2) } else { (k2, k1) };
        prop_assert!(critical_asymmetry(khi).unwrap() < critical_asymmetry(klo).unwrap());
    }

    #[test]
    fn chaos_condition_matches_critical_degree(k in 0.0f64..2000.0, d in -0.5f64..=0.5) {
        let kc = critical_degree(d).unwrap();
        let margin = 1e-9 * kc.value().clamp(1.0, 1e12);
        prop_assume!((k - kc.value()).abs() > margin);
        prop_assert_eq!(chaos_condition(k, d), kc.predicts_chaos(k));
    }

    #[test]
    fn input_variance_is_nonnegative(k in 0.0f64..1e4, d in -0.5f64..=0.5) {
        let stats = mean_field_stats(k, d).unwrap();
        prop_assert!(stats.variance_input >= 0.0);
        prop_assert_eq!(stats.mean_input, 2.0 * k * d);
    }

    #[test]
    fn multisine_bounded_by_gain(gain in 0.0f64..10.0, n in 0u64..100_000) {
        prop_assert!(SignalSpec::multisine(gain).sample(n).abs() <= gain * (1.0 + 1e-12));
    }
}

#[test]
fn input_variance_vanishes_at_extreme_asymmetry() {
    for k in [1.0, 22.0, 300.0] {
        assert_eq!(mean_field_stats(k, 0.5).unwrap().variance_input, 0.0);
        assert_eq!(mean_field_stats(k, -0.5).unwrap().variance_input, 0.0);
    }
    assert_eq!(critical_degree(0.0).unwrap(), CriticalDegree::AlwaysChaotic);
}

#[test]
fn kernels_agree_on_long_runs() {
    let base = generate_reservoir(ReservoirParams::new(700, 120.0, 0.06, 11)).unwrap();
    let x0 = State::random(700, 0.5, &mut rng::stream(11, streams::INITIAL_STATE)).unwrap();
    let runs: Vec<_> = [FieldKernel::Sparse, FieldKernel::Packed]
        .into_iter()
        .map(|kernel| {
            let r: Reservoir = base.clone().with_field_kernel(kernel);
            let mut noise = rng::stream(11, streams::NOISE);
            run(
                &r,
                &x0,
                &SignalSpec::white_noise(1.0, 11),
                0.05,
                120,
                Some(&mut noise),
            )
            .unwrap()
            .states
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}
