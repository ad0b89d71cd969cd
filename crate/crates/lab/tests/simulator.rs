mod common;

use optpess_core::{evaluate_policy, Dims, Kernel, MarkovPolicy, StepTable, TabularCmdp};
use optpess_lab::{generate_environment, sample_seeded, GeneratorSpec, NoiseSpec, Phase};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn deterministic_model_gives_the_unique_trajectory() {
    let env = generate_environment(GeneratorSpec::Chain, 4, Dims::new(4, 2, 3)).unwrap();
    let model = env.to_model().unwrap();
    let policy = MarkovPolicy::deterministic(model.dims, &[1; 12]).unwrap();
    let t = sample_seeded(&model, &policy, NoiseSpec::None, 9, 1, Phase::Main);
    let states: Vec<usize> = t.steps.iter().map(|s| s.state).collect();
    assert_eq!(states, vec![0, 1, 2]);
    assert_eq!(t.steps[2].next_state, 3);
    for (h, step) in t.steps.iter().enumerate() {
        assert_eq!(step.action, 1);
        assert_eq!(step.reward, model.reward.get(h, step.state, 1));
        assert_eq!(step.cost, model.cost.get(h, step.state, 1));
    }
    t.validate(model.dims).unwrap();
}

#[test]
fn same_seed_same_trajectory() {
    let env = generate_environment(GeneratorSpec::Random, 1, Dims::new(4, 3, 5)).unwrap();
    let model = env.to_model().unwrap();
    let policy = MarkovPolicy::uniform(model.dims);
    for k in 1..50 {
        let a = sample_seeded(&model, &policy, NoiseSpec::default(), 77, k, Phase::Main);
        let b = sample_seeded(&model, &policy, NoiseSpec::default(), 77, k, Phase::Main);
        assert_eq!(a, b);
    }
    let a = sample_seeded(&model, &policy, NoiseSpec::default(), 77, 1, Phase::Main);
    let b = sample_seeded(&model, &policy, NoiseSpec::default(), 77, 2, Phase::Main);
    let c = sample_seeded(&model, &policy, NoiseSpec::default(), 78, 1, Phase::Main);
    assert_ne!(a.steps, b.steps);
    assert_ne!(a.steps, c.steps);
}

#[test]
fn environment_streams_do_not_depend_on_the_policy() {
    // Initial states and reward noise come from their own streams, so two
    // agents playing different policies see the same draws.
    let env = generate_environment(GeneratorSpec::Random, 2, Dims::new(4, 3, 2)).unwrap();
    let mut model = env.to_model().unwrap();
    model.initial_dist = vec![0.25; 4];
    let greedy = MarkovPolicy::deterministic(model.dims, &[0; 8]).unwrap();
    let uniform = MarkovPolicy::uniform(model.dims);
    for k in 1..30 {
        let a = sample_seeded(&model, &greedy, NoiseSpec::default(), 5, k, Phase::Main);
        let b = sample_seeded(&model, &uniform, NoiseSpec::default(), 5, k, Phase::Main);
        assert_eq!(a.steps[0].state, b.steps[0].state);
        let noise_a = a.steps[0].reward - model.reward.get(0, a.steps[0].state, a.steps[0].action);
        let noise_b = b.steps[0].reward - model.reward.get(0, b.steps[0].state, b.steps[0].action);
        assert!((noise_a - noise_b).abs() < 1e-12);
    }
}

#[test]
fn monte_carlo_return_matches_exact_value() {
    let env = generate_environment(GeneratorSpec::Random, 3, Dims::new(3, 2, 4)).unwrap();
    let model = env.to_model().unwrap();
    let policy = MarkovPolicy::uniform(model.dims);
    let exact = evaluate_policy(&model.transitions, &model.reward, &policy, &model.initial_dist)
        .unwrap()
        .initial_value;
    let n = 100_000;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for k in 1..=n {
        let g = sample_seeded(&model, &policy, NoiseSpec::default(), 11, k, Phase::Main).total_reward();
        sum += g;
        sum_sq += g * g;
    }
    let mean = sum / n as f64;
    let var = sum_sq / n as f64 - mean * mean;
    let se = (var / n as f64).sqrt();
    assert!((mean - exact).abs() <= 3.0 * se, "mean {mean}, exact {exact}, se {se}");
}

#[test]
fn noise_is_zero_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for spec in [
        NoiseSpec::Gaussian { sigma: 0.1 },
        NoiseSpec::Gaussian { sigma: 0.5 },
        NoiseSpec::BoundedUniform { half_width: 0.5 },
    ] {
        let n = 1_000_000;
        let mean: f64 = (0..n).map(|_| spec.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!(mean.abs() <= 4.0 * spec.std_dev() / 1e3, "{spec:?}: {mean}");
    }
    let w = NoiseSpec::BoundedUniform { half_width: 0.3 };
    for _ in 0..10_000 {
        assert!(w.sample(&mut rng).abs() <= 0.3);
    }
    assert_eq!(NoiseSpec::None.sample(&mut rng), 0.0);
}

#[test]
fn noise_limits() {
    assert!(NoiseSpec::Gaussian { sigma: std::f64::consts::FRAC_1_SQRT_2 }.validate().is_ok());
    assert!(NoiseSpec::Gaussian { sigma: 0.8 }.validate().is_err());
    assert!(NoiseSpec::Gaussian { sigma: -0.1 }.validate().is_err());
    assert!(NoiseSpec::BoundedUniform { half_width: 1.2 }.validate().is_ok());
    assert!(NoiseSpec::BoundedUniform { half_width: 1.3 }.validate().is_err());
}

#[test]
fn trajectory_respects_chaining() {
    let dims = Dims::new(2, 1, 3);
    let model = TabularCmdp::new(
        Kernel::from_vec(dims, vec![0.5; 12]).unwrap(),
        StepTable::constant(dims, 0.5),
        StepTable::constant(dims, 0.1),
        1.0,
        vec![0.5, 0.5],
    )
    .unwrap();
    let policy = MarkovPolicy::uniform(dims);
    for k in 1..200 {
        let t = sample_seeded(&model, &policy, NoiseSpec::None, 3, k, Phase::Main);
        assert_eq!(t.steps.len(), 3);
        for w in t.steps.windows(2) {
            assert_eq!(w[0].next_state, w[1].state);
        }
        assert_eq!(t.episode, k);
    }
}

#[test]
fn biased_estimates_converge_under_noise() {
    let dims = Dims::new(1, 2, 1);
    let model = TabularCmdp::new(
        Kernel::from_vec(dims, vec![1.0, 1.0]).unwrap(),
        StepTable::from_vec(dims, vec![0.3, 0.7]).unwrap(),
        StepTable::from_vec(dims, vec![0.6, 0.2]).unwrap(),
        0.5,
        vec![1.0],
    )
    .unwrap();
    let noise = NoiseSpec::Gaussian { sigma: 0.1 };
    let policy = MarkovPolicy::uniform(dims);
    let mut emp = optpess_core::EmpiricalModel::new(dims);
    for k in 1..=20_000 {
        emp.update_counts(&sample_seeded(&model, &policy, noise, 5, k, Phase::Main)).unwrap();
    }
    let cfg = optpess_core::ConfidenceConfig::new(dims, 0.1, 20_000).unwrap();
    let (r_hat, c_hat) = (emp.reward_hat(), emp.cost_hat());
    let (r_tilde, c_tilde) = optpess_core::biased_tables_pd(&emp, &cfg);
    for a in 0..2 {
        let n = emp.count(0, 0, a);
        assert!(n > 9_000);
        let beta = optpess_core::confidence_radius(n, cfg.z);
        let se = noise.std_dev() / (n as f64).sqrt();
        let (r, c) = (model.reward.get(0, 0, a), model.cost.get(0, 0, a));
        assert!((r_hat.get(0, 0, a) - r).abs() <= 3.0 * beta + 3.0 * se);
        assert!((c_hat.get(0, 0, a) - c).abs() <= 3.0 * beta + 3.0 * se);
        let bonus = 2.0 * beta;
        assert!((r_tilde.get(0, 0, a) - r - bonus).abs() <= 3.0 * se);
        assert!((c_tilde.get(0, 0, a) - c + bonus).abs() <= 3.0 * se);
    }
}
