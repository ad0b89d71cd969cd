#![allow(dead_code)]

use optpess_core::{Dims, Kernel, MarkovPolicy, StepTable, TabularCmdp};
use optpess_lab::envfile::{EnvironmentFile, SafeBaseline};
use optpess_lab::experiment::{ExperimentContext, RunSettings};
use optpess_lab::{C0Mode, NoiseSpec};

/// Two-action bandit: action 0 pays (1, 1), action 1 pays (0, 0), τ = 0.5.
pub fn mixture_instance() -> TabularCmdp {
    let dims = Dims::new(1, 2, 1);
    TabularCmdp::new(
        Kernel::from_vec(dims, vec![1.0, 1.0]).unwrap(),
        StepTable::from_vec(dims, vec![1.0, 0.0]).unwrap(),
        StepTable::from_vec(dims, vec![1.0, 0.0]).unwrap(),
        0.5,
        vec![1.0],
    )
    .unwrap()
}

pub fn mixture_env() -> EnvironmentFile {
    let model = mixture_instance();
    let safe = SafeBaseline {
        policy: MarkovPolicy::deterministic(model.dims, &[1]).unwrap(),
        cost_bound: 0.0,
    };
    EnvironmentFile::from_model(&model, Some(&safe))
}

pub fn settings(episodes: usize, noise: NoiseSpec) -> RunSettings {
    RunSettings {
        episodes,
        delta: 0.1,
        noise,
        c0_mode: C0Mode::Known,
        bonus_scale: 1.0,
    }
}

pub fn context(env: &EnvironmentFile, settings: RunSettings) -> ExperimentContext {
    let model = env.to_model().unwrap();
    let safe = env.safe_baseline(&model).unwrap();
    ExperimentContext::new(model, safe, settings).unwrap()
}
