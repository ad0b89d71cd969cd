//! Seeded episode loop and exact per-episode metrics.

use optpess_core::{
    evaluate_policy, solve_cmdp_exact, Branch, ConfidenceConfig, EpisodicAgent, ExactSolution,
    LpStatus, MarkovPolicy, OptPessLpAgent, OptPessPdAgent, TabularCmdp, VIOLATION_TOL,
};
use rayon::prelude::*;

use crate::baseline::{FixedAgent, NaiveOptimisticAgent};
use crate::c0_estimate::{estimate_c0_upper_bound, C0Estimate};
use crate::config::{AgentSpec, C0Mode, ExperimentConfig, FixedPolicy};
use crate::envfile::SafeBaseline;
use crate::noise::NoiseSpec;
use crate::simulator::{sample_seeded, Phase};
use crate::LabError;

/// Run-level knobs shared by every (agent, seed) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub episodes: usize,
    pub delta: f64,
    pub noise: NoiseSpec,
    pub c0_mode: C0Mode,
    pub bonus_scale: f64,
}

/// The true model with its exact optimum, solved once and shared.
#[derive(Debug, Clone)]
pub struct ExperimentContext {
    pub model: TabularCmdp,
    pub safe: Option<SafeBaseline>,
    pub optimum: ExactSolution,
    pub settings: RunSettings,
}

impl ExperimentContext {
    pub fn new(
        model: TabularCmdp,
        safe: Option<SafeBaseline>,
        settings: RunSettings,
    ) -> Result<Self, LabError> {
        let optimum = solve_cmdp_exact(&model)?;
        Ok(Self {
            model,
            safe,
            optimum,
            settings,
        })
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self, LabError> {
        Self::new(
            cfg.model.clone(),
            cfg.safe.clone(),
            RunSettings {
                episodes: cfg.episodes,
                delta: cfg.delta,
                noise: cfg.noise,
                c0_mode: cfg.c0_mode,
                bonus_scale: cfg.bonus_scale,
            },
        )
    }

    fn safe(&self) -> Result<&SafeBaseline, LabError> {
        self.safe
            .as_ref()
            .ok_or_else(|| LabError::Config("safe policy required".into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    /// 1-based.
    pub episode: usize,
    pub true_reward_value: f64,
    pub true_cost_value: f64,
    /// `Σ (V* − V^{π^k})`.
    pub regret_cum: f64,
    /// `(Σ (V_c^{π^k} − τ))_+`, the literal running definition.
    pub violation_regret: f64,
    /// Running maximum of `violation_regret`.
    pub violation_regret_max: f64,
    pub violated: bool,
    pub lambda: Option<f64>,
    pub epsilon: Option<f64>,
    pub branch: Option<Branch>,
    pub lp_status: Option<LpStatus>,
}

/// Per-run facts that are not per-episode.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunAnnotations {
    /// Safe-cost bound handed to the agent.
    pub c0_used: Option<f64>,
    /// Present when `c⁰` was estimated; its episodes are not in `rows`.
    pub c0_estimate: Option<C0Estimate>,
    /// Primal-dual burn-in length `C''`, when the scan found one.
    pub burn_in: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSeries {
    pub agent: AgentSpec,
    pub seed: u64,
    pub rows: Vec<MetricsRow>,
    pub annotations: RunAnnotations,
}

impl MetricsSeries {
    pub fn violation_count(&self) -> usize {
        self.rows.iter().filter(|r| r.violated).count()
    }

    /// Row for 1-based episode `k`.
    pub fn at(&self, k: usize) -> Option<&MetricsRow> {
        k.checked_sub(1).and_then(|i| self.rows.get(i))
    }

    pub fn last(&self) -> Option<&MetricsRow> {
        self.rows.last()
    }
}

fn build_agent(
    ctx: &ExperimentContext,
    spec: AgentSpec,
    seed: u64,
    notes: &mut RunAnnotations,
) -> Result<Box<dyn EpisodicAgent + Send>, LabError> {
    let model = &ctx.model;
    let s = ctx.settings;
    let cfg = || -> Result<ConfidenceConfig, LabError> {
        Ok(ConfidenceConfig::new(model.dims, s.delta, s.episodes)?.with_bonus_scale(s.bonus_scale)?)
    };
    let mu = model.initial_dist.clone();
    Ok(match spec {
        AgentSpec::OptPessLp => {
            let safe = ctx.safe()?;
            let c0 = match s.c0_mode {
                C0Mode::Known => safe.cost_bound,
                C0Mode::AppendixE { delta2 } => {
                    let est = estimate_c0_upper_bound(
                        model,
                        &safe.policy,
                        s.episodes,
                        delta2,
                        s.noise,
                        seed,
                    )?;
                    notes.c0_estimate = Some(est);
                    est.c0_prime
                }
            };
            notes.c0_used = Some(c0);
            Box::new(OptPessLpAgent::new(
                model.dims,
                mu,
                model.threshold,
                safe.policy.clone(),
                c0,
                cfg()?,
            )?)
        }
        AgentSpec::OptPessPd => {
            let c0 = ctx.safe()?.cost_bound;
            notes.c0_used = Some(c0);
            let agent = OptPessPdAgent::new(model.dims, mu, model.threshold, c0, cfg()?)?;
            notes.burn_in = agent.burn_in_annotation();
            Box::new(agent)
        }
        AgentSpec::NaiveOptimistic => Box::new(NaiveOptimisticAgent::new(
            model.dims,
            mu,
            model.threshold,
            ConfidenceConfig::new(model.dims, s.delta, s.episodes)?,
        )),
        AgentSpec::Fixed(which) => {
            let policy = match which {
                FixedPolicy::Optimal => ctx.optimum.policy.clone(),
                FixedPolicy::Safe => ctx.safe()?.policy.clone(),
                FixedPolicy::Uniform => MarkovPolicy::uniform(model.dims),
            };
            Box::new(FixedAgent::new(policy))
        }
    })
}

/// One (agent, seed) cell: `K` episodes of select, sample, observe, with
/// metrics from exact evaluation under the true model.
pub fn run_experiment(
    ctx: &ExperimentContext,
    spec: AgentSpec,
    seed: u64,
) -> Result<MetricsSeries, LabError> {
    let mut notes = RunAnnotations::default();
    let mut agent = build_agent(ctx, spec, seed, &mut notes)?;
    let model = &ctx.model;
    let tau = model.threshold;
    let v_star = ctx.optimum.value;

    let mut rows = Vec::with_capacity(ctx.settings.episodes);
    let mut regret = 0.0;
    let mut excess = 0.0;
    let mut excess_max = 0.0f64;
    for k in 1..=ctx.settings.episodes {
        let policy = agent.select_policy(k)?;
        let diag = agent.diagnostics();
        let v_r = evaluate_policy(&model.transitions, &model.reward, &policy, &model.initial_dist)?
            .initial_value;
        let v_c = evaluate_policy(&model.transitions, &model.cost, &policy, &model.initial_dist)?
            .initial_value;
        regret += v_star - v_r;
        excess += v_c - tau;
        let violation_regret = excess.max(0.0);
        excess_max = excess_max.max(violation_regret);
        rows.push(MetricsRow {
            episode: k,
            true_reward_value: v_r,
            true_cost_value: v_c,
            regret_cum: regret,
            violation_regret,
            violation_regret_max: excess_max,
            violated: v_c - tau > VIOLATION_TOL,
            lambda: diag.lambda,
            epsilon: diag.epsilon,
            branch: diag.branch,
            lp_status: diag.lp_status,
        });

        let trajectory = sample_seeded(model, &policy, ctx.settings.noise, seed, k, Phase::Main);
        agent.observe_episode(&trajectory)?;
    }
    Ok(MetricsSeries {
        agent: spec,
        seed,
        rows,
        annotations: notes,
    })
}

/// Every (agent, seed) cell in parallel; results come back in
/// agent-major, seed-minor order regardless of scheduling.
pub fn run_grid(
    ctx: &ExperimentContext,
    agents: &[AgentSpec],
    seeds: &[u64],
) -> Result<Vec<MetricsSeries>, LabError> {
    let cells: Vec<(AgentSpec, u64)> = agents
        .iter()
        .flat_map(|&a| seeds.iter().map(move |&s| (a, s)))
        .collect();
    cells
        .into_par_iter()
        .map(|(a, s)| run_experiment(ctx, a, s))
        .collect()
}
