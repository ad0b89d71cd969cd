use crate::estimation::Trajectory;
use crate::lp::LpStatus;
use crate::model::MarkovPolicy;
use crate::Result;

/// Which policy set the zero-violation agent used in an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Only the known safe policy is admitted.
    Singleton,
    /// All policies whose pessimistic cost is within the threshold.
    LpSet,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Singleton => "singleton",
            Self::LpSet => "lp_set",
        }
    }
}

/// Per-episode annotations an agent exposes after `select_policy`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub lambda: Option<f64>,
    pub epsilon: Option<f64>,
    pub branch: Option<Branch>,
    pub lp_status: Option<LpStatus>,
}

/// An episodic learner: picks a policy before each episode and learns from
/// the resulting trajectory.
pub trait EpisodicAgent {
    /// Policy for the 1-based `episode`.
    fn select_policy(&mut self, episode: usize) -> Result<MarkovPolicy>;

    fn observe_episode(&mut self, trajectory: &Trajectory) -> Result<()>;

    fn diagnostics(&self) -> Diagnostics {
        Diagnostics::default()
    }
}

impl<A: EpisodicAgent + ?Sized> EpisodicAgent for alloc::boxed::Box<A> {
    fn select_policy(&mut self, episode: usize) -> Result<MarkovPolicy> {
        (**self).select_policy(episode)
    }

    fn observe_episode(&mut self, trajectory: &Trajectory) -> Result<()> {
        (**self).observe_episode(trajectory)
    }

    fn diagnostics(&self) -> Diagnostics {
        (**self).diagnostics()
    }
}
