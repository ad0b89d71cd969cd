//! Zero-mean observation noise added to rewards and costs.

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::LabError;

/// Largest Gaussian standard deviation with variance proxy at most 1/2.
pub const MAX_GAUSSIAN_SIGMA: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Largest uniform half-width `w` with `w²/3 ≤ 1/2`.
pub fn max_uniform_half_width() -> f64 {
    1.5f64.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    None,
    Gaussian { sigma: f64 },
    /// Uniform on `[-half_width, half_width]`.
    BoundedUniform { half_width: f64 },
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec::Gaussian { sigma: 0.1 }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<(), LabError> {
        match *self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::Gaussian { sigma } => {
                if !(sigma >= 0.0 && sigma <= MAX_GAUSSIAN_SIGMA) {
                    return Err(LabError::Config(format!(
                        "noise.sigma = {sigma} outside [0, 1/sqrt(2)]"
                    )));
                }
                Ok(())
            }
            NoiseSpec::BoundedUniform { half_width } => {
                if !(half_width >= 0.0 && half_width <= max_uniform_half_width()) {
                    return Err(LabError::Config(format!(
                        "noise.half_width = {half_width} outside [0, sqrt(1.5)]"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Standard deviation of one draw.
    pub fn std_dev(&self) -> f64 {
        match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::Gaussian { sigma } => sigma,
            NoiseSpec::BoundedUniform { half_width } => half_width / 3f64.sqrt(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::Gaussian { sigma } if sigma > 0.0 => {
                Normal::new(0.0, sigma).expect("validated sigma").sample(rng)
            }
            NoiseSpec::BoundedUniform { half_width } if half_width > 0.0 => {
                Uniform::new_inclusive(-half_width, half_width)
                    .expect("validated width")
                    .sample(rng)
            }
            _ => 0.0,
        }
    }
}

/// On-disk form: `{ kind = "gaussian", sigma = 0.1 }`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    Gaussian,
    BoundedUniform,
}

impl NoiseConfig {
    pub fn resolve(&self) -> Result<NoiseSpec, LabError> {
        let spec = match self.kind {
            NoiseKind::None => NoiseSpec::None,
            NoiseKind::Gaussian => NoiseSpec::Gaussian {
                sigma: self.sigma.unwrap_or(0.1),
            },
            NoiseKind::BoundedUniform => NoiseSpec::BoundedUniform {
                half_width: self.half_width.unwrap_or(0.5),
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<NoiseSpec> for NoiseConfig {
    fn from(spec: NoiseSpec) -> Self {
        match spec {
            NoiseSpec::None => NoiseConfig { kind: NoiseKind::None, sigma: None, half_width: None },
            NoiseSpec::Gaussian { sigma } => NoiseConfig {
                kind: NoiseKind::Gaussian,
                sigma: Some(sigma),
                half_width: None,
            },
            NoiseSpec::BoundedUniform { half_width } => NoiseConfig {
                kind: NoiseKind::BoundedUniform,
                sigma: None,
                half_width: Some(half_width),
            },
        }
    }
}
