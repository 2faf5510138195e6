//! Balanced multi-site model: `t_j ~ N(mu, sigma^2 (1/n + gamma^2))` with
//! `gamma = tau / sigma`, and the Q statistic through which the Bayes factor
//! sees the data.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::rng::RngStream;
use crate::{Error, Result};

/// Subjects per site `n` and number of sites `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DesignPoint {
    pub n: u64,
    pub m: u32,
}

impl DesignPoint {
    pub fn new(n: u64, m: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("subjects per site must be >= 1"));
        }
        if m < 2 {
            return Err(Error::InsufficientSites(m as usize));
        }
        Ok(DesignPoint { n, m })
    }

    /// Degrees of freedom of Q.
    pub fn df(&self) -> u32 {
        self.m - 1
    }
}

/// Known unit standard deviation. The overall mean is integrated out under a
/// flat prior and never instantiated at the design stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalModelSpec {
    pub sigma: f64,
}

impl HierarchicalModelSpec {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid(format!("unit sd must be > 0, got {sigma}")));
        }
        Ok(HierarchicalModelSpec { sigma })
    }
}

impl Default for HierarchicalModelSpec {
    fn default() -> Self {
        HierarchicalModelSpec { sigma: 1.0 }
    }
}

/// Site effect-size estimates `t_1..t_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectSizeVector(Vec<f64>);

impl EffectSizeVector {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.len() < 2 {
            return Err(Error::InsufficientSites(t.len()));
        }
        if let Some(i) = t.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteData(i));
        }
        Ok(EffectSizeVector(t))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn sites(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// `Q = n * sum_j (t_j - tbar)^2 / sigma^2`.
pub fn compute_q(t: &EffectSizeVector, n: u64, sigma: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("subjects per site must be >= 1"));
    }
    HierarchicalModelSpec::new(sigma)?;
    let xs = t.as_slice();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    Ok(n as f64 * ss / (sigma * sigma))
}

/// One draw of `m` site estimates from the marginal model with relative
/// heterogeneity `gamma` (`gamma = 0` is the no-heterogeneity model).
pub fn simulate_effect_sizes<R: rand::Rng + ?Sized>(
    spec: &HierarchicalModelSpec,
    design: DesignPoint,
    gamma: f64,
    mu: f64,
    rng: &mut R,
) -> Result<EffectSizeVector> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::invalid(format!("gamma must be >= 0, got {gamma}")));
    }
    if !mu.is_finite() {
        return Err(Error::invalid("overall mean must be finite"));
    }
    let sd = spec.sigma * (1.0 / design.n as f64 + gamma * gamma).sqrt();
    let normal = Normal::new(mu, sd).map_err(|e| Error::invalid(e.to_string()))?;
    EffectSizeVector::new((0..design.m).map(|_| normal.sample(rng)).collect())
}

/// Convenience wrapper drawing `reps` replicated data sets from `stream`.
pub fn simulate_replicates(
    spec: &HierarchicalModelSpec,
    design: DesignPoint,
    gamma: f64,
    mu: f64,
    reps: usize,
    stream: RngStream,
) -> Result<Vec<EffectSizeVector>> {
    let mut rng = stream.chunk_rng(0);
    (0..reps)
        .map(|_| simulate_effect_sizes(spec, design, gamma, mu, &mut rng))
        .collect()
}
