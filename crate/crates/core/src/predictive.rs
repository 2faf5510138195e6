//! Prior predictive simulation of log BF01.
//!
//! Under M0 each replicate draws `q ~ chi2(m-1)`. Under M1 the same draw is
//! inflated to `q * (1 + n g_t^2)` with `g_t` the t-th design-prior draw. Both
//! models read `q` from the same stream, so a design prior concentrated at
//! zero reproduces the M0 output exactly.

use serde::{Deserialize, Serialize};

use crate::bayes_factor::{AnalysisPriorSample, BfKernel};
use crate::distributions::{self, ChiSquared, PriorSpec};
use crate::exec::{self, Backend};
use crate::model::DesignPoint;
use crate::rng::RngStream;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    M0,
    M1,
}

/// Draws from the design prior, one per predictive replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPriorSample {
    gammas: Vec<f64>,
    seed: Option<u64>,
    source: Option<PriorSpec>,
}

impl DesignPriorSample {
    pub fn draw(spec: &PriorSpec, t_count: usize, stream: RngStream) -> Result<Self> {
        let prior = spec.build()?;
        Ok(DesignPriorSample {
            gammas: distributions::sample(&prior, t_count, stream)?,
            seed: Some(stream.key()),
            source: Some(*spec),
        })
    }

    pub fn from_values(gammas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::Empty("design prior sample"));
        }
        if gammas.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::invalid("design prior draws must be finite and >= 0"));
        }
        Ok(DesignPriorSample {
            gammas,
            seed: None,
            source: None,
        })
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

/// Seeds needed to regenerate a [`LogBfSample`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSeeds {
    pub q_stream: u64,
    pub analysis_prior: Option<u64>,
    pub design_prior: Option<u64>,
}

/// Provenance of a [`LogBfSample`]; also the JSON sidecar of exported samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub model: ModelKind,
    pub design: DesignPoint,
    pub s: usize,
    pub t_count: usize,
    pub seeds: SampleSeeds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis_prior: Option<PriorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_prior: Option<PriorSpec>,
}

/// `T` simulated log BF01 values under one model.
#[derive(Debug, Clone, PartialEq)]
pub struct LogBfSample {
    values: Vec<f64>,
    meta: SampleMeta,
}

impl LogBfSample {
    pub fn new(values: Vec<f64>, meta: SampleMeta) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("log BF sample"));
        }
        if values.len() != meta.t_count {
            return Err(Error::LengthMismatch {
                what: "log BF values vs t_count",
                expected: meta.t_count,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("log BF value {i} is not finite")));
        }
        Ok(LogBfSample { values, meta })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> &SampleMeta {
        &self.meta
    }

    pub fn model(&self) -> ModelKind {
        self.meta.model
    }

    pub fn design(&self) -> DesignPoint {
        self.meta.design
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Empirical `P(BF01 < bf)`.
    pub fn prob_below(&self, bf: f64) -> f64 {
        self.values.iter().filter(|&&v| v.exp() < bf).count() as f64 / self.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `t_count` draws of Q under M0 from `stream`.
pub fn draw_null_q(design: DesignPoint, t_count: usize, stream: RngStream, backend: Backend) -> Result<Vec<f64>> {
    distributions::sample_with(&ChiSquared::new(design.df())?, t_count, stream, backend)
}

/// Inflates null draws by `1 + n g_t^2`, pairing index by index.
pub fn inflate_q(null_q: &[f64], design_gammas: &[f64], n: u64) -> Vec<f64> {
    let n = n as f64;
    null_q
        .iter()
        .zip(design_gammas)
        .map(|(q, g)| q * (1.0 + n * g * g))
        .collect()
}

pub fn simulate_bf_m0(
    design: DesignPoint,
    prior_a: &AnalysisPriorSample,
    t_count: usize,
    stream: RngStream,
) -> Result<LogBfSample> {
    simulate_bf_m0_with(design, prior_a, t_count, stream, Backend::default())
}

pub fn simulate_bf_m0_with(
    design: DesignPoint,
    prior_a: &AnalysisPriorSample,
    t_count: usize,
    stream: RngStream,
    backend: Backend,
) -> Result<LogBfSample> {
    if t_count == 0 {
        return Err(Error::Empty("number of predictive draws"));
    }
    let kernel = BfKernel::new(design, prior_a)?;
    let q = draw_null_q(design, t_count, stream, backend)?;
    let values = kernel.log_bf01_batch(&q, backend);
    LogBfSample::new(
        values,
        SampleMeta {
            model: ModelKind::M0,
            design,
            s: prior_a.len(),
            t_count,
            seeds: SampleSeeds {
                q_stream: stream.key(),
                analysis_prior: prior_a.seed(),
                design_prior: None,
            },
            analysis_prior: prior_a.source().copied(),
            design_prior: None,
        },
    )
}

pub fn simulate_bf_m1(
    design: DesignPoint,
    prior_a: &AnalysisPriorSample,
    prior_d: &DesignPriorSample,
    t_count: usize,
    stream: RngStream,
) -> Result<LogBfSample> {
    simulate_bf_m1_with(design, prior_a, prior_d, t_count, stream, Backend::default())
}

pub fn simulate_bf_m1_with(
    design: DesignPoint,
    prior_a: &AnalysisPriorSample,
    prior_d: &DesignPriorSample,
    t_count: usize,
    stream: RngStream,
    backend: Backend,
) -> Result<LogBfSample> {
    if t_count == 0 {
        return Err(Error::Empty("number of predictive draws"));
    }
    if prior_d.len() != t_count {
        return Err(Error::LengthMismatch {
            what: "design prior sample vs predictive draws",
            expected: t_count,
            got: prior_d.len(),
        });
    }
    let kernel = BfKernel::new(design, prior_a)?;
    let q = draw_null_q(design, t_count, stream, backend)?;
    let inflated = inflate_q(&q, prior_d.gammas(), design.n);
    let values = kernel.log_bf01_batch(&inflated, backend);
    LogBfSample::new(
        values,
        SampleMeta {
            model: ModelKind::M1,
            design,
            s: prior_a.len(),
            t_count,
            seeds: SampleSeeds {
                q_stream: stream.key(),
                analysis_prior: prior_a.seed(),
                design_prior: prior_d.seed(),
            },
            analysis_prior: prior_a.source().copied(),
            design_prior: prior_d.source.as_ref().copied(),
        },
    )
}

/// Both predictive samples of a run, with the streams a run derives from
/// its master seed.
pub fn simulate_pair(
    design: DesignPoint,
    analysis: &PriorSpec,
    design_prior: &PriorSpec,
    s: usize,
    t_count: usize,
    seed: u64,
) -> Result<(LogBfSample, LogBfSample)> {
    let streams = RunStreams::new(seed, design.m);
    let prior_a = AnalysisPriorSample::draw(analysis, s, streams.analysis)?;
    let prior_d = DesignPriorSample::draw(design_prior, t_count, streams.design)?;
    let m0 = simulate_bf_m0(design, &prior_a, t_count, streams.q)?;
    let m1 = simulate_bf_m1(design, &prior_a, &prior_d, t_count, streams.q)?;
    Ok((m0, m1))
}

/// Streams used by one run at a given number of sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunStreams {
    pub analysis: RngStream,
    pub design: RngStream,
    pub q: RngStream,
}

impl RunStreams {
    pub fn new(master_seed: u64, m: u32) -> Self {
        let base = RngStream::new(master_seed).derive(m as u64);
        RunStreams {
            analysis: base.derive(1),
            design: base.derive(2),
            q: base.derive(3),
        }
    }
}

/// Helper for plotting code: evaluate log BF01 for arbitrary Q values.
pub fn log_bf_curve(design: DesignPoint, prior_a: &AnalysisPriorSample, qs: &[f64]) -> Result<Vec<f64>> {
    let kernel = BfKernel::new(design, prior_a)?;
    Ok(exec::map_slice(qs, Backend::default(), |&q| kernel.log_bf01(q)))
}
