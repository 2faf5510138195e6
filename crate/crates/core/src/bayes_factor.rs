//! Log-space marginal likelihoods and the Bayes factor BF01.
//!
//! Both marginals drop the factor `(1/m)^{1/2} (2 pi sigma^2)^{(1-m)/2}`,
//! which cancels in the ratio:
//!
//! ```text
//! log m0(Q) = (m-1)/2 ln n - Q/2
//! log m1(Q) = ln E_h[ (1/n + g^2)^{(1-m)/2} exp(-Q / (2 (1 + n g^2))) ]
//! ```
//!
//! The expectation over the analysis prior is a Monte Carlo average over a
//! fixed prior sample, accumulated with log-sum-exp. [`log_m1_quadrature`]
//! evaluates the same integral by adaptive quadrature against the prior
//! density and serves as a reference.

use serde::{Deserialize, Serialize};

use crate::distributions::{self, Prior, PriorSpec};
use crate::exec::{self, Backend};
use crate::model::{compute_q, DesignPoint, EffectSizeVector};
use crate::quadrature;
use crate::rng::RngStream;
use crate::{Error, Result};

/// Draws from the analysis prior shared by every Bayes factor of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisPriorSample {
    gammas: Vec<f64>,
    seed: Option<u64>,
    source: Option<PriorSpec>,
}

impl AnalysisPriorSample {
    pub fn draw(spec: &PriorSpec, s: usize, stream: RngStream) -> Result<Self> {
        let prior = spec.build()?;
        let gammas = distributions::sample(&prior, s, stream)?;
        Ok(AnalysisPriorSample {
            gammas,
            seed: Some(stream.key()),
            source: Some(*spec),
        })
    }

    /// Wraps explicit values, e.g. a point mass for testing.
    pub fn from_values(gammas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::Empty("analysis prior sample"));
        }
        if gammas.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::invalid("analysis prior draws must be finite and >= 0"));
        }
        Ok(AnalysisPriorSample {
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

    pub fn source(&self) -> Option<&PriorSpec> {
        self.source.as_ref()
    }

    /// True when every draw is exactly zero, i.e. M1 coincides with M0.
    pub fn is_degenerate(&self) -> bool {
        self.gammas.iter().all(|&g| g == 0.0)
    }
}

/// `(m-1)/2 ln n - q/2`.
pub fn log_m0(q: f64, design: DesignPoint) -> f64 {
    0.5 * design.df() as f64 * (design.n as f64).ln() - 0.5 * q
}

/// Per-(design, prior sample) terms of the M1 integrand, so that many `q`
/// values can be evaluated with one `exp` per prior draw.
#[derive(Debug, Clone)]
pub struct BfKernel {
    design: DesignPoint,
    // log-weight at q = 0 and the coefficient of -q for each prior draw
    offset: Vec<f64>,
    slope: Vec<f64>,
}

impl BfKernel {
    pub fn new(design: DesignPoint, prior: &AnalysisPriorSample) -> Result<Self> {
        if prior.is_empty() {
            return Err(Error::Empty("analysis prior sample"));
        }
        let n = design.n as f64;
        let ln_n = n.ln();
        let half_df = 0.5 * design.df() as f64;
        let mut offset = Vec::with_capacity(prior.len());
        let mut slope = Vec::with_capacity(prior.len());
        for &g in prior.gammas() {
            let ng2 = n * g * g;
            // ln(1/n + g^2) = ln(1 + n g^2) - ln n
            offset.push(-half_df * (ng2.ln_1p() - ln_n));
            slope.push(0.5 / (1.0 + ng2));
        }
        Ok(BfKernel {
            design,
            offset,
            slope,
        })
    }

    pub fn design(&self) -> DesignPoint {
        self.design
    }

    pub fn log_m1(&self, q: f64) -> f64 {
        let max = self
            .offset
            .iter()
            .zip(&self.slope)
            .map(|(a, b)| a - q * b)
            .fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = self
            .offset
            .iter()
            .zip(&self.slope)
            .map(|(a, b)| (a - q * b - max).exp())
            .sum();
        max + (sum / self.offset.len() as f64).ln()
    }

    pub fn log_bf01(&self, q: f64) -> f64 {
        log_m0(q, self.design) - self.log_m1(q)
    }

    pub fn log_bf01_batch(&self, qs: &[f64], backend: Backend) -> Vec<f64> {
        exec::map_slice(qs, backend, |&q| self.log_bf01(q))
    }
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "q",
            value: q,
            domain: "[0, inf)",
        })
    }
}

/// Monte Carlo estimate of `log m1` over the prior sample.
pub fn log_m1_mc(q: f64, design: DesignPoint, prior: &AnalysisPriorSample) -> Result<f64> {
    check_q(q)?;
    Ok(BfKernel::new(design, prior)?.log_m1(q))
}

pub fn log_bf01(q: f64, design: DesignPoint, prior: &AnalysisPriorSample) -> Result<f64> {
    check_q(q)?;
    Ok(BfKernel::new(design, prior)?.log_bf01(q))
}

/// log BF01 for observed site estimates.
pub fn bf01_from_data(
    t: &EffectSizeVector,
    n: u64,
    sigma: f64,
    prior: &AnalysisPriorSample,
) -> Result<f64> {
    let design = DesignPoint::new(n, t.sites())?;
    let q = compute_q(t, n, sigma)?;
    log_bf01(q, design, prior)
}

/// `log m1` by adaptive quadrature of the integrand against the prior density.
pub fn log_m1_quadrature(q: f64, design: DesignPoint, prior: &Prior) -> Result<f64> {
    check_q(q)?;
    let n = design.n as f64;
    let ln_n = n.ln();
    let half_df = 0.5 * design.df() as f64;
    let log_weight = |g: f64| {
        let ng2 = n * g * g;
        -half_df * (ng2.ln_1p() - ln_n) - 0.5 * q / (1.0 + ng2)
    };

    let (loc, scale) = prior.location_scale();
    let upper = (loc + 100.0 * scale).max(10.0);
    let mut points = vec![0.0, upper];
    let root_n = n.sqrt();
    for k in [0.1, 0.3, 1.0, 3.0, 10.0, 30.0] {
        points.push(k / root_n);
    }
    for k in [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
        points.push(loc + k * scale);
    }
    for x in [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0] {
        points.push(x);
    }
    points.retain(|&x| (0.0..=upper).contains(&x));
    points.sort_by(f64::total_cmp);
    points.dedup();

    let shift = points
        .windows(2)
        .flat_map(|w| (0..=16).map(move |i| w[0] + (w[1] - w[0]) * i as f64 / 16.0))
        .map(log_weight)
        .fold(f64::NEG_INFINITY, f64::max);
    let integrand = |g: f64| (log_weight(g) - shift).exp() * prior.pdf(g);
    let rough = quadrature::integrate_pieces(integrand, &points, 1e-6);
    if rough.is_nan() || rough <= 0.0 {
        return Err(Error::invalid("quadrature of the M1 integrand vanished"));
    }
    let fine = quadrature::integrate_pieces(integrand, &points, 1e-11 * rough);
    Ok(shift + fine.ln())
}
