//! Half-t analysis prior, Folded-t design prior and the chi-squared law of Q.
//!
//! Densities are evaluated directly from the Student-t kernel. The CDFs use
//! the regularised incomplete beta function behind `statrs`' Student-t, and
//! quantiles invert them by bisection.

use rand::Rng;
use rand_distr::{Distribution, StudentT};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::gamma::ln_gamma;

use crate::exec::{self, Backend};
use crate::rng::RngStream;
use crate::{Error, Result};

/// Absolute tolerance of [`HalfT::quantile`] and [`FoldedT::quantile`].
pub const QUANTILE_TOL: f64 = 1e-8;

fn check_nu_sigma(nu: f64, sigma: f64) -> Result<()> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::invalid(format!("degrees of freedom must be > 0, got {nu}")));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid(format!("scale must be > 0, got {sigma}")));
    }
    Ok(())
}

fn check_prob(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "p",
            value: p,
            domain: "(0, 1)",
        })
    }
}

/// Standard Student-t with `nu` degrees of freedom.
#[derive(Debug, Clone, Copy)]
struct StdT {
    nu: f64,
    log_norm: f64,
    cdf: StudentsT,
}

impl StdT {
    fn new(nu: f64) -> Self {
        let log_norm = ln_gamma(0.5 * (nu + 1.0))
            - ln_gamma(0.5 * nu)
            - 0.5 * (nu * std::f64::consts::PI).ln();
        StdT {
            nu,
            log_norm,
            cdf: StudentsT::new(0.0, 1.0, nu).expect("validated degrees of freedom"),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        (self.log_norm - 0.5 * (self.nu + 1.0) * (x * x / self.nu).ln_1p()).exp()
    }

    fn cdf(&self, x: f64) -> f64 {
        self.cdf.cdf(x)
    }

    /// Upper tail `1 - cdf(x)` without cancellation for large `x`.
    fn sf(&self, x: f64) -> f64 {
        self.cdf.sf(x)
    }
}

/// Bisection for the smallest `x >= 0` with `cdf(x) >= p`.
fn invert_cdf(cdf: impl Fn(f64) -> f64, p: f64, start: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = start.max(1e-12);
    while cdf(hi) < p {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > QUANTILE_TOL {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `|sigma * T_nu|`.
#[derive(Debug, Clone, Copy)]
pub struct HalfT {
    nu: f64,
    sigma: f64,
    t: StdT,
}

impl HalfT {
    pub fn new(nu: f64, sigma: f64) -> Result<Self> {
        check_nu_sigma(nu, sigma)?;
        Ok(HalfT {
            nu,
            sigma,
            t: StdT::new(nu),
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        2.0 * self.t.pdf(x / self.sigma) / self.sigma
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        (1.0 - 2.0 * self.t.sf(x / self.sigma)).max(0.0)
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_prob(p)?;
        Ok(invert_cdf(|x| self.cdf(x), p, self.sigma))
    }

    fn draw_chunk<R: Rng>(&self, rng: &mut R, len: usize) -> Vec<f64> {
        let t = StudentT::new(self.nu).expect("validated degrees of freedom");
        (0..len).map(|_| (self.sigma * t.sample(rng)).abs()).collect()
    }
}

/// `|mu + sigma * T_nu|`.
#[derive(Debug, Clone, Copy)]
pub struct FoldedT {
    nu: f64,
    mu: f64,
    sigma: f64,
    t: StdT,
}

impl FoldedT {
    pub fn new(nu: f64, mu: f64, sigma: f64) -> Result<Self> {
        check_nu_sigma(nu, sigma)?;
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::invalid(format!("location must be >= 0, got {mu}")));
        }
        Ok(FoldedT {
            nu,
            mu,
            sigma,
            t: StdT::new(nu),
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let s = self.sigma;
        (self.t.pdf((x - self.mu) / s) + self.t.pdf((x + self.mu) / s)) / s
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let s = self.sigma;
        // P(-x < mu + sigma T < x), written with upper tails to keep precision near 1
        let upper = self.t.sf((x - self.mu) / s);
        let lower = self.t.cdf((-x - self.mu) / s);
        (1.0 - upper - lower).clamp(0.0, 1.0)
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_prob(p)?;
        Ok(invert_cdf(|x| self.cdf(x), p, self.mu + self.sigma))
    }

    fn draw_chunk<R: Rng>(&self, rng: &mut R, len: usize) -> Vec<f64> {
        let t = StudentT::new(self.nu).expect("validated degrees of freedom");
        (0..len)
            .map(|_| (self.mu + self.sigma * t.sample(rng)).abs())
            .collect()
    }
}

/// Chi-squared with integer degrees of freedom (here `m - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChiSquared {
    df: u32,
}

impl ChiSquared {
    pub fn new(df: u32) -> Result<Self> {
        if df == 0 {
            return Err(Error::invalid("chi-squared degrees of freedom must be >= 1"));
        }
        Ok(ChiSquared { df })
    }

    pub fn df(&self) -> u32 {
        self.df
    }

    pub fn cdf(&self, x: f64) -> f64 {
        use statrs::distribution::ChiSquared as StatrsChi;
        if x <= 0.0 {
            return 0.0;
        }
        StatrsChi::new(self.df as f64).expect("df >= 1").cdf(x)
    }

    fn draw_chunk<R: Rng>(&self, rng: &mut R, len: usize) -> Vec<f64> {
        let chi = rand_distr::ChiSquared::new(self.df as f64).expect("df >= 1");
        (0..len).map(|_| chi.sample(rng)).collect()
    }
}

/// Anything that can fill a chunk of draws from one random generator.
pub trait ChunkSampler: Sync {
    fn draw_into<R: Rng>(&self, rng: &mut R, len: usize) -> Vec<f64>;
}

impl ChunkSampler for HalfT {
    fn draw_into<R: Rng>(&self, rng: &mut R, len: usize) -> Vec<f64> {
        self.draw_chunk(rng, len)
    }
}

impl ChunkSampler for FoldedT {
    fn draw_into<R: Rng>(&self, rng: &mut R, len: usize) -> Vec<f64> {
        self.draw_chunk(rng, len)
    }
}

impl ChunkSampler for ChiSquared {
    fn draw_into<R: Rng>(&self, rng: &mut R, len: usize) -> Vec<f64> {
        self.draw_chunk(rng, len)
    }
}

impl ChunkSampler for Prior {
    fn draw_into<R: Rng>(&self, rng: &mut R, len: usize) -> Vec<f64> {
        match self {
            Prior::HalfT(d) => d.draw_chunk(rng, len),
            Prior::FoldedT(d) => d.draw_chunk(rng, len),
        }
    }
}

/// `count` seeded draws; identical for a given stream on any backend.
pub fn sample<D: ChunkSampler>(dist: &D, count: usize, stream: RngStream) -> Result<Vec<f64>> {
    sample_with(dist, count, stream, Backend::default())
}

pub fn sample_with<D: ChunkSampler>(
    dist: &D,
    count: usize,
    stream: RngStream,
    backend: Backend,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Empty("sample count must be at least 1"));
    }
    Ok(exec::map_chunks(count, backend, |c, r| {
        let mut rng = stream.chunk_rng(c);
        dist.draw_into(&mut rng, r.len())
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    HalfT,
    FoldedT,
}

/// Serializable prior on the relative heterogeneity.
///
/// JSON form: `{"family": "half_t" | "folded_t", "nu": .., "mu": .., "sigma": ..}`
/// with `mu` omitted (or zero) for `half_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSpec {
    pub family: Family,
    pub nu: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub mu: f64,
    pub sigma: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl PriorSpec {
    pub fn half_t(nu: f64, sigma: f64) -> Self {
        PriorSpec {
            family: Family::HalfT,
            nu,
            mu: 0.0,
            sigma,
        }
    }

    pub fn folded_t(nu: f64, mu: f64, sigma: f64) -> Self {
        PriorSpec {
            family: Family::FoldedT,
            nu,
            mu,
            sigma,
        }
    }

    /// Weakly informative analysis prior: Half-t(4, 1/7).
    pub fn default_analysis() -> Self {
        Self::half_t(4.0, 1.0 / 7.0)
    }

    /// Informative design prior: Folded-t(4, 0.2, 1/55).
    pub fn default_design() -> Self {
        Self::folded_t(4.0, 0.2, 1.0 / 55.0)
    }

    pub fn build(&self) -> Result<Prior> {
        match self.family {
            Family::HalfT => {
                if self.mu != 0.0 {
                    return Err(Error::invalid(format!(
                        "half_t prior has no location, got mu = {}",
                        self.mu
                    )));
                }
                Ok(Prior::HalfT(HalfT::new(self.nu, self.sigma)?))
            }
            Family::FoldedT => Ok(Prior::FoldedT(FoldedT::new(self.nu, self.mu, self.sigma)?)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Prior {
    HalfT(HalfT),
    FoldedT(FoldedT),
}

impl Prior {
    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Prior::HalfT(d) => d.pdf(x),
            Prior::FoldedT(d) => d.pdf(x),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Prior::HalfT(d) => d.cdf(x),
            Prior::FoldedT(d) => d.cdf(x),
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        match self {
            Prior::HalfT(d) => d.quantile(p),
            Prior::FoldedT(d) => d.quantile(p),
        }
    }

    /// Location and scale, used to place quadrature breakpoints.
    pub fn location_scale(&self) -> (f64, f64) {
        match self {
            Prior::HalfT(d) => (0.0, d.sigma),
            Prior::FoldedT(d) => (d.mu, d.sigma),
        }
    }
}
